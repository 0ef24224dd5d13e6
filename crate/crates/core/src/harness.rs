//! Convergence sweeps and their CSV/JSON serialization.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::analytic;
use crate::bil::{price_adjusted_bil_with, BilOptions};
use crate::crr::{price_backward_with, price_combinatorial_with, ProbabilityRule};
use crate::error::{PricingError, Result};
use crate::expansion::ResidualReport;
use crate::model::{DigitalOptionSpec, MarketParams, Method, PriceResult};
use crate::oracles::{enumerate_paths_price_with, mc_price, McConfig};

/// Knobs shared by every engine.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct EngineOptions {
    pub rule: ProbabilityRule,
    pub mc: McConfig,
    pub subtract_constant_term: bool,
}

/// Prices `spec` with one method. `steps` is ignored by the closed form and
/// sets the monitoring grid (`steps` dates over the life) for Monte Carlo.
pub fn price_by_method(
    market: &MarketParams<f64>,
    spec: &DigitalOptionSpec<f64>,
    method: Method,
    steps: usize,
    opts: &EngineOptions,
) -> Result<PriceResult<f64>> {
    match method {
        Method::Analytic => analytic::price(market, spec),
        Method::Crr => price_backward_with(market, spec, steps, opts.rule),
        Method::CrrCombinatorial => price_combinatorial_with(market, spec, steps, opts.rule),
        Method::Bil => price_adjusted_bil_with(
            market,
            spec,
            steps,
            BilOptions { rule: opts.rule, subtract_constant_term: opts.subtract_constant_term },
        ),
        Method::Enumeration => enumerate_paths_price_with(market, spec, steps, opts.rule),
        Method::MonteCarlo => {
            let per_year = (steps as f64 / market.maturity).ceil() as usize;
            mc_price(market, spec, &McConfig { steps_per_year: per_year.max(1), ..opts.mc })
        }
    }
}

/// Method label as written to sweep output; Monte Carlo rows carry their seed.
pub fn method_label(method: Method, opts: &EngineOptions) -> String {
    match method {
        Method::MonteCarlo => format!("mc[seed={}]", opts.mc.seed),
        m => m.name().to_string(),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepConfig {
    pub n_values: Vec<usize>,
    pub methods: Vec<Method>,
    pub market: MarketParams<f64>,
    pub spec: DigitalOptionSpec<f64>,
    pub options: EngineOptions,
    /// When false, `runtime_ms` is written as 0 so output is byte-reproducible.
    pub record_runtime: bool,
}

impl SweepConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n_values.is_empty() {
            return Err(PricingError::InvalidArgument("no step counts given".into()));
        }
        if self.n_values.windows(2).any(|w| w[0] >= w[1]) {
            return Err(PricingError::InvalidArgument("step counts must be strictly ascending".into()));
        }
        if self.n_values[0] == 0 {
            return Err(PricingError::InvalidArgument("step counts must be positive".into()));
        }
        if self.methods.is_empty() {
            return Err(PricingError::InvalidArgument("no methods given".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceRecord {
    pub n: usize,
    pub method: String,
    #[serde(with = "nan_as_null")]
    pub price: f64,
    #[serde(with = "nan_as_null")]
    pub reference: f64,
    #[serde(with = "nan_as_null")]
    pub error: f64,
    #[serde(rename = "delta_K", with = "nan_as_null")]
    pub delta_k: f64,
    #[serde(rename = "delta_L", with = "nan_as_null")]
    pub delta_l: f64,
    #[serde(with = "nan_as_null")]
    pub eps_n: f64,
    pub runtime_ms: f64,
}

pub const CSV_HEADER: [&str; 9] =
    ["n", "method", "price", "reference", "error", "delta_K", "delta_L", "eps_n", "runtime_ms"];

pub fn run_sweep(cfg: &SweepConfig) -> Result<Vec<ConvergenceRecord>> {
    cfg.validate()?;
    let reference = analytic::reference_price(&cfg.market, &cfg.spec).unwrap_or(f64::NAN);
    let mut methods = cfg.methods.clone();
    methods.sort();
    methods.dedup();
    let jobs: Vec<(usize, Method)> = cfg.n_values.iter().flat_map(|&n| methods.iter().map(move |&m| (n, m))).collect();

    let mut rows = jobs
        .par_iter()
        .map(|&(n, method)| {
            let start = Instant::now();
            let res = price_by_method(&cfg.market, &cfg.spec, method, n, &cfg.options)?;
            let runtime_ms = if cfg.record_runtime { start.elapsed().as_secs_f64() * 1e3 } else { 0.0 };
            let diag = |k: &str| res.diagnostic(k).unwrap_or(f64::NAN);
            Ok((
                method,
                ConvergenceRecord {
                    n,
                    method: method_label(method, &cfg.options),
                    price: res.price,
                    reference,
                    error: res.price - reference,
                    delta_k: diag("delta_k"),
                    delta_l: diag("delta_l"),
                    eps_n: diag("eps_n"),
                    runtime_ms,
                },
            ))
        })
        .collect::<Result<Vec<_>>>()?;
    rows.sort_by_key(|(method, r)| (r.n, *method));
    Ok(rows.into_iter().map(|(_, r)| r).collect())
}

fn full(v: f64) -> String {
    format!("{v:.16e}")
}

fn parse_f64(field: &str) -> Result<f64> {
    field.trim().parse().map_err(|_| PricingError::Io(format!("bad number '{field}'")))
}

pub fn write_records_csv<W: Write>(writer: W, records: &[ConvergenceRecord]) -> Result<()> {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(writer);
    w.write_record(CSV_HEADER)?;
    for r in records {
        w.write_record([
            r.n.to_string(),
            r.method.clone(),
            full(r.price),
            full(r.reference),
            full(r.error),
            full(r.delta_k),
            full(r.delta_l),
            full(r.eps_n),
            full(r.runtime_ms),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_records_csv<R: Read>(reader: R) -> Result<Vec<ConvergenceRecord>> {
    let mut rdr = csv::Reader::from_reader(reader);
    let header = rdr.headers()?.clone();
    if header.iter().ne(CSV_HEADER.iter().copied()) {
        return Err(PricingError::Io(format!("unexpected header {:?}", header)));
    }
    let mut out = Vec::new();
    for rec in rdr.records() {
        let rec = rec?;
        let f = |i: usize| parse_f64(&rec[i]);
        out.push(ConvergenceRecord {
            n: rec[0].trim().parse().map_err(|_| PricingError::Io(format!("bad n '{}'", &rec[0])))?,
            method: rec[1].to_string(),
            price: f(2)?,
            reference: f(3)?,
            error: f(4)?,
            delta_k: f(5)?,
            delta_l: f(6)?,
            eps_n: f(7)?,
            runtime_ms: f(8)?,
        });
    }
    Ok(out)
}

pub fn write_records_json<W: Write>(writer: W, records: &[ConvergenceRecord]) -> Result<()> {
    let mut w = BufWriter::new(writer);
    serde_json::to_writer_pretty(&mut w, records)?;
    w.write_all(b"\n")?;
    w.flush()?;
    Ok(())
}

pub fn read_records_json<R: Read>(reader: R) -> Result<Vec<ConvergenceRecord>> {
    Ok(serde_json::from_reader(BufReader::new(reader))?)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Csv,
    Json,
}

pub fn write_records(path: &Path, format: OutputFormat, records: &[ConvergenceRecord]) -> Result<()> {
    let file = File::create(path).map_err(|e| PricingError::Io(format!("{}: {e}", path.display())))?;
    match format {
        OutputFormat::Csv => write_records_csv(BufWriter::new(file), records),
        OutputFormat::Json => write_records_json(file, records),
    }
}

pub fn read_records(path: &Path, format: OutputFormat) -> Result<Vec<ConvergenceRecord>> {
    let file = File::open(path).map_err(|e| PricingError::Io(format!("{}: {e}", path.display())))?;
    match format {
        OutputFormat::Csv => read_records_csv(BufReader::new(file)),
        OutputFormat::Json => read_records_json(file),
    }
}

pub const EXPANSION_HEADER: [&str; 9] =
    ["n", "observed", "predicted", "residual", "residual_times_n32", "delta_K", "delta_L", "eps_n", "constant_term"];

pub fn write_expansion_csv<W: Write>(writer: W, report: &ResidualReport<f64>) -> Result<()> {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(writer);
    w.write_record(EXPANSION_HEADER)?;
    for r in &report.rows {
        w.write_record([
            r.n.to_string(),
            full(r.observed),
            full(r.predicted),
            full(r.observed - r.predicted),
            full(r.scaled_residual),
            full(r.delta_k),
            full(r.delta_l),
            r.eps_n.to_string(),
            full(r.constant_term),
        ])?;
    }
    w.flush()?;
    Ok(())
}

mod nan_as_null {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
        if v.is_finite() {
            s.serialize_f64(*v)
        } else {
            s.serialize_none()
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        Ok(Option::<f64>::deserialize(d)?.unwrap_or(f64::NAN))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{Barrier, Side};

    fn sweep(methods: Vec<Method>) -> SweepConfig {
        SweepConfig {
            n_values: vec![8, 16],
            methods,
            market: MarketParams::new(150.0, 0.1, 0.25, 1.0),
            spec: DigitalOptionSpec::european(Side::Call, 100.0, Barrier::down_out(60.0)),
            options: EngineOptions::default(),
            record_runtime: false,
        }
    }

    fn same(a: &ConvergenceRecord, b: &ConvergenceRecord) -> bool {
        let eq = |x: f64, y: f64| x.to_bits() == y.to_bits() || (x.is_nan() && y.is_nan());
        a.n == b.n
            && a.method == b.method
            && eq(a.price, b.price)
            && eq(a.reference, b.reference)
            && eq(a.error, b.error)
            && eq(a.delta_k, b.delta_k)
            && eq(a.delta_l, b.delta_l)
            && eq(a.eps_n, b.eps_n)
            && eq(a.runtime_ms, b.runtime_ms)
    }

    #[test]
    fn rows_sorted_and_labelled() {
        let rows = run_sweep(&sweep(vec![Method::Crr, Method::Analytic, Method::Enumeration])).unwrap();
        let keys: Vec<(usize, &str)> = rows.iter().map(|r| (r.n, r.method.as_str())).collect();
        assert_eq!(
            keys,
            [(8, "analytic"), (8, "crr"), (8, "enumeration"), (16, "analytic"), (16, "crr"), (16, "enumeration")]
        );
        for r in &rows {
            assert_eq!(r.error, r.price - r.reference);
        }
        assert!(rows[0].delta_k.is_nan());
        assert!(rows[1].delta_k.is_finite());
    }

    #[test]
    fn mc_label_carries_seed() {
        let mut cfg = sweep(vec![Method::MonteCarlo]);
        cfg.options.mc = McConfig { paths: 2000, seed: 9, ..McConfig::default() };
        let rows = run_sweep(&cfg).unwrap();
        assert_eq!(rows[0].method, "mc[seed=9]");
    }

    #[test]
    fn invalid_sweeps() {
        assert!(run_sweep(&sweep(vec![])).is_err());
        let mut cfg = sweep(vec![Method::Crr]);
        cfg.n_values = vec![16, 8];
        assert!(run_sweep(&cfg).is_err());
    }

    #[test]
    fn round_trips() {
        let mut rows = run_sweep(&sweep(vec![Method::Crr, Method::Analytic, Method::Bil])).unwrap();
        rows[0].runtime_ms = 0.1234567890123;
        let mut csv_buf = Vec::new();
        write_records_csv(&mut csv_buf, &rows).unwrap();
        let text = String::from_utf8(csv_buf.clone()).unwrap();
        assert!(text.starts_with("n,method,price,reference,error,delta_K,delta_L,eps_n,runtime_ms\n"));
        assert!(!text.contains('\r'));
        let back = read_records_csv(csv_buf.as_slice()).unwrap();
        assert!(rows.iter().zip(&back).all(|(a, b)| same(a, b)));

        let mut json_buf = Vec::new();
        write_records_json(&mut json_buf, &rows).unwrap();
        let back = read_records_json(json_buf.as_slice()).unwrap();
        assert!(rows.iter().zip(&back).all(|(a, b)| same(a, b)));
    }
}
