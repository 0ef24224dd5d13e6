mod args;

use std::io::{self, Write};
use std::process::ExitCode;

use clap::Parser;
use digital_barrier::expansion::residual_order_report_with;
use digital_barrier::harness::{
    method_label, price_by_method, run_sweep, write_expansion_csv, write_records, write_records_csv,
    write_records_json, EngineOptions, OutputFormat, SweepConfig,
};
use digital_barrier::oracles::{mc_price, McConfig};
use digital_barrier::{ErrorKind, Method, PricingError, Result};

use args::{Cli, Command, ConvergeArgs, ExpansionArgs, McArgs, PriceArgs};

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Price(a) => cmd_price(&a),
        Command::Converge(a) => cmd_converge(&a),
        Command::Expansion(a) => cmd_expansion(&a),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let (kind, code) = match e.kind() {
                ErrorKind::Argument | ErrorKind::Io => ("argument", 2),
                ErrorKind::Numerical => ("numerical", 3),
            };
            eprintln!("error kind={kind} code={} message=\"{e}\"", e.code());
            ExitCode::from(code)
        }
    }
}

fn mc_config(a: &McArgs) -> McConfig {
    McConfig { paths: a.mc_paths, seed: a.seed, use_bridge_correction: !a.no_bridge, ..McConfig::default() }
}

fn cmd_price(a: &PriceArgs) -> Result<()> {
    let (market, spec) = a.option.resolve()?;
    let opts =
        EngineOptions { rule: a.option.rule(), mc: mc_config(&a.mc), subtract_constant_term: a.subtract_constant_term };
    let res = match (a.method, a.steps) {
        (Method::MonteCarlo, None) => mc_price(&market, &spec, &opts.mc)?,
        (Method::Analytic, _) => price_by_method(&market, &spec, Method::Analytic, 1, &opts)?,
        (m, Some(n)) => price_by_method(&market, &spec, m, n, &opts)?,
        (_, None) => price_by_method(&market, &spec, a.method, 100, &opts)?,
    };
    let label = method_label(a.method, &opts);
    let mut out = io::stdout().lock();
    if a.json {
        let diagnostics: serde_json::Map<String, serde_json::Value> =
            res.diagnostics.iter().map(|(k, v)| (k.to_string(), serde_json::json!(v))).collect();
        let value = serde_json::json!({
            "method": label,
            "steps": res.n_steps,
            "price": res.price,
            "diagnostics": diagnostics,
        });
        writeln!(out, "{value}")?;
    } else {
        writeln!(out, "method {label}")?;
        if let Some(n) = res.n_steps {
            writeln!(out, "steps {n}")?;
        }
        writeln!(out, "price {:.6}", res.price)?;
        for (k, v) in &res.diagnostics {
            writeln!(out, "{k} {v}")?;
        }
    }
    Ok(())
}

fn cmd_converge(a: &ConvergeArgs) -> Result<()> {
    let (market, spec) = a.option.resolve()?;
    let cfg = SweepConfig {
        n_values: a.n_values.clone(),
        methods: a.methods.clone(),
        market,
        spec,
        options: EngineOptions {
            rule: a.option.rule(),
            mc: mc_config(&a.mc),
            subtract_constant_term: a.subtract_constant_term,
        },
        record_runtime: !a.no_timing,
    };
    cfg.validate()?;
    // fail on an unwritable path before spending time on the sweep
    if let Some(path) = &a.out {
        std::fs::File::create(path).map_err(|e| PricingError::Io(format!("{}: {e}", path.display())))?;
    }
    let rows = run_sweep(&cfg)?;
    let format: OutputFormat = a.format.into();
    match &a.out {
        Some(path) => write_records(path, format, &rows),
        None => match format {
            OutputFormat::Csv => write_records_csv(io::stdout().lock(), &rows),
            OutputFormat::Json => write_records_json(io::stdout().lock(), &rows),
        },
    }
}

fn cmd_expansion(a: &ExpansionArgs) -> Result<()> {
    let (market, spec) = a.option.resolve()?;
    let report = residual_order_report_with(&market, &spec, &a.n_values, a.option.rule())?;
    match &a.out {
        Some(path) => {
            let file = std::fs::File::create(path).map_err(|e| PricingError::Io(format!("{}: {e}", path.display())))?;
            write_expansion_csv(io::BufWriter::new(file), &report)?;
        }
        None => write_expansion_csv(io::stdout().lock(), &report)?,
    }
    eprintln!("regime={} growth_flag={}", report.regime.name(), report.growth_flag);
    Ok(())
}
