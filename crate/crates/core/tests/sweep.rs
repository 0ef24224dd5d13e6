use digital_barrier::harness::{read_records, run_sweep, write_records, EngineOptions, OutputFormat, SweepConfig};
use digital_barrier::model::{Barrier, DigitalOptionSpec, MarketParams};
use digital_barrier::{Method, Side};

fn config(methods: Vec<Method>) -> SweepConfig {
    SweepConfig {
        n_values: vec![8, 12, 20],
        methods,
        market: MarketParams::new(150.0, 0.1, 0.25, 1.0),
        spec: DigitalOptionSpec::european(Side::Call, 100.0, Barrier::down_out(60.0)),
        options: EngineOptions::default(),
        record_runtime: false,
    }
}

#[test]
fn records_round_trip_through_both_formats() {
    let rows = run_sweep(&config(vec![Method::Crr, Method::Analytic, Method::Bil, Method::Enumeration])).unwrap();
    assert_eq!(rows.len(), 12);
    let dir = tempfile::tempdir().unwrap();
    for (format, name) in [(OutputFormat::Csv, "r.csv"), (OutputFormat::Json, "r.json")] {
        let path = dir.path().join(name);
        write_records(&path, format, &rows).unwrap();
        let back = read_records(&path, format).unwrap();
        assert_eq!(back.len(), rows.len());
        for (a, b) in rows.iter().zip(&back) {
            assert_eq!(a.n, b.n);
            assert_eq!(a.method, b.method);
            assert_eq!(a.price.to_bits(), b.price.to_bits());
            assert!(a.delta_k.to_bits() == b.delta_k.to_bits() || (a.delta_k.is_nan() && b.delta_k.is_nan()));
        }
    }
}

#[test]
fn sweep_rows_are_ordered_and_errors_consistent() {
    let rows = run_sweep(&config(vec![Method::Bil, Method::Crr])).unwrap();
    let keys: Vec<(usize, &str)> = rows.iter().map(|r| (r.n, r.method.as_str())).collect();
    assert_eq!(keys, vec![(8, "bil"), (8, "crr"), (12, "bil"), (12, "crr"), (20, "bil"), (20, "crr")]);
    for r in &rows {
        assert_eq!(r.error, r.price - r.reference);
        assert_eq!(r.runtime_ms, 0.0);
    }
}

#[test]
fn invalid_sweeps_are_rejected() {
    assert!(run_sweep(&config(vec![])).is_err());
    let mut cfg = config(vec![Method::Crr]);
    cfg.n_values = vec![20, 8];
    assert!(run_sweep(&cfg).is_err());
}
