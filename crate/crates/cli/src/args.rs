use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use digital_barrier::harness::OutputFormat;
use digital_barrier::model::{Barrier, DigitalOptionSpec, MarketParams};
use digital_barrier::{ExerciseStyle, Knock, Method, Orientation, PricingError, ProbabilityRule, Result, Side};

#[derive(Debug, Parser)]
#[command(name = "digibar", version, about = "Price single-barrier digital options and study lattice convergence")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Price one option with one method.
    Price(PriceArgs),
    /// Sweep step counts and methods, writing one row per (n, method).
    Converge(ConvergeArgs),
    /// Compare observed CRR errors with the asymptotic expansion.
    Expansion(ExpansionArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SideArg {
    Call,
    Put,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum KnockArg {
    Out,
    In,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OrientationArg {
    Down,
    Up,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum StyleArg {
    European,
    American,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum RuleArg {
    Exact,
    FirstOrder,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FormatArg {
    Csv,
    Json,
}

impl From<FormatArg> for OutputFormat {
    fn from(f: FormatArg) -> Self {
        match f {
            FormatArg::Csv => OutputFormat::Csv,
            FormatArg::Json => OutputFormat::Json,
        }
    }
}

/// Contract and market. `--table` preloads a parameter set; explicit flags override it.
#[derive(Debug, Clone, Args)]
pub struct OptionArgs {
    /// Preset: 1 is the down-and-out call with L=60 < K=100, 2 has K=60 < L=100
    /// (both s0=150, r=0.1, vol=0.25, T=1).
    #[arg(long, value_parser = clap::value_parser!(u8).range(1..=2))]
    pub table: Option<u8>,
    #[arg(long, value_enum)]
    pub side: Option<SideArg>,
    #[arg(long, value_enum)]
    pub knock: Option<KnockArg>,
    #[arg(long, value_enum)]
    pub orientation: Option<OrientationArg>,
    #[arg(long, value_enum)]
    pub style: Option<StyleArg>,
    #[arg(long)]
    pub s0: Option<f64>,
    #[arg(long)]
    pub strike: Option<f64>,
    #[arg(long)]
    pub barrier: Option<f64>,
    #[arg(long)]
    pub rate: Option<f64>,
    #[arg(long)]
    pub vol: Option<f64>,
    #[arg(long)]
    pub maturity: Option<f64>,
    /// One-step up-probability of the lattices.
    #[arg(long, value_enum, default_value = "first-order")]
    pub probability: RuleArg,
}

#[derive(Debug, Clone, Args)]
pub struct McArgs {
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    #[arg(long, default_value_t = 100_000)]
    pub mc_paths: u64,
    /// Disable the Brownian-bridge crossing correction.
    #[arg(long)]
    pub no_bridge: bool,
}

#[derive(Debug, Clone, Args)]
pub struct PriceArgs {
    #[command(flatten)]
    pub option: OptionArgs,
    #[arg(long, default_value = "crr", value_parser = parse_method)]
    pub method: Method,
    /// Lattice steps; for Monte Carlo the number of monitoring dates (default 365 per year).
    #[arg(long)]
    pub steps: Option<usize>,
    #[command(flatten)]
    pub mc: McArgs,
    /// Remove the surviving 1/sqrt(n) term from the BIL price when the barrier is above the strike.
    #[arg(long)]
    pub subtract_constant_term: bool,
    /// Print a JSON object instead of text.
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Clone, Args)]
pub struct ConvergeArgs {
    #[command(flatten)]
    pub option: OptionArgs,
    /// Comma-separated, strictly ascending step counts.
    #[arg(long = "n", value_delimiter = ',', default_value = "100,200,400,800,1600,3200")]
    pub n_values: Vec<usize>,
    /// Comma-separated subset of crr, crr_combinatorial, bil, analytic, mc, enumeration.
    #[arg(long, value_delimiter = ',', required = true, num_args = 1.., value_parser = parse_method)]
    pub methods: Vec<Method>,
    #[arg(long, value_enum, default_value = "csv")]
    pub format: FormatArg,
    /// Output file; standard output when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[command(flatten)]
    pub mc: McArgs,
    #[arg(long)]
    pub subtract_constant_term: bool,
    /// Write runtime_ms as 0 so repeated runs produce identical files.
    #[arg(long)]
    pub no_timing: bool,
}

#[derive(Debug, Clone, Args)]
pub struct ExpansionArgs {
    #[command(flatten)]
    pub option: OptionArgs,
    #[arg(long = "n", value_delimiter = ',', default_value = "100,200,400,800,1600,3200")]
    pub n_values: Vec<usize>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

fn parse_method(s: &str) -> std::result::Result<Method, String> {
    s.parse::<Method>().map_err(|e| e.to_string())
}

struct Preset {
    s0: f64,
    strike: f64,
    barrier: f64,
    rate: f64,
    vol: f64,
    maturity: f64,
}

fn preset(table: u8) -> Preset {
    let (strike, barrier) = if table == 1 { (100.0, 60.0) } else { (60.0, 100.0) };
    Preset { s0: 150.0, strike, barrier, rate: 0.1, vol: 0.25, maturity: 1.0 }
}

impl OptionArgs {
    pub fn rule(&self) -> ProbabilityRule {
        match self.probability {
            RuleArg::Exact => ProbabilityRule::Exact,
            RuleArg::FirstOrder => ProbabilityRule::FirstOrder,
        }
    }

    pub fn resolve(&self) -> Result<(MarketParams<f64>, DigitalOptionSpec<f64>)> {
        let p = self.table.map(preset);
        let pick = |flag: Option<f64>, from: fn(&Preset) -> f64, name: &str| -> Result<f64> {
            flag.or_else(|| p.as_ref().map(from))
                .ok_or_else(|| PricingError::InvalidArgument(format!("--{name} is required without --table")))
        };
        let market = MarketParams::new(
            pick(self.s0, |p| p.s0, "s0")?,
            pick(self.rate, |p| p.rate, "rate")?,
            pick(self.vol, |p| p.vol, "vol")?,
            pick(self.maturity, |p| p.maturity, "maturity")?,
        );
        let side = match self.side.unwrap_or(SideArg::Call) {
            SideArg::Call => Side::Call,
            SideArg::Put => Side::Put,
        };
        let knock = match self.knock.unwrap_or(KnockArg::Out) {
            KnockArg::Out => Knock::Out,
            KnockArg::In => Knock::In,
        };
        let orientation = match self.orientation.unwrap_or(OrientationArg::Down) {
            OrientationArg::Down => Orientation::Down,
            OrientationArg::Up => Orientation::Up,
        };
        let style = match self.style.unwrap_or(StyleArg::European) {
            StyleArg::European => ExerciseStyle::European,
            StyleArg::American => ExerciseStyle::American,
        };
        let barrier = Barrier { level: pick(self.barrier, |p| p.barrier, "barrier")?, orientation, knock };
        let spec = DigitalOptionSpec::new(side, pick(self.strike, |p| p.strike, "strike")?, barrier, style);
        digital_barrier::model::validate(&market, &spec)?;
        Ok((market, spec))
    }
}
