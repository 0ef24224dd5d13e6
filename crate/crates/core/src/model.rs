//! Market and contract description, validation, payoff semantics and the
//! knock-in/knock-out parity shared by every engine.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{PricingError, Result};
use crate::scalar::Scalar;

/// Black-Scholes market: spot, continuously compounded rate, volatility, maturity.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MarketParams<F> {
    pub s0: F,
    pub rate: F,
    pub sigma: F,
    pub maturity: F,
}

impl<F: Scalar> MarketParams<F> {
    pub fn new(s0: F, rate: F, sigma: F, maturity: F) -> Self {
        Self { s0, rate, sigma, maturity }
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in
            [("spot", self.s0), ("rate", self.rate), ("volatility", self.sigma), ("maturity", self.maturity)]
        {
            if !v.is_finite() {
                return Err(PricingError::NonFinite(name));
            }
        }
        if self.s0 <= F::zero() {
            return Err(PricingError::Nonpositive("spot"));
        }
        if self.sigma <= F::zero() {
            return Err(PricingError::Nonpositive("volatility"));
        }
        if self.maturity <= F::zero() {
            return Err(PricingError::Nonpositive("maturity"));
        }
        if self.rate < F::zero() {
            return Err(PricingError::NegativeRate);
        }
        Ok(())
    }

    /// `exp(-r T)`.
    pub fn discount(&self) -> F {
        (-self.rate * self.maturity).exp()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Call,
    Put,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Orientation {
    Down,
    Up,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Knock {
    In,
    Out,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ExerciseStyle {
    European,
    American,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Barrier<F> {
    pub level: F,
    pub orientation: Orientation,
    pub knock: Knock,
}

impl<F: Scalar> Barrier<F> {
    pub fn down_out(level: F) -> Self {
        Self { level, orientation: Orientation::Down, knock: Knock::Out }
    }

    pub fn down_in(level: F) -> Self {
        Self { level, orientation: Orientation::Down, knock: Knock::In }
    }

    /// Breach test on a price, inclusive of the barrier level itself.
    pub fn is_breached(&self, s: F) -> bool {
        match self.orientation {
            Orientation::Down => s <= self.level,
            Orientation::Up => s >= self.level,
        }
    }
}

/// A unit cash-or-nothing option with one barrier.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DigitalOptionSpec<F> {
    pub side: Side,
    pub strike: F,
    pub barrier: Barrier<F>,
    pub style: ExerciseStyle,
}

impl<F: Scalar> DigitalOptionSpec<F> {
    pub fn new(side: Side, strike: F, barrier: Barrier<F>, style: ExerciseStyle) -> Self {
        Self { side, strike, barrier, style }
    }

    pub fn european(side: Side, strike: F, barrier: Barrier<F>) -> Self {
        Self::new(side, strike, barrier, ExerciseStyle::European)
    }

    pub fn with_style(self, style: ExerciseStyle) -> Self {
        Self { style, ..self }
    }

    pub fn with_knock(self, knock: Knock) -> Self {
        Self { barrier: Barrier { knock, ..self.barrier }, ..self }
    }

    pub fn with_side(self, side: Side) -> Self {
        Self { side, ..self }
    }

    pub fn with_barrier_level(self, level: F) -> Self {
        Self { barrier: Barrier { level, ..self.barrier }, ..self }
    }

    pub fn alive_at_inception(&self, s0: F) -> bool {
        !self.barrier.is_breached(s0)
    }

    pub fn is_american(&self) -> bool {
        self.style == ExerciseStyle::American
    }
}

/// Output of [`validate`]. Carries whether the barrier is already breached at
/// the spot, which only closed-form routines treat as an error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Validated<F> {
    pub market: MarketParams<F>,
    pub spec: DigitalOptionSpec<F>,
    pub alive_at_inception: bool,
}

impl<F: Scalar> Validated<F> {
    pub fn require_alive(self) -> Result<Self> {
        if self.alive_at_inception {
            Ok(self)
        } else {
            Err(PricingError::KnockedAtInception)
        }
    }
}

pub fn validate<F: Scalar>(market: &MarketParams<F>, spec: &DigitalOptionSpec<F>) -> Result<Validated<F>> {
    market.validate()?;
    if !spec.strike.is_finite() {
        return Err(PricingError::NonFinite("strike"));
    }
    if !spec.barrier.level.is_finite() {
        return Err(PricingError::NonFinite("barrier"));
    }
    if spec.strike <= F::zero() {
        return Err(PricingError::Nonpositive("strike"));
    }
    if spec.barrier.level <= F::zero() {
        return Err(PricingError::Nonpositive("barrier"));
    }
    Ok(Validated { market: *market, spec: *spec, alive_at_inception: spec.alive_at_inception(market.s0) })
}

/// Digital payoff at expiry: calls pay on `s >= K`, puts on the strict complement.
pub fn terminal_payoff<F: Scalar>(spec: &DigitalOptionSpec<F>, s_t: F) -> F {
    let in_the_money = match spec.side {
        Side::Call => s_t >= spec.strike,
        Side::Put => s_t < spec.strike,
    };
    if in_the_money {
        F::one()
    } else {
        F::zero()
    }
}

/// `price_in + price_out - price_vanilla`; zero for European prices from one scheme.
pub fn in_out_parity<F: Scalar>(style: ExerciseStyle, price_in: F, price_out: F, price_vanilla: F) -> Result<F> {
    if style == ExerciseStyle::American {
        return Err(PricingError::Unsupported("in/out parity does not hold under early exercise".into()));
    }
    Ok(price_in + price_out - price_vanilla)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Analytic,
    Bil,
    Crr,
    CrrCombinatorial,
    Enumeration,
    #[serde(rename = "mc")]
    MonteCarlo,
}

impl Method {
    pub const ALL: [Method; 6] =
        [Method::Analytic, Method::Bil, Method::Crr, Method::CrrCombinatorial, Method::Enumeration, Method::MonteCarlo];

    pub fn name(&self) -> &'static str {
        match self {
            Method::Analytic => "analytic",
            Method::Bil => "bil",
            Method::Crr => "crr",
            Method::CrrCombinatorial => "crr_combinatorial",
            Method::Enumeration => "enumeration",
            Method::MonteCarlo => "mc",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = PricingError;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "analytic" => Ok(Method::Analytic),
            "bil" | "adjusted_bil" => Ok(Method::Bil),
            "crr" => Ok(Method::Crr),
            "crr_combinatorial" | "combinatorial" => Ok(Method::CrrCombinatorial),
            "enumeration" => Ok(Method::Enumeration),
            "mc" | "monte_carlo" => Ok(Method::MonteCarlo),
            other => Err(PricingError::InvalidArgument(format!("unknown method '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PriceResult<F> {
    pub price: F,
    pub method: Method,
    pub n_steps: Option<usize>,
    pub diagnostics: BTreeMap<&'static str, F>,
}

impl<F: Scalar> PriceResult<F> {
    pub fn new(price: F, method: Method, n_steps: Option<usize>) -> Self {
        Self { price, method, n_steps, diagnostics: BTreeMap::new() }
    }

    pub fn with(mut self, key: &'static str, value: F) -> Self {
        self.diagnostics.insert(key, value);
        self
    }

    pub fn diagnostic(&self, key: &str) -> Option<F> {
        self.diagnostics.get(key).copied()
    }
}
