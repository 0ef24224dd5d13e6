//! The n-step Cox-Ross-Rubinstein tree for single-barrier digital options.
//!
//! Node `(i, j)` sits at `S_{i,j} = s0 * exp((2j - i) σ√Δτ)`. Internally every
//! node is addressed by its *level* `m = 2j - i`, an integer multiple of
//! `σ√Δτ` in log-space, so barrier and strike classification reduce to
//! integer comparisons against a level computed once per tree. Backward
//! induction, the reflection-principle sums and the geometry diagnostics all
//! share that classification and therefore agree node for node.

use crate::error::{PricingError, Result};
use crate::model::{
    validate, DigitalOptionSpec, ExerciseStyle, Knock, MarketParams, Method, Orientation, PriceResult, Side,
};
use crate::scalar::{CompensatedSum, Scalar};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TreeParams<F> {
    pub steps: usize,
    pub dtau: F,
    /// Log-space spacing between adjacent levels, `σ√Δτ`.
    pub dx: F,
    pub up: F,
    pub down: F,
    pub p: F,
    /// One-step discount factor `exp(-r Δτ)`.
    pub discount: F,
    pub rule: ProbabilityRule,
}

/// How the one-step up-probability is derived from `(r, σ, Δτ)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ProbabilityRule {
    /// `(e^{rΔτ} - d) / (u - d)`, the martingale probability of the tree.
    Exact,
    /// `1/2 + (r - σ²/2)√Δτ / (2σ)`, the first-order expansion of `Exact`.
    #[default]
    FirstOrder,
}

impl ProbabilityRule {
    pub fn name(self) -> &'static str {
        match self {
            ProbabilityRule::Exact => "exact",
            ProbabilityRule::FirstOrder => "first-order",
        }
    }
}

impl std::str::FromStr for ProbabilityRule {
    type Err = PricingError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "exact" => Ok(ProbabilityRule::Exact),
            "first-order" | "first_order" => Ok(ProbabilityRule::FirstOrder),
            other => Err(PricingError::InvalidArgument(format!("unknown probability rule '{other}'"))),
        }
    }
}

/// Tree with the exact martingale probability.
pub fn build_tree_params<F: Scalar>(market: &MarketParams<F>, steps: usize) -> Result<TreeParams<F>> {
    build_tree_params_with(market, steps, ProbabilityRule::Exact)
}

pub fn build_tree_params_with<F: Scalar>(
    market: &MarketParams<F>,
    steps: usize,
    rule: ProbabilityRule,
) -> Result<TreeParams<F>> {
    market.validate()?;
    if steps == 0 {
        return Err(PricingError::InvalidArgument("step count must be at least 1".into()));
    }
    let dtau = market.maturity / F::from_count(steps);
    let dx = market.sigma * dtau.sqrt();
    let up = dx.exp();
    let down = (-dx).exp();
    let p = match rule {
        ProbabilityRule::Exact => ((market.rate * dtau).exp() - down) / (up - down),
        ProbabilityRule::FirstOrder => {
            let half = F::lit(0.5);
            half + (market.rate - half * market.sigma * market.sigma) * dtau.sqrt() / (F::lit(2.0) * market.sigma)
        }
    };
    if !(p > F::zero() && p < F::one()) {
        return Err(PricingError::DegenerateTree { steps, p: p.to_f64().unwrap_or(f64::NAN) });
    }
    Ok(TreeParams { steps, dtau, dx, up, down, p, discount: (-market.rate * dtau).exp(), rule })
}

impl<F: Scalar> TreeParams<F> {
    /// `S_{i,j}`; `None` outside `0 <= j <= i <= n`.
    pub fn node_price(&self, s0: F, i: usize, j: usize) -> Option<F> {
        if j > i || i > self.steps {
            return None;
        }
        Some(s0 * (F::from_index(2 * j as i64 - i as i64) * self.dx).exp())
    }

    fn level_tolerance(&self, log_level: F) -> F {
        F::snap_tolerance() * F::one().max(log_level.abs()) / self.dx
    }

    /// Highest level `m` with `log S_m <= log(price)` (inclusive, snapped).
    pub fn level_at_or_below(&self, s0: F, price: F) -> i64 {
        let x = (price.ln() - s0.ln()) / self.dx;
        (x + self.level_tolerance(price.ln())).floor().to_i64().expect("finite level")
    }

    /// Lowest level `m` with `log S_m >= log(price)` (inclusive, snapped).
    pub fn level_at_or_above(&self, s0: F, price: F) -> i64 {
        let x = (price.ln() - s0.ln()) / self.dx;
        (x - self.level_tolerance(price.ln())).ceil().to_i64().expect("finite level")
    }
}

/// `node_price` as a free function.
pub fn node_price<F: Scalar>(tree: &TreeParams<F>, s0: F, i: usize, j: usize) -> Result<F> {
    tree.node_price(s0, i, j).ok_or_else(|| PricingError::InvalidArgument(format!("node ({i}, {j}) outside tree")))
}

/// A half-integer stored as twice its value so arithmetic stays exact.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct HalfIndex(i64);

impl HalfIndex {
    pub fn from_twice(twice: i64) -> Self {
        Self(twice)
    }

    pub fn from_integer(v: i64) -> Self {
        Self(2 * v)
    }

    pub fn twice(self) -> i64 {
        self.0
    }

    pub fn is_integer(self) -> bool {
        self.0.rem_euclid(2) == 0
    }

    /// Largest integer `<=` this value.
    pub fn floor(self) -> i64 {
        self.0.div_euclid(2)
    }

    pub fn value<F: Scalar>(self) -> F {
        F::from_index(self.0) * F::lit(0.5)
    }
}

/// Where strike and barrier fall on the terminal layer of an n-step tree.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LatticeGeometry<F> {
    pub steps: usize,
    /// Smallest terminal up-count paying the call: `S_{n, j_K - 1} < K <= S_{n, j_K}`.
    pub j_k: i64,
    /// Strike position, `1 - 2 frac(log(s0/K)/(2σ√Δτ) - n/2)`, in `(-1, 1]`.
    pub delta_k: F,
    /// Barrier coordinate in terminal up-count units.
    pub l_l: F,
    /// `⌊2 l_L⌋ / 2`.
    pub j_l: HalfIndex,
    /// Up-count of the effective barrier `L̃`, the highest lattice level at or below `L`.
    pub j_tilde_l: HalfIndex,
    /// 1 when the effective barrier is a terminal node, 0 when it is a level of the penultimate step.
    pub eps_n: u8,
    /// `frac(2 l_L)`, in `[0, 1)`.
    pub delta_l: F,
    pub l_tilde: F,
    /// Log-level (multiple of `σ√Δτ` relative to `s0`) of the effective barrier.
    pub barrier_level: i64,
    /// Lowest log-level at or above the strike.
    pub strike_level: i64,
}

pub fn lattice_geometry<F: Scalar>(
    market: &MarketParams<F>,
    strike: F,
    barrier: F,
    steps: usize,
) -> Result<LatticeGeometry<F>> {
    let tree = build_tree_params(market, steps)?;
    if strike <= F::zero() {
        return Err(PricingError::Nonpositive("strike"));
    }
    if barrier <= F::zero() {
        return Err(PricingError::Nonpositive("barrier"));
    }
    Ok(geometry_on(&tree, market.s0, strike, barrier))
}

fn geometry_on<F: Scalar>(tree: &TreeParams<F>, s0: F, strike: F, barrier: F) -> LatticeGeometry<F> {
    let n = tree.steps as i64;
    let half_n = F::from_count(tree.steps) * F::lit(0.5);
    let two_dx = F::lit(2.0) * tree.dx;

    let strike_level = tree.level_at_or_above(s0, strike);
    // terminal levels have the parity of n: j = ceil((m_K + n) / 2)
    let j_k = (strike_level + n + 1).div_euclid(2);
    let l_k = (strike / s0).ln() / two_dx + half_n;
    let delta_k = clamp_open_closed(F::one() - F::lit(2.0) * (F::from_index(j_k) - l_k));

    let barrier_level = tree.level_at_or_below(s0, barrier);
    let l_l = (barrier / s0).ln() / two_dx + half_n;
    let twice_j_l = barrier_level + n;
    let j_l = HalfIndex::from_twice(twice_j_l);
    let eps_n = u8::from(j_l.is_integer());
    let delta_l = (F::lit(2.0) * l_l - F::from_index(twice_j_l)).max(F::zero()).min(F::one() - F::epsilon());
    let l_tilde = s0 * (F::from_index(barrier_level) * tree.dx).exp();

    LatticeGeometry {
        steps: tree.steps,
        j_k,
        delta_k,
        l_l,
        j_l,
        j_tilde_l: j_l,
        eps_n,
        delta_l,
        l_tilde,
        barrier_level,
        strike_level,
    }
}

fn clamp_open_closed<F: Scalar>(v: F) -> F {
    // snapping can push a value sitting on a node a hair outside (-1, 1]
    if v > F::one() {
        F::one()
    } else if v <= -F::one() {
        -F::one() + F::epsilon()
    } else {
        v
    }
}

/// `C(n, k)` for `0 <= k <= n`, else 0. Exact for `n` up to roughly 120.
pub fn binomial_exact(n: u32, k: i64) -> u128 {
    if k < 0 || k > n as i64 {
        return 0;
    }
    let k = (k as u32).min(n - k as u32);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    acc
}

/// Number of `n`-step paths ending at up-count `j` that touch or cross the
/// level with up-count `j_tilde` (the reflection principle).
pub fn reflection_path_count(n: u32, j: u32, j_tilde: HalfIndex) -> u128 {
    let jt = j_tilde.twice();
    let j2 = 2 * j as i64;
    if j2 <= jt {
        binomial_exact(n, j as i64)
    } else if j2 <= 2 * jt {
        // 2 j̃ - j; an odd 2j̃ still gives an integer argument
        binomial_exact(n, jt - j as i64)
    } else {
        0
    }
}

/// Risk-neutral weights `C(n, k) p^j (1-p)^(n-j)` evaluated in log-space.
struct PathWeights<F> {
    n: usize,
    ln_p: F,
    ln_q: F,
    ln_fact: Vec<F>,
}

impl<F: Scalar> PathWeights<F> {
    fn new(tree: &TreeParams<F>) -> Self {
        let ln_fact = (0..=tree.steps).map(|k| (F::from_count(k) + F::one()).ln_gamma()).collect();
        Self { n: tree.steps, ln_p: tree.p.ln(), ln_q: (-tree.p).ln_1p(), ln_fact }
    }

    /// `C(n, k) p^j (1-p)^(n-j)`; zero when `k` is outside `[0, n]`.
    fn term(&self, k: i64, j: i64) -> F {
        let n = self.n as i64;
        if k < 0 || k > n || j < 0 || j > n {
            return F::zero();
        }
        let ln_c = self.ln_fact[self.n] - self.ln_fact[k as usize] - self.ln_fact[(n - k) as usize];
        (ln_c + F::from_index(j) * self.ln_p + F::from_index(n - j) * self.ln_q).exp()
    }
}

fn combinatorial_setup<F: Scalar>(
    market: &MarketParams<F>,
    strike: F,
    barrier: F,
    steps: usize,
    rule: ProbabilityRule,
) -> Result<(TreeParams<F>, LatticeGeometry<F>, PathWeights<F>)> {
    let tree = build_tree_params_with(market, steps, rule)?;
    if strike <= F::zero() {
        return Err(PricingError::Nonpositive("strike"));
    }
    if barrier <= F::zero() {
        return Err(PricingError::Nonpositive("barrier"));
    }
    let geo = geometry_on(&tree, market.s0, strike, barrier);
    let weights = PathWeights::new(&tree);
    Ok((tree, geo, weights))
}

fn combinatorial_result<F: Scalar>(market: &MarketParams<F>, geo: &LatticeGeometry<F>, sum: F) -> PriceResult<F> {
    PriceResult::new((market.discount() * sum).max(F::zero()), Method::CrrCombinatorial, Some(geo.steps))
        .with("delta_k", geo.delta_k)
        .with("delta_l", geo.delta_l)
        .with("eps_n", F::from_count(geo.eps_n as usize))
        .with("l_tilde", geo.l_tilde)
}

/// `e^{-rT} Σ_{j=j_K}^{n} C(n,j) p^j (1-p)^{n-j}`.
pub fn price_vanilla_digital_combinatorial<F: Scalar>(
    market: &MarketParams<F>,
    strike: F,
    steps: usize,
) -> Result<PriceResult<F>> {
    price_vanilla_digital_combinatorial_with(market, strike, steps, ProbabilityRule::default())
}

pub fn price_vanilla_digital_combinatorial_with<F: Scalar>(
    market: &MarketParams<F>,
    strike: F,
    steps: usize,
    rule: ProbabilityRule,
) -> Result<PriceResult<F>> {
    // the barrier is irrelevant; pass the strike to keep geometry well-defined
    let (_, geo, w) = combinatorial_setup(market, strike, strike, steps, rule)?;
    let n = steps as i64;
    let sum: CompensatedSum<F> = (geo.j_k.max(0)..=n).map(|j| w.term(j, j)).collect();
    let mut res = combinatorial_result(market, &geo, sum.value());
    res.diagnostics.remove("delta_l");
    res.diagnostics.remove("eps_n");
    res.diagnostics.remove("l_tilde");
    Ok(res)
}

/// Terminal mass of paths that touched the effective barrier and end at or
/// above the strike: `Σ_{j >= j_K} Z_d(n, j, j̃_L) p^j (1-p)^{n-j}`.
fn knocked_call_mass<F: Scalar>(geo: &LatticeGeometry<F>, w: &PathWeights<F>) -> F {
    let n = geo.steps as i64;
    let b = geo.j_tilde_l.twice();
    let first_above = geo.j_tilde_l.floor() + 1;
    let mut acc = CompensatedSum::new();
    // unreflected part, j <= j̃_L: every path ending there has touched the barrier
    for j in geo.j_k.max(0)..first_above.min(n + 1) {
        acc.add(w.term(j, j));
    }
    // reflected part, j̃_L < j <= 2 j̃_L
    for j in geo.j_k.max(first_above).max(0)..=b.min(n) {
        acc.add(w.term(b - j, j));
    }
    acc.value()
}

fn require_alive_down<F: Scalar>(market: &MarketParams<F>, geo: &LatticeGeometry<F>) -> Result<()> {
    if geo.barrier_level >= 0 || market.s0 <= geo.l_tilde {
        return Err(PricingError::KnockedAtInception);
    }
    Ok(())
}

/// Down-and-in digital call with `L < K < s0`, summed over the reflected paths.
pub fn price_di_combinatorial<F: Scalar>(
    market: &MarketParams<F>,
    strike: F,
    barrier: F,
    steps: usize,
) -> Result<PriceResult<F>> {
    price_di_combinatorial_with(market, strike, barrier, steps, ProbabilityRule::default())
}

pub fn price_di_combinatorial_with<F: Scalar>(
    market: &MarketParams<F>,
    strike: F,
    barrier: F,
    steps: usize,
    rule: ProbabilityRule,
) -> Result<PriceResult<F>> {
    if !(barrier < strike && strike < market.s0) {
        return Err(PricingError::WrongRegime("requires L < K < s0".into()));
    }
    let (_, geo, w) = combinatorial_setup(market, strike, barrier, steps, rule)?;
    require_alive_down(market, &geo)?;
    Ok(combinatorial_result(market, &geo, knocked_call_mass(&geo, &w)))
}

/// Down-and-out digital call with `K < L < s0`: unrestricted mass above the
/// effective barrier minus its reflected image.
pub fn price_do_combinatorial<F: Scalar>(
    market: &MarketParams<F>,
    strike: F,
    barrier: F,
    steps: usize,
) -> Result<PriceResult<F>> {
    price_do_combinatorial_with(market, strike, barrier, steps, ProbabilityRule::default())
}

pub fn price_do_combinatorial_with<F: Scalar>(
    market: &MarketParams<F>,
    strike: F,
    barrier: F,
    steps: usize,
    rule: ProbabilityRule,
) -> Result<PriceResult<F>> {
    if !(strike < barrier && barrier < market.s0) {
        return Err(PricingError::WrongRegime("requires K < L < s0".into()));
    }
    let (_, geo, w) = combinatorial_setup(market, strike, barrier, steps, rule)?;
    require_alive_down(market, &geo)?;
    let n = steps as i64;
    let b = geo.j_tilde_l.twice();
    let start = (geo.j_tilde_l.floor() + 1).max(geo.j_k).max(0);
    let mut acc = CompensatedSum::new();
    for j in start..=n {
        acc.add(w.term(j, j));
    }
    for j in start..=b.min(n) {
        acc.add(-w.term(b - j, j));
    }
    Ok(combinatorial_result(market, &geo, acc.value()))
}

/// Combinatorial price for any European down-barrier digital call, routing
/// the two regimes without a direct formula through in/out parity on the same tree.
pub fn price_combinatorial<F: Scalar>(
    market: &MarketParams<F>,
    spec: &DigitalOptionSpec<F>,
    steps: usize,
) -> Result<PriceResult<F>> {
    price_combinatorial_with(market, spec, steps, ProbabilityRule::default())
}

pub fn price_combinatorial_with<F: Scalar>(
    market: &MarketParams<F>,
    spec: &DigitalOptionSpec<F>,
    steps: usize,
    rule: ProbabilityRule,
) -> Result<PriceResult<F>> {
    validate(market, spec)?.require_alive()?;
    if spec.side != Side::Call || spec.barrier.orientation != Orientation::Down || spec.style != ExerciseStyle::European
    {
        return Err(PricingError::Unsupported("combinatorial prices cover European down-barrier calls".into()));
    }
    let (k, l) = (spec.strike, spec.barrier.level);
    let (_, geo, w) = combinatorial_setup(market, k, l, steps, rule)?;
    require_alive_down(market, &geo)?;
    let knocked = knocked_call_mass(&geo, &w);
    let price = match spec.barrier.knock {
        Knock::In => knocked,
        Knock::Out => {
            let n = steps as i64;
            let vanilla: CompensatedSum<F> = (geo.j_k.max(0)..=n).map(|j| w.term(j, j)).collect();
            vanilla.value() - knocked
        }
    };
    Ok(combinatorial_result(market, &geo, price))
}

/// Integer classification of tree nodes for one spec.
#[derive(Debug, Clone, Copy)]
struct NodeRules {
    barrier_level: i64,
    orientation: Orientation,
    strike_level: i64,
    payoff: Payoff,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Payoff {
    Call,
    Put,
    Unit,
}

impl NodeRules {
    #[inline]
    fn knocked(&self, level: i64) -> bool {
        match self.orientation {
            Orientation::Down => level <= self.barrier_level,
            Orientation::Up => level >= self.barrier_level,
        }
    }

    #[inline]
    fn pays(&self, level: i64) -> bool {
        match self.payoff {
            Payoff::Call => level >= self.strike_level,
            Payoff::Put => level < self.strike_level,
            Payoff::Unit => true,
        }
    }
}

fn rules_for<F: Scalar>(
    tree: &TreeParams<F>,
    s0: F,
    strike: F,
    barrier: F,
    orientation: Orientation,
    payoff: Payoff,
) -> NodeRules {
    let barrier_level = match orientation {
        Orientation::Down => tree.level_at_or_below(s0, barrier),
        Orientation::Up => tree.level_at_or_above(s0, barrier),
    };
    NodeRules { barrier_level, orientation, strike_level: tree.level_at_or_above(s0, strike), payoff }
}

fn indicator<F: Scalar>(b: bool) -> F {
    if b {
        F::one()
    } else {
        F::zero()
    }
}

/// Backward induction over `(i, j)`; returns the root value.
fn roll_back<F: Scalar>(tree: &TreeParams<F>, rules: &NodeRules, knock: Knock, style: ExerciseStyle) -> F {
    let n = tree.steps;
    let (p, q, disc) = (tree.p, F::one() - tree.p, tree.discount);
    let american = style == ExerciseStyle::American;
    let level = |i: usize, j: usize| 2 * j as i64 - i as i64;

    match knock {
        Knock::Out => {
            let mut v: Vec<F> = (0..=n)
                .map(|j| {
                    let m = level(n, j);
                    indicator::<F>(!rules.knocked(m) && rules.pays(m))
                })
                .collect();
            for i in (0..n).rev() {
                for j in 0..=i {
                    let m = level(i, j);
                    v[j] = if rules.knocked(m) {
                        F::zero()
                    } else {
                        let cont = disc * (p * v[j + 1] + q * v[j]);
                        if american && rules.pays(m) {
                            cont.max(F::one())
                        } else {
                            cont
                        }
                    };
                }
            }
            v[0]
        }
        Knock::In => {
            // `live` holds the plain digital (already knocked in); `dormant` the not-yet-in claim
            let mut live: Vec<F> = (0..=n).map(|j| indicator(rules.pays(level(n, j)))).collect();
            let mut dormant: Vec<F> =
                (0..=n).map(|j| if rules.knocked(level(n, j)) { live[j] } else { F::zero() }).collect();
            for i in (0..n).rev() {
                for j in 0..=i {
                    let m = level(i, j);
                    let cont = disc * (p * live[j + 1] + q * live[j]);
                    live[j] = if american && rules.pays(m) { cont.max(F::one()) } else { cont };
                    dormant[j] = if rules.knocked(m) { live[j] } else { disc * (p * dormant[j + 1] + q * dormant[j]) };
                }
            }
            dormant[0]
        }
    }
}

/// Backward-induction price of any single-barrier digital on the n-step tree.
pub fn price_backward<F: Scalar>(
    market: &MarketParams<F>,
    spec: &DigitalOptionSpec<F>,
    steps: usize,
) -> Result<PriceResult<F>> {
    price_backward_with(market, spec, steps, ProbabilityRule::default())
}

pub fn price_backward_with<F: Scalar>(
    market: &MarketParams<F>,
    spec: &DigitalOptionSpec<F>,
    steps: usize,
    rule: ProbabilityRule,
) -> Result<PriceResult<F>> {
    validate(market, spec)?;
    let tree = build_tree_params_with(market, steps, rule)?;
    let payoff = match spec.side {
        Side::Call => Payoff::Call,
        Side::Put => Payoff::Put,
    };
    let rules = rules_for(&tree, market.s0, spec.strike, spec.barrier.level, spec.barrier.orientation, payoff);
    let price = roll_back(&tree, &rules, spec.barrier.knock, spec.style);

    let mut res = PriceResult::new(price, Method::Crr, Some(steps));
    if spec.barrier.orientation == Orientation::Down {
        let geo = geometry_on(&tree, market.s0, spec.strike, spec.barrier.level);
        res = res
            .with("delta_k", geo.delta_k)
            .with("delta_l", geo.delta_l)
            .with("eps_n", F::from_count(geo.eps_n as usize))
            .with("l_tilde", geo.l_tilde);
    }
    Ok(res)
}

/// Backward-induction price of the plain digital (no barrier).
pub fn price_vanilla_backward<F: Scalar>(
    market: &MarketParams<F>,
    side: Side,
    strike: F,
    style: ExerciseStyle,
    steps: usize,
) -> Result<PriceResult<F>> {
    price_vanilla_backward_with(market, side, strike, style, steps, ProbabilityRule::default())
}

pub fn price_vanilla_backward_with<F: Scalar>(
    market: &MarketParams<F>,
    side: Side,
    strike: F,
    style: ExerciseStyle,
    steps: usize,
    rule: ProbabilityRule,
) -> Result<PriceResult<F>> {
    let tree = build_tree_params_with(market, steps, rule)?;
    let payoff = match side {
        Side::Call => Payoff::Call,
        Side::Put => Payoff::Put,
    };
    let mut rules = rules_for(&tree, market.s0, strike, strike, Orientation::Down, payoff);
    rules.barrier_level = i64::MIN;
    Ok(PriceResult::new(roll_back(&tree, &rules, Knock::Out, style), Method::Crr, Some(steps)))
}

/// Pays 1 while the barrier has not been touched: at expiry for European
/// style, or on exercise at any alive node for American style.
pub fn price_bond_backward<F: Scalar>(
    market: &MarketParams<F>,
    barrier: F,
    orientation: Orientation,
    style: ExerciseStyle,
    steps: usize,
) -> Result<PriceResult<F>> {
    price_bond_backward_with(market, barrier, orientation, style, steps, ProbabilityRule::default())
}

pub fn price_bond_backward_with<F: Scalar>(
    market: &MarketParams<F>,
    barrier: F,
    orientation: Orientation,
    style: ExerciseStyle,
    steps: usize,
    rule: ProbabilityRule,
) -> Result<PriceResult<F>> {
    let tree = build_tree_params_with(market, steps, rule)?;
    let rules = rules_for(&tree, market.s0, barrier, barrier, orientation, Payoff::Unit);
    Ok(PriceResult::new(roll_back(&tree, &rules, Knock::Out, style), Method::Crr, Some(steps)))
}
