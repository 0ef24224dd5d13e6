//! Adjusted binomial interpolated lattice.
//!
//! The time step is recalibrated so that, on a log-space ladder anchored at
//! the barrier, the barrier is a terminal node and the strike sits exactly
//! halfway between two terminal nodes. The ladder runs from maturity back
//! past time zero by up to two steps; the time-zero value at `s0` is then
//! recovered by linear interpolation in time between the two same-parity
//! levels straddling zero and four-point Lagrange interpolation in log-space.
//!
//! Backward induction covers exactly the cone of nodes the four interpolation
//! points depend on, so there is no spatial truncation.

use serde::{Deserialize, Serialize};

use crate::crr::{build_tree_params_with, ProbabilityRule};
use crate::error::{PricingError, Result};
use crate::expansion::{compute_coefficients, expansion_terms, Regime};
use crate::model::{
    validate, DigitalOptionSpec, ExerciseStyle, Knock, MarketParams, Method, Orientation, PriceResult, Side,
};
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BilMesh<F> {
    /// Integer part of the half-integer count `k = ⌈|k̃ - l| / (2σ√Δτ)⌉ + 1/2`.
    pub k_ceil: i64,
    pub dt: F,
    pub n_prime: usize,
    /// Log-space spacing `σ√dt` between adjacent ladder levels.
    pub spacing: F,
    /// `log L`; ladder level `m` sits at `log L + m σ√dt`.
    pub log_barrier: F,
    /// Odd ladder level of the strike.
    pub strike_level: i64,
    pub maturity: F,
}

impl<F: Scalar> BilMesh<F> {
    /// `k` as a real number.
    pub fn k(&self) -> F {
        F::from_index(self.k_ceil) + F::lit(0.5)
    }

    pub fn log_level(&self, m: i64) -> F {
        self.log_barrier + F::from_index(m) * self.spacing
    }

    pub fn level_price(&self, m: i64) -> F {
        self.log_level(m).exp()
    }

    /// `τ_j = T - j dt`.
    pub fn time_level(&self, j: usize) -> F {
        self.maturity - F::from_count(j) * self.dt
    }

    pub fn time_levels(&self) -> Vec<F> {
        (0..=self.n_prime).map(|j| self.time_level(j)).collect()
    }

    /// `(Δᴷ, Δᴸ)` recomputed in floating point on the terminal layer; both are 0
    /// up to rounding by construction.
    pub fn alignment(&self, strike: F) -> (F, F) {
        let two_h = F::lit(2.0) * self.spacing;
        let lk = (strike.ln() - self.log_barrier) / two_h;
        let frac = |x: F| x - x.floor();
        let delta_k = F::one() - F::lit(2.0) * frac(lk);
        // the barrier is the origin of the ladder
        (delta_k, F::zero())
    }
}

/// Largest accepted ratio of calibrated to requested steps.
pub const MAX_REFINEMENT: usize = 16;

pub fn calibrate_mesh<F: Scalar>(
    market: &MarketParams<F>,
    spec: &DigitalOptionSpec<F>,
    steps: usize,
) -> Result<BilMesh<F>> {
    validate(market, spec)?;
    if steps < 4 {
        return Err(PricingError::InvalidArgument(format!("need at least 4 steps, got {steps}")));
    }
    let (strike, barrier) = (spec.strike, spec.barrier.level);
    if strike == barrier {
        return Err(PricingError::WrongRegime("strike equals barrier".into()));
    }
    let gap = strike.ln() - barrier.ln();
    let dtau = market.maturity / F::from_count(steps);
    let two_sigma = F::lit(2.0) * market.sigma;
    let k_ceil = (gap.abs() / (two_sigma * dtau.sqrt())).ceil();
    let k = k_ceil + F::lit(0.5);
    let dt = (gap / (two_sigma * k)).powi(2);
    let n_prime = (market.maturity / dt).floor().to_usize().unwrap_or(usize::MAX).saturating_add(2);
    // strike and barrier closer than one nominal step force a much finer ladder
    let max = steps.saturating_mul(MAX_REFINEMENT);
    if n_prime > max {
        return Err(PricingError::TooManySteps { steps: n_prime, max });
    }
    let k_ceil = k_ceil.to_i64().expect("finite strike index");
    let magnitude = 2 * k_ceil + 1;
    Ok(BilMesh {
        k_ceil,
        dt,
        n_prime,
        spacing: market.sigma * dt.sqrt(),
        log_barrier: barrier.ln(),
        strike_level: if gap > F::zero() { magnitude } else { -magnitude },
        maturity: market.maturity,
    })
}

/// Cubic through four points with strictly ascending abscissae.
pub fn lagrange4<F: Scalar>(xs: [F; 4], ys: [F; 4], x: F) -> Result<F> {
    if xs.iter().any(|v| !v.is_finite()) || !(xs[0] < xs[1] && xs[1] < xs[2] && xs[2] < xs[3]) {
        return Err(PricingError::NonAscending);
    }
    let mut acc = F::zero();
    for i in 0..4 {
        let mut w = F::one();
        for j in 0..4 {
            if i != j {
                w = w * (x - xs[j]) / (xs[i] - xs[j]);
            }
        }
        acc = acc + w * ys[i];
    }
    Ok(acc)
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct BilOptions {
    pub rule: ProbabilityRule,
    /// Remove the `1/√n` term that survives `Δᴸ = Δᴷ = 0` when the barrier is above the strike.
    pub subtract_constant_term: bool,
}

pub fn price_adjusted_bil<F: Scalar>(
    market: &MarketParams<F>,
    spec: &DigitalOptionSpec<F>,
    steps: usize,
) -> Result<PriceResult<F>> {
    price_adjusted_bil_with(market, spec, steps, BilOptions::default())
}

pub fn price_adjusted_bil_with<F: Scalar>(
    market: &MarketParams<F>,
    spec: &DigitalOptionSpec<F>,
    steps: usize,
    options: BilOptions,
) -> Result<PriceResult<F>> {
    validate(market, spec)?.require_alive()?;
    let mesh = calibrate_mesh(market, spec, steps)?;
    let n_prime = mesh.n_prime;
    // only p and the one-step discount are taken from here; the ladder is the mesh's own
    let step = build_tree_params_with(&MarketParams { maturity: mesh.dt, ..*market }, 1, options.rule)?;

    // spot coordinate on the ladder and the four anchor-level nodes around it
    let x0 = (market.s0.ln() - mesh.log_barrier) / mesh.spacing;
    let parity = (n_prime % 2) as i64;
    let mut m1 = x0.floor().to_i64().expect("finite spot level");
    if (m1 - parity).rem_euclid(2) != 0 {
        m1 -= 1;
    }
    let nodes = [m1 - 2, m1, m1 + 2, m1 + 4];
    let inside = match spec.barrier.orientation {
        Orientation::Down => nodes[0] >= 0,
        Orientation::Up => nodes[3] <= 0,
    };
    if !inside {
        return Err(PricingError::SpotOutsideMesh);
    }

    let rules = MeshRules {
        orientation: spec.barrier.orientation,
        strike_level: mesh.strike_level,
        side: spec.side,
        american: spec.style == ExerciseStyle::American,
    };
    let (early, late) = roll_back_cone(&rules, spec.barrier.knock, &step_probs(&step), n_prime, nodes);

    let t_early = mesh.time_level(n_prime - 2);
    let weight = t_early / (F::lit(2.0) * mesh.dt);
    let mut price = interpolate_at_spot(nodes, early, late, weight, x0)?;

    let mut subtracted = F::zero();
    if options.subtract_constant_term && spec.side == Side::Call && spec.style == ExerciseStyle::European {
        if let Ok(regime @ (Regime::DoLgtK | Regime::DiLgtK)) = Regime::classify(spec) {
            // the barrier is a terminal node of the mesh, so εₙ = 1
            let coeffs = compute_coefficients(market, spec.strike, spec.barrier.level, 1)?;
            let (first, _) = expansion_terms(&coeffs, F::zero(), F::zero(), regime);
            subtracted = coeffs.discount * first / F::from_count(n_prime).sqrt();
            price = price - subtracted;
        }
    }

    let (delta_k, delta_l) = mesh.alignment(spec.strike);
    Ok(PriceResult::new(price, Method::Bil, Some(steps))
        .with("delta_k", delta_k)
        .with("delta_l", delta_l)
        .with("eps_n", F::one())
        .with("n_prime", F::from_count(n_prime))
        .with("dt", mesh.dt)
        .with("k", mesh.k())
        .with("time_weight", weight)
        .with("spot_level", x0)
        .with("constant_term", subtracted))
}

/// Linear in time to `t = 0` (`weight` is the share of the later level), then
/// cubic in the ladder coordinate.
fn interpolate_at_spot<F: Scalar>(nodes: [i64; 4], early: [F; 4], late: [F; 4], weight: F, x0: F) -> Result<F> {
    let ys: [F; 4] = std::array::from_fn(|i| early[i] + (late[i] - early[i]) * weight);
    lagrange4(nodes.map(|m| F::from_index(m)), ys, x0)
}

#[derive(Debug, Clone, Copy)]
struct MeshRules {
    orientation: Orientation,
    strike_level: i64,
    side: Side,
    american: bool,
}

impl MeshRules {
    #[inline]
    fn knocked(&self, m: i64) -> bool {
        match self.orientation {
            Orientation::Down => m <= 0,
            Orientation::Up => m >= 0,
        }
    }

    #[inline]
    fn pays(&self, m: i64) -> bool {
        match self.side {
            Side::Call => m >= self.strike_level,
            Side::Put => m < self.strike_level,
        }
    }
}

struct StepProbs<F> {
    p: F,
    q: F,
    disc: F,
}

fn step_probs<F: Scalar>(tree: &crate::crr::TreeParams<F>) -> StepProbs<F> {
    StepProbs { p: tree.p, q: F::one() - tree.p, disc: tree.discount }
}

/// Rolls back from maturity to level `n_prime`, returning the values at the
/// four `nodes` on levels `n_prime - 2` and `n_prime`.
fn roll_back_cone<F: Scalar>(
    rules: &MeshRules,
    knock: Knock,
    probs: &StepProbs<F>,
    n_prime: usize,
    nodes: [i64; 4],
) -> ([F; 4], [F; 4]) {
    let np = n_prime as i64;
    let lo = nodes[0] - np;
    let hi = nodes[3] + np;
    let width = (hi - lo + 1) as usize;
    let idx = |m: i64| (m - lo) as usize;
    let StepProbs { p, q, disc } = *probs;

    let payoff = |m: i64| if rules.pays(m) { F::one() } else { F::zero() };
    let exercise = |m: i64, cont: F| {
        if rules.american && rules.pays(m) {
            cont.max(F::one())
        } else {
            cont
        }
    };

    // one array per lattice; levels alternate parity so updates can run in place
    let mut live = vec![F::zero(); width];
    let mut dormant = vec![F::zero(); width];
    let mut m = lo;
    while m <= hi {
        let v = payoff(m);
        match knock {
            Knock::Out => live[idx(m)] = if rules.knocked(m) { F::zero() } else { v },
            Knock::In => {
                live[idx(m)] = v;
                dormant[idx(m)] = if rules.knocked(m) { v } else { F::zero() };
            }
        }
        m += 2;
    }

    let mut early = [F::zero(); 4];
    for j in 1..=np {
        let mut m = lo + j;
        while m <= hi - j {
            let (up, down) = (idx(m + 1), idx(m - 1));
            let cont = disc * (p * live[up] + q * live[down]);
            match knock {
                Knock::Out => {
                    live[idx(m)] = if rules.knocked(m) { F::zero() } else { exercise(m, cont) };
                }
                Knock::In => {
                    let in_value = exercise(m, cont);
                    dormant[idx(m)] =
                        if rules.knocked(m) { in_value } else { disc * (p * dormant[up] + q * dormant[down]) };
                    live[idx(m)] = in_value;
                }
            }
            m += 2;
        }
        if j == np - 2 {
            early = pick(knock, &live, &dormant, nodes.map(idx));
        }
    }
    (early, pick(knock, &live, &dormant, nodes.map(idx)))
}

fn pick<F: Scalar>(knock: Knock, live: &[F], dormant: &[F], at: [usize; 4]) -> [F; 4] {
    let src = match knock {
        Knock::Out => live,
        Knock::In => dormant,
    };
    at.map(|i| src[i])
}
