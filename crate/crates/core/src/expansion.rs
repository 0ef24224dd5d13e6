//! Asymptotic expansion of the CRR error for down-barrier digital calls.
//!
//! `Err(n) = price_crr(n) - price_bs` is expanded as
//! `e^{-rT} [a(Δᴷ, Δᴸ)/√n + b(Δᴷ, Δᴸ)/n] + O(n^{-3/2})` where `a` and `b` are
//! low-degree polynomials in the strike and barrier positions with
//! regime-dependent constants.

use serde::{Deserialize, Serialize};

use crate::analytic::{self, d_coefficients, normal_cdf, normal_pdf, reflection_factor, DCoefficients};
use crate::crr::{lattice_geometry, price_backward_with, ProbabilityRule};
use crate::error::{PricingError, Result};
use crate::model::{DigitalOptionSpec, ExerciseStyle, Knock, MarketParams, Orientation, Side};
use crate::scalar::Scalar;

/// Which of the four expansions applies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    DiLltK,
    DoLltK,
    DoLgtK,
    DiLgtK,
}

impl Regime {
    pub fn classify<F: Scalar>(spec: &DigitalOptionSpec<F>) -> Result<Self> {
        if spec.side != Side::Call
            || spec.barrier.orientation != Orientation::Down
            || spec.style != ExerciseStyle::European
        {
            return Err(PricingError::Unsupported("error expansion covers European down-barrier calls".into()));
        }
        let below = if spec.barrier.level < spec.strike {
            true
        } else if spec.barrier.level > spec.strike {
            false
        } else {
            return Err(PricingError::WrongRegime("barrier equals strike".into()));
        };
        Ok(match (below, spec.barrier.knock) {
            (true, Knock::In) => Regime::DiLltK,
            (true, Knock::Out) => Regime::DoLltK,
            (false, Knock::Out) => Regime::DoLgtK,
            (false, Knock::In) => Regime::DiLgtK,
        })
    }

    pub fn name(self) -> &'static str {
        match self {
            Regime::DiLltK => "di_l_lt_k",
            Regime::DoLltK => "do_l_lt_k",
            Regime::DoLgtK => "do_l_gt_k",
            Regime::DiLgtK => "di_l_gt_k",
        }
    }
}

/// Every constant entering the four expansions for one `(market, K, L, εₙ)`.
///
/// Array fields are 1-based in the usual notation: `b_t[0]` is `B̃₁`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExpansionCoefficients<F> {
    pub discount: F,
    pub d: [F; 8],
    pub alpha: F,
    pub alpha_hat: F,
    pub beta: F,
    pub beta_hat: F,
    pub g: [F; 4],
    pub g_hat: [F; 4],
    pub i: F,
    pub c1: F,
    pub c2: F,
    pub c3: F,
    pub c_tilde: F,
    pub a_t: [F; 2],
    pub b_t: [F; 4],
    pub c_t: [F; 2],
    pub d_t: [F; 4],
    pub e_t: [F; 2],
    pub f_t: [F; 3],
    pub g_t: [F; 3],
    pub h_t: [F; 4],
    pub eps_n: u8,
}

fn g_term<F: Scalar>(alpha_hat: F, beta_hat: F, t: F, d: F) -> F {
    let two = F::lit(2.0);
    let sqrt_t = t.sqrt();
    two * t * (alpha_hat * alpha_hat * d + beta_hat * sqrt_t)
        + (two * alpha_hat * sqrt_t / F::lit(3.0) - d / F::lit(12.0)) * (F::one() - d * d)
}

pub fn compute_coefficients<F: Scalar>(
    market: &MarketParams<F>,
    strike: F,
    barrier: F,
    eps_n: u8,
) -> Result<ExpansionCoefficients<F>> {
    market.validate()?;
    if strike <= F::zero() {
        return Err(PricingError::Nonpositive("strike"));
    }
    if barrier <= F::zero() {
        return Err(PricingError::Nonpositive("barrier"));
    }
    if barrier == strike {
        return Err(PricingError::WrongRegime("barrier equals strike".into()));
    }
    if market.s0 <= barrier {
        return Err(PricingError::KnockedAtInception);
    }
    if eps_n > 1 {
        return Err(PricingError::InvalidArgument(format!("eps_n must be 0 or 1, got {eps_n}")));
    }

    let MarketParams { s0, rate: r, sigma: s, maturity: t } = *market;
    let dc = d_coefficients(market, strike, barrier);
    let DCoefficients { d11, d12, d22, d32, d42, .. } = dc;
    let (two, four, eight) = (F::lit(2.0), F::lit(4.0), F::lit(8.0));
    let half = F::lit(0.5);
    let sqrt_t = t.sqrt();
    let eps = F::from_count(eps_n as usize);

    let alpha = (r - half * s * s) / (two * s);
    let alpha_hat = alpha + half * s;
    let beta = (s.powi(4) - four * s * s * r + F::lit(12.0) * r * r) / (F::lit(48.0) * s);
    let beta_hat = -beta - s * r / F::lit(6.0);

    let g = dc.second().map(|d| g_term(alpha_hat, beta_hat, t, d));
    let g_hat = dc.first().map(|d| g_term(alpha_hat, beta_hat, t, d));
    let i = (four * beta + F::lit(16.0) / F::lit(3.0) * alpha.powi(3)) / s * (s0 / barrier).ln() * t;
    let refl = reflection_factor(market, barrier);

    let phi12 = normal_pdf(d12);
    let phi22 = normal_pdf(d22);
    let phi32 = normal_pdf(d32);
    let phi42 = normal_pdf(d42);
    let big22 = normal_cdf(d22);
    let big42 = normal_cdf(d42);

    let a1 = refl * phi22;
    let a2 = -two * a1 - four * alpha * sqrt_t * big22 * refl;
    let b1 = refl * (g[1] * phi22 - i * big22);
    let b2 = refl * (-d22 * half) * phi22;
    let b3 = refl * phi22 * (two * d22 - four * alpha * sqrt_t);
    let b4 = refl * (phi22 * (-two * d22 + eight * alpha * sqrt_t) + eight * alpha * alpha * t * big22);

    let c1 = phi12;
    let c2 = -d12 * half * phi12;
    let c_tilde = (d11.powi(3) + d11 * d12 * d12 + two * d12 - four * d11) / F::lit(24.0)
        + (two - d11 * d12 - d11 * d11) * sqrt_t / (F::lit(6.0) * s) * r
        + t * d11 / (two * s * s) * r * r;
    let c3 = c_tilde * phi12;

    let e1 = -eps * phi32 + refl * phi42;
    let e2 = phi32 + refl * (phi42 + four * alpha * sqrt_t * big42);
    let f1 =
        phi32 * (g[2] - d32 * half * eps * eps) + refl * phi42 * (d42 * half * eps * eps - g[3]) + big42 * i * refl;
    let f2 = phi32 * d32 * eps + refl * (phi42 * eps * d42 - four * eps * alpha * sqrt_t);
    let f3 = -d32 * half * phi32 + refl * phi42 * (d42 * half - four * alpha * sqrt_t)
        - refl * big42 * eight * alpha * alpha * t;

    Ok(ExpansionCoefficients {
        discount: market.discount(),
        d: [dc.d11, dc.d12, dc.d21, dc.d22, dc.d31, dc.d32, dc.d41, dc.d42],
        alpha,
        alpha_hat,
        beta,
        beta_hat,
        g,
        g_hat,
        i,
        c1,
        c2,
        c3,
        c_tilde,
        a_t: [a1, a2],
        b_t: [b1, b2, b3, b4],
        c_t: [c1 - a1, -a2],
        d_t: [c2 - b1, c3 - b2, -b3, -b4],
        e_t: [e1, e2],
        f_t: [f1, f2, f3],
        g_t: [-e1, c1, -e2],
        h_t: [c2 - f1, c3, -f2, -f3],
        eps_n,
    })
}

/// The bracketed `1/√n` and `1/n` coefficients, before discounting.
pub fn expansion_terms<F: Scalar>(coeffs: &ExpansionCoefficients<F>, delta_k: F, delta_l: F, regime: Regime) -> (F, F) {
    let (dk, dl) = (delta_k, delta_l);
    match regime {
        Regime::DiLltK => {
            let [a1, a2] = coeffs.a_t;
            let [b1, b2, b3, b4] = coeffs.b_t;
            (a1 * dk + a2 * dl, b1 + b2 * dk * dk + b3 * dk * dl + b4 * dl * dl)
        }
        Regime::DoLltK => {
            let [c1, c2] = coeffs.c_t;
            let [d1, d2, d3, d4] = coeffs.d_t;
            (c1 * dk + c2 * dl, d1 + d2 * dk * dk + d3 * dk * dl + d4 * dl * dl)
        }
        Regime::DoLgtK => {
            let [e1, e2] = coeffs.e_t;
            let [f1, f2, f3] = coeffs.f_t;
            (e1 + e2 * dl, f1 + f2 * dl + f3 * dl * dl)
        }
        Regime::DiLgtK => {
            let [g1, g2, g3] = coeffs.g_t;
            let [h1, h2, h3, h4] = coeffs.h_t;
            (g1 + g2 * dk + g3 * dl, h1 + h2 * dk * dk + h3 * dl + h4 * dl * dl)
        }
    }
}

pub fn predicted_error<F: Scalar>(
    coeffs: &ExpansionCoefficients<F>,
    steps: usize,
    delta_k: F,
    delta_l: F,
    regime: Regime,
) -> F {
    let n = F::from_count(steps);
    let (first, second) = expansion_terms(coeffs, delta_k, delta_l, regime);
    coeffs.discount * (first / n.sqrt() + second / n)
}

/// Coefficients and predicted error for one step count, with `εₙ`, `Δᴷ`, `Δᴸ`
/// read off that tree.
pub fn predict<F: Scalar>(
    market: &MarketParams<F>,
    spec: &DigitalOptionSpec<F>,
    steps: usize,
) -> Result<Prediction<F>> {
    let regime = Regime::classify(spec)?;
    let geo = lattice_geometry(market, spec.strike, spec.barrier.level, steps)?;
    let coeffs = compute_coefficients(market, spec.strike, spec.barrier.level, geo.eps_n)?;
    let predicted = predicted_error(&coeffs, steps, geo.delta_k, geo.delta_l, regime);
    Ok(Prediction { regime, coeffs, delta_k: geo.delta_k, delta_l: geo.delta_l, predicted })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Prediction<F> {
    pub regime: Regime,
    pub coeffs: ExpansionCoefficients<F>,
    pub delta_k: F,
    pub delta_l: F,
    pub predicted: F,
}

/// `price_backward(n) - analytic price`.
pub fn observed_error<F: Scalar>(market: &MarketParams<F>, spec: &DigitalOptionSpec<F>, steps: usize) -> Result<F> {
    observed_error_with(market, spec, steps, ProbabilityRule::default())
}

pub fn observed_error_with<F: Scalar>(
    market: &MarketParams<F>,
    spec: &DigitalOptionSpec<F>,
    steps: usize,
    rule: ProbabilityRule,
) -> Result<F> {
    let exact = analytic::price(market, spec)?.price;
    Ok(price_backward_with(market, spec, steps, rule)?.price - exact)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ResidualRow<F> {
    pub n: usize,
    pub observed: F,
    pub predicted: F,
    /// `|observed - predicted| n^{3/2}`.
    pub scaled_residual: F,
    pub delta_k: F,
    pub delta_l: F,
    pub eps_n: u8,
    /// Discounted `1/√n` coefficient, the part that survives `Δᴷ = Δᴸ = 0`.
    pub constant_term: F,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResidualReport<F> {
    pub regime: Regime,
    pub rows: Vec<ResidualRow<F>>,
    /// Raised when the scaled residual increases at every step of the grid and
    /// ends above twice its median.
    pub growth_flag: bool,
}

pub fn residual_order_report<F: Scalar>(
    market: &MarketParams<F>,
    spec: &DigitalOptionSpec<F>,
    steps: &[usize],
) -> Result<ResidualReport<F>> {
    residual_order_report_with(market, spec, steps, ProbabilityRule::default())
}

pub fn residual_order_report_with<F: Scalar>(
    market: &MarketParams<F>,
    spec: &DigitalOptionSpec<F>,
    steps: &[usize],
    rule: ProbabilityRule,
) -> Result<ResidualReport<F>> {
    if steps.is_empty() {
        return Err(PricingError::InvalidArgument("empty step list".into()));
    }
    if steps.windows(2).any(|w| w[0] >= w[1]) {
        return Err(PricingError::NonAscending);
    }
    let regime = Regime::classify(spec)?;
    let mut rows = Vec::with_capacity(steps.len());
    for &n in steps {
        let pred = predict(market, spec, n)?;
        let observed = observed_error_with(market, spec, n, rule)?;
        let (first, _) = expansion_terms(&pred.coeffs, F::zero(), F::zero(), regime);
        rows.push(ResidualRow {
            n,
            observed,
            predicted: pred.predicted,
            scaled_residual: (observed - pred.predicted).abs() * F::from_count(n).powf(F::lit(1.5)),
            delta_k: pred.delta_k,
            delta_l: pred.delta_l,
            eps_n: pred.coeffs.eps_n,
            constant_term: pred.coeffs.discount * first,
        });
    }
    let scaled: Vec<F> = rows.iter().map(|r| r.scaled_residual).collect();
    let growth_flag = growth_flag(&scaled);
    Ok(ResidualReport { regime, rows, growth_flag })
}

fn growth_flag<F: Scalar>(values: &[F]) -> bool {
    if values.len() < 2 {
        return false;
    }
    let increasing = values.windows(2).all(|w| w[1] > w[0]);
    let mut sorted = values.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal));
    let mid = sorted.len() / 2;
    let median =
        if sorted.len().is_multiple_of(2) { (sorted[mid - 1] + sorted[mid]) * F::lit(0.5) } else { sorted[mid] };
    increasing && *values.last().unwrap() > F::lit(2.0) * median
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Barrier;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn market() -> MarketParams<f64> {
        MarketParams::new(150.0, 0.1, 0.25, 1.0)
    }

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / a.abs().max(b.abs()).max(1e-300)
    }

    #[test]
    fn scalar_constants() {
        let c = compute_coefficients(&market(), 100.0, 60.0, 1).unwrap();
        assert_abs_diff_eq!(c.alpha, 0.1375, epsilon = 1e-15);
        assert_abs_diff_eq!(c.alpha_hat, 0.1375 + 0.125, epsilon = 1e-15);
        // (σ⁴ - 4σ²r + 12r²) / (48σ) with σ = 1/4, r = 1/10
        let beta = (0.00390625 - 0.025 + 0.12) / 12.0;
        assert_abs_diff_eq!(c.beta, beta, epsilon = 1e-15);
        assert_abs_diff_eq!(c.beta_hat, -beta - 0.025 / 6.0, epsilon = 1e-15);

        let flat = compute_coefficients(&MarketParams::new(150.0, 0.03125, 0.25, 1.0), 100.0, 60.0, 0).unwrap();
        assert_eq!(flat.alpha, 0.0);
    }

    #[test]
    fn cross_relations() {
        for (k, l) in [(100.0, 60.0), (60.0, 100.0)] {
            for eps in [0, 1] {
                let c = compute_coefficients(&market(), k, l, eps).unwrap();
                assert_eq!(c.c_t[0], c.c1 - c.a_t[0]);
                assert_eq!(c.c_t[1], -c.a_t[1]);
                assert_eq!(c.d_t[2], -c.b_t[2]);
                assert_eq!(c.d_t[3], -c.b_t[3]);
                assert_eq!(c.g_t, [-c.e_t[0], c.c1, -c.e_t[1]]);
                assert_eq!(c.h_t[1], c.c3);
                assert_eq!(c.h_t[2], -c.f_t[1]);
                assert_eq!(c.h_t[3], -c.f_t[2]);
                assert!(rel(c.c3, c.c_tilde * normal_pdf(c.d[1])) < 1e-14);
                assert!(rel(c.alpha_hat, c.alpha + 0.125) < 1e-14);
            }
        }
    }

    #[test]
    fn barrier_term_free_of_eps() {
        let c0 = compute_coefficients(&market(), 60.0, 100.0, 0).unwrap();
        let c1 = compute_coefficients(&market(), 60.0, 100.0, 1).unwrap();
        assert_eq!(c0.e_t[1], c1.e_t[1]);
        assert_eq!(c0.f_t[2], c1.f_t[2]);
        assert_eq!(c0.f_t[1], 0.0);
        // with εₙ = 1 the reflected density at the barrier cancels the direct one
        assert!(c1.e_t[0].abs() < 1e-15);
        assert!(c0.e_t[0] > 1e-3);
    }

    #[test]
    fn rejects_bad_inputs() {
        let m = market();
        assert!(matches!(compute_coefficients(&m, 100.0, 100.0, 0), Err(PricingError::WrongRegime(_))));
        assert_eq!(compute_coefficients(&m, 100.0, 160.0, 0).unwrap_err(), PricingError::KnockedAtInception);
        assert!(compute_coefficients(&m, 100.0, 60.0, 2).is_err());
        let put = DigitalOptionSpec::european(Side::Put, 100.0, Barrier::down_out(60.0));
        assert!(matches!(Regime::classify(&put), Err(PricingError::Unsupported(_))));
    }

    #[test]
    fn regimes() {
        let s = DigitalOptionSpec::european(Side::Call, 100.0, Barrier::down_out(60.0));
        assert_eq!(Regime::classify(&s).unwrap(), Regime::DoLltK);
        assert_eq!(Regime::classify(&s.with_knock(Knock::In)).unwrap(), Regime::DiLltK);
        let s2 = s.with_barrier_level(120.0);
        assert_eq!(Regime::classify(&s2).unwrap(), Regime::DoLgtK);
        assert_eq!(Regime::classify(&s2.with_knock(Knock::In)).unwrap(), Regime::DiLgtK);
    }

    #[test]
    fn leading_term_vanishes_at_zero_offsets() {
        let c = compute_coefficients(&market(), 100.0, 60.0, 1).unwrap();
        for regime in [Regime::DiLltK, Regime::DoLltK] {
            let (first, second) = expansion_terms(&c, 0.0, 0.0, regime);
            assert_eq!(first, 0.0);
            assert_abs_diff_eq!(
                predicted_error(&c, 400, 0.0, 0.0, regime),
                c.discount * second / 400.0,
                epsilon = 1e-18
            );
        }
        let c2 = compute_coefficients(&market(), 60.0, 100.0, 0).unwrap();
        let (first, _) = expansion_terms(&c2, 0.0, 0.0, Regime::DoLgtK);
        assert_eq!(first, c2.e_t[0]);
        assert!(first != 0.0);
    }

    #[test]
    fn observed_error_matches_table_difference() {
        let spec = DigitalOptionSpec::european(Side::Call, 100.0, Barrier::down_out(60.0));
        let e = observed_error(&market(), &spec, 100).unwrap();
        assert_abs_diff_eq!(e, 0.883147 - 0.878666638819031, epsilon = 6e-7);
        let spec2 = DigitalOptionSpec::european(Side::Call, 60.0, Barrier::down_out(100.0));
        let e2 = observed_error(&market(), &spec2, 1600).unwrap();
        assert_abs_diff_eq!(e2, 0.846107 - 0.8456584881476072, epsilon = 6e-7);
    }

    #[test]
    fn report_shapes() {
        let spec = DigitalOptionSpec::european(Side::Call, 100.0, Barrier::down_out(60.0));
        let one = residual_order_report(&market(), &spec, &[200]).unwrap();
        assert_eq!(one.rows.len(), 1);
        assert!(!one.growth_flag);
        assert_eq!(residual_order_report(&market(), &spec, &[200, 100]).unwrap_err(), PricingError::NonAscending);
        assert!(residual_order_report(&market(), &spec, &[]).is_err());
    }

    #[test]
    fn growth_flag_rule() {
        assert!(growth_flag(&[1.0, 2.0, 3.0, 10.0]));
        assert!(!growth_flag(&[1.0, 2.0, 1.5, 10.0]));
        assert!(!growth_flag(&[1.0, 1.1, 1.2, 1.3]));
        assert!(!growth_flag(&[5.0]));
    }

    proptest! {
        #[test]
        fn quadratic_in_offsets(dk in -0.99f64..=1.0, dl in 0.0f64..0.99, n in 1usize..5000) {
            // rebuild each regime's polynomial from six sample points and compare
            let c = compute_coefficients(&market(), 100.0, 60.0, 1).unwrap();
            let c2 = compute_coefficients(&market(), 60.0, 100.0, 0).unwrap();
            for (coeffs, regime) in [
                (c, Regime::DiLltK), (c, Regime::DoLltK), (c2, Regime::DoLgtK), (c2, Regime::DiLgtK),
            ] {
                let f = |x: f64, y: f64| predicted_error(&coeffs, n, x, y, regime);
                let f00 = f(0.0, 0.0);
                let (fx, fmx, fy, fmy, fxy) = (f(1.0, 0.0), f(-1.0, 0.0), f(0.0, 1.0), f(0.0, -1.0), f(1.0, 1.0));
                let ax = (fx - fmx) / 2.0;
                let axx = (fx + fmx) / 2.0 - f00;
                let ay = (fy - fmy) / 2.0;
                let ayy = (fy + fmy) / 2.0 - f00;
                let axy = fxy - f00 - ax - axx - ay - ayy;
                let rebuilt = f00 + ax * dk + axx * dk * dk + ay * dl + ayy * dl * dl + axy * dk * dl;
                prop_assert!((rebuilt - f(dk, dl)).abs() <= 1e-14);
            }
        }

        #[test]
        fn zero_offsets_kill_leading_term(k in 80.0f64..140.0, l in 20.0f64..79.0, eps in 0u8..=1) {
            let c = compute_coefficients(&market(), k, l, eps).unwrap();
            prop_assert_eq!(expansion_terms(&c, 0.0, 0.0, Regime::DoLltK).0, 0.0);
            prop_assert_eq!(expansion_terms(&c, 0.0, 0.0, Regime::DiLltK).0, 0.0);
        }
    }
}
