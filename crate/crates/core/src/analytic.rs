//! Closed-form Black-Scholes prices for vanilla and down-barrier digital options.
//!
//! Only down barriers have formulas here. Puts are assembled from the call
//! formulas by payoff decomposition: a down-and-out "bond" paying 1 whenever
//! the barrier is never touched splits into the out-call and the out-put.

use crate::error::{PricingError, Result};
use crate::model::{
    validate, DigitalOptionSpec, ExerciseStyle, Knock, MarketParams, Method, Orientation, PriceResult, Side,
};
use crate::scalar::Scalar;

/// Standard normal CDF, `Φ(x) = erfc(-x/√2)/2`.
pub fn normal_cdf<F: Scalar>(x: F) -> F {
    F::lit(0.5) * (-x * F::FRAC_1_SQRT_2()).erfc()
}

/// Standard normal density.
pub fn normal_pdf<F: Scalar>(x: F) -> F {
    (-F::lit(0.5) * x * x).exp() / (F::TAU()).sqrt()
}

/// The eight `d` terms entering the closed forms and the error-expansion constants.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DCoefficients<F> {
    pub d11: F,
    pub d12: F,
    pub d21: F,
    pub d22: F,
    pub d31: F,
    pub d32: F,
    pub d41: F,
    pub d42: F,
}

impl<F: Scalar> DCoefficients<F> {
    pub fn first(&self) -> [F; 4] {
        [self.d11, self.d21, self.d31, self.d41]
    }

    pub fn second(&self) -> [F; 4] {
        [self.d12, self.d22, self.d32, self.d42]
    }
}

pub fn d_coefficients<F: Scalar>(market: &MarketParams<F>, strike: F, barrier: F) -> DCoefficients<F> {
    let MarketParams { s0, rate, sigma, maturity } = *market;
    let vol_t = sigma * maturity.sqrt();
    let carry = (rate + F::lit(0.5) * sigma * sigma) * maturity;
    let d = |log_moneyness: F| (log_moneyness + carry) / vol_t;
    let d11 = d((s0 / strike).ln());
    let d21 = d((barrier * barrier / (s0 * strike)).ln());
    let d31 = d((s0 / barrier).ln());
    let d41 = d((barrier / s0).ln());
    DCoefficients { d11, d12: d11 - vol_t, d21, d22: d21 - vol_t, d31, d32: d31 - vol_t, d41, d42: d41 - vol_t }
}

/// `(s0/L)^(1 - 2r/σ²)`, the reflection weight of the image process.
pub fn reflection_factor<F: Scalar>(market: &MarketParams<F>, barrier: F) -> F {
    let exponent = F::one() - F::lit(2.0) * market.rate / (market.sigma * market.sigma);
    (market.s0 / barrier).powf(exponent)
}

fn require_alive<F: Scalar>(market: &MarketParams<F>, barrier: F) -> Result<()> {
    market.validate()?;
    if barrier <= F::zero() {
        return Err(PricingError::Nonpositive("barrier"));
    }
    if market.s0 <= barrier {
        return Err(PricingError::KnockedAtInception);
    }
    Ok(())
}

/// `e^{-rT} Φ(d12)`.
pub fn price_vanilla_digital_call<F: Scalar>(market: &MarketParams<F>, strike: F) -> Result<PriceResult<F>> {
    market.validate()?;
    if strike <= F::zero() {
        return Err(PricingError::Nonpositive("strike"));
    }
    // the barrier argument does not enter d12
    let d = d_coefficients(market, strike, strike);
    Ok(PriceResult::new(market.discount() * normal_cdf(d.d12), Method::Analytic, None))
}

/// `e^{-rT} Φ(-d12)`.
pub fn price_vanilla_digital_put<F: Scalar>(market: &MarketParams<F>, strike: F) -> Result<PriceResult<F>> {
    let call = price_vanilla_digital_call(market, strike)?;
    let d = d_coefficients(market, strike, strike);
    Ok(PriceResult::new(market.discount() * normal_cdf(-d.d12), Method::Analytic, None)
        .with("call_complement", market.discount() - call.price))
}

/// Pays 1 at expiry iff the spot never touched the lower barrier. Strike-free.
pub fn price_do_bond<F: Scalar>(market: &MarketParams<F>, barrier: F) -> Result<PriceResult<F>> {
    require_alive(market, barrier)?;
    let d = d_coefficients(market, barrier, barrier);
    let price = market.discount() * (normal_cdf(d.d32) - reflection_factor(market, barrier) * normal_cdf(d.d42));
    Ok(PriceResult::new(price.max(F::zero()), Method::Analytic, None))
}

/// Down-and-out digital call with the barrier below the strike.
pub fn price_do_digital_call_l_below_k<F: Scalar>(
    market: &MarketParams<F>,
    strike: F,
    barrier: F,
) -> Result<PriceResult<F>> {
    require_alive(market, barrier)?;
    if strike <= F::zero() {
        return Err(PricingError::Nonpositive("strike"));
    }
    if barrier >= strike {
        return Err(PricingError::WrongRegime("barrier must lie below the strike".into()));
    }
    let d = d_coefficients(market, strike, barrier);
    let price = market.discount() * (normal_cdf(d.d12) - normal_cdf(d.d22) * reflection_factor(market, barrier));
    Ok(PriceResult::new(price.max(F::zero()), Method::Analytic, None))
}

/// Down-and-out digital call with the barrier above the strike; equals the bond.
pub fn price_do_digital_call_l_above_k<F: Scalar>(
    market: &MarketParams<F>,
    strike: F,
    barrier: F,
) -> Result<PriceResult<F>> {
    require_alive(market, barrier)?;
    if strike <= F::zero() {
        return Err(PricingError::Nonpositive("strike"));
    }
    if barrier <= strike {
        return Err(PricingError::WrongRegime("barrier must lie above the strike".into()));
    }
    price_do_bond(market, barrier)
}

/// Down-and-out digital call in either regime; `L == K` reduces to the bond.
pub fn price_do_digital_call<F: Scalar>(market: &MarketParams<F>, strike: F, barrier: F) -> Result<PriceResult<F>> {
    if barrier < strike {
        price_do_digital_call_l_below_k(market, strike, barrier)
    } else {
        require_alive(market, barrier)?;
        if strike <= F::zero() {
            return Err(PricingError::Nonpositive("strike"));
        }
        price_do_bond(market, barrier)
    }
}

pub fn price_di_digital_call<F: Scalar>(market: &MarketParams<F>, strike: F, barrier: F) -> Result<PriceResult<F>> {
    let out = price_do_digital_call(market, strike, barrier)?;
    let vanilla = price_vanilla_digital_call(market, strike)?;
    Ok(PriceResult::new((vanilla.price - out.price).max(F::zero()), Method::Analytic, None))
}

/// Down-barrier digital put, out or in per the spec's knock type.
pub fn price_digital_put_single_barrier<F: Scalar>(
    market: &MarketParams<F>,
    spec: &DigitalOptionSpec<F>,
) -> Result<PriceResult<F>> {
    check_supported(spec)?;
    if spec.side != Side::Put {
        return Err(PricingError::InvalidArgument("expected a put".into()));
    }
    let barrier = spec.barrier.level;
    let bond = price_do_bond(market, barrier)?.price;
    let out_call = price_do_digital_call(market, spec.strike, barrier)?.price;
    let out_put = (bond - out_call).max(F::zero());
    let price = match spec.barrier.knock {
        Knock::Out => out_put,
        Knock::In => {
            let vanilla_put = price_vanilla_digital_put(market, spec.strike)?.price;
            (vanilla_put - out_put).max(F::zero())
        }
    };
    Ok(PriceResult::new(price, Method::Analytic, None).with("do_bond", bond))
}

fn check_supported<F: Scalar>(spec: &DigitalOptionSpec<F>) -> Result<()> {
    if spec.style != ExerciseStyle::European {
        return Err(PricingError::Unsupported("no closed form for American exercise".into()));
    }
    if spec.barrier.orientation != Orientation::Down {
        return Err(PricingError::Unsupported("no closed form for up barriers".into()));
    }
    Ok(())
}

/// Closed-form price for any supported spec (European, down barrier, alive at inception).
pub fn price<F: Scalar>(market: &MarketParams<F>, spec: &DigitalOptionSpec<F>) -> Result<PriceResult<F>> {
    validate(market, spec)?.require_alive()?;
    check_supported(spec)?;
    let (k, l) = (spec.strike, spec.barrier.level);
    match (spec.side, spec.barrier.knock) {
        (Side::Call, Knock::Out) => price_do_digital_call(market, k, l),
        (Side::Call, Knock::In) => price_di_digital_call(market, k, l),
        (Side::Put, _) => price_digital_put_single_barrier(market, spec),
    }
}

/// Closed-form price when one exists, `None` otherwise.
pub fn reference_price<F: Scalar>(market: &MarketParams<F>, spec: &DigitalOptionSpec<F>) -> Option<F> {
    price(market, spec).ok().map(|r| r.price)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Barrier;
    use approx::assert_abs_diff_eq;

    fn table_market() -> MarketParams<f64> {
        MarketParams::new(150.0, 0.1, 0.25, 1.0)
    }

    /// Composite Simpson quadrature of the Gaussian density on [0, x].
    fn cdf_by_quadrature(x: f64) -> f64 {
        let n = 20_000;
        let h = x / n as f64;
        let f = |t: f64| (-0.5 * t * t).exp() / (2.0 * std::f64::consts::PI).sqrt();
        let mut s = f(0.0) + f(x);
        for i in 1..n {
            s += f(i as f64 * h) * if i % 2 == 1 { 4.0 } else { 2.0 };
        }
        0.5 + s * h / 3.0
    }

    #[test]
    fn normal_cdf_values() {
        assert_eq!(normal_cdf(0.0f64), 0.5);
        assert!(normal_cdf(8.0f64) >= 1.0 - 1e-15);
        assert_abs_diff_eq!(normal_cdf(1.0f64), 0.8413447460685429, epsilon = 1e-15);
        assert_abs_diff_eq!(normal_cdf(1.0f64), cdf_by_quadrature(1.0), epsilon = 1e-14);
        assert_abs_diff_eq!(normal_cdf(-2.3f64), 1.0 - cdf_by_quadrature(2.3), epsilon = 1e-14);
    }

    #[test]
    fn d_terms_table_one() {
        let d = d_coefficients(&table_market(), 100.0, 60.0);
        assert_abs_diff_eq!(d.d11, (1.5f64.ln() + 0.13125) / 0.25, epsilon = 1e-15);
        for (a, b) in d.first().iter().zip(d.second()) {
            assert_abs_diff_eq!(a - b, 0.25, epsilon = 1e-14);
        }
        let atm = d_coefficients(&MarketParams::new(100.0, 0.05, 0.2, 2.0), 100.0, 100.0);
        assert_abs_diff_eq!(atm.d11, (0.05 + 0.02) * 2f64.sqrt() / 0.2, epsilon = 1e-14);
        assert_abs_diff_eq!(atm.d32, (0.05 - 0.02) * 2f64.sqrt() / 0.2, epsilon = 1e-14);
    }

    #[test]
    fn table_prices() {
        let m = table_market();
        // references evaluated with 40-digit arithmetic
        let t1 = price_do_digital_call_l_below_k(&m, 100.0, 60.0).unwrap().price;
        assert_abs_diff_eq!(t1, 0.878666638819031, epsilon = 1e-13);
        let t2 = price_do_digital_call_l_above_k(&m, 60.0, 100.0).unwrap().price;
        assert_abs_diff_eq!(t2, 0.8456584881476072, epsilon = 1e-13);
    }

    #[test]
    fn regime_and_inception_errors() {
        let m = table_market();
        assert_eq!(price_do_digital_call_l_below_k(&m, 100.0, 160.0).unwrap_err(), PricingError::KnockedAtInception);
        assert!(matches!(price_do_digital_call_l_below_k(&m, 100.0, 120.0), Err(PricingError::WrongRegime(_))));
        assert!(matches!(price_do_digital_call_l_above_k(&m, 100.0, 80.0), Err(PricingError::WrongRegime(_))));
    }

    #[test]
    fn vanilla_limits() {
        let m = table_market();
        assert_abs_diff_eq!(price_vanilla_digital_call(&m, 1e-12).unwrap().price, (-0.1f64).exp(), epsilon = 1e-12);
        assert!(price_vanilla_digital_call(&m, 1e9).unwrap().price < 1e-300);
    }

    #[test]
    fn vanishing_barrier_recovers_vanilla() {
        let m = table_market();
        let vanilla = price_vanilla_digital_call(&m, 100.0).unwrap().price;
        for l in [1e-3, 1e-6] {
            let out = price_do_digital_call_l_below_k(&m, 100.0, l).unwrap().price;
            assert!((vanilla - out) / vanilla <= 1e-9);
            assert!(out <= vanilla);
            assert!(price_di_digital_call(&m, 100.0, l).unwrap().price <= 1e-9);
        }
    }

    #[test]
    fn above_regime_is_strike_free() {
        let m = table_market();
        let a = price_do_digital_call_l_above_k(&m, 60.0, 100.0).unwrap().price;
        for k in [1e-9, 1.0, 30.0, 99.0] {
            assert_eq!(price_do_digital_call_l_above_k(&m, k, 100.0).unwrap().price, a);
        }
    }

    #[test]
    fn knock_in_by_parity() {
        let m = table_market();
        let di = price_di_digital_call(&m, 100.0, 60.0).unwrap().price;
        assert_abs_diff_eq!(di, 3.330902985715713e-9, epsilon = 1e-14);
        let di2 = price_di_digital_call(&m, 60.0, 100.0).unwrap().price;
        assert_abs_diff_eq!(di2, 0.05914209111209425, epsilon = 1e-13);
    }

    #[test]
    fn put_decomposition() {
        let m = table_market();
        let out_put_above = DigitalOptionSpec::european(Side::Put, 60.0, Barrier::down_out(100.0));
        assert_eq!(price_digital_put_single_barrier(&m, &out_put_above).unwrap().price, 0.0);

        let out_put = DigitalOptionSpec::european(Side::Put, 100.0, Barrier::down_out(60.0));
        let bond = price_do_bond(&m, 60.0).unwrap().price;
        let p = price_digital_put_single_barrier(&m, &out_put).unwrap().price;
        let c = price(&m, &out_put.with_side(Side::Call)).unwrap().price;
        assert_abs_diff_eq!(p, bond - 0.878666638819031, epsilon = 1e-13);
        assert_abs_diff_eq!(p + c, bond, epsilon = 1e-12);

        let in_put = out_put.with_knock(Knock::In);
        let vanilla_put = price_vanilla_digital_put(&m, 100.0).unwrap().price;
        let pi = price(&m, &in_put).unwrap().price;
        assert_abs_diff_eq!(pi + p, vanilla_put, epsilon = 1e-12);
    }

    #[test]
    fn zero_rate_uses_unit_exponent() {
        let m = MarketParams::new(100.0, 0.0, 0.3, 1.0);
        assert_eq!(reflection_factor(&m, 80.0), 100.0 / 80.0);
        let p = price_do_digital_call(&m, 90.0, 80.0).unwrap().price;
        assert!(p > 0.0 && p < 1.0);
    }

    #[test]
    fn unsupported_specs() {
        let m = table_market();
        let up = DigitalOptionSpec::european(
            Side::Call,
            100.0,
            Barrier { level: 200.0, orientation: Orientation::Up, knock: Knock::Out },
        );
        assert!(matches!(price(&m, &up), Err(PricingError::Unsupported(_))));
        let am =
            DigitalOptionSpec::european(Side::Call, 100.0, Barrier::down_out(60.0)).with_style(ExerciseStyle::American);
        assert!(matches!(price(&m, &am), Err(PricingError::Unsupported(_))));
        assert!(reference_price(&m, &am).is_none());
    }

    proptest::proptest! {
        #[test]
        fn ordering_bounds(
            s0 in 50.0f64..200.0, k in 20.0f64..250.0, frac in 0.05f64..0.95,
            r in 0.0f64..0.15, sigma in 0.05f64..0.6, t in 0.1f64..3.0,
        ) {
            let m = MarketParams::new(s0, r, sigma, t);
            let l = s0 * frac;
            let out = price_do_digital_call(&m, k, l).unwrap().price;
            let inn = price_di_digital_call(&m, k, l).unwrap().price;
            let vanilla = price_vanilla_digital_call(&m, k).unwrap().price;
            proptest::prop_assert!(out >= 0.0 && out <= vanilla + 1e-15);
            proptest::prop_assert!(vanilla <= m.discount() + 1e-15);
            proptest::prop_assert!((inn + out - vanilla).abs() <= 1e-12);
        }
    }
}
