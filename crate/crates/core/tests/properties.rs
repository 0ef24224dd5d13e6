use digital_barrier::analytic;
use digital_barrier::bil::price_adjusted_bil;
use digital_barrier::crr::{price_backward, price_vanilla_backward};
use digital_barrier::model::{Barrier, DigitalOptionSpec, MarketParams};
use digital_barrier::oracles::mc_price;
use digital_barrier::{ExerciseStyle, Knock, McConfig, PricingError, Side};
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn lattice_prices_are_bounded_and_parity_holds(
        s0 in 50.0f64..200.0,
        k_frac in 0.3f64..1.6,
        l_frac in 0.3f64..0.98,
        rate in 0.0f64..0.15,
        sigma in 0.1f64..0.6,
        n in 1usize..400,
    ) {
        let m = MarketParams::new(s0, rate, sigma, 1.0);
        let k = k_frac * s0;
        let out = DigitalOptionSpec::european(Side::Call, k, Barrier::down_out(l_frac * s0));
        let dout = price_backward(&m, &out, n).unwrap().price;
        let din = price_backward(&m, &out.with_knock(Knock::In), n).unwrap().price;
        let van = price_vanilla_backward(&m, Side::Call, k, ExerciseStyle::European, n).unwrap().price;
        let disc = m.discount();
        for v in [dout, din, van] {
            prop_assert!((-1e-12..=disc + 1e-12).contains(&v));
        }
        prop_assert!((din + dout - van).abs() <= 1e-12);
    }

    #[test]
    fn american_dominates_european(
        k_frac in 0.5f64..1.4,
        l_frac in 0.4f64..0.95,
        n in 20usize..300,
    ) {
        let m = MarketParams::new(100.0, 0.05, 0.3, 1.0);
        let eu = DigitalOptionSpec::european(Side::Call, 100.0 * k_frac, Barrier::down_out(100.0 * l_frac));
        prop_assume!(eu.strike != eu.barrier.level);
        let am = eu.with_style(ExerciseStyle::American);
        prop_assert!(price_backward(&m, &am, n).unwrap().price >= price_backward(&m, &eu, n).unwrap().price - 1e-12);
        // a barrier close to spot can leave spot below the coarse mesh, and a strike
        // close to the barrier can demand too fine a mesh
        match (price_adjusted_bil(&m, &am, n), price_adjusted_bil(&m, &eu, n)) {
            (Ok(a), Ok(e)) => prop_assert!(a.price >= e.price - 1e-12),
            (Err(PricingError::SpotOutsideMesh), Err(PricingError::SpotOutsideMesh)) => {}
            (Err(PricingError::TooManySteps { .. }), Err(PricingError::TooManySteps { .. })) => {}
            other => prop_assert!(false, "{other:?}"),
        }
    }

    #[test]
    fn analytic_in_out_parity(
        s0 in 50.0f64..200.0,
        k_frac in 0.3f64..1.6,
        l_frac in 0.3f64..0.98,
        sigma in 0.1f64..0.6,
        put in any::<bool>(),
    ) {
        let m = MarketParams::new(s0, 0.05, sigma, 1.5);
        let side = if put { Side::Put } else { Side::Call };
        let out = DigitalOptionSpec::european(side, k_frac * s0, Barrier::down_out(l_frac * s0));
        prop_assume!(out.strike != out.barrier.level);
        let a = analytic::price(&m, &out).unwrap().price;
        let b = analytic::price(&m, &out.with_knock(Knock::In)).unwrap().price;
        let van = if put {
            analytic::price_vanilla_digital_put(&m, out.strike).unwrap().price
        } else {
            analytic::price_vanilla_digital_call(&m, out.strike).unwrap().price
        };
        prop_assert!((a + b - van).abs() <= 1e-12);
    }
}

#[test]
fn lattices_approach_closed_form() {
    let m = MarketParams::new(100.0f64, 0.03, 0.2, 0.5);
    let spec = DigitalOptionSpec::european(Side::Call, 105.0, Barrier::down_out(85.0));
    let exact = analytic::price(&m, &spec).unwrap().price;
    assert!((price_backward(&m, &spec, 2000).unwrap().price - exact).abs() < 5e-3);
    assert!((price_adjusted_bil(&m, &spec, 2000).unwrap().price - exact).abs() < 1e-4);
}

#[test]
fn single_precision_tracks_double() {
    let m64 = MarketParams::new(150.0f64, 0.1, 0.25, 1.0);
    let m32 = MarketParams::new(150.0f32, 0.1, 0.25, 1.0);
    let s64 = DigitalOptionSpec::european(Side::Call, 100.0f64, Barrier::down_out(60.0));
    let s32 = DigitalOptionSpec::european(Side::Call, 100.0f32, Barrier::down_out(60.0));
    let a = analytic::price(&m32, &s32).unwrap().price as f64;
    assert!((a - analytic::price(&m64, &s64).unwrap().price).abs() < 1e-5);
    let c = price_backward(&m32, &s32, 200).unwrap().price as f64;
    assert!((c - price_backward(&m64, &s64, 200).unwrap().price).abs() < 1e-4);
    let b = price_adjusted_bil(&m32, &s32, 200).unwrap().price as f64;
    assert!((b - price_adjusted_bil(&m64, &s64, 200).unwrap().price).abs() < 1e-4);
}

#[test]
fn monte_carlo_ignores_thread_count() {
    let m = MarketParams::new(150.0f64, 0.1, 0.25, 1.0);
    let spec = DigitalOptionSpec::european(Side::Call, 100.0, Barrier::down_out(60.0));
    let cfg = McConfig { paths: 30_000, steps_per_year: 52, seed: 11, use_bridge_correction: true };
    let many = mc_price(&m, &spec, &cfg).unwrap().price;
    let pool = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
    let one = pool.install(|| mc_price(&m, &spec, &cfg).unwrap().price);
    assert_eq!(many.to_bits(), one.to_bits());
}

#[test]
fn monte_carlo_put_near_closed_form() {
    let m = MarketParams::new(100.0f64, 0.05, 0.25, 1.0);
    let spec = DigitalOptionSpec::european(Side::Put, 110.0, Barrier::down_out(80.0));
    let exact = analytic::price(&m, &spec).unwrap().price;
    let cfg = McConfig { paths: 200_000, steps_per_year: 52, seed: 5, use_bridge_correction: true };
    let r = mc_price(&m, &spec, &cfg).unwrap();
    let se = r.diagnostic("std_error").unwrap();
    assert!((r.price - exact).abs() <= 4.0 * se, "{} vs {exact}", r.price);
}
