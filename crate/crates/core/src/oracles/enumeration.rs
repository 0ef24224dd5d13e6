//! Brute force over all `2^n` up/down paths of the CRR tree.

use crate::crr::{build_tree_params_with, ProbabilityRule};
use crate::error::{PricingError, Result};
use crate::model::{
    validate, DigitalOptionSpec, ExerciseStyle, Knock, MarketParams, Method, Orientation, PriceResult, Side,
};
use crate::scalar::{CompensatedSum, Scalar};

pub const MAX_ENUMERATION_STEPS: usize = 22;

pub fn enumerate_paths_price<F: Scalar>(
    market: &MarketParams<F>,
    spec: &DigitalOptionSpec<F>,
    steps: usize,
) -> Result<PriceResult<F>> {
    enumerate_paths_price_with(market, spec, steps, ProbabilityRule::default())
}

pub fn enumerate_paths_price_with<F: Scalar>(
    market: &MarketParams<F>,
    spec: &DigitalOptionSpec<F>,
    steps: usize,
    rule: ProbabilityRule,
) -> Result<PriceResult<F>> {
    validate(market, spec)?;
    if steps > MAX_ENUMERATION_STEPS {
        return Err(PricingError::TooManySteps { steps, max: MAX_ENUMERATION_STEPS });
    }
    if spec.style != ExerciseStyle::European {
        return Err(PricingError::Unsupported("path enumeration prices European exercise only".into()));
    }
    let tree = build_tree_params_with(market, steps, rule)?;
    let tol = |v: F| F::snap_tolerance() * F::one().max(v.abs());
    let (log_l, log_k) = (spec.barrier.level.ln(), spec.strike.ln());
    let walk = Walk {
        log_s0: market.s0.ln(),
        dx: tree.dx,
        p: tree.p,
        q: F::one() - tree.p,
        steps,
        spec: *spec,
        log_l,
        tol_l: tol(log_l),
        log_k,
        tol_k: tol(log_k),
    };
    let mut acc = CompensatedSum::new();
    let touched = walk.breached(0);
    walk.visit(0, 0, F::one(), touched, &mut acc);
    Ok(PriceResult::new(market.discount() * acc.value(), Method::Enumeration, Some(steps)))
}

struct Walk<F> {
    log_s0: F,
    dx: F,
    p: F,
    q: F,
    steps: usize,
    spec: DigitalOptionSpec<F>,
    log_l: F,
    tol_l: F,
    log_k: F,
    tol_k: F,
}

impl<F: Scalar> Walk<F> {
    fn log_price(&self, level: i64) -> F {
        self.log_s0 + F::from_index(level) * self.dx
    }

    fn breached(&self, level: i64) -> bool {
        let x = self.log_price(level);
        match self.spec.barrier.orientation {
            Orientation::Down => x <= self.log_l + self.tol_l,
            Orientation::Up => x >= self.log_l - self.tol_l,
        }
    }

    fn pays(&self, level: i64) -> bool {
        let x = self.log_price(level);
        match self.spec.side {
            Side::Call => x >= self.log_k - self.tol_k,
            Side::Put => x < self.log_k - self.tol_k,
        }
    }

    fn visit(&self, i: usize, level: i64, prob: F, touched: bool, acc: &mut CompensatedSum<F>) {
        if touched && self.spec.barrier.knock == Knock::Out {
            return;
        }
        if i == self.steps {
            let alive = match self.spec.barrier.knock {
                Knock::Out => !touched,
                Knock::In => touched,
            };
            if alive && self.pays(level) {
                acc.add(prob);
            }
            return;
        }
        for (next, w) in [(level + 1, self.p), (level - 1, self.q)] {
            let t = touched || self.breached(next);
            self.visit(i + 1, next, prob * w, t, acc);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Barrier;

    fn market() -> MarketParams<f64> {
        MarketParams::new(150.0, 0.1, 0.25, 1.0)
    }

    #[test]
    fn single_step_vanilla() {
        let m = market();
        let t = build_tree_params_with(&m, 1, ProbabilityRule::default()).unwrap();
        let spec = DigitalOptionSpec::european(Side::Call, 150.0 * t.down * 0.99, Barrier::down_out(1e-6));
        let v = enumerate_paths_price(&m, &spec, 1).unwrap().price;
        assert!((v - m.discount()).abs() < 1e-15);
    }

    #[test]
    fn knocked_at_inception_is_zero() {
        let spec = DigitalOptionSpec::european(Side::Call, 100.0, Barrier::down_out(150.0));
        assert_eq!(enumerate_paths_price(&market(), &spec, 10).unwrap().price, 0.0);
    }

    #[test]
    fn limits() {
        let spec = DigitalOptionSpec::european(Side::Call, 100.0, Barrier::down_out(60.0));
        assert_eq!(
            enumerate_paths_price(&market(), &spec, 23).unwrap_err(),
            PricingError::TooManySteps { steps: 23, max: 22 }
        );
        assert!(matches!(
            enumerate_paths_price(&market(), &spec.with_style(ExerciseStyle::American), 5),
            Err(PricingError::Unsupported(_))
        ));
    }
}
