use num_bigint::BigInt;
use num_traits::Pow;
use proptest::prelude::*;

use meancut::analysis::{limit_identity_residual, oracle_p};
use meancut::binet::{binet_kernel, binet_mu_gamma, binet_mu_quad, QuadratureSpec};
use meancut::exact::{exact_p, exact_swap_defect, karamata_check, poisson_partial_sum};
use meancut::float_eval::{log_p, poisson_tail, poisson_upper, rational_to_f64, LogReal};
use meancut::raab::{RaabEvaluator, SeriesConfig};
use meancut::{ExactRational, IntervalRational, ParamPair};

fn pair(k: u64, l: u64) -> ParamPair {
    ParamPair::new(k, l).unwrap()
}

fn evaluator() -> RaabEvaluator {
    RaabEvaluator::new(QuadratureSpec::with_tol(1e-10), SeriesConfig::default()).unwrap()
}

proptest! {
    #[test]
    fn exact_p_within_quarter_and_half(k in 1u64..=60, l in 1u64..=60) {
        let p = exact_p(pair(k, l));
        prop_assert!(p >= ExactRational::ratio(1, 4).unwrap());
        prop_assert!(p <= ExactRational::ratio(1, 2).unwrap());
    }

    #[test]
    fn swap_identity_is_exact(k in 1u64..=40, l in 1u64..=40) {
        let p = pair(k, l);
        let total = &(&exact_p(p) + &exact_p(p.swapped())) + &exact_swap_defect(p);
        prop_assert_eq!(total, ExactRational::one());
    }

    #[test]
    fn float_agrees_with_exact(k in 1u64..=60, l in 1u64..=60) {
        let exact = rational_to_f64(&exact_p(pair(k, l)));
        let float = log_p(pair(k, l));
        prop_assert!((float - exact).abs() / exact <= 1e-12, "{} vs {}", float, exact);
    }

    #[test]
    fn float_swap_identity(k in 1u64..=200, l in 1u64..=200) {
        let p = pair(k, l);
        let s = log_p(p) + log_p(p.swapped()) + rational_to_f64(&exact_swap_defect(p));
        prop_assert!((s - 1.0).abs() <= 1e-10);
    }

    #[test]
    fn rational_display_round_trips(num in any::<i64>(), den in 1i64..) {
        let r = ExactRational::ratio(num, den).unwrap();
        let back: ExactRational = r.to_string().parse().unwrap();
        prop_assert_eq!(back, r);
    }

    #[test]
    fn interval_display_round_trips(a in any::<i32>(), b in any::<i32>(), den in 1i64..1000) {
        let (lo, hi) = (a.min(b) as i64, a.max(b) as i64);
        let iv = IntervalRational::new(
            ExactRational::ratio(lo, den).unwrap(),
            ExactRational::ratio(hi, den).unwrap(),
        ).unwrap();
        let back: IntervalRational = iv.to_string().parse().unwrap();
        prop_assert_eq!(back, iv);
    }

    #[test]
    fn log_real_product_matches_f64(a in -1e100f64..1e100, b in -1e100f64..1e100) {
        let got = (LogReal::from_f64(a) * LogReal::from_f64(b)).to_f64();
        let want = a * b;
        prop_assert!((got - want).abs() <= 1e-13 * want.abs());
    }

    #[test]
    fn mu_bracket(x in 0.01f64..1e4) {
        let mu = binet_mu_quad(x, &QuadratureSpec::default()).unwrap().mu;
        prop_assert!(mu > 0.0 && mu < 1.0 / (12.0 * x));
    }

    #[test]
    fn mu_strictly_decreasing(x in 0.01f64..1e3, step in 0.01f64..10.0) {
        let spec = QuadratureSpec::default();
        let a = binet_mu_quad(x, &spec).unwrap().mu;
        let b = binet_mu_quad(x + step, &spec).unwrap().mu;
        prop_assert!(b < a);
    }

    #[test]
    fn mu_quad_matches_closed_form(x in 0.05f64..1e4) {
        let q = binet_mu_quad(x, &QuadratureSpec::with_tol(1e-10)).unwrap().mu;
        prop_assert!((q - binet_mu_gamma(x)).abs() <= 1e-9);
    }

    #[test]
    fn kernel_positive_and_bounded(t in 1e-6f64..=100.0) {
        let g = binet_kernel(t);
        prop_assert!(g > 0.0 && g <= 1.0 / 12.0);
    }

    #[test]
    fn raab_product_matches_exact(k in 1u64..=60, l in 1u64..=60) {
        let r = evaluator().raab_p(pair(k, l)).unwrap();
        prop_assert!((r.p - rational_to_f64(&exact_p(pair(k, l)))).abs() <= 1e-6);
        prop_assert!(r.tail_bound <= 1e-8);
    }
}

#[test]
fn diagonal_identity() {
    for n in 1..=40u64 {
        let c = num_integer::binomial(BigInt::from(2 * n), BigInt::from(n));
        let defect = ExactRational::new(c, Pow::pow(BigInt::from(2), 2 * n + 1)).unwrap();
        let half = ExactRational::ratio(1, 2).unwrap();
        assert_eq!(exact_p(pair(n, n)), &half - &defect, "n = {n}");
    }
}

#[test]
fn lower_bound_attained_at_one_one() {
    assert_eq!(exact_p(pair(1, 1)), ExactRational::ratio(1, 4).unwrap());
}

#[test]
fn diagonal_distance_from_half() {
    for n in 1..=40u64 {
        let d = (oracle_p(pair(n, n)) - 0.5).abs();
        assert!(
            d <= 0.5 / (std::f64::consts::PI * n as f64).sqrt() + 1e-3,
            "n = {n}"
        );
    }
}

#[test]
fn karamata_holds_to_three_hundred() {
    for l in 1..=300 {
        assert_eq!(karamata_check(l).unwrap(), (true, true), "l = {l}");
    }
}

#[test]
fn poisson_tail_increases_toward_half() {
    let mut prev = 0.0;
    for k in 1..=1000 {
        let v = poisson_tail(k).unwrap();
        assert!(v > prev && v < 0.5, "k = {k}");
        prev = v;
    }
}

#[test]
fn poisson_identity() {
    for m in 1..=100 {
        assert!(
            limit_identity_residual(m).unwrap().abs() <= 1e-12,
            "m = {m}"
        );
        // log-space evaluation against the exact partial sum scaled by e^{-m}
        let head = rational_to_f64(&poisson_partial_sum(m, m).unwrap()) * (-(m as f64)).exp();
        assert!(
            (poisson_upper(m).unwrap() - (1.0 - head)).abs() <= 1e-12,
            "m = {m}"
        );
    }
}

#[test]
fn lemma_u_envelope() {
    let grid = [5, 10, 20, 40, 80];
    let rows = evaluator().lemma_u_check(&grid, &grid).unwrap();
    assert_eq!(rows.len(), 25);
    for r in rows {
        assert!(r.passed(), "{r:?}");
    }
}

#[test]
fn lemma_c_regimes() {
    let ev = evaluator();
    for r in ev.lemma_c_regime1(1, 1, &[10, 20, 40, 80]).unwrap() {
        assert!(r.passed(), "{r:?}");
    }
    let k = ev.lemma_c_regime2(1, 1000, &[1, 2, 4, 8]).unwrap();
    assert!(k.passed(), "{k:?}");
}

#[test]
fn v_series_terms_are_positive() {
    let ev = evaluator();
    for (k, l) in [(1, 1), (3, 5), (30, 2), (2, 30)] {
        let terms = ev.v_series_terms(pair(k, l), 200).unwrap();
        assert!(terms.iter().all(|&t| t > 0.0));
    }
}
