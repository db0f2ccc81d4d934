use proptest::prelude::*;

use meancut::ExactRational;
use meancut_cli::format::{format_f64, format_rational};
use meancut_cli::{EvalRow, Grid};

fn opt_f64() -> impl Strategy<Value = Option<f64>> {
    prop::option::of(prop_oneof![
        any::<f64>().prop_filter("finite", |x| x.is_finite()),
        0.0..1.0
    ])
}

proptest! {
    #[test]
    fn f64_rendering_round_trips(x in any::<f64>().prop_filter("not NaN", |x| !x.is_nan())) {
        let s = format_f64(x);
        prop_assert_eq!(s.parse::<f64>().unwrap(), x);
        prop_assert!(!s.contains(','));
    }

    #[test]
    fn rational_rendering_is_nearest(num in 0i64..1 << 40, den in 1i64..1 << 40) {
        let r = ExactRational::ratio(num, den).unwrap();
        let s = format_rational(&r);
        let v: f64 = s.parse().unwrap();
        let want = num as f64 / den as f64;
        prop_assert!((v - want).abs() <= 1e-15 * want.abs());
    }

    #[test]
    fn eval_rows_round_trip(
        k in 1u64..10_000,
        l in 1u64..10_000,
        exact in prop::option::of((0i64..1000, 1i64..1000)),
        vals in prop::collection::vec(opt_f64(), 9),
    ) {
        let row = EvalRow {
            k,
            l,
            exact: exact.map(|(n, d)| ExactRational::ratio(n, d).unwrap()),
            float_p: vals[0],
            raab_p: vals[1],
            approx: [vals[2], vals[3], vals[4]],
            abs_err_raab: vals[5],
            abs_err: [vals[6], vals[7], vals[8]],
        };
        let line = row.record().join(",");
        prop_assert_eq!(EvalRow::parse_line(&line).unwrap(), row);
    }

    #[test]
    fn linear_grid_points(start in 0u64..1000, len in 0u64..1000, step in 1u64..50) {
        let g: Grid = format!("{start}:{}:{step}", start + len).parse().unwrap();
        let pts = g.points();
        prop_assert_eq!(pts[0], start);
        prop_assert!(pts.windows(2).all(|w| w[1] - w[0] == step));
        prop_assert!(*pts.last().unwrap() <= start + len && *pts.last().unwrap() + step > start + len);
    }

    #[test]
    fn geometric_grid_points(start in 1u64..1000, end in 1u64..100_000, factor in 1.01f64..10.0) {
        prop_assume!(start <= end);
        let g: Grid = format!("{start}:{end}:x{factor}").parse().unwrap();
        let pts = g.points();
        prop_assert_eq!(pts[0], start);
        prop_assert!(pts.windows(2).all(|w| w[0] < w[1]));
        prop_assert!(*pts.last().unwrap() <= end);
        let back: Grid = g.to_string().parse().unwrap();
        prop_assert_eq!(back, g);
    }
}
