//! Replays the checked-in fuzz corpora through the same round-trip checks the
//! fuzz targets make, so they are exercised on stable toolchains too.

use std::fs;
use std::path::PathBuf;

use meancut::{ExactRational, IntervalRational};
use meancut_cli::{EvalRow, Grid};

fn seeds(target: &str) -> Vec<String> {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../fuzz/corpus")
        .join(target);
    let mut out: Vec<(PathBuf, String)> = fs::read_dir(&dir)
        .unwrap_or_else(|e| panic!("{}: {e}", dir.display()))
        .map(|e| {
            let p = e.unwrap().path();
            let s = fs::read_to_string(&p).unwrap();
            (p, s)
        })
        .collect();
    out.sort();
    assert!(!out.is_empty(), "no seeds for {target}");
    out.into_iter().map(|(_, s)| s).collect()
}

#[test]
fn rational_seeds() {
    let mut parsed = 0;
    for s in seeds("parse_rational") {
        if let Ok(r) = s.parse::<ExactRational>() {
            assert_eq!(r.to_string().parse::<ExactRational>().unwrap(), r);
            meancut_cli::format::format_rational(&r);
            parsed += 1;
        }
    }
    assert!(parsed > 0);
}

#[test]
fn interval_seeds() {
    let mut parsed = 0;
    for s in seeds("parse_interval") {
        if let Ok(iv) = s.parse::<IntervalRational>() {
            assert!(iv.lo() <= iv.hi());
            assert_eq!(iv.to_string().parse::<IntervalRational>().unwrap(), iv);
            parsed += 1;
        }
    }
    assert!(parsed > 0);
}

#[test]
fn grid_seeds() {
    for s in seeds("parse_grid") {
        let g: Grid = s.parse().unwrap_or_else(|e| panic!("{s:?}: {e}"));
        assert_eq!(g.to_string().parse::<Grid>().unwrap(), g);
        assert!(g.points().windows(2).all(|w| w[0] < w[1]));
    }
}

#[test]
fn eval_row_seeds() {
    for s in seeds("parse_eval_row") {
        let row = EvalRow::parse_line(&s).unwrap_or_else(|e| panic!("{s:?}: {e}"));
        assert_eq!(row.record().join(","), s);
    }
}
