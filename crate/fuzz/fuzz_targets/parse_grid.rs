#![no_main]

use libfuzzer_sys::fuzz_target;
use meancut_cli::Grid;

fuzz_target!(|data: &[u8]| {
    let Ok(s) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(g) = s.parse::<Grid>() {
        let back: Grid = g.to_string().parse().expect("display re-parses");
        assert_eq!(back, g);
        // only expand grids of bounded size
        let small = match g {
            Grid::Linear { start, end, step } => (end - start) / step < 100_000,
            Grid::Geometric { end, factor, .. } => (end as f64).ln() / factor.ln() < 100_000.0,
        };
        if small {
            let pts = g.points();
            assert!(pts.windows(2).all(|w| w[0] < w[1]));
        }
    }
});
