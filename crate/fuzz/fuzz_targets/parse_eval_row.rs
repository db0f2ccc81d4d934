#![no_main]

use libfuzzer_sys::fuzz_target;
use meancut_cli::EvalRow;

fuzz_target!(|data: &[u8]| {
    let Ok(s) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(row) = EvalRow::parse_line(s) {
        let line = row.record().join(",");
        let back = EvalRow::parse_line(&line).expect("record re-parses");
        // NaN fields compare unequal; compare the rendered form instead
        assert_eq!(back.record(), row.record());
    }
});
