#![no_main]

use libfuzzer_sys::fuzz_target;
use meancut::ExactRational;

fuzz_target!(|data: &[u8]| {
    let Ok(s) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(r) = s.parse::<ExactRational>() {
        let back: ExactRational = r.to_string().parse().expect("display re-parses");
        assert_eq!(back, r);
        let _ = meancut_cli::format::format_rational(&r);
    }
});
