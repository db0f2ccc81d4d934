#![no_main]

use libfuzzer_sys::fuzz_target;
use meancut::IntervalRational;

fuzz_target!(|data: &[u8]| {
    let Ok(s) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(iv) = s.parse::<IntervalRational>() {
        assert!(iv.lo() <= iv.hi());
        let back: IntervalRational = iv.to_string().parse().expect("display re-parses");
        assert_eq!(back, iv);
    }
});
