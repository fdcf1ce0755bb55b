#![no_main]

use libfuzzer_sys::fuzz_target;
use qflag::store::QueryFilter;

// The query filter parser accepts exact rationals like `1,0,3/8`; parsing
// must never panic, and accepted values must round-trip.
fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(values) = QueryFilter::parse_alpha_prefix(text) {
        for v in values {
            let shown = qflag::poly::rat_to_string(&v);
            let back = qflag::poly::rat_from_string(&shown).expect("round trip");
            assert_eq!(back, v);
        }
    }
});
