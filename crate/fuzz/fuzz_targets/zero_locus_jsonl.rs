#![no_main]

use libfuzzer_sys::fuzz_target;
use qflag::search::ZeroLocusRecord;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    for line in text.lines() {
        let _ = serde_json::from_str::<ZeroLocusRecord>(line);
    }
});
