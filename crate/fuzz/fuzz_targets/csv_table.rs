#![no_main]

use libfuzzer_sys::fuzz_target;

// The CSV reimport path must handle arbitrary bytes gracefully.
fuzz_target!(|data: &[u8]| {
    let _ = qflag::store::import_csv_reader(data);
});
