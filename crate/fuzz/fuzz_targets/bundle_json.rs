#![no_main]

use libfuzzer_sys::fuzz_target;
use qflag::schur::BundleSpec;

// Bundle JSON against a fixed small quiver: validation and the root
// computations must reject malformed shapes without panicking.
fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    let Ok(bundle) = serde_json::from_str::<BundleSpec>(text) else {
        return;
    };
    let (q, _) = qflag::Quiver::new(
        vec![vec![0, 4, 1], vec![0, 0, 2], vec![0, 0, 0]],
        vec![1, 2, 1],
    )
    .unwrap();
    if bundle.validate(&q).is_err() {
        return;
    }
    // Bound the Schur data so enumeration stays small.
    let small = bundle
        .summands
        .iter()
        .all(|s| s.0.iter().all(|p| p.0.iter().all(|&x| x.abs() <= 6)))
        && bundle.summands.len() <= 4;
    if !small {
        return;
    }
    let _ = bundle.rank(&q);
    let _ = bundle.roots(&q);
    let _ = bundle.first_chern(&q);
    let _ = bundle.roots_all_nef(&q);
});
