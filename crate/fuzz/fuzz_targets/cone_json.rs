#![no_main]

use libfuzzer_sys::fuzz_target;
use qflag::cones::Cone;

// Cone JSON drives the polyhedral toolkit; degenerate inputs must come
// back as errors, and small valid cones must round-trip through the
// double description without panicking.
fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    let Ok(cone) = serde_json::from_str::<Cone>(text) else {
        return;
    };
    let rows = cone.inequalities.len();
    let dim = cone.ambient_dim();
    if rows == 0 || rows > 8 || dim == 0 || dim > 4 {
        return;
    }
    if cone
        .inequalities
        .iter()
        .any(|r| r.len() != dim || r.iter().any(|&x| x.abs() > 8))
    {
        return;
    }
    if let Ok(rays) = qflag::cones::cone_rays(&cone) {
        for ray in &rays.rays {
            assert!(cone.contains(ray));
        }
        let _ = qflag::cones::hilbert_basis(&cone);
    }
});
