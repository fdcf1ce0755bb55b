#![no_main]

use libfuzzer_sys::fuzz_target;

// Quiver JSON is the main untrusted input surface of the CLI: parsing and
// validation must never panic, and the cheap derived quantities must be
// total on validated quivers.
fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    let Ok(value) = serde_json::from_str::<serde_json::Value>(text) else {
        return;
    };
    let Some(adjacency) = value
        .get("adjacency")
        .and_then(|v| serde_json::from_value::<Vec<Vec<i64>>>(v.clone()).ok())
    else {
        return;
    };
    let Some(dim_vector) = value
        .get("dim_vector")
        .and_then(|v| serde_json::from_value::<Vec<i64>>(v.clone()).ok())
    else {
        return;
    };
    let Ok((q, _perm)) = qflag::Quiver::new(adjacency, dim_vector) else {
        return;
    };
    let _ = q.variety_data();
    let _ = qflag::cones::nef_cone(&q);
    let _ = qflag::cones::is_fano(&q);
    // Keep the expensive combinatorics bounded.
    if q.vertex_count() <= 6 && q.dim_vector.iter().all(|&r| r <= 4) {
        let _ = q.normal_form();
        let _ = q.abelianize();
        let _ = q.contract_trivial();
    }
});
