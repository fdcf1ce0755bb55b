#![no_main]

use libfuzzer_sys::fuzz_target;
use qflag::search::ClassificationRecord;

// Stored classification records are reparsed on resume; arbitrary lines
// must either parse cleanly or fail as errors.
fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    for line in text.lines() {
        let Ok(record) = serde_json::from_str::<ClassificationRecord>(line) else {
            continue;
        };
        // Reconstructing the quiver revalidates the matrix; only do it for
        // records whose stored matrix is actually a valid quiver.
        let adj: Vec<Vec<i64>> = record
            .adjacency
            .iter()
            .map(|r| r.iter().map(|&m| m as i64).collect())
            .collect();
        let ranks: Vec<i64> = record.dim_vector.iter().map(|&r| r as i64).collect();
        let _ = qflag::Quiver::new(adj, ranks);
    }
});
