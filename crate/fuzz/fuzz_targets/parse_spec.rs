#![no_main]

use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(spec) = elbt_core::specgen::SpecSet::parse(text) {
        // Keep the solver bounded: a few witnesses from a small batch.
        if let Ok(batch) = elbt_core::specgen::generate_batch(&spec, 4, 0) {
            for (input, _) in batch.iter() {
                assert!(spec.in_bounds(input));
            }
        }
    }
});
