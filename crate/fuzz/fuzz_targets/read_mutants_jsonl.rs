#![no_main]

use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let base = elbt_core::corpus::triangle();
    let _ = elbt_core::mutation::read_mutants_jsonl(data, &base);
});
