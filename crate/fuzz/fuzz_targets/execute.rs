#![no_main]

use libfuzzer_sys::fuzz_target;

// The first 24 bytes are three little-endian inputs, the rest is program text.
fuzz_target!(|data: &[u8]| {
    if data.len() < 24 {
        return;
    }
    let (head, tail) = data.split_at(24);
    let input: Vec<i64> = head
        .chunks_exact(8)
        .map(|c| i64::from_le_bytes(c.try_into().unwrap()))
        .collect();
    let Ok(text) = std::str::from_utf8(tail) else {
        return;
    };
    if let Ok(program) = elbt_core::lang::parse(text) {
        let _ = elbt_core::lang::execute(&program, &input);
    }
});
