#![no_main]

use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(program) = elbt_core::lang::parse(text) {
        let printed = elbt_core::lang::pretty_print(&program);
        let back = elbt_core::lang::parse(&printed).expect("printed program reparses");
        assert_eq!(back, program);
    }
});
