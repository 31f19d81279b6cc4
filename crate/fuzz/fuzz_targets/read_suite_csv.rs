#![no_main]

use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let labels = ["invalid", "equilateral", "isosceles", "scalene"].map(String::from);
    let _ = elbt_core::suite::read_suite_csv(data, &labels);
});
