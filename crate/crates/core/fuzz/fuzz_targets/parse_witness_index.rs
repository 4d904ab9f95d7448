#![no_main]

use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let _ = tvn::io::parse_witness_index(data, "fuzz");
});
