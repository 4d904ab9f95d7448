#![no_main]

use libfuzzer_sys::fuzz_target;
use tvn::io::{parse_tensor, tensor_to_json};

fuzz_target!(|data: &[u8]| {
    // anything accepted must survive a write/read cycle unchanged
    if let Ok(t) = parse_tensor(data, "fuzz") {
        let json = tensor_to_json(&t);
        let back = parse_tensor(json.as_bytes(), "fuzz").expect("written tensor parses");
        assert_eq!(back, t);
    }
});
