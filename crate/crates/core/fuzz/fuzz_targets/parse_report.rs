#![no_main]

use libfuzzer_sys::fuzz_target;
use tvn::io::{parse_report, report_to_json};

fuzz_target!(|data: &[u8]| {
    if let Ok(r) = parse_report(data, "fuzz") {
        let json = report_to_json(&r);
        let back = parse_report(json.as_bytes(), "fuzz").expect("written report parses");
        assert_eq!(report_to_json(&back), json);
    }
});
