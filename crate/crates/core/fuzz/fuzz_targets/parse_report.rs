#![no_main]

use elliptic_order::order::OrderReport;
use elliptic_order::verify::VerificationReport;
use elliptic_order::wire::{parse_json, to_json};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(r) = parse_json::<OrderReport>(text) {
        let again: OrderReport = parse_json(&to_json(&r).unwrap()).unwrap();
        assert_eq!(to_json(&again).unwrap(), to_json(&r).unwrap());
    }
    if let Ok(r) = parse_json::<VerificationReport>(text) {
        let again: VerificationReport = parse_json(&to_json(&r).unwrap()).unwrap();
        assert_eq!(to_json(&again).unwrap(), to_json(&r).unwrap());
    }
});
