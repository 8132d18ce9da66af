#![no_main]

use elliptic_order::wire::{parse_distribution, to_json, DistributionSpec};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(d) = parse_distribution(text) {
        // Accepted specs survive a round trip unchanged.
        let json = to_json(&DistributionSpec::from_distribution(&d)).expect("serializable");
        assert_eq!(parse_distribution(&json).expect("re-parses"), d);
    }
});
