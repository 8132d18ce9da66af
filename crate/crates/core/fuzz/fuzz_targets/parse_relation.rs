#![no_main]

use elliptic_order::wire::parse_relation;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(rel) = parse_relation(text) {
        assert_eq!(parse_relation(rel.tag()).unwrap(), rel);
    }
});
