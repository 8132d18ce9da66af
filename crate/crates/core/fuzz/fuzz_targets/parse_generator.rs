#![no_main]

use elliptic_order::wire::{parse_generator, to_json};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(g) = parse_generator(text) {
        let json = to_json(&g).expect("serializable");
        assert_eq!(parse_generator(&json).expect("re-parses"), g);
        for n in 1..4 {
            assert!(g.second_moment(n).is_finite());
        }
    }
});
