#![no_main]

use elliptic_order::wire::parse_real_list;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(xs) = parse_real_list(text) {
        assert!(xs.iter().all(|x| x.is_finite()));
        let joined: Vec<String> = xs.iter().map(|x| format!("{x:e}")).collect();
        assert_eq!(parse_real_list(&joined.join(",")).unwrap(), xs);
    }
});
