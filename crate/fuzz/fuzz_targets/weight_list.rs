#![no_main]

use davlab_core::parse::parse_weight_list;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Some((&n, rest)) = data.split_first() else {
        return;
    };
    let Ok(text) = std::str::from_utf8(rest) else {
        return;
    };
    if let Ok(weights) = parse_weight_list(text, n as u64) {
        assert!(!weights.is_empty());
        assert!(weights.iter().all(|w| w >= 1 && w < n as u64));
    }
});
