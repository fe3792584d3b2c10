#![no_main]

use davlab_core::parse::{parse_k_spec, parse_prime_spec};
use davlab_core::zmod::is_prime;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(primes) = parse_prime_spec(text) {
        assert!(primes.iter().all(|&p| is_prime(p)));
        assert!(primes.windows(2).all(|w| w[0] < w[1]));
    }
    if let Ok(ks) = parse_k_spec(text) {
        assert!(ks.iter().all(|&k| k >= 1));
    }
});
