#![no_main]

use libfuzzer_sys::fuzz_target;
use zeno_ssep::io::parse_potential;

fuzz_target!(|data: &[u8]| {
    if let Ok(s) = std::str::from_utf8(data) {
        if let Ok(v) = parse_potential(s) {
            assert!(!v.is_empty() && v.len() <= zeno_ssep::fock::MAX_SITES);
            assert!(v.iter().all(|x| x.is_finite()));
        }
    }
});
