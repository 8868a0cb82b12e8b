#![no_main]

use libfuzzer_sys::fuzz_target;
use zeno_ssep::io::{parse_density, write_density};

fuzz_target!(|data: &[u8]| {
    if let Ok(s) = std::str::from_utf8(data) {
        if let Ok(profile) = parse_density(s) {
            let again = parse_density(&write_density(&profile)).expect("written profile reparses");
            assert_eq!(profile, again);
        }
    }
});
