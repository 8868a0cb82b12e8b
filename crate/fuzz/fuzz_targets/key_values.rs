#![no_main]

use libfuzzer_sys::fuzz_target;
use zeno_ssep::io::parse_key_values;

fuzz_target!(|data: &[u8]| {
    if let Ok(s) = std::str::from_utf8(data) {
        // Malformed lines must come back as errors, never panics.
        let _ = parse_key_values(s);
    }
});
