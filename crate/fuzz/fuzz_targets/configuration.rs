#![no_main]

use libfuzzer_sys::fuzz_target;
use zeno_ssep::fock::Configuration;

fuzz_target!(|data: &[u8]| {
    if let Ok(s) = std::str::from_utf8(data) {
        if let Ok(x) = s.parse::<Configuration>() {
            // Display and FromStr must round-trip.
            let again: Configuration = x.to_string().parse().expect("rendered configuration reparses");
            assert_eq!(x, again);
            assert!(x.index() < 1 << x.n_sites());
        }
    }
});
