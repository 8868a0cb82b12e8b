#![no_main]

use libfuzzer_sys::fuzz_target;
use zeno_ssep::io::parse_record;

fuzz_target!(|data: &[u8]| {
    if let Ok(s) = std::str::from_utf8(data) {
        if let Ok(steps) = parse_record(s) {
            if let Some((_, first)) = steps.first() {
                assert!(steps.iter().all(|(_, x)| x.n_sites() == first.n_sites()));
            }
            assert!(steps.iter().enumerate().all(|(i, (step, _))| *step == i as u64));
        }
    }
});
