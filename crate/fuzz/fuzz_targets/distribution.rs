#![no_main]

use libfuzzer_sys::fuzz_target;
use zeno_ssep::io::{parse_distribution, write_distribution};

fuzz_target!(|data: &[u8]| {
    if let Ok(s) = std::str::from_utf8(data) {
        if let Ok(q) = parse_distribution(s) {
            let sum: f64 = q.iter().map(|(_, p)| p).sum();
            assert!((sum - 1.0).abs() <= 1e-12);
            assert!(q.iter().all(|(_, p)| p >= 0.0));

            let again = parse_distribution(&write_distribution(&q)).expect("written distribution reparses");
            assert_eq!(q, again);
        }
    }
});
