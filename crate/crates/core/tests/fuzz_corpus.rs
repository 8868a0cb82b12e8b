//! Replays the checked-in fuzz seeds through the parsers with the same
//! invariants the fuzz targets assert.

use std::fs;
use std::path::PathBuf;

use zeno_ssep::fock::{Configuration, MAX_SITES};
use zeno_ssep::io;

fn seeds(target: &str) -> Vec<(String, String)> {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fuzz/corpus").join(target);
    let mut out: Vec<(String, String)> = fs::read_dir(&dir)
        .unwrap_or_else(|e| panic!("{}: {e}", dir.display()))
        .map(|entry| {
            let path = entry.unwrap().path();
            let name = path.file_name().unwrap().to_string_lossy().into_owned();
            (name, fs::read_to_string(&path).unwrap())
        })
        .collect();
    out.sort();
    assert!(!out.is_empty(), "no seeds for {target}");
    out
}

#[test]
fn configuration_seeds() {
    let mut accepted = 0;
    for (name, text) in seeds("configuration") {
        if let Ok(x) = text.parse::<Configuration>() {
            assert_eq!(x.to_string().parse::<Configuration>().unwrap(), x, "{name}");
            accepted += 1;
        }
    }
    assert_eq!(accepted, 4);
    assert!("10a1".parse::<Configuration>().is_err());
}

#[test]
fn distribution_seeds() {
    for (name, text) in seeds("distribution") {
        match io::parse_distribution(&text) {
            Ok(q) => {
                assert!(!matches!(name.as_str(), "duplicate" | "mixed_sites"), "{name} should be rejected");
                let again = io::parse_distribution(&io::write_distribution(&q)).unwrap();
                assert_eq!(q, again, "{name}");
            }
            Err(_) => assert!(matches!(name.as_str(), "duplicate" | "mixed_sites"), "{name} should parse"),
        }
    }
}

#[test]
fn potential_seeds() {
    for (name, text) in seeds("potential") {
        match io::parse_potential(&text) {
            Ok(v) => assert!(!v.is_empty() && v.len() <= MAX_SITES && v.iter().all(|x| x.is_finite()), "{name}"),
            Err(_) => assert_eq!(name, "infinite"),
        }
    }
}

#[test]
fn key_value_seeds() {
    for (name, text) in seeds("key_values") {
        let parsed = io::parse_key_values(&text);
        match name.as_str() {
            "malformed" => assert!(parsed.is_err()),
            "override" => assert_eq!(parsed.unwrap()["n"], "5"),
            _ => assert_eq!(parsed.unwrap()["m"], "4,8,16,32,64"),
        }
    }
}

#[test]
fn record_seeds() {
    for (name, text) in seeds("record") {
        match io::parse_record(&text) {
            Ok(steps) => {
                let n = steps[0].1.n_sites();
                assert!(steps.iter().all(|(_, x)| x.n_sites() == n), "{name}");
                assert!(steps.iter().enumerate().all(|(i, (s, _))| *s == i as u64), "{name}");
            }
            Err(_) => assert!(matches!(name.as_str(), "mixed_sites" | "skipped_step"), "{name} should parse"),
        }
    }
}

#[test]
fn density_seeds() {
    for (name, text) in seeds("density") {
        match io::parse_density(&text) {
            Ok(profile) => assert_eq!(io::parse_density(&io::write_density(&profile)).unwrap(), profile, "{name}"),
            Err(_) => assert_eq!(name, "gap"),
        }
    }
}
