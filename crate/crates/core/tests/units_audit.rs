//! Physical constants must be defined once, in `units.rs`.

use std::fs;
use std::path::Path;

/// Leading digits of the SI constants and of the derived values the crate
/// uses (h, ħ, e, k_B, u, μ_B, μ_B/h, k_B in meV/K, h in μeV/GHz).
const FINGERPRINTS: &[&str] = &[
    "6.62607", "6.626_07", "1.05457", "1.054_57", "1.60217", "1.602_17", "1.38064", "1.380_64", "1.66053",
    "1.660_53", "9.27401", "9.274_01", "13.9962", "13.996", "0.086173", "0.08617", "4.13566", "4.135_66",
    "0.24179", "2.00231",
];

fn scan(dir: &Path, hits: &mut Vec<String>) {
    for entry in fs::read_dir(dir).unwrap() {
        let path = entry.unwrap().path();
        if path.is_dir() {
            scan(&path, hits);
        } else if path.extension().is_some_and(|e| e == "rs") && !path.ends_with("units.rs") {
            let text = fs::read_to_string(&path).unwrap();
            for (no, line) in text.lines().enumerate() {
                let code = line.split("//").next().unwrap_or("");
                for f in FINGERPRINTS {
                    if code.contains(f) {
                        hits.push(format!("{}:{}: {}", path.display(), no + 1, line.trim()));
                    }
                }
            }
        }
    }
}

#[test]
fn constants_have_a_single_definition() {
    let crates = Path::new(env!("CARGO_MANIFEST_DIR")).parent().unwrap();
    let mut hits = Vec::new();
    for member in fs::read_dir(crates).unwrap() {
        let src = member.unwrap().path().join("src");
        if src.is_dir() {
            scan(&src, &mut hits);
        }
    }
    assert!(hits.is_empty(), "physical constants outside units.rs:\n{}", hits.join("\n"));
}

#[test]
fn units_file_holds_the_definitions() {
    let text = fs::read_to_string(Path::new(env!("CARGO_MANIFEST_DIR")).join("src/units.rs")).unwrap();
    for f in ["6.626_070_15", "1.602_176_634", "1.380_649", "9.274_010_078_3", "1.054_571_817"] {
        assert!(text.contains(f), "{f}");
    }
}
