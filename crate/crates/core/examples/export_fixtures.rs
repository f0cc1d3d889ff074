//! Writes the built-in fixtures as files the CLI can read:
//! `<dir>/<name>/{model.json, areas.csv, annotations.json}`.
//!
//!     cargo run --example export_fixtures [dir]
//!     cargo run --bin monoslicer -- analyze --model fixtures/banking/model.json \
//!         --areas fixtures/banking/areas.csv --annotations fixtures/banking/annotations.json

use std::path::PathBuf;

use monoslicer::fixtures::{self, Fixture};

fn main() -> std::io::Result<()> {
    let root = std::env::args()
        .nth(1)
        .map_or_else(|| PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures"), PathBuf::from);
    let all: [(&str, Fixture); 7] = [
        ("toy", fixtures::toy()),
        ("business_actions", fixtures::business_actions()),
        ("service_charges", fixtures::service_charges()),
        ("clients", fixtures::clients()),
        ("banking", fixtures::banking()),
        ("table_mapping", fixtures::table_mapping()),
        ("ordinal_gap", fixtures::ordinal_gap()),
    ];
    for (name, fx) in all {
        let dir = root.join(name);
        std::fs::create_dir_all(&dir)?;
        std::fs::write(dir.join("model.json"), fx.model.to_json() + "\n")?;
        std::fs::write(dir.join("areas.csv"), fx.areas.to_csv())?;
        if let Some(ann) = &fx.annotations {
            std::fs::write(dir.join("annotations.json"), ann.to_json() + "\n")?;
        }
        println!("wrote {}", dir.display());
    }
    Ok(())
}
