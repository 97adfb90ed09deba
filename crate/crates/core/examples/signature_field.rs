//! Scan the drifter over a plane next to two fixed objects and save the
//! labels as CSV and as a PPM picture.

use std::collections::BTreeMap;

use hsmor::output::{write_label_csv, write_ppm};
use hsmor::{scan, IaSettings, MetricSpec, Object, ObjectConfig, ScanGrid};

fn main() -> hsmor::Result<()> {
    let cfg = ObjectConfig::with_fixed(
        vec![Object::new("A", [1.0, 1.0, 0.0]), Object::new("B", [0.0, 0.0, 1.0])],
        vec![0.0; 3],
    )?;
    let grid = ScanGrid::xy_plane(0.5, -3.0, 4.0, 256);
    let workers = hsmor::parallel::default_workers();
    let field = scan(&cfg, &MetricSpec::euclidean(), &grid, &IaSettings::default(), workers)?;

    let mut counts = BTreeMap::new();
    for r in &field.records {
        *counts.entry(r.signature.as_str().to_string()).or_insert(0usize) += 1;
    }
    for (sig, n) in &counts {
        println!("{sig:>10}: {n:>6} points");
    }

    let dir = std::env::temp_dir().join("hsmor-signature-field");
    std::fs::create_dir_all(&dir)?;
    write_label_csv(&field, dir.join("labels.csv"))?;
    write_ppm(&field, dir.join("field.ppm"))?;
    println!("wrote {}", dir.display());
    Ok(())
}
