//! Eight fixed objects on the corners of the unit cube, scanned at mid
//! height with the XR metric.

use std::collections::BTreeMap;

use hsmor::output::write_ppm;
use hsmor::{scan, IaSettings, MetricSpec, Object, ObjectConfig, ScanGrid};

fn main() -> hsmor::Result<()> {
    let corners = [
        ("A", [0.0, 0.0, 0.0]),
        ("B", [1.0, 0.0, 0.0]),
        ("C", [1.0, 1.0, 0.0]),
        ("D", [0.0, 1.0, 0.0]),
        ("E", [0.0, 0.0, 1.0]),
        ("F", [1.0, 0.0, 1.0]),
        ("G", [1.0, 1.0, 1.0]),
        ("H", [0.0, 1.0, 1.0]),
    ];
    let fixed = corners.iter().map(|(n, c)| Object::new(*n, *c)).collect();
    let cfg = ObjectConfig::with_fixed(fixed, vec![0.5; 3])?;
    let grid = ScanGrid::xy_plane(0.5, -1.5, 2.5, 128);
    let field = scan(&cfg, &MetricSpec::xr(1.5), &grid, &IaSettings::default(), hsmor::parallel::default_workers())?;

    let mut roots: BTreeMap<String, usize> = BTreeMap::new();
    for r in &field.records {
        let root = match r.signature.root_sides() {
            Some((a, b)) => format!("{a} - {b}"),
            None => r.signature.to_string(),
        };
        *roots.entry(root).or_default() += 1;
    }
    let degenerate = field.records.iter().filter(|r| r.degenerate).count();
    println!("{} distinct signatures, {degenerate} points with a tie somewhere in the tree", roots.len());
    for (sig, n) in roots.iter().filter(|(s, _)| !s.starts_with('⊥')) {
        println!("{n:>6}  {sig}");
    }
    let out = std::env::temp_dir().join("hsmor-cube-corners.ppm");
    write_ppm(&field, &out)?;
    println!("wrote {}", out.display());
    Ok(())
}
