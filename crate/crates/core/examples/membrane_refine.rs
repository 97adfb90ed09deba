//! Find the transitions of a coarse scan, pin each one down by bisection and
//! check that no intermediate layer hides between the two sides.

use hsmor::scanner::refine_transitions;
use hsmor::{
    detect_transitions, measure_ima_thickness, scan, DrifterProbe, IaSettings, MetricSpec, Object, ObjectConfig, ScanGrid,
};
use hsmor::scanner::RefineOptions;

fn main() -> hsmor::Result<()> {
    let cfg = ObjectConfig::with_fixed(
        vec![Object::new("A", [1.0, 1.0, 0.0]), Object::new("B", [0.0, 0.0, 1.0])],
        vec![0.0; 3],
    )?;
    let spec = MetricSpec::euclidean();
    let grid = ScanGrid::xy_plane(0.5, -3.0, 4.0, 48);
    let field = scan(&cfg, &spec, &grid, &IaSettings::default(), 1)?;
    let edges = detect_transitions(&field);
    let probe = DrifterProbe::new(cfg, spec, IaSettings::default())?;
    let points = refine_transitions(&probe, &field, &edges, &RefineOptions::default(), 1)?;

    let spacing = 7.0 / 47.0;
    let mut widest = 0.0f64;
    let mut thickest = 0.0f64;
    for (e, p) in edges.iter().zip(&points) {
        let mut dir = vec![0.0; 3];
        dir[grid.free[e.axis].axis] = 1.0;
        widest = widest.max(p.width);
        thickest = thickest.max(measure_ima_thickness(&probe, p, &dir, spacing * 1e-3));
    }
    println!("{} transitions refined", points.len());
    println!("widest final bracket: {widest:e}");
    println!("thickest intermediate layer: {thickest:e}");
    for p in points.iter().take(5) {
        println!("  ({:+.12}, {:+.12})  {} | {}", p.position[0], p.position[1], p.sig_a, p.sig_b);
    }
    Ok(())
}
