//! Walk the drifter along a polyline and list every membrane it crosses.

use hsmor::scanner::RefineOptions;
use hsmor::{trace_path, DrifterProbe, IaSettings, MetricSpec, Object, ObjectConfig, PathSpec};

fn main() -> hsmor::Result<()> {
    let cfg = ObjectConfig::with_fixed(
        vec![Object::new("A", [1.0, 1.0, 0.0]), Object::new("B", [0.0, 0.0, 1.0])],
        vec![0.0; 3],
    )?;
    let probe = DrifterProbe::new(cfg, MetricSpec::euclidean(), IaSettings::default())?;
    let path = PathSpec::polyline(vec![vec![-5.0, 0.4, 0.5], vec![1.2, 0.9, 0.5], vec![1.0, 6.0, 0.5]], 20.0)?;
    let trace = trace_path(&probe, &path, &RefineOptions::default(), 1)?;
    println!("start in {}, end in {}", trace.start_signature, trace.end_signature);
    for e in &trace.events {
        println!(
            "t = {:.12}  at ({:+.6}, {:+.6}, {:+.6})  {} -> {}",
            e.t, e.position[0], e.position[1], e.position[2], e.before, e.after
        );
    }
    Ok(())
}
