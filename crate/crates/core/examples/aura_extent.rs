//! Aura size around two fixed objects for each metric.

use hsmor::{aura_extent, lattice_directions, AuraOptions, DrifterProbe, IaSettings, MetricSpec, Object, ObjectConfig};

fn main() -> hsmor::Result<()> {
    let cfg = ObjectConfig::with_fixed(
        vec![Object::new("A", [1.0, 1.0, 0.0]), Object::new("B", [0.0, 0.0, 1.0])],
        vec![0.0; 3],
    )?;
    let opts = AuraOptions { workers: hsmor::parallel::default_workers(), ..AuraOptions::default() };
    for spec in [MetricSpec::euclidean(), MetricSpec::city_block(), MetricSpec::xr(1.5)] {
        let probe = DrifterProbe::new(cfg.clone(), spec, IaSettings::default())?;
        let t = std::time::Instant::now();
        let rep = aura_extent(&probe, &lattice_directions(3), 100.0, &opts)?;
        println!(
            "{:>3}: outside {:<8} cube edge {:.4}  ratio {:.3}  box ratio {:.3}  ({:.2?})",
            spec.kind,
            rep.outside_signature.as_str(),
            rep.cube_edge,
            rep.ratio,
            rep.box_ratio,
            t.elapsed()
        );
    }
    Ok(())
}
