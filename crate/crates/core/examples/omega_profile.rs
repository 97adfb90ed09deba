//! How the intergroup similarity Ω falls off far from the fixed objects.
//! Under XR, -ln Ω grows linearly with distance; under the Euclidean metric
//! it grows like a logarithm.

use hsmor::{far_field_profile, DrifterProbe, IaSettings, MetricSpec, Object, ObjectConfig};

fn main() -> hsmor::Result<()> {
    let cfg = ObjectConfig::with_fixed(
        vec![Object::new("A", [1.0, 1.0, 0.0]), Object::new("B", [0.0, 0.0, 1.0])],
        vec![0.0; 3],
    )?;
    let fo = cfg.fixed_diameter();
    for spec in [MetricSpec::xr(1.5), MetricSpec::euclidean(), MetricSpec::city_block()] {
        let probe = DrifterProbe::new(cfg.clone(), spec, IaSettings::default())?;
        let p = far_field_profile(&probe, None, &[1.0, 0.3, -0.2], 10.0 * fo, 1e3 * fo, 64, 1)?;
        let lin = p.linear.map_or(f64::NAN, |f| f.r_squared);
        let log = p.logarithmic.map_or(f64::NAN, |f| f.r_squared);
        println!("{:>3}: tail {}  R² linear {lin:.6}  R² vs ln d {log:.6}", spec.kind, p.tail_signature());
        for i in (0..p.distances.len()).step_by(16) {
            println!("      d = {:>10.3}  -ln Ω = {:.6}", p.distances[i], p.neg_ln_omega[i]);
        }
    }
    Ok(())
}
