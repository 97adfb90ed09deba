//! Aura extent, Ω fields and far-field Ω profiles.
//!
//! The aura is the bounded region around the fixed objects where the
//! drifter takes part in the grouping. Outside it the drifter is split off
//! from every fixed object at the root.

use crate::error::{Error, Result};
use crate::ia::UpdateRule;
use crate::numeric::{linear_fit, log_spaced, LinearFit};
use crate::parallel::map_indexed;
use crate::probe::{Classify, DrifterProbe, PointRecord};
use crate::scanner::{bisect, LabelField, RefineOptions};
use crate::signature::Signature;

/// All `3^dim - 1` directions with components in `{-1, 0, 1}`, normalized.
/// For three dimensions these are the 6 axis, 12 edge and 8 corner directions.
pub fn lattice_directions(dim: usize) -> Vec<Vec<f64>> {
    let total = 3usize.pow(dim as u32);
    (0..total)
        .filter_map(|mut code| {
            let v: Vec<f64> = (0..dim)
                .map(|_| {
                    let c = (code % 3) as f64 - 1.0;
                    code /= 3;
                    c
                })
                .collect();
            let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
            (n > 0.0).then(|| v.iter().map(|x| x / n).collect())
        })
        .collect()
}

/// `n` roughly uniform directions on the unit sphere (golden-angle spiral).
pub fn fibonacci_directions(n: usize) -> Vec<Vec<f64>> {
    let golden = std::f64::consts::PI * (3.0 - 5f64.sqrt());
    (0..n)
        .map(|i| {
            let z = 1.0 - 2.0 * (i as f64 + 0.5) / n as f64;
            let r = (1.0 - z * z).sqrt();
            let phi = golden * i as f64;
            vec![r * phi.cos(), r * phi.sin(), z]
        })
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AuraOptions {
    /// Multiplicative step of the outward march.
    pub growth: f64,
    /// First march radius, as a fraction of the fixed-object diameter.
    pub start_fraction: f64,
    /// Samples used to confirm the constant outside signature.
    pub tail_samples: usize,
    pub refine: RefineOptions,
    pub workers: usize,
}

impl Default for AuraOptions {
    fn default() -> Self {
        AuraOptions { growth: 1.1, start_fraction: 1e-2, tail_samples: 64, refine: RefineOptions::default(), workers: 1 }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct AuraReport {
    pub center: Vec<f64>,
    pub directions: Vec<Vec<f64>>,
    /// Outermost transition radius per direction.
    pub radii: Vec<f64>,
    pub box_min: Vec<f64>,
    pub box_max: Vec<f64>,
    pub box_edges: Vec<f64>,
    /// Longest bounding-box edge.
    pub cube_edge: f64,
    pub outside_signature: Signature,
    /// Diameter of the fixed-object set.
    pub fo_extent: f64,
    /// `cube_edge / fo_extent`.
    pub ratio: f64,
    /// Longest bounding-box edge of the fixed objects.
    pub fo_box_edge: f64,
    /// `cube_edge / fo_box_edge`.
    pub box_ratio: f64,
}

const MAX_TAIL_PASSES: usize = 8;

struct RayResult {
    radius: f64,
    outside: Signature,
}

/// Marches outward from the fixed-object centroid along each direction and
/// records the radius of the last signature change.
pub fn aura_extent<R: UpdateRule>(
    probe: &DrifterProbe<R>,
    directions: &[Vec<f64>],
    r_max: f64,
    opts: &AuraOptions,
) -> Result<AuraReport> {
    let cfg = probe.config();
    let dim = cfg.dimension();
    if directions.len() < 26 {
        return Err(Error::Precondition(format!("need at least 26 directions, got {}", directions.len())));
    }
    if directions.iter().any(|d| d.len() != dim) {
        return Err(Error::Precondition("direction dimension does not match the objects".into()));
    }
    let fo_extent = cfg.fixed_diameter();
    if !(r_max > fo_extent) {
        return Err(Error::Precondition(format!("r_max = {r_max} must exceed the fixed-object extent {fo_extent}")));
    }
    if !(opts.growth > 1.0) {
        return Err(Error::Precondition("march growth must exceed 1".into()));
    }
    let center = cfg.fixed_centroid();
    let drifter = cfg.drifter_name().to_string();
    let unit: Vec<Vec<f64>> = directions
        .iter()
        .map(|d| {
            let n = d.iter().map(|x| x * x).sum::<f64>().sqrt();
            d.iter().map(|x| x / n).collect()
        })
        .collect();

    let results: Vec<Result<RayResult>> = map_indexed(unit.len(), opts.workers, |k| {
        let u = &unit[k];
        let at = |r: f64| -> PointRecord {
            let off: Vec<f64> = u.iter().map(|x| r * x).collect();
            probe.classify_at(&center, &off)
        };
        let mut radii = Vec::new();
        let mut r = (fo_extent * opts.start_fraction).max(f64::MIN_POSITIVE);
        while r < r_max {
            radii.push(r);
            r *= opts.growth;
        }
        radii.push(r_max);
        let sigs: Vec<Signature> = radii.iter().map(|&r| at(r).signature).collect();
        let last = sigs.len() - 1;
        let outside = sigs[last].clone();
        if !outside.isolates(&drifter) {
            return Err(Error::AuraNotEnclosed { direction: k, radius: r_max });
        }
        // Bisect from the outer sample so the boundary found is the outermost one.
        let outer_edge = |inner: f64, outer: f64, sig_in: Signature, sig_out: Signature| -> f64 {
            let br = bisect(|t| at(-t), -outer, -inner, sig_out, sig_in, opts.refine.tol, opts.refine.max_steps);
            -(br.lo + (br.hi - br.lo) / 2.0)
        };
        let mut radius = match (0..last).rev().find(|&i| sigs[i] != sigs[i + 1]) {
            None => radii[0],
            Some(i) if i + 1 == last => return Err(Error::AuraNotEnclosed { direction: k, radius: radii[i] }),
            Some(i) => outer_edge(radii[i], radii[i + 1], sigs[i].clone(), sigs[i + 1].clone()),
        };
        // The march can step over thin regions; the tail samples push the
        // boundary outward until everything beyond 1.5 R is outside.
        for _ in 0..MAX_TAIL_PASSES {
            let from = 1.5 * radius;
            if from >= r_max {
                return Ok(RayResult { radius, outside });
            }
            let ds = log_spaced(from, r_max, opts.tail_samples.max(2));
            let tail: Vec<Signature> = ds.iter().map(|&d| at(d).signature).collect();
            match (0..ds.len()).rev().find(|&i| tail[i] != outside) {
                None => return Ok(RayResult { radius, outside }),
                Some(i) if i + 1 == ds.len() => return Err(Error::AuraNotEnclosed { direction: k, radius: ds[i] }),
                Some(i) => radius = outer_edge(ds[i], ds[i + 1], tail[i].clone(), outside.clone()),
            }
        }
        Err(Error::AuraNotEnclosed { direction: k, radius })
    });
    let results: Vec<RayResult> = results.into_iter().collect::<Result<_>>()?;

    let outside_signature = results[0].outside.clone();
    if let Some(k) = results.iter().position(|r| r.outside != outside_signature) {
        return Err(Error::Numeric(format!(
            "outside signature differs between directions: {} vs {} (direction #{k})",
            outside_signature, results[k].outside
        )));
    }

    let radii: Vec<f64> = results.iter().map(|r| r.radius).collect();
    let mut box_min = center.clone();
    let mut box_max = center.clone();
    for (u, r) in unit.iter().zip(&radii) {
        for p in 0..dim {
            let x = center[p] + r * u[p];
            box_min[p] = box_min[p].min(x);
            box_max[p] = box_max[p].max(x);
        }
    }
    let box_edges: Vec<f64> = box_max.iter().zip(&box_min).map(|(a, b)| a - b).collect();
    let cube_edge = box_edges.iter().cloned().fold(0.0, f64::max);
    let fo_box_edge = cfg.fixed_box_edge();
    Ok(AuraReport {
        center,
        directions: unit,
        radii,
        box_min,
        box_max,
        box_edges,
        cube_edge,
        outside_signature,
        fo_extent,
        ratio: cube_edge / fo_extent,
        fo_box_edge,
        box_ratio: cube_edge / fo_box_edge,
    })
}

/// The `-ln Ω` channel of a scanned field, in grid order.
pub fn omega_field(field: &LabelField) -> Vec<f64> {
    field.records.iter().map(|r| r.neg_ln_omega).collect()
}

/// Distances above this are clamped in far-field profiles.
pub const MAX_DISTANCE: f64 = 1e12;

#[derive(Clone, Debug, PartialEq)]
pub struct RayProfile {
    pub origin: Vec<f64>,
    pub direction: Vec<f64>,
    pub distances: Vec<f64>,
    pub omega: Vec<f64>,
    pub neg_ln_omega: Vec<f64>,
    pub signatures: Vec<Signature>,
    /// First sample of the trailing run that shares the last sample's signature.
    pub tail_start: usize,
    /// `-ln Ω` against distance over the tail.
    pub linear: Option<LinearFit>,
    /// `-ln Ω` against `ln(distance)` over the tail.
    pub logarithmic: Option<LinearFit>,
    pub notes: Vec<String>,
}

impl RayProfile {
    pub fn tail_signature(&self) -> &Signature {
        &self.signatures[self.tail_start]
    }
}

/// Samples Ω along a ray at log-spaced distances from `origin` (the
/// fixed-object centroid when `None`).
pub fn far_field_profile<R: UpdateRule>(
    probe: &DrifterProbe<R>,
    origin: Option<&[f64]>,
    direction: &[f64],
    d_min: f64,
    d_max: f64,
    samples: usize,
    workers: usize,
) -> Result<RayProfile> {
    let dim = probe.dimension();
    if direction.len() != dim {
        return Err(Error::Precondition("ray direction dimension does not match the objects".into()));
    }
    let n = direction.iter().map(|x| x * x).sum::<f64>().sqrt();
    if !(n > 0.0) || !n.is_finite() {
        return Err(Error::Precondition("ray direction must be a nonzero finite vector".into()));
    }
    if !(d_min > 0.0) || !(d_max / d_min >= 10.0) {
        return Err(Error::Precondition(format!("need 0 < d_min and d_max / d_min >= 10, got {d_min}..{d_max}")));
    }
    if samples < 16 {
        return Err(Error::Precondition(format!("need at least 16 samples, got {samples}")));
    }
    let mut notes = Vec::new();
    let mut d_max = d_max;
    if d_max > MAX_DISTANCE {
        notes.push(format!("d_max {d_max:e} clamped to {MAX_DISTANCE:e}"));
        d_max = MAX_DISTANCE;
    }
    let origin = origin.map(<[f64]>::to_vec).unwrap_or_else(|| probe.config().fixed_centroid());
    let u: Vec<f64> = direction.iter().map(|x| x / n).collect();
    let distances = log_spaced(d_min, d_max, samples);
    let records = map_indexed(samples, workers, |i| {
        let off: Vec<f64> = u.iter().map(|x| distances[i] * x).collect();
        probe.classify_at(&origin, &off)
    });
    let signatures: Vec<Signature> = records.iter().map(|r| r.signature.clone()).collect();
    let last = &signatures[samples - 1];
    let tail_start = (0..samples).rev().take_while(|&i| &signatures[i] == last).last().unwrap_or(samples - 1);
    let omega: Vec<f64> = records.iter().map(|r| r.omega).collect();
    let neg_ln_omega: Vec<f64> = records.iter().map(|r| r.neg_ln_omega).collect();
    if omega.iter().any(|&w| w <= f64::MIN_POSITIVE) {
        notes.push("Ω underflowed to the smallest positive double at some samples".into());
    }
    let tail_d = &distances[tail_start..];
    let tail_y = &neg_ln_omega[tail_start..];
    let linear = linear_fit(tail_d, tail_y);
    let ln_d: Vec<f64> = tail_d.iter().map(|d| d.ln()).collect();
    let logarithmic = linear_fit(&ln_d, tail_y);
    Ok(RayProfile { origin, direction: u, distances, omega, neg_ln_omega, signatures, tail_start, linear, logarithmic, notes })
}
