//! Drifter paths and the membrane crossings along them.

use crate::error::{Error, Result};
use crate::parallel::map_indexed;
use crate::probe::{Classify, PointRecord};
use crate::scanner::{bisect, RefineOptions};
use crate::signature::Signature;

/// Dense re-check factor applied on top of the nominal sampling.
const DENSE_FACTOR: usize = 4;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PathKind {
    Segment,
    Polyline,
}

#[derive(Clone, Debug, PartialEq)]
pub struct PathSpec {
    pub kind: PathKind,
    pub waypoints: Vec<Vec<f64>>,
    pub samples_per_unit: f64,
}

impl PathSpec {
    pub fn segment(a: Vec<f64>, b: Vec<f64>, samples_per_unit: f64) -> Result<Self> {
        PathSpec::build(PathKind::Segment, vec![a, b], samples_per_unit)
    }

    pub fn polyline(waypoints: Vec<Vec<f64>>, samples_per_unit: f64) -> Result<Self> {
        PathSpec::build(PathKind::Polyline, waypoints, samples_per_unit)
    }

    fn build(kind: PathKind, waypoints: Vec<Vec<f64>>, samples_per_unit: f64) -> Result<Self> {
        if waypoints.len() < 2 {
            return Err(Error::Precondition("a path needs at least two waypoints".into()));
        }
        if kind == PathKind::Segment && waypoints.len() != 2 {
            return Err(Error::Precondition("a segment has exactly two waypoints".into()));
        }
        let dim = waypoints[0].len();
        if dim == 0 || waypoints.iter().any(|w| w.len() != dim) {
            return Err(Error::Precondition("waypoints must share a nonzero dimension".into()));
        }
        if waypoints.iter().flatten().any(|x| !x.is_finite()) {
            return Err(Error::Precondition("waypoint coordinates must be finite".into()));
        }
        if let Some(k) = waypoints.windows(2).position(|w| w[0] == w[1]) {
            return Err(Error::Precondition(format!("waypoints {k} and {} coincide", k + 1)));
        }
        if !(samples_per_unit > 0.0) || !samples_per_unit.is_finite() {
            return Err(Error::Precondition("samples per unit length must be positive".into()));
        }
        Ok(PathSpec { kind, waypoints, samples_per_unit })
    }

    pub fn dimension(&self) -> usize {
        self.waypoints[0].len()
    }

    /// The same path walked backwards.
    pub fn reversed(&self) -> PathSpec {
        let mut waypoints = self.waypoints.clone();
        waypoints.reverse();
        PathSpec { waypoints, ..self.clone() }
    }

    /// Cumulative arc length at each waypoint.
    fn cumulative(&self) -> Vec<f64> {
        let mut acc = vec![0.0];
        for w in self.waypoints.windows(2) {
            let d = w[0].iter().zip(&w[1]).map(|(a, b)| (b - a) * (b - a)).sum::<f64>().sqrt();
            acc.push(acc.last().unwrap() + d);
        }
        acc
    }

    pub fn length(&self) -> f64 {
        *self.cumulative().last().unwrap()
    }

    /// Offset from the first waypoint at arc-length fraction `t`.
    fn offset_with(&self, cum: &[f64], t: f64) -> Vec<f64> {
        let total = cum[cum.len() - 1];
        let s = t.clamp(0.0, 1.0) * total;
        let k = (1..cum.len()).find(|&k| s <= cum[k]).unwrap_or(cum.len() - 1);
        let local = (s - cum[k - 1]) / (cum[k] - cum[k - 1]);
        let w0 = &self.waypoints[0];
        let (a, b) = (&self.waypoints[k - 1], &self.waypoints[k]);
        (0..w0.len()).map(|p| (a[p] - w0[p]) + local * (b[p] - a[p])).collect()
    }

    /// Absolute position at arc-length fraction `t`.
    pub fn position(&self, t: f64) -> Vec<f64> {
        let off = self.offset_with(&self.cumulative(), t);
        self.waypoints[0].iter().zip(off).map(|(a, o)| a + o).collect()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CrossingEvent {
    /// Arc-length fraction in `[0, 1]`.
    pub t: f64,
    pub position: Vec<f64>,
    pub before: Signature,
    pub after: Signature,
    /// Length of the final bracket along the path.
    pub width: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct PathTrace {
    pub events: Vec<CrossingEvent>,
    /// Number of nominal samples.
    pub samples: usize,
    /// Crossings found only by the dense re-check.
    pub dense_only: usize,
    pub start_signature: Signature,
    pub end_signature: Signature,
}

/// Samples the path, then refines every signature change by bisection.
pub fn trace_path<C: Classify + ?Sized>(classifier: &C, path: &PathSpec, refine: &RefineOptions, workers: usize) -> Result<PathTrace> {
    let cum = path.cumulative();
    let total = cum[cum.len() - 1];
    let origin = &path.waypoints[0];
    let at = |t: f64| -> PointRecord { classifier.classify_at(origin, &path.offset_with(&cum, t)) };

    let samples = ((total * path.samples_per_unit).ceil() as usize + 1).max(2);
    let intervals = (samples - 1) * DENSE_FACTOR;
    let ts: Vec<f64> = (0..=intervals).map(|i| i as f64 / intervals as f64).collect();
    let sigs: Vec<Signature> = map_indexed(ts.len(), workers, |i| at(ts[i]).signature);

    let coarse_changes = (0..samples - 1)
        .filter(|&i| sigs[i * DENSE_FACTOR] != sigs[(i + 1) * DENSE_FACTOR])
        .count();
    let stop = refine.tol / total;
    let mut events = Vec::new();
    for k in 0..intervals {
        if sigs[k] == sigs[k + 1] {
            continue;
        }
        let (mut lo, mut sig_lo) = (ts[k], sigs[k].clone());
        while sig_lo != sigs[k + 1] {
            let br = bisect(at, lo, ts[k + 1], sig_lo.clone(), sigs[k + 1].clone(), stop, refine.max_steps);
            let t = br.lo + (br.hi - br.lo) / 2.0;
            events.push(CrossingEvent {
                t,
                position: path.position(t),
                before: br.sig_lo,
                after: br.sig_hi.clone(),
                width: (br.hi - br.lo) * total,
            });
            if br.hi >= ts[k + 1] {
                break;
            }
            lo = br.hi;
            sig_lo = br.sig_hi;
        }
    }
    let dense_only = events.len().saturating_sub(coarse_changes);
    Ok(PathTrace {
        events,
        samples,
        dense_only,
        start_signature: sigs[0].clone(),
        end_signature: sigs[intervals].clone(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::probe::LabelRule;

    fn half() -> LabelRule<impl Fn(&[f64]) -> PointRecord + Sync> {
        LabelRule(|p: &[f64]| PointRecord::labelled(if p[0] < 0.5 { "L" } else { "R" }))
    }

    #[test]
    fn single_crossing_at_half() {
        let path = PathSpec::segment(vec![0.0; 3], vec![1.0, 0.0, 0.0], 10.0).unwrap();
        let tr = trace_path(&half(), &path, &RefineOptions::default(), 1).unwrap();
        assert_eq!(tr.events.len(), 1);
        let e = &tr.events[0];
        assert!((e.t - 0.5).abs() <= 1e-12);
        assert_eq!((e.before.as_str(), e.after.as_str()), ("L", "R"));
    }

    #[test]
    fn reversal_mirrors_parameters() {
        let path = PathSpec::polyline(vec![vec![0.0, 0.0], vec![0.7, 0.2], vec![0.3, 1.0]], 7.0).unwrap();
        let fwd = trace_path(&half(), &path, &RefineOptions::default(), 1).unwrap();
        let back = trace_path(&half(), &path.reversed(), &RefineOptions::default(), 1).unwrap();
        assert_eq!(fwd.events.len(), 2);
        assert_eq!(back.events.len(), 2);
        for (a, b) in fwd.events.iter().zip(back.events.iter().rev()) {
            assert!((a.t - (1.0 - b.t)).abs() < 1e-10);
        }
    }

    #[test]
    fn thin_band_between_samples() {
        // A band narrower than the nominal spacing but wider than the dense one.
        let rule = LabelRule(|p: &[f64]| {
            PointRecord::labelled(if (0.51..0.535).contains(&p[0]) { "band" } else { "out" })
        });
        let path = PathSpec::segment(vec![0.0], vec![1.0], 10.0).unwrap();
        let tr = trace_path(&rule, &path, &RefineOptions::default(), 1).unwrap();
        assert_eq!(tr.events.len(), 2);
        assert_eq!(tr.dense_only, 2);
        assert!((tr.events[0].t - 0.51).abs() < 1e-12);
        assert!((tr.events[1].t - 0.535).abs() < 1e-12);
    }

    #[test]
    fn invalid_paths() {
        assert!(PathSpec::segment(vec![0.0], vec![0.0], 1.0).is_err());
        assert!(PathSpec::polyline(vec![vec![0.0]], 1.0).is_err());
        assert!(PathSpec::segment(vec![0.0], vec![1.0, 0.0], 1.0).is_err());
        assert!(PathSpec::segment(vec![0.0], vec![1.0], 0.0).is_err());
    }
}
