//! Grid scans of the drifter field, transition detection and membrane refinement.

use crate::error::{Error, Result};
use crate::ia::IaSettings;
use crate::metric::{MetricSpec, ObjectConfig};
use crate::parallel::map_indexed;
use crate::probe::{Classify, DrifterProbe, PointRecord};
use crate::signature::Signature;

pub const DEFAULT_BUDGET: usize = 1 << 24;

/// One free axis of a scan grid.
#[derive(Clone, Debug, PartialEq)]
pub struct AxisRange {
    pub axis: usize,
    pub min: f64,
    pub max: f64,
    pub steps: usize,
}

impl AxisRange {
    pub fn new(axis: usize, min: f64, max: f64, steps: usize) -> Self {
        AxisRange { axis, min, max, steps }
    }

    /// Offset of sample `i` from `min`: `i * (max - min) / (steps - 1)`.
    ///
    /// Doubling the number of intervals reproduces every coarse offset bit
    /// for bit, so nested grids share their common points exactly.
    pub fn offset(&self, i: usize) -> f64 {
        (i as f64 * (self.max - self.min)) / (self.steps - 1) as f64
    }

    pub fn coordinate(&self, i: usize) -> f64 {
        self.min + self.offset(i)
    }
}

/// Axis-aligned sampling grid. Axes not listed as free are held at a fixed value.
#[derive(Clone, Debug, PartialEq)]
pub struct ScanGrid {
    pub free: Vec<AxisRange>,
    pub fixed: Vec<(usize, f64)>,
    pub budget: usize,
}

impl ScanGrid {
    pub fn new(free: Vec<AxisRange>, fixed: Vec<(usize, f64)>) -> Self {
        ScanGrid { free, fixed, budget: DEFAULT_BUDGET }
    }

    /// Two free axes.
    pub fn plane(u: AxisRange, v: AxisRange, fixed: Vec<(usize, f64)>) -> Self {
        Self::new(vec![u, v], fixed)
    }

    /// Square plane over the first two axes with the third held at `z`.
    pub fn xy_plane(z: f64, min: f64, max: f64, steps: usize) -> Self {
        Self::plane(AxisRange::new(0, min, max, steps), AxisRange::new(1, min, max, steps), vec![(2, z)])
    }

    pub fn dimension(&self) -> usize {
        self.free.len() + self.fixed.len()
    }

    pub fn is_plane(&self) -> bool {
        self.free.len() == 2
    }

    pub fn shape(&self) -> Vec<usize> {
        self.free.iter().map(|a| a.steps).collect()
    }

    /// Number of samples, or `None` on overflow.
    pub fn samples(&self) -> Option<usize> {
        self.free.iter().try_fold(1usize, |acc, a| acc.checked_mul(a.steps))
    }

    pub fn validate(&self, dim: usize) -> Result<()> {
        if self.free.is_empty() {
            return Err(Error::Config("scan grid needs at least one free axis".into()));
        }
        let mut seen = vec![false; dim];
        let axes = self.free.iter().map(|a| a.axis).chain(self.fixed.iter().map(|f| f.0));
        for axis in axes {
            if axis >= dim {
                return Err(Error::Config(format!("axis {axis} out of range for dimension {dim}")));
            }
            if std::mem::replace(&mut seen[axis], true) {
                return Err(Error::Config(format!("axis {axis} is listed twice")));
            }
        }
        if let Some(axis) = seen.iter().position(|s| !s) {
            return Err(Error::Config(format!("axis {axis} is neither free nor fixed")));
        }
        for a in &self.free {
            if !(a.min < a.max) || !a.min.is_finite() || !a.max.is_finite() {
                return Err(Error::Config(format!("axis {}: need finite min < max, got {}..{}", a.axis, a.min, a.max)));
            }
            if a.steps < 2 {
                return Err(Error::Config(format!("axis {}: need at least 2 steps, got {}", a.axis, a.steps)));
            }
        }
        if self.fixed.iter().any(|(_, v)| !v.is_finite()) {
            return Err(Error::Config("fixed axis values must be finite".into()));
        }
        match self.samples() {
            Some(n) if n <= self.budget => Ok(()),
            n => Err(Error::Budget { requested: n.unwrap_or(usize::MAX), budget: self.budget }),
        }
    }

    /// Grid corner: free axes at `min`, fixed axes at their value.
    pub fn origin(&self) -> Vec<f64> {
        let mut o = vec![0.0; self.dimension()];
        for a in &self.free {
            o[a.axis] = a.min;
        }
        for &(axis, v) in &self.fixed {
            o[axis] = v;
        }
        o
    }

    /// Per-free-axis sample indices of a flat index; the first free axis varies fastest.
    pub fn unflatten(&self, mut idx: usize) -> Vec<usize> {
        self.free
            .iter()
            .map(|a| {
                let i = idx % a.steps;
                idx /= a.steps;
                i
            })
            .collect()
    }

    pub fn flatten(&self, ijk: &[usize]) -> usize {
        let mut idx = 0;
        for (a, &i) in self.free.iter().zip(ijk).rev() {
            idx = idx * a.steps + i;
        }
        idx
    }

    pub fn offset(&self, idx: usize) -> Vec<f64> {
        let mut off = vec![0.0; self.dimension()];
        for (a, i) in self.free.iter().zip(self.unflatten(idx)) {
            off[a.axis] = a.offset(i);
        }
        off
    }

    pub fn position(&self, idx: usize) -> Vec<f64> {
        self.origin().iter().zip(self.offset(idx)).map(|(o, d)| o + d).collect()
    }
}

/// Scan output: one record per grid point, in flat index order.
#[derive(Clone, Debug, PartialEq)]
pub struct LabelField {
    pub grid: ScanGrid,
    pub records: Vec<PointRecord>,
}

impl LabelField {
    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn at(&self, ijk: &[usize]) -> &PointRecord {
        &self.records[self.grid.flatten(ijk)]
    }

    pub fn position(&self, idx: usize) -> Vec<f64> {
        self.grid.position(idx)
    }

    /// Distinct signatures, sorted.
    pub fn signatures(&self) -> Vec<Signature> {
        let mut s: Vec<Signature> = self.records.iter().map(|r| r.signature.clone()).collect();
        s.sort();
        s.dedup();
        s
    }
}

pub fn scan(cfg: &ObjectConfig, spec: &MetricSpec, grid: &ScanGrid, ia: &IaSettings, workers: usize) -> Result<LabelField> {
    let probe = DrifterProbe::new(cfg.clone(), *spec, *ia)?;
    scan_with(&probe, grid, cfg.dimension(), workers)
}

/// Classifies every grid point. Points are evaluated as grid origin plus offset.
pub fn scan_with<C: Classify + ?Sized>(classifier: &C, grid: &ScanGrid, dim: usize, workers: usize) -> Result<LabelField> {
    grid.validate(dim)?;
    let origin = grid.origin();
    let n = grid.samples().unwrap_or(0);
    let records = map_indexed(n, workers, |idx| classifier.classify_at(&origin, &grid.offset(idx)));
    Ok(LabelField { grid: grid.clone(), records })
}

/// Neighboring grid points with different signatures.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TransitionEdge {
    pub from: usize,
    pub to: usize,
    /// Index into the grid's free axes.
    pub axis: usize,
}

/// Every axis-aligned neighbor pair with unequal signatures, once, in flat
/// index order of the lower point.
pub fn detect_transitions(field: &LabelField) -> Vec<TransitionEdge> {
    let grid = &field.grid;
    let mut strides = Vec::with_capacity(grid.free.len());
    let mut s = 1;
    for a in &grid.free {
        strides.push(s);
        s *= a.steps;
    }
    let mut out = Vec::new();
    for idx in 0..field.records.len() {
        let ijk = grid.unflatten(idx);
        for (axis, a) in grid.free.iter().enumerate() {
            if ijk[axis] + 1 < a.steps {
                let to = idx + strides[axis];
                if field.records[idx].signature != field.records[to].signature {
                    out.push(TransitionEdge { from: idx, to, axis });
                }
            }
        }
    }
    out
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RefineOptions {
    /// Target bracket length in coordinate units.
    pub tol: f64,
    pub max_steps: usize,
}

impl Default for RefineOptions {
    fn default() -> Self {
        RefineOptions { tol: 1e-12, max_steps: 60 }
    }
}

/// A refined transition point.
#[derive(Clone, Debug, PartialEq)]
pub struct MembranePoint {
    pub position: Vec<f64>,
    pub sig_a: Signature,
    pub sig_b: Signature,
    /// Bracket length reached, in coordinate units.
    pub width: f64,
}

/// Final bracket of a scalar bisection.
#[derive(Clone, Debug)]
pub(crate) struct Bracket {
    pub lo: f64,
    pub hi: f64,
    pub sig_lo: Signature,
    pub sig_hi: Signature,
}

/// Bisects `[lo, hi]` on "same signature as `lo`". When a third signature
/// shows up the lower half is kept, so the boundary found is the one
/// nearest to `lo`. `stop` is the bracket length in parameter units.
pub(crate) fn bisect(
    mut classify: impl FnMut(f64) -> PointRecord,
    mut lo: f64,
    mut hi: f64,
    sig_lo: Signature,
    mut sig_hi: Signature,
    stop: f64,
    max_steps: usize,
) -> Bracket {
    let mut steps = 0;
    while (hi - lo).abs() >= stop && steps < max_steps {
        let mid = lo + (hi - lo) / 2.0;
        if mid == lo || mid == hi {
            break;
        }
        let r = classify(mid);
        if r.signature == sig_lo {
            lo = mid;
        } else {
            hi = mid;
            sig_hi = r.signature;
        }
        steps += 1;
    }
    Bracket { lo, hi, sig_lo, sig_hi }
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Locates the signature change on the segment `a -> b` by bisection.
pub fn refine_boundary<C: Classify + ?Sized>(classifier: &C, a: &[f64], b: &[f64], opts: &RefineOptions) -> Result<MembranePoint> {
    if a.len() != b.len() {
        return Err(Error::Precondition("segment endpoints differ in dimension".into()));
    }
    let delta: Vec<f64> = b.iter().zip(a).map(|(y, x)| y - x).collect();
    let len = norm(&delta);
    let at = |t: f64| -> PointRecord {
        let off: Vec<f64> = delta.iter().map(|d| t * d).collect();
        classifier.classify_at(a, &off)
    };
    let (ra, rb) = (at(0.0), at(1.0));
    if ra.signature == rb.signature {
        return Err(Error::Precondition(format!("both segment ends have signature {}", ra.signature)));
    }
    let br = bisect(at, 0.0, 1.0, ra.signature, rb.signature, opts.tol / len, opts.max_steps);
    let t = br.lo + (br.hi - br.lo) / 2.0;
    Ok(MembranePoint {
        position: a.iter().zip(&delta).map(|(x, d)| x + t * d).collect(),
        sig_a: br.sig_lo,
        sig_b: br.sig_hi,
        width: (br.hi - br.lo) * len,
    })
}

/// Refines every transition edge of a field.
pub fn refine_transitions<C: Classify + ?Sized>(
    classifier: &C,
    field: &LabelField,
    edges: &[TransitionEdge],
    opts: &RefineOptions,
    workers: usize,
) -> Result<Vec<MembranePoint>> {
    map_indexed(edges.len(), workers, |k| {
        let e = edges[k];
        refine_boundary(classifier, &field.position(e.from), &field.position(e.to), opts)
    })
    .into_iter()
    .collect()
}

/// Width of any band separating the two faces of a refined boundary.
///
/// The line through `point` along `direction` is probed at offsets
/// `probe_scale * 2^-k` on both sides. If any probe sees a signature other
/// than the two found at `±probe_scale`, the band between the end of the
/// near-side region and the start of the far-side region is measured by
/// bisection; otherwise the width is 0.
pub fn measure_ima_thickness<C: Classify + ?Sized>(classifier: &C, point: &MembranePoint, direction: &[f64], probe_scale: f64) -> f64 {
    let n = norm(direction);
    let u: Vec<f64> = direction.iter().map(|d| d / n).collect();
    let p = &point.position;
    let at = |t: f64| -> PointRecord {
        let off: Vec<f64> = u.iter().map(|x| t * x).collect();
        classifier.classify_at(p, &off)
    };
    let near = at(-probe_scale).signature;
    let far = at(probe_scale).signature;

    let mut band_at = None;
    'probe: for k in 0..=80 {
        let d = probe_scale * 0.5f64.powi(k);
        if d == 0.0 {
            break;
        }
        for t in [-d, d] {
            let s = at(t).signature;
            if s != near && s != far {
                band_at = Some((t, s));
                break 'probe;
            }
        }
    }
    let Some((t_band, sig_band)) = band_at else {
        return 0.0;
    };
    let stop = probe_scale * 1e-13;
    let left = bisect(at, -probe_scale, t_band, near, sig_band.clone(), stop, 200);
    // Mirror the parameter so the far side becomes the lower end.
    let right = bisect(|t| at(-t), -probe_scale, -t_band, far, sig_band, stop, 200);
    let l = left.lo + (left.hi - left.lo) / 2.0;
    let r = -(right.lo + (right.hi - right.lo) / 2.0);
    (r - l).max(0.0)
}
