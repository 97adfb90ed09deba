//! Object configurations and the (dis)similarity matrices built from them.
//!
//! Three metrics are supported. Euclidean distance is used as-is. City-block
//! and XR matrices are built per parameter ("monomer" matrices) and combined
//! cell-wise by geometric mean. Everything the grouping engine consumes is a
//! similarity matrix; dissimilarities are converted with `s = 1 / (1 + d)`.

use std::fmt;

use crate::error::{Error, Result};
use crate::numeric::sorted_sum;

/// Characters that may not appear in an object name: they are either part of
/// the signature grammar or of the configuration syntax.
pub const RESERVED_NAME_CHARS: &[char] = &['(', ')', '-', ',', '=', '#', ';', ':', '⊥'];

pub const DEFAULT_DRIFTER: &str = "Dr";

#[derive(Clone, Debug, PartialEq)]
pub struct Object {
    pub name: String,
    pub coords: Vec<f64>,
}

impl Object {
    pub fn new(name: impl Into<String>, coords: impl Into<Vec<f64>>) -> Self {
        Object { name: name.into(), coords: coords.into() }
    }
}

/// Named objects sharing one parameter space. One of them is the drifter;
/// the rest are fixed.
#[derive(Clone, Debug, PartialEq)]
pub struct ObjectConfig {
    objects: Vec<Object>,
    drifter: usize,
}

pub fn validate_name(name: &str) -> Result<()> {
    if name.is_empty() {
        return Err(Error::Config("object names must be nonempty".into()));
    }
    if name.chars().any(|c| c.is_whitespace() || RESERVED_NAME_CHARS.contains(&c)) {
        return Err(Error::Config(format!(
            "object name {name:?} contains a reserved character (whitespace or one of {:?})",
            RESERVED_NAME_CHARS
        )));
    }
    Ok(())
}

impl ObjectConfig {
    pub fn new(objects: Vec<Object>, drifter_name: &str) -> Result<Self> {
        if objects.len() < 3 {
            return Err(Error::Config(format!(
                "need at least two fixed objects plus the drifter, got {} objects",
                objects.len()
            )));
        }
        let dim = objects[0].coords.len();
        if dim == 0 {
            return Err(Error::Config(format!("object {} has no coordinates", objects[0].name)));
        }
        for (i, o) in objects.iter().enumerate() {
            validate_name(&o.name)?;
            if o.coords.len() != dim {
                return Err(Error::Config(format!(
                    "object {} has {} coordinates, expected {dim}",
                    o.name,
                    o.coords.len()
                )));
            }
            if o.coords.iter().any(|c| !c.is_finite()) {
                return Err(Error::Config(format!("object {} has a non-finite coordinate", o.name)));
            }
            if objects[..i].iter().any(|p| p.name == o.name) {
                return Err(Error::Config(format!("duplicate object name {}", o.name)));
            }
        }
        let drifter = objects
            .iter()
            .position(|o| o.name == drifter_name)
            .ok_or_else(|| Error::Config(format!("drifter {drifter_name:?} is not among the objects")))?;
        Ok(ObjectConfig { objects, drifter })
    }

    /// Fixed objects plus a drifter named [`DEFAULT_DRIFTER`] at `drifter`.
    pub fn with_fixed(fixed: Vec<Object>, drifter: Vec<f64>) -> Result<Self> {
        let mut objects = fixed;
        objects.push(Object::new(DEFAULT_DRIFTER, drifter));
        Self::new(objects, DEFAULT_DRIFTER)
    }

    pub fn objects(&self) -> &[Object] {
        &self.objects
    }

    pub fn len(&self) -> usize {
        self.objects.len()
    }

    pub fn is_empty(&self) -> bool {
        self.objects.is_empty()
    }

    pub fn dimension(&self) -> usize {
        self.objects[0].coords.len()
    }

    pub fn names(&self) -> Vec<String> {
        self.objects.iter().map(|o| o.name.clone()).collect()
    }

    pub fn drifter_index(&self) -> usize {
        self.drifter
    }

    pub fn drifter_name(&self) -> &str {
        &self.objects[self.drifter].name
    }

    pub fn drifter_position(&self) -> &[f64] {
        &self.objects[self.drifter].coords
    }

    pub fn fixed_objects(&self) -> impl Iterator<Item = &Object> {
        let d = self.drifter;
        self.objects.iter().enumerate().filter(move |(i, _)| *i != d).map(|(_, o)| o)
    }

    /// Moves the drifter. Panics if `position` has the wrong dimension.
    pub fn set_drifter(&mut self, position: &[f64]) {
        assert_eq!(position.len(), self.dimension(), "drifter dimension mismatch");
        self.objects[self.drifter].coords.copy_from_slice(position);
    }

    pub fn with_drifter_at(&self, position: &[f64]) -> Self {
        let mut c = self.clone();
        c.set_drifter(position);
        c
    }

    /// Every object shifted by `v`.
    pub fn translated(&self, v: &[f64]) -> Self {
        let mut c = self.clone();
        for o in &mut c.objects {
            for (x, d) in o.coords.iter_mut().zip(v) {
                *x += d;
            }
        }
        c
    }

    /// Centroid of the fixed objects.
    pub fn fixed_centroid(&self) -> Vec<f64> {
        let mut c = vec![0.0; self.dimension()];
        let mut k = 0.0;
        for o in self.fixed_objects() {
            for (a, x) in c.iter_mut().zip(&o.coords) {
                *a += x;
            }
            k += 1.0;
        }
        c.iter_mut().for_each(|a| *a /= k);
        c
    }

    /// Largest Euclidean distance between two fixed objects.
    pub fn fixed_diameter(&self) -> f64 {
        let fixed: Vec<&Object> = self.fixed_objects().collect();
        let mut best = 0.0f64;
        for (i, a) in fixed.iter().enumerate() {
            for b in &fixed[i + 1..] {
                best = best.max(euclid(&a.coords, &b.coords));
            }
        }
        best
    }

    /// Longest edge of the axis-aligned bounding box of the fixed objects.
    pub fn fixed_box_edge(&self) -> f64 {
        (0..self.dimension())
            .map(|p| {
                let (lo, hi) = self
                    .fixed_objects()
                    .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), o| (lo.min(o.coords[p]), hi.max(o.coords[p])));
                hi - lo
            })
            .fold(0.0, f64::max)
    }
}

fn euclid(a: &[f64], b: &[f64]) -> f64 {
    let mut sq: Vec<f64> = a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).collect();
    sorted_sum(&mut sq).sqrt()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum MetricKind {
    Euclidean,
    CityBlock,
    Xr,
}

impl MetricKind {
    pub fn parse(s: &str) -> Option<Self> {
        match s.to_ascii_lowercase().as_str() {
            "ed" | "euclidean" => Some(MetricKind::Euclidean),
            "cb" | "city-block" | "cityblock" => Some(MetricKind::CityBlock),
            "xr" => Some(MetricKind::Xr),
            _ => None,
        }
    }
}

impl fmt::Display for MetricKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            MetricKind::Euclidean => "ed",
            MetricKind::CityBlock => "cb",
            MetricKind::Xr => "xr",
        })
    }
}

/// Dissimilarity to similarity conversion.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Conversion {
    /// `s = 1 / (1 + d)`
    Reciprocal,
}

impl Conversion {
    pub fn apply(self, d: f64) -> f64 {
        match self {
            Conversion::Reciprocal => 1.0 / (1.0 + d),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MetricSpec {
    pub kind: MetricKind,
    /// Base of the XR exponential.
    pub b: f64,
    /// Lower bound applied to each city-block monomer cell.
    pub cb_floor: f64,
    pub conversion: Conversion,
}

impl MetricSpec {
    pub fn new(kind: MetricKind) -> Self {
        MetricSpec { kind, b: 1.5, cb_floor: 1e-9, conversion: Conversion::Reciprocal }
    }

    pub fn euclidean() -> Self {
        Self::new(MetricKind::Euclidean)
    }

    pub fn city_block() -> Self {
        Self::new(MetricKind::CityBlock)
    }

    pub fn xr(b: f64) -> Self {
        MetricSpec { b, ..Self::new(MetricKind::Xr) }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.b > 1.0) || !self.b.is_finite() {
            return Err(Error::Config(format!("XR base b must be a finite number > 1, got {}", self.b)));
        }
        if !(self.cb_floor > 0.0) || !self.cb_floor.is_finite() {
            return Err(Error::Config(format!("cb_floor must be a finite number > 0, got {}", self.cb_floor)));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Semantics {
    Similarity,
    Dissimilarity,
}

/// Dense symmetric matrix over named objects, row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct SquareMatrix {
    names: Vec<String>,
    values: Vec<f64>,
    semantics: Semantics,
}

impl SquareMatrix {
    /// Builds a matrix from row-major `values`. Checks shape and exact symmetry.
    pub fn from_values(names: Vec<String>, values: Vec<f64>, semantics: Semantics) -> Result<Self> {
        let n = names.len();
        if values.len() != n * n {
            return Err(Error::Config(format!("expected {} matrix entries, got {}", n * n, values.len())));
        }
        for i in 0..n {
            for j in 0..i {
                if values[i * n + j] != values[j * n + i] {
                    return Err(Error::Config(format!("matrix is not symmetric at ({i}, {j})")));
                }
            }
        }
        Ok(SquareMatrix { names, values, semantics })
    }

    /// Fills the matrix from a pair function evaluated once per unordered pair.
    pub fn from_pairs(names: Vec<String>, semantics: Semantics, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let n = names.len();
        let diag = match semantics {
            Semantics::Similarity => 1.0,
            Semantics::Dissimilarity => 0.0,
        };
        let mut values = vec![diag; n * n];
        for i in 0..n {
            for j in i + 1..n {
                let v = f(i, j);
                values[i * n + j] = v;
                values[j * n + i] = v;
            }
        }
        SquareMatrix { names, values, semantics }
    }

    pub fn n(&self) -> usize {
        self.names.len()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn semantics(&self) -> Semantics {
        self.semantics
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.n() + j]
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    pub fn by_name(&self, a: &str, b: &str) -> Option<f64> {
        Some(self.get(self.index_of(a)?, self.index_of(b)?))
    }

    /// Sub-matrix over the given row/column indices, in that order.
    pub fn restrict(&self, idx: &[usize]) -> SquareMatrix {
        let names = idx.iter().map(|&i| self.names[i].clone()).collect();
        let mut values = Vec::with_capacity(idx.len() * idx.len());
        for &i in idx {
            for &j in idx {
                values.push(self.get(i, j));
            }
        }
        SquareMatrix { names, values, semantics: self.semantics }
    }

    /// Same matrix with rows and columns reordered so that new index `k`
    /// holds old index `order[k]`.
    pub fn permuted(&self, order: &[usize]) -> SquareMatrix {
        self.restrict(order)
    }
}

/// Pairwise Euclidean distances.
pub fn euclidean_dissimilarity(cfg: &ObjectConfig) -> SquareMatrix {
    let objs = cfg.objects();
    SquareMatrix::from_pairs(cfg.names(), Semantics::Dissimilarity, |i, j| euclid(&objs[i].coords, &objs[j].coords))
}

/// Matrix over a single parameter `p`: floored absolute differences for
/// city-block, `b^-|Δ|` similarities for XR.
pub fn monomer_matrix(cfg: &ObjectConfig, p: usize, spec: &MetricSpec) -> Result<SquareMatrix> {
    spec.validate()?;
    if p >= cfg.dimension() {
        return Err(Error::Precondition(format!("parameter index {p} out of range for dimension {}", cfg.dimension())));
    }
    let objs = cfg.objects();
    let delta = |i: usize, j: usize| (objs[i].coords[p] - objs[j].coords[p]).abs();
    match spec.kind {
        MetricKind::Euclidean => Err(Error::Unsupported("Euclidean distances are not built from monomer matrices".into())),
        MetricKind::CityBlock => {
            Ok(SquareMatrix::from_pairs(cfg.names(), Semantics::Dissimilarity, |i, j| delta(i, j).max(spec.cb_floor)))
        }
        MetricKind::Xr => Ok(SquareMatrix::from_pairs(cfg.names(), Semantics::Similarity, |i, j| spec.b.powf(-delta(i, j)))),
    }
}

/// Cell-wise geometric mean of monomer matrices, evaluated in log space.
pub fn hybridize_geometric_mean(monomers: &[SquareMatrix]) -> Result<SquareMatrix> {
    let first = monomers.first().ok_or_else(|| Error::Config("no monomer matrices to hybridize".into()))?;
    if monomers.iter().any(|m| m.semantics != first.semantics || m.names != first.names) {
        return Err(Error::Config("monomer matrices disagree on names or semantics".into()));
    }
    let n = first.n();
    for m in monomers {
        for i in 0..n {
            for j in 0..n {
                let v = m.get(i, j);
                if i != j && !(v > 0.0 && v.is_finite()) {
                    return Err(Error::Numeric(format!("monomer cell ({i}, {j}) = {v} is not positive")));
                }
            }
        }
    }
    if monomers.len() == 1 {
        return Ok(first.clone());
    }
    let k = monomers.len() as f64;
    let mut logs = vec![0.0; monomers.len()];
    Ok(SquareMatrix::from_pairs(first.names.clone(), first.semantics, |i, j| {
        for (l, m) in logs.iter_mut().zip(monomers) {
            *l = m.get(i, j).ln();
        }
        (sorted_sum(&mut logs) / k).exp()
    }))
}

/// The similarity matrix the grouping engine consumes.
///
/// XR similarities are computed directly as `exp(-ln(b) * mean|Δ|)`, which is
/// the geometric mean of the XR monomers but cannot underflow per parameter.
pub fn similarity_matrix(cfg: &ObjectConfig, spec: &MetricSpec) -> Result<SquareMatrix> {
    spec.validate()?;
    let objs = cfg.objects();
    let p = cfg.dimension();
    let pf = p as f64;
    let mut buf = vec![0.0; p];
    let m = match spec.kind {
        MetricKind::Euclidean => SquareMatrix::from_pairs(cfg.names(), Semantics::Similarity, |i, j| {
            spec.conversion.apply(euclid(&objs[i].coords, &objs[j].coords))
        }),
        MetricKind::CityBlock => SquareMatrix::from_pairs(cfg.names(), Semantics::Similarity, |i, j| {
            // Coincident objects are fully similar; the floor only guards
            // single zero differences.
            if objs[i].coords == objs[j].coords {
                return 1.0;
            }
            for (t, (a, b)) in buf.iter_mut().zip(objs[i].coords.iter().zip(&objs[j].coords)) {
                *t = (a - b).abs().max(spec.cb_floor).ln();
            }
            spec.conversion.apply((sorted_sum(&mut buf) / pf).exp())
        }),
        MetricKind::Xr => {
            let ln_b = spec.b.ln();
            SquareMatrix::from_pairs(cfg.names(), Semantics::Similarity, |i, j| {
                for (t, (a, b)) in buf.iter_mut().zip(objs[i].coords.iter().zip(&objs[j].coords)) {
                    *t = (a - b).abs();
                }
                (-ln_b * (sorted_sum(&mut buf) / pf)).exp()
            })
        }
    };
    Ok(m)
}

/// Dissimilarity to similarity through the spec's conversion, unit diagonal.
pub fn to_similarity(d: &SquareMatrix, spec: &MetricSpec) -> SquareMatrix {
    match d.semantics {
        Semantics::Similarity => d.clone(),
        Semantics::Dissimilarity => {
            SquareMatrix::from_pairs(d.names.clone(), Semantics::Similarity, |i, j| spec.conversion.apply(d.get(i, j)))
        }
    }
}
