//! Iterative-averaging bipartition and maximal hierarchical grouping.
//!
//! A similarity matrix is transformed cycle by cycle until its structure can
//! be read as exactly two internally cohesive groups. The split is applied
//! recursively, always on the original matrix restricted to each side, until
//! every group has at most two members.
//!
//! The cycle itself is pluggable through [`UpdateRule`]. The default,
//! [`ProfileAgreement`], replaces each similarity by the agreement of the two
//! objects' similarity profiles and then stretches the off-diagonal range to
//! `[0, 1]`.

use crate::error::{Error, Result};
use crate::metric::{Semantics, SquareMatrix};
use crate::numeric::{neg_ln, sorted_sum};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct IaSettings {
    pub max_cycles: usize,
    /// An off-diagonal range narrower than this before rescaling is a tie.
    pub tie_epsilon: f64,
}

impl Default for IaSettings {
    fn default() -> Self {
        IaSettings { max_cycles: 10_000, tie_epsilon: 1e-13 }
    }
}

impl IaSettings {
    pub fn validate(&self) -> Result<()> {
        if self.max_cycles < 1 {
            return Err(Error::Config("max_cycles must be at least 1".into()));
        }
        if !(self.tie_epsilon > 0.0) || !self.tie_epsilon.is_finite() {
            return Err(Error::Config(format!("tie_epsilon must be a finite number > 0, got {}", self.tie_epsilon)));
        }
        Ok(())
    }
}

/// One averaging cycle over a dense row-major `n x n` similarity matrix.
pub trait UpdateRule: Send + Sync {
    /// Writes the transformed matrix into `next`. Returns the collapsed
    /// off-diagonal range as the error when the cycle cannot discriminate.
    fn cycle(&self, n: usize, current: &[f64], next: &mut [f64], tie_epsilon: f64) -> std::result::Result<(), f64>;
}

/// Profile agreement followed by contrast normalization:
///
/// `T(i,j) = 1 - (1/n) Σ_k |S(i,k) - S(j,k)|`, then off-diagonal `T` is
/// mapped affinely onto `[0, 1]` and the diagonal reset to 1.
#[derive(Clone, Copy, Debug, Default)]
pub struct ProfileAgreement;

impl UpdateRule for ProfileAgreement {
    fn cycle(&self, n: usize, current: &[f64], next: &mut [f64], tie_epsilon: f64) -> std::result::Result<(), f64> {
        let nf = n as f64;
        let mut terms = vec![0.0; n];
        let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
        for i in 0..n {
            next[i * n + i] = 1.0;
            let row_i = &current[i * n..(i + 1) * n];
            for j in i + 1..n {
                let row_j = &current[j * n..(j + 1) * n];
                for (t, (a, b)) in terms.iter_mut().zip(row_i.iter().zip(row_j)) {
                    *t = (a - b).abs();
                }
                let v = 1.0 - sorted_sum(&mut terms) / nf;
                next[i * n + j] = v;
                lo = lo.min(v);
                hi = hi.max(v);
            }
        }
        let range = hi - lo;
        if !(range >= tie_epsilon) {
            return Err(range);
        }
        for i in 0..n {
            for j in i + 1..n {
                let v = (next[i * n + j] - lo) / range;
                next[i * n + j] = v;
                next[j * n + i] = v;
            }
        }
        Ok(())
    }
}

/// A single cycle of the default rule on a named matrix.
pub fn ia_cycle(s: &SquareMatrix, tie_epsilon: f64) -> Result<SquareMatrix> {
    check_input(s)?;
    let n = s.n();
    let mut next = vec![0.0; n * n];
    ProfileAgreement
        .cycle(n, s.values(), &mut next, tie_epsilon)
        .map_err(|range| Error::Tie { range })?;
    SquareMatrix::from_values(s.names().to_vec(), next, Semantics::Similarity)
}

fn check_input(s: &SquareMatrix) -> Result<()> {
    if s.n() < 3 {
        return Err(Error::Precondition(format!("iterative averaging needs at least 3 objects, got {}", s.n())));
    }
    if s.semantics() != Semantics::Similarity {
        return Err(Error::Precondition("iterative averaging consumes a similarity matrix".into()));
    }
    Ok(())
}

/// Two-group split produced by one iterative-averaging run.
#[derive(Clone, Debug, PartialEq)]
pub struct Bipartition {
    /// The group holding the lexicographically smallest label; sorted.
    pub group_low: Vec<String>,
    /// The other group; sorted.
    pub group_high: Vec<String>,
    pub cycles: usize,
    /// Intergroup similarity in `(0, 1]`.
    pub omega: f64,
    /// No readable structure was reached; the split is the fallback.
    pub degenerate: bool,
    /// The cross-group similarity exceeded the within-group one before clamping.
    pub inverted_contrast: bool,
}

impl Bipartition {
    pub fn neg_ln_omega(&self) -> f64 {
        neg_ln_omega(self)
    }
}

pub fn neg_ln_omega(b: &Bipartition) -> f64 {
    neg_ln(b.omega)
}

/// Reads a matrix as two groups: with `θ` the midpoint of the off-diagonal
/// range, the pairs above `θ` must form exactly two cliques. Returns the
/// group id (0 for the group of index 0) per object.
pub fn readable_split(n: usize, m: &[f64]) -> Option<Vec<u8>> {
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for i in 0..n {
        for j in i + 1..n {
            lo = lo.min(m[i * n + j]);
            hi = hi.max(m[i * n + j]);
        }
    }
    if !(hi > lo) {
        return None;
    }
    let theta = lo + (hi - lo) / 2.0;
    let linked = |i: usize, j: usize| m[i * n + j] > theta;

    let mut group = vec![u8::MAX; n];
    let mut stack = Vec::with_capacity(n);
    let mut count = 0u8;
    for start in 0..n {
        if group[start] != u8::MAX {
            continue;
        }
        if count == 2 {
            return None;
        }
        group[start] = count;
        stack.push(start);
        while let Some(i) = stack.pop() {
            for j in 0..n {
                if group[j] == u8::MAX && i != j && linked(i, j) {
                    group[j] = count;
                    stack.push(j);
                }
            }
        }
        count += 1;
    }
    if count != 2 {
        return None;
    }
    for i in 0..n {
        for j in i + 1..n {
            if group[i] == group[j] && !linked(i, j) {
                return None;
            }
        }
    }
    Some(group)
}

/// Runs the default rule to the first readable cycle.
pub fn run_bipartition(s: &SquareMatrix, settings: &IaSettings) -> Result<Bipartition> {
    run_bipartition_with(&ProfileAgreement, s, settings)
}

pub fn run_bipartition_with<R: UpdateRule + ?Sized>(rule: &R, s: &SquareMatrix, settings: &IaSettings) -> Result<Bipartition> {
    check_input(s)?;
    let n = s.n();
    let mut current = s.values().to_vec();
    let mut next = vec![0.0; n * n];
    for cycle in 1..=settings.max_cycles {
        if rule.cycle(n, &current, &mut next, settings.tie_epsilon).is_err() {
            return Ok(fallback(s, cycle));
        }
        if let Some(groups) = readable_split(n, &next) {
            return Ok(finish(s, &groups, cycle, false));
        }
        // An unreadable fixed point never resolves.
        if next == current {
            return Ok(fallback(s, cycle));
        }
        std::mem::swap(&mut current, &mut next);
    }
    Ok(fallback(s, settings.max_cycles))
}

fn fallback(s: &SquareMatrix, cycles: usize) -> Bipartition {
    let lowest = (0..s.n()).min_by(|&a, &b| s.names()[a].cmp(&s.names()[b])).unwrap_or(0);
    let groups: Vec<u8> = (0..s.n()).map(|i| u8::from(i != lowest)).collect();
    finish(s, &groups, cycles, true)
}

/// Ω is the largest cross-group similarity over the smallest within-group
/// similarity of the original matrix, clamped to `(0, 1]`.
fn finish(s: &SquareMatrix, groups: &[u8], cycles: usize, degenerate: bool) -> Bipartition {
    let n = s.n();
    let (mut max_cross, mut min_within) = (f64::NEG_INFINITY, f64::INFINITY);
    for i in 0..n {
        for j in i + 1..n {
            let v = s.get(i, j);
            if groups[i] == groups[j] {
                min_within = min_within.min(v);
            } else {
                max_cross = max_cross.max(v);
            }
        }
    }
    let ratio = if max_cross == 0.0 && min_within == 0.0 { 1.0 } else { max_cross / min_within };
    let inverted_contrast = ratio > 1.0;
    let omega = if inverted_contrast || ratio.is_nan() { 1.0 } else { ratio.max(f64::MIN_POSITIVE) };

    let mut a: Vec<String> = Vec::new();
    let mut b: Vec<String> = Vec::new();
    for (i, name) in s.names().iter().enumerate() {
        if groups[i] == groups[0] {
            a.push(name.clone());
        } else {
            b.push(name.clone());
        }
    }
    a.sort();
    b.sort();
    let (group_low, group_high) = if a[0] <= b[0] { (a, b) } else { (b, a) };
    Bipartition { group_low, group_high, cycles, omega, degenerate, inverted_contrast }
}

/// Maximal hierarchical grouping: nodes are splits, leaves hold at most two labels.
#[derive(Clone, Debug, PartialEq)]
pub enum GroupingTree {
    Leaf(Vec<String>),
    Split { split: Bipartition, low: Box<GroupingTree>, high: Box<GroupingTree> },
}

impl GroupingTree {
    pub fn root_split(&self) -> Option<&Bipartition> {
        match self {
            GroupingTree::Leaf(_) => None,
            GroupingTree::Split { split, .. } => Some(split),
        }
    }

    pub fn root_omega(&self) -> Option<f64> {
        self.root_split().map(|b| b.omega)
    }

    pub fn any_degenerate(&self) -> bool {
        match self {
            GroupingTree::Leaf(_) => false,
            GroupingTree::Split { split, low, high } => split.degenerate || low.any_degenerate() || high.any_degenerate(),
        }
    }

    /// All labels, sorted.
    pub fn labels(&self) -> Vec<String> {
        let mut out = Vec::new();
        self.collect_labels(&mut out);
        out.sort();
        out
    }

    fn collect_labels(&self, out: &mut Vec<String>) {
        match self {
            GroupingTree::Leaf(l) => out.extend(l.iter().cloned()),
            GroupingTree::Split { low, high, .. } => {
                low.collect_labels(out);
                high.collect_labels(out);
            }
        }
    }

    pub fn depth(&self) -> usize {
        match self {
            GroupingTree::Leaf(_) => 0,
            GroupingTree::Split { low, high, .. } => 1 + low.depth().max(high.depth()),
        }
    }
}

pub fn build_grouping_tree(s: &SquareMatrix, settings: &IaSettings) -> Result<GroupingTree> {
    build_grouping_tree_with(&ProfileAgreement, s, settings)
}

pub fn build_grouping_tree_with<R: UpdateRule + ?Sized>(rule: &R, s: &SquareMatrix, settings: &IaSettings) -> Result<GroupingTree> {
    check_input(s)?;
    let all: Vec<usize> = (0..s.n()).collect();
    grow(rule, s, &all, settings)
}

fn grow<R: UpdateRule + ?Sized>(rule: &R, s: &SquareMatrix, idx: &[usize], settings: &IaSettings) -> Result<GroupingTree> {
    if idx.len() <= 2 {
        let mut labels: Vec<String> = idx.iter().map(|&i| s.names()[i].clone()).collect();
        labels.sort();
        return Ok(GroupingTree::Leaf(labels));
    }
    let sub = s.restrict(idx);
    let split = run_bipartition_with(rule, &sub, settings)?;
    let side = |group: &[String]| -> Vec<usize> {
        idx.iter().copied().filter(|&i| group.binary_search(&s.names()[i]).is_ok()).collect()
    };
    let low = grow(rule, s, &side(&split.group_low), settings)?;
    let high = grow(rule, s, &side(&split.group_high), settings)?;
    Ok(GroupingTree::Split { split, low: Box::new(low), high: Box::new(high) })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metric::{similarity_matrix, MetricSpec, Object, ObjectConfig};

    pub(crate) fn named(values: &[&[f64]]) -> SquareMatrix {
        let n = values.len();
        let names = (0..n).map(|i| format!("o{i}")).collect();
        SquareMatrix::from_values(names, values.iter().flat_map(|r| r.iter().copied()).collect(), Semantics::Similarity)
            .unwrap()
    }

    fn two_block() -> SquareMatrix {
        named(&[
            &[1.0, 0.9, 0.1, 0.1],
            &[0.9, 1.0, 0.1, 0.1],
            &[0.1, 0.1, 1.0, 0.9],
            &[0.1, 0.1, 0.9, 1.0],
        ])
    }

    #[test]
    fn cycle_keeps_exact_blocks() {
        let s = named(&[
            &[1.0, 1.0, 0.3, 0.3],
            &[1.0, 1.0, 0.3, 0.3],
            &[0.3, 0.3, 1.0, 1.0],
            &[0.3, 0.3, 1.0, 1.0],
        ]);
        let t = ia_cycle(&s, 1e-13).unwrap();
        assert_eq!(t.get(0, 1), 1.0);
        assert_eq!(t.get(2, 3), 1.0);
        assert_eq!(t.get(0, 2), 0.0);
        assert_eq!(readable_split(4, t.values()), Some(vec![0, 0, 1, 1]));
    }

    #[test]
    fn constant_matrix_is_a_tie() {
        let s = named(&[&[1.0, 0.5, 0.5], &[0.5, 1.0, 0.5], &[0.5, 0.5, 1.0]]);
        assert!(matches!(ia_cycle(&s, 1e-13), Err(Error::Tie { .. })));
    }

    #[test]
    fn cycle_output_is_symmetric_and_stretched() {
        // Direct evaluation of the two steps on a fixed 5x5 matrix.
        let s = named(&[
            &[1.0, 0.8, 0.3, 0.5, 0.1],
            &[0.8, 1.0, 0.2, 0.6, 0.4],
            &[0.3, 0.2, 1.0, 0.7, 0.9],
            &[0.5, 0.6, 0.7, 1.0, 0.35],
            &[0.1, 0.4, 0.9, 0.35, 1.0],
        ]);
        let t = ia_cycle(&s, 1e-13).unwrap();
        let raw = |i: usize, j: usize| 1.0 - (0..5).map(|k| (s.get(i, k) - s.get(j, k)).abs()).sum::<f64>() / 5.0;
        let mut pairs = vec![];
        for i in 0..5 {
            for j in i + 1..5 {
                pairs.push(raw(i, j));
                assert_eq!(t.get(i, j), t.get(j, i));
            }
        }
        let lo = pairs.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = pairs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        for i in 0..5 {
            assert_eq!(t.get(i, i), 1.0);
            for j in i + 1..5 {
                assert!((t.get(i, j) - (raw(i, j) - lo) / (hi - lo)).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn block_example() {
        let b = run_bipartition(&two_block(), &IaSettings::default()).unwrap();
        assert_eq!(b.group_low, vec!["o0", "o1"]);
        assert_eq!(b.group_high, vec!["o2", "o3"]);
        assert_eq!(b.cycles, 1);
        assert!(!b.degenerate && !b.inverted_contrast);
        assert!((b.omega - 0.1 / 0.9).abs() < 1e-15);
        assert!((b.neg_ln_omega() - 2.1972245773362196).abs() < 1e-12);
    }

    #[test]
    fn neg_ln_omega_examples() {
        let mut b = run_bipartition(&two_block(), &IaSettings::default()).unwrap();
        b.omega = 1.0;
        assert_eq!(b.neg_ln_omega(), 0.0);
        b.omega = 0.1111;
        assert!((b.neg_ln_omega() - 2.197).abs() < 1e-3);
    }

    #[test]
    fn equilateral_triangle_is_degenerate() {
        let cfg = ObjectConfig::with_fixed(
            vec![Object::new("A", [1.0, 0.0, 0.0]), Object::new("B", [0.0, 1.0, 0.0])],
            vec![0.0, 0.0, 1.0],
        )
        .unwrap();
        let s = similarity_matrix(&cfg, &MetricSpec::euclidean()).unwrap();
        let b = run_bipartition(&s, &IaSettings::default()).unwrap();
        assert!(b.degenerate);
        assert_eq!(b.group_low, vec!["A"]);
        assert_eq!(b.group_high, vec!["B", "Dr"]);
    }

    #[test]
    fn too_small_or_wrong_semantics() {
        let s = named(&[&[1.0, 0.5], &[0.5, 1.0]]);
        assert!(matches!(run_bipartition(&s, &IaSettings::default()), Err(Error::Precondition(_))));
        let d = SquareMatrix::from_pairs(vec!["a".into(), "b".into(), "c".into()], Semantics::Dissimilarity, |i, j| (i + j) as f64);
        assert!(run_bipartition(&d, &IaSettings::default()).is_err());
    }

    #[test]
    fn unreadable_fixed_point_stops_early() {
        // Two top pairs tied exactly: the cycle maps (1, 1, 0) onto itself.
        let s = named(&[&[1.0, 1.0, 0.0], &[1.0, 1.0, 1.0], &[0.0, 1.0, 1.0]]);
        let b = run_bipartition(&s, &IaSettings::default()).unwrap();
        assert!(b.degenerate);
        assert!(b.cycles < 5);
    }

    #[test]
    fn tree_on_two_pairs() {
        // Inter-pair distance 100x the intra-pair one.
        let cfg = ObjectConfig::with_fixed(
            vec![Object::new("A", [0.0, 0.0]), Object::new("B", [1.0, 0.0]), Object::new("C", [1.01, 0.0])],
            vec![0.01, 0.0],
        )
        .unwrap();
        let s = similarity_matrix(&cfg, &MetricSpec::euclidean()).unwrap();
        let t = build_grouping_tree(&s, &IaSettings::default()).unwrap();
        let root = t.root_split().unwrap();
        assert_eq!(root.group_low, vec!["A", "Dr"]);
        assert_eq!(root.group_high, vec!["B", "C"]);
        assert_eq!(t.depth(), 1);
        assert_eq!(t.labels(), vec!["A", "B", "C", "Dr"]);
    }
}
