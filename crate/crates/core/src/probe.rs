//! Classification of drifter positions.
//!
//! A [`Classify`] implementation maps a point of parameter space to a
//! [`PointRecord`]. Positions are passed as `origin + offset` so that
//! implementations can form coordinate differences against the origin first:
//! translating the objects and the origin together then changes nothing
//! numerically.

use crate::ia::{build_grouping_tree_with, GroupingTree, IaSettings, ProfileAgreement, UpdateRule};
use crate::metric::{similarity_matrix, MetricSpec, Object, ObjectConfig};
use crate::error::Result;
use crate::numeric::neg_ln;
use crate::signature::{canonical_signature, Signature};

/// Outcome of grouping at one drifter position.
#[derive(Clone, Debug, PartialEq)]
pub struct PointRecord {
    pub signature: Signature,
    /// Ω of the root split.
    pub omega: f64,
    pub neg_ln_omega: f64,
    /// Cycles of the root split.
    pub cycles: usize,
    /// Some split in the tree fell back to the tie rule.
    pub degenerate: bool,
}

impl PointRecord {
    /// Record for a synthetic label, mostly useful in tests and examples.
    pub fn labelled(signature: &str) -> Self {
        PointRecord {
            signature: Signature::from_raw(signature),
            omega: 1.0,
            neg_ln_omega: 0.0,
            cycles: 1,
            degenerate: signature.starts_with(crate::signature::DEGENERATE_MARK),
        }
    }
}

pub trait Classify: Sync {
    fn classify_at(&self, origin: &[f64], offset: &[f64]) -> PointRecord;

    fn classify(&self, position: &[f64]) -> PointRecord {
        self.classify_at(position, &vec![0.0; position.len()])
    }
}

/// A classifier backed by a plain function of the absolute position.
pub struct LabelRule<F>(pub F);

impl<F> Classify for LabelRule<F>
where
    F: Fn(&[f64]) -> PointRecord + Sync,
{
    fn classify_at(&self, origin: &[f64], offset: &[f64]) -> PointRecord {
        let p: Vec<f64> = origin.iter().zip(offset).map(|(a, b)| a + b).collect();
        (self.0)(&p)
    }
}

/// Groups the drifter with the fixed objects at each queried position.
#[derive(Clone, Debug)]
pub struct DrifterProbe<R = ProfileAgreement> {
    cfg: ObjectConfig,
    spec: MetricSpec,
    ia: IaSettings,
    rule: R,
}

impl DrifterProbe<ProfileAgreement> {
    pub fn new(cfg: ObjectConfig, spec: MetricSpec, ia: IaSettings) -> Result<Self> {
        Self::with_rule(cfg, spec, ia, ProfileAgreement)
    }
}

impl<R: UpdateRule> DrifterProbe<R> {
    pub fn with_rule(cfg: ObjectConfig, spec: MetricSpec, ia: IaSettings, rule: R) -> Result<Self> {
        spec.validate()?;
        ia.validate()?;
        Ok(DrifterProbe { cfg, spec, ia, rule })
    }

    pub fn config(&self) -> &ObjectConfig {
        &self.cfg
    }

    pub fn metric(&self) -> &MetricSpec {
        &self.spec
    }

    pub fn settings(&self) -> &IaSettings {
        &self.ia
    }

    pub fn dimension(&self) -> usize {
        self.cfg.dimension()
    }

    /// Objects expressed relative to `origin`, drifter placed at `offset`.
    fn local_config(&self, origin: &[f64], offset: &[f64]) -> ObjectConfig {
        assert_eq!(origin.len(), self.dimension(), "position dimension mismatch");
        let d = self.cfg.drifter_index();
        let objects = self
            .cfg
            .objects()
            .iter()
            .enumerate()
            .map(|(i, o)| {
                let coords = if i == d {
                    offset.to_vec()
                } else {
                    o.coords.iter().zip(origin).map(|(x, c)| x - c).collect()
                };
                Object { name: o.name.clone(), coords }
            })
            .collect();
        ObjectConfig::new(objects, self.cfg.drifter_name()).expect("validated configuration")
    }

    pub fn tree_at(&self, origin: &[f64], offset: &[f64]) -> GroupingTree {
        let local = self.local_config(origin, offset);
        let s = similarity_matrix(&local, &self.spec).expect("metric validated at construction");
        build_grouping_tree_with(&self.rule, &s, &self.ia).expect("configuration has at least three objects")
    }
}

impl<R: UpdateRule> Classify for DrifterProbe<R> {
    fn classify_at(&self, origin: &[f64], offset: &[f64]) -> PointRecord {
        let tree = self.tree_at(origin, offset);
        let root = tree.root_split().expect("root of three or more objects is a split");
        PointRecord {
            signature: canonical_signature(&tree, Some(self.cfg.drifter_name())),
            omega: root.omega,
            neg_ln_omega: neg_ln(root.omega),
            cycles: root.cycles,
            degenerate: tree.any_degenerate(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    pub fn two_fo_probe(spec: MetricSpec) -> DrifterProbe {
        let cfg = ObjectConfig::with_fixed(
            vec![Object::new("A", [1.0, 1.0, 0.0]), Object::new("B", [0.0, 0.0, 1.0])],
            vec![0.0; 3],
        )
        .unwrap();
        DrifterProbe::new(cfg, spec, IaSettings::default()).unwrap()
    }

    #[test]
    fn far_drifter_is_isolated() {
        for spec in [MetricSpec::euclidean(), MetricSpec::city_block(), MetricSpec::xr(1.5)] {
            let r = two_fo_probe(spec).classify(&[100.0, 100.0, 100.0]);
            assert_eq!(r.signature.as_str(), "AB - Dr", "{spec:?}");
            assert!(!r.degenerate);
        }
    }

    #[test]
    fn near_drifter_joins_the_closer_object() {
        let p = two_fo_probe(MetricSpec::euclidean());
        assert_eq!(p.classify(&[1.2, 1.0, 0.0]).signature.as_str(), "B - ADr");
        assert_eq!(p.classify(&[0.0, 0.1, 1.0]).signature.as_str(), "A - BDr");
        let t = p.tree_at(&[1.2, 1.0, 0.0], &[0.0; 3]);
        assert_eq!(t.depth(), 1);
        assert_eq!(t.root_split().unwrap().group_low, vec!["A", "Dr"]);
    }

    #[test]
    fn origin_offset_split_matches_absolute() {
        let p = two_fo_probe(MetricSpec::xr(1.5));
        let a = p.classify(&[0.25, 2.0, -1.0]);
        let b = p.classify_at(&[-1.0, 1.0, -1.0], &[1.25, 1.0, 0.0]);
        assert_eq!(a, b);
    }
}
