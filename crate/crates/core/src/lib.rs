//! Drifter-field simulation of iterative-averaging hierarchical grouping.
//!
//! A movable test object, the drifter, is placed at points of parameter space
//! next to a set of fixed objects. At every point the objects are grouped by
//! iterative averaging of their similarity matrix, and the resulting grouping
//! is summarized as a [`Signature`]. Scanning the drifter over grids, rays and
//! paths maps out the regions of constant grouping, the thin transition
//! surfaces between them, the bounded aura outside of which the drifter is
//! always isolated, and the intergroup similarity Ω.

pub mod aura;
pub mod cli;
pub mod config;
pub mod error;
pub mod ia;
pub mod metric;
pub mod numeric;
pub mod output;
pub mod parallel;
pub mod probe;
pub mod scanner;
pub mod signature;
pub mod trajectory;

pub use aura::{aura_extent, far_field_profile, lattice_directions, AuraOptions, AuraReport, RayProfile};
pub use config::{parse_config, RunConfig, Task};
pub use error::{Error, Result};
pub use ia::{build_grouping_tree, run_bipartition, Bipartition, GroupingTree, IaSettings, ProfileAgreement, UpdateRule};
pub use metric::{similarity_matrix, MetricKind, MetricSpec, Object, ObjectConfig, SquareMatrix};
pub use probe::{Classify, DrifterProbe, LabelRule, PointRecord};
pub use signature::{canonical_signature, Signature};
pub use scanner::{detect_transitions, measure_ima_thickness, refine_boundary, scan, AxisRange, LabelField, ScanGrid};
pub use trajectory::{trace_path, CrossingEvent, PathSpec, PathTrace};
