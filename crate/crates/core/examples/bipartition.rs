//! Iterative averaging on a hand-written similarity matrix, down to the full
//! grouping tree.

use hsmor::metric::Semantics;
use hsmor::{build_grouping_tree, canonical_signature, run_bipartition, IaSettings, SquareMatrix};

fn main() -> hsmor::Result<()> {
    let names: Vec<String> = ["P", "Q", "R", "S", "T"].iter().map(|s| s.to_string()).collect();
    #[rustfmt::skip]
    let values = vec![
        1.00, 0.92, 0.85, 0.20, 0.15,
        0.92, 1.00, 0.88, 0.25, 0.10,
        0.85, 0.88, 1.00, 0.30, 0.22,
        0.20, 0.25, 0.30, 1.00, 0.80,
        0.15, 0.10, 0.22, 0.80, 1.00,
    ];
    let s = SquareMatrix::from_values(names, values, Semantics::Similarity)?;
    let settings = IaSettings::default();

    let split = run_bipartition(&s, &settings)?;
    println!("groups: {:?} | {:?}", split.group_low, split.group_high);
    println!("cycles: {}, omega: {:.6}, -ln omega: {:.6}", split.cycles, split.omega, split.neg_ln_omega());

    let tree = build_grouping_tree(&s, &settings)?;
    println!("tree depth {}: {}", tree.depth(), canonical_signature(&tree, None));
    Ok(())
}
