//! Plugging a different averaging rule into the engine.
//!
//! This rule replaces every similarity by the mean of the two objects'
//! rows' products and rescales, a cruder cousin of the default.

use hsmor::ia::run_bipartition_with;
use hsmor::metric::Semantics;
use hsmor::{IaSettings, ProfileAgreement, SquareMatrix, UpdateRule};

struct RowProduct;

impl UpdateRule for RowProduct {
    fn cycle(&self, n: usize, current: &[f64], next: &mut [f64], tie_epsilon: f64) -> Result<(), f64> {
        let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
        for i in 0..n {
            next[i * n + i] = 1.0;
            for j in i + 1..n {
                let v: f64 = (0..n).map(|k| current[i * n + k] * current[j * n + k]).sum::<f64>() / n as f64;
                next[i * n + j] = v;
                lo = lo.min(v);
                hi = hi.max(v);
            }
        }
        if hi - lo < tie_epsilon {
            return Err(hi - lo);
        }
        for i in 0..n {
            for j in i + 1..n {
                let v = (next[i * n + j] - lo) / (hi - lo);
                next[i * n + j] = v;
                next[j * n + i] = v;
            }
        }
        Ok(())
    }
}

fn main() -> hsmor::Result<()> {
    let names: Vec<String> = ["w", "x", "y", "z"].iter().map(|s| s.to_string()).collect();
    let s = SquareMatrix::from_values(
        names,
        vec![1.0, 0.9, 0.3, 0.2, 0.9, 1.0, 0.25, 0.3, 0.3, 0.25, 1.0, 0.7, 0.2, 0.3, 0.7, 1.0],
        Semantics::Similarity,
    )?;
    let settings = IaSettings::default();
    for (name, split) in [
        ("profile agreement", run_bipartition_with(&ProfileAgreement, &s, &settings)?),
        ("row product", run_bipartition_with(&RowProduct, &s, &settings)?),
    ] {
        println!("{name:>18}: {:?} | {:?} after {} cycles", split.group_low, split.group_high, split.cycles);
    }
    Ok(())
}
