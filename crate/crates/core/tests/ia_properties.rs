use hsmor::metric::Semantics;
use hsmor::{build_grouping_tree, canonical_signature, run_bipartition, GroupingTree, IaSettings, SquareMatrix};
use proptest::prelude::*;

fn names(n: usize) -> Vec<String> {
    (0..n).map(|i| format!("L{i:02}")).collect()
}

/// Symmetric similarity matrices with unit diagonal.
fn matrices(max_n: usize) -> impl Strategy<Value = SquareMatrix> {
    (3usize..=max_n).prop_flat_map(|n| {
        prop::collection::vec(0.0f64..1.0, n * (n - 1) / 2).prop_map(move |upper| build(n, &upper))
    })
}

fn build(n: usize, upper: &[f64]) -> SquareMatrix {
    let mut v = vec![1.0; n * n];
    let mut k = 0;
    for i in 0..n {
        for j in i + 1..n {
            v[i * n + j] = upper[k];
            v[j * n + i] = upper[k];
            k += 1;
        }
    }
    SquareMatrix::from_values(names(n), v, Semantics::Similarity).unwrap()
}

fn together(groups: (&[String], &[String]), a: &str, b: &str) -> bool {
    let has = |g: &[String], x: &str| g.iter().any(|l| l == x);
    (has(groups.0, a) && has(groups.0, b)) || (has(groups.1, a) && has(groups.1, b))
}

fn leaves(tree: &GroupingTree, out: &mut Vec<Vec<String>>) {
    match tree {
        GroupingTree::Leaf(l) => out.push(l.clone()),
        GroupingTree::Split { split, low, high } => {
            let mut all: Vec<String> = split.group_low.iter().chain(&split.group_high).cloned().collect();
            all.sort();
            let (mut l, mut h) = (low.labels(), high.labels());
            l.append(&mut h);
            l.sort();
            assert_eq!(all, l, "children do not partition their parent");
            leaves(low, out);
            leaves(high, out);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn two_nonempty_groups(s in matrices(10)) {
        let b = run_bipartition(&s, &IaSettings::default()).unwrap();
        prop_assert!(!b.group_low.is_empty() && !b.group_high.is_empty());
        let mut all: Vec<String> = b.group_low.iter().chain(&b.group_high).cloned().collect();
        all.sort();
        prop_assert_eq!(&all, &names(s.n()));
        prop_assert!(b.omega > 0.0 && b.omega <= 1.0);
        prop_assert!(b.cycles >= 1);
    }

    #[test]
    fn deterministic(s in matrices(10)) {
        let a = run_bipartition(&s, &IaSettings::default()).unwrap();
        let b = run_bipartition(&s, &IaSettings::default()).unwrap();
        prop_assert_eq!(a, b);
    }

    #[test]
    fn relabeling_does_not_change_the_signature(s in matrices(8), seed in any::<u64>()) {
        let n = s.n();
        let mut order: Vec<usize> = (0..n).collect();
        let mut x = seed;
        for i in (1..n).rev() {
            x = x.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            order.swap(i, (x >> 33) as usize % (i + 1));
        }
        let p = s.permuted(&order);
        let ta = build_grouping_tree(&s, &IaSettings::default()).unwrap();
        let tb = build_grouping_tree(&p, &IaSettings::default()).unwrap();
        prop_assert_eq!(canonical_signature(&ta, None), canonical_signature(&tb, None));
    }

    #[test]
    fn tree_leaves_cover_every_label_once(s in matrices(9)) {
        let t = build_grouping_tree(&s, &IaSettings::default()).unwrap();
        let mut out = Vec::new();
        leaves(&t, &mut out);
        prop_assert!(out.iter().all(|l| l.len() <= 2 && !l.is_empty()));
        let mut all: Vec<String> = out.into_iter().flatten().collect();
        all.sort();
        prop_assert_eq!(all, names(s.n()));
    }

    #[test]
    fn duplicates_stay_together(s in matrices(8), pick in any::<prop::sample::Index>()) {
        // Append a copy of one object.
        let n = s.n();
        let k = pick.index(n);
        let m = n + 1;
        let mut v = vec![1.0; m * m];
        let src = |i: usize| if i == n { k } else { i };
        for i in 0..m {
            for j in 0..m {
                if i != j {
                    v[i * m + j] = if src(i) == src(j) { 1.0 } else { s.get(src(i), src(j)) };
                }
            }
        }
        let labels = names(m);
        let d = SquareMatrix::from_values(labels.clone(), v, Semantics::Similarity).unwrap();
        let b = run_bipartition(&d, &IaSettings::default()).unwrap();
        prop_assert!(b.degenerate || together((&b.group_low, &b.group_high), &labels[k], &labels[n]));
    }

    #[test]
    fn swap_symmetric_labels_are_not_split(upper in prop::collection::vec(0.0f64..1.0, 36), pair in 0.0f64..1.0, n in 3usize..=9) {
        // L00 and L01 have identical similarities to every other object.
        let mut s = build(n, &upper[..n * (n - 1) / 2]).values().to_vec();
        for k in 2..n {
            s[n + k] = s[k];
            s[k * n + 1] = s[k];
        }
        s[1] = pair;
        s[n] = pair;
        let m = SquareMatrix::from_values(names(n), s, Semantics::Similarity).unwrap();
        let b = run_bipartition(&m, &IaSettings::default()).unwrap();
        prop_assert!(b.degenerate || together((&b.group_low, &b.group_high), "L00", "L01"), "{:?} | {:?}", b.group_low, b.group_high);
    }

    #[test]
    fn scaling_off_diagonal_keeps_the_partition(s in matrices(10), c in 0.05f64..=1.0) {
        let n = s.n();
        let scaled: Vec<f64> = (0..n * n).map(|k| if k / n == k % n { 1.0 } else { c * s.values()[k] }).collect();
        let t = SquareMatrix::from_values(names(n), scaled, Semantics::Similarity).unwrap();
        let a = run_bipartition(&s, &IaSettings::default()).unwrap();
        let b = run_bipartition(&t, &IaSettings::default()).unwrap();
        prop_assume!(!a.degenerate && !b.degenerate);
        prop_assert_eq!(a.group_low, b.group_low);
    }
}

#[test]
fn equilateral_triangle_is_degenerate() {
    let s = build(3, &[0.5, 0.5, 0.5]);
    let b = run_bipartition(&s, &IaSettings::default()).unwrap();
    assert!(b.degenerate);
    assert_eq!(b.group_low, vec!["L00".to_string()]);
}

#[test]
fn fewer_than_three_objects_rejected() {
    let s = SquareMatrix::from_values(names(2), vec![1.0, 0.3, 0.3, 1.0], Semantics::Similarity).unwrap();
    assert!(run_bipartition(&s, &IaSettings::default()).is_err());
}
