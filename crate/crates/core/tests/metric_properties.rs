use hsmor::{similarity_matrix, MetricKind, MetricSpec, Object, ObjectConfig};
use proptest::prelude::*;

fn spec(kind: MetricKind) -> MetricSpec {
    MetricSpec::new(kind)
}

fn any_kind() -> impl Strategy<Value = MetricKind> {
    prop_oneof![Just(MetricKind::Euclidean), Just(MetricKind::CityBlock), Just(MetricKind::Xr)]
}

/// Between 3 and 7 objects in 1 to 4 dimensions; the last one is the drifter.
fn configs(coord: impl Strategy<Value = f64> + Clone) -> impl Strategy<Value = ObjectConfig> {
    (1usize..=4, 3usize..=7).prop_flat_map(move |(dim, n)| {
        prop::collection::vec(prop::collection::vec(coord.clone(), dim), n).prop_map(|pts| {
            let objs = pts.into_iter().enumerate().map(|(i, c)| Object::new(format!("O{i}"), c)).collect();
            ObjectConfig::new(objs, "O0").unwrap()
        })
    })
}

fn dyadic() -> impl Strategy<Value = f64> + Clone {
    (-64i32..=64).prop_map(|k| k as f64 / 8.0)
}

fn general() -> impl Strategy<Value = f64> + Clone {
    -10.0f64..10.0
}

/// Pairwise dissimilarity computed directly from the definitions.
fn oracle_similarity(a: &[f64], b: &[f64], spec: &MetricSpec) -> f64 {
    let diffs: Vec<f64> = a.iter().zip(b).map(|(x, y)| (x - y).abs()).collect();
    match spec.kind {
        MetricKind::Euclidean => 1.0 / (1.0 + diffs.iter().map(|d| d * d).sum::<f64>().sqrt()),
        MetricKind::CityBlock => {
            if diffs.iter().all(|&d| d == 0.0) {
                return 1.0;
            }
            let logs: f64 = diffs.iter().map(|d| d.max(spec.cb_floor).ln()).sum();
            1.0 / (1.0 + (logs / diffs.len() as f64).exp())
        }
        MetricKind::Xr => {
            let mean = diffs.iter().sum::<f64>() / diffs.len() as f64;
            (-spec.b.ln() * mean).exp()
        }
    }
}

proptest! {
    #[test]
    fn outputs_bounded_symmetric_unit_diagonal(cfg in configs(general()), kind in any_kind()) {
        let s = similarity_matrix(&cfg, &spec(kind)).unwrap();
        for i in 0..s.n() {
            prop_assert_eq!(s.get(i, i), 1.0);
            for j in 0..s.n() {
                let v = s.get(i, j);
                prop_assert!(v > 0.0 && v <= 1.0, "s({}, {}) = {}", i, j, v);
                prop_assert_eq!(v.to_bits(), s.get(j, i).to_bits());
            }
        }
    }

    #[test]
    fn matches_direct_evaluation(cfg in configs(general()), kind in any_kind()) {
        let sp = spec(kind);
        let s = similarity_matrix(&cfg, &sp).unwrap();
        let objs = cfg.objects();
        for i in 0..s.n() {
            for j in 0..s.n() {
                let want = oracle_similarity(&objs[i].coords, &objs[j].coords, &sp);
                prop_assert!((s.get(i, j) - want).abs() <= 1e-12, "{:?} ({}, {}): {} vs {}", kind, i, j, s.get(i, j), want);
            }
        }
    }

    #[test]
    fn translation_exact_on_dyadic_grid(cfg in configs(dyadic()), shift in prop::collection::vec(dyadic(), 4), kind in any_kind()) {
        let v = &shift[..cfg.dimension()];
        let a = similarity_matrix(&cfg, &spec(kind)).unwrap();
        let b = similarity_matrix(&cfg.translated(v), &spec(kind)).unwrap();
        prop_assert_eq!(a.values(), b.values());
    }

    #[test]
    fn translation_close_in_general(cfg in configs(general()), shift in prop::collection::vec(-100.0f64..100.0, 4), kind in any_kind()) {
        let v = &shift[..cfg.dimension()];
        let a = similarity_matrix(&cfg, &spec(kind)).unwrap();
        let b = similarity_matrix(&cfg.translated(v), &spec(kind)).unwrap();
        for (x, y) in a.values().iter().zip(b.values()) {
            prop_assert!((x - y).abs() <= 1e-12, "{} vs {}", x, y);
        }
    }

    #[test]
    fn relabeling_permutes_the_matrix(cfg in configs(general()), kind in any_kind(), seed in any::<u64>()) {
        let n = cfg.len();
        let mut order: Vec<usize> = (0..n).collect();
        let mut x = seed;
        for i in (1..n).rev() {
            x = x.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            order.swap(i, (x >> 33) as usize % (i + 1));
        }
        let objs: Vec<Object> = order.iter().map(|&k| cfg.objects()[k].clone()).collect();
        let shuffled = ObjectConfig::new(objs, cfg.drifter_name()).unwrap();
        let a = similarity_matrix(&cfg, &spec(kind)).unwrap();
        let b = similarity_matrix(&shuffled, &spec(kind)).unwrap();
        for i in 0..n {
            for j in 0..n {
                prop_assert_eq!(b.get(i, j).to_bits(), a.get(order[i], order[j]).to_bits());
            }
        }
    }

    #[test]
    fn xr_decays_log_linearly(d1 in 0.0f64..50.0, extra in 1e-3f64..50.0, b in 1.01f64..4.0) {
        let sp = MetricSpec::xr(b);
        let at = |d: f64| {
            let cfg = ObjectConfig::new(
                vec![Object::new("P", [0.0]), Object::new("Q", [d]), Object::new("R", [-1.0])],
                "P",
            )
            .unwrap();
            similarity_matrix(&cfg, &sp).unwrap().get(0, 1)
        };
        let (s1, s2) = (at(d1), at(d1 + extra));
        prop_assert!(s2 < s1);
        prop_assert!((-s1.ln() - b.ln() * d1).abs() <= 1e-12 * (1.0 + d1));
        prop_assert!((-s2.ln() - b.ln() * (d1 + extra)).abs() <= 1e-12 * (1.0 + d1 + extra));
    }

    #[test]
    fn duplicates_have_unit_similarity(p in prop::collection::vec(general(), 1..4), q in prop::collection::vec(general(), 4), kind in any_kind()) {
        let q = q[..p.len()].to_vec();
        let cfg = ObjectConfig::new(
            vec![Object::new("P", p.clone()), Object::new("P2", p), Object::new("Q", q)],
            "Q",
        )
        .unwrap();
        prop_assert_eq!(similarity_matrix(&cfg, &spec(kind)).unwrap().get(0, 1), 1.0);
    }
}

#[test]
fn invalid_parameters_are_rejected() {
    assert!(MetricSpec::xr(1.0).validate().is_err());
    assert!(MetricSpec { cb_floor: 0.0, ..MetricSpec::city_block() }.validate().is_err());
}
