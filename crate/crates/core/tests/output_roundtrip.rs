use hsmor::output::{crossing_csv, label_csv, membrane_csv, ppm_bytes, read_crossing_csv, read_label_csv, read_membrane_csv};
use hsmor::scanner::MembranePoint;
use hsmor::{scan, CrossingEvent, IaSettings, MetricSpec, Object, ObjectConfig, ScanGrid, Signature};
use proptest::prelude::*;

fn value() -> impl Strategy<Value = f64> {
    prop_oneof![any::<f64>().prop_filter("finite", |x| x.is_finite()), -1e3f64..1e3, Just(0.0), Just(-0.0)]
}

fn signature() -> impl Strategy<Value = Signature> {
    "[A-Za-z0-9 ()⊥,\"-]{1,16}".prop_map(Signature::from_raw)
}

proptest! {
    #[test]
    fn membrane_rows_round_trip(rows in prop::collection::vec((prop::collection::vec(value(), 3), signature(), signature(), value()), 0..20)) {
        let pts: Vec<MembranePoint> = rows
            .into_iter()
            .map(|(position, sig_a, sig_b, width)| MembranePoint { position, sig_a, sig_b, width })
            .collect();
        let text = membrane_csv(&pts).unwrap();
        let back = read_membrane_csv(&text, 3).unwrap();
        prop_assert_eq!(back.len(), pts.len());
        for (a, b) in pts.iter().zip(&back) {
            prop_assert_eq!(&a.sig_a, &b.sig_a);
            prop_assert_eq!(&a.sig_b, &b.sig_b);
            prop_assert_eq!(a.width.to_bits(), b.width.to_bits());
            for (x, y) in a.position.iter().zip(&b.position) {
                prop_assert_eq!(x.to_bits(), y.to_bits());
            }
        }
    }

    #[test]
    fn crossing_rows_round_trip(dim in 1usize..5, rows in prop::collection::vec((0.0f64..=1.0, prop::collection::vec(value(), 5), signature(), signature(), value()), 0..20)) {
        let events: Vec<CrossingEvent> = rows
            .into_iter()
            .map(|(t, p, before, after, width)| CrossingEvent { t, position: p[..dim].to_vec(), before, after, width })
            .collect();
        let text = crossing_csv(&events, dim).unwrap();
        prop_assert_eq!(read_crossing_csv(&text, dim).unwrap(), events);
    }
}

#[test]
fn label_csv_round_trip() {
    let cfg = ObjectConfig::with_fixed(vec![Object::new("A", [1.0, 1.0, 0.0]), Object::new("B", [0.0, 0.0, 1.0])], vec![0.0; 3])
        .unwrap();
    let field = scan(&cfg, &MetricSpec::euclidean(), &ScanGrid::xy_plane(0.5, -3.0, 4.0, 15), &IaSettings::default(), 1).unwrap();
    let text = label_csv(&field).unwrap();
    let rows = read_label_csv(&text, 3).unwrap();
    assert_eq!(rows.len(), field.len());
    for (idx, row) in rows.iter().enumerate() {
        assert_eq!(row.position, field.position(idx));
        assert_eq!(row.record, field.records[idx]);
    }
    let ppm = ppm_bytes(&field).unwrap();
    assert!(ppm.starts_with(b"P6\n15 15\n255\n"));
    assert_eq!(ppm.len(), b"P6\n15 15\n255\n".len() + 15 * 15 * 3);
}

#[test]
fn non_finite_values_are_refused() {
    let p = MembranePoint {
        position: vec![0.0, f64::NAN, 0.0],
        sig_a: Signature::from_raw("a"),
        sig_b: Signature::from_raw("b"),
        width: 0.0,
    };
    assert!(membrane_csv(&[p]).is_err());
}

#[test]
fn wrong_header_is_rejected() {
    assert!(read_membrane_csv("a,b,c\n1,2,3\n", 3).is_err());
}
