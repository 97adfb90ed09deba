//! Similarity matrices for the three metrics, and how XR is assembled from
//! per-parameter monomer matrices.

use hsmor::metric::{hybridize_geometric_mean, monomer_matrix};
use hsmor::{similarity_matrix, MetricSpec, Object, ObjectConfig, SquareMatrix};

fn show(title: &str, m: &SquareMatrix) {
    println!("{title}");
    print!("{:>6}", "");
    for n in m.names() {
        print!("{n:>10}");
    }
    println!();
    for i in 0..m.n() {
        print!("{:>6}", m.names()[i]);
        for j in 0..m.n() {
            print!("{:>10.6}", m.get(i, j));
        }
        println!();
    }
    println!();
}

fn main() -> hsmor::Result<()> {
    let cfg = ObjectConfig::new(
        vec![
            Object::new("A", [1.0, 1.0, 0.0]),
            Object::new("B", [0.0, 0.0, 1.0]),
            Object::new("Dr", [0.3, 0.6, 0.2]),
        ],
        "Dr",
    )?;

    show("Euclidean", &similarity_matrix(&cfg, &MetricSpec::euclidean())?);
    show("city block", &similarity_matrix(&cfg, &MetricSpec::city_block())?);

    let xr = MetricSpec::xr(1.5);
    let monomers: Vec<SquareMatrix> = (0..cfg.dimension()).map(|p| monomer_matrix(&cfg, p, &xr)).collect::<Result<_, _>>()?;
    for (p, m) in monomers.iter().enumerate() {
        show(&format!("XR monomer for parameter {p}"), m);
    }
    let hybrid = hybridize_geometric_mean(&monomers)?;
    let direct = similarity_matrix(&cfg, &xr)?;
    show("XR hybrid (geometric mean of monomers)", &hybrid);
    let worst = hybrid.values().iter().zip(direct.values()).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    println!("largest difference from the direct XR matrix: {worst:e}");
    Ok(())
}
