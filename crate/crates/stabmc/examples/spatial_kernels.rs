//! The geometry kernels underneath the scores: grid-indexed neighbor queries,
//! circumspheres, interior tests, and simplex volumes.
//!
//! ```bash
//! cargo run --example spatial_kernels
//! ```

use stabmc::geometry::{center_in_interior, circumsphere, simplex_volume, GridIndex};
use stabmc::process::{pos_from, sample_homogeneous, WindowSpec};

fn main() {
    // Certified kNN on a periodic window: ring expansion stops only once the
    // k-th distance beats every unexplored cell.
    let torus = WindowSpec::unit_torus(2);
    let cfg = sample_homogeneous(&torus, 200.0, 3).unwrap();
    let index = GridIndex::build(&torus, cfg.points.iter().map(|p| p.pos).collect());
    let query = pos_from(&[0.01, 0.99]);
    let nn = index.knn(&query, 3, None).unwrap();
    println!("3 nearest neighbors of the corner point (wrapping across the seam):");
    for id in nn {
        let p = index.position(id);
        println!(
            "  point {id} at ({:.3}, {:.3}), distance {:.4}",
            p[0],
            p[1],
            index.metric().dist(&query, p)
        );
    }
    let within = index.range(&query, 0.08, None).len();
    println!("points within 0.08 of the query: {within}");

    // Circumspheres and the interior test that defines critical points.
    let right = [pos_from(&[0.0, 0.0]), pos_from(&[1.0, 0.0]), pos_from(&[0.0, 1.0])];
    let cs = circumsphere(&right, 2).unwrap();
    println!(
        "\nright triangle: circumcenter ({}, {}), radius {:.6}",
        cs.center[0], cs.center[1], cs.radius
    );
    println!(
        "circumcenter strictly inside the triangle: {}",
        center_in_interior(&right, &cs.center, 2).unwrap()
    );

    let acute = [pos_from(&[0.0, 0.0]), pos_from(&[1.0, 0.0]), pos_from(&[0.5, 0.8])];
    let cs = circumsphere(&acute, 2).unwrap();
    println!(
        "acute triangle: circumcenter strictly inside: {}",
        center_in_interior(&acute, &cs.center, 2).unwrap()
    );

    // Simplex volumes up to the ambient dimension.
    let tet = [
        pos_from(&[0.0, 0.0, 0.0]),
        pos_from(&[1.0, 0.0, 0.0]),
        pos_from(&[0.0, 1.0, 0.0]),
        pos_from(&[0.0, 0.0, 1.0]),
    ];
    println!("\nunit right tetrahedron volume: {} (= 1/6)", simplex_volume(&tet, 3));
}
