//! Assembling statistic vectors over regions with test functions, and the
//! first/second difference operators.
//!
//! ```bash
//! cargo run --example statistic_vectors
//! ```

use stabmc::process::{pos_from, sample_homogeneous, Mark, MarkedPoint, WindowSpec};
use stabmc::scores::{RadiusRule, ScoreSpec};
use stabmc::statistics::{diff1, diff2, eval_vector, Region, StatisticSpec, TestFn};

fn main() {
    let w = WindowSpec::unit_cube(2);
    let cfg = sample_homogeneous(&w, 400.0, 11).unwrap();

    // Three statistics sharing one spatial index: a count over the left half,
    // a coordinate-weighted count, and the scaled edge count.
    let specs = vec![
        StatisticSpec {
            score: ScoreSpec::Unit,
            region: Region::Box { lo: vec![0.0, 0.0], hi: vec![0.5, 1.0] },
            testfn: TestFn::one(),
        },
        StatisticSpec {
            score: ScoreSpec::Unit,
            region: Region::All,
            testfn: TestFn::Coordinate { axis: 0 },
        },
        StatisticSpec::plain(ScoreSpec::rgg_edge(RadiusRule::Scaled { rho: 1.0 })),
    ];
    let values = eval_vector(&cfg, &specs).unwrap();
    println!("left-half count        = {}", values[0]);
    println!("x1-weighted count      = {:.4}", values[1]);
    println!("scaled edge count      = {}", values[2]);

    // First difference of the edge count when a point lands in a crowd vs in
    // a desert.
    let edge = &specs[2];
    let crowded = cfg.points[0].pos;
    let mut near = crowded;
    near[0] = (near[0] + 0.004).min(0.999);
    let d_near = diff1(&cfg, edge, MarkedPoint { pos: near, mark: Mark::None }).unwrap();
    println!("diff1 next to an existing point: {d_near}");

    // Second difference: interaction of two insertions. Distant pairs do not
    // interact for a finite-range score.
    let z1 = MarkedPoint { pos: pos_from(&[0.30, 0.31]), mark: Mark::None };
    let z2_far = MarkedPoint { pos: pos_from(&[0.80, 0.79]), mark: Mark::None };
    let z2_close = MarkedPoint { pos: pos_from(&[0.301, 0.32]), mark: Mark::None };
    println!(
        "diff2 far pair   = {}",
        diff2(&cfg, edge, z1, z2_far).unwrap()
    );
    println!(
        "diff2 close pair = {}",
        diff2(&cfg, edge, z1, z2_close).unwrap()
    );
}
