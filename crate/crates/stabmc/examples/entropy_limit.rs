//! The scaled directed nearest-neighbor length on the unit torus converges to
//! 1/2: the analytic moment of the Poisson nearest-neighbor distance.
//!
//! ```bash
//! cargo run --example entropy_limit
//! ```

use stabmc::process::WindowSpec;
use stabmc::scores::ScoreSpec;
use stabmc::statistics::{replicate, StatisticSpec};

fn main() {
    let w = WindowSpec::unit_torus(2);
    // The catalog applies the dilation prefactor s^{q/d} = s^{1/2}, so the
    // scaled length is the statistic divided by s.
    let spec = StatisticSpec::plain(ScoreSpec::KnnDirected { k: 1, q: 1.0 });
    println!("{:>9} {:>12} {:>10}", "s", "s^(-1/2) L", "error");
    for &s in &[1.0e3, 1.0e4, 1.0e5] {
        let reps = 16;
        let batch = replicate(&w, std::slice::from_ref(&spec), s, reps, 77, None).unwrap();
        let mean = batch.column_mean(0) / s;
        println!("{:>9} {:>12.5} {:>10.5}", s, mean, (mean - 0.5).abs());
    }
    println!("\nlimit: Gamma(3/2) / sqrt(pi) = 1/2 exactly");
}
