//! The deterministic covariance-gap curve for the vertex/edge pair and its
//! fitted decay exponent: s^{-1/d} in dimension d.
//!
//! ```bash
//! cargo run --example exact_gap_rate
//! ```

use stabmc::covariance::rgg_cov_exact;
use stabmc::rates::{fit_rate, rate_report};

fn main() {
    let grid: Vec<f64> = (8..=18).step_by(2).map(|e| 2f64.powi(e)).collect();
    let mut fits = Vec::new();
    for dim in [2usize, 3] {
        println!("dimension {dim}:");
        println!("  {:>10} {:>14} {:>14} {:>12}", "s", "cov/s", "gap", "gap*s^(1/d)");
        let mut curve = Vec::new();
        for &s in &grid {
            let e = rgg_cov_exact(dim, 1.0, s).unwrap();
            println!(
                "  {:>10} {:>14.8} {:>14.8} {:>12.6}",
                s,
                e.cov_over_s,
                e.gap,
                e.gap * s.powf(1.0 / dim as f64)
            );
            curve.push((s, e.gap, 0.0));
        }
        let fit = fit_rate(&curve).unwrap();
        println!("  fitted log-log slope: {:.4}\n", fit.exponent);
        fits.push((format!("gap_d{dim}"), fit));
    }
    println!("report against the target exponents -1/2 and -1/3:");
    for row in rate_report(&fits, &[-0.5, -1.0 / 3.0], 0.05) {
        println!(
            "  {:8} target {:>7.4}  fitted {:>7.4}  -> {}",
            row.curve,
            row.target,
            row.exponent,
            if row.pass { "pass" } else { "FAIL" }
        );
    }
}
