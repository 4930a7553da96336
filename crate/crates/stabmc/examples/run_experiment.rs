//! Declarative experiments end to end: build a config programmatically (the
//! same shape the TOML files and the `stabmc` binary use), run it, and read
//! the bundle back as plot data.
//!
//! ```bash
//! cargo run --example run_experiment
//! ```

use stabmc::experiment::{export_plotdata, preset, run_experiment};

fn main() {
    // Start from the built-in vertex/edge preset, shrink it for a quick run.
    let mut config = preset("rgg-vertex-edge").unwrap();
    config.s_grid = (8..=14).step_by(2).map(|e| 2f64.powi(e)).collect();
    config.reps_per_s = 200;
    config.output_dir = std::env::temp_dir()
        .join("stabmc_example_bundle")
        .to_string_lossy()
        .into_owned();

    println!("config:\n{}", config.to_toml().unwrap());
    let summary = run_experiment(&config).unwrap();
    println!("bundle written to {}", summary.dir.display());
    for name in &summary.manifest.artifacts {
        println!("  {name}");
    }
    for row in &summary.rate_rows {
        println!(
            "rate fit {}: exponent {:.4} against target {:.2} -> {}",
            row.curve,
            row.exponent,
            row.target,
            if row.pass { "pass" } else { "FAIL" }
        );
    }

    // Long-format export, ready for any plotting tool.
    let csv = export_plotdata(&summary.dir, &["gap_0_1".into()]).unwrap();
    println!("\nexported plot data:\n{csv}");
}
