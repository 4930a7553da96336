//! Tour of the score catalog on one sampled configuration: each family
//! evaluated per point and summed into its statistic.
//!
//! ```bash
//! cargo run --example score_catalog
//! ```

use stabmc::process::{attach_colors, sample_homogeneous, WindowSpec};
use stabmc::scores::{score, EvalContext, Pattern, RadiusRule, ScoreSpec};

fn total(cfg: &stabmc::process::PointConfig, spec: &ScoreSpec) -> f64 {
    let ctx = EvalContext::new(cfg, &[spec]).unwrap();
    (0..cfg.len() as u32).map(|i| score(spec, &ctx, i).unwrap()).sum()
}

fn main() {
    let w = WindowSpec::unit_cube(2);
    let s = 300.0;
    let cfg = sample_homogeneous(&w, s, 7).unwrap();
    println!("configuration: {} points at intensity {s}\n", cfg.len());

    let scaled = RadiusRule::Scaled { rho: 1.0 };
    let catalog: Vec<ScoreSpec> = vec![
        ScoreSpec::Unit,
        ScoreSpec::KnnEdge { k: 1, q: 1.0 },
        ScoreSpec::KnnDirected { k: 1, q: 1.0 },
        ScoreSpec::KnnDegree { k: 1, j: 1 },
        ScoreSpec::RggComponent { k: 1, r: scaled },
        ScoreSpec::RggDegree { j: 0, r: scaled },
        ScoreSpec::RggSubgraph { pattern: Pattern::triangle(), r: scaled },
        ScoreSpec::rgg_edge(scaled),
        ScoreSpec::RipsVolume { k: 2, r: scaled, alpha: 1.0 },
        ScoreSpec::CriticalPoints { k: 1, r: scaled },
        ScoreSpec::CriticalPoints { k: 2, r: scaled },
    ];
    println!("{:42} statistic value", "score family");
    for spec in &catalog {
        println!("{:42} {:.6}", spec.label(), total(&cfg, spec));
    }

    // Colored marks: monochromatic nearest-neighbor edge counts per color.
    let colored = attach_colors(&cfg, &[0.5, 0.5], 8).unwrap();
    for color in 1..=2u16 {
        let spec = ScoreSpec::ColoredNn { color };
        println!("{:42} {:.6}", spec.label(), total(&colored, &spec));
    }

    // The degree counts partition the vertices.
    let mut partition = 0.0;
    for j in 0..12 {
        partition += total(&cfg, &ScoreSpec::KnnDegree { k: 1, j });
    }
    println!("\nsum of knn degree counts over j: {partition} (= point count)");
}
