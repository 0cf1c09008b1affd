//! Generate a synthetic clad dataset, inspect its distributions, and round
//! trip it through the CSV schema.
//!
//! ```bash
//! cargo run --release --example synthesize_dataset
//! ```

use cladbench::{save_dataset, load_dataset, summarize_distribution, synthesize_dataset, SurrogateConfig};

fn main() -> cladbench::Result<()> {
    // 90 experiment-tagged + 235 CFD-tagged records, as a hybrid campaign
    // would collect; CFD rows get half the measurement noise.
    let config = SurrogateConfig {
        n_experiment: 90,
        n_cfd: 235,
        noise_sd: 0.05,
        seed: 42,
        ..SurrogateConfig::default()
    };
    let dataset = synthesize_dataset(&config)?;
    println!("generated {} records (seed {})", dataset.len(), config.seed);

    let summary = summarize_distribution(&dataset)?;
    println!(
        "labels: {} desirable / {} undesirable",
        summary.label_counts.0, summary.label_counts.1
    );
    for (name, stats) in [
        ("width", &summary.width),
        ("height", &summary.height),
        ("depth", &summary.depth),
    ] {
        println!(
            "{name:>6} µm: min {:8.1}  max {:8.1}  mean {:8.1}  std {:7.1}",
            stats.min, stats.max, stats.mean, stats.std
        );
        let peak = *stats.histogram.iter().max().unwrap() as f64;
        let bars: String = stats
            .histogram
            .iter()
            .map(|&c| {
                let t = (c as f64 / peak * 7.0).round() as usize;
                [' ', '.', ':', '-', '=', '+', '*', '#'][t]
            })
            .collect();
        println!("        [{bars}]");
    }

    // save/load is the identity at the stored 9-significant-digit precision
    let out = std::env::temp_dir().join("cladbench_example_dataset.csv");
    save_dataset(&dataset, &out)?;
    let reloaded = load_dataset(&out)?;
    assert_eq!(reloaded.len(), dataset.len());
    println!("round-tripped {} records through {}", reloaded.len(), out.display());
    Ok(())
}
