//! Save a trained model as a self-describing JSON artifact, reload it, and
//! confirm the reloaded model predicts identically. Also prints the training
//! cost annotation each kind carries.
//!
//! ```bash
//! cargo run --release --example model_artifacts
//! ```

use cladbench::eval::fit_on_indices;
use cladbench::{
    complexity_of, load_model, save_model, synthesize_dataset, EstimatorKind, EstimatorSpec,
    FeatureSetKind, SurrogateConfig, Target,
};

fn main() -> cladbench::Result<()> {
    let dataset = synthesize_dataset(&SurrogateConfig {
        n_experiment: 40,
        n_cfd: 60,
        noise_sd: 0.03,
        seed: 2,
        ..SurrogateConfig::default()
    })?;
    let all: Vec<usize> = (0..dataset.len()).collect();

    let spec = EstimatorSpec::new(EstimatorKind::RfReg)
        .with_int("n_estimators", 50)
        .with_int("max_depth", 8)
        .with_seed(2);
    let model = fit_on_indices(&spec, &dataset, FeatureSetKind::Full, Target::Depth, &all)?;

    let path = std::env::temp_dir().join("cladbench_example_model.json");
    save_model(&model, &path)?;
    let reloaded = load_model(&path)?;

    let queries: Vec<Vec<f64>> = (0..5)
        .map(|i| vec![0.1 + 0.2 * i as f64, 0.5, 0.3, 0.4])
        .collect();
    let a = model.predict(&queries)?;
    let b = reloaded.predict(&queries)?;
    assert_eq!(a, b, "reloaded artifact must predict identically");
    println!(
        "artifact round-trip OK: {} bytes at {}",
        std::fs::metadata(&path)?.len(),
        path.display()
    );
    println!("predictions: {a:?}\n");

    println!("training-cost annotations:");
    for kind in EstimatorKind::ALL {
        let c = complexity_of(kind);
        println!("  {:8} {}", kind.name(), c.expression);
    }
    Ok(())
}
