//! Train one gradient-boosting regressor on clad width and evaluate it held
//! out.
//!
//! ```bash
//! cargo run --release --example train_regressor
//! ```

use cladbench::eval::{evaluate_on_indices, fit_on_indices, Report, SplitDescription};
use cladbench::{
    synthesize_dataset, train_test_split, EstimatorKind, EstimatorSpec, FeatureSetKind,
    SurrogateConfig, Target,
};

fn main() -> cladbench::Result<()> {
    let dataset = synthesize_dataset(&SurrogateConfig {
        seed: 7,
        ..SurrogateConfig::default()
    })?;
    let split = train_test_split(dataset.len(), 0.2, 7)?;
    println!(
        "{} records: {} train / {} test",
        dataset.len(),
        split.train.len(),
        split.test.len()
    );

    let spec = EstimatorSpec::new(EstimatorKind::Gbr)
        .with_int("n_estimators", 400)
        .with_real("learning_rate", 0.05)
        .with_int("max_depth", 4)
        .with_seed(7);
    let model = fit_on_indices(&spec, &dataset, FeatureSetKind::Full, Target::Width, &split.train)?;
    println!(
        "fitted {} in {:.0} ms (complexity {})",
        spec.kind,
        model.fit_meta.wall_time_ms,
        model.complexity.expression
    );

    let report = evaluate_on_indices(
        &model,
        &dataset,
        Target::Width,
        &split.test,
        SplitDescription {
            seed: 7,
            ratio: Some(0.2),
            k: None,
        },
    )?;
    if let Report::Regression(r) = report {
        println!("held-out R² = {:.4}, MAE = {:.2} µm", r.metrics.r2, r.metrics.mae);
        println!("\nparity (actual vs predicted, first 8 test points):");
        for (actual, predicted) in r.parity.iter().take(8) {
            println!("  {actual:9.1} µm  ->  {predicted:9.1} µm");
        }
    }
    Ok(())
}
