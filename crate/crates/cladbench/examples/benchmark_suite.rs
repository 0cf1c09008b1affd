//! Benchmark a roster of estimators across all four prediction tasks and
//! print a ranked table per target, machine-setting features against the
//! full physics-aware feature set.
//!
//! ```bash
//! cargo run --release --example benchmark_suite
//! ```

use cladbench::eval::{evaluate_on_indices, fit_on_indices, Report, SplitDescription};
use cladbench::{
    synthesize_dataset, train_test_split, EstimatorKind, EstimatorSpec, FeatureSetKind,
    SurrogateConfig, Target,
};

fn main() -> cladbench::Result<()> {
    let dataset = synthesize_dataset(&SurrogateConfig {
        n_experiment: 50,
        n_cfd: 110,
        noise_sd: 0.05,
        seed: 12,
        ..SurrogateConfig::default()
    })?;
    let split = train_test_split(dataset.len(), 0.2, 12)?;

    // a fast subset of the suite; swap in EstimatorKind::ALL for everything
    let regressors = [
        EstimatorKind::Ridge,
        EstimatorKind::Lasso,
        EstimatorKind::Poly,
        EstimatorKind::DtReg,
        EstimatorKind::KnnReg,
        EstimatorKind::Gpr,
        EstimatorKind::Gbr,
    ];
    let classifiers = [
        EstimatorKind::LogReg,
        EstimatorKind::Gnb,
        EstimatorKind::DtClf,
        EstimatorKind::KnnClf,
        EstimatorKind::Gbc,
    ];

    for features in [FeatureSetKind::MachineOnly, FeatureSetKind::Full] {
        println!("=== feature set: {} ===", features.name());
        for target in [Target::Width, Target::Height, Target::Depth] {
            let mut rows = Vec::new();
            for kind in regressors {
                let spec = quick_spec(kind);
                let model = fit_on_indices(&spec, &dataset, features, target, &split.train)?;
                let report = evaluate_on_indices(&model, &dataset, target, &split.test, split_desc())?;
                if let Report::Regression(r) = report {
                    rows.push((kind.name(), r.metrics.r2, r.metrics.mae));
                }
            }
            rows.sort_by(|a, b| b.1.total_cmp(&a.1));
            println!("{:>7}:", target.name());
            for (name, r2, mae) in rows {
                println!("    {name:8} R² {r2:+.4}   MAE {mae:8.2} µm");
            }
        }

        let mut rows = Vec::new();
        for kind in classifiers {
            let spec = quick_spec(kind);
            let model = fit_on_indices(&spec, &dataset, features, Target::Quality, &split.train)?;
            let report =
                evaluate_on_indices(&model, &dataset, Target::Quality, &split.test, split_desc())?;
            if let Report::Classification(c) = report {
                rows.push((kind.name(), c.metrics.accuracy, c.metrics.auc));
            }
        }
        rows.sort_by(|a, b| b.1.total_cmp(&a.1));
        println!("quality:");
        for (name, acc, auc) in rows {
            println!("    {name:8} accuracy {acc:.4}   AUC {auc:.4}");
        }
        println!();
    }
    Ok(())
}

fn split_desc() -> SplitDescription {
    SplitDescription {
        seed: 12,
        ratio: Some(0.2),
        k: None,
    }
}

/// Defaults sized for a quick demo run rather than peak accuracy.
fn quick_spec(kind: EstimatorKind) -> EstimatorSpec {
    let spec = EstimatorSpec::new(kind).with_seed(12);
    match kind {
        EstimatorKind::Gbr => spec
            .with_int("n_estimators", 300)
            .with_real("learning_rate", 0.08)
            .with_int("max_depth", 4),
        EstimatorKind::Gbc => spec
            .with_int("n_estimators", 150)
            .with_real("learning_rate", 0.2),
        EstimatorKind::KnnReg => spec.with_int("n_neighbors", 10),
        _ => spec,
    }
}
