//! k-fold cross-validation of a few estimators on one target.
//!
//! ```bash
//! cargo run --release --example cross_validation
//! ```

use cladbench::eval::cross_validate;
use cladbench::{
    synthesize_dataset, EstimatorKind, EstimatorSpec, FeatureSetKind, SurrogateConfig, Target,
};

fn main() -> cladbench::Result<()> {
    let dataset = synthesize_dataset(&SurrogateConfig {
        n_experiment: 60,
        n_cfd: 100,
        noise_sd: 0.05,
        seed: 3,
        ..SurrogateConfig::default()
    })?;

    println!("5-fold CV on depth (score: R²)\n");
    for kind in [
        EstimatorKind::Ridge,
        EstimatorKind::Poly,
        EstimatorKind::DtReg,
        EstimatorKind::KnnReg,
    ] {
        let spec = EstimatorSpec::new(kind).with_seed(3);
        let cv = cross_validate(&spec, &dataset, FeatureSetKind::Full, Target::Depth, 5, 3)?;
        let folds: Vec<String> = cv.scores.iter().map(|s| format!("{s:+.3}")).collect();
        println!(
            "{:8}  mean {:+.4} ± {:.4}   folds [{}]",
            kind.name(),
            cv.mean,
            cv.std,
            folds.join(", ")
        );
    }

    println!("\n5-fold CV on quality (score: accuracy)\n");
    for kind in [EstimatorKind::LogReg, EstimatorKind::Gnb, EstimatorKind::DtClf] {
        let spec = EstimatorSpec::new(kind).with_seed(3);
        let cv = cross_validate(&spec, &dataset, FeatureSetKind::Full, Target::Quality, 5, 3)?;
        println!("{:8}  mean {:.4} ± {:.4}", kind.name(), cv.mean, cv.std);
    }
    Ok(())
}
