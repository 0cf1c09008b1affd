//! Classify clads into desirable/undesirable from process inputs and look at
//! ROC, AUC, and the confusion matrix.
//!
//! ```bash
//! cargo run --release --example classify_quality
//! ```

use cladbench::eval::{evaluate_on_indices, fit_on_indices, Report, SplitDescription};
use cladbench::{
    synthesize_dataset, train_test_split, EstimatorKind, EstimatorSpec, FeatureSetKind,
    SurrogateConfig, Target,
};

fn main() -> cladbench::Result<()> {
    let dataset = synthesize_dataset(&SurrogateConfig {
        seed: 21,
        ..SurrogateConfig::default()
    })?;
    let split = train_test_split(dataset.len(), 0.2, 21)?;

    for kind in [
        EstimatorKind::LogReg,
        EstimatorKind::KnnClf,
        EstimatorKind::Gnb,
    ] {
        let spec = EstimatorSpec::new(kind).with_seed(21);
        let model =
            fit_on_indices(&spec, &dataset, FeatureSetKind::Full, Target::Quality, &split.train)?;
        let report = evaluate_on_indices(
            &model,
            &dataset,
            Target::Quality,
            &split.test,
            SplitDescription {
                seed: 21,
                ratio: Some(0.2),
                k: None,
            },
        )?;
        if let Report::Classification(c) = report {
            println!(
                "{:8}  accuracy {:.3}  AUC {:.3} ({:.2}%)",
                kind.name(),
                c.metrics.accuracy,
                c.metrics.auc,
                c.metrics.auc_pct
            );
            let [[tn, fp], [fn_, tp]] = c.confusion;
            println!("          confusion [[TN {tn}, FP {fp}], [FN {fn_}, TP {tp}]]");
            let (first, last) = (c.roc.first().unwrap(), c.roc.last().unwrap());
            println!(
                "          ROC: {} points from ({:.0},{:.0}) to ({:.0},{:.0})",
                c.roc.len(),
                first.0,
                first.1,
                last.0,
                last.1
            );
        }
    }
    Ok(())
}
