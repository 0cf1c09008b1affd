//! Randomized hyperparameter search over a table-defined space, scored by
//! 3-fold cross-validation.
//!
//! ```bash
//! cargo run --release --example tune_hyperparameters
//! ```

use cladbench::tune::{default_search_space, random_search};
use cladbench::{synthesize_dataset, FeatureSetKind, SurrogateConfig, Target, Task};

fn main() -> cladbench::Result<()> {
    let dataset = synthesize_dataset(&SurrogateConfig {
        n_experiment: 40,
        n_cfd: 80,
        noise_sd: 0.05,
        seed: 9,
        ..SurrogateConfig::default()
    })?;

    let space = default_search_space("dt", Task::Regression)?;
    println!("search space for {}:", space.kind);
    for (name, dist) in &space.params {
        println!("  {name:18} {dist:?}");
    }

    let result = random_search(
        &space,
        &dataset,
        FeatureSetKind::Full,
        Target::Depth,
        3,  // folds
        15, // candidates
        9,  // seed
    )?;

    println!("\ntrials (objective: validation MSE, minimized):");
    for (i, trial) in result.trials.iter().enumerate() {
        let marker = if i == result.best { " <- best" } else { "" };
        match trial.mean_score {
            Some(score) => {
                let depth = trial.spec.params.int_or("max_depth", -1);
                let msl = trial.spec.params.int_or("min_samples_leaf", -1);
                println!(
                    "  #{i:<3} mse {score:12.1}  max_depth {depth:4}  min_samples_leaf {msl}{marker}"
                );
            }
            None => println!("  #{i:<3} failed: {}", trial.error.as_deref().unwrap_or("?")),
        }
    }
    println!(
        "\nwinner: trial #{} with validation MSE {:.1}",
        result.best,
        result.best_score()
    );
    Ok(())
}
