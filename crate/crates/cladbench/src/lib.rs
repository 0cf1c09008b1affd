//! Benchmark library for predicting laser-clad geometry and quality from
//! process parameters.
//!
//! The crate covers the full pipeline: a synthetic surrogate data source,
//! physics-aware featurization, a from-scratch estimator suite under one
//! fit/predict contract, metrics and cross-validation, randomized
//! hyperparameter search, and printability process maps over the
//! (power, velocity) plane.
//!
//! Each major capability has a runnable example:
//!
//! ```text
//! cargo run --release --example synthesize_dataset
//! cargo run --release --example featurization
//! cargo run --release --example train_regressor
//! cargo run --release --example classify_quality
//! cargo run --release --example cross_validation
//! cargo run --release --example benchmark_suite
//! cargo run --release --example tune_hyperparameters
//! cargo run --release --example process_maps
//! cargo run --release --example model_artifacts
//! ```
//!
//! The same workflows are scriptable through the `cladbench` binary
//! (`synth`, `benchmark`, `tune`, `procmap` subcommands).

pub mod cli;
pub mod data;
pub mod error;
pub mod eval;
pub mod features;
pub mod models;
pub mod procmap;
pub mod tune;

pub(crate) mod rng;

pub use data::{
    compute_dilution, k_fold_indices, label_quality, load_dataset, save_dataset,
    summarize_distribution, synthesize_dataset, train_test_split, CladRecord, Dataset,
    QualityClass, QualityLabel, Source, SplitIndices, SurrogateConfig, Target,
};
pub use error::{Error, Result};
pub use features::{
    denormalize, feature_matrix, features_from_inputs, featurize, fit_normalizer,
    linear_mass_density, normalize, volumetric_energy_density, FeatureSetKind, FeatureVector,
    NormalizationParams,
};
pub use models::{
    complexity_of, fit, fit_prepared, load_model, save_model, EstimatorKind, EstimatorSpec,
    ModelComplexity, ParamValue, Task, TrainedModel,
};
