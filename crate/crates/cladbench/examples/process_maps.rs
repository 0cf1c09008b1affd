//! Build printability maps over the (power, velocity) plane from trained
//! models and export them as CSV, JSON, and SVG heatmaps.
//!
//! ```bash
//! cargo run --release --example process_maps
//! ```

use cladbench::eval::fit_on_indices;
use cladbench::procmap::{
    export_map, predict_geometry_map, predict_quality_map, GridSpec, MapFormat,
};
use cladbench::{
    synthesize_dataset, EstimatorKind, EstimatorSpec, FeatureSetKind, SurrogateConfig, Target,
};

fn main() -> cladbench::Result<()> {
    let dataset = synthesize_dataset(&SurrogateConfig {
        n_experiment: 60,
        n_cfd: 120,
        noise_sd: 0.04,
        seed: 30,
        ..SurrogateConfig::default()
    })?;
    let all: Vec<usize> = (0..dataset.len()).collect();

    let grid = GridSpec {
        power_axis: (100.0, 500.0, 40),
        velocity_axis: (2.0, 20.0, 30),
        feed_rate: 2.0,
        beam_radius: 0.5,
    };
    let out_dir = std::env::temp_dir().join("cladbench_maps");
    std::fs::create_dir_all(&out_dir)?;

    // geometry map from a boosted regressor
    let reg = EstimatorSpec::new(EstimatorKind::Gbr)
        .with_int("n_estimators", 200)
        .with_real("learning_rate", 0.1)
        .with_int("max_depth", 4)
        .with_seed(30);
    let width_model = fit_on_indices(&reg, &dataset, FeatureSetKind::Full, Target::Width, &all)?;
    let width_map = predict_geometry_map(&width_model, &grid)?;
    let lo = width_map.values.iter().flatten().fold(f64::INFINITY, |m, &v| m.min(v));
    let hi = width_map
        .values
        .iter()
        .flatten()
        .fold(f64::NEG_INFINITY, |m, &v| m.max(v));
    println!(
        "width map: {}x{} nodes, predicted range {:.0}..{:.0} µm",
        grid.velocity_axis.2, grid.power_axis.2, lo, hi
    );

    // quality map (class + probability) from a classifier
    let clf = EstimatorSpec::new(EstimatorKind::KnnClf)
        .with_int("n_neighbors", 9)
        .with_seed(30);
    let quality_model = fit_on_indices(&clf, &dataset, FeatureSetKind::Full, Target::Quality, &all)?;
    let (class_map, prob_map) = predict_quality_map(&quality_model, &grid)?;
    let desirable_cells = class_map
        .values
        .iter()
        .flatten()
        .filter(|&&c| c == 0.0)
        .count();
    println!(
        "quality map: {desirable_cells} of {} cells predicted desirable",
        grid.velocity_axis.2 * grid.power_axis.2
    );

    for (map, stem) in [
        (&width_map, "width"),
        (&class_map, "quality_class"),
        (&prob_map, "quality_prob"),
    ] {
        for (format, ext) in [
            (MapFormat::Csv, "csv"),
            (MapFormat::Json, "json"),
            (MapFormat::Svg, "svg"),
        ] {
            let path = out_dir.join(format!("{stem}.{ext}"));
            export_map(map, format, &path)?;
        }
    }
    println!("exported CSV/JSON/SVG for 3 maps under {}", out_dir.display());
    Ok(())
}
