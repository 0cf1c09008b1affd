//! Physics-aware features and min-max normalization.
//!
//! ```bash
//! cargo run --release --example featurization
//! ```

use cladbench::{
    denormalize, feature_matrix, fit_normalizer, normalize, synthesize_dataset,
    volumetric_energy_density, FeatureSetKind, SurrogateConfig,
};

fn main() -> cladbench::Result<()> {
    // The two derived features: energy per deposited volume and powder mass
    // per unit of travel.
    let e = volumetric_energy_density(300.0, 10.0, 0.5)?;
    println!("E(P=300 W, v=10 mm/s, r=0.5 mm) = {e:.4} J/mm³");
    let lambda = cladbench::linear_mass_density(2.0, 10.0)?;
    println!("λ(ṁ=2 g/s, v=10 mm/s)          = {lambda:.4} g/mm");

    let dataset = synthesize_dataset(&SurrogateConfig {
        n_experiment: 8,
        n_cfd: 0,
        noise_sd: 0.0,
        seed: 1,
        ..SurrogateConfig::default()
    })?;

    // models see either the raw machine settings or all four features
    for kind in [FeatureSetKind::MachineOnly, FeatureSetKind::Full] {
        let matrix = feature_matrix(&dataset, kind)?;
        println!(
            "\n{} feature set: {} columns {:?}",
            kind.name(),
            matrix[0].len(),
            kind.feature_names()
        );
        let params = fit_normalizer(&matrix)?;
        let normed = normalize(&params, &matrix)?;
        println!("first row raw:        {:?}", rounded(&matrix[0]));
        println!("first row normalized: {:?}", rounded(&normed[0]));
        let back = denormalize(&params, &normed)?;
        let max_err = matrix
            .iter()
            .flatten()
            .zip(back.iter().flatten())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0f64, f64::max);
        println!("denormalize(normalize(x)) max abs error: {max_err:.2e}");
    }
    Ok(())
}

fn rounded(row: &[f64]) -> Vec<f64> {
    row.iter().map(|v| (v * 1e4).round() / 1e4).collect()
}
