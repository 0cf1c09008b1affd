//! The estimator suite under a uniform fit/predict contract.
//!
//! Every estimator is configured through an [`EstimatorSpec`] (kind, typed
//! hyperparameters, seed), fits into an immutable [`TrainedModel`], and
//! predicts through the same two entry points regardless of kind. Fits are
//! fully deterministic: identical `(spec, X, y)` produce bitwise-identical
//! parameters.

pub mod adaboost;
pub mod boosting;
pub mod forest;
pub mod gnb;
pub mod gpr;
pub mod knn;
pub mod linear;
pub mod logistic;
pub mod mlp;
pub mod tree;

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::features::{FeatureSetKind, NormalizationParams};

/// Learning task of an estimator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Task {
    Regression,
    Classification,
}

impl fmt::Display for Task {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Task::Regression => "regression",
            Task::Classification => "classification",
        })
    }
}

/// Every estimator kind in the suite.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub enum EstimatorKind {
    Ols,
    Poly,
    Ridge,
    Lasso,
    KnnReg,
    KnnClf,
    DtReg,
    DtClf,
    RfReg,
    RfClf,
    Gbr,
    Gbc,
    AdaReg,
    AdaClf,
    MlpReg,
    MlpClf,
    LogReg,
    Gnb,
    Gpr,
}

impl EstimatorKind {
    pub const ALL: [EstimatorKind; 19] = [
        EstimatorKind::Ols,
        EstimatorKind::Poly,
        EstimatorKind::Ridge,
        EstimatorKind::Lasso,
        EstimatorKind::KnnReg,
        EstimatorKind::KnnClf,
        EstimatorKind::DtReg,
        EstimatorKind::DtClf,
        EstimatorKind::RfReg,
        EstimatorKind::RfClf,
        EstimatorKind::Gbr,
        EstimatorKind::Gbc,
        EstimatorKind::AdaReg,
        EstimatorKind::AdaClf,
        EstimatorKind::MlpReg,
        EstimatorKind::MlpClf,
        EstimatorKind::LogReg,
        EstimatorKind::Gnb,
        EstimatorKind::Gpr,
    ];

    pub fn task(self) -> Task {
        use EstimatorKind::*;
        match self {
            Ols | Poly | Ridge | Lasso | KnnReg | DtReg | RfReg | Gbr | AdaReg | MlpReg
            | Gpr => Task::Regression,
            KnnClf | DtClf | RfClf | Gbc | AdaClf | MlpClf | LogReg | Gnb => Task::Classification,
        }
    }

    pub fn name(self) -> &'static str {
        use EstimatorKind::*;
        match self {
            Ols => "ols",
            Poly => "poly",
            Ridge => "ridge",
            Lasso => "lasso",
            KnnReg => "knn_reg",
            KnnClf => "knn_clf",
            DtReg => "dt_reg",
            DtClf => "dt_clf",
            RfReg => "rf_reg",
            RfClf => "rf_clf",
            Gbr => "gbr",
            Gbc => "gbc",
            AdaReg => "ada_reg",
            AdaClf => "ada_clf",
            MlpReg => "mlp_reg",
            MlpClf => "mlp_clf",
            LogReg => "logreg",
            Gnb => "gnb",
            Gpr => "gpr",
        }
    }
}

impl FromStr for EstimatorKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        EstimatorKind::ALL
            .iter()
            .copied()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::UnsupportedKind(s.to_string()))
    }
}

impl fmt::Display for EstimatorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// One typed hyperparameter value.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ParamValue {
    Int(i64),
    Real(f64),
    Text(String),
}

impl fmt::Display for ParamValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ParamValue::Int(v) => write!(f, "{v}"),
            ParamValue::Real(v) => write!(f, "{v}"),
            ParamValue::Text(v) => f.write_str(v),
        }
    }
}

/// Name-to-value hyperparameter map with deterministic ordering.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct HyperParams(pub BTreeMap<String, ParamValue>);

impl HyperParams {
    pub fn set(&mut self, name: &str, value: ParamValue) {
        self.0.insert(name.to_string(), value);
    }

    pub fn get(&self, name: &str) -> Option<&ParamValue> {
        self.0.get(name)
    }

    pub fn int_or(&self, name: &str, default: i64) -> i64 {
        match self.0.get(name) {
            Some(ParamValue::Int(v)) => *v,
            _ => default,
        }
    }

    pub fn real_or(&self, name: &str, default: f64) -> f64 {
        match self.0.get(name) {
            Some(ParamValue::Real(v)) => *v,
            Some(ParamValue::Int(v)) => *v as f64,
            _ => default,
        }
    }

    pub fn text_or<'a>(&'a self, name: &str, default: &'a str) -> &'a str {
        match self.0.get(name) {
            Some(ParamValue::Text(v)) => v.as_str(),
            _ => default,
        }
    }
}

/// Full configuration of one estimator: kind, hyperparameters, seed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EstimatorSpec {
    pub kind: EstimatorKind,
    pub params: HyperParams,
    pub seed: u64,
}

impl EstimatorSpec {
    pub fn new(kind: EstimatorKind) -> Self {
        EstimatorSpec {
            kind,
            params: HyperParams::default(),
            seed: 0,
        }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_int(mut self, name: &str, value: i64) -> Self {
        self.params.set(name, ParamValue::Int(value));
        self
    }

    pub fn with_real(mut self, name: &str, value: f64) -> Self {
        self.params.set(name, ParamValue::Real(value));
        self
    }

    pub fn with_text(mut self, name: &str, value: &str) -> Self {
        self.params.set(name, ParamValue::Text(value.to_string()));
        self
    }

    /// Checks every hyperparameter against this kind's schema: the name must
    /// be known and the value mathematically valid.
    pub fn validate(&self) -> Result<()> {
        schema::validate(self)
    }

    pub(crate) fn spec_error(&self, name: &str, message: impl Into<String>) -> Error {
        Error::Spec {
            kind: self.kind.name().to_string(),
            name: name.to_string(),
            message: message.into(),
        }
    }
}

mod schema {
    use super::*;

    enum Check {
        IntMin(i64),
        IntRange(i64, i64),
        RealMin(f64),
        RealMinExclusive(f64),
        UnitIntervalExclusiveLow,
        Choice(&'static [&'static str]),
        HiddenLayers,
        Kernel,
    }

    fn rules(kind: EstimatorKind) -> &'static [(&'static str, Check)] {
        use Check::*;
        use EstimatorKind::*;
        match kind {
            Ols => &[],
            Poly => &[("degree", IntRange(1, 10))],
            Ridge | Lasso => &[("alpha", RealMin(0.0))],
            KnnReg | KnnClf => &[
                ("n_neighbors", IntMin(1)),
                ("weights", Choice(&["uniform", "distance"])),
                ("metric", Choice(&["minkowski", "euclidean", "manhattan"])),
                ("algorithm", Choice(&["auto", "ball-tree", "kd-tree", "brute"])),
                ("leaf_size", IntMin(1)),
            ],
            DtReg | DtClf => &[
                ("max_depth", IntMin(1)),
                ("max_features", Choice(&["auto", "sqrt", "log2"])),
                ("min_samples_split", IntMin(2)),
                ("min_samples_leaf", IntMin(1)),
                ("criterion", Choice(&["gini", "entropy"])),
            ],
            RfReg | RfClf => &[
                ("n_estimators", IntMin(1)),
                ("max_depth", IntMin(1)),
                ("max_features", Choice(&["auto", "sqrt", "log2"])),
                ("min_samples_split", IntMin(2)),
                ("min_samples_leaf", IntMin(1)),
                ("criterion", Choice(&["gini", "entropy"])),
                ("bootstrap", Choice(&["true", "false"])),
            ],
            Gbr | Gbc => &[
                ("n_estimators", IntMin(1)),
                ("learning_rate", RealMin(0.0)),
                ("max_depth", IntMin(1)),
                ("max_features", Choice(&["auto", "sqrt", "log2"])),
                ("min_samples_split", IntMin(2)),
                ("min_samples_leaf", IntMin(1)),
                ("subsample", UnitIntervalExclusiveLow),
            ],
            AdaReg => &[
                ("n_estimators", IntMin(1)),
                ("learning_rate", RealMinExclusive(0.0)),
                ("loss", Choice(&["linear", "square", "exponential"])),
            ],
            AdaClf => &[
                ("n_estimators", IntMin(1)),
                ("learning_rate", RealMinExclusive(0.0)),
            ],
            MlpReg | MlpClf => &[
                ("hidden_layer_sizes", HiddenLayers),
                ("activation", Choice(&["identity", "logistic", "tanh", "relu"])),
                ("optimizer", Choice(&["sgd", "adam", "lbfgs"])),
                ("learning_rate", RealMinExclusive(0.0)),
                ("alpha", RealMin(0.0)),
            ],
            LogReg => &[
                ("penalty", Choice(&["l1", "l2"])),
                ("c", RealMinExclusive(0.0)),
            ],
            Gnb => &[("var_smoothing", RealMin(0.0))],
            Gpr => &[("kernel", Kernel), ("alpha", RealMin(0.0))],
        }
    }

    pub(super) fn validate(spec: &EstimatorSpec) -> Result<()> {
        let rules = rules(spec.kind);
        for (name, value) in &spec.params.0 {
            let check = rules
                .iter()
                .find(|(n, _)| n == name)
                .map(|(_, c)| c)
                .ok_or_else(|| spec.spec_error(name, "unknown hyperparameter"))?;
            check_value(spec, name, value, check)?;
        }
        Ok(())
    }

    fn check_value(
        spec: &EstimatorSpec,
        name: &str,
        value: &ParamValue,
        check: &Check,
    ) -> Result<()> {
        let fail = |msg: String| Err(spec.spec_error(name, msg));
        match (check, value) {
            (Check::IntMin(lo), ParamValue::Int(v)) => {
                if v < lo {
                    return fail(format!("must be >= {lo}, got {v}"));
                }
            }
            (Check::IntRange(lo, hi), ParamValue::Int(v)) => {
                if v < lo || v > hi {
                    return fail(format!("must be in [{lo}, {hi}], got {v}"));
                }
            }
            (Check::RealMin(lo), v) => {
                let x = as_real(v).ok_or_else(|| spec.spec_error(name, "expected a number"))?;
                if !(x.is_finite() && x >= *lo) {
                    return fail(format!("must be >= {lo}, got {v}"));
                }
            }
            (Check::RealMinExclusive(lo), v) => {
                let x = as_real(v).ok_or_else(|| spec.spec_error(name, "expected a number"))?;
                if !(x.is_finite() && x > *lo) {
                    return fail(format!("must be > {lo}, got {v}"));
                }
            }
            (Check::UnitIntervalExclusiveLow, v) => {
                let x = as_real(v).ok_or_else(|| spec.spec_error(name, "expected a number"))?;
                if !(x.is_finite() && x > 0.0 && x <= 1.0) {
                    return fail(format!("must be in (0, 1], got {v}"));
                }
            }
            (Check::Choice(options), ParamValue::Text(v)) => {
                if !options.contains(&v.as_str()) {
                    return fail(format!("must be one of {options:?}, got `{v}`"));
                }
            }
            (Check::HiddenLayers, ParamValue::Text(v)) => {
                mlp::parse_hidden_layers(v)
                    .map_err(|msg| spec.spec_error(name, msg))?;
            }
            (Check::Kernel, ParamValue::Text(v)) => {
                gpr::parse_kernel(v).map_err(|msg| spec.spec_error(name, msg))?;
            }
            _ => return fail(format!("wrong value type: {value}")),
        }
        Ok(())
    }

    fn as_real(v: &ParamValue) -> Option<f64> {
        match v {
            ParamValue::Real(x) => Some(*x),
            ParamValue::Int(x) => Some(*x as f64),
            ParamValue::Text(_) => None,
        }
    }
}

/// Symbolic training-cost annotation attached to each model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelComplexity {
    pub expression: String,
    pub symbols: BTreeMap<String, String>,
}

/// Big-O training-cost annotation for a kind. Only the five annotated kind
/// groups carry an expression; everything else is `unspecified`.
pub fn complexity_of(kind: EstimatorKind) -> ModelComplexity {
    use EstimatorKind::*;
    let mut symbols = BTreeMap::new();
    let expression = match kind {
        Gbr | Gbc | RfReg | RfClf => {
            symbols.insert("k".into(), "number of trees (estimators)".into());
            symbols.insert("n".into(), "number of training samples".into());
            "O(knLog(n))"
        }
        Poly => {
            symbols.insert("n".into(), "number of training samples".into());
            "O(n^3)"
        }
        MlpReg | MlpClf => {
            symbols.insert("m".into(), "number of iterations".into());
            symbols.insert("A".into(), "neurons in the first hidden layer".into());
            symbols.insert("B".into(), "neurons in the second hidden layer".into());
            symbols.insert("n".into(), "number of training samples".into());
            symbols.insert("f".into(), "number of features".into());
            "O(mA^2B^2n^2f)"
        }
        KnnReg | KnnClf => {
            symbols.insert("k".into(), "number of neighbors".into());
            symbols.insert("n".into(), "number of training samples".into());
            symbols.insert("d".into(), "dimension of the data".into());
            "O(knd)"
        }
        LogReg => {
            symbols.insert("n".into(), "number of training samples".into());
            symbols.insert("d".into(), "dimension of the data".into());
            "O(nd)"
        }
        _ => "unspecified",
    };
    ModelComplexity {
        expression: expression.to_string(),
        symbols,
    }
}

/// Provenance of a fit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitMeta {
    pub n_train: usize,
    pub n_features: usize,
    pub feature_kind: Option<FeatureSetKind>,
    pub target: Option<String>,
    /// Notes such as solver substitutions.
    pub notes: Vec<String>,
    /// Wall time of the fit, milliseconds. Not serialized: artifacts must be
    /// byte-identical across reruns.
    #[serde(skip)]
    pub wall_time_ms: f64,
}

/// Learned state, one variant per estimator family.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum ModelParams {
    Linear(linear::LinearParams),
    Knn(knn::KnnParams),
    Tree(tree::TreeParams),
    Forest(forest::ForestParams),
    Boosting(boosting::BoostingParams),
    Ada(adaboost::AdaParams),
    Mlp(mlp::MlpParams),
    Logistic(logistic::LogisticParams),
    Gnb(gnb::GnbParams),
    Gpr(gpr::GprParams),
}

/// An immutable fitted estimator.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainedModel {
    pub schema_version: u32,
    pub spec: EstimatorSpec,
    pub task: Task,
    pub normalizer: NormalizationParams,
    pub params: ModelParams,
    pub fit_meta: FitMeta,
    pub complexity: ModelComplexity,
}

/// Fits an estimator on an already-normalized matrix, packaging the given
/// normalization parameters into the model.
pub fn fit_prepared(
    spec: &EstimatorSpec,
    x: &[Vec<f64>],
    y: &[f64],
    normalizer: NormalizationParams,
    feature_kind: Option<FeatureSetKind>,
    target: Option<String>,
) -> Result<TrainedModel> {
    spec.validate()?;
    let n = x.len();
    if n == 0 {
        return Err(Error::EmptyInput("fit needs at least one row"));
    }
    if y.len() != n {
        return Err(Error::Shape(format!(
            "X has {n} rows but y has {} entries",
            y.len()
        )));
    }
    let d = x[0].len();
    if d == 0 {
        return Err(Error::Shape("X must have at least one column".into()));
    }
    if x.iter().any(|row| row.len() != d) {
        return Err(Error::Shape("ragged feature matrix".into()));
    }
    let task = spec.kind.task();
    if task == Task::Classification && y.iter().any(|&v| v != 0.0 && v != 1.0) {
        return Err(Error::Validation {
            field: "y",
            message: "classification targets must be 0 or 1".into(),
        });
    }

    let start = std::time::Instant::now();
    let mut notes = Vec::new();
    let params = match spec.kind {
        EstimatorKind::Ols
        | EstimatorKind::Poly
        | EstimatorKind::Ridge
        | EstimatorKind::Lasso => ModelParams::Linear(linear::fit(spec, x, y)?),
        EstimatorKind::KnnReg | EstimatorKind::KnnClf => {
            ModelParams::Knn(knn::fit(spec, x, y)?)
        }
        EstimatorKind::DtReg | EstimatorKind::DtClf => ModelParams::Tree(tree::fit(spec, x, y)?),
        EstimatorKind::RfReg | EstimatorKind::RfClf => {
            ModelParams::Forest(forest::fit(spec, x, y)?)
        }
        EstimatorKind::Gbr | EstimatorKind::Gbc => {
            ModelParams::Boosting(boosting::fit(spec, x, y)?)
        }
        EstimatorKind::AdaReg | EstimatorKind::AdaClf => {
            ModelParams::Ada(adaboost::fit(spec, x, y)?)
        }
        EstimatorKind::MlpReg | EstimatorKind::MlpClf => {
            ModelParams::Mlp(mlp::fit(spec, x, y, &mut notes)?)
        }
        EstimatorKind::LogReg => ModelParams::Logistic(logistic::fit(spec, x, y)?),
        EstimatorKind::Gnb => ModelParams::Gnb(gnb::fit(spec, x, y)?),
        EstimatorKind::Gpr => ModelParams::Gpr(gpr::fit(spec, x, y)?),
    };

    Ok(TrainedModel {
        schema_version: crate::data::SCHEMA_VERSION,
        spec: spec.clone(),
        task,
        normalizer,
        params,
        fit_meta: FitMeta {
            n_train: n,
            n_features: d,
            feature_kind,
            target,
            notes,
            wall_time_ms: start.elapsed().as_secs_f64() * 1e3,
        },
        complexity: complexity_of(spec.kind),
    })
}

/// Fits an estimator directly on a feature matrix (no normalization step).
pub fn fit(spec: &EstimatorSpec, x: &[Vec<f64>], y: &[f64]) -> Result<TrainedModel> {
    let d = x.first().map_or(0, Vec::len);
    fit_prepared(spec, x, y, NormalizationParams::identity(d), None, None)
}

impl TrainedModel {
    fn check_arity(&self, x: &[Vec<f64>]) -> Result<()> {
        let d = self.fit_meta.n_features;
        if let Some(bad) = x.iter().find(|row| row.len() != d) {
            return Err(Error::Shape(format!(
                "model was fit on {d} features, got a row with {}",
                bad.len()
            )));
        }
        Ok(())
    }

    /// Predicts targets (regression) or class labels 0/1 (classification).
    /// Inputs must be in the same (normalized) space the model was fit on.
    pub fn predict(&self, x: &[Vec<f64>]) -> Result<Vec<f64>> {
        self.check_arity(x)?;
        match self.task {
            Task::Regression => self.raw_predict(x),
            Task::Classification => Ok(self
                .raw_proba(x)?
                .into_iter()
                .map(|p| f64::from(u8::from(p > 0.5)))
                .collect()),
        }
    }

    /// Probability of class 1 for each row. Classifiers only.
    pub fn predict_proba(&self, x: &[Vec<f64>]) -> Result<Vec<f64>> {
        if self.task != Task::Classification {
            return Err(Error::Task(format!(
                "predict_proba is undefined for {} model `{}`",
                self.task,
                self.spec.kind
            )));
        }
        self.check_arity(x)?;
        self.raw_proba(x)
    }

    fn raw_predict(&self, x: &[Vec<f64>]) -> Result<Vec<f64>> {
        match &self.params {
            ModelParams::Linear(p) => Ok(x.iter().map(|r| p.predict_row(r)).collect()),
            ModelParams::Knn(p) => Ok(x.iter().map(|r| p.predict_row(r)).collect()),
            ModelParams::Tree(p) => Ok(x.iter().map(|r| p.predict_row(r)).collect()),
            ModelParams::Forest(p) => Ok(x.iter().map(|r| p.predict_row(r)).collect()),
            ModelParams::Boosting(p) => Ok(x.iter().map(|r| p.predict_row(r)).collect()),
            ModelParams::Ada(p) => Ok(x.iter().map(|r| p.predict_row(r)).collect()),
            ModelParams::Mlp(p) => Ok(p.predict(x)),
            ModelParams::Gpr(p) => Ok(x.iter().map(|r| p.posterior_row(r).0).collect()),
            ModelParams::Logistic(_) | ModelParams::Gnb(_) => unreachable!("classifier"),
        }
    }

    fn raw_proba(&self, x: &[Vec<f64>]) -> Result<Vec<f64>> {
        match &self.params {
            ModelParams::Knn(p) => Ok(x.iter().map(|r| p.proba_row(r)).collect()),
            ModelParams::Tree(p) => Ok(x.iter().map(|r| p.proba_row(r)).collect()),
            ModelParams::Forest(p) => Ok(x.iter().map(|r| p.proba_row(r)).collect()),
            ModelParams::Boosting(p) => Ok(x.iter().map(|r| p.proba_row(r)).collect()),
            ModelParams::Ada(p) => Ok(x.iter().map(|r| p.proba_row(r)).collect()),
            ModelParams::Mlp(p) => Ok(p.predict(x)),
            ModelParams::Logistic(p) => Ok(x.iter().map(|r| p.proba_row(r)).collect()),
            ModelParams::Gnb(p) => Ok(x.iter().map(|r| p.proba_row(r)).collect()),
            _ => unreachable!("regressor"),
        }
    }
}

/// Writes the model artifact: a self-describing JSON document. Reloading
/// reproduces predictions exactly.
pub fn save_model(model: &TrainedModel, path: &Path) -> Result<()> {
    let mut doc = serde_json::to_string_pretty(model)?;
    doc.push('\n');
    std::fs::write(path, doc)?;
    Ok(())
}

/// Loads a model artifact written by [`save_model`].
pub fn load_model(path: &Path) -> Result<TrainedModel> {
    let doc = std::fs::read_to_string(path)?;
    let model: TrainedModel = serde_json::from_str(&doc)?;
    if model.schema_version != crate::data::SCHEMA_VERSION {
        return Err(Error::Integrity(format!(
            "artifact schema_version {} does not match supported {}",
            model.schema_version,
            crate::data::SCHEMA_VERSION
        )));
    }
    Ok(model)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn complexity_annotated_kinds() {
        assert_eq!(complexity_of(EstimatorKind::RfReg).expression, "O(knLog(n))");
        assert_eq!(complexity_of(EstimatorKind::Gbr).expression, "O(knLog(n))");
        assert_eq!(complexity_of(EstimatorKind::Poly).expression, "O(n^3)");
        assert_eq!(
            complexity_of(EstimatorKind::MlpClf).expression,
            "O(mA^2B^2n^2f)"
        );
        assert_eq!(complexity_of(EstimatorKind::KnnClf).expression, "O(knd)");
        assert_eq!(complexity_of(EstimatorKind::LogReg).expression, "O(nd)");
        assert_eq!(complexity_of(EstimatorKind::Gnb).expression, "unspecified");
        assert_eq!(complexity_of(EstimatorKind::Ridge).expression, "unspecified");
    }

    #[test]
    fn unknown_hyperparameter_rejected() {
        let spec = EstimatorSpec::new(EstimatorKind::Gbr).with_int("n_trees", 10);
        assert!(matches!(spec.validate(), Err(Error::Spec { .. })));
    }

    #[test]
    fn max_depth_zero_rejected() {
        let spec = EstimatorSpec::new(EstimatorKind::DtReg).with_int("max_depth", 0);
        assert!(matches!(spec.validate(), Err(Error::Spec { .. })));
    }

    #[test]
    fn ada_learning_rate_zero_rejected() {
        let spec = EstimatorSpec::new(EstimatorKind::AdaReg).with_real("learning_rate", 0.0);
        assert!(matches!(spec.validate(), Err(Error::Spec { .. })));
    }

    #[test]
    fn classification_targets_validated() {
        let spec = EstimatorSpec::new(EstimatorKind::Gnb);
        let x = vec![vec![0.0], vec![1.0]];
        assert!(fit(&spec, &x, &[0.0, 2.0]).is_err());
    }

    #[test]
    fn predict_empty_is_empty() {
        let spec = EstimatorSpec::new(EstimatorKind::Ols);
        let model = fit(&spec, &[vec![0.0], vec![1.0]], &[1.0, 3.0]).unwrap();
        assert!(model.predict(&[]).unwrap().is_empty());
    }

    #[test]
    fn arity_mismatch_rejected() {
        let spec = EstimatorSpec::new(EstimatorKind::Ols);
        let model = fit(&spec, &[vec![0.0], vec![1.0]], &[1.0, 3.0]).unwrap();
        assert!(matches!(
            model.predict(&[vec![0.0, 1.0]]),
            Err(Error::Shape(_))
        ));
    }

    #[test]
    fn proba_on_regressor_is_task_error() {
        let spec = EstimatorSpec::new(EstimatorKind::Ols);
        let model = fit(&spec, &[vec![0.0], vec![1.0]], &[1.0, 3.0]).unwrap();
        assert!(matches!(
            model.predict_proba(&[vec![0.5]]),
            Err(Error::Task(_))
        ));
    }

    #[test]
    fn artifact_round_trip() {
        let spec = EstimatorSpec::new(EstimatorKind::Ridge).with_real("alpha", 0.1);
        let x: Vec<Vec<f64>> = (0..10).map(|i| vec![i as f64, (i * i) as f64]).collect();
        let y: Vec<f64> = x.iter().map(|r| 2.0 * r[0] - 0.5 * r[1] + 1.0).collect();
        let model = fit(&spec, &x, &y).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("model.json");
        save_model(&model, &path).unwrap();
        let loaded = load_model(&path).unwrap();
        let q = vec![vec![3.5, 7.0], vec![-2.0, 0.25]];
        assert_eq!(model.predict(&q).unwrap(), loaded.predict(&q).unwrap());
    }
}
