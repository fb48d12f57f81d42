//! JSON model document.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::boost::{BoostConfig, Ensemble, StopReason};
use crate::cart::Tree;
use crate::data::FeatureSchema;
use crate::scalar::Scalar;

pub const MODEL_VERSION: &str = "tweakboost-model/1";

#[derive(Debug, Error)]
pub enum ModelError {
    #[error("malformed model JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("unsupported model version `{0}` (expected {MODEL_VERSION})")]
    Version(String),
    #[error("inconsistent model: {0}")]
    Inconsistent(String),
}

#[derive(Serialize, Deserialize)]
#[serde(bound(serialize = "T: Scalar", deserialize = "T: Scalar"))]
struct ModelDocument<T> {
    version: String,
    schema: Vec<FeatureSchema<T>>,
    alphas: Vec<T>,
    trees: Vec<Tree<T>>,
    trajectories: Vec<Vec<T>>,
    staged_errors: Vec<T>,
    config: BoostConfig<T>,
    stop_reason: StopReason,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    run_config: Option<serde_json::Value>,
}

impl<T: Scalar> Ensemble<T> {
    /// Serializes to the model document, optionally embedding the resolved
    /// run configuration. Output is byte-stable for a given ensemble.
    pub fn to_model_json(&self, run_config: Option<&serde_json::Value>) -> String {
        let doc = ModelDocument {
            version: MODEL_VERSION.to_string(),
            schema: self.schema.clone(),
            alphas: self.alphas.clone(),
            trees: self.trees.clone(),
            trajectories: self.trajectories.clone(),
            staged_errors: self.staged_errors.clone(),
            config: self.config,
            stop_reason: self.stop,
            run_config: run_config.cloned(),
        };
        let mut s = serde_json::to_string(&doc).expect("model serialization is infallible");
        s.push('\n');
        s
    }

    /// Parses and validates a model document; returns the embedded run
    /// configuration alongside the ensemble.
    pub fn from_model_json(json: &str) -> Result<(Ensemble<T>, Option<serde_json::Value>), ModelError> {
        let doc: ModelDocument<T> = serde_json::from_str(json)?;
        if doc.version != MODEL_VERSION {
            return Err(ModelError::Version(doc.version));
        }
        let k = doc.trees.len();
        let bad = |msg: String| Err(ModelError::Inconsistent(msg));
        if doc.alphas.len() != k {
            return bad(format!("{} alphas for {k} trees", doc.alphas.len()));
        }
        if !doc.staged_errors.is_empty() && doc.staged_errors.len() != k {
            return bad(format!("{} staged errors for {k} trees", doc.staged_errors.len()));
        }
        if !doc.trajectories.is_empty() {
            if doc.trajectories.len() != k + 1 {
                return bad(format!("{} trajectory rows for {k} trees (expected {})", doc.trajectories.len(), k + 1));
            }
            let n = doc.trajectories[0].len();
            if doc.trajectories.iter().any(|r| r.len() != n) {
                return bad("trajectory rows differ in length".into());
            }
        }
        if doc.alphas.iter().any(|a| !a.is_finite()) {
            return bad("non-finite stage weight".into());
        }
        let n_features = doc.schema.len();
        if let Some(f) = doc.trees.iter().filter_map(Tree::max_feature).max() {
            if f >= n_features {
                return bad(format!("tree splits on feature {f}, schema has {n_features}"));
            }
        }
        let ens = Ensemble {
            schema: doc.schema,
            trees: doc.trees,
            alphas: doc.alphas,
            trajectories: doc.trajectories,
            staged_errors: doc.staged_errors,
            config: doc.config,
            stop: doc.stop_reason,
        };
        Ok((ens, doc.run_config))
    }
}
