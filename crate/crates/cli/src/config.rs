//! Resolved run configuration, echoed into every artifact, and reloading of
//! the training split a model was fitted on.

use std::path::PathBuf;

use serde::{Deserialize, Serialize};
use tweakboost::data::split;
use tweakboost::demo::{adult_like, toy_2d};
use tweakboost::{load_csv, Dataset64, LabelMap};

use crate::args::{Demo, TrainArgs};
use crate::CliError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DataSource {
    Csv {
        path: PathBuf,
        label_column: String,
        /// `None` means numeric ±1 labels.
        label_map: Option<String>,
    },
    Demo {
        name: String,
        rows: usize,
        seed: u64,
    },
}

/// How the training split was produced; stored in the model file so later
/// commands can resolve row indices and recompute agreement rates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainConfig {
    pub command: String,
    pub data: DataSource,
    #[serde(rename = "K")]
    pub k: usize,
    pub max_depth: usize,
    pub seed: u64,
    pub train_fraction: Option<f64>,
    pub out: PathBuf,
}

impl TrainConfig {
    pub fn from_args(a: &TrainArgs) -> Result<Self, CliError> {
        if let Some(f) = a.train_fraction {
            if !(f > 0.0 && f < 1.0) {
                return Err(CliError::Usage(format!("--train-fraction must lie in (0, 1), got {f}")));
            }
        }
        let data = match (&a.data, a.demo) {
            (Some(path), _) => DataSource::Csv {
                path: path.clone(),
                label_column: a.label_column.clone(),
                label_map: a.label_map.clone(),
            },
            (None, Some(d)) => DataSource::Demo {
                name: match d {
                    Demo::Adult => "adult",
                    Demo::Toy2d => "toy2d",
                }
                .to_string(),
                rows: a.demo_rows as usize,
                seed: a.seed,
            },
            (None, None) => return Err(CliError::Usage("one of --data or --demo is required".into())),
        };
        Ok(TrainConfig {
            command: "train".into(),
            data,
            k: a.k as usize,
            max_depth: a.depth as usize,
            seed: a.seed,
            train_fraction: a.train_fraction,
            out: a.out.clone(),
        })
    }

    /// Loads the full dataset and returns `(train, test)`; `test` is `None`
    /// without a split.
    pub fn load(&self) -> Result<(Dataset64, Option<Dataset64>), CliError> {
        let ds = match &self.data {
            DataSource::Csv {
                path,
                label_column,
                label_map,
            } => {
                let map = match label_map {
                    Some(s) => LabelMap::parse(s).map_err(|e| CliError::Usage(e.to_string()))?,
                    None => LabelMap::numeric(),
                };
                load_csv(path, label_column, &map).map_err(|e| CliError::Data(format!("{}: {e}", path.display())))?
            }
            DataSource::Demo { name, rows, seed } => match name.as_str() {
                "adult" => adult_like(*rows, *seed),
                "toy2d" => toy_2d(*rows, *seed),
                other => return Err(CliError::Data(format!("unknown demo dataset `{other}`"))),
            },
        };
        match self.train_fraction {
            None => Ok((ds, None)),
            Some(f) => {
                let (train, test) = split(&ds, f, self.seed).map_err(|e| CliError::Data(e.to_string()))?;
                Ok((train, Some(test)))
            }
        }
    }

    /// Recovers the training configuration embedded in a model file.
    pub fn from_embedded(run_config: Option<&serde_json::Value>) -> Result<Self, CliError> {
        let v = run_config.ok_or_else(|| {
            CliError::Data("model has no embedded run configuration; cannot locate its training data".into())
        })?;
        serde_json::from_value(v.clone())
            .map_err(|e| CliError::Data(format!("model's embedded run configuration is unreadable: {e}")))
    }
}
