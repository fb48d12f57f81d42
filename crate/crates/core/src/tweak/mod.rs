//! Counterfactual search by epsilon-tweaking single tree paths.
//!
//! For an instance `x` with full-ensemble prediction `s`, every tree that
//! agrees with `s` is searched for paths ending in a `-s` leaf. Each such
//! path yields one candidate: `x` with the violated features moved just
//! (epsilon) inside the path's box. Candidates are always judged by the full
//! ensemble; the closest one that flips the prediction is the explanation.
//! A prefix length `K'` restricts which trees are searched, never which
//! trees vote.

mod oracle;

pub use oracle::{brute_force_oracle, grid_slack, oracle_grid, uniform_grid, GRID_LIMIT};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::boost::Ensemble;
use crate::cart::{path_to_box, FeasibleBox, Path};
use crate::data::{FeatureSchema, FeatureStats, Instance};
use crate::prune::truncation_certificate;
use crate::scalar::Scalar;
use crate::sign::Sign;

#[derive(Debug, Error, PartialEq)]
pub enum TweakError {
    #[error("instance has {found} features, model expects {expected}")]
    Arity { expected: usize, found: usize },
    #[error("epsilon must be finite and positive")]
    BadEpsilon,
    #[error("prefix length {k_prime} outside 1..={n_trees}")]
    BadPrefix { k_prime: usize, n_trees: usize },
    #[error("instance is already predicted {0}; request must target the opposite class")]
    AlreadyTarget(Sign),
    #[error("instance is misclassified (label {label}, prediction {prediction})")]
    Misclassified { label: Sign, prediction: Sign },
    #[error("oracle grid has {points} points, limit is {limit}")]
    GridTooLarge { points: u128, limit: u128 },
    #[error("ensemble has no trees")]
    EmptyEnsemble,
    #[error("thread pool: {0}")]
    ThreadPool(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EpsilonMode {
    Absolute,
    /// `value * (max_f - min_f)` per feature.
    RangeScaled,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EpsilonPolicy<T> {
    pub mode: EpsilonMode,
    pub value: T,
}

impl<T: Scalar> Default for EpsilonPolicy<T> {
    fn default() -> Self {
        EpsilonPolicy {
            mode: EpsilonMode::RangeScaled,
            value: T::lit(0.01),
        }
    }
}

impl<T: Scalar> EpsilonPolicy<T> {
    pub fn absolute(value: T) -> Self {
        EpsilonPolicy {
            mode: EpsilonMode::Absolute,
            value,
        }
    }

    pub fn range_scaled(value: T) -> Self {
        EpsilonPolicy {
            mode: EpsilonMode::RangeScaled,
            value,
        }
    }

    /// Resolves per-feature epsilons; constant features get `value`.
    pub fn per_feature(&self, schema: &[FeatureSchema<T>]) -> Result<Vec<T>, TweakError> {
        if !(self.value.is_finite() && self.value > T::zero()) {
            return Err(TweakError::BadEpsilon);
        }
        Ok(schema
            .iter()
            .map(|f| match self.mode {
                EpsilonMode::Absolute => self.value,
                EpsilonMode::RangeScaled if f.constant || f.range() <= T::zero() => self.value,
                EpsilonMode::RangeScaled => self.value * f.range(),
            })
            .collect())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Norm {
    /// Euclidean distance in standardized units.
    #[default]
    L2Std,
    /// Manhattan distance in standardized units.
    L1Std,
    /// Number of changed features.
    L0,
}

/// Distance between `x` and `candidate`; features marked excluded (constant
/// in training) do not count.
pub fn distance<T: Scalar>(x: &[T], candidate: &[T], stats: &[FeatureStats<T>], norm: Norm) -> T {
    let terms = x
        .iter()
        .zip(candidate)
        .zip(stats)
        .filter(|(_, s)| !s.excluded)
        .map(|((&a, &b), s)| (a, b, s.stddev));
    match norm {
        Norm::L2Std => terms.fold(T::zero(), |acc, (a, b, sd)| {
            let z = (a - b) / sd;
            acc + z * z
        })
        .sqrt(),
        Norm::L1Std => terms.fold(T::zero(), |acc, (a, b, sd)| acc + ((a - b) / sd).abs()),
        Norm::L0 => terms.fold(T::zero(), |acc, (a, b, _)| if a != b { acc + T::one() } else { acc }),
    }
}

/// Result of moving `x` into one path's box.
#[derive(Debug, Clone, PartialEq)]
pub enum Transform<T> {
    Feasible { values: Vec<T>, tweaked: Vec<usize> },
    /// No point at least epsilon inside the box exists on some violated
    /// feature, or the path itself is contradictory.
    Infeasible,
}

/// Epsilon-transformation of `x` against a path's box. Features already
/// inside their interval are left alone; violated ones move to `upper - ε`
/// (when above) or `lower + ε` (when at or below the open lower bound).
pub fn epsilon_transform_box<T: Scalar>(x: &[T], b: &FeasibleBox<T>, eps: &[T]) -> Transform<T> {
    let mut values = x.to_vec();
    let mut tweaked = Vec::new();
    for (f, iv) in b.intervals.iter().enumerate() {
        let v = x[f];
        if iv.contains(v) {
            continue;
        }
        let e = eps[f];
        if iv.width().is_nan() || iv.width() <= e {
            return Transform::Infeasible;
        }
        let moved = if v > iv.upper { iv.upper - e } else { iv.lower + e };
        if !iv.contains(moved) {
            return Transform::Infeasible;
        }
        values[f] = moved;
        tweaked.push(f);
    }
    Transform::Feasible { values, tweaked }
}

/// [`epsilon_transform_box`] applied to a path; contradictory paths are
/// infeasible.
pub fn epsilon_transform<T: Scalar>(x: &[T], path: &Path<T>, eps: &[T]) -> Result<Transform<T>, TweakError> {
    if eps.len() != x.len() {
        return Err(TweakError::Arity {
            expected: eps.len(),
            found: x.len(),
        });
    }
    Ok(match path_to_box(path, x.len()) {
        Ok(b) => epsilon_transform_box(x, &b, eps),
        Err(_) => Transform::Infeasible,
    })
}

/// Where a candidate came from: tree `k` and its `j`-th opposite-sign path.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct CandidateSource {
    pub tree: usize,
    pub path: usize,
    pub leaf: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Candidate<T> {
    pub values: Vec<T>,
    pub source: CandidateSource,
    pub tweaked_features: Vec<usize>,
    pub ensemble_verdict: Sign,
    pub distance: T,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureDelta<T> {
    pub feature: usize,
    pub name: String,
    pub old: T,
    pub new: T,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Counterfactual<T> {
    pub original: Instance<T>,
    pub prediction: Sign,
    pub transformed: Vec<T>,
    pub delta: Vec<FeatureDelta<T>>,
    pub distance: T,
    pub n_candidates_evaluated: usize,
    pub k_prime_used: Option<usize>,
    /// `None` for oracle results.
    pub source: Option<CandidateSource>,
    pub truncation_certificate: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct NotFound<T> {
    pub original: Instance<T>,
    pub prediction: Sign,
    pub n_candidates_evaluated: usize,
    pub k_prime_used: Option<usize>,
    pub truncation_certificate: bool,
    pub suggestions: Vec<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Outcome<T> {
    Found(Counterfactual<T>),
    NotFound(NotFound<T>),
}

impl<T: Scalar> Outcome<T> {
    pub fn counterfactual(&self) -> Option<&Counterfactual<T>> {
        match self {
            Outcome::Found(c) => Some(c),
            Outcome::NotFound(_) => None,
        }
    }

    pub fn distance(&self) -> Option<T> {
        self.counterfactual().map(|c| c.distance)
    }

    pub fn n_candidates_evaluated(&self) -> usize {
        match self {
            Outcome::Found(c) => c.n_candidates_evaluated,
            Outcome::NotFound(n) => n.n_candidates_evaluated,
        }
    }
}

/// Serializable explanation record.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExplanationRecord<T> {
    pub status: String,
    pub original: Vec<T>,
    pub prediction: Sign,
    pub counterfactual: Option<Vec<T>>,
    pub delta: Vec<FeatureDelta<T>>,
    pub distance: Option<T>,
    pub norm: Norm,
    pub epsilon_policy: EpsilonPolicy<T>,
    pub k_prime_used: Option<usize>,
    pub n_candidates_evaluated: usize,
    pub truncation_certificate: bool,
    pub source: Option<CandidateSource>,
    pub diagnostics: Vec<String>,
}

impl<T: Scalar> Outcome<T> {
    pub fn to_record(&self, config: &ExplainConfig<T>) -> ExplanationRecord<T> {
        match self {
            Outcome::Found(c) => ExplanationRecord {
                status: "found".into(),
                original: c.original.values.clone(),
                prediction: c.prediction,
                counterfactual: Some(c.transformed.clone()),
                delta: c.delta.clone(),
                distance: Some(c.distance),
                norm: config.norm,
                epsilon_policy: config.epsilon,
                k_prime_used: c.k_prime_used,
                n_candidates_evaluated: c.n_candidates_evaluated,
                truncation_certificate: c.truncation_certificate,
                source: c.source,
                diagnostics: Vec::new(),
            },
            Outcome::NotFound(n) => ExplanationRecord {
                status: "not_found".into(),
                original: n.original.values.clone(),
                prediction: n.prediction,
                counterfactual: None,
                delta: Vec::new(),
                distance: None,
                norm: config.norm,
                epsilon_policy: config.epsilon,
                k_prime_used: n.k_prime_used,
                n_candidates_evaluated: n.n_candidates_evaluated,
                truncation_certificate: n.truncation_certificate,
                source: None,
                diagnostics: n.suggestions.clone(),
            },
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExplainConfig<T> {
    pub epsilon: EpsilonPolicy<T>,
    pub norm: Norm,
    /// Search only the first `k_prime` trees.
    pub k_prime: Option<usize>,
    /// Worker threads for candidate evaluation; 1 runs inline.
    pub threads: usize,
}

impl<T: Scalar> Default for ExplainConfig<T> {
    fn default() -> Self {
        ExplainConfig {
            epsilon: EpsilonPolicy::default(),
            norm: Norm::L2Std,
            k_prime: None,
            threads: 1,
        }
    }
}

/// Optional constraints on an explanation request.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct ExplainRequest {
    /// Desired class; must differ from the current prediction.
    pub target: Option<Sign>,
    /// True label; when given, the instance must be correctly predicted.
    pub label: Option<Sign>,
}

/// Candidate generation and selection over one ensemble.
pub struct Explainer<'a, T> {
    ensemble: &'a Ensemble<T>,
    stats: Vec<FeatureStats<T>>,
    eps: Vec<T>,
    config: ExplainConfig<T>,
    pool: Option<rayon::ThreadPool>,
}

impl<'a, T: Scalar> Explainer<'a, T> {
    pub fn new(ensemble: &'a Ensemble<T>, config: ExplainConfig<T>) -> Result<Self, TweakError> {
        let eps = config.epsilon.per_feature(ensemble.schema())?;
        if let Some(k) = config.k_prime {
            if k == 0 || k > ensemble.n_trees() {
                return Err(TweakError::BadPrefix {
                    k_prime: k,
                    n_trees: ensemble.n_trees(),
                });
            }
        }
        let pool = if config.threads > 1 {
            Some(
                rayon::ThreadPoolBuilder::new()
                    .num_threads(config.threads)
                    .build()
                    .map_err(|e| TweakError::ThreadPool(e.to_string()))?,
            )
        } else {
            None
        };
        Ok(Explainer {
            ensemble,
            stats: FeatureStats::from_schema(ensemble.schema()),
            eps,
            config,
            pool,
        })
    }

    pub fn epsilons(&self) -> &[T] {
        &self.eps
    }

    pub fn stats(&self) -> &[FeatureStats<T>] {
        &self.stats
    }

    pub fn config(&self) -> &ExplainConfig<T> {
        &self.config
    }

    fn check(&self, x: &[T]) -> Result<(), TweakError> {
        if x.len() != self.ensemble.n_features() {
            return Err(TweakError::Arity {
                expected: self.ensemble.n_features(),
                found: x.len(),
            });
        }
        Ok(())
    }

    /// Opposite-sign paths of the agreeing trees within the search prefix,
    /// in ascending (tree, path) order.
    pub fn search_paths(&self, x: &[T], prediction: Sign) -> Vec<Path<T>> {
        let limit = self.config.k_prime.unwrap_or(self.ensemble.n_trees());
        self.ensemble.trees()[..limit]
            .iter()
            .enumerate()
            .filter(|(_, t)| t.predict(x) == prediction)
            .flat_map(|(k, t)| t.paths(-prediction, k))
            .collect()
    }

    fn evaluate(&self, x: &[T], path: &Path<T>) -> Option<Candidate<T>> {
        let b = path_to_box(path, x.len()).ok()?;
        match epsilon_transform_box(x, &b, &self.eps) {
            Transform::Infeasible => None,
            Transform::Feasible { values, tweaked } => Some(Candidate {
                ensemble_verdict: self.ensemble.predict(&values),
                distance: distance(x, &values, &self.stats, self.config.norm),
                source: CandidateSource {
                    tree: path.tree_index,
                    path: path.path_index,
                    leaf: path.leaf_index,
                },
                tweaked_features: tweaked,
                values,
            }),
        }
    }

    /// Every feasible candidate, each judged by the full ensemble.
    pub fn generate_candidates(&self, x: &[T]) -> Result<Vec<Candidate<T>>, TweakError> {
        self.check(x)?;
        let prediction = self.ensemble.predict(x);
        let paths = self.search_paths(x, prediction);
        let evaluated: Vec<Option<Candidate<T>>> = match &self.pool {
            Some(pool) => pool.install(|| paths.par_iter().map(|p| self.evaluate(x, p)).collect()),
            None => paths.iter().map(|p| self.evaluate(x, p)).collect(),
        };
        Ok(evaluated.into_iter().flatten().collect())
    }

    pub fn explain(&self, x: &[T], request: ExplainRequest) -> Result<Outcome<T>, TweakError> {
        self.check(x)?;
        let prediction = self.ensemble.predict(x);
        if let Some(label) = request.label {
            if label != prediction {
                return Err(TweakError::Misclassified { label, prediction });
            }
        }
        if request.target == Some(prediction) {
            return Err(TweakError::AlreadyTarget(prediction));
        }
        let candidates = self.generate_candidates(x)?;
        let n = candidates.len();
        let k_prime_used = self.config.k_prime;
        let certificate = match k_prime_used {
            Some(k) if k < self.ensemble.n_trees() => truncation_certificate(self.ensemble, x, k)
                .map(|c| c.holds)
                .unwrap_or(false),
            _ => true,
        };
        let original = Instance::new(x.to_vec());

        // Candidates arrive in ascending (tree, path) order, so a strict
        // comparison keeps the lowest source on distance ties.
        let best = candidates
            .into_iter()
            .filter(|c| c.ensemble_verdict != prediction)
            .fold(None::<Candidate<T>>, |best, c| match best {
                Some(b) if c.distance >= b.distance => Some(b),
                _ => Some(c),
            });

        Ok(match best {
            Some(c) => Outcome::Found(Counterfactual {
                delta: deltas(x, &c.values, self.ensemble.schema()),
                original,
                prediction,
                transformed: c.values,
                distance: c.distance,
                n_candidates_evaluated: n,
                k_prime_used,
                source: Some(c.source),
                truncation_certificate: certificate,
            }),
            None => {
                let mut suggestions = vec![format!(
                    "none of {n} single-path candidates flips the prediction"
                )];
                suggestions.push("try a larger epsilon".into());
                if k_prime_used.is_some() {
                    suggestions.push("drop the prefix restriction to search every tree".into());
                }
                Outcome::NotFound(NotFound {
                    original,
                    prediction,
                    n_candidates_evaluated: n,
                    k_prime_used,
                    truncation_certificate: certificate,
                    suggestions,
                })
            }
        })
    }
}

pub(crate) fn deltas<T: Scalar>(x: &[T], y: &[T], schema: &[FeatureSchema<T>]) -> Vec<FeatureDelta<T>> {
    x.iter()
        .zip(y)
        .enumerate()
        .filter(|(_, (a, b))| a != b)
        .map(|(f, (&old, &new))| FeatureDelta {
            feature: f,
            name: schema.get(f).map(|s| s.name.clone()).unwrap_or_default(),
            old,
            new,
        })
        .collect()
}

/// Convenience wrapper around [`Explainer::generate_candidates`].
pub fn generate_candidates<T: Scalar>(
    e: &Ensemble<T>,
    x: &[T],
    config: ExplainConfig<T>,
) -> Result<Vec<Candidate<T>>, TweakError> {
    Explainer::new(e, config)?.generate_candidates(x)
}

/// Convenience wrapper around [`Explainer::explain`] with no request
/// constraints.
pub fn explain<T: Scalar>(e: &Ensemble<T>, x: &[T], config: ExplainConfig<T>) -> Result<Outcome<T>, TweakError> {
    Explainer::new(e, config)?.explain(x, ExplainRequest::default())
}
