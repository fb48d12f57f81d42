//! AdaBoost (SAMME) training over weighted CART trees.
//!
//! Besides the trees and stage weights, training records the full
//! sample-weight trajectory `W[k][i]` (row 0 is the uniform start) and the
//! weighted error of every round, which the pruning analysis consumes.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cart::{fit_tree, CartError, Tree, TreeParams};
use crate::data::{Dataset, FeatureSchema};
use crate::scalar::{compensated_sum, Scalar};
use crate::sign::Sign;

#[derive(Debug, Error, PartialEq)]
pub enum BoostError {
    #[error("number of boosting rounds must be at least 1")]
    ZeroRounds,
    #[error("n_classes must be at least 2")]
    TooFewClasses,
    #[error("training data lacks class {0}")]
    SingleClass(Sign),
    #[error("training instance {index} out of range (ensemble saw {len})")]
    IndexOutOfRange { index: usize, len: usize },
    #[error("ensemble carries no training trajectories")]
    NoTrajectories,
    #[error("instance has {found} features, model expects {expected}")]
    Arity { expected: usize, found: usize },
    #[error("prefix length {upto} outside 1..={n_trees}")]
    BadPrefix { upto: usize, n_trees: usize },
    #[error(transparent)]
    Cart(#[from] CartError),
}

/// Lower and upper clamp for a weighted error before it enters the stage
/// weight formula.
pub fn error_clamp<T: Scalar>() -> (T, T) {
    let lo = T::lit(1e-10);
    (lo, T::one() - lo.max(T::epsilon()))
}

/// Clamps `err` into the admissible open interval; the flag reports whether
/// clamping changed the value.
pub fn clamp_error<T: Scalar>(err: T) -> (T, bool) {
    let (lo, hi) = error_clamp::<T>();
    let c = err.max(lo).min(hi);
    (c, c != err)
}

/// SAMME stage weight `ln((1 - err) / err) + ln(n_classes - 1)`.
pub fn alpha<T: Scalar>(err: T, n_classes: usize) -> T {
    let (e, clamped) = clamp_error(err);
    if clamped {
        log::warn!("weighted error {err} clamped to {e} before computing the stage weight");
    }
    let extra = T::from_usize(n_classes.saturating_sub(1).max(1)).expect("class count fits scalar");
    ((T::one() - e) / e).ln() + extra.ln()
}

/// Multiplies the weight of every missed instance by `e^alpha`, without
/// renormalizing.
pub fn reweight<T: Scalar>(w: &[T], miss: &[bool], alpha: T) -> Vec<T> {
    assert_eq!(w.len(), miss.len(), "weights and miss flags differ in length");
    let factor = alpha.exp();
    w.iter()
        .zip(miss)
        .map(|(&wi, &m)| if m { wi * factor } else { wi })
        .collect()
}

/// Scales a non-negative vector to sum to one.
pub fn normalize<T: Scalar>(w: &[T]) -> Vec<T> {
    let z = compensated_sum(w.iter().copied());
    w.iter().map(|&v| v / z).collect()
}

/// One boosting weight update: [`reweight`] followed by [`normalize`].
pub fn update_weights<T: Scalar>(w: &[T], miss: &[bool], alpha: T) -> Vec<T> {
    if alpha == T::zero() || !miss.iter().any(|&m| m) {
        return w.to_vec();
    }
    normalize(&reweight(w, miss, alpha))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoostConfig<T> {
    #[serde(rename = "K")]
    pub n_rounds: usize,
    pub max_depth: usize,
    /// Recorded for provenance; the training loop itself is deterministic.
    pub seed: u64,
    pub min_leaf_weight: T,
    pub n_classes: usize,
}

impl<T: Scalar> BoostConfig<T> {
    pub fn new(n_rounds: usize, max_depth: usize, seed: u64) -> Self {
        BoostConfig {
            n_rounds,
            max_depth,
            seed,
            min_leaf_weight: T::lit(1e-6),
            n_classes: 2,
        }
    }
}

/// Why training ended.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum StopReason {
    Completed,
    /// A tree classified every weighted instance correctly.
    Separable { round: usize },
    /// A tree did no better than chance; it was discarded.
    WeakLearner { round: usize, error: f64 },
}

/// Signed ensemble score `Σ α_k ĥ_k(x)`; zero resolves to -1.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Margin<T>(pub T);

impl<T: Scalar> Margin<T> {
    pub fn sign(self) -> Sign {
        Sign::of(self.0)
    }
}

/// A trained (or hand-assembled) boosted ensemble.
#[derive(Debug, Clone, PartialEq)]
pub struct Ensemble<T> {
    pub(crate) schema: Vec<FeatureSchema<T>>,
    pub(crate) trees: Vec<Tree<T>>,
    pub(crate) alphas: Vec<T>,
    pub(crate) trajectories: Vec<Vec<T>>,
    pub(crate) staged_errors: Vec<T>,
    pub(crate) config: BoostConfig<T>,
    pub(crate) stop: StopReason,
}

impl<T: Scalar> Ensemble<T> {
    /// Assembles an ensemble without training trajectories, e.g. for
    /// hand-built models.
    pub fn from_trees(schema: Vec<FeatureSchema<T>>, trees: Vec<Tree<T>>, alphas: Vec<T>) -> Self {
        assert_eq!(trees.len(), alphas.len(), "one stage weight per tree");
        let max_depth = trees.iter().map(Tree::depth).max().unwrap_or(0);
        Ensemble {
            config: BoostConfig::new(trees.len(), max_depth, 0),
            schema,
            trees,
            alphas,
            trajectories: Vec::new(),
            staged_errors: Vec::new(),
            stop: StopReason::Completed,
        }
    }

    pub fn schema(&self) -> &[FeatureSchema<T>] {
        &self.schema
    }

    pub fn n_features(&self) -> usize {
        self.schema.len()
    }

    pub fn trees(&self) -> &[Tree<T>] {
        &self.trees
    }

    pub fn n_trees(&self) -> usize {
        self.trees.len()
    }

    pub fn alphas(&self) -> &[T] {
        &self.alphas
    }

    /// Rows `w_0 ..= w_K`, each over the training instances.
    pub fn trajectories(&self) -> &[Vec<T>] {
        &self.trajectories
    }

    pub fn staged_errors(&self) -> &[T] {
        &self.staged_errors
    }

    pub fn config(&self) -> &BoostConfig<T> {
        &self.config
    }

    pub fn stop_reason(&self) -> StopReason {
        self.stop
    }

    /// Number of training instances covered by the trajectories.
    pub fn n_training(&self) -> usize {
        self.trajectories.first().map_or(0, Vec::len)
    }

    pub fn check_arity(&self, x: &[T]) -> Result<(), BoostError> {
        if x.len() != self.n_features() {
            return Err(BoostError::Arity {
                expected: self.n_features(),
                found: x.len(),
            });
        }
        Ok(())
    }

    /// Margin of the first `upto` trees (all trees when `upto` exceeds K).
    pub fn margin(&self, x: &[T], upto: usize) -> Margin<T> {
        let n = upto.min(self.trees.len());
        Margin(
            self.trees[..n]
                .iter()
                .zip(&self.alphas)
                .fold(T::zero(), |acc, (t, &a)| acc + a * t.predict(x).to_scalar()),
        )
    }

    /// Full-ensemble prediction.
    pub fn predict(&self, x: &[T]) -> Sign {
        self.margin(x, self.trees.len()).sign()
    }

    /// Prediction and margin of the first `upto` trees (default: all).
    pub fn predict_upto(&self, x: &[T], upto: Option<usize>) -> Result<(Sign, Margin<T>), BoostError> {
        self.check_arity(x)?;
        let upto = match upto {
            None => self.trees.len(),
            Some(u) if u >= 1 && u <= self.trees.len() => u,
            Some(u) => {
                return Err(BoostError::BadPrefix {
                    upto: u,
                    n_trees: self.trees.len(),
                })
            }
        };
        let m = self.margin(x, upto);
        Ok((m.sign(), m))
    }

    /// Per-tree predictions `ĥ_1(x) .. ĥ_K(x)`.
    pub fn staged_predictions(&self, x: &[T]) -> Vec<Sign> {
        self.trees.iter().map(|t| t.predict(x)).collect()
    }

    /// Weight series `w_0(x_i) ..= w_K(x_i)` of training instance `i`.
    pub fn weight_trajectory(&self, i: usize) -> Result<Vec<T>, BoostError> {
        if self.trajectories.is_empty() {
            return Err(BoostError::NoTrajectories);
        }
        let len = self.n_training();
        if i >= len {
            return Err(BoostError::IndexOutOfRange { index: i, len });
        }
        Ok(self.trajectories.iter().map(|row| row[i]).collect())
    }
}

/// Free-function form of [`Ensemble::predict_upto`].
pub fn predict_ensemble<T: Scalar>(e: &Ensemble<T>, x: &[T], upto: Option<usize>) -> Result<(Sign, Margin<T>), BoostError> {
    e.predict_upto(x, upto)
}

/// Runs up to `config.n_rounds` boosting rounds.
///
/// Training stops early when a tree makes no weighted error (the tree is
/// kept with a clamped, very large stage weight) or when a tree is no better
/// than chance (the tree is discarded).
pub fn train_adaboost<T: Scalar>(ds: &Dataset<T>, config: &BoostConfig<T>) -> Result<Ensemble<T>, BoostError> {
    if config.n_rounds == 0 {
        return Err(BoostError::ZeroRounds);
    }
    if config.n_classes < 2 {
        return Err(BoostError::TooFewClasses);
    }
    if config.max_depth == 0 {
        return Err(CartError::ZeroDepth.into());
    }
    for class in [Sign::Negative, Sign::Positive] {
        if !ds.has_class(class) {
            return Err(BoostError::SingleClass(class));
        }
    }
    let params = TreeParams {
        max_depth: config.max_depth,
        min_leaf_weight: config.min_leaf_weight,
    };
    let n = T::from_usize(ds.len()).expect("row count fits scalar");
    let mut w = vec![T::one() / n; ds.len()];
    let mut ens = Ensemble {
        schema: ds.schema().to_vec(),
        trees: Vec::with_capacity(config.n_rounds),
        alphas: Vec::with_capacity(config.n_rounds),
        trajectories: vec![w.clone()],
        staged_errors: Vec::with_capacity(config.n_rounds),
        config: *config,
        stop: StopReason::Completed,
    };

    for round in 1..=config.n_rounds {
        let tree = fit_tree(ds, &w, &params)?;
        let miss: Vec<bool> = ds
            .rows()
            .iter()
            .zip(ds.labels())
            .map(|(x, &y)| tree.predict(x) != y)
            .collect();
        let err = compensated_sum(w.iter().zip(&miss).filter(|(_, &m)| m).map(|(&wi, _)| wi));
        let a = alpha(err, config.n_classes);
        if a <= T::zero() {
            log::info!("round {round}: weighted error {err} is no better than chance; stopping");
            ens.stop = StopReason::WeakLearner {
                round,
                error: err.to_f64_lossy(),
            };
            break;
        }
        ens.trees.push(tree);
        ens.alphas.push(a);
        ens.staged_errors.push(err);
        if err <= T::zero() {
            ens.trajectories.push(w.clone());
            log::info!("round {round}: tree separates the weighted data; stopping");
            ens.stop = StopReason::Separable { round };
            break;
        }
        w = update_weights(&w, &miss, a);
        ens.trajectories.push(w.clone());
    }
    Ok(ens)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cart::Node;

    fn ds(xs: &[f64], ys: &[i64]) -> Dataset<f64> {
        Dataset::new(
            vec!["x".into()],
            xs.iter().map(|&x| vec![x]).collect(),
            ys.iter().map(|&y| Sign::from_i64(y).unwrap()).collect(),
        )
        .unwrap()
    }

    #[test]
    fn alpha_values() {
        assert_eq!(alpha(0.5f64, 2), 0.0);
        assert!((alpha(0.25f64, 2) - 3f64.ln()).abs() < 1e-15);
        assert!((alpha(0.25f64, 3) - (3f64.ln() + 2f64.ln())).abs() < 1e-15);
    }

    #[test]
    fn alpha_is_finite_at_the_singularities() {
        assert!(alpha(0.0f64, 2).is_finite());
        assert!(alpha(1.0f64, 2).is_finite());
        assert!(alpha(0.0f32, 2).is_finite());
        assert!(alpha(1.0f32, 2).is_finite());
        assert!((alpha(0.0f64, 2) - (1.0f64 - 1e-10).ln() + 1e-10f64.ln()).abs() < 1e-9);
    }

    #[test]
    fn update_example() {
        let w = update_weights(&[0.25; 4], &[true, false, false, false], 3f64.ln());
        let expect = [0.5, 1.0 / 6.0, 1.0 / 6.0, 1.0 / 6.0];
        for (a, b) in w.iter().zip(expect) {
            assert!((a - b).abs() < 1e-15);
        }
        let pre = reweight(&[0.25; 4], &[true, false, false, false], 3f64.ln());
        assert!((pre[0] - 0.75).abs() < 1e-15);
    }

    #[test]
    fn update_identity_cases() {
        let w = [0.1, 0.2, 0.3, 0.4];
        assert_eq!(update_weights(&w, &[false; 4], 2.0), w.to_vec());
        assert_eq!(update_weights(&w, &[true, false, true, false], 0.0), w.to_vec());
    }

    #[test]
    fn separable_data_stops_after_one_round() {
        let d = ds(&[1.0, 2.0, 3.0, 4.0, 5.0], &[-1, -1, 1, 1, 1]);
        let e = train_adaboost(&d, &BoostConfig::new(5, 1, 0)).unwrap();
        assert_eq!(e.n_trees(), 1);
        assert_eq!(e.stop_reason(), StopReason::Separable { round: 1 });
        assert_eq!(e.trajectories().len(), 2);
        assert!(e.alphas()[0] > 20.0 && e.alphas()[0].is_finite());
    }

    #[test]
    fn single_class_rejected() {
        let d = ds(&[1.0, 2.0], &[1, 1]);
        assert_eq!(
            train_adaboost(&d, &BoostConfig::new(3, 1, 0)).unwrap_err(),
            BoostError::SingleClass(Sign::Negative)
        );
        let d = ds(&[1.0, 2.0], &[1, -1]);
        assert_eq!(train_adaboost(&d, &BoostConfig::new(0, 1, 0)).unwrap_err(), BoostError::ZeroRounds);
    }

    #[test]
    fn chance_learner_is_discarded() {
        // XOR-style duplicates: no split reduces impurity, leaf ties at 0.5.
        let d = ds(&[1.0, 1.0, 2.0, 2.0], &[1, -1, 1, -1]);
        let e = train_adaboost(&d, &BoostConfig::new(4, 2, 0)).unwrap();
        assert_eq!(e.n_trees(), 0);
        assert!(matches!(e.stop_reason(), StopReason::WeakLearner { round: 1, .. }));
        assert_eq!(e.weight_trajectory(0).unwrap(), vec![0.25]);
        assert_eq!(e.predict(&[1.0]), Sign::Negative);
    }

    fn two_stumps(a1: f64, a2: f64) -> Ensemble<f64> {
        let d = ds(&[0.0, 1.0], &[1, -1]);
        let pos = Tree::from_root(Node::leaf(Sign::Positive));
        let neg = Tree::from_root(Node::leaf(Sign::Negative));
        Ensemble::from_trees(d.schema().to_vec(), vec![pos, neg], vec![a1, a2])
    }

    #[test]
    fn margins_and_tie_rule() {
        let e = two_stumps(0.9, 0.4);
        let (s, m) = e.predict_upto(&[0.0], None).unwrap();
        assert_eq!(s, Sign::Positive);
        assert!((m.0 - 0.5).abs() < 1e-15);
        let e = two_stumps(0.4, 0.4);
        assert_eq!(e.predict_upto(&[0.0], None).unwrap(), (Sign::Negative, Margin(0.0)));
        assert_eq!(e.predict_upto(&[0.0], Some(1)).unwrap().0, Sign::Positive);
        assert!(e.predict_upto(&[0.0], Some(3)).is_err());
        assert!(e.predict_upto(&[0.0], Some(0)).is_err());
        assert!(matches!(e.predict_upto(&[0.0, 1.0], None), Err(BoostError::Arity { .. })));
    }

    #[test]
    fn staged_predictions_shape() {
        let e = two_stumps(1.0, 0.5);
        assert_eq!(e.staged_predictions(&[3.0]), vec![Sign::Positive, Sign::Negative]);
    }

    #[test]
    fn trajectory_requires_training() {
        let e = two_stumps(1.0, 0.5);
        assert_eq!(e.weight_trajectory(0), Err(BoostError::NoTrajectories));
    }

    #[test]
    fn trajectory_index_bounds() {
        let d = ds(&[1.0, 2.0, 3.0, 4.0], &[-1, 1, -1, 1]);
        let e = train_adaboost(&d, &BoostConfig::new(3, 1, 0)).unwrap();
        assert_eq!(e.weight_trajectory(0).unwrap().len(), e.n_trees() + 1);
        assert_eq!(e.weight_trajectory(4), Err(BoostError::IndexOutOfRange { index: 4, len: 4 }));
    }
}
