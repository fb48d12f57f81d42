//! Boosted decision-tree ensembles with counterfactual explanations.
//!
//! The crate trains AdaBoost (SAMME) ensembles of weighted CART trees on
//! binary tabular data and answers "what is the smallest change to this
//! instance that flips the prediction?" by epsilon-tweaking individual tree
//! paths. Stage weights and per-instance sample-weight trajectories recorded
//! during training are used to restrict the search to a prefix of the
//! ensemble.
//!
//! Everything numeric is generic over [`Scalar`] (`f32` or `f64`); the
//! `*64` / `*32` aliases below name the concrete instantiations.

pub mod boost;
pub mod cart;
pub mod data;
pub mod demo;
pub mod model;
pub mod prune;
pub mod scalar;
pub mod sign;
pub mod tweak;

pub use boost::{alpha, predict_ensemble, train_adaboost, update_weights, BoostConfig, BoostError, Ensemble, Margin, StopReason};
pub use cart::{enumerate_paths, fit_tree, path_to_box, FeasibleBox, Node, Path, PathCondition, Tree, TreeParams};
pub use data::{load_csv, split, standardize_distance_stats, DataError, Dataset, FeatureSchema, FeatureStats, Instance, LabelMap};
pub use model::{ModelError, MODEL_VERSION};
pub use prune::{agreement_rate, select_kprime_alpha_mass, select_kprime_trajectory, truncation_certificate, PruneError, PruneReport, Strategy};
pub use scalar::Scalar;
pub use sign::Sign;
pub use tweak::{
    brute_force_oracle, distance, epsilon_transform, explain, generate_candidates, Candidate, Counterfactual, EpsilonMode,
    EpsilonPolicy, ExplainConfig, ExplainRequest, Explainer, Norm, Outcome, TweakError,
};

pub type Dataset64 = Dataset<f64>;
pub type Tree64 = Tree<f64>;
pub type Ensemble64 = Ensemble<f64>;
pub type Counterfactual64 = Counterfactual<f64>;
pub type PruneReport64 = PruneReport<f64>;

pub type Dataset32 = Dataset<f32>;
pub type Tree32 = Tree<f32>;
pub type Ensemble32 = Ensemble<f32>;
pub type Counterfactual32 = Counterfactual<f32>;
pub type PruneReport32 = PruneReport<f32>;
