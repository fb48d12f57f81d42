//! Prefix selection for the counterfactual search.
//!
//! Two heuristics choose how many leading trees (`K'`) the search examines:
//!
//! * **alpha mass**: the shortest prefix whose stage weights carry a given
//!   fraction of the total stage weight;
//! * **trajectory**: the first round after which a training instance's
//!   sample weight has stopped moving (relative change within a tolerance
//!   over a trailing window).
//!
//! Neither rule is derived from a fitted model; both are operational
//! heuristics and reports label them as such. Truncation fidelity is
//! measured by [`agreement_rate`] and, per instance, by the margin
//! certificate in [`truncation_certificate`].

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::boost::{BoostError, Ensemble};
use crate::scalar::{compensated_sum, Scalar};

pub const DEFAULT_MASS_FRACTION: f64 = 0.95;
pub const DEFAULT_WINDOW: usize = 10;
pub const DEFAULT_REL_TOL: f64 = 0.02;

#[derive(Debug, Error, PartialEq)]
pub enum PruneError {
    #[error("ensemble has no trees")]
    EmptyEnsemble,
    #[error("mass fraction must lie in (0, 1], got {0}")]
    BadMassFraction(f64),
    #[error("stage weights must be positive for mass-based selection")]
    NonPositiveAlpha,
    #[error("window must be at least 2, got {0}")]
    BadWindow(usize),
    #[error("relative tolerance must be finite and non-negative")]
    BadTolerance,
    #[error("prefix length {k_prime} outside 1..={n_trees}")]
    BadPrefix { k_prime: usize, n_trees: usize },
    #[error("cannot measure agreement on an empty dataset")]
    EmptyDataset,
    #[error("no reports to combine")]
    NothingToCombine,
    #[error(transparent)]
    Boost(#[from] BoostError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Strategy {
    AlphaMass,
    Trajectory,
    /// Maximum over several strategies.
    Combined,
}

/// Parameters echoed into every report.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct PruneParams {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mass_fraction: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub window: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rel_tol: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub instance: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PruneReport<T> {
    pub k_prime: usize,
    pub n_trees: usize,
    pub strategy: Strategy,
    /// `Σ_{k≤K'} α_k / Σ_k α_k`.
    pub mass_captured: T,
    /// Filled in by [`PruneReport::with_agreement`].
    pub agreement_rate: Option<T>,
    /// False when the selection fell back to `K' = K`.
    pub selected: bool,
    pub heuristic: bool,
    pub params: PruneParams,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub components: Vec<PruneReport<T>>,
}

impl<T: Scalar> PruneReport<T> {
    pub fn with_agreement(mut self, e: &Ensemble<T>, rows: &[Vec<T>]) -> Result<Self, PruneError> {
        self.agreement_rate = Some(agreement_rate(e, self.k_prime, rows)?);
        Ok(self)
    }
}

/// Cumulative normalized stage-weight mass after each tree.
pub fn cumulative_mass<T: Scalar>(e: &Ensemble<T>) -> Vec<T> {
    let total = compensated_sum(e.alphas().iter().copied());
    let mut acc = Vec::with_capacity(e.n_trees());
    let mut running = Vec::with_capacity(e.n_trees());
    for &a in e.alphas() {
        running.push(a);
        acc.push(compensated_sum(running.iter().copied()) / total);
    }
    // Exactly one at the end, and never decreasing on the way.
    if let Some(last) = acc.last_mut() {
        *last = T::one();
    }
    for k in 1..acc.len() {
        if acc[k] < acc[k - 1] {
            acc[k] = acc[k - 1];
        }
    }
    acc
}

fn mass_at<T: Scalar>(e: &Ensemble<T>, k_prime: usize) -> T {
    cumulative_mass(e)[k_prime - 1]
}

/// Smallest `K'` whose prefix carries at least `mass_fraction` of the total
/// stage weight.
pub fn select_kprime_alpha_mass<T: Scalar>(e: &Ensemble<T>, mass_fraction: f64) -> Result<PruneReport<T>, PruneError> {
    if e.n_trees() == 0 {
        return Err(PruneError::EmptyEnsemble);
    }
    if !(mass_fraction > 0.0 && mass_fraction <= 1.0) {
        return Err(PruneError::BadMassFraction(mass_fraction));
    }
    if e.alphas().iter().any(|&a| a <= T::zero()) {
        return Err(PruneError::NonPositiveAlpha);
    }
    let frac = T::lit(mass_fraction);
    // Absorbs summation rounding so that e.g. 90 equal weights of 100 reach 0.9.
    let slack = T::epsilon() * T::lit(64.0);
    let cum = cumulative_mass(e);
    let k_prime = cum.iter().position(|&m| m >= frac - slack).map_or(e.n_trees(), |p| p + 1);
    Ok(PruneReport {
        k_prime,
        n_trees: e.n_trees(),
        strategy: Strategy::AlphaMass,
        mass_captured: cum[k_prime - 1],
        agreement_rate: None,
        selected: true,
        heuristic: true,
        params: PruneParams {
            mass_fraction: Some(mass_fraction),
            ..Default::default()
        },
        note: None,
        components: Vec::new(),
    })
}

/// First round `K' >= window` such that every relative change
/// `|w_k - w_{k-1}| / w_{k-1}` for `k` in `(K' - window, K']` is at most
/// `rel_tol`. `trajectory` holds `w_0 ..= w_K`.
pub fn stabilization_round<T: Scalar>(trajectory: &[T], window: usize, rel_tol: T) -> Option<usize> {
    let k = trajectory.len().checked_sub(1)?;
    if window == 0 || window > k {
        return None;
    }
    let flat: Vec<bool> = trajectory
        .windows(2)
        .map(|p| {
            let prev = p[0];
            let change = (p[1] - prev).abs();
            if prev > T::zero() {
                change / prev <= rel_tol
            } else {
                change <= T::zero()
            }
        })
        .collect();
    // flat[k-1] describes round k.
    let mut run = 0;
    for (r, &ok) in flat.iter().enumerate() {
        run = if ok { run + 1 } else { 0 };
        if run >= window {
            return Some(r + 1);
        }
    }
    None
}

/// Trajectory-based `K'` for training instance `i`.
pub fn select_kprime_trajectory<T: Scalar>(
    e: &Ensemble<T>,
    i: usize,
    window: usize,
    rel_tol: f64,
) -> Result<PruneReport<T>, PruneError> {
    if window < 2 {
        return Err(PruneError::BadWindow(window));
    }
    if !(rel_tol.is_finite() && rel_tol >= 0.0) {
        return Err(PruneError::BadTolerance);
    }
    let traj = e.weight_trajectory(i)?;
    let k = e.n_trees();
    if k == 0 {
        return Err(PruneError::EmptyEnsemble);
    }
    let (k_prime, selected, note) = if window > k {
        (k, false, Some(format!("window {window} exceeds ensemble size {k}; using all trees")))
    } else {
        match stabilization_round(&traj, window, T::lit(rel_tol)) {
            Some(r) => (r, true, None),
            None => (k, false, Some("no stabilization; using all trees".to_string())),
        }
    };
    Ok(PruneReport {
        k_prime,
        n_trees: k,
        strategy: Strategy::Trajectory,
        mass_captured: mass_at(e, k_prime),
        agreement_rate: None,
        selected,
        heuristic: true,
        params: PruneParams {
            window: Some(window),
            rel_tol: Some(rel_tol),
            instance: Some(i),
            ..Default::default()
        },
        note,
        components: Vec::new(),
    })
}

/// Conservative union: the largest `K'` among the inputs.
pub fn combine<T: Scalar>(e: &Ensemble<T>, reports: Vec<PruneReport<T>>) -> Result<PruneReport<T>, PruneError> {
    match reports.len() {
        0 => Err(PruneError::NothingToCombine),
        1 => Ok(reports.into_iter().next().unwrap()),
        _ => {
            let k_prime = reports.iter().map(|r| r.k_prime).max().unwrap();
            Ok(PruneReport {
                k_prime,
                n_trees: e.n_trees(),
                strategy: Strategy::Combined,
                mass_captured: mass_at(e, k_prime),
                agreement_rate: None,
                selected: reports.iter().any(|r| r.selected),
                heuristic: true,
                params: PruneParams::default(),
                note: None,
                components: reports,
            })
        }
    }
}

/// Fraction of rows on which the first `k_prime` trees agree with the full
/// ensemble.
pub fn agreement_rate<T: Scalar>(e: &Ensemble<T>, k_prime: usize, rows: &[Vec<T>]) -> Result<T, PruneError> {
    check_prefix(e, k_prime)?;
    if rows.is_empty() {
        return Err(PruneError::EmptyDataset);
    }
    for r in rows {
        e.check_arity(r)?;
    }
    let agree = rows
        .iter()
        .filter(|x| e.margin(x, k_prime).sign() == e.predict(x))
        .count();
    Ok(T::from_usize(agree).unwrap() / T::from_usize(rows.len()).unwrap())
}

fn check_prefix<T: Scalar>(e: &Ensemble<T>, k_prime: usize) -> Result<(), PruneError> {
    if k_prime == 0 || k_prime > e.n_trees() {
        return Err(PruneError::BadPrefix {
            k_prime,
            n_trees: e.n_trees(),
        });
    }
    Ok(())
}

/// Per-instance guarantee that truncation preserved the prediction.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Certificate<T> {
    pub prefix_margin: T,
    pub tail_mass: T,
    /// `|tail_mass| < |prefix_margin|`: the remaining trees cannot flip the sign.
    pub holds: bool,
}

pub fn truncation_certificate<T: Scalar>(e: &Ensemble<T>, x: &[T], k_prime: usize) -> Result<Certificate<T>, PruneError> {
    check_prefix(e, k_prime)?;
    e.check_arity(x)?;
    let prefix_margin = e.margin(x, k_prime).0;
    let tail_mass = compensated_sum(e.alphas()[k_prime..].iter().copied());
    Ok(Certificate {
        prefix_margin,
        tail_mass,
        holds: tail_mass.abs() < prefix_margin.abs(),
    })
}
