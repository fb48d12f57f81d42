//! Synthetic datasets so every command runs without external downloads.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, LogNormal, Normal};

use crate::data::Dataset;
use crate::scalar::Scalar;
use crate::sign::Sign;

/// Census-income flavoured data: six numeric (pre-encoded) features and a
/// noisy logistic label, roughly a quarter positive.
pub fn adult_like<T: Scalar>(n_rows: usize, seed: u64) -> Dataset<T> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let hours = Normal::new(40.0, 12.0).unwrap();
    let gain = LogNormal::new(8.0, 1.0).unwrap();
    let names = ["age", "education_num", "hours_per_week", "capital_gain", "capital_loss", "married"];
    let mut rows = Vec::with_capacity(n_rows);
    let mut labels = Vec::with_capacity(n_rows);
    for _ in 0..n_rows {
        let age = rng.random_range(17..=90) as f64;
        let edu = rng.random_range(1..=16) as f64;
        let hpw: f64 = Distribution::<f64>::sample(&hours, &mut rng).round().clamp(1.0, 99.0);
        let cg: f64 = if rng.random_bool(0.08) {
            Distribution::<f64>::sample(&gain, &mut rng).round().min(99_999.0)
        } else {
            0.0
        };
        let cl: f64 = if rng.random_bool(0.05) {
            rng.random_range(1000..3000) as f64
        } else {
            0.0
        };
        let married = if rng.random_bool(0.45) { 1.0 } else { 0.0 };
        let logit: f64 = -6.2 + 0.05 * age - 0.0006 * (age - 45.0).powi(2) + 0.3 * edu + 0.03 * hpw
            + 1.6 * married
            + if cg > 5000.0 { 3.0 } else { 0.0 }
            + if cl > 1800.0 { 1.0 } else { 0.0 };
        let p = 1.0 / (1.0 + (-logit).exp());
        labels.push(if rng.random_bool(p) { Sign::Positive } else { Sign::Negative });
        rows.push([age, edu, hpw, cg, cl, married].iter().map(|&v| T::lit(v)).collect());
    }
    Dataset::new(names.iter().map(|s| s.to_string()).collect(), rows, labels).expect("demo data is well formed")
}

/// Two features on `[0, 10]²`, positive above a curved boundary, with 10%
/// label noise. Small enough for the grid oracle.
pub fn toy_2d<T: Scalar>(n_rows: usize, seed: u64) -> Dataset<T> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut rows = Vec::with_capacity(n_rows);
    let mut labels = Vec::with_capacity(n_rows);
    for _ in 0..n_rows {
        let a: f64 = rng.random_range(0.0..10.0);
        let b: f64 = rng.random_range(0.0..10.0);
        let mut y = b > 2.0 + 0.08 * (a - 5.0).powi(2) + 0.3 * a;
        if rng.random_bool(0.1) {
            y = !y;
        }
        labels.push(if y { Sign::Positive } else { Sign::Negative });
        rows.push(vec![T::lit(a), T::lit(b)]);
    }
    Dataset::new(vec!["x0".into(), "x1".into()], rows, labels).expect("demo data is well formed")
}

/// Random tabular problem with `n_features` features on `[0, 10)` (one
/// decimal, so ties occur) and a noisy label from a random linear rule with
/// one interaction term. Both classes are always present.
pub fn random_tabular<T: Scalar>(n_rows: usize, n_features: usize, seed: u64) -> Dataset<T> {
    assert!(n_rows >= 2 && n_features >= 1);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let coef: Vec<f64> = (0..n_features).map(|_| rng.random_range(-1.0..1.0)).collect();
    let inter: f64 = rng.random_range(-0.2..0.2);
    let mut rows = Vec::with_capacity(n_rows);
    let mut scores = Vec::with_capacity(n_rows);
    for _ in 0..n_rows {
        let r: Vec<f64> = (0..n_features)
            .map(|_| (rng.random_range(0.0..10.0f64) * 10.0).round() / 10.0)
            .collect();
        let s: f64 = r.iter().zip(&coef).map(|(v, c)| (v - 5.0) * c).sum::<f64>()
            + inter * (r[0] - 5.0) * (r[n_features - 1] - 5.0);
        scores.push(s);
        rows.push(r);
    }
    let mut sorted = scores.clone();
    sorted.sort_by(f64::total_cmp);
    let median = sorted[n_rows / 2];
    let mut labels: Vec<Sign> = scores
        .iter()
        .map(|&s| {
            let y = s > median;
            if rng.random_bool(0.1) { !y } else { y }
        })
        .map(|y| if y { Sign::Positive } else { Sign::Negative })
        .collect();
    for class in [Sign::Negative, Sign::Positive] {
        if !labels.contains(&class) {
            let i = labels.iter().position(|&l| l != class).unwrap();
            labels[i] = class;
        }
    }
    let rows = rows.into_iter().map(|r| r.into_iter().map(T::lit).collect()).collect();
    let names = (0..n_features).map(|j| format!("f{j}")).collect();
    Dataset::new(names, rows, labels).expect("random data is well formed")
}
