use proptest::prelude::*;
use tweakboost::boost::{alpha, reweight, train_adaboost, update_weights, BoostConfig, StopReason};
use tweakboost::demo::random_tabular;
use tweakboost::{Ensemble, Sign};

#[test]
fn stage_weight_matches_log_odds_on_grid() {
    for i in 1..=99 {
        let err = i as f64 / 100.0;
        let expect = ((1.0 - err) / err).ln();
        assert!((alpha(err, 2) - expect).abs() <= 1e-12, "err={err}");
        assert!((alpha(err, 3) - (expect + 2f64.ln())).abs() <= 1e-12, "err={err}");
    }
}

fn misses(e: &Ensemble<f64>, ds: &tweakboost::Dataset<f64>, k: usize) -> Vec<bool> {
    ds.rows()
        .iter()
        .zip(ds.labels())
        .map(|(x, y)| e.trees()[k].predict(x) != *y)
        .collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn update_rule_directional_law(
        raw in prop::collection::vec(0.01f64..1.0, 2..40),
        miss_bits in prop::collection::vec(any::<bool>(), 40),
        a in 0.001f64..5.0,
    ) {
        let total: f64 = raw.iter().sum();
        let w: Vec<f64> = raw.iter().map(|v| v / total).collect();
        let miss: Vec<bool> = miss_bits[..w.len()].to_vec();
        let pre = reweight(&w, &miss, a);
        for i in 0..w.len() {
            if miss[i] {
                prop_assert!((pre[i] / w[i] - a.exp()).abs() / a.exp() < 1e-12);
            } else {
                prop_assert_eq!(pre[i], w[i]);
            }
        }
        let post = update_weights(&w, &miss, a);
        prop_assert!((post.iter().sum::<f64>() - 1.0).abs() < 1e-9);
        if miss.iter().any(|&m| m) && !miss.iter().all(|&m| m) {
            for i in 0..w.len() {
                if miss[i] { prop_assert!(post[i] > w[i]); } else { prop_assert!(post[i] < w[i]); }
            }
        }
    }

    #[test]
    fn trained_trajectories_obey_invariants(
        n_rows in 20usize..80,
        n_features in 1usize..=5,
        rounds in 1usize..=25,
        depth in 1usize..=3,
        seed in any::<u64>(),
    ) {
        let ds = random_tabular::<f64>(n_rows, n_features, seed);
        let e = train_adaboost(&ds, &BoostConfig::new(rounds, depth, seed)).unwrap();
        let k = e.n_trees();
        prop_assert!(k <= rounds);
        prop_assert_eq!(e.trajectories().len(), k + 1);
        prop_assert_eq!(e.alphas().len(), k);
        prop_assert!(e.alphas().iter().all(|a| a.is_finite() && *a > 0.0));
        for row in e.trajectories() {
            prop_assert!((row.iter().sum::<f64>() - 1.0).abs() <= 1e-9);
        }
        prop_assert!(e.trajectories()[0].iter().all(|&w| w == 1.0 / n_rows as f64));
        for r in 0..k {
            prop_assert!(e.staged_errors()[r] <= 0.5);
            let prev = &e.trajectories()[r];
            let next = &e.trajectories()[r + 1];
            let miss = misses(&e, &ds, r);
            // The weighted error is measured on the weights the tree was fit with.
            let err: f64 = prev.iter().zip(&miss).filter(|(_, m)| **m).map(|(w, _)| w).sum();
            prop_assert!((err - e.staged_errors()[r]).abs() < 1e-12);
            if miss.iter().any(|&m| m) {
                for i in 0..n_rows {
                    if miss[i] { prop_assert!(next[i] > prev[i]); } else { prop_assert!(next[i] < prev[i]); }
                }
            }
        }
        let again = train_adaboost(&ds, &BoostConfig::new(rounds, depth, seed)).unwrap();
        prop_assert_eq!(again.to_model_json(None), e.to_model_json(None));
    }
}

#[test]
fn always_missed_instance_has_increasing_weights() {
    // Instance 0 is missed every round and instance 1 never; the lightest
    // remaining instances fill the miss set up to an error of about 0.4.
    let n = 200;
    let mut w = vec![1.0 / n as f64; n];
    let mut series0 = vec![w[0]];
    let mut series1 = vec![w[1]];
    for _ in 0..15 {
        let mut order: Vec<usize> = (2..n).collect();
        order.sort_by(|&a, &b| w[a].total_cmp(&w[b]).then(a.cmp(&b)));
        let mut miss = vec![false; n];
        miss[0] = true;
        let mut err = w[0];
        for i in order {
            if err + w[i] > 0.4 {
                break;
            }
            miss[i] = true;
            err += w[i];
        }
        assert!(alpha(err, 2) > 0.0);
        w = update_weights(&w, &miss, alpha(err, 2));
        series0.push(w[0]);
        series1.push(w[1]);
    }
    assert!(series0.windows(2).all(|p| p[1] > p[0]));
    assert!(series1.windows(2).all(|p| p[1] < p[0]));
}

#[test]
fn training_in_f32() {
    let ds = random_tabular::<f32>(60, 3, 5);
    let e = train_adaboost(&ds, &BoostConfig::new(30, 2, 5)).unwrap();
    assert!(e.n_trees() > 1);
    for row in e.trajectories() {
        assert!((row.iter().sum::<f32>() - 1.0).abs() < 1e-4);
    }
    let acc = ds
        .rows()
        .iter()
        .zip(ds.labels())
        .filter(|(x, y)| e.predict(x) == **y)
        .count();
    assert!(acc as f32 / 60.0 > 0.7);
}

#[test]
fn separable_training_halts_with_one_dominant_tree() {
    let ds = tweakboost::Dataset::new(
        vec!["x".into()],
        (1..=6).map(|i| vec![i as f64]).collect(),
        (1..=6).map(|i| if i > 3 { Sign::Positive } else { Sign::Negative }).collect(),
    )
    .unwrap();
    let e = train_adaboost(&ds, &BoostConfig::new(5, 1, 0)).unwrap();
    assert_eq!(e.n_trees(), 1);
    assert_eq!(e.stop_reason(), StopReason::Separable { round: 1 });
    assert!(e.alphas()[0].is_finite());
    assert_eq!(e.trajectories()[0], e.trajectories()[1]);
}
