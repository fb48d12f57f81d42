use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use tweakboost::cart::{fit_tree, path_to_box, Op, Tree, TreeParams};
use tweakboost::demo::random_tabular;
use tweakboost::{Dataset, Node, Sign};

fn uniform(n: usize) -> Vec<f64> {
    vec![1.0 / n as f64; n]
}

fn point_in_box(b: &tweakboost::FeasibleBox<f64>) -> Vec<f64> {
    b.intervals
        .iter()
        .map(|iv| match (iv.lower.is_finite(), iv.upper.is_finite()) {
            (true, true) => iv.lower + (iv.upper - iv.lower) / 2.0,
            (true, false) => iv.lower + 1.0,
            (false, true) => iv.upper - 1.0,
            (false, false) => 0.0,
        })
        .collect()
}

/// Weighted Gini mass written out from the textbook definition.
fn gini_reference(pos: f64, neg: f64) -> f64 {
    let w = pos + neg;
    if w == 0.0 {
        return 0.0;
    }
    let p = pos / w;
    let q = neg / w;
    w * (1.0 - p * p - q * q)
}

/// Minimum weighted impurity over every (feature, midpoint) root split,
/// by direct summation.
fn best_root_impurity(ds: &Dataset<f64>, w: &[f64], min_leaf: f64) -> Option<f64> {
    let mut best: Option<f64> = None;
    for f in 0..ds.n_features() {
        let mut vals: Vec<f64> = ds.rows().iter().map(|r| r[f]).collect();
        vals.sort_by(f64::total_cmp);
        vals.dedup();
        for pair in vals.windows(2) {
            let t = (pair[0] + pair[1]) / 2.0;
            let (mut lp, mut ln, mut rp, mut rn) = (0.0, 0.0, 0.0, 0.0);
            for ((r, y), wi) in ds.rows().iter().zip(ds.labels()).zip(w) {
                match (r[f] <= t, y) {
                    (true, Sign::Positive) => lp += wi,
                    (true, Sign::Negative) => ln += wi,
                    (false, Sign::Positive) => rp += wi,
                    (false, Sign::Negative) => rn += wi,
                }
            }
            if lp + ln < min_leaf || rp + rn < min_leaf {
                continue;
            }
            let imp = gini_reference(lp, ln) + gini_reference(rp, rn);
            best = Some(best.map_or(imp, |b: f64| b.min(imp)));
        }
    }
    best
}

fn split_impurity(ds: &Dataset<f64>, w: &[f64], f: usize, t: f64) -> f64 {
    let (mut lp, mut ln, mut rp, mut rn) = (0.0, 0.0, 0.0, 0.0);
    for ((r, y), wi) in ds.rows().iter().zip(ds.labels()).zip(w) {
        match (r[f] <= t, y) {
            (true, Sign::Positive) => lp += wi,
            (true, Sign::Negative) => ln += wi,
            (false, Sign::Positive) => rp += wi,
            (false, Sign::Negative) => rn += wi,
        }
    }
    gini_reference(lp, ln) + gini_reference(rp, rn)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn root_split_minimizes_weighted_gini(
        n_rows in 2usize..=12,
        n_features in 1usize..=3,
        seed in any::<u64>(),
    ) {
        let ds = random_tabular::<f64>(n_rows, n_features, seed);
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);
        let raw: Vec<f64> = (0..n_rows).map(|_| rng.random_range(0.05..1.0)).collect();
        let total: f64 = raw.iter().sum();
        let w: Vec<f64> = raw.iter().map(|v| v / total).collect();
        let params = TreeParams::new(1);
        let tree = fit_tree(&ds, &w, &params).unwrap();

        let pos: f64 = w.iter().zip(ds.labels()).filter(|(_, y)| **y == Sign::Positive).map(|(v, _)| v).sum();
        let parent = gini_reference(pos, 1.0 - pos);
        let best = best_root_impurity(&ds, &w, params.min_leaf_weight);
        match tree.root() {
            Node::Internal { feature, threshold, .. } => {
                let chosen = split_impurity(&ds, &w, *feature, *threshold);
                let best = best.expect("a split exists");
                prop_assert!((chosen - best).abs() <= 1e-12, "chosen {chosen} best {best}");
                prop_assert!(chosen < parent);
            }
            Node::Leaf { .. } => {
                if let Some(b) = best {
                    prop_assert!(b >= parent - 1e-12, "missed a reducing split: {b} < {parent}");
                }
            }
        }
    }

    #[test]
    fn leaves_tile_the_space(
        n_rows in 10usize..80,
        n_features in 1usize..=4,
        depth in 1usize..=5,
        seed in any::<u64>(),
    ) {
        let ds = random_tabular::<f64>(n_rows, n_features, seed);
        let tree = fit_tree(&ds, &uniform(n_rows), &TreeParams::new(depth)).unwrap();
        prop_assert!(tree.depth() <= depth);
        prop_assert!(tree.n_leaves() <= 1 << tree.depth());
        let paths = tree.all_paths(0);
        prop_assert_eq!(paths.len(), tree.n_leaves());
        let boxes: Vec<_> = paths.iter().map(|p| path_to_box(p, n_features).unwrap()).collect();

        let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(1));
        for _ in 0..1000 {
            // Mix continuous draws with exact training values to hit thresholds' neighbourhoods.
            let x: Vec<f64> = (0..n_features)
                .map(|f| if rng.random_bool(0.3) {
                    ds.rows()[rng.random_range(0..n_rows)][f]
                } else {
                    rng.random_range(-2.0..12.0)
                })
                .collect();
            let sat: Vec<usize> = (0..paths.len()).filter(|&j| paths[j].is_satisfied(&x)).collect();
            prop_assert_eq!(sat.len(), 1);
            let in_box: Vec<usize> = (0..boxes.len()).filter(|&j| boxes[j].contains(&x)).collect();
            prop_assert_eq!(&in_box, &sat);
            prop_assert_eq!(tree.predict(&x), paths[sat[0]].leaf_sign);
            prop_assert_eq!(tree.route(&x), (sat[0], paths[sat[0]].leaf_sign));
        }
    }

    #[test]
    fn threshold_values_route_left(
        n_rows in 10usize..60,
        n_features in 1usize..=3,
        seed in any::<u64>(),
    ) {
        let ds = random_tabular::<f64>(n_rows, n_features, seed);
        let tree = fit_tree(&ds, &uniform(n_rows), &TreeParams::new(4)).unwrap();
        let paths = tree.all_paths(0);
        for p in &paths {
            for (c, cond) in p.conditions.iter().enumerate() {
                let mut prefix = p.clone();
                prefix.conditions.truncate(c);
                let mut x = point_in_box(&path_to_box(&prefix, n_features).unwrap());
                x[cond.feature] = cond.threshold;
                let reached = paths.iter().find(|q| q.is_satisfied(&x)).unwrap();
                prop_assert_eq!(&reached.conditions[..c], &p.conditions[..c]);
                prop_assert_eq!(reached.conditions[c].op, Op::Le);
                prop_assert_eq!(reached.conditions[c].feature, cond.feature);
                prop_assert_eq!(reached.conditions[c].threshold, cond.threshold);
            }
        }
    }

    #[test]
    fn signed_enumeration_partitions_leaves(
        n_rows in 10usize..60,
        seed in any::<u64>(),
    ) {
        let ds = random_tabular::<f64>(n_rows, 2, seed);
        let tree = fit_tree(&ds, &uniform(n_rows), &TreeParams::new(3)).unwrap();
        let pos = tree.paths(Sign::Positive, 7);
        let neg = tree.paths(Sign::Negative, 7);
        prop_assert_eq!(pos.len() + neg.len(), tree.n_leaves());
        for (j, p) in pos.iter().enumerate() {
            prop_assert_eq!(p.path_index, j);
            prop_assert_eq!(p.tree_index, 7);
        }
        let mut leaves: Vec<usize> = pos.iter().chain(&neg).map(|p| p.leaf_index).collect();
        leaves.sort_unstable();
        prop_assert_eq!(leaves, (0..tree.n_leaves()).collect::<Vec<_>>());
    }
}

#[test]
fn hand_built_tree_json_roundtrip() {
    let t = Tree::from_root(Node::split(
        1,
        0.5,
        Node::leaf(Sign::Negative),
        Node::split(0, -1.25, Node::leaf(Sign::Positive), Node::leaf(Sign::Negative)),
    ));
    let s = serde_json::to_string(&t).unwrap();
    let back: Tree<f64> = serde_json::from_str(&s).unwrap();
    assert_eq!(back, t);
    assert_eq!(back.depth(), 2);
    assert_eq!(back.n_leaves(), 3);
}
