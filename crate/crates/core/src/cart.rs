//! Weighted binary CART trees used as boosting base learners, plus
//! root-to-leaf path enumeration and the interval ("box") form of a path.
//!
//! Routing is global and fixed: an instance goes left iff
//! `value <= threshold`. Consequently every path condition is either
//! `feature <= t` (closed upper bound) or `feature > t` (open lower bound),
//! and every leaf region is a product of half-open intervals `(lo, hi]`.

use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::data::Dataset;
use crate::scalar::{compensated_sum, Scalar};
use crate::sign::Sign;

#[derive(Debug, Error, PartialEq)]
pub enum CartError {
    #[error("cannot fit a tree on an empty dataset")]
    EmptyDataset,
    #[error("weight vector has length {found}, dataset has {expected} rows")]
    WeightLength { expected: usize, found: usize },
    #[error("sample weights must be finite and non-negative")]
    NegativeWeight,
    #[error("sample weights sum to {0}, expected 1")]
    WeightSum(f64),
    #[error("max_depth must be at least 1")]
    ZeroDepth,
    #[error("min_leaf_weight must be finite and non-negative")]
    BadMinLeafWeight,
}

/// A tree node. Serializes as `{feature, threshold, left, right}` or
/// `{sign, purity}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Node<T> {
    Internal {
        feature: usize,
        threshold: T,
        left: Box<Node<T>>,
        right: Box<Node<T>>,
    },
    Leaf {
        sign: Sign,
        /// Weighted share of the majority class among training rows in the leaf.
        purity: T,
    },
}

impl<T: Scalar> Node<T> {
    pub fn leaf(sign: Sign) -> Self {
        Node::Leaf {
            sign,
            purity: T::one(),
        }
    }

    pub fn split(feature: usize, threshold: T, left: Node<T>, right: Node<T>) -> Self {
        Node::Internal {
            feature,
            threshold,
            left: Box::new(left),
            right: Box::new(right),
        }
    }

    fn depth(&self) -> usize {
        match self {
            Node::Leaf { .. } => 0,
            Node::Internal { left, right, .. } => 1 + left.depth().max(right.depth()),
        }
    }

    fn n_leaves(&self) -> usize {
        match self {
            Node::Leaf { .. } => 1,
            Node::Internal { left, right, .. } => left.n_leaves() + right.n_leaves(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Op {
    /// `value <= threshold` (left branch).
    Le,
    /// `value > threshold` (right branch).
    Gt,
}

impl fmt::Display for Op {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Op::Le => "<=",
            Op::Gt => ">",
        })
    }
}

impl Serialize for Op {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Op {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        match String::deserialize(d)?.as_str() {
            "<=" => Ok(Op::Le),
            ">" => Ok(Op::Gt),
            other => Err(serde::de::Error::custom(format!("unknown operator `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PathCondition<T> {
    pub feature: usize,
    pub op: Op,
    pub threshold: T,
}

impl<T: Scalar> PathCondition<T> {
    pub fn holds(&self, x: &[T]) -> bool {
        match self.op {
            Op::Le => x[self.feature] <= self.threshold,
            Op::Gt => x[self.feature] > self.threshold,
        }
    }
}

/// One root-to-leaf walk.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Path<T> {
    pub conditions: Vec<PathCondition<T>>,
    pub leaf_sign: Sign,
    /// Position of the tree in its ensemble.
    pub tree_index: usize,
    /// Position among the tree's paths of the same sign, left to right.
    pub path_index: usize,
    /// Position among all leaves of the tree, left to right.
    pub leaf_index: usize,
}

impl<T: Scalar> Path<T> {
    pub fn is_satisfied(&self, x: &[T]) -> bool {
        self.conditions.iter().all(|c| c.holds(x))
    }
}

/// Half-open interval `(lower, upper]`; infinite bounds mean unconstrained.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval<T> {
    pub lower: T,
    pub upper: T,
}

impl<T: Scalar> Interval<T> {
    pub const LOWER_CLOSED: bool = false;
    pub const UPPER_CLOSED: bool = true;

    pub fn unbounded() -> Self {
        Interval {
            lower: T::neg_infinity(),
            upper: T::infinity(),
        }
    }

    pub fn contains(&self, v: T) -> bool {
        v > self.lower && v <= self.upper
    }

    pub fn is_constrained(&self) -> bool {
        self.lower.is_finite() || self.upper.is_finite()
    }

    pub fn width(&self) -> T {
        self.upper - self.lower
    }
}

/// Per-feature interval form of a path.
#[derive(Debug, Clone, PartialEq)]
pub struct FeasibleBox<T> {
    pub intervals: Vec<Interval<T>>,
}

impl<T: Scalar> FeasibleBox<T> {
    pub fn contains(&self, x: &[T]) -> bool {
        self.intervals.iter().zip(x).all(|(iv, &v)| iv.contains(v))
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum BoxError {
    #[error("path is infeasible: conditions on feature {feature} have an empty intersection")]
    Infeasible { feature: usize },
    #[error("condition references feature {feature}, instance has {n_features}")]
    FeatureOutOfRange { feature: usize, n_features: usize },
}

/// Intersects a path's conditions feature by feature; the tightest bound wins.
pub fn path_to_box<T: Scalar>(path: &Path<T>, n_features: usize) -> Result<FeasibleBox<T>, BoxError> {
    let mut intervals = vec![Interval::<T>::unbounded(); n_features];
    for c in &path.conditions {
        let iv = intervals.get_mut(c.feature).ok_or(BoxError::FeatureOutOfRange {
            feature: c.feature,
            n_features,
        })?;
        match c.op {
            Op::Le => iv.upper = iv.upper.min(c.threshold),
            Op::Gt => iv.lower = iv.lower.max(c.threshold),
        }
    }
    if let Some(f) = intervals.iter().position(|iv| iv.lower >= iv.upper) {
        return Err(BoxError::Infeasible { feature: f });
    }
    Ok(FeasibleBox { intervals })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TreeParams<T> {
    pub max_depth: usize,
    /// Smallest total sample weight a child may carry (weights sum to one).
    pub min_leaf_weight: T,
}

impl<T: Scalar> TreeParams<T> {
    pub fn new(max_depth: usize) -> Self {
        TreeParams {
            max_depth,
            min_leaf_weight: T::lit(1e-6),
        }
    }
}

/// A fitted (or hand-built) decision tree.
#[derive(Debug, Clone, PartialEq)]
pub struct Tree<T> {
    root: Node<T>,
    depth: usize,
    n_leaves: usize,
}

impl<T: Scalar> Tree<T> {
    pub fn from_root(root: Node<T>) -> Self {
        Tree {
            depth: root.depth(),
            n_leaves: root.n_leaves(),
            root,
        }
    }

    pub fn root(&self) -> &Node<T> {
        &self.root
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn n_leaves(&self) -> usize {
        self.n_leaves
    }

    /// Largest feature index referenced by any split.
    pub fn max_feature(&self) -> Option<usize> {
        fn walk<T>(n: &Node<T>, acc: &mut Option<usize>) {
            if let Node::Internal { feature, left, right, .. } = n {
                *acc = Some(acc.map_or(*feature, |a: usize| a.max(*feature)));
                walk(left, acc);
                walk(right, acc);
            }
        }
        let mut acc = None;
        walk(&self.root, &mut acc);
        acc
    }

    pub fn predict(&self, x: &[T]) -> Sign {
        let mut node = &self.root;
        loop {
            match node {
                Node::Leaf { sign, .. } => return *sign,
                Node::Internal {
                    feature,
                    threshold,
                    left,
                    right,
                } => {
                    node = if x[*feature] <= *threshold { left } else { right };
                }
            }
        }
    }

    /// Left-to-right ordinal and sign of the leaf that `x` reaches.
    pub fn route(&self, x: &[T]) -> (usize, Sign) {
        let mut node = &self.root;
        let mut offset = 0;
        loop {
            match node {
                Node::Leaf { sign, .. } => return (offset, *sign),
                Node::Internal {
                    feature,
                    threshold,
                    left,
                    right,
                } => {
                    if x[*feature] <= *threshold {
                        node = left;
                    } else {
                        offset += left.n_leaves();
                        node = right;
                    }
                }
            }
        }
    }

    /// Paths ending in a leaf of `sign`, left to right.
    pub fn paths(&self, sign: Sign, tree_index: usize) -> Vec<Path<T>> {
        self.all_paths(tree_index)
            .into_iter()
            .filter(|p| p.leaf_sign == sign)
            .enumerate()
            .map(|(j, mut p)| {
                p.path_index = j;
                p
            })
            .collect()
    }

    /// Every root-to-leaf path, left to right; `path_index` equals `leaf_index`.
    pub fn all_paths(&self, tree_index: usize) -> Vec<Path<T>> {
        fn walk<T: Scalar>(node: &Node<T>, conds: &mut Vec<PathCondition<T>>, tree_index: usize, out: &mut Vec<Path<T>>) {
            match node {
                Node::Leaf { sign, .. } => {
                    let j = out.len();
                    out.push(Path {
                        conditions: conds.clone(),
                        leaf_sign: *sign,
                        tree_index,
                        path_index: j,
                        leaf_index: j,
                    });
                }
                Node::Internal {
                    feature,
                    threshold,
                    left,
                    right,
                } => {
                    for (op, child) in [(Op::Le, left), (Op::Gt, right)] {
                        conds.push(PathCondition {
                            feature: *feature,
                            op,
                            threshold: *threshold,
                        });
                        walk(child, conds, tree_index, out);
                        conds.pop();
                    }
                }
            }
        }
        let mut out = Vec::with_capacity(self.n_leaves);
        walk(&self.root, &mut Vec::new(), tree_index, &mut out);
        out
    }
}

/// Free-function form of [`Tree::paths`].
pub fn enumerate_paths<T: Scalar>(tree: &Tree<T>, sign: Sign, tree_index: usize) -> Vec<Path<T>> {
    tree.paths(sign, tree_index)
}

impl<T: Scalar> Serialize for Tree<T> {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        self.root.serialize(s)
    }
}

impl<'de, T: Scalar> Deserialize<'de> for Tree<T> {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        Node::deserialize(d).map(Tree::from_root)
    }
}

/// Weighted Gini impurity mass of a node: `W * (1 - p² - q²) = 2·pos·neg / W`.
#[inline]
pub fn gini_mass<T: Scalar>(pos: T, neg: T) -> T {
    let total = pos + neg;
    if total <= T::zero() {
        T::zero()
    } else {
        (pos + pos) * neg / total
    }
}

/// Fits a tree by greedy weighted-Gini splitting.
pub fn fit_tree<T: Scalar>(ds: &Dataset<T>, weights: &[T], params: &TreeParams<T>) -> Result<Tree<T>, CartError> {
    if ds.is_empty() {
        return Err(CartError::EmptyDataset);
    }
    if weights.len() != ds.len() {
        return Err(CartError::WeightLength {
            expected: ds.len(),
            found: weights.len(),
        });
    }
    if weights.iter().any(|w| !w.is_finite() || *w < T::zero()) {
        return Err(CartError::NegativeWeight);
    }
    let sum = compensated_sum(weights.iter().copied());
    if (sum - T::one()).abs() > T::weight_sum_tolerance() {
        return Err(CartError::WeightSum(sum.to_f64_lossy()));
    }
    if params.max_depth == 0 {
        return Err(CartError::ZeroDepth);
    }
    if !params.min_leaf_weight.is_finite() || params.min_leaf_weight < T::zero() {
        return Err(CartError::BadMinLeafWeight);
    }
    let builder = Builder {
        rows: ds.rows(),
        labels: ds.labels(),
        weights,
        params,
    };
    let mut idx: Vec<usize> = (0..ds.len()).collect();
    Ok(Tree::from_root(builder.build(&mut idx, 0)))
}

struct Builder<'a, T> {
    rows: &'a [Vec<T>],
    labels: &'a [Sign],
    weights: &'a [T],
    params: &'a TreeParams<T>,
}

#[derive(Clone, Copy)]
struct Split<T> {
    feature: usize,
    threshold: T,
    impurity: T,
}

impl<T: Scalar> Builder<'_, T> {
    fn class_mass(&self, idx: &[usize]) -> (T, T) {
        let pos = compensated_sum(idx.iter().filter(|&&i| self.labels[i] == Sign::Positive).map(|&i| self.weights[i]));
        let neg = compensated_sum(idx.iter().filter(|&&i| self.labels[i] == Sign::Negative).map(|&i| self.weights[i]));
        (pos, neg)
    }

    fn build(&self, idx: &mut [usize], depth: usize) -> Node<T> {
        let (pos, neg) = self.class_mass(idx);
        let total = pos + neg;
        // Equal mass resolves to -1.
        let sign = if pos > neg { Sign::Positive } else { Sign::Negative };
        let purity = if total > T::zero() { pos.max(neg) / total } else { T::one() };
        let leaf = Node::Leaf { sign, purity };

        if depth >= self.params.max_depth || pos <= T::zero() || neg <= T::zero() {
            return leaf;
        }
        let parent = gini_mass(pos, neg);
        let Some(best) = self.best_split(idx, pos, neg) else {
            return leaf;
        };
        let slack = parent * T::epsilon() * T::lit(16.0);
        if best.impurity.is_nan() || best.impurity >= parent - slack {
            return leaf;
        }

        let rows = self.rows;
        let mid = partition(idx, |&i| rows[i][best.feature] <= best.threshold);
        let (l, r) = idx.split_at_mut(mid);
        Node::split(best.feature, best.threshold, self.build(l, depth + 1), self.build(r, depth + 1))
    }

    /// Scans every (feature, midpoint) pair. Ties keep the earlier candidate,
    /// i.e. the lower feature index, then the lower threshold.
    fn best_split(&self, idx: &[usize], pos: T, neg: T) -> Option<Split<T>> {
        let n_features = self.rows[idx[0]].len();
        let min_w = self.params.min_leaf_weight;
        let mut order = idx.to_vec();
        let mut best: Option<Split<T>> = None;

        for f in 0..n_features {
            order.sort_by(|&a, &b| self.rows[a][f].total_order(&self.rows[b][f]).then(a.cmp(&b)));
            let mut left_pos = T::zero();
            let mut left_neg = T::zero();
            for w in 0..order.len() - 1 {
                let i = order[w];
                match self.labels[i] {
                    Sign::Positive => left_pos = left_pos + self.weights[i],
                    Sign::Negative => left_neg = left_neg + self.weights[i],
                }
                let here = self.rows[i][f];
                let next = self.rows[order[w + 1]][f];
                if here == next {
                    continue;
                }
                let right_pos = (pos - left_pos).max(T::zero());
                let right_neg = (neg - left_neg).max(T::zero());
                if left_pos + left_neg < min_w || right_pos + right_neg < min_w {
                    continue;
                }
                let impurity = gini_mass(left_pos, left_neg) + gini_mass(right_pos, right_neg);
                if best.is_none_or(|b| impurity < b.impurity) {
                    best = Some(Split {
                        feature: f,
                        threshold: midpoint(here, next),
                        impurity,
                    });
                }
            }
        }
        best
    }
}

/// Midpoint of two consecutive distinct values, kept in `[lo, hi)` so that
/// `lo` routes left and `hi` routes right.
pub fn midpoint<T: Scalar>(lo: T, hi: T) -> T {
    let m = lo + (hi - lo) / (T::one() + T::one());
    if m >= hi || m < lo {
        lo
    } else {
        m
    }
}

/// Stable-order-agnostic in-place partition; returns the count of elements
/// satisfying `pred`, which end up first.
fn partition<F: Fn(&usize) -> bool>(v: &mut [usize], pred: F) -> usize {
    let mut left: Vec<usize> = Vec::with_capacity(v.len());
    let mut right: Vec<usize> = Vec::new();
    for &i in v.iter() {
        if pred(&i) {
            left.push(i);
        } else {
            right.push(i);
        }
    }
    let mid = left.len();
    for (slot, i) in v.iter_mut().zip(left.into_iter().chain(right)) {
        *slot = i;
    }
    mid
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ds_1d(xs: &[f64], ys: &[i64]) -> Dataset<f64> {
        Dataset::new(
            vec!["x".into()],
            xs.iter().map(|&x| vec![x]).collect(),
            ys.iter().map(|&y| Sign::from_i64(y).unwrap()).collect(),
        )
        .unwrap()
    }

    fn stump() -> Tree<f64> {
        Tree::from_root(Node::split(0, 2.5, Node::leaf(Sign::Negative), Node::leaf(Sign::Positive)))
    }

    #[test]
    fn separable_stump() {
        let ds = ds_1d(&[1.0, 2.0, 3.0, 4.0], &[-1, -1, 1, 1]);
        let t = fit_tree(&ds, &[0.25; 4], &TreeParams::new(1)).unwrap();
        match t.root() {
            Node::Internal {
                feature,
                threshold,
                left,
                right,
            } => {
                assert_eq!(*feature, 0);
                assert!((2.0..3.0).contains(threshold));
                assert!(matches!(**left, Node::Leaf { sign: Sign::Negative, .. }));
                assert!(matches!(**right, Node::Leaf { sign: Sign::Positive, .. }));
            }
            _ => panic!("expected a split"),
        }
        assert_eq!((t.depth(), t.n_leaves()), (1, 2));
    }

    #[test]
    fn zero_weight_negatives_give_single_leaf() {
        let ds = ds_1d(&[1.0, 2.0, 3.0, 4.0], &[-1, -1, 1, 1]);
        let t = fit_tree(&ds, &[0.0, 0.0, 0.5, 0.5], &TreeParams::new(3)).unwrap();
        assert_eq!(t.depth(), 0);
        assert_eq!(t.predict(&[1.0]), Sign::Positive);
    }

    #[test]
    fn pure_dataset_is_a_leaf() {
        let ds = ds_1d(&[1.0, 2.0, 3.0], &[1, 1, 1]);
        let t = fit_tree(&ds, &[1.0 / 3.0; 3], &TreeParams::new(4)).unwrap();
        assert_eq!(t.root(), &Node::Leaf { sign: Sign::Positive, purity: 1.0 });
    }

    #[test]
    fn tied_leaf_mass_is_negative() {
        let ds = ds_1d(&[1.0, 1.0], &[1, -1]);
        let t = fit_tree(&ds, &[0.5, 0.5], &TreeParams::new(2)).unwrap();
        assert_eq!(t.root(), &Node::Leaf { sign: Sign::Negative, purity: 0.5 });
    }

    #[test]
    fn fit_errors() {
        let ds = ds_1d(&[1.0, 2.0], &[1, -1]);
        assert_eq!(
            fit_tree(&ds, &[1.0], &TreeParams::new(1)),
            Err(CartError::WeightLength { expected: 2, found: 1 })
        );
        assert!(matches!(fit_tree(&ds, &[0.6, 0.6], &TreeParams::new(1)), Err(CartError::WeightSum(_))));
        assert_eq!(fit_tree(&ds, &[1.5, -0.5], &TreeParams::new(1)), Err(CartError::NegativeWeight));
        assert_eq!(fit_tree(&ds, &[0.5, 0.5], &TreeParams::new(0)), Err(CartError::ZeroDepth));
    }

    #[test]
    fn min_leaf_weight_blocks_light_children() {
        let ds = ds_1d(&[1.0, 2.0, 3.0], &[-1, 1, 1]);
        let params = TreeParams {
            max_depth: 2,
            min_leaf_weight: 0.5,
        };
        let t = fit_tree(&ds, &[0.1, 0.45, 0.45], &params).unwrap();
        assert_eq!(t.depth(), 0);
    }

    #[test]
    fn predict_boundary_goes_left() {
        let t = stump();
        assert_eq!(t.predict(&[5.0]), Sign::Positive);
        assert_eq!(t.predict(&[2.5]), Sign::Negative);
        let leaf = Tree::from_root(Node::<f64>::leaf(Sign::Positive));
        assert_eq!(leaf.predict(&[-100.0]), Sign::Positive);
    }

    #[test]
    fn stump_paths() {
        let t = stump();
        let pos = t.paths(Sign::Positive, 0);
        assert_eq!(pos.len(), 1);
        assert_eq!(
            pos[0].conditions,
            vec![PathCondition {
                feature: 0,
                op: Op::Gt,
                threshold: 2.5
            }]
        );
        assert_eq!(pos[0].leaf_sign, Sign::Positive);
        let neg = t.paths(Sign::Negative, 0);
        assert_eq!(neg[0].conditions[0].op, Op::Le);
    }

    #[test]
    fn depth_two_enumeration_order() {
        let t = Tree::from_root(Node::split(
            0,
            0.0,
            Node::split(1, 0.0, Node::leaf(Sign::Negative), Node::leaf(Sign::Positive)),
            Node::split(1, 1.0, Node::leaf(Sign::Positive), Node::leaf(Sign::Negative)),
        ));
        let pos = t.paths(Sign::Positive, 3);
        assert_eq!(pos.len(), 2);
        assert_eq!((pos[0].path_index, pos[0].leaf_index, pos[0].tree_index), (0, 1, 3));
        assert_eq!((pos[1].path_index, pos[1].leaf_index), (1, 2));
        assert_eq!(pos[1].conditions[1].threshold, 1.0);
        assert_eq!(t.route(&[1.0, 0.5]), (2, Sign::Positive));
    }

    fn path(conds: &[(usize, Op, f64)]) -> Path<f64> {
        Path {
            conditions: conds
                .iter()
                .map(|&(feature, op, threshold)| PathCondition { feature, op, threshold })
                .collect(),
            leaf_sign: Sign::Positive,
            tree_index: 0,
            path_index: 0,
            leaf_index: 0,
        }
    }

    #[test]
    fn box_intersection() {
        let b = path_to_box(&path(&[(0, Op::Gt, 1.0), (0, Op::Le, 3.0)]), 1).unwrap();
        assert_eq!(b.intervals[0], Interval { lower: 1.0, upper: 3.0 });
        assert!(b.contains(&[3.0]));
        assert!(!b.contains(&[1.0]));
    }

    #[test]
    fn box_infeasible() {
        assert_eq!(
            path_to_box(&path(&[(0, Op::Le, 1.0), (0, Op::Gt, 3.0)]), 1),
            Err(BoxError::Infeasible { feature: 0 })
        );
        assert!(matches!(
            path_to_box(&path(&[(3, Op::Le, 1.0)]), 2),
            Err(BoxError::FeatureOutOfRange { .. })
        ));
    }

    #[test]
    fn box_unconstrained_features() {
        let b = path_to_box(&path(&[(0, Op::Gt, 2.5)]), 2).unwrap();
        assert_eq!(b.intervals[0].lower, 2.5);
        assert_eq!(b.intervals[0].upper, f64::INFINITY);
        assert_eq!(b.intervals[1], Interval::unbounded());
        assert!(!b.intervals[1].is_constrained());
    }

    #[test]
    fn json_shape_is_stable() {
        let t = stump();
        let s = serde_json::to_string(&t).unwrap();
        assert_eq!(
            s,
            r#"{"feature":0,"threshold":2.5,"left":{"sign":-1,"purity":1.0},"right":{"sign":1,"purity":1.0}}"#
        );
        let back: Tree<f64> = serde_json::from_str(&s).unwrap();
        assert_eq!(back, t);
    }

    #[test]
    fn midpoint_stays_below_upper() {
        assert_eq!(midpoint(2.0, 3.0), 2.5);
        let a = 1.0f64;
        let b = f64::from_bits(a.to_bits() + 1);
        let m = midpoint(a, b);
        assert!(a <= m && m < b);
    }

    #[test]
    fn works_in_f32() {
        let ds = Dataset::<f32>::new(
            vec!["x".into()],
            vec![vec![1.0], vec![2.0], vec![3.0], vec![4.0]],
            vec![Sign::Negative, Sign::Negative, Sign::Positive, Sign::Positive],
        )
        .unwrap();
        let t = fit_tree(&ds, &[0.25f32; 4], &TreeParams::new(1)).unwrap();
        assert_eq!(t.predict(&[3.5]), Sign::Positive);
    }
}
