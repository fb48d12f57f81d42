//! Exhaustive grid search used to check the path-tweaking search.

use crate::boost::Ensemble;
use crate::cart::Node;
use crate::data::{FeatureSchema, FeatureStats, Instance};
use crate::scalar::Scalar;

use super::{deltas, distance, Counterfactual, Norm, NotFound, Outcome, TweakError};

/// Largest grid the oracle will enumerate.
pub const GRID_LIMIT: u128 = 1_000_000;

/// Evaluates the full ensemble on every grid point other than `x` itself and
/// returns the closest point whose prediction differs from `x`'s. Ties keep
/// the first point in lexicographic grid order.
pub fn brute_force_oracle<T: Scalar>(
    e: &Ensemble<T>,
    x: &[T],
    grid: &[Vec<T>],
    stats: &[FeatureStats<T>],
    norm: Norm,
) -> Result<Outcome<T>, TweakError> {
    if x.len() != e.n_features() || grid.len() != x.len() {
        return Err(TweakError::Arity {
            expected: e.n_features(),
            found: if x.len() != e.n_features() { x.len() } else { grid.len() },
        });
    }
    let points = grid
        .iter()
        .try_fold(1u128, |acc, g| acc.checked_mul(g.len() as u128))
        .unwrap_or(u128::MAX);
    if points > GRID_LIMIT {
        return Err(TweakError::GridTooLarge {
            points,
            limit: GRID_LIMIT,
        });
    }
    let prediction = e.predict(x);
    let original = Instance::new(x.to_vec());
    if points == 0 {
        return Ok(not_found(original, prediction, 0));
    }

    let mut counter = vec![0usize; grid.len()];
    let mut point: Vec<T> = grid.iter().map(|g| g[0]).collect();
    let mut evaluated = 0usize;
    let mut best: Option<(T, Vec<T>)> = None;
    loop {
        if point.as_slice() != x {
            evaluated += 1;
            if e.predict(&point) != prediction {
                let d = distance(x, &point, stats, norm);
                if best.as_ref().is_none_or(|(bd, _)| d < *bd) {
                    best = Some((d, point.clone()));
                }
            }
        }
        // Odometer increment, last feature fastest.
        let mut f = grid.len();
        loop {
            if f == 0 {
                return Ok(match best {
                    Some((d, values)) => Outcome::Found(Counterfactual {
                        delta: deltas(x, &values, e.schema()),
                        original,
                        prediction,
                        transformed: values,
                        distance: d,
                        n_candidates_evaluated: evaluated,
                        k_prime_used: None,
                        source: None,
                        truncation_certificate: true,
                    }),
                    None => not_found(original, prediction, evaluated),
                });
            }
            f -= 1;
            counter[f] += 1;
            if counter[f] < grid[f].len() {
                point[f] = grid[f][counter[f]];
                break;
            }
            counter[f] = 0;
            point[f] = grid[f][0];
        }
    }
}

fn not_found<T: Scalar>(original: Instance<T>, prediction: crate::sign::Sign, evaluated: usize) -> Outcome<T> {
    Outcome::NotFound(NotFound {
        original,
        prediction,
        n_candidates_evaluated: evaluated,
        k_prime_used: None,
        truncation_certificate: true,
        suggestions: vec!["no grid point flips the prediction".into()],
    })
}

/// `steps` evenly spaced values per feature over the training range widened
/// by `pad` times the range on each side. Constant features get one value.
pub fn uniform_grid<T: Scalar>(schema: &[FeatureSchema<T>], steps: usize, pad: T) -> Vec<Vec<T>> {
    schema
        .iter()
        .map(|f| {
            if f.constant || steps < 2 {
                return vec![f.min];
            }
            let lo = f.min - pad * f.range();
            let hi = f.max + pad * f.range();
            let step = (hi - lo) / T::from_usize(steps - 1).unwrap();
            (0..steps).map(|i| lo + step * T::from_usize(i).unwrap()).collect()
        })
        .collect()
}

/// The uniform grid augmented, per feature, with every split threshold
/// shifted by `±ε` and with `x`'s own value. Every candidate the path search
/// can produce for `x` is then a grid point.
pub fn oracle_grid<T: Scalar>(e: &Ensemble<T>, x: &[T], eps: &[T], steps: usize) -> Vec<Vec<T>> {
    let mut grid = uniform_grid(e.schema(), steps, T::lit(0.1));
    fn walk<T: Scalar>(n: &Node<T>, eps: &[T], grid: &mut [Vec<T>]) {
        if let Node::Internal {
            feature,
            threshold,
            left,
            right,
        } = n
        {
            grid[*feature].push(*threshold - eps[*feature]);
            grid[*feature].push(*threshold + eps[*feature]);
            walk(left, eps, grid);
            walk(right, eps, grid);
        }
    }
    for t in e.trees() {
        walk(t.root(), eps, &mut grid);
    }
    for (g, &v) in grid.iter_mut().zip(x) {
        g.push(v);
        g.sort_by(|a, b| a.total_order(b));
        g.dedup();
    }
    grid
}

/// Tolerance for comparing oracle and search distances: the size of one
/// epsilon step on every feature under `norm`.
pub fn grid_slack<T: Scalar>(eps: &[T], stats: &[FeatureStats<T>], norm: Norm) -> T {
    match norm {
        Norm::L0 => T::zero(),
        _ => {
            let zero = vec![T::zero(); eps.len()];
            distance(&zero, eps, stats, norm)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::super::{explain, EpsilonPolicy, ExplainConfig};
    use super::*;
    use crate::cart::Tree;
    use crate::data::Dataset;
    use crate::sign::Sign;

    fn stump() -> Ensemble<f64> {
        let ds = Dataset::new(vec!["f0".into()], vec![vec![0.0], vec![10.0]], vec![Sign::Negative, Sign::Positive]).unwrap();
        let t = Tree::from_root(Node::split(0, 2.5, Node::leaf(Sign::Negative), Node::leaf(Sign::Positive)));
        Ensemble::from_trees(ds.schema().to_vec(), vec![t], vec![1.0])
    }

    #[test]
    fn grid_with_only_x_finds_nothing() {
        let e = stump();
        let stats = FeatureStats::from_schema(e.schema());
        let out = brute_force_oracle(&e, &[1.0], &[vec![1.0]], &stats, Norm::L2Std).unwrap();
        assert!(matches!(out, Outcome::NotFound(ref n) if n.n_candidates_evaluated == 0));
    }

    #[test]
    fn epsilon_corner_grid_matches_search() {
        let e = stump();
        let stats = FeatureStats::from_schema(e.schema());
        let eps = [0.1];
        let grid = vec![vec![2.5 - 0.1, 2.5 + 0.1]];
        let oracle = brute_force_oracle(&e, &[1.0], &grid, &stats, Norm::L2Std).unwrap();
        let cfg = ExplainConfig {
            epsilon: EpsilonPolicy::absolute(eps[0]),
            ..Default::default()
        };
        let found = explain(&e, &[1.0], cfg).unwrap();
        assert_eq!(oracle.counterfactual().unwrap().transformed, found.counterfactual().unwrap().transformed);
        assert_eq!(oracle.distance(), found.distance());
    }

    #[test]
    fn guard_rejects_huge_grids() {
        let e = stump();
        let stats = FeatureStats::from_schema(e.schema());
        let grid = vec![(0..1_000_001).map(|i| i as f64).collect()];
        assert!(matches!(
            brute_force_oracle(&e, &[1.0], &grid, &stats, Norm::L2Std),
            Err(TweakError::GridTooLarge { .. })
        ));
    }

    #[test]
    fn grids_contain_critical_values() {
        let e = stump();
        let g = oracle_grid(&e, &[1.0], &[0.1], 5);
        assert!(g[0].contains(&1.0));
        assert!(g[0].contains(&(2.5 + 0.1)));
        assert!(g[0].contains(&(2.5 - 0.1)));
        assert!(g[0].windows(2).all(|p| p[0] < p[1]));
        assert_eq!(uniform_grid(e.schema(), 5, 0.0)[0], vec![0.0, 2.5, 5.0, 7.5, 10.0]);
    }
}
