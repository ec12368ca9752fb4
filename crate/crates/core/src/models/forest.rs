//! CART trees on Gini impurity and a bagged forest of them.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::ForestParams;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Node {
    Leaf {
        class: usize,
    },
    Split {
        feature: usize,
        threshold: f64,
        left: usize,
        right: usize,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Tree {
    pub nodes: Vec<Node>,
}

impl Tree {
    pub fn predict(&self, x: &[f64]) -> usize {
        let mut at = 0;
        loop {
            match self.nodes[at] {
                Node::Leaf { class } => return class,
                Node::Split {
                    feature,
                    threshold,
                    left,
                    right,
                } => at = if x[feature] <= threshold { left } else { right },
            }
        }
    }

    pub fn depth(&self) -> usize {
        fn go(t: &Tree, at: usize) -> usize {
            match t.nodes[at] {
                Node::Leaf { .. } => 0,
                Node::Split { left, right, .. } => 1 + go(t, left).max(go(t, right)),
            }
        }
        go(self, 0)
    }
}

fn gini(counts: &[usize], total: usize) -> f64 {
    if total == 0 {
        return 0.0;
    }
    let t = total as f64;
    1.0 - counts.iter().map(|&c| (c as f64 / t).powi(2)).sum::<f64>()
}

/// Majority class; ties go to `preferred` when it is among the leaders,
/// otherwise to the lowest class index.
pub(crate) fn majority(counts: &[usize], preferred: usize) -> usize {
    let best = counts.iter().copied().max().unwrap_or(0);
    if counts.get(preferred) == Some(&best) {
        return preferred;
    }
    counts.iter().position(|&c| c == best).unwrap_or(0)
}

struct SplitChoice {
    feature: usize,
    threshold: f64,
    impurity: f64,
}

struct Builder<'a> {
    x: &'a [Vec<f64>],
    y: &'a [usize],
    n_classes: usize,
    preferred: usize,
    params: &'a ForestParams,
    max_features: usize,
}

impl Builder<'_> {
    fn counts(&self, idx: &[usize]) -> Vec<usize> {
        let mut c = vec![0; self.n_classes];
        for &i in idx {
            c[self.y[i]] += 1;
        }
        c
    }

    fn best_split_on(&self, idx: &mut [usize], feature: usize, parent: &[usize]) -> Option<SplitChoice> {
        idx.sort_by(|&a, &b| self.x[a][feature].total_cmp(&self.x[b][feature]).then(a.cmp(&b)));
        let n = idx.len();
        let mut left = vec![0usize; self.n_classes];
        let mut best: Option<SplitChoice> = None;
        for pos in 0..n - 1 {
            left[self.y[idx[pos]]] += 1;
            let a = self.x[idx[pos]][feature];
            let b = self.x[idx[pos + 1]][feature];
            if a == b {
                continue;
            }
            let nl = pos + 1;
            let right: Vec<usize> = parent.iter().zip(&left).map(|(p, l)| p - l).collect();
            let imp = (nl as f64 * gini(&left, nl) + (n - nl) as f64 * gini(&right, n - nl)) / n as f64;
            if best.as_ref().is_none_or(|s| imp < s.impurity) {
                let mut threshold = a + (b - a) / 2.0;
                if threshold >= b {
                    threshold = a;
                }
                best = Some(SplitChoice {
                    feature,
                    threshold,
                    impurity: imp,
                });
            }
        }
        best
    }

    /// Features are visited in a random order until `max_features` of them
    /// admit a split; constant features do not count towards the budget.
    fn best_split(&self, idx: &[usize], rng: &mut ChaCha8Rng) -> Option<SplitChoice> {
        let d = self.x[0].len();
        let parent = self.counts(idx);
        let mut features: Vec<usize> = (0..d).collect();
        features.shuffle(rng);
        let mut scratch = idx.to_vec();
        let mut tried = 0;
        let mut best: Option<SplitChoice> = None;
        for f in features {
            if tried >= self.max_features {
                break;
            }
            if let Some(s) = self.best_split_on(&mut scratch, f, &parent) {
                tried += 1;
                if best.as_ref().is_none_or(|b| s.impurity < b.impurity) {
                    best = Some(s);
                }
            }
        }
        best
    }

    fn build(&self, root: Vec<usize>, rng: &mut ChaCha8Rng) -> Tree {
        let mut nodes = vec![Node::Leaf { class: 0 }];
        let mut stack = vec![(0usize, root, 0usize)];
        while let Some((slot, idx, depth)) = stack.pop() {
            let counts = self.counts(&idx);
            let pure = counts.iter().filter(|&&c| c > 0).count() <= 1;
            let depth_capped = self.params.max_depth.is_some_and(|m| depth >= m);
            let leaf = Node::Leaf {
                class: majority(&counts, self.preferred),
            };
            if pure || depth_capped || idx.len() < self.params.min_samples_split {
                nodes[slot] = leaf;
                continue;
            }
            let Some(split) = self.best_split(&idx, rng) else {
                nodes[slot] = leaf;
                continue;
            };
            let (l, r): (Vec<usize>, Vec<usize>) = idx
                .iter()
                .partition(|&&i| self.x[i][split.feature] <= split.threshold);
            let left = nodes.len();
            nodes.push(Node::Leaf { class: 0 });
            let right = nodes.len();
            nodes.push(Node::Leaf { class: 0 });
            nodes[slot] = Node::Split {
                feature: split.feature,
                threshold: split.threshold,
                left,
                right,
            };
            stack.push((right, r, depth + 1));
            stack.push((left, l, depth + 1));
        }
        Tree { nodes }
    }
}

/// Number of candidate features per split, `⌈√d⌉` unless overridden.
pub fn features_per_split(d: usize, params: &ForestParams) -> usize {
    params
        .max_features
        .unwrap_or_else(|| (d as f64).sqrt().ceil() as usize)
        .clamp(1, d.max(1))
}

/// Fits a single CART tree on the rows in `idx`.
pub fn fit_tree(
    x: &[Vec<f64>],
    y: &[usize],
    idx: Vec<usize>,
    n_classes: usize,
    preferred: usize,
    params: &ForestParams,
    rng: &mut ChaCha8Rng,
) -> Tree {
    let builder = Builder {
        x,
        y,
        n_classes,
        preferred,
        params,
        max_features: features_per_split(x[0].len(), params),
    };
    builder.build(idx, rng)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Forest {
    pub trees: Vec<Tree>,
}

impl Forest {
    /// Tree `i` is seeded with `seed + i` and trained on its own bootstrap
    /// sample, so the forest does not depend on training order.
    pub fn fit(
        x: &[Vec<f64>],
        y: &[usize],
        n_classes: usize,
        preferred: usize,
        params: &ForestParams,
        seed: u64,
    ) -> Self {
        let trees = (0..params.n_trees)
            .into_par_iter()
            .map(|i| Self::fit_one(x, y, n_classes, preferred, params, seed, i))
            .collect();
        Self { trees }
    }

    pub fn fit_one(
        x: &[Vec<f64>],
        y: &[usize],
        n_classes: usize,
        preferred: usize,
        params: &ForestParams,
        seed: u64,
        tree_index: usize,
    ) -> Tree {
        let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(tree_index as u64));
        let n = x.len();
        let idx: Vec<usize> = if params.bootstrap {
            (0..n).map(|_| rng.random_range(0..n)).collect()
        } else {
            (0..n).collect()
        };
        fit_tree(x, y, idx, n_classes, preferred, params, &mut rng)
    }

    pub fn vote_fractions(&self, x: &[f64], n_classes: usize) -> Vec<f64> {
        let mut votes = vec![0.0; n_classes];
        for t in &self.trees {
            votes[t.predict(x)] += 1.0;
        }
        let n = self.trees.len().max(1) as f64;
        votes.iter_mut().for_each(|v| *v /= n);
        votes
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn xor() -> (Vec<Vec<f64>>, Vec<usize>) {
        let x = vec![vec![0.0, 0.0], vec![0.0, 1.0], vec![1.0, 0.0], vec![1.0, 1.0]];
        (x, vec![0, 1, 1, 0])
    }

    #[test]
    fn single_tree_fits_xor() {
        let (x, y) = xor();
        let params = ForestParams { max_features: Some(2), ..Default::default() };
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let tree = fit_tree(&x, &y, (0..4).collect(), 2, 1, &params, &mut rng);
        for (r, &c) in x.iter().zip(&y) {
            assert_eq!(tree.predict(r), c);
        }
        assert_eq!(tree.depth(), 2);
    }

    #[test]
    fn gini_values() {
        assert_eq!(gini(&[5, 0], 5), 0.0);
        assert!((gini(&[2, 2], 4) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn majority_prefers_positive_on_tie() {
        assert_eq!(majority(&[3, 3], 1), 1);
        assert_eq!(majority(&[3, 3, 1], 2), 0);
        assert_eq!(majority(&[1, 4], 0), 1);
    }

    #[test]
    fn depth_cap_respected() {
        let (x, y) = xor();
        let params = ForestParams { max_depth: Some(1), max_features: Some(2), ..Default::default() };
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        assert!(fit_tree(&x, &y, (0..4).collect(), 2, 1, &params, &mut rng).depth() <= 1);
    }

    #[test]
    fn features_per_split_default() {
        let p = ForestParams::default();
        assert_eq!(features_per_split(75, &p), 9);
        assert_eq!(features_per_split(4, &p), 2);
        assert_eq!(features_per_split(1, &p), 1);
    }

    #[test]
    fn trees_depend_only_on_their_position() {
        let x: Vec<Vec<f64>> = (0..30).map(|i| vec![(i as f64 * 0.7).sin(), (i as f64 * 1.3).cos()]).collect();
        let y: Vec<usize> = (0..30).map(|i| usize::from(x[i][0] + x[i][1] > 0.0)).collect();
        let params = ForestParams { n_trees: 8, ..Default::default() };
        let forest = Forest::fit(&x, &y, 2, 1, &params, 11);
        for i in (0..8).rev() {
            assert_eq!(Forest::fit_one(&x, &y, 2, 1, &params, 11, i), forest.trees[i]);
        }
        let mut shuffled = forest.clone();
        shuffled.trees.reverse();
        for r in &x {
            assert_eq!(shuffled.vote_fractions(r, 2), forest.vote_fractions(r, 2));
        }
    }
}
