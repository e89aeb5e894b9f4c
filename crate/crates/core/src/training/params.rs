use rand::Rng;

use crate::error::{Error, Result};
use crate::permutation::{Permutation, PermutationConfig, PermutationState};
use crate::scalar::Scalar;
use crate::tree::{LspTree, Node};

/// Trainable parameters: the permutation layer plus one raw weight and one
/// raw andness per aggregation node.
///
/// `w = σ(θ_w)` and `α = −1 + 3σ(θ_a)`, so both stay in their open domains.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelParams<T> {
    pub perm: PermutationState<T>,
    pub theta_w: Vec<T>,
    pub theta_a: Vec<T>,
}

#[inline]
pub(crate) fn andness_of<T: Scalar>(theta: T) -> T {
    T::of(3.0) * theta.sigmoid() - T::one()
}

/// Inverse of the andness transform; `alpha` must lie in `(−1, 2)`.
pub fn theta_for_andness<T: Scalar>(alpha: T) -> T {
    let s = (alpha + T::one()) / T::of(3.0);
    (s / (T::one() - s)).ln()
}

/// Inverse of the weight transform; `w` must lie in `(0, 1)`.
pub fn theta_for_weight<T: Scalar>(w: T) -> T {
    (w / (T::one() - w)).ln()
}

impl<T: Scalar> ModelParams<T> {
    pub fn new(perm: PermutationState<T>, theta_w: Vec<T>, theta_a: Vec<T>) -> Result<Self> {
        let n = perm.len();
        if n < 2 {
            return Err(Error::Domain(format!("a model needs at least 2 features, got {n}")));
        }
        for v in [&theta_w, &theta_a] {
            if v.len() != n - 1 {
                return Err(Error::Shape { expected: n - 1, got: v.len() });
            }
        }
        if theta_w.iter().chain(&theta_a).any(|t| !t.is_finite()) {
            return Err(Error::NonFinite("node parameters"));
        }
        Ok(Self { perm, theta_w, theta_a })
    }

    /// Fresh parameters: seeded logits and node parameters drawn uniformly
    /// from `[−spread, spread]` around the neutral point `w = α = 0.5`.
    pub fn init<R: Rng + ?Sized>(n: usize, cfg: &PermutationConfig, spread: f64, rng: &mut R) -> Result<Self> {
        let perm = PermutationState::new(n, cfg, rng);
        Self::init_nodes(perm, spread, rng)
    }

    /// Fresh node parameters over a permutation fixed in advance.
    pub fn init_fixed<R: Rng + ?Sized>(
        order: Permutation,
        cfg: &PermutationConfig,
        spread: f64,
        rng: &mut R,
    ) -> Result<Self> {
        Self::init_nodes(PermutationState::fixed(order, cfg), spread, rng)
    }

    fn init_nodes<R: Rng + ?Sized>(perm: PermutationState<T>, spread: f64, rng: &mut R) -> Result<Self> {
        let m = perm.len().saturating_sub(1);
        let mut draw = || T::of(if spread > 0.0 { rng.random_range(-spread..=spread) } else { 0.0 });
        let theta_w = (0..m).map(|_| draw()).collect();
        let theta_a = (0..m).map(|_| draw()).collect();
        Self::new(perm, theta_w, theta_a)
    }

    pub fn n_features(&self) -> usize {
        self.perm.len()
    }

    pub fn weights(&self) -> Vec<T> {
        self.theta_w.iter().map(|t| t.sigmoid()).collect()
    }

    pub fn andness(&self) -> Vec<T> {
        self.theta_a.iter().map(|&t| andness_of(t)).collect()
    }

    /// Chain extracted from the hard assignment. `names` are the dataset
    /// columns; leaf `i` of the tree is column `P_hard[i]`.
    pub fn to_tree(&self, names: &[String]) -> Result<LspTree<T>> {
        let perm = self
            .perm
            .hard_assignment()
            .ok_or_else(|| Error::State("permutation layer not frozen; no tree to extract".into()))?;
        if names.len() != perm.len() {
            return Err(Error::Shape { expected: perm.len(), got: names.len() });
        }
        let features = perm.as_slice().iter().map(|&j| names[j].clone()).collect();
        let nodes = self
            .weights()
            .into_iter()
            .zip(self.andness())
            .map(|(w, a)| Node::new(w, a))
            .collect::<Result<Vec<_>>>()?;
        LspTree::new(features, nodes)
    }
}
