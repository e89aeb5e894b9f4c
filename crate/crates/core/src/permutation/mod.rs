//! Learnable feature ordering: Gumbel perturbation, log-space Sinkhorn
//! normalization, and Hungarian hardening into an exact permutation.

mod gumbel;
mod hungarian;
mod sinkhorn;
mod state;

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};

pub use gumbel::sample_gumbel;
pub use hungarian::hungarian;
pub use sinkhorn::{mix, sinkhorn, SINKHORN_ITERS};
pub(crate) use sinkhorn::{sinkhorn_backward, sinkhorn_forward};
pub use state::{PermutationConfig, PermutationState};

/// Bijection from tree positions to source column indices:
/// `self[position] = column`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<usize>", into = "Vec<usize>")]
pub struct Permutation(Vec<usize>);

impl Permutation {
    pub fn identity(n: usize) -> Self {
        Self((0..n).collect())
    }

    pub fn reversal(n: usize) -> Self {
        Self((0..n).rev().collect())
    }

    pub fn new(map: Vec<usize>) -> Result<Self> {
        let n = map.len();
        let mut seen = vec![false; n];
        for &j in &map {
            if j >= n || std::mem::replace(&mut seen[j], true) {
                return Err(domain(format!("{map:?} is not a permutation of 0..{n}")));
            }
        }
        Ok(Self(map))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.0
    }

    /// Reorders `values` into tree order.
    pub fn apply<V: Copy>(&self, values: &[V]) -> Result<Vec<V>> {
        if values.len() != self.0.len() {
            return Err(Error::Shape { expected: self.0.len(), got: values.len() });
        }
        Ok(self.0.iter().map(|&j| values[j]).collect())
    }
}

impl TryFrom<Vec<usize>> for Permutation {
    type Error = Error;

    fn try_from(v: Vec<usize>) -> Result<Self> {
        Permutation::new(v)
    }
}

impl From<Permutation> for Vec<usize> {
    fn from(p: Permutation) -> Self {
        p.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn validates_bijection() {
        assert!(Permutation::new(vec![2, 0, 1]).is_ok());
        assert!(Permutation::new(vec![0, 0, 1]).is_err());
        assert!(Permutation::new(vec![0, 3, 1]).is_err());
    }

    #[test]
    fn apply_reorders() {
        let p = Permutation::reversal(3);
        assert_eq!(p.apply(&['a', 'b', 'c']).unwrap(), vec!['c', 'b', 'a']);
        assert_eq!(Permutation::identity(2).apply(&[1, 2]).unwrap(), vec![1, 2]);
        assert!(p.apply(&[1, 2]).is_err());
    }

    #[test]
    fn serde_rejects_non_permutations() {
        assert!(serde_json::from_str::<Permutation>("[1,0,2]").is_ok());
        assert!(serde_json::from_str::<Permutation>("[1,1,2]").is_err());
    }
}
