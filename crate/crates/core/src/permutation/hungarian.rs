use ndarray::Array2;

use crate::error::{Error, Result};
use crate::scalar::Scalar;

use super::Permutation;

/// Maximum-score assignment (Kuhn–Munkres with potentials, `O(n³)`).
///
/// Returns `p` with `p[row] = column`. Among equal-score alternatives the
/// scan order (rows ascending, first minimal column) fixes the result.
pub fn hungarian<T: Scalar>(score: &Array2<T>) -> Result<Permutation> {
    let n = score.nrows();
    if score.ncols() != n {
        return Err(Error::Shape { expected: n, got: score.ncols() });
    }
    if score.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("hungarian score matrix"));
    }
    // Minimize cost = −score; work in f64 for the potentials.
    let cost = |i: usize, j: usize| -score[[i, j]].to_f64_lossy();

    let inf = f64::INFINITY;
    let mut u = vec![0.0; n + 1];
    let mut v = vec![0.0; n + 1];
    // owner[j]: 1-based row matched to column j (0 = free).
    let mut owner = vec![0usize; n + 1];
    let mut way = vec![0usize; n + 1];

    for i in 1..=n {
        owner[0] = i;
        let mut j0 = 0usize;
        let mut minv = vec![inf; n + 1];
        let mut used = vec![false; n + 1];
        loop {
            used[j0] = true;
            let i0 = owner[j0];
            let mut delta = inf;
            let mut j1 = 0usize;
            for j in 1..=n {
                if used[j] {
                    continue;
                }
                let cur = cost(i0 - 1, j - 1) - u[i0] - v[j];
                if cur < minv[j] {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if minv[j] < delta {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for j in 0..=n {
                if used[j] {
                    u[owner[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
            if owner[j0] == 0 {
                break;
            }
        }
        loop {
            let j1 = way[j0];
            owner[j0] = owner[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }

    let mut assignment = vec![0usize; n];
    for j in 1..=n {
        assignment[owner[j] - 1] = j - 1;
    }
    Permutation::new(assignment)
}
