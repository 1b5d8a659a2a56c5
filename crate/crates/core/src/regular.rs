//! Controllability shortcuts for unweighted in-degree-regular digraphs.
//!
//! When every node has the same in-degree `d` and all weights are 1, the
//! Laplacian is `dI - A` with `A` the 0/1 adjacency, so powers of `L` are
//! polynomials in `A` and the controllability matrix from agent 1 reduces to
//! *walk counts*: the system is single-leader controllable from agent 1 iff
//! the `(n-1) x (n-1)` matrix of "walks of length j from node 1 to node i+1"
//! is invertible. Everything here is exact integer arithmetic — walk counts
//! in `i128` with overflow detection, determinants in big integers — so no
//! rank tolerance enters these verdicts.

use itertools::Itertools;
use nalgebra::DMatrix;
use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::graph::DirectedGraph;
use crate::{Error, Result};

/// Exact integer matrix (walk counts).
pub type IntMatrix = DMatrix<i128>;

const COVER_BUDGET: usize = 2_000_000;

/// 0/1 adjacency after checking the preconditions shared by this module:
/// unit weights and equal in-degrees.
fn unit_adjacency(g: &DirectedGraph) -> Result<IntMatrix> {
    if let Some(e) = g.edges().iter().find(|e| e.weight != 1.0) {
        return Err(Error::NotUnitWeights { src: e.src, dst: e.dst, weight: e.weight });
    }
    g.in_degree_regular_degree()?;
    let mut a = IntMatrix::zeros(g.n(), g.n());
    for e in g.edges() {
        a[(e.dst - 1, e.src - 1)] = 1;
    }
    Ok(a)
}

/// `a * b` with overflow checking; `power` only labels the error.
fn checked_mul(a: &IntMatrix, b: &IntMatrix, power: u32) -> Result<IntMatrix> {
    let n = a.nrows();
    let mut out = IntMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            let mut acc: i128 = 0;
            for k in 0..n {
                let term = a[(i, k)]
                    .checked_mul(b[(k, j)])
                    .ok_or(Error::WalkCountOverflow(power))?;
                acc = acc.checked_add(term).ok_or(Error::WalkCountOverflow(power))?;
            }
            out[(i, j)] = acc;
        }
    }
    Ok(out)
}

/// Walk-count matrix `M`: `M[i-1][j-1]` is the number of length-`j` walks
/// from agent 1 to agent `i+1`, for `i, j` in `1..n` (shape `(n-1) x (n-1)`;
/// empty for `n = 1`).
pub fn path_count_matrix(g: &DirectedGraph) -> Result<IntMatrix> {
    let a = unit_adjacency(g)?;
    let n = g.n();
    let mut m = IntMatrix::zeros(n.saturating_sub(1), n.saturating_sub(1));
    let mut power = a.clone();
    for j in 1..n {
        for i in 1..n {
            m[(i - 1, j - 1)] = power[(i, 0)];
        }
        if j + 1 < n {
            power = checked_mul(&power, &a, (j + 1) as u32)?;
        }
    }
    Ok(m)
}

/// Exact determinant by fraction-free (Bareiss) elimination over big integers.
fn exact_det(m: &IntMatrix) -> BigInt {
    let n = m.nrows();
    let mut a: Vec<Vec<BigInt>> =
        (0..n).map(|i| (0..n).map(|j| BigInt::from(m[(i, j)])).collect()).collect();
    let mut sign = false;
    let mut prev = BigInt::one();
    for k in 0..n.saturating_sub(1) {
        if a[k][k].is_zero() {
            match (k + 1..n).find(|&r| !a[r][k].is_zero()) {
                Some(r) => {
                    a.swap(k, r);
                    sign = !sign;
                }
                None => return BigInt::zero(),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                // Exact division is guaranteed by the Bareiss identity.
                a[i][j] = (&a[i][j] * &a[k][k] - &a[i][k] * &a[k][j]) / &prev;
            }
        }
        prev = a[k][k].clone();
    }
    let det = if n == 0 { BigInt::one() } else { a[n - 1][n - 1].clone() };
    if sign {
        -det
    } else {
        det
    }
}

/// Single-leader controllability from agent 1, decided exactly: true iff the
/// walk-count matrix is invertible over the integers.
pub fn regular_slc_by_agent1(g: &DirectedGraph) -> Result<bool> {
    Ok(!exact_det(&path_count_matrix(g)?).is_zero())
}

/// `S = A + A^2 + ... + A^(n-1)`: entry `(i, j)` counts walks of length
/// 1..n-1 from `j+1` to `i+1`, so it is positive iff `i+1` is reachable from
/// `j+1` (for distinct nodes).
fn walk_sum_matrix(g: &DirectedGraph) -> Result<IntMatrix> {
    let a = unit_adjacency(g)?;
    let n = g.n();
    let mut s = IntMatrix::zeros(n, n);
    let mut power = IntMatrix::identity(n, n);
    for k in 1..n {
        power = checked_mul(&power, &a, k as u32)?;
        s += &power;
    }
    Ok(s)
}

/// True when *no* agent can be the sole leader: every column of the walk-sum
/// matrix has a zero off-diagonal entry, i.e. every agent fails to reach
/// someone. (Diagonal entries count closed walks back to the probe agent and
/// say nothing about reaching others, so they are exempt.) One-directional:
/// false does not imply single-leader controllability.
pub fn regular_never_slc(g: &DirectedGraph) -> Result<bool> {
    let s = walk_sum_matrix(g)?;
    let n = g.n();
    Ok((0..n).all(|j| (0..n).any(|i| i != j && s[(i, j)] == 0)))
}

/// Lower bound on the number of leaders: the minimum number of columns of the
/// walk-sum matrix that jointly cover every coordinate, where column `j`
/// covers coordinate `i` when `S[i][j] > 0` or `i = j` (a leader needs no
/// walk to itself). Exact set cover by enumeration, budget-guarded.
pub fn regular_leader_lower_bound(g: &DirectedGraph) -> Result<usize> {
    let s = walk_sum_matrix(g)?;
    let n = g.n();
    let mut tested = 0usize;
    for m in 1..=n {
        for cols in (0..n).combinations(m) {
            tested += 1;
            if tested > COVER_BUDGET {
                return Err(Error::BudgetExceeded { budget: COVER_BUDGET });
            }
            if (0..n).all(|i| cols.iter().any(|&j| i == j || s[(i, j)] > 0)) {
                return Ok(m);
            }
        }
    }
    Ok(n) // unreachable: all n columns always cover by self-cover
}

/// Structural controllability with a single leader, read off the walk-sum
/// matrix: true iff some agent reaches everyone (some column is positive off
/// its own diagonal position). Agrees with spanning-tree existence.
pub fn regular_structural(g: &DirectedGraph) -> Result<bool> {
    let s = walk_sum_matrix(g)?;
    let n = g.n();
    Ok((0..n).any(|j| (0..n).all(|i| i == j || s[(i, j)] != 0)))
}
