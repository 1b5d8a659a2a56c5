//! Structural controllability: verdicts that depend on the topology alone
//! (weights treated as free parameters), the exact criterion for trees with
//! the weights they actually carry, and randomized weight certificates.
//!
//! The topological facts are simple: a leader set works for *some* weighting
//! iff every node is reachable from a leader, and the fewest leaders equal
//! the number of source components of the condensation. For rooted trees the
//! given weights decide controllability combinatorially — the root controls
//! the tree iff no two edges whose child nodes sit in different branches
//! carry equal weights — and the tree Laplacian's eigenbasis has a closed
//! form used here as an exactly checkable oracle.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::graph::{different_branches, DirectedGraph};
use crate::leaders::{kalman_verdict, LeaderSet};
use crate::{Error, Matrix, Result, Tolerances};

/// True iff some choice of positive weights on this topology makes the
/// leader set controllable — equivalently, every node is reachable from a
/// leader (a spanning forest rooted at the leaders exists).
pub fn structurally_controllable(g: &DirectedGraph, leaders: &LeaderSet) -> Result<bool> {
    Ok(g.reachable_set(leaders.agents())?.len() == g.n())
}

/// Minimum number of leaders for structural controllability, with a witness
/// picking the smallest node of each source component.
pub fn min_structural_leaders(g: &DirectedGraph) -> (usize, LeaderSet) {
    let sources = g.source_components();
    let witness = LeaderSet::new(g.n(), sources.iter().map(|c| c[0]))
        .expect("source components are nonempty and disjoint");
    (sources.len(), witness)
}

/// Exact controllability test for a rooted directed tree with the weights it
/// carries: controllable from the root iff no two edges whose child nodes lie
/// in different branches have equal weights. Weights compare exactly — the
/// criterion is combinatorial and the weights are user-given literals.
pub fn tree_weight_controllable(t: &DirectedGraph, root: usize) -> Result<bool> {
    if t.tree_root()? != root {
        return Err(Error::NotATree("rooted at a different node"));
    }
    // Group edges by exact weight; only equal-weight pairs can conflict.
    let mut by_weight: Vec<(f64, usize)> = t.edges().iter().map(|e| (e.weight, e.dst)).collect();
    by_weight.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    let mut i = 0;
    while i < by_weight.len() {
        let mut j = i + 1;
        while j < by_weight.len() && by_weight[j].0 == by_weight[i].0 {
            j += 1;
        }
        for x in i..j {
            for y in x + 1..j {
                if different_branches(t, by_weight[x].1, by_weight[y].1)? {
                    return Ok(false);
                }
            }
        }
        i = j;
    }
    Ok(true)
}

/// Closed-form eigenbasis of a rooted tree's Laplacian.
///
/// The tree is BFS-relabeled from the root internally; the returned pair
/// `(P, D)` satisfies `L P = P D` for the *relabeled* Laplacian `L` (use
/// [`DirectedGraph::bfs_relabel`] to reproduce it). `D` is the diagonal of
/// `L` — a tree's eigenvalues are exactly 0 and its in-edge weights — and `P`
/// is unit lower triangular, built column by column from the parent chain:
/// `p_ij = -w_i * p_(parent(i),j) / (lambda_j - w_i)` with `w_i` the weight
/// of the edge into `i`.
///
/// The recursion divides by `lambda_j - w_i`, so it fails precisely when an
/// ancestor–descendant pair carries equal in-edge weights (the Laplacian is
/// then defective and has no eigenbasis at all). Equal weights *across*
/// branches merely repeat an eigenvalue and are fine here.
pub fn tree_eig_matrix(t: &DirectedGraph, root: usize) -> Result<(Matrix, Matrix)> {
    if t.tree_root()? != root {
        return Err(Error::NotATree("rooted at a different node"));
    }
    let (perm, h) = t.bfs_relabel(root)?;
    let n = h.n();
    let mut inv = vec![0usize; n];
    for (old0, &new) in perm.iter().enumerate() {
        inv[new - 1] = old0 + 1;
    }
    let mut parent = vec![0usize; n + 1];
    let mut w_in = vec![0.0f64; n + 1];
    for e in h.edges() {
        parent[e.dst] = e.src;
        w_in[e.dst] = e.weight;
    }
    let mut p = Matrix::identity(n, n);
    for j in 1..=n {
        let lambda = w_in[j]; // 0 for the root column
        for i in j + 1..=n {
            let up = p[(parent[i] - 1, j - 1)];
            if up == 0.0 {
                continue; // i is not below j; the entry stays 0
            }
            let denom = lambda - w_in[i];
            if denom == 0.0 {
                return Err(Error::RepeatedTreeWeights {
                    ancestor: inv[j - 1],
                    descendant: inv[i - 1],
                    weight: w_in[i],
                });
            }
            p[(i - 1, j - 1)] = -w_in[i] * up / denom;
        }
    }
    let d = Matrix::from_diagonal(&nalgebra::DVector::from_iterator(n, (1..=n).map(|v| w_in[v])));
    Ok((p, d))
}

/// Try to certify structural controllability constructively: draw i.i.d.
/// weights uniform on [0.5, 1.5) for every edge (in sorted edge order, RNG
/// seeded per trial with `seed + trial`) and return the first reweighted
/// graph whose Kalman verdict is controllable. Returns `None` after `trials`
/// misses — and immediately, without sampling, when the topology is not
/// structurally controllable (no weighting can ever work).
pub fn certify_by_random_weights(
    g: &DirectedGraph,
    leaders: &LeaderSet,
    trials: usize,
    seed: u64,
    tol: &Tolerances,
) -> Result<Option<DirectedGraph>> {
    if !structurally_controllable(g, leaders)? {
        return Ok(None);
    }
    for trial in 0..trials {
        let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(trial as u64));
        let candidate = g.reweighted(|_| rng.random_range(0.5..1.5))?;
        if kalman_verdict(&candidate.laplacian(), leaders, tol).controllable {
            return Ok(Some(candidate));
        }
    }
    Ok(None)
}
