//! Minimal edge-weight adjustment: when a graph has a spanning tree but its
//! root fails to control the system, reweight the fewest existing edges to
//! restore full controllability-matrix rank.
//!
//! The procedure: BFS-relabel from the best spanning-tree root, find which
//! rows of the single-leader controllability matrix are linearly dependent
//! (there are exactly `n - rank` of them), and nudge one incoming edge per
//! dependent row — the edge behind the row's first nonzero Laplacian entry,
//! which the BFS labeling guarantees to exist. Deltas `1·theta, 2·theta, ...`
//! keep the perturbed rows distinct from each other; if a round happens to
//! land on a degenerate value (a measure-zero event), theta escalates by 1.1
//! and the deltas are added again on top.

use crate::graph::DirectedGraph;
use crate::leaders::{controllability_matrix, input_matrix, kalman_verdict, LeaderSet, Verdict};
use crate::spectral::numerical_rank;
use crate::{Error, Matrix, Result, Tolerances};

/// One reweighted edge, in the graph's original labels.
#[derive(Debug, Clone, PartialEq)]
pub struct AdjustedEdge {
    pub src: usize,
    pub dst: usize,
    pub old_weight: f64,
    pub new_weight: f64,
}

/// The outcome of [`adjust_weights`]: which root was used, what was changed,
/// and the rank trajectory. Edges are reported in original node labels; the
/// BFS relabeling that ordered the rows is included for auditability
/// (`relabel_permutation[old - 1]` is the node's BFS label).
#[derive(Debug, Clone, PartialEq)]
pub struct AdjustmentPlan {
    pub root: usize,
    pub relabel_permutation: Vec<usize>,
    /// Kalman rank from `root` before any adjustment.
    pub initial_rank: usize,
    /// One entry per dependent row, ordered by BFS label of the row.
    pub adjusted_edges: Vec<AdjustedEdge>,
    /// Number of delta rounds applied (0 when already controllable).
    pub iterations: usize,
    pub final_rank: usize,
    /// The theta in force during the last applied round (theta0 if none ran).
    pub theta_final: f64,
}

/// Options for [`adjust_weights`].
#[derive(Debug, Clone, PartialEq)]
pub struct AdjustOptions {
    /// Initial delta scale.
    pub theta0: f64,
    /// Cap on delta rounds before giving up.
    pub max_iterations: usize,
    /// Force this root instead of probing every spanning-tree root.
    pub root: Option<usize>,
}

impl Default for AdjustOptions {
    fn default() -> Self {
        Self { theta0: 0.1, max_iterations: 200, root: None }
    }
}

/// `n - rank` of the single-leader controllability matrix.
pub fn rank_deficiency(l: &Matrix, leader: usize, tol: &Tolerances) -> Result<usize> {
    let leaders = LeaderSet::single(l.nrows(), leader)?;
    Ok(l.nrows() - kalman_verdict(l, &leaders, tol).rank)
}

/// Indices (1-based) of rows whose removal leaves a full-row-rank matrix:
/// scan rows in ascending order, keep a row iff it raises the rank of the
/// kept stack, report the rest. Exactly `n - rank(c)` rows are reported, the
/// earliest independent rows are kept, and row 1 is never reported for a
/// single-leader controllability matrix (its first entry is the leader's 1).
pub fn dependent_rows(c: &Matrix, tol: &Tolerances) -> Vec<usize> {
    let n = c.nrows();
    let target = numerical_rank(c, tol.rank);
    let mut kept: Vec<usize> = Vec::new();
    let mut dependent = Vec::new();
    for i in 0..n {
        if kept.len() == target {
            dependent.extend(i + 1..=n);
            break;
        }
        let mut rows = kept.clone();
        rows.push(i);
        let stack = c.select_rows(rows.iter());
        if numerical_rank(&stack, tol.rank) == rows.len() {
            kept.push(i);
        } else {
            dependent.push(i + 1);
        }
    }
    dependent
}

/// The edge to adjust for dependent row `i`: `j -> i` where `j` is the first
/// column of row `i` of the Laplacian holding a nonzero entry. After BFS
/// relabeling every non-root row has such an entry strictly left of the
/// diagonal; its absence signals a foreign matrix.
pub fn select_edge_for_row(l: &Matrix, i: usize) -> Result<(usize, usize)> {
    for j in 1..i {
        if l[(i - 1, j - 1)] != 0.0 {
            return Ok((j, i));
        }
    }
    Err(Error::NoAdjustableEdge(i))
}

/// Raise the weight of edge `j -> i` by `delta` directly on the Laplacian:
/// entry `(i,j)` decreases by `delta`, entry `(i,i)` increases by it, so row
/// sums stay exactly zero.
pub fn apply_delta(l: &Matrix, edge: (usize, usize), delta: f64) -> Matrix {
    let (j, i) = edge;
    debug_assert_ne!(l[(i - 1, j - 1)], 0.0, "delta applied to a non-edge");
    let mut out = l.clone();
    out[(i - 1, j - 1)] -= delta;
    out[(i - 1, i - 1)] += delta;
    out
}

/// Compute a minimal reweighting plan that makes `g` controllable from a
/// single spanning-tree root.
///
/// Roots are probed in ascending id (or just `options.root` if set): if any
/// root already yields full rank, a zero-edge plan for the smallest such root
/// is returned. Otherwise the root with the highest rank (smallest id on
/// ties) minimizes the number of adjusted edges — one per dependent row.
pub fn adjust_weights(
    g: &DirectedGraph,
    options: &AdjustOptions,
    tol: &Tolerances,
) -> Result<AdjustmentPlan> {
    assert!(
        options.theta0 > 0.0 && options.theta0.is_finite(),
        "theta0 must be positive and finite"
    );
    let n = g.n();
    let roots = g.spanning_tree_roots();
    if roots.is_empty() {
        return Err(Error::NoSpanningTree);
    }
    let candidates: Vec<usize> = match options.root {
        Some(r) => {
            if !roots.contains(&r) {
                return Err(Error::NotASpanningRoot(r));
            }
            vec![r]
        }
        None => roots,
    };

    let leader1 = LeaderSet::single(n, 1).expect("n >= 1");
    let mut best: Option<(usize, usize, Vec<usize>, DirectedGraph)> = None;
    for r in candidates {
        let (perm, h) = g.bfs_relabel(r).expect("r is a spanning-tree root");
        let rank = kalman_verdict(&h.laplacian(), &leader1, tol).rank;
        if rank == n {
            return Ok(AdjustmentPlan {
                root: r,
                relabel_permutation: perm,
                initial_rank: n,
                adjusted_edges: Vec::new(),
                iterations: 0,
                final_rank: n,
                theta_final: options.theta0,
            });
        }
        if best.as_ref().is_none_or(|(_, br, _, _)| rank > *br) {
            best = Some((r, rank, perm, h));
        }
    }
    let (root, initial_rank, perm, h) = best.expect("at least one candidate root");

    let l0 = h.laplacian();
    let b = input_matrix(n, &leader1);
    let dep = dependent_rows(&controllability_matrix(&l0, &b), tol);
    debug_assert!(!dep.contains(&1), "the leader row cannot be dependent");
    let edges: Vec<(usize, usize)> = dep
        .iter()
        .map(|&i| select_edge_for_row(&l0, i))
        .collect::<Result<_>>()?;

    let mut l = l0;
    let mut theta = options.theta0;
    let mut iterations = 0;
    let final_rank = loop {
        if iterations == options.max_iterations {
            let rank = numerical_rank(&controllability_matrix(&l, &b), tol.rank);
            let last_theta = if iterations == 0 { options.theta0 } else { theta / 1.1 };
            let partial =
                plan_from_state(g, root, &perm, initial_rank, &edges, &l, iterations, rank, last_theta);
            return Err(Error::IterationLimitExceeded {
                limit: options.max_iterations,
                partial: Box::new(partial),
            });
        }
        iterations += 1;
        for (k, &edge) in edges.iter().enumerate() {
            l = apply_delta(&l, edge, (k + 1) as f64 * theta);
        }
        let rank = numerical_rank(&controllability_matrix(&l, &b), tol.rank);
        if rank == n {
            break rank;
        }
        theta *= 1.1;
    };
    Ok(plan_from_state(g, root, &perm, initial_rank, &edges, &l, iterations, final_rank, theta))
}

#[allow(clippy::too_many_arguments)]
fn plan_from_state(
    g: &DirectedGraph,
    root: usize,
    perm: &[usize],
    initial_rank: usize,
    edges: &[(usize, usize)],
    l: &Matrix,
    iterations: usize,
    final_rank: usize,
    theta_final: f64,
) -> AdjustmentPlan {
    let mut inv = vec![0usize; perm.len()];
    for (old0, &new) in perm.iter().enumerate() {
        inv[new - 1] = old0 + 1;
    }
    let adjusted_edges = edges
        .iter()
        .map(|&(j, i)| {
            let (src, dst) = (inv[j - 1], inv[i - 1]);
            let new_weight = -l[(i - 1, j - 1)];
            debug_assert!(new_weight > 0.0);
            AdjustedEdge {
                src,
                dst,
                old_weight: g.weight(src, dst).expect("edge came from the graph"),
                new_weight,
            }
        })
        .collect();
    AdjustmentPlan {
        root,
        relabel_permutation: perm.to_vec(),
        initial_rank,
        adjusted_edges,
        iterations,
        final_rank,
        theta_final,
    }
}

/// Rebuild the adjusted graph from scratch: original graph plus the plan's
/// new weights. Errors if the plan names an edge the graph does not have.
pub fn apply_plan(g: &DirectedGraph, plan: &AdjustmentPlan) -> Result<DirectedGraph> {
    let mut weights: Vec<(usize, usize, f64)> =
        g.edges().iter().map(|e| (e.src, e.dst, e.weight)).collect();
    for ae in &plan.adjusted_edges {
        let slot = weights
            .iter_mut()
            .find(|(s, d, _)| (*s, *d) == (ae.src, ae.dst))
            .ok_or(Error::PlanEdgeMissing { src: ae.src, dst: ae.dst })?;
        slot.2 = ae.new_weight;
    }
    DirectedGraph::new(g.n(), weights)
}

/// Independent post-check: reapply the plan to `g` and run the Kalman test
/// with the plan's root as the sole leader.
pub fn verify_plan(g: &DirectedGraph, plan: &AdjustmentPlan, tol: &Tolerances) -> Result<Verdict> {
    let adjusted = apply_plan(g, plan)?;
    let leaders = LeaderSet::single(g.n(), plan.root)?;
    Ok(kalman_verdict(&adjusted.laplacian(), &leaders, tol))
}
