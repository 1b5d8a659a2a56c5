//! Controllability analysis of consensus networks.
//!
//! A consensus network is a weighted directed graph whose agents evolve by
//! `x' = -L x`, with `L` the in-degree Laplacian. Choosing a set of leader
//! agents turns the dynamics into the driven system `x' = -L x + B u`, and the
//! questions this crate answers are: which leader sets make that system
//! controllable, how small can such a set be, when does controllability hold
//! for almost every choice of weights (structural controllability), and when a
//! single-leader system falls short, which minimal set of edge weights can be
//! perturbed to restore it.
//!
//! The crate is organised around the analysis pipeline:
//!
//! * [`graph`] — the [`DirectedGraph`](graph::DirectedGraph) type, its
//!   validation rules, Laplacian/adjacency matrices, reachability and
//!   condensation helpers, and a line-oriented text format.
//! * [`spectral`] — eigenvalue clustering, left eigenvector bases, numerical
//!   rank, and Jordan block diagnostics.
//! * [`leaders`] — Kalman and eigenvector (PBH-style) controllability tests,
//!   leader-set enumeration, and bounds on the minimum number of leaders.
//! * [`structural`] — structural controllability, spanning-tree criteria for
//!   trees with distinct branch weights, and random-weight certificates.
//! * [`adjust`] — minimal edge-weight adjustment that restores single-leader
//!   controllability on a spanning tree root.
//! * [`regular`] — exact integer shortcuts for unweighted in-degree-regular
//!   networks (walk-count matrices, leader lower bounds).

pub mod adjust;
pub mod error;
pub mod graph;
pub mod leaders;
pub mod regular;
pub mod spectral;
pub mod structural;

pub use error::{Error, Result};

/// Dense real matrix used throughout the crate.
pub type Matrix = nalgebra::DMatrix<f64>;
/// Dense complex matrix (left eigenvector bases, shifted Laplacians).
pub type CMatrix = nalgebra::DMatrix<num_complex::Complex64>;

/// Tolerance knobs shared by the numerical routines.
///
/// `None` fields resolve to data-dependent defaults at the point of use; the
/// resolved values are recorded in the results so a run can be reproduced.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    /// Eigenvalue clustering radius. Default: `1e-8 * (1 + max |lambda|)`.
    pub cluster: Option<f64>,
    /// Absolute singular-value cutoff for rank decisions. Default:
    /// `sigma_max * max(rows, cols) * f64::EPSILON` per matrix.
    pub rank: Option<f64>,
    /// Relative threshold below which an eigenvector component counts as zero.
    pub zero_entry: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            cluster: None,
            rank: None,
            zero_entry: 1e-7,
        }
    }
}

impl Tolerances {
    /// Resolve the clustering radius for a spectrum with the given largest
    /// eigenvalue magnitude.
    pub(crate) fn cluster_radius(&self, max_abs_lambda: f64) -> f64 {
        self.cluster.unwrap_or(1e-8 * (1.0 + max_abs_lambda))
    }
}
