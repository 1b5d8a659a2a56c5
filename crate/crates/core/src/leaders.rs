//! Leader selection: which agents must be driven for the consensus dynamics
//! `x' = -L x + B u` to be controllable.
//!
//! Two independent tests are provided and kept separate on purpose. The
//! Kalman test ranks the controllability matrix `(B, LB, ..., L^(n-1) B)`
//! (the sign of `L` does not change the span). The eigenvector test checks,
//! for every distinct eigenvalue, that the left eigenbasis restricted to the
//! leader columns keeps full rank — the PBH condition expressed on left
//! eigenvectors, which never needs Jordan chains. Agreement of the two routes
//! is part of the test suite, not something the library assumes.

use itertools::Itertools;
use num_complex::Complex64;

use crate::spectral::{rank_with_threshold, Spectrum};
use crate::{CMatrix, Error, Matrix, Result, Tolerances};

/// A nonempty, duplicate-free set of leader agents (1-based ids), sorted.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LeaderSet {
    agents: Vec<usize>,
}

impl LeaderSet {
    pub fn new(n: usize, agents: impl IntoIterator<Item = usize>) -> Result<Self> {
        let mut v: Vec<usize> = agents.into_iter().collect();
        if v.is_empty() {
            return Err(Error::EmptyLeaderSet);
        }
        for &a in &v {
            if a == 0 || a > n {
                return Err(Error::NodeOutOfRange { id: a, n });
            }
        }
        v.sort_unstable();
        if let Some(w) = v.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::DuplicateLeader(w[0]));
        }
        Ok(Self { agents: v })
    }

    pub fn single(n: usize, agent: usize) -> Result<Self> {
        Self::new(n, [agent])
    }

    /// Sorted agent ids.
    pub fn agents(&self) -> &[usize] {
        &self.agents
    }

    pub fn len(&self) -> usize {
        self.agents.len()
    }

    pub fn is_empty(&self) -> bool {
        false // construction rejects empty sets
    }

    pub fn contains(&self, agent: usize) -> bool {
        self.agents.binary_search(&agent).is_ok()
    }
}

/// Which test produced a [`Verdict`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Kalman,
    Pbh,
}

/// Outcome of a controllability test.
#[derive(Debug, Clone, PartialEq)]
pub struct Verdict {
    pub controllable: bool,
    /// Dimension of the controllable subspace. Exact for [`Method::Kalman`];
    /// for [`Method::Pbh`] it is `n` minus the total eigenbasis rank deficit,
    /// an upper bound that is exact whenever the verdict is controllable.
    pub rank: usize,
    /// State dimension.
    pub n: usize,
    pub method: Method,
    /// The largest singular-value cutoff used in the rank decisions.
    pub threshold: f64,
}

/// Input matrix `B` with one unit column per leader, leaders in ascending order.
pub fn input_matrix(n: usize, leaders: &LeaderSet) -> Matrix {
    let mut b = Matrix::zeros(n, leaders.len());
    for (k, &a) in leaders.agents().iter().enumerate() {
        b[(a - 1, k)] = 1.0;
    }
    b
}

/// Controllability matrix `(B, LB, L^2 B, ..., L^(n-1) B)`, an `n x (n*m)`
/// horizontal stack.
pub fn controllability_matrix(l: &Matrix, b: &Matrix) -> Matrix {
    let n = l.nrows();
    let m = b.ncols();
    let mut c = Matrix::zeros(n, n * m);
    let mut block = b.clone();
    for k in 0..n {
        c.view_mut((0, k * m), (n, m)).copy_from(&block);
        block = l * &block;
    }
    c
}

/// Kalman rank test: controllable iff the controllability matrix has rank `n`.
pub fn kalman_verdict(l: &Matrix, leaders: &LeaderSet, tol: &Tolerances) -> Verdict {
    let n = l.nrows();
    let b = input_matrix(n, leaders);
    let c = controllability_matrix(l, &b);
    let (rank, threshold) = rank_with_threshold(&c, tol.rank);
    Verdict { controllable: rank == n, rank, n, method: Method::Kalman, threshold }
}

/// Left eigenbasis restricted to the leader columns: a `geo_mult x m` matrix
/// for the eigenvalue matching `lambda`.
pub fn omega_matrix(spectrum: &Spectrum, leaders: &LeaderSet, lambda: Complex64) -> Result<CMatrix> {
    let record = spectrum.find(lambda).ok_or_else(|| {
        let distance = spectrum
            .eigs
            .iter()
            .map(|e| (e.lambda - lambda).norm())
            .fold(f64::INFINITY, f64::min);
        Error::NotAnEigenvalue { lambda, distance }
    })?;
    let mut omega = CMatrix::zeros(record.geo_mult, leaders.len());
    for (k, &a) in leaders.agents().iter().enumerate() {
        omega.set_column(k, &record.left_basis.column(a - 1));
    }
    Ok(omega)
}

/// Total rank deficit of the restricted eigenbases plus the largest cutoff used.
///
/// The basis rows are orthonormal, so "this eigenvector vanishes on the
/// leaders" means the restricted entries sit at the numerical noise floor of
/// the eigensolve — not merely below a threshold relative to the restriction
/// itself (which would be scale-free and count pure noise as full rank). The
/// automatic cutoff is therefore floored at the spectrum's cluster radius.
fn omega_deficit(spectrum: &Spectrum, leaders: &LeaderSet, tol: &Tolerances) -> (usize, f64) {
    let floor = (1e3 * spectrum.n as f64 * f64::EPSILON).max(spectrum.cluster_radius);
    let mut deficit = 0;
    let mut max_thr: f64 = 0.0;
    for e in &spectrum.eigs {
        let mut omega = CMatrix::zeros(e.geo_mult, leaders.len());
        for (k, &a) in leaders.agents().iter().enumerate() {
            omega.set_column(k, &e.left_basis.column(a - 1));
        }
        let (rank, thr) = match tol.rank {
            Some(t) => rank_with_threshold(&omega, Some(t)),
            None => {
                let (_, auto) = rank_with_threshold(&omega, None);
                rank_with_threshold(&omega, Some(auto.max(floor)))
            }
        };
        deficit += e.geo_mult - rank.min(e.geo_mult);
        max_thr = max_thr.max(thr);
    }
    (deficit, max_thr)
}

/// PBH-style test: controllable iff no left eigenvector vanishes on all
/// leader coordinates, i.e. every restricted eigenbasis keeps full row rank.
pub fn r_leader_test(spectrum: &Spectrum, leaders: &LeaderSet, tol: &Tolerances) -> bool {
    omega_deficit(spectrum, leaders, tol).0 == 0
}

/// [`r_leader_test`] as a full [`Verdict`], after checking that `spectrum`
/// actually describes `l` (a stale or foreign spectrum is rejected).
pub fn pbh_verdict(
    l: &Matrix,
    leaders: &LeaderSet,
    spectrum: &Spectrum,
    tol: &Tolerances,
) -> Result<Verdict> {
    spectrum.validate_against(l)?;
    let (deficit, threshold) = omega_deficit(spectrum, leaders, tol);
    Ok(Verdict {
        controllable: deficit == 0,
        rank: spectrum.n - deficit,
        n: spectrum.n,
        method: Method::Pbh,
        threshold,
    })
}

/// Bounds on the minimum number of leaders: at least the largest geometric
/// multiplicity, never more than their sum.
pub fn min_leader_bounds(spectrum: &Spectrum) -> (usize, usize) {
    (spectrum.max_geo_mult(), spectrum.sum_geo_mult())
}

/// Eigenvector screen for single-leader candidates: empty unless the matrix
/// is cyclic (all geometric multiplicities one); otherwise the agents whose
/// coordinate is non-negligible in *every* left eigenvector. For a cyclic
/// matrix this is exactly the PBH condition for the singleton leader set.
pub fn slc_screen(spectrum: &Spectrum, tol: &Tolerances) -> Vec<usize> {
    if !spectrum.is_cyclic() {
        return Vec::new();
    }
    (1..=spectrum.n)
        .filter(|&a| {
            spectrum.eigs.iter().all(|e| {
                let row = e.left_basis.row(0);
                let max = row.iter().map(|z| z.norm()).fold(0.0, f64::max);
                row[a - 1].norm() > tol.zero_entry * max
            })
        })
        .collect()
}

/// Agents that can serve as a sole leader: the eigenvector screen of
/// [`slc_screen`], with each survivor additionally certified by the Kalman
/// test. The two routes agree on well-conditioned inputs; keeping both means
/// a borderline eigenvector entry can never smuggle in an uncontrollable
/// leader (compare against the screen to detect such disagreement).
pub fn slc_candidates(l: &Matrix, spectrum: &Spectrum, tol: &Tolerances) -> Vec<usize> {
    slc_screen(spectrum, tol)
        .into_iter()
        .filter(|&a| {
            let ls = LeaderSet::single(spectrum.n, a).expect("screened agent id is valid");
            kalman_verdict(l, &ls, tol).controllable
        })
        .collect()
}

/// Single-leader controllability: some agent alone renders the system
/// controllable (certified by both tests).
pub fn is_slc(l: &Matrix, spectrum: &Spectrum, tol: &Tolerances) -> bool {
    !slc_candidates(l, spectrum, tol).is_empty()
}

/// Options for [`minimal_leader_sets`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LeaderSearchOptions {
    /// Agents that must belong to every candidate set.
    pub required: Vec<usize>,
    /// Collect every minimum-cardinality set instead of the first found.
    pub enumerate_all: bool,
    /// Stop searching beyond this cardinality (`None` = up to `n`).
    pub max_cardinality: Option<usize>,
    /// Hard cap on the number of candidate sets tested.
    pub budget: usize,
}

impl Default for LeaderSearchOptions {
    fn default() -> Self {
        Self { required: Vec::new(), enumerate_all: false, max_cardinality: None, budget: 2_000_000 }
    }
}

/// Result of the minimum-leader search.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LeaderSearch {
    /// Smallest cardinality at which a controllable set exists (0 when the
    /// search space was exhausted without a hit, which can only happen under
    /// a `max_cardinality` cap).
    pub cardinality: usize,
    /// The controllable sets found at that cardinality, lexicographic order.
    pub sets: Vec<LeaderSet>,
    /// Number of candidate sets tested.
    pub tested: usize,
}

/// Find minimum-cardinality leader sets by exhaustive search in ascending
/// cardinality, testing each candidate with the eigenvector criterion.
///
/// The search starts at `max(largest geometric multiplicity, |required|)` —
/// no smaller set can be controllable — and walks candidate sets of each size
/// in lexicographic order, so results are deterministic.
pub fn minimal_leader_sets(
    l: &Matrix,
    spectrum: &Spectrum,
    opts: &LeaderSearchOptions,
    tol: &Tolerances,
) -> Result<LeaderSearch> {
    spectrum.validate_against(l)?;
    let n = spectrum.n;
    let required = if opts.required.is_empty() {
        Vec::new()
    } else {
        LeaderSet::new(n, opts.required.iter().copied())?.agents().to_vec()
    };
    let free: Vec<usize> = (1..=n).filter(|a| !required.contains(a)).collect();
    let cap = opts.max_cardinality.unwrap_or(n).min(n);
    let start = spectrum.max_geo_mult().max(required.len()).max(1);

    let mut tested = 0usize;
    for k in start..=cap {
        let mut hits = Vec::new();
        for extra in free.iter().copied().combinations(k - required.len()) {
            tested += 1;
            if tested > opts.budget {
                return Err(Error::BudgetExceeded { budget: opts.budget });
            }
            let candidate = LeaderSet::new(n, required.iter().copied().chain(extra))?;
            if r_leader_test(spectrum, &candidate, tol) {
                hits.push(candidate);
                if !opts.enumerate_all {
                    return Ok(LeaderSearch { cardinality: k, sets: hits, tested });
                }
            }
        }
        if !hits.is_empty() {
            hits.sort_by(|a, b| a.agents().cmp(b.agents()));
            return Ok(LeaderSearch { cardinality: k, sets: hits, tested });
        }
        if k < required.len() {
            continue; // unreachable; keeps the invariant obvious
        }
    }
    Ok(LeaderSearch { cardinality: 0, sets: Vec::new(), tested })
}
