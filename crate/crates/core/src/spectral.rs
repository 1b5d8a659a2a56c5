//! Numerical spectral analysis of Laplacians: clustered eigenvalues, left
//! eigenvector bases, numerical rank, and Jordan structure diagnostics.
//!
//! Computed eigenvalues of a defective matrix scatter around the true value
//! (a k-fold Jordan eigenvalue splits at the eps^(1/k) scale), so equality of
//! eigenvalues is always decided by *clustering*: values within the cluster
//! radius of each other are merged transitively and represented by their mean.
//! Geometric multiplicities and left bases then come from the SVD of the
//! shifted matrix, with a null-space cutoff no tighter than the cluster radius
//! (the shift itself is only known to that accuracy).

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::{CMatrix, Error, Matrix, Result, Tolerances};

/// One distinct (clustered) eigenvalue of a real matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct EigenRecord {
    /// Cluster centroid.
    pub lambda: Complex64,
    /// Number of computed eigenvalues merged into this cluster.
    pub alg_mult: usize,
    /// Dimension of the left (equivalently right) eigenspace.
    pub geo_mult: usize,
    /// `geo_mult x n` matrix whose rows `eta` satisfy `eta * M = lambda * eta`.
    /// Rows are orthonormal; each row's first non-negligible component is
    /// rotated onto the positive real axis.
    pub left_basis: CMatrix,
}

/// Clustered spectrum of a real `n x n` matrix, sorted by `(re, im)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    pub eigs: Vec<EigenRecord>,
    pub n: usize,
    /// The clustering radius that produced these records.
    pub cluster_radius: f64,
}

impl Spectrum {
    /// A matrix is cyclic (non-derogatory) iff every eigenvalue has geometric
    /// multiplicity one — the precondition for single-leader controllability.
    pub fn is_cyclic(&self) -> bool {
        self.eigs.iter().all(|e| e.geo_mult == 1)
    }

    /// Largest geometric multiplicity: a lower bound on how many leaders any
    /// controllable configuration needs.
    pub fn max_geo_mult(&self) -> usize {
        self.eigs.iter().map(|e| e.geo_mult).max().unwrap_or(0)
    }

    /// Sum of geometric multiplicities: leaders formed by picking one maximal
    /// coordinate per eigenvector never need more than this.
    pub fn sum_geo_mult(&self) -> usize {
        self.eigs.iter().map(|e| e.geo_mult).sum()
    }

    /// The record whose eigenvalue lies within the cluster radius of `lambda`.
    pub fn find(&self, lambda: Complex64) -> Option<&EigenRecord> {
        self.nearest(lambda).filter(|(_, d)| *d <= self.cluster_radius).map(|(e, _)| e)
    }

    fn nearest(&self, lambda: Complex64) -> Option<(&EigenRecord, f64)> {
        self.eigs
            .iter()
            .map(|e| (e, (e.lambda - lambda).norm()))
            .min_by(|a, b| a.1.total_cmp(&b.1))
    }

    /// Check that this spectrum describes `m`: multiplicities sum to `n` and
    /// every basis row satisfies its eigen-equation to within
    /// `1e3 * n * eps * sigma_max(m)`.
    pub fn validate_against(&self, m: &Matrix) -> Result<()> {
        if m.nrows() != self.n || m.ncols() != self.n {
            return Err(Error::SpectrumMismatch(format!(
                "spectrum is for a {0}x{0} matrix, got {1}x{2}",
                self.n,
                m.nrows(),
                m.ncols()
            )));
        }
        let total: usize = self.eigs.iter().map(|e| e.alg_mult).sum();
        if total != self.n {
            return Err(Error::SpectrumMismatch(format!(
                "algebraic multiplicities sum to {total}, expected {}",
                self.n
            )));
        }
        let mc = complexify(m);
        let sigma_max = operator_norm(m);
        let bound = 1e3 * self.n as f64 * f64::EPSILON * sigma_max;
        for e in &self.eigs {
            if e.geo_mult == 0 || e.geo_mult > e.alg_mult || e.left_basis.nrows() != e.geo_mult {
                return Err(Error::SpectrumMismatch(format!(
                    "inconsistent multiplicities at eigenvalue {}",
                    e.lambda
                )));
            }
            let residual = &e.left_basis * &mc - e.left_basis.scale_by_complex(e.lambda);
            let worst = residual.row_iter().map(|r| r.norm()).fold(0.0f64, f64::max);
            if worst > bound.max(1e3 * f64::EPSILON * e.lambda.norm()) {
                return Err(Error::SpectrumMismatch(format!(
                    "left basis residual {worst:.3e} at eigenvalue {} exceeds {bound:.3e}",
                    e.lambda
                )));
            }
        }
        Ok(())
    }
}

trait ScaleByComplex {
    fn scale_by_complex(&self, z: Complex64) -> CMatrix;
}

impl ScaleByComplex for CMatrix {
    fn scale_by_complex(&self, z: Complex64) -> CMatrix {
        self.map(|x| x * z)
    }
}

pub(crate) fn complexify(m: &Matrix) -> CMatrix {
    m.map(|x| Complex64::new(x, 0.0))
}

/// Largest singular value.
pub(crate) fn operator_norm(m: &Matrix) -> f64 {
    let sv = m.clone().svd(false, false).singular_values;
    sv.iter().copied().fold(0.0, f64::max)
}

/// Numerical rank: the number of singular values above the cutoff.
///
/// With `tol = None` the cutoff is `sigma_max * max(rows, cols) * eps` (the
/// usual SVD-based rank rule); `Some(t)` uses the absolute cutoff `t`.
pub fn numerical_rank<T>(a: &DMatrix<T>, tol: Option<f64>) -> usize
where
    T: nalgebra::ComplexField<RealField = f64>,
{
    rank_with_threshold(a, tol).0
}

/// [`numerical_rank`] plus the singular-value cutoff that was actually used.
pub fn rank_with_threshold<T>(a: &DMatrix<T>, tol: Option<f64>) -> (usize, f64)
where
    T: nalgebra::ComplexField<RealField = f64>,
{
    let sv = a.clone().svd(false, false).singular_values;
    let sigma_max = sv.iter().copied().fold(0.0, f64::max);
    let thr = tol.unwrap_or(sigma_max * a.nrows().max(a.ncols()) as f64 * f64::EPSILON);
    (sv.iter().filter(|&&s| s > thr).count(), thr)
}

/// Compute the clustered spectrum of a square real matrix together with left
/// eigenvector bases.
pub fn eigen_decompose(m: &Matrix, tol: &Tolerances) -> Result<Spectrum> {
    if m.nrows() != m.ncols() {
        return Err(Error::NotSquare { rows: m.nrows(), cols: m.ncols() });
    }
    if m.iter().any(|x| !x.is_finite()) {
        return Err(Error::NonFinite);
    }
    let n = m.nrows();
    let schur = m.clone().try_schur(f64::EPSILON, 100_000).ok_or(Error::EigensolverFailure)?;
    let raw: Vec<Complex64> = schur.complex_eigenvalues().iter().copied().collect();
    let max_abs = raw.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let radius = tol.cluster_radius(max_abs);

    let clusters = cluster_indices(&raw, radius);
    let mut eigs = Vec::with_capacity(clusters.len());
    for group in clusters {
        let alg_mult = group.len();
        let centroid = group.iter().map(|&i| raw[i]).sum::<Complex64>() / alg_mult as f64;

        // Left null space of (m - lambda I), taken as the right null space of
        // its adjoint. The complex SVD cannot be used here: its singular
        // values are accurate but its vectors can be misaligned by as much as
        // 1e-3, so the adjoint mT - conj(lambda) I = (mT - re I) + im i I is
        // embedded as the real 2n x 2n matrix [[R, -C], [C, R]] and factored
        // with the real SVD instead. Every singular value of the complex
        // matrix shows up twice, and real null vectors (x; y) correspond to
        // complex ones x + i y.
        let mut t = Matrix::zeros(2 * n, 2 * n);
        for i in 0..n {
            for j in 0..n {
                t[(i, j)] = m[(j, i)];
                t[(n + i, n + j)] = m[(j, i)];
            }
            t[(i, i)] -= centroid.re;
            t[(n + i, n + i)] -= centroid.re;
            t[(i, n + i)] = -centroid.im;
            t[(n + i, i)] = centroid.im;
        }
        let svd = t.svd(true, true);
        let sv = &svd.singular_values;
        let sigma_max = sv.iter().copied().fold(0.0, f64::max);
        // The shift is only accurate to the cluster radius, so directions with
        // singular values at that scale are null for our purposes.
        let thr = (1e3 * n as f64 * f64::EPSILON * sigma_max).max(radius);
        let null_count = sv.iter().filter(|&&s| s < thr).count() / 2;
        let geo_mult = null_count.clamp(1, alg_mult);
        let v_t = svd.v_t.expect("V requested");

        // The doubled null space is closed under multiplication by i, so
        // complex Gram-Schmidt over the trailing singular directions yields
        // exactly geo_mult rows; i-duplicates project away to nothing.
        let mut rows: Vec<Vec<Complex64>> = Vec::new();
        for k in 0..2 * n {
            if rows.len() == geo_mult {
                break;
            }
            let cand = v_t.row(2 * n - 1 - k);
            let mut eta: Vec<Complex64> =
                (0..n).map(|j| Complex64::new(cand[j], cand[n + j]).conj()).collect();
            for b in &rows {
                let proj: Complex64 = b.iter().zip(&eta).map(|(bj, ej)| bj.conj() * ej).sum();
                for (ej, bj) in eta.iter_mut().zip(b) {
                    *ej -= proj * bj;
                }
            }
            let norm = eta.iter().map(|e| e.norm_sqr()).sum::<f64>().sqrt();
            if norm > 0.1 {
                for e in &mut eta {
                    *e /= norm;
                }
                rows.push(eta);
            }
        }

        let mut left_basis = CMatrix::zeros(geo_mult, n);
        for (k, eta) in rows.iter().enumerate() {
            let row_max = eta.iter().map(|z| z.norm()).fold(0.0, f64::max);
            // Rotate so the first significant entry is positive real.
            let phase = eta
                .iter()
                .find(|z| z.norm() > 1e-7 * row_max)
                .map(|z| z.conj() / z.norm())
                .unwrap_or_else(|| Complex64::new(1.0, 0.0));
            for j in 0..n {
                left_basis[(k, j)] = eta[j] * phase;
            }
        }
        eigs.push(EigenRecord { lambda: centroid, alg_mult, geo_mult, left_basis });
    }
    eigs.sort_by(|a, b| (a.lambda.re, a.lambda.im).partial_cmp(&(b.lambda.re, b.lambda.im)).unwrap());
    Ok(Spectrum { eigs, n, cluster_radius: radius })
}

/// Merge values whose pairwise distance is within `radius`, transitively.
fn cluster_indices(vals: &[Complex64], radius: f64) -> Vec<Vec<usize>> {
    let n = vals.len();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut Vec<usize>, i: usize) -> usize {
        if parent[i] != i {
            let r = find(parent, parent[i]);
            parent[i] = r;
        }
        parent[i]
    }
    for i in 0..n {
        for j in i + 1..n {
            if (vals[i] - vals[j]).norm() <= radius {
                let (ri, rj) = (find(&mut parent, i), find(&mut parent, j));
                if ri != rj {
                    parent[ri] = rj;
                }
            }
        }
    }
    let mut groups: Vec<Vec<usize>> = vec![Vec::new(); n];
    for i in 0..n {
        let r = find(&mut parent, i);
        groups[r].push(i);
    }
    groups.retain(|g| !g.is_empty());
    groups
}

/// Jordan block sizes at one eigenvalue, largest first.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct JordanBlocks {
    /// Block sizes, descending; they sum to the algebraic multiplicity.
    pub sizes: Vec<usize>,
    /// Set when a rank decision fell within a factor 10 of its cutoff or the
    /// rank sequence had to be repaired — treat the sizes as indicative only.
    pub low_confidence: bool,
}

/// Diagnose the Jordan structure of `m` at `lambda` from the rank sequence of
/// powers of the shifted matrix. `lambda` must lie within the cluster radius
/// of an eigenvalue. Intended for reporting; verdicts never depend on it.
pub fn jordan_block_sizes(m: &Matrix, lambda: Complex64, tol: &Tolerances) -> Result<JordanBlocks> {
    let spectrum = eigen_decompose(m, tol)?;
    let (record, distance) = spectrum.nearest(lambda).expect("n >= 1");
    if distance > spectrum.cluster_radius {
        return Err(Error::NotAnEigenvalue { lambda, distance });
    }
    let n = m.nrows();
    let alg = record.alg_mult;
    let mut shifted = complexify(m);
    for i in 0..n {
        shifted[(i, i)] -= record.lambda;
    }

    let mut low_confidence = false;
    let mut ranks = vec![n];
    let mut power = CMatrix::identity(n, n);
    while ranks.len() <= n {
        power = &power * &shifted;
        let sv = power.clone().svd(false, false).singular_values;
        let sigma_max = sv.iter().copied().fold(0.0, f64::max);
        let thr = (1e3 * n as f64 * f64::EPSILON * sigma_max).max(spectrum.cluster_radius);
        if sv.iter().any(|&s| s > thr / 10.0 && s < thr * 10.0) {
            low_confidence = true;
        }
        let rank = sv.iter().filter(|&&s| s > thr).count();
        let prev = *ranks.last().unwrap();
        ranks.push(rank.min(prev));
        if n - rank >= alg || rank == prev {
            break;
        }
    }

    // Weyr sequence -> block sizes by conjugate partition.
    let mut nullity_steps: Vec<usize> = ranks.windows(2).map(|w| w[0] - w[1]).collect();
    for k in 1..nullity_steps.len() {
        if nullity_steps[k] > nullity_steps[k - 1] {
            nullity_steps[k] = nullity_steps[k - 1];
            low_confidence = true;
        }
    }
    let mut accounted: usize = nullity_steps.iter().sum();
    if accounted > alg {
        let mut excess = accounted - alg;
        low_confidence = true;
        while excess > 0 {
            let last = nullity_steps.last_mut().expect("nonempty");
            let cut = (*last).min(excess);
            *last -= cut;
            excess -= cut;
            if *last == 0 {
                nullity_steps.pop();
            }
        }
        accounted = alg;
    }
    let width = nullity_steps.first().copied().unwrap_or(0);
    let mut sizes: Vec<usize> = (1..=width)
        .map(|i| nullity_steps.iter().filter(|&&b| b >= i).count())
        .collect();
    if accounted < alg {
        // Rank thresholds hid part of the root subspace; pad with 1-blocks so
        // the sizes still sum to the algebraic multiplicity.
        low_confidence = true;
        sizes.extend(std::iter::repeat_n(1, alg - accounted));
    }
    sizes.sort_unstable_by(|a, b| b.cmp(a));
    debug_assert_eq!(sizes.iter().sum::<usize>(), alg);
    Ok(JordanBlocks { sizes, low_confidence })
}
