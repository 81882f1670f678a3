//! Dense complex linear algebra used throughout the crate.
//!
//! Matrices are `nalgebra` dynamic matrices over `Complex<f64>`. The newtypes
//! [`HermitianMatrix`], [`DensityMatrix`] and [`PureState`] carry validated
//! invariants; everything else works on plain [`ComplexMatrix`] values.

use nalgebra::{Complex, DMatrix, DVector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type C64 = Complex<f64>;
pub type ComplexMatrix = DMatrix<C64>;
pub type ComplexVector = DVector<C64>;

/// Entrywise tolerance for Hermiticity checks.
pub const HERMITIAN_TOL: f64 = 1e-12;
/// Trace tolerance for density matrices.
pub const TRACE_TOL: f64 = 1e-12;
/// Smallest eigenvalue still accepted as "non-negative".
pub const PSD_TOL: f64 = 1e-10;
/// Relative gap below which eigenvalues are grouped together.
pub const MULTIPLICITY_TOL: f64 = 1e-9;

#[inline]
pub fn c(re: f64, im: f64) -> C64 {
    Complex::new(re, im)
}

#[inline]
pub fn cr(re: f64) -> C64 {
    Complex::new(re, 0.0)
}

pub fn identity(d: usize) -> ComplexMatrix {
    ComplexMatrix::identity(d, d)
}

/// `|i><j|` in dimension `d`.
pub fn ket_bra(d: usize, i: usize, j: usize) -> ComplexMatrix {
    let mut m = ComplexMatrix::zeros(d, d);
    m[(i, j)] = cr(1.0);
    m
}

pub fn basis_ket(d: usize, i: usize) -> ComplexVector {
    let mut v = ComplexVector::zeros(d);
    v[i] = cr(1.0);
    v
}

pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    a.kronecker(b)
}

/// Plain transpose (not the adjoint).
pub fn transpose(a: &ComplexMatrix) -> ComplexMatrix {
    a.transpose()
}

pub fn trace(a: &ComplexMatrix) -> C64 {
    a.trace()
}

/// Largest entry modulus.
pub fn max_abs(a: &ComplexMatrix) -> f64 {
    a.iter().fold(0.0_f64, |m, z| m.max(z.norm()))
}

pub fn hermiticity_defect(a: &ComplexMatrix) -> f64 {
    if !a.is_square() {
        return f64::INFINITY;
    }
    max_abs(&(a - a.adjoint()))
}

/// `|phi+> = sum_i |ii> / sqrt(d)`.
pub fn phi_plus(d: usize) -> ComplexVector {
    let mut v = ComplexVector::zeros(d * d);
    let w = 1.0 / (d as f64).sqrt();
    for i in 0..d {
        v[i * d + i] = cr(w);
    }
    v
}

/// The swap operator `P|ij> = |ji>` on `C^d (x) C^d`.
pub fn swap_operator(d: usize) -> ComplexMatrix {
    let mut p = ComplexMatrix::zeros(d * d, d * d);
    for i in 0..d {
        for j in 0..d {
            p[(j * d + i, i * d + j)] = cr(1.0);
        }
    }
    p
}

/// A Hermitian matrix, checked entrywise against its adjoint.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianMatrix(ComplexMatrix);

impl HermitianMatrix {
    pub fn new(m: ComplexMatrix) -> Result<Self> {
        let scale = max_abs(&m).max(1.0);
        let defect = hermiticity_defect(&m);
        if defect > HERMITIAN_TOL * scale {
            return Err(Error::NotHermitian(defect));
        }
        Ok(Self::from_hermitian_part(&m))
    }

    /// `(A + A^dagger) / 2`, without any check.
    pub fn from_hermitian_part(m: &ComplexMatrix) -> Self {
        HermitianMatrix((m + m.adjoint()) * cr(0.5))
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.0
    }

    pub fn into_inner(self) -> ComplexMatrix {
        self.0
    }

    pub fn trace(&self) -> f64 {
        self.0.trace().re
    }

    pub fn eig(&self) -> SpectrumResult {
        hermitian_eig_unchecked(&self.0, true)
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.0
            .clone()
            .symmetric_eigenvalues()
            .iter()
            .fold(f64::INFINITY, |m, &v| m.min(v))
    }
}

/// A density matrix: Hermitian, unit trace, positive semidefinite.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix(ComplexMatrix);

impl DensityMatrix {
    pub fn new(m: ComplexMatrix) -> Result<Self> {
        let h = HermitianMatrix::new(m)?;
        let tr = h.trace();
        if (tr - 1.0).abs() > TRACE_TOL {
            return Err(Error::NotDensity(format!("trace {tr}")));
        }
        let min = h.min_eigenvalue();
        if min < -PSD_TOL {
            return Err(Error::NotDensity(format!("eigenvalue {min:.3e}")));
        }
        Ok(DensityMatrix(h.0))
    }

    pub fn maximally_mixed(d: usize) -> Self {
        DensityMatrix(identity(d) * cr(1.0 / d as f64))
    }

    pub fn from_pure(psi: &PureState) -> Self {
        DensityMatrix(&psi.0 * psi.0.adjoint())
    }

    pub fn basis(d: usize, i: usize) -> Self {
        DensityMatrix(ket_bra(d, i, i))
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.0
    }

    pub fn into_inner(self) -> ComplexMatrix {
        self.0
    }

    pub fn spectrum(&self) -> Vec<f64> {
        let mut v: Vec<f64> = self
            .0
            .clone()
            .symmetric_eigenvalues()
            .iter()
            .copied()
            .collect();
        v.sort_by(|a, b| b.total_cmp(a));
        v
    }

    /// Von Neumann entropy in bits.
    pub fn entropy(&self) -> f64 {
        von_neumann_entropy(&self.spectrum()).expect("density matrix has a valid spectrum")
    }
}

/// A normalized state vector.
#[derive(Debug, Clone, PartialEq)]
pub struct PureState(ComplexVector);

impl PureState {
    pub fn new(v: ComplexVector) -> Result<Self> {
        let n = v.norm();
        if (n - 1.0).abs() > 1e-12 {
            return Err(Error::NotNormalized(n));
        }
        Ok(PureState(v))
    }

    pub fn normalized(v: ComplexVector) -> Result<Self> {
        let n = v.norm();
        if n == 0.0 || !n.is_finite() {
            return Err(Error::NotNormalized(n));
        }
        Ok(PureState(v / cr(n)))
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn amplitudes(&self) -> &ComplexVector {
        &self.0
    }

    pub fn projector(&self) -> DensityMatrix {
        DensityMatrix::from_pure(self)
    }
}

/// Eigenvalues grouped into distinct levels.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumResult {
    /// Distinct eigenvalues, descending.
    pub eigenvalues: Vec<f64>,
    pub multiplicities: Vec<usize>,
    #[serde(skip)]
    pub eigenvectors: Option<ComplexMatrix>,
}

impl SpectrumResult {
    /// Groups a list of (value, multiplicity) pairs. Values closer than
    /// [`MULTIPLICITY_TOL`] (relative to the spectral radius) are merged.
    pub fn from_levels(levels: &[(f64, usize)]) -> Self {
        let mut expanded: Vec<f64> = Vec::new();
        for &(v, g) in levels {
            expanded.extend(std::iter::repeat(v).take(g));
        }
        Self::from_eigenvalues(expanded)
    }

    pub fn from_eigenvalues(mut values: Vec<f64>) -> Self {
        values.sort_by(|a, b| b.total_cmp(a));
        let scale = values.iter().fold(1.0_f64, |m, v| m.max(v.abs()));
        let thresh = MULTIPLICITY_TOL * scale;
        let mut eigenvalues = Vec::new();
        let mut multiplicities = Vec::new();
        let mut group: Vec<f64> = Vec::new();
        for v in values {
            if let Some(&last) = group.last() {
                if last - v > thresh {
                    eigenvalues.push(group.iter().sum::<f64>() / group.len() as f64);
                    multiplicities.push(group.len());
                    group.clear();
                }
            }
            group.push(v);
        }
        if !group.is_empty() {
            eigenvalues.push(group.iter().sum::<f64>() / group.len() as f64);
            multiplicities.push(group.len());
        }
        SpectrumResult {
            eigenvalues,
            multiplicities,
            eigenvectors: None,
        }
    }

    pub fn dim(&self) -> usize {
        self.multiplicities.iter().sum()
    }

    /// Every eigenvalue repeated by its multiplicity, descending.
    pub fn expanded(&self) -> Vec<f64> {
        self.eigenvalues
            .iter()
            .zip(&self.multiplicities)
            .flat_map(|(&v, &g)| std::iter::repeat(v).take(g))
            .collect()
    }

    pub fn min(&self) -> f64 {
        self.eigenvalues.last().copied().unwrap_or(f64::NAN)
    }

    pub fn max(&self) -> f64 {
        self.eigenvalues.first().copied().unwrap_or(f64::NAN)
    }

    /// Largest deviation between the expanded spectra of `self` and `other`,
    /// or infinity if the dimensions differ.
    pub fn max_deviation(&self, other: &SpectrumResult) -> f64 {
        let a = self.expanded();
        let b = other.expanded();
        if a.len() != b.len() {
            return f64::INFINITY;
        }
        a.iter().zip(&b).fold(0.0, |m, (x, y)| m.max((x - y).abs()))
    }
}

/// Eigendecomposition of a Hermitian matrix. Eigenvalues come back
/// descending and grouped; the eigenvector matrix holds one column per
/// (expanded) eigenvalue in the same order.
pub fn hermitian_eig(a: &ComplexMatrix) -> Result<SpectrumResult> {
    if !a.is_square() {
        return Err(Error::DimensionMismatch {
            expected: a.nrows(),
            got: a.ncols(),
        });
    }
    let scale = max_abs(a).max(1.0);
    let defect = hermiticity_defect(a);
    if defect > HERMITIAN_TOL * scale {
        return Err(Error::NotHermitian(defect));
    }
    Ok(hermitian_eig_unchecked(a, true))
}

fn hermitian_eig_unchecked(a: &ComplexMatrix, vectors: bool) -> SpectrumResult {
    let n = a.nrows();
    let h = (a + a.adjoint()) * cr(0.5);
    if !vectors {
        return SpectrumResult::from_eigenvalues(
            h.symmetric_eigenvalues().iter().copied().collect(),
        );
    }
    let eig = h.symmetric_eigen();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[j].total_cmp(&eig.eigenvalues[i]));
    let values: Vec<f64> = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let mut vecs = ComplexMatrix::zeros(n, n);
    for (col, &i) in order.iter().enumerate() {
        vecs.set_column(col, &eig.eigenvectors.column(i));
    }
    let mut spec = SpectrumResult::from_eigenvalues(values);
    spec.eigenvectors = Some(vecs);
    spec
}

/// Eigenvalues only, descending, not grouped.
pub fn hermitian_eigenvalues(a: &ComplexMatrix) -> Vec<f64> {
    let h = (a + a.adjoint()) * cr(0.5);
    let mut v: Vec<f64> = h.symmetric_eigenvalues().iter().copied().collect();
    v.sort_by(|a, b| b.total_cmp(a));
    v
}

/// `-sum p log2 p` in bits, with `0 log 0 = 0`.
///
/// Entries in `[-1e-10, 0)` are treated as zero; anything more negative, or a
/// total deviating from one by more than `1e-8`, is rejected.
pub fn von_neumann_entropy(spectrum: &[f64]) -> Result<f64> {
    if spectrum.is_empty() {
        return Err(Error::InvalidSpectrum("empty spectrum".into()));
    }
    let total: f64 = spectrum.iter().sum();
    if !total.is_finite() || (total - 1.0).abs() > 1e-8 {
        return Err(Error::InvalidSpectrum(format!("sum {total}")));
    }
    let mut s = 0.0;
    for &p in spectrum {
        if p < -PSD_TOL {
            return Err(Error::InvalidSpectrum(format!("negative entry {p:.3e}")));
        }
        if p > 0.0 {
            s -= p * p.log2();
        }
    }
    Ok(s.max(0.0))
}

/// Entropy of a Hermitian, unit-trace matrix computed from its eigenvalues.
pub fn matrix_entropy(a: &ComplexMatrix) -> Result<f64> {
    von_neumann_entropy(&hermitian_eigenvalues(a))
}

/// Partial transpose on the second factor of `C^dA (x) C^dB`:
/// `(|ij><kl|)^{T_B} = |il><kj|`.
pub fn partial_transpose_b(a: &ComplexMatrix, da: usize, db: usize) -> Result<ComplexMatrix> {
    let n = da * db;
    if a.nrows() != n || a.ncols() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: a.nrows(),
        });
    }
    let mut out = ComplexMatrix::zeros(n, n);
    for i in 0..da {
        for j in 0..db {
            for k in 0..da {
                for l in 0..db {
                    out[(i * db + l, k * db + j)] = a[(i * db + j, k * db + l)];
                }
            }
        }
    }
    Ok(out)
}

/// Partial trace over the first factor.
pub fn partial_trace_a(a: &ComplexMatrix, da: usize, db: usize) -> Result<ComplexMatrix> {
    let n = da * db;
    if a.nrows() != n || a.ncols() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: a.nrows(),
        });
    }
    let mut out = ComplexMatrix::zeros(db, db);
    for i in 0..da {
        for j in 0..db {
            for l in 0..db {
                out[(j, l)] += a[(i * db + j, i * db + l)];
            }
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum HaarKind {
    Unitary,
    Orthogonal,
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn gaussian_matrix(d: usize, real: bool, rng: &mut ChaCha8Rng) -> ComplexMatrix {
    ComplexMatrix::from_fn(d, d, |_, _| {
        let re: f64 = StandardNormal.sample(rng);
        let im: f64 = if real {
            0.0
        } else {
            StandardNormal.sample(rng)
        };
        c(re, im)
    })
}

/// Haar-distributed unitary (or real orthogonal) matrix from a seed.
///
/// QR of a Gaussian matrix, with the columns of `Q` rescaled by the phases
/// of `diag(R)` so the distribution is exactly Haar.
pub fn random_haar(d: usize, kind: HaarKind, seed: u64) -> Result<ComplexMatrix> {
    let mut r = rng(seed);
    haar_with_rng(d, kind, &mut r)
}

pub fn haar_with_rng(d: usize, kind: HaarKind, rng: &mut ChaCha8Rng) -> Result<ComplexMatrix> {
    if d == 0 {
        return Err(Error::InvalidArgument(
            "dimension must be at least 1".into(),
        ));
    }
    let g = gaussian_matrix(d, kind == HaarKind::Orthogonal, rng);
    let qr = g.qr();
    let mut q = qr.q();
    let r = qr.r();
    for j in 0..d {
        let rjj = r[(j, j)];
        let phase = if rjj.norm() > 0.0 {
            rjj / cr(rjj.norm())
        } else {
            cr(1.0)
        };
        let mut col = q.column_mut(j);
        col *= phase;
    }
    if kind == HaarKind::Orthogonal {
        q.iter_mut().for_each(|z| z.im = 0.0);
    }
    Ok(q)
}

/// Random Hermitian matrix with i.i.d. Gaussian entries (GUE-like).
pub fn random_hermitian(d: usize, rng: &mut ChaCha8Rng) -> ComplexMatrix {
    let g = gaussian_matrix(d, false, rng);
    (&g + g.adjoint()) * cr(0.5)
}

/// Random full-rank density matrix `G G^dagger / Tr(G G^dagger)`.
pub fn random_density(d: usize, rng: &mut ChaCha8Rng) -> DensityMatrix {
    let g = gaussian_matrix(d, false, rng);
    let m = &g * g.adjoint();
    let tr = m.trace();
    let m = m / tr;
    DensityMatrix(HermitianMatrix::from_hermitian_part(&m).0)
}

pub fn random_pure_state(d: usize, rng: &mut ChaCha8Rng) -> PureState {
    let v = ComplexVector::from_fn(d, |_, _| {
        let re: f64 = StandardNormal.sample(rng);
        let im: f64 = StandardNormal.sample(rng);
        c(re, im)
    });
    PureState::normalized(v).expect("gaussian vector is nonzero")
}

/// `max |U^dagger U - I|`.
pub fn unitarity_defect(u: &ComplexMatrix) -> f64 {
    if !u.is_square() {
        return f64::INFINITY;
    }
    max_abs(&(u.adjoint() * u - identity(u.nrows())))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn real(rows: usize, data: &[f64]) -> ComplexMatrix {
        ComplexMatrix::from_row_slice(rows, rows, &data.iter().map(|&v| cr(v)).collect::<Vec<_>>())
    }

    #[test]
    fn pauli_x_spectrum() {
        let s = hermitian_eig(&real(2, &[0.0, 1.0, 1.0, 0.0])).unwrap();
        assert_eq!(s.multiplicities, vec![1, 1]);
        assert!((s.eigenvalues[0] - 1.0).abs() < 1e-14);
        assert!((s.eigenvalues[1] + 1.0).abs() < 1e-14);
    }

    #[test]
    fn identity_is_one_level() {
        let s = hermitian_eig(&identity(5)).unwrap();
        assert_eq!(s.multiplicities, vec![5]);
        assert!((s.eigenvalues[0] - 1.0).abs() < 1e-14);
    }

    #[test]
    fn diagonal_sorted_descending() {
        let s = hermitian_eig(&real(3, &[3.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 2.0])).unwrap();
        assert_eq!(s.eigenvalues.len(), 3);
        for (got, want) in s.eigenvalues.iter().zip([3.0, 2.0, 1.0]) {
            assert!((got - want).abs() < 1e-14);
        }
    }

    #[test]
    fn non_hermitian_rejected() {
        let m = real(2, &[0.0, 1.0, 0.0, 0.0]);
        assert!(matches!(hermitian_eig(&m), Err(Error::NotHermitian(_))));
    }

    #[test]
    fn reconstruction_up_to_dim_100() {
        let mut r = rng(11);
        for d in [1, 2, 7, 31, 100] {
            let a = random_hermitian(d, &mut r);
            let s = hermitian_eig(&a).unwrap();
            let v = s.eigenvectors.clone().unwrap();
            let lam = ComplexMatrix::from_diagonal(&ComplexVector::from_iterator(
                d,
                s.expanded().into_iter().map(cr),
            ));
            let err = max_abs(&(&a - &v * lam * v.adjoint()));
            assert!(err < 1e-10, "d={d} err={err}");
        }
    }

    #[test]
    fn entropy_examples() {
        assert_eq!(von_neumann_entropy(&[1.0]).unwrap(), 0.0);
        assert!((von_neumann_entropy(&[0.5, 0.5]).unwrap() - 1.0).abs() < 1e-15);
        // -0.75 log2 0.75 - 2 * 0.125 log2 0.125
        let expected = -0.75 * 0.75_f64.log2() + 0.75;
        let s = von_neumann_entropy(&[0.75, 0.125, 0.125]).unwrap();
        assert!((s - expected).abs() < 1e-15);
        assert!((s - 1.061278).abs() < 1e-6);
    }

    #[test]
    fn entropy_rejections_and_clipping() {
        assert!(von_neumann_entropy(&[0.5, 0.4]).is_err());
        assert!(von_neumann_entropy(&[1.1, -0.1]).is_err());
        let s = von_neumann_entropy(&[1.0 + 5e-11, -5e-11]).unwrap();
        assert!(s.abs() < 1e-9);
    }

    #[test]
    fn entropy_uniform_is_log_d() {
        for d in 1..=16 {
            let p = vec![1.0 / d as f64; d];
            assert!((von_neumann_entropy(&p).unwrap() - (d as f64).log2()).abs() < 1e-14);
        }
    }

    #[test]
    fn partial_transpose_index_action() {
        // |01><10| -> |00><11|
        let a = ket_bra(4, 1, 2);
        let pt = partial_transpose_b(&a, 2, 2).unwrap();
        assert_eq!(pt, ket_bra(4, 0, 3));
    }

    #[test]
    fn partial_transpose_of_product() {
        let mut r = rng(3);
        let a = random_hermitian(2, &mut r);
        let b = random_hermitian(3, &mut r)
            + ComplexMatrix::from_fn(3, 3, |i, j| c(0.0, (i as f64) - (j as f64)));
        let pt = partial_transpose_b(&kron(&a, &b), 2, 3).unwrap();
        assert!(max_abs(&(pt - kron(&a, &b.transpose()))) < 1e-15);
    }

    #[test]
    fn partial_transpose_of_swap() {
        // P^{T_B} = d |phi+><phi+|
        for d in 2..=4 {
            let pt = partial_transpose_b(&swap_operator(d), d, d).unwrap();
            let phi = phi_plus(d);
            let expected = &phi * phi.adjoint() * cr(d as f64);
            assert!(max_abs(&(pt - expected)) < 1e-14);
        }
    }

    #[test]
    fn partial_transpose_dimension_check() {
        assert!(partial_transpose_b(&identity(5), 2, 2).is_err());
    }

    #[test]
    fn haar_one_dim_is_a_phase() {
        let u = random_haar(1, HaarKind::Unitary, 5).unwrap();
        assert!((u[(0, 0)].norm() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn haar_is_deterministic_and_unitary() {
        for kind in [HaarKind::Unitary, HaarKind::Orthogonal] {
            let a = random_haar(6, kind, 42).unwrap();
            let b = random_haar(6, kind, 42).unwrap();
            assert_eq!(a, b);
            assert!(unitarity_defect(&a) < 1e-10);
        }
        let o = random_haar(5, HaarKind::Orthogonal, 1).unwrap();
        assert!(o.iter().all(|z| z.im == 0.0));
    }

    #[test]
    fn haar_second_moment() {
        // E|U_11|^2 = 1/d; Var |U_11|^2 = 2/(d(d+1)) - 1/d^2.
        let d = 4;
        let n = 10_000;
        let mut r = rng(2024);
        let mean = (0..n)
            .map(|_| haar_with_rng(d, HaarKind::Unitary, &mut r).unwrap()[(0, 0)].norm_sqr())
            .sum::<f64>()
            / n as f64;
        let var = 2.0 / (d * (d + 1)) as f64 - 1.0 / (d * d) as f64;
        let sigma = (var / n as f64).sqrt();
        assert!(
            (mean - 0.25).abs() < 3.0 * sigma,
            "mean {mean}, sigma {sigma}"
        );
    }

    #[test]
    fn grouping_merges_close_values() {
        let s = SpectrumResult::from_eigenvalues(vec![0.5, 0.5 + 1e-12, -1.0, 0.5 - 1e-12]);
        assert_eq!(s.multiplicities, vec![3, 1]);
        assert_eq!(s.dim(), 4);
    }

    proptest! {
        #[test]
        fn entropy_permutation_invariant(mut w in proptest::collection::vec(0.0f64..1.0, 1..12), k in 0usize..12) {
            let total: f64 = w.iter().sum();
            prop_assume!(total > 1e-3);
            w.iter_mut().for_each(|v| *v /= total);
            let s = von_neumann_entropy(&w).unwrap();
            let n = w.len();
            w.rotate_left(k % n);
            let s2 = von_neumann_entropy(&w).unwrap();
            prop_assert!((s - s2).abs() < 1e-12);
            prop_assert!(s >= 0.0 && s <= (n as f64).log2() + 1e-12);
        }

        #[test]
        fn partial_transpose_involution(seed in 0u64..1000, da in 1usize..4, db in 1usize..4) {
            let mut r = rng(seed);
            let a = random_hermitian(da * db, &mut r);
            let pt = partial_transpose_b(&a, da, db).unwrap();
            prop_assert!(hermiticity_defect(&pt) < 1e-14);
            prop_assert!((pt.trace() - a.trace()).norm() < 1e-12);
            let back = partial_transpose_b(&pt, da, db).unwrap();
            prop_assert!(max_abs(&(back - a)) == 0.0);
        }
    }
}
