//! Choi matrices, their closed-form spectra, and the zero-capacity region.

use serde::{Deserialize, Serialize};

use crate::channels::{apply_linear, ChannelParams};
use crate::qmat::{
    cr, hermitian_eigenvalues, identity, ket_bra, kron, partial_trace_a, partial_transpose_b,
    phi_plus, swap_operator, ComplexMatrix, HermitianMatrix, SpectrumResult,
};

/// Tolerance on closed-form eigenvalues for the PPT test.
pub const PPT_TOL: f64 = 1e-12;

/// `J = sum_{ij} |i><j| (x) Phi(|i><j|)`, trace `d`.
#[derive(Debug, Clone)]
pub struct ChoiMatrix {
    pub d: usize,
    pub matrix: HermitianMatrix,
}

impl ChoiMatrix {
    pub fn partial_transpose(&self) -> HermitianMatrix {
        let pt =
            partial_transpose_b(self.matrix.matrix(), self.d, self.d).expect("square d^2 matrix");
        HermitianMatrix::from_hermitian_part(&pt)
    }

    /// `J / d`, the Choi state.
    pub fn normalized(&self) -> ComplexMatrix {
        self.matrix.matrix() / cr(self.d as f64)
    }
}

/// Closed form `(1-x-y) d |phi+><phi+| + (x_d + y_d) I + (y_d - x_d) P`.
pub fn choi_matrix(params: &ChannelParams) -> ChoiMatrix {
    let d = params.d();
    let phi = phi_plus(d);
    let m = &phi * phi.adjoint() * cr((1.0 - params.x() - params.y()) * d as f64)
        + identity(d * d) * cr(params.x_d() + params.y_d())
        + swap_operator(d) * cr(params.y_d() - params.x_d());
    ChoiMatrix {
        d,
        matrix: HermitianMatrix::from_hermitian_part(&m),
    }
}

/// Choi matrix of any linear map on `d x d` matrices, straight from the definition.
pub fn choi_from_map<F>(d: usize, map: F) -> ComplexMatrix
where
    F: Fn(&ComplexMatrix) -> ComplexMatrix,
{
    let mut j = ComplexMatrix::zeros(d * d, d * d);
    for i in 0..d {
        for k in 0..d {
            let e = ket_bra(d, i, k);
            j += kron(&e, &map(&e));
        }
    }
    j
}

/// Choi matrix of the channel built from its definition rather than the closed form.
pub fn choi_by_definition(params: &ChannelParams) -> ChoiMatrix {
    let j = choi_from_map(params.d(), |e| apply_linear(params, e));
    ChoiMatrix {
        d: params.d(),
        matrix: HermitianMatrix::from_hermitian_part(&j),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EigenspaceLabel {
    /// `|phi+>`
    PhiPlus,
    /// `|ij> + |ji>`, `i < j`
    Symmetric,
    /// `|ij> - |ji>`, `i < j`
    Antisymmetric,
    /// `|ii> - |i+1,i+1>`
    DiagonalDifference,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpectralBranch {
    pub label: EigenspaceLabel,
    pub value: f64,
    pub multiplicity: usize,
}

fn branch_multiplicities(d: usize) -> [usize; 4] {
    [1, d * (d - 1) / 2, d * (d - 1) / 2, d - 1]
}

/// The four eigenspaces of `J^{T_B}` with their closed-form eigenvalues.
pub fn ptb_branches(params: &ChannelParams) -> [SpectralBranch; 4] {
    let [g0, g1, g2, g3] = branch_multiplicities(params.d());
    let w = 1.0 - params.x() - params.y();
    let s = params.x_d() + params.y_d();
    [
        SpectralBranch {
            label: EigenspaceLabel::PhiPlus,
            value: 1.0 - 2.0 * params.x(),
            multiplicity: g0,
        },
        SpectralBranch {
            label: EigenspaceLabel::Symmetric,
            value: w + s,
            multiplicity: g1,
        },
        SpectralBranch {
            label: EigenspaceLabel::Antisymmetric,
            value: -w + s,
            multiplicity: g2,
        },
        SpectralBranch {
            label: EigenspaceLabel::DiagonalDifference,
            value: w + s,
            multiplicity: g3,
        },
    ]
}

fn group(branches: &[SpectralBranch]) -> SpectrumResult {
    let levels: Vec<(f64, usize)> = branches.iter().map(|b| (b.value, b.multiplicity)).collect();
    SpectrumResult::from_levels(&levels)
}

pub fn ptb_spectrum(params: &ChannelParams) -> SpectrumResult {
    group(&ptb_branches(params))
}

/// The four eigenspaces of `J/d`.
pub fn choi_normalized_branches(params: &ChannelParams) -> [SpectralBranch; 4] {
    let d = params.d() as f64;
    let [g0, g1, g2, g3] = branch_multiplicities(params.d());
    let sym = 2.0 * params.y_d() / d;
    [
        SpectralBranch {
            label: EigenspaceLabel::PhiPlus,
            value: 1.0 - params.x() - params.y() + sym,
            multiplicity: g0,
        },
        SpectralBranch {
            label: EigenspaceLabel::Symmetric,
            value: sym,
            multiplicity: g1,
        },
        SpectralBranch {
            label: EigenspaceLabel::Antisymmetric,
            value: 2.0 * params.x_d() / d,
            multiplicity: g2,
        },
        SpectralBranch {
            label: EigenspaceLabel::DiagonalDifference,
            value: sym,
            multiplicity: g3,
        },
    ]
}

pub fn choi_normalized_spectrum(params: &ChannelParams) -> SpectrumResult {
    group(&choi_normalized_branches(params))
}

/// Numerical spectrum of `J^{T_B}` (closed-form Choi, numerical partial transpose
/// and eigensolver).
pub fn ptb_spectrum_numeric(params: &ChannelParams) -> SpectrumResult {
    SpectrumResult::from_eigenvalues(hermitian_eigenvalues(
        choi_by_definition(params).partial_transpose().matrix(),
    ))
}

pub fn choi_normalized_spectrum_numeric(params: &ChannelParams) -> SpectrumResult {
    SpectrumResult::from_eigenvalues(hermitian_eigenvalues(
        &choi_by_definition(params).normalized(),
    ))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RegionFlags {
    pub ppt: bool,
    pub in_omega: bool,
    /// Only defined for qubit channels.
    pub qubit_antidegradable: Option<bool>,
}

/// Membership in `Omega_d = {0 <= x <= 1/2, d x_d + (d+2) y_d >= 1}`, with
/// boundary points counted as inside.
pub fn in_omega(params: &ChannelParams) -> bool {
    let d = params.d() as f64;
    1.0 - 2.0 * params.x() >= -PPT_TOL
        && d * params.x_d() + (d + 2.0) * params.y_d() - 1.0 >= -PPT_TOL
}

pub fn is_ppt(params: &ChannelParams) -> bool {
    ptb_branches(params).iter().all(|b| b.value >= -PPT_TOL)
}

/// Symmetric-extension test for a two-qubit Choi state `rho = J/2`:
/// antidegradable iff `Tr(rho^2) - 4 sqrt(det rho) <= Tr(rho_B^2)`.
pub fn qubit_antidegradable(params: &ChannelParams) -> Option<bool> {
    if params.d() != 2 {
        return None;
    }
    let rho = choi_matrix(params).normalized();
    let rho_b = partial_trace_a(&rho, 2, 2).expect("4x4 Choi state");
    let purity = (&rho * &rho).trace().re;
    let purity_b = (&rho_b * &rho_b).trace().re;
    let det: f64 = hermitian_eigenvalues(&rho)
        .iter()
        .map(|v| v.max(0.0))
        .product();
    Some(purity - 4.0 * det.sqrt() <= purity_b + 1e-12)
}

pub fn region_flags(params: &ChannelParams) -> RegionFlags {
    RegionFlags {
        ppt: is_ppt(params),
        in_omega: in_omega(params),
        qubit_antidegradable: qubit_antidegradable(params),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channels::pauli_reduction_d2;
    use crate::qmat::{max_abs, random_density, rng};

    fn p(d: usize, x: f64, y: f64) -> ChannelParams {
        ChannelParams::new(d, x, y).unwrap()
    }

    #[test]
    fn identity_choi_is_maximally_entangled() {
        for d in 2..=4 {
            let j = choi_matrix(&p(d, 0.0, 0.0));
            let phi = phi_plus(d);
            assert!(max_abs(&(j.matrix.matrix() - &phi * phi.adjoint() * cr(d as f64))) < 1e-14);
        }
    }

    #[test]
    fn qubit_y_flip_choi_is_rank_one() {
        let q = p(2, 1.0, 0.0);
        let pauli = pauli_reduction_d2(&q).unwrap();
        let from_pauli = choi_from_map(2, |e| pauli.apply(e));
        let j = choi_matrix(&q);
        assert!(max_abs(&(j.matrix.matrix() - from_pauli)) < 1e-14);
        let ev = hermitian_eigenvalues(j.matrix.matrix());
        assert!((ev[0] - 2.0).abs() < 1e-12);
        assert!(ev[1..].iter().all(|v| v.abs() < 1e-12));
    }

    #[test]
    fn closed_form_matches_definition() {
        for d in 2..=5 {
            for &(x, y) in &[(0.3, 0.3), (0.0, 1.0), (1.0, 0.0), (0.12, 0.51)] {
                let q = p(d, x, y);
                let a = choi_matrix(&q);
                let b = choi_by_definition(&q);
                assert!(max_abs(&(a.matrix.matrix() - b.matrix.matrix())) < 1e-12);
                assert!((a.matrix.trace() - d as f64).abs() < 1e-10);
                assert!(a.matrix.min_eigenvalue() > -1e-10);
            }
        }
    }

    #[test]
    fn ptb_identity_is_swap_spectrum() {
        let b = ptb_branches(&p(2, 0.0, 0.0));
        let values: Vec<f64> = b.iter().map(|b| b.value).collect();
        assert_eq!(values, vec![1.0, 1.0, -1.0, 1.0]);
    }

    #[test]
    fn ptb_werner_holevo() {
        let q = p(3, 1.0, 0.0);
        let s = ptb_spectrum(&q);
        assert_eq!(s.multiplicities, vec![8, 1]);
        assert!((s.eigenvalues[0] - 0.5).abs() < 1e-15);
        assert!((s.eigenvalues[1] + 1.0).abs() < 1e-15);
        assert!(s.max_deviation(&ptb_spectrum_numeric(&q)) < 1e-10);
    }

    #[test]
    fn ptb_generic_point() {
        let q = p(3, 0.2, 0.5);
        assert!(ptb_spectrum(&q).max_deviation(&ptb_spectrum_numeric(&q)) < 1e-10);
    }

    #[test]
    fn normalized_spectrum_examples() {
        let s = choi_normalized_spectrum(&p(3, 0.0, 0.0));
        assert_eq!(s.multiplicities, vec![1, 8]);
        assert_eq!(s.eigenvalues, vec![1.0, 0.0]);

        let q = p(3, 1.0, 0.0);
        let s = choi_normalized_spectrum(&q);
        assert_eq!(s.multiplicities, vec![3, 6]);
        assert!((s.eigenvalues[0] - 1.0 / 3.0).abs() < 1e-15);
        assert!(s.eigenvalues[1].abs() < 1e-15);
        assert!(s.max_deviation(&choi_normalized_spectrum_numeric(&q)) < 1e-10);

        let mut r = rng(2);
        for _ in 0..10 {
            let rho = random_density(2, &mut r);
            let (x, y) = (rho.matrix()[(0, 0)].re * 0.5, rho.matrix()[(1, 1)].re * 0.5);
            let sum: f64 = choi_normalized_spectrum(&p(4, x, y))
                .expanded()
                .iter()
                .sum();
            assert!((sum - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn region_examples() {
        let f = region_flags(&p(2, 0.25, 0.5));
        assert!(f.in_omega && f.ppt);
        assert!(f.qubit_antidegradable.is_some());

        let f = region_flags(&p(3, 0.0, 0.0));
        assert!(!f.ppt && !f.in_omega);
        assert_eq!(f.qubit_antidegradable, None);

        // (3/2) 0.4 + (5/4) 0.3 = 0.975 < 1
        let f = region_flags(&p(3, 0.4, 0.3));
        assert!(!f.in_omega && !f.ppt);
    }

    #[test]
    fn high_noise_is_never_ppt() {
        for d in 2..=6 {
            for i in 0..=20 {
                let x = 0.5 + 0.025 * i as f64;
                let q = p(d, x.min(1.0), (1.0 - x).max(0.0) * 0.5);
                if x > 0.5 {
                    assert!(!region_flags(&q).ppt);
                }
            }
        }
    }

    #[test]
    fn ptb_trace_identity() {
        // Tr(J^{T_B} (rho (x) I)) = 1
        let mut r = rng(3);
        for d in 2..=4 {
            let q = p(d, 0.3, 0.45);
            let jt = choi_matrix(&q).partial_transpose();
            for _ in 0..5 {
                let rho = random_density(d, &mut r);
                let t = (jt.matrix() * kron(rho.matrix(), &identity(d))).trace();
                assert!((t - cr(1.0)).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn qubit_antidegradable_isotropic_threshold() {
        // At y = 3x the d = 2 Choi state is isotropic with fidelity 1 - 3x;
        // such states are 2-extendible exactly when the fidelity is <= 3/4.
        assert_eq!(qubit_antidegradable(&p(2, 1.0 / 12.0, 0.25)), Some(true));
        assert_eq!(qubit_antidegradable(&p(2, 0.1, 0.3)), Some(true));
        assert_eq!(qubit_antidegradable(&p(2, 0.05, 0.15)), Some(false));
        // Identity is not antidegradable; the completely depolarizing channel
        // (x = 1/4, y = 3/4) is.
        assert_eq!(qubit_antidegradable(&p(2, 0.0, 0.0)), Some(false));
        assert_eq!(qubit_antidegradable(&p(2, 0.25, 0.75)), Some(true));
    }
}
