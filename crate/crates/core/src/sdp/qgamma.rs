//! The partial-transpose-constrained upper bound on quantum capacity:
//!
//! ```text
//! maximize Tr(J R)  s.t.  R PSD, rho PSD, Tr rho = 1,  -rho (x) I <= R^{T_B} <= rho (x) I
//! ```
//!
//! `Q_Gamma = log2` of the optimum.

use nalgebra::DVector;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::solver::{
    solve_lmi, IterationRecord, LmiProblem, SdpStatus, SolverOptions, SparseEntries,
};
use crate::channels::ChannelParams;
use crate::choi::{choi_matrix, ChoiMatrix};
use crate::error::{Error, Result};
use crate::qmat::{
    c, cr, hermitian_eigenvalues, identity, kron, partial_transpose_b, ComplexMatrix,
    HermitianMatrix, C64,
};

/// Number field of the optimization variables.
///
/// The Choi matrix of every channel in the family is real, and the program is
/// invariant under complex conjugation, so restricting `R` and `rho` to real
/// symmetric matrices loses nothing. `Complex` solves the full Hermitian
/// program through the real embedding.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Field {
    Real,
    Complex,
}

#[derive(Debug, Clone, Copy)]
pub struct QGammaOptions {
    pub tol: f64,
    pub max_iter: usize,
    /// Solve without the `R PSD` constraint.
    pub drop_r_psd: bool,
    pub field: Field,
}

impl Default for QGammaOptions {
    fn default() -> Self {
        QGammaOptions {
            tol: 1e-6,
            max_iter: 200,
            drop_r_psd: false,
            field: Field::Real,
        }
    }
}

type HermEntries = Vec<(usize, usize, C64)>;

/// Basis of Hermitian (or real symmetric) `n x n` matrices.
fn hermitian_basis(n: usize, field: Field) -> Vec<HermEntries> {
    let mut out = Vec::new();
    for a in 0..n {
        out.push(vec![(a, a, cr(1.0))]);
        for b in a + 1..n {
            out.push(vec![(a, b, cr(1.0)), (b, a, cr(1.0))]);
            if field == Field::Complex {
                out.push(vec![(a, b, c(0.0, 1.0)), (b, a, c(0.0, -1.0))]);
            }
        }
    }
    out
}

/// Basis of traceless Hermitian `n x n` matrices.
fn traceless_basis(n: usize, field: Field) -> Vec<HermEntries> {
    hermitian_basis(n, field)
        .into_iter()
        .filter_map(|mut e| {
            if e.len() == 1 {
                let (a, _, _) = e[0];
                if a + 1 == n {
                    return None;
                }
                e.push((n - 1, n - 1, cr(-1.0)));
            }
            Some(e)
        })
        .collect()
}

fn ptb_entries(e: &HermEntries, d: usize) -> HermEntries {
    e.iter()
        .map(|&(r, c, z)| {
            let (r1, r2) = (r / d, r % d);
            let (c1, c2) = (c / d, c % d);
            (r1 * d + c2, c1 * d + r2, z)
        })
        .collect()
}

fn tensor_identity(e: &HermEntries, d: usize) -> HermEntries {
    e.iter()
        .flat_map(|&(r, c, z)| (0..d).map(move |k| (r * d + k, c * d + k, z)))
        .collect()
}

fn to_real(e: &HermEntries, n: usize, field: Field, sign: f64) -> SparseEntries {
    let mut out = Vec::new();
    for &(r, c, z) in e {
        match field {
            Field::Real => out.push((r, c, sign * z.re)),
            Field::Complex => {
                if z.re != 0.0 {
                    out.push((r, c, sign * z.re));
                    out.push((r + n, c + n, sign * z.re));
                }
                if z.im != 0.0 {
                    out.push((r, c + n, -sign * z.im));
                    out.push((r + n, c, sign * z.im));
                }
            }
        }
    }
    out
}

fn assemble(basis: &[HermEntries], coeffs: &[f64], n: usize) -> ComplexMatrix {
    let mut m = ComplexMatrix::zeros(n, n);
    for (e, &y) in basis.iter().zip(coeffs) {
        for &(r, c, z) in e {
            m[(r, c)] += z * y;
        }
    }
    m
}

/// The program for one channel, lowered to block LMI form.
#[derive(Debug, Clone)]
pub struct QGammaProgram {
    pub d: usize,
    pub choi: ChoiMatrix,
    pub drop_r_psd: bool,
    pub field: Field,
    r_basis: Vec<HermEntries>,
    rho_basis: Vec<HermEntries>,
    lmi: LmiProblem,
}

impl QGammaProgram {
    pub fn new(choi: ChoiMatrix, drop_r_psd: bool, field: Field) -> Self {
        let d = choi.d;
        let n = d * d;
        let scale = if field == Field::Complex { 2 } else { 1 };
        let r_basis = hermitian_basis(n, field);
        let rho_basis = traceless_basis(d, field);
        let j = choi.matrix.matrix();

        // Block order: [R], rho, rho(x)I - R^{T_B}, rho(x)I + R^{T_B}.
        let off = usize::from(!drop_r_psd);
        let (rho_blk, plus_blk, minus_blk) = (off, off + 1, off + 2);
        let mut block_dims = Vec::new();
        let mut cmats = Vec::new();
        if !drop_r_psd {
            block_dims.push(scale * n);
            cmats.push(nalgebra::DMatrix::zeros(scale * n, scale * n));
        }
        block_dims.extend([scale * d, scale * n, scale * n]);
        let inv_d = 1.0 / d as f64;
        cmats.push(nalgebra::DMatrix::identity(scale * d, scale * d) * inv_d);
        cmats.push(nalgebra::DMatrix::identity(scale * n, scale * n) * inv_d);
        cmats.push(nalgebra::DMatrix::identity(scale * n, scale * n) * inv_d);

        let mut a = Vec::with_capacity(r_basis.len() + rho_basis.len());
        let mut b = Vec::with_capacity(a.capacity());
        for e in &r_basis {
            let pt = ptb_entries(e, d);
            let mut blocks = Vec::new();
            if !drop_r_psd {
                blocks.push((0, to_real(e, n, field, -1.0)));
            }
            blocks.push((plus_blk, to_real(&pt, n, field, 1.0)));
            blocks.push((minus_blk, to_real(&pt, n, field, -1.0)));
            a.push(blocks);
            b.push(e.iter().map(|&(r, c, z)| (j[(c, r)] * z).re).sum());
        }
        for e in &rho_basis {
            let t = tensor_identity(e, d);
            a.push(vec![
                (rho_blk, to_real(e, d, field, -1.0)),
                (plus_blk, to_real(&t, n, field, -1.0)),
                (minus_blk, to_real(&t, n, field, -1.0)),
            ]);
            b.push(0.0);
        }
        let lmi = LmiProblem {
            block_dims,
            c: cmats,
            a,
            b,
        };
        QGammaProgram {
            d,
            choi,
            drop_r_psd,
            field,
            r_basis,
            rho_basis,
            lmi,
        }
    }

    pub fn num_vars(&self) -> usize {
        self.lmi.num_vars()
    }

    /// `R = eps I` with `eps = 1/(4 d^2)` and `rho = I/d`: strictly inside every cone.
    fn initial_point(&self) -> DVector<f64> {
        let eps = 0.25 / (self.d * self.d) as f64;
        DVector::from_fn(self.num_vars(), |i, _| {
            if i < self.r_basis.len() && self.r_basis[i].len() == 1 {
                eps
            } else {
                0.0
            }
        })
    }

    fn variables(&self, y: &DVector<f64>) -> (ComplexMatrix, ComplexMatrix) {
        let d = self.d;
        let nr = self.r_basis.len();
        let r = assemble(&self.r_basis, &y.as_slice()[..nr], d * d);
        let rho =
            assemble(&self.rho_basis, &y.as_slice()[nr..], d) + identity(d) * cr(1.0 / d as f64);
        (r, rho)
    }

    pub fn solve(&self, tol: f64, max_iter: usize) -> SdpSolution {
        let sol = solve_lmi(
            &self.lmi,
            self.initial_point(),
            &SolverOptions {
                tol,
                max_iter,
                ..Default::default()
            },
        );
        let (r, rho) = self.variables(&sol.y);
        let feasibility = Feasibility::of(&r, &rho, self.d);
        let optimal_value = sol.objective;
        SdpSolution {
            optimal_value,
            q_gamma: optimal_value.log2(),
            upper_value: sol.bound,
            r_star: HermitianMatrix::from_hermitian_part(&r),
            rho_star: HermitianMatrix::from_hermitian_part(&rho),
            duality_gap: sol.bound - sol.objective,
            iterations: sol.iterations,
            status: sol.status,
            feasibility,
            history: sol.history,
        }
    }

    /// Dense copies of the real LMI data, embedded for `Complex`.
    pub fn constraint_blocks(&self, y: &DVector<f64>) -> Vec<nalgebra::DMatrix<f64>> {
        self.lmi.slack(y)
    }
}

/// Smallest eigenvalues of each constraint at a candidate point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Feasibility {
    pub r_min_eig: f64,
    pub rho_min_eig: f64,
    /// `rho (x) I - R^{T_B}`
    pub upper_min_eig: f64,
    /// `rho (x) I + R^{T_B}`
    pub lower_min_eig: f64,
    pub trace_residual: f64,
}

impl Feasibility {
    pub fn of(r: &ComplexMatrix, rho: &ComplexMatrix, d: usize) -> Self {
        let min = |m: &ComplexMatrix| {
            hermitian_eigenvalues(m)
                .into_iter()
                .fold(f64::INFINITY, f64::min)
        };
        let pt = partial_transpose_b(r, d, d).expect("square bipartite");
        let rho_i = kron(rho, &identity(d));
        Feasibility {
            r_min_eig: min(r),
            rho_min_eig: min(rho),
            upper_min_eig: min(&(&rho_i - &pt)),
            lower_min_eig: min(&(&rho_i + &pt)),
            trace_residual: (rho.trace().re - 1.0).abs(),
        }
    }

    /// Worst violation, counting `R PSD` only when it is imposed.
    pub fn max_violation(&self, include_r: bool) -> f64 {
        let mut v = [
            -self.rho_min_eig,
            -self.upper_min_eig,
            -self.lower_min_eig,
            self.trace_residual,
        ]
        .into_iter()
        .fold(0.0, f64::max);
        if include_r {
            v = v.max(-self.r_min_eig);
        }
        v
    }
}

#[derive(Debug, Clone)]
pub struct SdpSolution {
    /// `Tr(J R*)` at the returned feasible point.
    pub optimal_value: f64,
    pub q_gamma: f64,
    /// Objective of the dual certificate; an upper bound on the optimum.
    pub upper_value: f64,
    pub r_star: HermitianMatrix,
    pub rho_star: HermitianMatrix,
    pub duality_gap: f64,
    pub iterations: usize,
    pub status: SdpStatus,
    pub feasibility: Feasibility,
    pub history: Vec<IterationRecord>,
}

pub fn solve_qgamma(params: &ChannelParams, tol: f64, max_iter: usize) -> SdpSolution {
    solve_qgamma_with(
        params,
        &QGammaOptions {
            tol,
            max_iter,
            ..Default::default()
        },
    )
}

pub fn solve_qgamma_with(params: &ChannelParams, opts: &QGammaOptions) -> SdpSolution {
    QGammaProgram::new(choi_matrix(params), opts.drop_r_psd, opts.field)
        .solve(opts.tol, opts.max_iter)
}

/// Solves every grid point independently, in parallel, returning results in
/// grid order. The solver is deterministic, so `_seed` has no effect.
pub fn sweep_qgamma(
    d: usize,
    grid: &[(f64, f64)],
    tol: f64,
    _seed: u64,
) -> Result<Vec<SdpSolution>> {
    sweep_qgamma_with(
        d,
        grid,
        &QGammaOptions {
            tol,
            ..Default::default()
        },
    )
}

pub fn sweep_qgamma_with(
    d: usize,
    grid: &[(f64, f64)],
    opts: &QGammaOptions,
) -> Result<Vec<SdpSolution>> {
    let params = grid
        .iter()
        .map(|&(x, y)| ChannelParams::new(d, x, y))
        .collect::<Result<Vec<_>>>()
        .map_err(|e| Error::InvalidParams(format!("sweep grid: {e}")))?;
    Ok(params
        .par_iter()
        .map(|p| solve_qgamma_with(p, opts))
        .collect())
}
