//! Primal-dual interior-point method for block-diagonal linear matrix
//! inequalities over real symmetric cones.
//!
//! Problem data describe the pair
//!
//! ```text
//! (D)  maximize  b'y   s.t.  Z = C - sum_i y_i A_i  is PSD
//! (P)  minimize <C,X>  s.t.  <A_i, X> = b_i,  X PSD
//! ```
//!
//! The iteration uses Nesterov-Todd scaling and Mehrotra's predictor-corrector.
//! The Schur complement is factored with a dense Cholesky.

use faer::linalg::solvers::Solve;
use faer::{Mat, Side};
use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

/// Sparse symmetric matrix as a full list of `(row, col, value)` triples.
pub type SparseEntries = Vec<(usize, usize, f64)>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SdpStatus {
    Optimal,
    MaxIter,
    NumericalTrouble,
}

#[derive(Debug, Clone)]
pub struct LmiProblem {
    pub block_dims: Vec<usize>,
    pub c: Vec<DMatrix<f64>>,
    /// For each variable, its nonzero blocks.
    pub a: Vec<Vec<(usize, SparseEntries)>>,
    pub b: Vec<f64>,
}

impl LmiProblem {
    pub fn num_vars(&self) -> usize {
        self.b.len()
    }

    /// `(<A_i, X>)_i`
    pub fn apply_a(&self, x: &[DMatrix<f64>]) -> DVector<f64> {
        DVector::from_iterator(
            self.a.len(),
            self.a.iter().map(|blocks| {
                blocks
                    .iter()
                    .map(|(k, e)| e.iter().map(|&(r, c, v)| v * x[*k][(r, c)]).sum::<f64>())
                    .sum::<f64>()
            }),
        )
    }

    /// `sum_i y_i A_i`
    pub fn apply_a_adjoint(&self, y: &DVector<f64>) -> Vec<DMatrix<f64>> {
        let mut out: Vec<DMatrix<f64>> = self
            .block_dims
            .iter()
            .map(|&n| DMatrix::zeros(n, n))
            .collect();
        for (yi, blocks) in y.iter().zip(&self.a) {
            if *yi == 0.0 {
                continue;
            }
            for (k, e) in blocks {
                for &(r, c, v) in e {
                    out[*k][(r, c)] += yi * v;
                }
            }
        }
        out
    }

    /// `C - sum_i y_i A_i`
    pub fn slack(&self, y: &DVector<f64>) -> Vec<DMatrix<f64>> {
        let ay = self.apply_a_adjoint(y);
        self.c.iter().zip(ay).map(|(c, a)| c - a).collect()
    }
}

#[derive(Debug, Clone, Copy)]
pub struct SolverOptions {
    pub tol: f64,
    pub max_iter: usize,
    /// Fraction of the distance to the cone boundary taken per step.
    pub step_fraction: f64,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions {
            tol: 1e-6,
            max_iter: 200,
            step_fraction: 0.95,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IterationRecord {
    /// `b'y`
    pub objective: f64,
    /// `<C, X>`
    pub bound: f64,
    /// `<X, Z>`
    pub complementarity: f64,
    pub primal_residual: f64,
    pub dual_residual: f64,
}

#[derive(Debug, Clone)]
pub struct LmiSolution {
    pub y: DVector<f64>,
    pub x: Vec<DMatrix<f64>>,
    pub z: Vec<DMatrix<f64>>,
    pub objective: f64,
    pub bound: f64,
    pub status: SdpStatus,
    pub iterations: usize,
    pub history: Vec<IterationRecord>,
}

fn inner(a: &[DMatrix<f64>], b: &[DMatrix<f64>]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x.dot(y)).sum()
}

fn frob(a: &[DMatrix<f64>]) -> f64 {
    a.iter().map(|x| x.norm_squared()).sum::<f64>().sqrt()
}

fn symmetrize(m: &mut DMatrix<f64>) {
    let t = m.transpose();
    *m += t;
    *m *= 0.5;
}

/// Nesterov-Todd scaling of one block: `G' Z G = G^{-1} X G^{-T} = diag(lambda)`.
struct Scaling {
    g: DMatrix<f64>,
    g_inv: DMatrix<f64>,
    w: DMatrix<f64>,
    lambda: DVector<f64>,
}

fn nt_scaling(x: &DMatrix<f64>, z: &DMatrix<f64>) -> Option<Scaling> {
    let ex = x.clone().symmetric_eigen();
    if ex.eigenvalues.iter().any(|&v| !(v > 0.0)) {
        return None;
    }
    let sq: DVector<f64> = ex.eigenvalues.map(f64::sqrt);
    let v = &ex.eigenvectors;
    let x_half = v * DMatrix::from_diagonal(&sq) * v.transpose();
    let x_mhalf = v * DMatrix::from_diagonal(&sq.map(|s| 1.0 / s)) * v.transpose();
    let mut s = &x_half * z * &x_half;
    symmetrize(&mut s);
    let es = s.symmetric_eigen();
    if es.eigenvalues.iter().any(|&v| !(v > 0.0)) {
        return None;
    }
    let lambda = es.eigenvalues.map(f64::sqrt);
    let q = es.eigenvectors;
    let lam_half = lambda.map(f64::sqrt);
    let g = &x_half * &q * DMatrix::from_diagonal(&lam_half.map(|l| 1.0 / l));
    let g_inv = DMatrix::from_diagonal(&lam_half) * q.transpose() * x_mhalf;
    let w = &g * g.transpose();
    Some(Scaling {
        g,
        g_inv,
        w,
        lambda,
    })
}

/// Largest `alpha` keeping `diag(lambda) + alpha * ds` PSD.
fn max_step(lambda: &DVector<f64>, ds: &DMatrix<f64>) -> f64 {
    let n = lambda.len();
    let mut m = DMatrix::from_fn(n, n, |i, j| ds[(i, j)] / (lambda[i] * lambda[j]).sqrt());
    symmetrize(&mut m);
    let lo = m.symmetric_eigenvalues().min();
    if lo < 0.0 {
        -1.0 / lo
    } else {
        f64::INFINITY
    }
}

struct Direction {
    dx: Vec<DMatrix<f64>>,
    dy: DVector<f64>,
    dz: Vec<DMatrix<f64>>,
}

struct Schur {
    llt: faer::linalg::solvers::Llt<f64>,
}

impl Schur {
    fn build(p: &LmiProblem, scal: &[Scaling]) -> Option<Schur> {
        let m = p.num_vars();
        let mut mat = Mat::<f64>::zeros(m, m);
        for i in 0..m {
            for j in i..m {
                let mut s = 0.0;
                for (bi, ei) in &p.a[i] {
                    for (bj, ej) in &p.a[j] {
                        if bi != bj {
                            continue;
                        }
                        let w = &scal[*bi].w;
                        for &(a, b, u) in ei {
                            for &(c, e, v) in ej {
                                s += u * v * w[(b, c)] * w[(e, a)];
                            }
                        }
                    }
                }
                mat[(i, j)] = s;
                mat[(j, i)] = s;
            }
        }
        let scale = (0..m)
            .map(|i| mat[(i, i)].abs())
            .fold(0.0, f64::max)
            .max(1e-300);
        let mut shift = 0.0;
        for attempt in 0..4 {
            if attempt > 0 {
                let next = scale * 10f64.powi(-14 + 2 * attempt);
                for i in 0..m {
                    mat[(i, i)] += next - shift;
                }
                shift = next;
            }
            if let Ok(llt) = mat.llt(Side::Lower) {
                return Some(Schur { llt });
            }
        }
        None
    }

    fn solve(&self, rhs: &DVector<f64>) -> DVector<f64> {
        let r = Mat::<f64>::from_fn(rhs.len(), 1, |i, _| rhs[i]);
        let sol = self.llt.solve(&r);
        DVector::from_fn(rhs.len(), |i, _| sol[(i, 0)])
    }
}

fn direction(
    p: &LmiProblem,
    scal: &[Scaling],
    schur: &Schur,
    rp: &DVector<f64>,
    rd: &[DMatrix<f64>],
    rhs_c: &[DMatrix<f64>],
) -> Direction {
    // rhs_c is the scaled complementarity right-hand side; solve lambda o D = rhs_c.
    let rc: Vec<DMatrix<f64>> = scal
        .iter()
        .zip(rhs_c)
        .map(|(s, r)| {
            let n = s.lambda.len();
            let d = DMatrix::from_fn(n, n, |i, j| 2.0 * r[(i, j)] / (s.lambda[i] + s.lambda[j]));
            &s.g * d * s.g.transpose()
        })
        .collect();
    let wrdw: Vec<DMatrix<f64>> = scal.iter().zip(rd).map(|(s, r)| &s.w * r * &s.w).collect();
    let rhs = rp - p.apply_a(&rc) + p.apply_a(&wrdw);
    let dy = schur.solve(&rhs);
    let aty = p.apply_a_adjoint(&dy);
    let dz: Vec<DMatrix<f64>> = rd.iter().zip(&aty).map(|(r, a)| r - a).collect();
    let dx: Vec<DMatrix<f64>> = rc
        .iter()
        .zip(scal)
        .zip(&dz)
        .map(|((r, s), dzb)| {
            let mut v = r - &s.w * dzb * &s.w;
            symmetrize(&mut v);
            v
        })
        .collect();
    Direction { dx, dy, dz }
}

fn scaled_steps(
    scal: &[Scaling],
    dir: &Direction,
) -> (Vec<DMatrix<f64>>, Vec<DMatrix<f64>>, f64, f64) {
    let mut ap = f64::INFINITY;
    let mut ad = f64::INFINITY;
    let mut dxs = Vec::with_capacity(scal.len());
    let mut dzs = Vec::with_capacity(scal.len());
    for (s, (dx, dz)) in scal.iter().zip(dir.dx.iter().zip(&dir.dz)) {
        let mut dxt = &s.g_inv * dx * s.g_inv.transpose();
        let mut dzt = s.g.transpose() * dz * &s.g;
        symmetrize(&mut dxt);
        symmetrize(&mut dzt);
        ap = ap.min(max_step(&s.lambda, &dxt));
        ad = ad.min(max_step(&s.lambda, &dzt));
        dxs.push(dxt);
        dzs.push(dzt);
    }
    (dxs, dzs, ap, ad)
}

/// Solves from a strictly dual-feasible `y0` (`C - A* y0` positive definite).
pub fn solve_lmi(p: &LmiProblem, y0: DVector<f64>, opts: &SolverOptions) -> LmiSolution {
    let n_total: usize = p.block_dims.iter().sum();
    let b = DVector::from_column_slice(&p.b);
    let b_norm = b.norm();
    let c_norm = frob(&p.c);

    let mut y = y0;
    let mut z = p.slack(&y);
    let xi = p
        .block_dims
        .iter()
        .map(|&n| (n as f64).sqrt())
        .fold(10.0, f64::max)
        .max(b.amax() * 10.0);
    let mut x: Vec<DMatrix<f64>> = p
        .block_dims
        .iter()
        .map(|&n| DMatrix::identity(n, n) * xi)
        .collect();

    let mut history = Vec::new();
    let mut status = SdpStatus::MaxIter;
    let mut iterations = 0;

    loop {
        let rp = &b - p.apply_a(&x);
        let aty = p.apply_a_adjoint(&y);
        let rd: Vec<DMatrix<f64>> =
            p.c.iter()
                .zip(&aty)
                .zip(&z)
                .map(|((c, a), zb)| c - a - zb)
                .collect();
        let objective = b.dot(&y);
        let bound = inner(&p.c, &x);
        let mu_sum = inner(&x, &z);
        let rec = IterationRecord {
            objective,
            bound,
            complementarity: mu_sum,
            primal_residual: rp.norm() / (1.0 + b_norm),
            dual_residual: frob(&rd) / (1.0 + c_norm),
        };
        history.push(rec);
        let gap = (bound - objective).abs().max(mu_sum);
        if gap < opts.tol && rec.primal_residual < opts.tol && rec.dual_residual < opts.tol {
            status = SdpStatus::Optimal;
            break;
        }
        if iterations >= opts.max_iter {
            break;
        }

        let Some(scal) = x
            .iter()
            .zip(&z)
            .map(|(xb, zb)| nt_scaling(xb, zb))
            .collect::<Option<Vec<_>>>()
        else {
            status = SdpStatus::NumericalTrouble;
            break;
        };
        let Some(schur) = Schur::build(p, &scal) else {
            status = SdpStatus::NumericalTrouble;
            break;
        };
        let mu = mu_sum / n_total as f64;

        let rhs_pred: Vec<DMatrix<f64>> = scal
            .iter()
            .map(|s| DMatrix::from_diagonal(&s.lambda.map(|l| -l * l)))
            .collect();
        let pred = direction(p, &scal, &schur, &rp, &rd, &rhs_pred);
        let (dxa, dza, ap, ad) = scaled_steps(&scal, &pred);
        let ap = ap.min(1.0);
        let ad = ad.min(1.0);
        let mu_aff: f64 = x
            .iter()
            .zip(&pred.dx)
            .zip(z.iter().zip(&pred.dz))
            .map(|((xb, dxb), (zb, dzb))| (xb + dxb * ap).dot(&(zb + dzb * ad)))
            .sum::<f64>()
            / n_total as f64;
        let sigma = (mu_aff / mu).clamp(0.0, 1.0).powi(3);

        let rhs_corr: Vec<DMatrix<f64>> = scal
            .iter()
            .zip(dxa.iter().zip(&dza))
            .map(|(s, (dxt, dzt))| {
                let prod = dxt * dzt;
                let sym = (&prod + prod.transpose()) * 0.5;
                DMatrix::from_diagonal(&s.lambda.map(|l| sigma * mu - l * l)) - sym
            })
            .collect();
        let corr = direction(p, &scal, &schur, &rp, &rd, &rhs_corr);
        let (_, _, ap, ad) = scaled_steps(&scal, &corr);
        let ap = (opts.step_fraction * ap).min(1.0);
        let ad = (opts.step_fraction * ad).min(1.0);

        for (xb, dxb) in x.iter_mut().zip(&corr.dx) {
            *xb += dxb * ap;
            symmetrize(xb);
        }
        y += &corr.dy * ad;
        for (zb, dzb) in z.iter_mut().zip(&corr.dz) {
            *zb += dzb * ad;
            symmetrize(zb);
        }
        iterations += 1;
    }

    let last = *history.last().expect("at least one record");
    LmiSolution {
        y,
        x,
        z,
        objective: last.objective,
        bound: last.bound,
        status,
        iterations,
        history,
    }
}
