//! Closed-form capacity quantities and the brute-force oracles that check them.
//!
//! All values are in bits.

use std::f64::consts::{FRAC_PI_2, PI};

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::channels::{apply_linear, complement_apply, ChannelParams};
use crate::choi::{region_flags, RegionFlags};
use crate::error::Result;
use crate::optimize::{nelder_mead, NelderMeadOptions};
use crate::qmat::{
    c, cr, hermitian_eigenvalues, random_pure_state, rng, von_neumann_entropy, ComplexMatrix,
    ComplexVector, DensityMatrix, PureState, C64,
};
use crate::sdp::SdpStatus;

/// `-sum g p log2 p` over `(p, g)` levels, with `0 log 0 = 0`.
pub fn level_entropy(levels: &[(f64, usize)]) -> f64 {
    levels
        .iter()
        .filter(|(p, _)| *p > 0.0)
        .map(|&(p, g)| -(g as f64) * p * p.log2())
        .sum()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum HolevoRegion {
    /// `x + y = 1`
    Line,
    /// `y_d >= x_d`
    A,
    /// `y_d < x_d`
    B,
}

impl HolevoRegion {
    pub fn as_str(self) -> &'static str {
        match self {
            HolevoRegion::Line => "Line",
            HolevoRegion::A => "A",
            HolevoRegion::B => "B",
        }
    }
}

pub fn holevo_region(params: &ChannelParams) -> HolevoRegion {
    if params.on_line() {
        HolevoRegion::Line
    } else if params.y_d() >= params.x_d() {
        HolevoRegion::A
    } else {
        HolevoRegion::B
    }
}

/// Spectrum of the minimum-entropy output, as `(eigenvalue, multiplicity)`,
/// using the formula attached to `region` (regardless of where `params` lies).
pub fn min_output_levels(params: &ChannelParams, region: HolevoRegion) -> Vec<(f64, usize)> {
    let d = params.d();
    let df = d as f64;
    let (xd, yd) = (params.x_d(), params.y_d());
    match region {
        HolevoRegion::Line => vec![(2.0 * yd, 1), (xd + yd, d - 1)],
        HolevoRegion::A => vec![(1.0 - (df - 1.0) * (xd + yd), 1), (xd + yd, d - 1)],
        HolevoRegion::B => vec![
            (2.0 * yd, 1),
            (1.0 - (df - 2.0) * xd - df * yd, 1),
            (xd + yd, d - 2),
        ],
    }
}

/// `log2 d - S_min` evaluated with one region's formula.
pub fn holevo_formula(params: &ChannelParams, region: HolevoRegion) -> f64 {
    (params.d() as f64).log2() - level_entropy(&min_output_levels(params, region))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Holevo {
    pub value: f64,
    pub region: HolevoRegion,
}

/// One-shot classical capacity (Holevo quantity).
pub fn holevo(params: &ChannelParams) -> Holevo {
    let region = holevo_region(params);
    Holevo {
        value: holevo_formula(params, region),
        region,
    }
}

/// The reduced input `(cos(theta) e^{i phi}, sin(theta), 0, ..., 0)`.
pub fn reduced_state(d: usize, theta: f64, phi: f64) -> PureState {
    let mut v = ComplexVector::zeros(d);
    v[0] = C64::from_polar(theta.cos(), phi);
    v[1] = cr(theta.sin());
    PureState::new(v).expect("unit vector")
}

/// `|sum_i psi_i^2|`: 1 for states that are real up to a phase, 0 when
/// `psi` is orthogonal to its conjugate.
pub fn conjugate_overlap(psi: &PureState) -> f64 {
    psi.amplitudes().iter().map(|z| z * z).sum::<C64>().norm()
}

/// `S(Phi(|psi><psi|))` from a numerical eigensolve of the output.
pub fn output_entropy(params: &ChannelParams, psi: &PureState) -> f64 {
    let v = psi.amplitudes();
    let out = apply_linear(params, &(v * v.adjoint()));
    von_neumann_entropy(&hermitian_eigenvalues(&out)).expect("channel output is a state")
}

/// The nontrivial `2 x 2` block of the output for a reduced input.
#[derive(Debug, Clone, PartialEq)]
pub struct OutputBlock {
    pub m: ComplexMatrix,
    /// `(1-x-y) e^{i phi} + (y_d - x_d) e^{-i phi}`
    pub a: C64,
    /// Part of `det M` that does not depend on `phi`.
    pub det_phase_free: f64,
    /// `2 sin^2 cos^2 (1-x-y)(y_d - x_d)`; `det M = det_phase_free - R cos(2 phi)`.
    pub r: f64,
}

impl OutputBlock {
    pub fn det(&self) -> f64 {
        (self.m[(0, 0)] * self.m[(1, 1)] - self.m[(0, 1)] * self.m[(1, 0)]).re
    }

    pub fn trace(&self) -> f64 {
        self.m.trace().re
    }
}

pub fn output_block(params: &ChannelParams, theta: f64, phi: f64) -> OutputBlock {
    let w = 1.0 - params.x() - params.y();
    let (xd, yd) = (params.x_d(), params.y_d());
    let (cs, sn) = (theta.cos(), theta.sin());
    let (c2, s2) = (cs * cs, sn * sn);
    let a = C64::from_polar(w, phi) + C64::from_polar(yd - xd, -phi);
    let m11 = w * c2 + yd * (1.0 + c2) + xd * s2;
    let m22 = w * s2 + yd * (1.0 + s2) + xd * c2;
    let off = a * cr(cs * sn);
    let m = ComplexMatrix::from_row_slice(2, 2, &[cr(m11), off, off.conj(), cr(m22)]);
    let sin2 = (2.0 * theta).sin();
    OutputBlock {
        m,
        a,
        det_phase_free: m11 * m22 - 0.25 * sin2 * sin2 * (w * w + (yd - xd) * (yd - xd)),
        r: 2.0 * s2 * c2 * w * (yd - xd),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum OracleStatus {
    Converged,
    NotConverged,
}

#[derive(Debug, Clone, Copy)]
pub struct OracleOptions {
    pub restarts: usize,
    pub seed: u64,
    /// Haar-random pure states evaluated without the `(theta, phi)` reduction.
    pub sphere_samples: usize,
    /// How many of the best sphere samples get a local refinement.
    pub sphere_refinements: usize,
}

impl Default for OracleOptions {
    fn default() -> Self {
        OracleOptions {
            restarts: 64,
            seed: 0,
            sphere_samples: 1000,
            sphere_refinements: 4,
        }
    }
}

#[derive(Debug, Clone)]
pub struct MinEntropyCandidate {
    /// In `[0, pi/2]`.
    pub theta: f64,
    /// In `[0, 2 pi)`.
    pub phi: f64,
    pub state: PureState,
    pub output_entropy: f64,
    /// Best entropy found on the full sphere (no reduction).
    pub sphere_entropy: f64,
    pub status: OracleStatus,
}

/// Maps any `(theta, phi)` to the equivalent pair in `[0, pi/2] x [0, 2 pi)`.
pub fn canonical_angles(theta: f64, phi: f64) -> (f64, f64) {
    let mut t = theta.rem_euclid(PI);
    let mut p = phi;
    if t > FRAC_PI_2 {
        t = PI - t;
        p += PI;
    }
    (t, p.rem_euclid(2.0 * PI))
}

pub fn min_output_entropy_oracle(
    params: &ChannelParams,
    restarts: usize,
    seed: u64,
) -> MinEntropyCandidate {
    min_output_entropy_oracle_with(
        params,
        &OracleOptions {
            restarts: restarts.max(1),
            seed,
            ..Default::default()
        },
    )
}

/// Multi-start search for the minimum output entropy, over the reduced
/// `(theta, phi)` family and, separately, over the whole unit sphere.
pub fn min_output_entropy_oracle_with(
    params: &ChannelParams,
    opts: &OracleOptions,
) -> MinEntropyCandidate {
    let d = params.d();
    let mut r = rng(opts.seed);
    let nm = NelderMeadOptions {
        initial_step: 0.2,
        f_tol: 1e-15,
        max_iters: 3000,
    };
    let reduced = |v: &[f64]| output_entropy(params, &reduced_state(d, v[0], v[1]));

    let mut best: Option<(Vec<f64>, f64, bool)> = None;
    for _ in 0..opts.restarts.max(1) {
        let start = [
            r.random_range(0.0..FRAC_PI_2),
            r.random_range(0.0..2.0 * PI),
        ];
        let m = nelder_mead(reduced, &start, nm);
        if best.as_ref().is_none_or(|b| m.value < b.1) {
            best = Some((m.x, m.value, m.converged));
        }
    }
    let (x, value, converged) = best.expect("at least one restart");
    let (theta, phi) = canonical_angles(x[0], x[1]);

    let sphere = |v: &[f64]| {
        let amps = ComplexVector::from_fn(d, |i, _| c(v[2 * i], v[2 * i + 1]));
        match PureState::normalized(amps) {
            Ok(psi) => output_entropy(params, &psi),
            Err(_) => f64::INFINITY,
        }
    };
    let mut samples: Vec<(Vec<f64>, f64)> = (0..opts.sphere_samples)
        .map(|_| {
            let psi = random_pure_state(d, &mut r);
            let coords: Vec<f64> = psi.amplitudes().iter().flat_map(|z| [z.re, z.im]).collect();
            let s = output_entropy(params, &psi);
            (coords, s)
        })
        .collect();
    samples.sort_by(|a, b| a.1.total_cmp(&b.1));
    let mut sphere_entropy = samples.first().map_or(f64::INFINITY, |s| s.1);
    let sphere_nm = NelderMeadOptions {
        initial_step: 0.05,
        f_tol: 1e-15,
        max_iters: 20_000,
    };
    for (coords, _) in samples.iter().take(opts.sphere_refinements) {
        let m = nelder_mead(sphere, coords, sphere_nm);
        sphere_entropy = sphere_entropy.min(m.value);
    }

    MinEntropyCandidate {
        theta,
        phi,
        state: reduced_state(d, theta, phi),
        output_entropy: value,
        sphere_entropy,
        status: if converged {
            OracleStatus::Converged
        } else {
            OracleStatus::NotConverged
        },
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ClassicalBranch {
    /// `x <= 1/2`, `x_d > y_d`: `log d + log(1-x-y+y_d+x_d)`
    LowNoiseSymmetric,
    /// `x <= 1/2`, `x_d <= y_d`: `log d + log(1-2x)`
    LowNoisePhiPlus,
    /// `x > 1/2`, `2 > d y_d + 3x - x_d`: `log d + log(1-x-y+y_d+x_d)`
    HighNoiseSymmetric,
    /// `x > 1/2`, `2 <= d y_d + 3x - x_d`: `log d + log(2x-1)`
    HighNoisePhiPlus,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClassicalUpper {
    pub value: f64,
    pub branch: ClassicalBranch,
}

/// `||J^{T_B}||_inf = max{1-x-y+y_d+x_d, |1-2x|}`.
pub fn ptb_operator_norm(params: &ChannelParams) -> f64 {
    (1.0 - params.x() - params.y() + params.y_d() + params.x_d())
        .max((1.0 - 2.0 * params.x()).abs())
}

/// Upper bound `log2(d ||J^{T_B}||_inf)` on the classical capacity, with the
/// branch of the case split that produced it.
pub fn classical_upper(params: &ChannelParams) -> ClassicalUpper {
    let d = params.d() as f64;
    let (x, xd, yd) = (params.x(), params.x_d(), params.y_d());
    let symmetric = 1.0 - x - params.y() + yd + xd;
    let (branch, arg) = if x <= 0.5 {
        if xd > yd {
            (ClassicalBranch::LowNoiseSymmetric, symmetric)
        } else {
            (ClassicalBranch::LowNoisePhiPlus, 1.0 - 2.0 * x)
        }
    } else if 2.0 > d * yd + 3.0 * x - xd {
        (ClassicalBranch::HighNoiseSymmetric, symmetric)
    } else {
        (ClassicalBranch::HighNoisePhiPlus, 2.0 * x - 1.0)
    };
    ClassicalUpper {
        value: d.log2() + arg.log2(),
        branch,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EaCapacity {
    pub value: f64,
    /// Weight of `|phi+>` in `J/d`: `(1-x-y) + 2 y_d / d`.
    pub xi: f64,
}

fn xlog2(coeff: f64, p: f64) -> f64 {
    if coeff == 0.0 || p <= 0.0 {
        0.0
    } else {
        coeff * p.log2()
    }
}

/// Entanglement-assisted classical capacity
/// `2 log d + xi log xi + (d-1)(d+2)/d y_d log(2y_d/d) + (d-1) x_d log(2x_d/d)`.
pub fn ea_capacity(params: &ChannelParams) -> EaCapacity {
    let d = params.d() as f64;
    let (xd, yd) = (params.x_d(), params.y_d());
    let xi = 1.0 - params.x() - params.y() + 2.0 * yd / d;
    let value = 2.0 * d.log2()
        + xlog2(xi, xi)
        + xlog2((d - 1.0) * (d + 2.0) / d * yd, 2.0 * yd / d)
        + xlog2((d - 1.0) * xd, 2.0 * xd / d);
    EaCapacity { value, xi }
}

/// `S(Phi(rho)) - S(Phi^c(rho))`, computed numerically.
pub fn coherent_information(params: &ChannelParams, rho: &DensityMatrix) -> Result<f64> {
    let out = crate::channels::apply_channel(params, rho)?;
    let env = complement_apply(params, rho)?;
    Ok(out.entropy() - env.entropy())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QLower {
    /// Coherent information at `I/d`; may be negative.
    pub raw: f64,
    /// `max(raw, 0)`, the capacity lower bound.
    pub clamped: f64,
}

pub fn q_lower(params: &ChannelParams) -> QLower {
    let raw = ea_capacity(params).value - (params.d() as f64).log2();
    QLower {
        raw,
        clamped: raw.max(0.0),
    }
}

/// Every capacity bound at one parameter point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CapacityReport {
    pub params: ChannelParams,
    pub holevo: f64,
    pub holevo_region: HolevoRegion,
    pub classical_upper: f64,
    pub classical_branch: ClassicalBranch,
    pub ea: f64,
    pub xi: f64,
    pub q_lower_raw: f64,
    pub q_lower: f64,
    pub q_gamma: Option<f64>,
    pub sdp_status: Option<SdpStatus>,
    pub flags: RegionFlags,
}

impl CapacityReport {
    pub fn new(params: &ChannelParams) -> Self {
        let h = holevo(params);
        let cu = classical_upper(params);
        let ea = ea_capacity(params);
        let ql = q_lower(params);
        CapacityReport {
            params: *params,
            holevo: h.value,
            holevo_region: h.region,
            classical_upper: cu.value,
            classical_branch: cu.branch,
            ea: ea.value,
            xi: ea.xi,
            q_lower_raw: ql.raw,
            q_lower: ql.clamped,
            q_gamma: None,
            sdp_status: None,
            flags: region_flags(params),
        }
    }

    pub fn with_q_gamma(mut self, q_gamma: f64, status: SdpStatus) -> Self {
        self.q_gamma = Some(q_gamma);
        self.sdp_status = Some(status);
        self
    }
}
