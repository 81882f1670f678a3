//! Self-checks comparing closed forms against independent numerics.

use std::fmt;
use std::str::FromStr;
use std::time::{Duration, Instant};

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::capacities::{
    ea_capacity, holevo, min_output_entropy_oracle_with, q_lower, OracleOptions,
};
use crate::channels::{
    apply_constituent_linear, apply_linear, covariance_residual, kraus_set, map_spectrum,
    superoperator_matrix, ChannelParams, ConstituentKind,
};
use crate::choi::{
    choi_from_map, choi_normalized_spectrum, choi_normalized_spectrum_numeric, in_omega, is_ppt,
    ptb_spectrum, ptb_spectrum_numeric,
};
use crate::error::{Error, Result};
use crate::generators::{build_generators, diagonal_part, GeneratorKind};
use crate::qmat::{
    cr, haar_with_rng, hermitian_eig, matrix_entropy, max_abs, random_density, random_hermitian,
    rng, HaarKind,
};
use crate::sdp::{solve_qgamma, SdpStatus};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VerifyLevel {
    Fast,
    Full,
}

impl FromStr for VerifyLevel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "fast" => Ok(VerifyLevel::Fast),
            "full" => Ok(VerifyLevel::Full),
            _ => Err(Error::InvalidArgument(format!(
                "unknown verify level '{s}'"
            ))),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SuiteResult {
    pub name: &'static str,
    pub passed: bool,
    /// Largest observed deviation, in the suite's own units.
    pub worst: f64,
    pub tolerance: f64,
    pub checks: usize,
    pub elapsed: Duration,
    /// First failing case, if any.
    pub failure: Option<String>,
}

impl fmt::Display for SuiteResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} {:<22} checks={:<5} worst={:.3e} tol={:.0e} ({:.2?})",
            if self.passed { "PASS" } else { "FAIL" },
            self.name,
            self.checks,
            self.worst,
            self.tolerance,
            self.elapsed
        )?;
        if let Some(msg) = &self.failure {
            write!(f, ": {msg}")?;
        }
        Ok(())
    }
}

/// Accumulates worst-case deviations for one suite.
struct Suite {
    name: &'static str,
    tol: f64,
    worst: f64,
    checks: usize,
    failure: Option<String>,
    start: Instant,
}

impl Suite {
    fn new(name: &'static str, tol: f64) -> Self {
        Suite {
            name,
            tol,
            worst: 0.0,
            checks: 0,
            failure: None,
            start: Instant::now(),
        }
    }

    fn deviation(&mut self, dev: f64, what: impl FnOnce() -> String) {
        self.checks += 1;
        if dev.is_nan() || dev > self.worst {
            self.worst = if dev.is_nan() { f64::INFINITY } else { dev };
        }
        if !(dev <= self.tol) && self.failure.is_none() {
            self.failure = Some(format!("{} (deviation {dev:.3e})", what()));
        }
    }

    fn holds(&mut self, ok: bool, what: impl FnOnce() -> String) {
        self.deviation(if ok { 0.0 } else { f64::INFINITY }, what);
    }

    fn finish(self) -> SuiteResult {
        SuiteResult {
            name: self.name,
            passed: self.failure.is_none(),
            worst: self.worst,
            tolerance: self.tol,
            checks: self.checks,
            elapsed: self.start.elapsed(),
            failure: self.failure,
        }
    }
}

struct Plan {
    dims: Vec<usize>,
    samples: usize,
    grid: usize,
    holevo_points: usize,
    sphere_samples: usize,
    sdp_points: usize,
}

impl Plan {
    fn new(level: VerifyLevel) -> Self {
        match level {
            VerifyLevel::Fast => Plan {
                dims: vec![2, 3, 4],
                samples: 5,
                grid: 6,
                holevo_points: 3,
                sphere_samples: 200,
                sdp_points: 3,
            },
            VerifyLevel::Full => Plan {
                dims: (2..=7).collect(),
                samples: 100,
                grid: 21,
                holevo_points: 20,
                sphere_samples: 1000,
                sdp_points: 20,
            },
        }
    }
}

fn random_params(d: usize, r: &mut ChaCha8Rng) -> ChannelParams {
    loop {
        let x: f64 = r.random();
        let y: f64 = r.random();
        if x + y <= 1.0 {
            return ChannelParams::new(d, x, y).expect("inside the triangle");
        }
    }
}

fn triangle(d: usize, n: usize) -> Vec<ChannelParams> {
    let mut out = Vec::new();
    let step = 1.0 / (n - 1) as f64;
    for i in 0..n {
        for j in 0..n - i {
            out.push(
                ChannelParams::new(d, i as f64 * step, j as f64 * step)
                    .expect("grid inside the triangle"),
            );
        }
    }
    out
}

fn induction(plan: &Plan, r: &mut ChaCha8Rng) -> SuiteResult {
    let mut s = Suite::new("induction_identity", 1e-12);
    for &d in &plan.dims {
        let g = build_generators(d, GeneratorKind::AZero).expect("d >= 2");
        for _ in 0..plan.samples {
            let x = random_hermitian(d, r);
            let want = (diagonal_part(&x) - &x * cr(1.0 / d as f64)) * cr(2.0);
            s.deviation(max_abs(&(g.conjugation_sum(&x) - want)), || {
                format!("d={d}")
            });
        }
    }
    s.finish()
}

fn kraus(plan: &Plan, r: &mut ChaCha8Rng) -> SuiteResult {
    let mut s = Suite::new("kraus_completeness", 1e-12);
    for &d in &plan.dims {
        for _ in 0..plan.samples {
            let p = random_params(d, r);
            let fam = kraus_set(&p);
            s.deviation(fam.completeness_residual(), || {
                format!("{p:?} completeness")
            });
            let rho = random_density(d, r);
            let dev = max_abs(&(fam.apply(rho.matrix()) - apply_linear(&p, rho.matrix())));
            s.deviation(dev, || format!("{p:?} action"));
        }
    }
    s.finish()
}

fn covariance(plan: &Plan, r: &mut ChaCha8Rng) -> SuiteResult {
    let mut s = Suite::new("covariance", 1e-10);
    for &d in &plan.dims {
        for _ in 0..plan.samples {
            let p = random_params(d, r);
            let rho = random_density(d, r);
            let o = haar_with_rng(d, HaarKind::Orthogonal, r).expect("d >= 1");
            let res = covariance_residual(&p, &o, &rho).expect("valid unitary");
            s.deviation(res, || format!("{p:?} orthogonal"));
            let t: f64 = r.random();
            let line = ChannelParams::new(d, t, 1.0 - t).expect("on the line");
            let u = haar_with_rng(d, HaarKind::Unitary, r).expect("d >= 1");
            let res = covariance_residual(&line, &u, &rho).expect("valid unitary");
            s.deviation(res, || format!("{line:?} unitary"));
        }
    }
    s.finish()
}

fn spectra(plan: &Plan) -> SuiteResult {
    let mut s = Suite::new("spectra", 1e-10);
    for &d in &plan.dims {
        for p in triangle(d, plan.grid) {
            s.deviation(
                ptb_spectrum(&p).max_deviation(&ptb_spectrum_numeric(&p)),
                || format!("{p:?} ptb"),
            );
            let dev =
                choi_normalized_spectrum(&p).max_deviation(&choi_normalized_spectrum_numeric(&p));
            s.deviation(dev, || format!("{p:?} choi"));
        }
        if d <= 5 {
            for p in triangle(d, 4) {
                let sup = superoperator_matrix(d, |m| apply_linear(&p, m));
                let num = hermitian_eig(&sup).expect("symmetric superoperator");
                s.deviation(num.max_deviation(&map_spectrum(&p)), || {
                    format!("{p:?} map")
                });
            }
        }
    }
    s.finish()
}

fn holevo_oracle(plan: &Plan, seed: u64, r: &mut ChaCha8Rng) -> SuiteResult {
    let mut s = Suite::new("holevo_oracle", 1e-6);
    for &d in plan.dims.iter().filter(|&&d| d <= 4) {
        for k in 0..plan.holevo_points {
            let p = random_params(d, r);
            let opts = OracleOptions {
                restarts: 16,
                seed: seed ^ ((d as u64) << 32) ^ k as u64,
                sphere_samples: plan.sphere_samples,
                sphere_refinements: 2,
            };
            let m = min_output_entropy_oracle_with(&p, &opts);
            let closed = (d as f64).log2() - holevo(&p).value;
            s.deviation((m.output_entropy - closed).abs(), || {
                format!("{p:?} reduced search")
            });
            s.deviation((closed - m.sphere_entropy).max(0.0), || {
                format!("{p:?} full sphere beat the formula")
            });
        }
    }
    s.finish()
}

/// `2 log2 d - S(J/d)` with `J` built from the constituent maps.
fn ea_oracle(p: &ChannelParams) -> f64 {
    let d = p.d();
    let w = 1.0 - p.x() - p.y();
    let j = choi_from_map(d, |m| {
        m * cr(w)
            + apply_constituent_linear(ConstituentKind::Minus, d, m) * cr(p.x())
            + apply_constituent_linear(ConstituentKind::PlusFull, d, m) * cr(p.y())
    });
    2.0 * (d as f64).log2() - matrix_entropy(&(j * cr(1.0 / d as f64))).expect("Choi state")
}

fn ea_identity(plan: &Plan, formula: &dyn Fn(&ChannelParams) -> f64) -> SuiteResult {
    let mut s = Suite::new("ea_identity", 1e-10);
    for &d in plan.dims.iter().filter(|&&d| d <= 5) {
        for p in triangle(d, plan.grid.min(11)) {
            s.deviation((formula(&p) - ea_oracle(&p)).abs(), || format!("{p:?}"));
        }
    }
    s.finish()
}

fn ppt_region(plan: &Plan) -> SuiteResult {
    let mut s = Suite::new("ppt_omega", 0.0);
    for &d in &plan.dims {
        for p in triangle(d, 2 * plan.grid + 1) {
            let numeric_ppt = ptb_spectrum_numeric(&p).min() >= -1e-10;
            let (omega, ppt) = (in_omega(&p), is_ppt(&p));
            s.holds(omega == ppt, || format!("{p:?} omega={omega} ppt={ppt}"));
            // Only points clear of the boundary are compared with the numerics.
            let margin = ptb_spectrum(&p).min().abs() > 1e-8;
            s.holds(!margin || numeric_ppt == ppt, || {
                format!("{p:?} numeric PPT disagrees")
            });
        }
    }
    s.finish()
}

fn sdp(plan: &Plan, r: &mut ChaCha8Rng) -> SuiteResult {
    let tol = 1e-6;
    let mut s = Suite::new("sdp_feasibility", 10.0 * tol);
    for &d in plan.dims.iter().filter(|&&d| d <= 3) {
        let mut points = vec![ChannelParams::identity(d)];
        points.extend((0..plan.sdp_points).map(|_| random_params(d, r)));
        for p in points {
            let sol = solve_qgamma(&p, tol, 200);
            s.holds(sol.status == SdpStatus::Optimal, || {
                format!("{p:?} status {:?}", sol.status)
            });
            s.deviation(sol.feasibility.max_violation(true), || {
                format!("{p:?} infeasible")
            });
            s.deviation(sol.duality_gap.abs() / 10.0, || {
                format!("{p:?} duality gap")
            });
            s.deviation((q_lower(&p).clamped - sol.q_gamma - 1e-4).max(0.0), || {
                format!("{p:?} below q_lower")
            });
            if in_omega(&p) {
                s.deviation(sol.q_gamma.max(0.0), || {
                    format!("{p:?} nonzero inside omega")
                });
            }
        }
    }
    s.finish()
}

/// Runs every suite.
pub fn run_verify(level: VerifyLevel, seed: u64) -> Vec<SuiteResult> {
    run_verify_with(level, seed, &|p| ea_capacity(p).value)
}

/// As [`run_verify`], checking `ea_formula` in place of the library's
/// entanglement-assisted capacity.
pub fn run_verify_with(
    level: VerifyLevel,
    seed: u64,
    ea_formula: &dyn Fn(&ChannelParams) -> f64,
) -> Vec<SuiteResult> {
    let plan = Plan::new(level);
    let mut r = rng(seed);
    vec![
        induction(&plan, &mut r),
        kraus(&plan, &mut r),
        covariance(&plan, &mut r),
        spectra(&plan),
        holevo_oracle(&plan, seed, &mut r),
        ea_identity(&plan, ea_formula),
        ppt_region(&plan),
        sdp(&plan, &mut r),
    ]
}
