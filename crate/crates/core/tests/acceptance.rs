//! End-to-end acceptance checks. Each test prints one PASS/FAIL line.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};
use std::time::{Duration, Instant};

use rand::Rng;
use whcap::capacities::{
    classical_upper, conjugate_overlap, ea_capacity, holevo, holevo_formula,
    min_output_entropy_oracle_with, output_entropy, ptb_operator_norm, q_lower, reduced_state,
    ClassicalBranch, HolevoRegion, OracleOptions,
};
use whcap::channels::{covariance_residual, ChannelParams};
use whcap::choi::{
    choi_by_definition, choi_matrix, choi_normalized_spectrum, choi_normalized_spectrum_numeric,
    in_omega, ptb_spectrum, ptb_spectrum_numeric,
};
use whcap::generators::{build_generators, diagonal_part, GeneratorKind};
use whcap::qmat::{
    cr, hermitian_eigenvalues, matrix_entropy, max_abs, random_density, random_haar,
    random_hermitian, rng, HaarKind,
};
use whcap::sdp::{solve_qgamma, sweep_qgamma, SdpSolution, SdpStatus};

const TOL: f64 = 1e-6;

fn p(d: usize, x: f64, y: f64) -> ChannelParams {
    ChannelParams::new(d, x, y).unwrap()
}

/// The `n x n` triangle grid `x, y in {0, 1/(n-1), ..., 1}`, `x + y <= 1`.
fn triangle(d: usize, n: usize) -> Vec<ChannelParams> {
    let h = 1.0 / (n - 1) as f64;
    (0..n)
        .flat_map(|i| (0..n - i).map(move |j| p(d, i as f64 * h, j as f64 * h)))
        .collect()
}

fn random_point(d: usize, r: &mut impl Rng) -> ChannelParams {
    loop {
        let (x, y): (f64, f64) = (r.random(), r.random());
        if x + y <= 1.0 {
            return p(d, x, y);
        }
    }
}

fn report(n: u32, name: &str, ok: bool, detail: String, elapsed: Duration) {
    println!(
        "[{n:>2}] {} {name}: {detail} ({elapsed:.2?})",
        if ok { "PASS" } else { "FAIL" }
    );
}

#[test]
fn c01_induction_identity() {
    let t = Instant::now();
    let mut r = rng(2024);
    let mut worst = 0.0_f64;
    for d in 2..=9 {
        let g = build_generators(d, GeneratorKind::AZero).unwrap();
        for _ in 0..100 {
            let x = random_hermitian(d, &mut r);
            let want = (diagonal_part(&x) - &x * cr(1.0 / d as f64)) * cr(2.0);
            worst = worst.max(max_abs(&(g.conjugation_sum(&x) - want)));
        }
    }
    let el = t.elapsed();
    let ok = worst < 1e-12 && el < Duration::from_secs(5);
    report(
        1,
        "induction identity",
        ok,
        format!("max deviation {worst:.2e}"),
        el,
    );
    assert!(ok);
}

#[test]
fn c02_closed_form_spectra() {
    let t = Instant::now();
    let mut worst = 0.0_f64;
    for d in 2..=7 {
        for q in triangle(d, 21) {
            worst = worst.max(ptb_spectrum(&q).max_deviation(&ptb_spectrum_numeric(&q)));
            worst = worst.max(
                choi_normalized_spectrum(&q).max_deviation(&choi_normalized_spectrum_numeric(&q)),
            );
        }
    }
    let el = t.elapsed();
    let ok = worst < 1e-10 && el < Duration::from_secs(120);
    report(
        2,
        "closed-form spectra",
        ok,
        format!("max deviation {worst:.2e}"),
        el,
    );
    assert!(ok);
}

#[test]
fn c03_holevo_oracle() {
    let t = Instant::now();
    let mut r = rng(31);
    let mut worst_reduced = 0.0_f64;
    let mut worst_sphere_gap = 0.0_f64;
    let mut worst_structure = 0.0_f64;
    let mut structured = 0;
    let mut failures = Vec::new();
    for d in 2..=4 {
        for k in 0..50 {
            let q = random_point(d, &mut r);
            let opts = OracleOptions {
                restarts: 64,
                seed: 1000 * d as u64 + k,
                ..Default::default()
            };
            let m = min_output_entropy_oracle_with(&q, &opts);
            let h = holevo(&q);
            let s_min = (d as f64).log2() - h.value;
            let dev = (m.output_entropy - s_min).abs();
            worst_reduced = worst_reduced.max(dev);
            // Nothing on the full sphere beats the formula, and the sphere search finds it.
            let below = s_min - m.sphere_entropy;
            worst_sphere_gap = worst_sphere_gap.max(below.abs());
            if dev > 1e-6 || below > 1e-6 || below < -1e-4 {
                failures.push(format!("{q:?}: reduced {dev:.2e}, sphere {below:.2e}"));
            }

            let w = 1.0 - q.x() - q.y();
            if (q.y_d() - q.x_d()).abs() < 1e-3 || w < 1e-3 {
                continue;
            }
            structured += 1;
            let s = match h.region {
                HolevoRegion::A => {
                    // Minimizers are real up to phase; every (theta, 0) attains the minimum.
                    let flat = (0..12)
                        .map(|i| {
                            (output_entropy(
                                &q,
                                &reduced_state(d, i as f64 * FRAC_PI_2 / 11.0, 0.0),
                            ) - s_min)
                                .abs()
                        })
                        .fold(0.0, f64::max);
                    (1.0 - conjugate_overlap(&m.state)).max(flat / 1e-3)
                }
                HolevoRegion::B => {
                    ((m.theta - FRAC_PI_4).abs()).max(((2.0 * m.phi).cos() + 1.0).abs())
                }
                HolevoRegion::Line => 0.0,
            };
            worst_structure = worst_structure.max(s);
            if s > 1e-3 {
                failures.push(format!(
                    "{q:?}: structure {s:.2e} region {:?} theta {} phi {}",
                    h.region, m.theta, m.phi
                ));
            }
        }
    }
    let el = t.elapsed();
    let ok = failures.is_empty() && el < Duration::from_secs(300);
    report(
        3,
        "Holevo oracle",
        ok,
        format!(
            "reduced {worst_reduced:.2e}, sphere {worst_sphere_gap:.2e}, structure {worst_structure:.2e} over {structured} points"
        ),
        el,
    );
    assert!(ok, "{failures:#?}");
}

#[test]
fn c04_holevo_continuity() {
    let t = Instant::now();
    let mut worst = 0.0_f64;
    for d in 2..=9 {
        let df = d as f64;
        // y_d = x_d  <=>  y = x (d+1)/(d-1), inside the triangle for x <= (d-1)/(2d)
        let x_max = (df - 1.0) / (2.0 * df);
        for i in 0..=200 {
            let x = x_max * i as f64 / 200.0;
            let q = p(d, x, (x * (df + 1.0) / (df - 1.0)).min(1.0 - x));
            worst = worst.max(
                (holevo_formula(&q, HolevoRegion::A) - holevo_formula(&q, HolevoRegion::B)).abs(),
            );
        }
        for i in 0..=200 {
            let x = i as f64 / 200.0;
            let q = p(d, x, 1.0 - x);
            let line = holevo_formula(&q, HolevoRegion::Line);
            worst = worst.max((holevo_formula(&q, HolevoRegion::A) - line).abs());
            worst = worst.max((holevo_formula(&q, HolevoRegion::B) - line).abs());
        }
    }
    let el = t.elapsed();
    let ok = worst < 1e-9;
    report(
        4,
        "Holevo continuity",
        ok,
        format!("max jump {worst:.2e}"),
        el,
    );
    assert!(ok);
}

#[test]
fn c05_ea_identity() {
    let t = Instant::now();
    let mut worst = 0.0_f64;
    for d in 2..=7 {
        for q in triangle(d, 21) {
            let s = matrix_entropy(&choi_by_definition(&q).normalized()).unwrap();
            worst = worst.max((ea_capacity(&q).value - (2.0 * (d as f64).log2() - s)).abs());
        }
    }
    let exact = (2..=9).all(|d| ea_capacity(&p(d, 0.0, 0.0)).value == 2.0 * (d as f64).log2());
    let td = (ea_capacity(&p(3, 1.0, 0.0)).value - 3f64.log2()).abs();
    let el = t.elapsed();
    let ok = worst < 1e-10 && exact && td < 1e-10;
    report(
        5,
        "EA identity",
        ok,
        format!("grid {worst:.2e}, identity exact {exact}, transpose map {td:.2e}"),
        el,
    );
    assert!(ok);
}

#[test]
fn c06_zero_capacity_region() {
    let t = Instant::now();
    let mut mismatches = Vec::new();
    let mut checked = 0;
    for d in 2..=7 {
        for q in triangle(d, 81).into_iter().filter(|q| q.x() <= 0.5) {
            let closed = ptb_spectrum(&q).min() >= -1e-12;
            let numeric_min = ptb_spectrum_numeric(&q).min();
            checked += 1;
            if in_omega(&q) != closed {
                mismatches.push(format!("{q:?} closed form"));
            }
            if numeric_min.abs() > 1e-9 && in_omega(&q) != (numeric_min >= 0.0) {
                mismatches.push(format!("{q:?} numeric {numeric_min:.3e}"));
            }
            if d == 2 && in_omega(&q) != (q.x() + 2.0 * q.y() / 3.0 >= 0.5 - 1e-12) {
                mismatches.push(format!("{q:?} qubit boundary"));
            }
        }
    }
    let el = t.elapsed();
    let ok = mismatches.is_empty();
    report(
        6,
        "zero-capacity region",
        ok,
        format!("{checked} points, {} mismatches", mismatches.len()),
        el,
    );
    assert!(ok, "{mismatches:#?}");
}

fn omega_samples(d: usize, n: usize, r: &mut impl Rng) -> Vec<ChannelParams> {
    let mut out = Vec::new();
    while out.len() < n {
        let q = random_point(d, r);
        if in_omega(&q) {
            out.push(q);
        }
    }
    out
}

#[test]
fn c07_sdp() {
    let mut failures = Vec::new();
    let mut worst_gap = 0.0_f64;
    let mut note = |s: &SdpSolution, what: String, failures: &mut Vec<String>| {
        if s.status != SdpStatus::Optimal {
            failures.push(format!("{what}: status {:?}", s.status));
        } else {
            worst_gap = worst_gap.max(s.duality_gap.abs());
            if s.duality_gap.abs() >= 1e-6 {
                failures.push(format!("{what}: gap {:.2e}", s.duality_gap));
            }
        }
    };

    let t = Instant::now();
    for d in 2..=3 {
        let s = solve_qgamma(&ChannelParams::identity(d), TOL, 200);
        if (s.q_gamma - (d as f64).log2()).abs() >= 1e-5 {
            failures.push(format!("identity d={d}: {}", s.q_gamma));
        }
        note(&s, format!("identity d={d}"), &mut failures);
    }
    let mut r = rng(77);
    let mut worst_zero = 0.0_f64;
    for d in 2..=3 {
        for q in omega_samples(d, 50, &mut r) {
            let s = solve_qgamma(&q, TOL, 200);
            worst_zero = worst_zero.max(s.q_gamma);
            if s.q_gamma >= 1e-4 || s.optimal_value > 1.0 + 100.0 * TOL {
                failures.push(format!("{q:?}: q_gamma {}", s.q_gamma));
            }
            note(&s, format!("{q:?}"), &mut failures);
        }
    }

    let single = Instant::now();
    let s = solve_qgamma(&p(3, 0.7, 0.1), TOL, 200);
    let single = single.elapsed();
    note(&s, "single d=3".into(), &mut failures);
    if single >= Duration::from_secs(10) {
        failures.push(format!("single d=3 solve took {single:?}"));
    }

    let sweep_t = Instant::now();
    let grid: Vec<(f64, f64)> = (0..20)
        .flat_map(|i| (0..20).map(move |j| (i as f64 / 19.0, j as f64 / 19.0)))
        .filter(|(x, y)| x + y <= 1.0 + 1e-12)
        .collect();
    let sols = sweep_qgamma(3, &grid, TOL, 0).unwrap();
    for (s, (x, y)) in sols.iter().zip(&grid) {
        note(s, format!("sweep ({x}, {y})"), &mut failures);
    }
    let sweep_el = sweep_t.elapsed();
    if sweep_el >= Duration::from_secs(1800) {
        failures.push(format!("20x20 sweep took {sweep_el:?}"));
    }
    let ok = failures.is_empty();
    report(
        7,
        "SDP",
        ok,
        format!(
            "max q_gamma in omega {worst_zero:.2e}, max gap {worst_gap:.2e}, single solve {single:.2?}, sweep of {} points {sweep_el:.2?}",
            grid.len()
        ),
        t.elapsed(),
    );
    assert!(ok, "{failures:#?}");
}

#[test]
fn c08_ordering() {
    let t = Instant::now();
    let mut failures = Vec::new();
    for d in 2..=9 {
        for q in triangle(d, 21) {
            if holevo(&q).value > classical_upper(&q).value + 1e-9 {
                failures.push(format!("{q:?}: holevo above classical upper"));
            }
        }
    }
    let mut solved = 0;
    for d in 2..=4 {
        for q in triangle(d, 11) {
            let s = solve_qgamma(&q, TOL, 200);
            if s.status == SdpStatus::Optimal {
                solved += 1;
                if q_lower(&q).clamped > s.q_gamma + 1e-4 {
                    failures.push(format!(
                        "{q:?}: q_lower {} above q_gamma {}",
                        q_lower(&q).clamped,
                        s.q_gamma
                    ));
                }
            }
        }
    }
    let ok = failures.is_empty();
    report(
        8,
        "ordering",
        ok,
        format!("{solved} optimal SDP points"),
        t.elapsed(),
    );
    assert!(ok, "{failures:#?}");
}

fn branch_value(q: &ChannelParams, branch: ClassicalBranch) -> f64 {
    let d = q.d() as f64;
    let (x, y, xd, yd) = (q.x(), q.y(), q.x_d(), q.y_d());
    let arg = match branch {
        ClassicalBranch::LowNoiseSymmetric | ClassicalBranch::HighNoiseSymmetric => {
            1.0 - x - y + yd + xd
        }
        ClassicalBranch::LowNoisePhiPlus => 1.0 - 2.0 * x,
        ClassicalBranch::HighNoisePhiPlus => 2.0 * x - 1.0,
    };
    d.log2() + arg.log2()
}

fn expected_branch(q: &ChannelParams) -> ClassicalBranch {
    let d = q.d() as f64;
    match (
        q.x() <= 0.5,
        q.x_d() > q.y_d(),
        2.0 > d * q.y_d() + 3.0 * q.x() - q.x_d(),
    ) {
        (true, true, _) => ClassicalBranch::LowNoiseSymmetric,
        (true, false, _) => ClassicalBranch::LowNoisePhiPlus,
        (false, _, true) => ClassicalBranch::HighNoiseSymmetric,
        (false, _, false) => ClassicalBranch::HighNoisePhiPlus,
    }
}

/// `||J(a) - J(b)||_inf`
fn choi_distance(a: &ChannelParams, b: &ChannelParams) -> f64 {
    let diff = choi_matrix(a).matrix.matrix() - choi_matrix(b).matrix.matrix();
    hermitian_eigenvalues(&diff)
        .into_iter()
        .fold(0.0, |m, v| m.max(v.abs()))
}

#[test]
fn c09_figure_curves() {
    let t = Instant::now();
    let mut failures = Vec::new();
    let mut points = 0;
    let mut zero_points = 0;
    for d in [3, 5, 7, 9] {
        let df = d as f64;
        for yi in 0..=4 {
            let y = 0.2 * yi as f64;
            let xs: Vec<f64> = (0..=10)
                .map(|i| i as f64 / 10.0)
                .filter(|x| x + y <= 1.0 + 1e-12)
                .collect();
            let grid: Vec<(f64, f64)> = xs.iter().map(|&x| (x, y)).collect();
            let sols = sweep_qgamma(d, &grid, TOL, 0).unwrap();
            let params: Vec<ChannelParams> = grid.iter().map(|&(x, y)| p(d, x, y)).collect();

            for (q, s) in params.iter().zip(&sols) {
                points += 1;
                let cu = classical_upper(q);
                if cu.branch != expected_branch(q) || cu.value != branch_value(q, cu.branch) {
                    failures.push(format!("{q:?}: classical upper branch"));
                }
                if (cu.value - (df * ptb_operator_norm(q)).log2()).abs() > 1e-12 {
                    failures.push(format!("{q:?}: classical upper norm"));
                }
                if s.status != SdpStatus::Optimal {
                    failures.push(format!("{q:?}: status {:?}", s.status));
                    continue;
                }
                if in_omega(q) {
                    zero_points += 1;
                    if s.q_gamma >= 1e-4 {
                        failures.push(format!("{q:?}: q_gamma {} inside omega", s.q_gamma));
                    }
                } else {
                    // R^{T_B} = (I - v v')/d with v the most negative eigenvector of J^{T_B} is feasible.
                    let lam = ptb_spectrum(q).min();
                    let floor = (1.0 - lam / df).log2();
                    if !(s.q_gamma > 0.0 && s.q_gamma >= floor - 1e-6) {
                        failures.push(format!(
                            "{q:?}: q_gamma {} outside omega, floor {floor}",
                            s.q_gamma
                        ));
                    }
                }
            }

            for k in 1..params.len() {
                let (a, b) = (&params[k - 1], &params[k]);
                let (va, vb) = (sols[k - 1].optimal_value, sols[k].optimal_value);
                if (va - vb).abs() > df * choi_distance(a, b) + 2.0 * TOL {
                    failures.push(format!("q_gamma jump between {a:?} and {b:?}"));
                }
                // Dense resampling of the classical bound between grid points.
                let fine: Vec<f64> = (0..=50)
                    .map(|i| {
                        let x = a.x() + (b.x() - a.x()) * i as f64 / 50.0;
                        classical_upper(&p(d, x, y)).value
                    })
                    .collect();
                let jump = fine
                    .windows(2)
                    .map(|w| (w[1] - w[0]).abs())
                    .fold(0.0, f64::max);
                if jump > 0.05 {
                    failures.push(format!(
                        "classical upper jump {jump} between {a:?} and {b:?}"
                    ));
                }
            }
        }
    }
    let ok = failures.is_empty();
    report(
        9,
        "figure curves",
        ok,
        format!("{points} points, {zero_points} inside omega"),
        t.elapsed(),
    );
    assert!(ok, "{failures:#?}");
}

#[test]
fn c10_covariance() {
    let t = Instant::now();
    let mut r = rng(10);
    let mut worst_orth = 0.0_f64;
    let mut worst_line = 0.0_f64;
    let mut min_off = f64::INFINITY;
    for d in 2..=6 {
        for q in triangle(d, 11) {
            let rho = random_density(d, &mut r);
            let o = random_haar(d, HaarKind::Orthogonal, r.random()).unwrap();
            worst_orth = worst_orth.max(covariance_residual(&q, &o, &rho).unwrap());
        }
        for i in 0..=10 {
            let x = i as f64 / 10.0;
            let rho = random_density(d, &mut r);
            let u = random_haar(d, HaarKind::Unitary, r.random()).unwrap();
            worst_line = worst_line.max(covariance_residual(&p(d, x, 1.0 - x), &u, &rho).unwrap());
        }
    }
    for seed in 0..100u64 {
        let mut rs = rng(seed);
        let d = 2 + (seed % 5) as usize;
        let q = loop {
            let q = random_point(d, &mut rs);
            if q.x() + q.y() <= 0.9 {
                break q;
            }
        };
        let rho = random_density(d, &mut rs);
        let u = random_haar(d, HaarKind::Unitary, seed).unwrap();
        min_off = min_off.min(covariance_residual(&q, &u, &rho).unwrap());
    }
    let ok = worst_orth < 1e-10 && worst_line < 1e-10 && min_off > 1e-6;
    report(
        10,
        "covariance",
        ok,
        format!("orthogonal {worst_orth:.2e}, unitary on line {worst_line:.2e}, min unitary off line {min_off:.2e}"),
        t.elapsed(),
    );
    assert!(ok);
}
