//! Parameter grids, per-point reports and fixed-precision CSV output.

use std::fmt;
use std::io::Write;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::capacities::CapacityReport;
use crate::channels::{map_eigenvalue_antisymmetric, map_eigenvalue_symmetric, ChannelParams};
use crate::error::{Error, Result};
use crate::sdp::{solve_qgamma_with, QGammaOptions};

/// Points with `x + y` above `1 + TRIANGLE_SLACK` are dropped from grids.
pub const TRIANGLE_SLACK: f64 = 1e-12;

pub const CSV_HEADER: [&str; 12] = [
    "d",
    "x",
    "y",
    "holevo",
    "holevo_region",
    "classical_upper",
    "ea",
    "q_lower_raw",
    "q_lower",
    "q_gamma",
    "ppt",
    "omega",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Quantity {
    Holevo,
    ClassicalUpper,
    Ea,
    QLower,
    QGamma,
    Ppt,
    Omega,
    MapSpectrum,
}

impl Quantity {
    pub const ALL: [Quantity; 8] = [
        Quantity::Holevo,
        Quantity::ClassicalUpper,
        Quantity::Ea,
        Quantity::QLower,
        Quantity::QGamma,
        Quantity::Ppt,
        Quantity::Omega,
        Quantity::MapSpectrum,
    ];

    /// Everything with a closed form.
    pub const CLOSED_FORM: [Quantity; 6] = [
        Quantity::Holevo,
        Quantity::ClassicalUpper,
        Quantity::Ea,
        Quantity::QLower,
        Quantity::Ppt,
        Quantity::Omega,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Quantity::Holevo => "holevo",
            Quantity::ClassicalUpper => "classical_upper",
            Quantity::Ea => "ea",
            Quantity::QLower => "q_lower",
            Quantity::QGamma => "q_gamma",
            Quantity::Ppt => "ppt",
            Quantity::Omega => "omega",
            Quantity::MapSpectrum => "map_spectrum",
        }
    }
}

impl fmt::Display for Quantity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Quantity {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Quantity::ALL
            .into_iter()
            .find(|q| q.name() == s)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown quantity '{s}'")))
    }
}

/// Parses a comma-separated quantity list; duplicates are ignored.
pub fn parse_quantities(s: &str) -> Result<Vec<Quantity>> {
    let mut out: Vec<Quantity> = s
        .split(',')
        .map(|t| t.trim().parse())
        .collect::<Result<_>>()?;
    out.sort();
    out.dedup();
    Ok(out)
}

/// `steps` evenly spaced values from `min` to `max` inclusive.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Range {
    pub min: f64,
    pub max: f64,
    pub steps: usize,
}

impl Range {
    pub fn new(min: f64, max: f64, steps: usize) -> Result<Self> {
        if steps == 0 {
            return Err(Error::InvalidArgument(
                "range needs at least one step".into(),
            ));
        }
        if !min.is_finite() || !max.is_finite() {
            return Err(Error::InvalidArgument("range bounds must be finite".into()));
        }
        if max < min {
            return Err(Error::InvalidArgument(format!(
                "range max {max} is below min {min}"
            )));
        }
        Ok(Range { min, max, steps })
    }

    pub fn single(v: f64) -> Self {
        Range {
            min: v,
            max: v,
            steps: 1,
        }
    }

    pub fn values(&self) -> Vec<f64> {
        if self.steps == 1 {
            return vec![self.min];
        }
        let span = self.max - self.min;
        let last = (self.steps - 1) as f64;
        (0..self.steps)
            .map(|i| {
                if i + 1 == self.steps {
                    self.max
                } else {
                    self.min + span * i as f64 / last
                }
            })
            .collect()
    }
}

impl FromStr for Range {
    type Err = Error;

    /// `a:b:n`
    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split(':').collect();
        let bad = || Error::InvalidArgument(format!("range '{s}' is not of the form a:b:n"));
        if parts.len() != 3 {
            return Err(bad());
        }
        let a: f64 = parts[0].trim().parse().map_err(|_| bad())?;
        let b: f64 = parts[1].trim().parse().map_err(|_| bad())?;
        let n: usize = parts[2].trim().parse().map_err(|_| bad())?;
        Range::new(a, b, n)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub d: usize,
    pub x_range: Range,
    pub y_range: Range,
    pub quantities: Vec<Quantity>,
    pub tol: f64,
    pub seed: u64,
    pub drop_r_psd: bool,
}

impl SweepSpec {
    pub fn new(d: usize, x_range: Range, y_range: Range) -> Self {
        SweepSpec {
            d,
            x_range,
            y_range,
            quantities: Quantity::CLOSED_FORM.to_vec(),
            tol: 1e-6,
            seed: 0,
            drop_r_psd: false,
        }
    }

    pub fn wants(&self, q: Quantity) -> bool {
        self.quantities.contains(&q)
    }

    /// Grid points in `x`-major order, and how many fell outside the triangle.
    pub fn grid(&self) -> (Vec<(f64, f64)>, usize) {
        let ys = self.y_range.values();
        let mut kept = Vec::new();
        let mut dropped = 0;
        for x in self.x_range.values() {
            for &y in &ys {
                if x + y <= 1.0 + TRIANGLE_SLACK {
                    kept.push((x, y));
                } else {
                    dropped += 1;
                }
            }
        }
        (kept, dropped)
    }
}

/// One evaluated grid point.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub report: CapacityReport,
    /// `(s_plus, s_minus)`, the nontrivial eigenvalues of the map.
    pub map_spectrum: Option<(f64, f64)>,
}

pub fn evaluate_point(
    params: &ChannelParams,
    quantities: &[Quantity],
    sdp: &QGammaOptions,
) -> SweepRow {
    let mut report = CapacityReport::new(params);
    if quantities.contains(&Quantity::QGamma) {
        let s = solve_qgamma_with(params, sdp);
        report = report.with_q_gamma(s.q_gamma, s.status);
    }
    let map_spectrum = quantities.contains(&Quantity::MapSpectrum).then(|| {
        (
            map_eigenvalue_symmetric(params),
            map_eigenvalue_antisymmetric(params),
        )
    });
    SweepRow {
        report,
        map_spectrum,
    }
}

#[derive(Debug, Clone)]
pub struct SweepOutput {
    pub rows: Vec<SweepRow>,
    /// Grid points outside the triangle.
    pub filtered: usize,
}

/// Evaluates every grid point in parallel; rows come back in grid order.
pub fn run_sweep(spec: &SweepSpec) -> Result<SweepOutput> {
    let (grid, filtered) = spec.grid();
    let params = grid
        .iter()
        .map(|&(x, y)| ChannelParams::new(spec.d, x, y))
        .collect::<Result<Vec<_>>>()?;
    let sdp = QGammaOptions {
        tol: spec.tol,
        drop_r_psd: spec.drop_r_psd,
        ..Default::default()
    };
    let rows = params
        .par_iter()
        .map(|p| evaluate_point(p, &spec.quantities, &sdp))
        .collect();
    Ok(SweepOutput { rows, filtered })
}

/// `printf("%.12g")` formatting, with `-0` printed as `0`.
pub fn format_g12(v: f64) -> String {
    const P: i32 = 12;
    if v.is_nan() {
        return "nan".into();
    }
    if v.is_infinite() {
        return if v > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if v == 0.0 {
        return "0".into();
    }
    let sci = format!("{:.*e}", (P - 1) as usize, v);
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if exp < -4 || exp >= P {
        let m = trim_zeros(mantissa);
        format!("{m}e{}{:02}", if exp < 0 { '-' } else { '+' }, exp.abs())
    } else {
        trim_zeros(&format!("{:.*}", (P - 1 - exp) as usize, v)).to_string()
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

/// Rounds to 12 significant digits.
pub fn round_g12(v: f64) -> f64 {
    format_g12(v).parse().unwrap_or(v)
}

pub fn csv_header(quantities: &[Quantity]) -> Vec<&'static str> {
    let mut h = CSV_HEADER.to_vec();
    if quantities.contains(&Quantity::QGamma) {
        h.push("sdp_status");
    }
    if quantities.contains(&Quantity::MapSpectrum) {
        h.extend(["map_s_plus", "map_s_minus"]);
    }
    h
}

/// CSV fields of one row; quantities that were not requested are empty.
pub fn csv_record(row: &SweepRow, quantities: &[Quantity]) -> Vec<String> {
    let r = &row.report;
    let want = |q| quantities.contains(&q);
    let num = |q, v: f64| {
        if want(q) {
            format_g12(v)
        } else {
            String::new()
        }
    };
    let flag = |q, v: bool| {
        if want(q) {
            v.to_string()
        } else {
            String::new()
        }
    };
    let mut rec = vec![
        r.params.d().to_string(),
        format_g12(r.params.x()),
        format_g12(r.params.y()),
        num(Quantity::Holevo, r.holevo),
        if want(Quantity::Holevo) {
            r.holevo_region.as_str().to_string()
        } else {
            String::new()
        },
        num(Quantity::ClassicalUpper, r.classical_upper),
        num(Quantity::Ea, r.ea),
        num(Quantity::QLower, r.q_lower_raw),
        num(Quantity::QLower, r.q_lower),
        r.q_gamma.map(format_g12).unwrap_or_default(),
        flag(Quantity::Ppt, r.flags.ppt),
        flag(Quantity::Omega, r.flags.in_omega),
    ];
    if want(Quantity::QGamma) {
        rec.push(r.sdp_status.map(|s| format!("{s:?}")).unwrap_or_default());
    }
    if want(Quantity::MapSpectrum) {
        let (sp, sm) = row.map_spectrum.unwrap_or((f64::NAN, f64::NAN));
        rec.extend([format_g12(sp), format_g12(sm)]);
    }
    rec
}

pub fn write_csv<W: Write>(
    rows: &[SweepRow],
    quantities: &[Quantity],
    out: W,
) -> std::io::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(csv_header(quantities))?;
    for row in rows {
        w.write_record(csv_record(row, quantities))?;
    }
    w.flush()
}
