//! The two-parameter channel family
//! `Phi_{x,y}(rho) = (1-x-y) rho + (y_d + x_d) Tr(rho) I + (y_d - x_d) rho^T`
//! with `x_d = x/(d-1)`, `y_d = y/(d+1)`, and its constituent maps.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::generators::{build_generators, diagonal_part, GeneratorKind};
use crate::qmat::{
    c, cr, identity, ket_bra, max_abs, unitarity_defect, ComplexMatrix, DensityMatrix,
    SpectrumResult,
};

/// Slack allowed on the simplex constraints `x, y >= 0`, `x + y <= 1`.
pub const PARAM_SLACK: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawParams")]
pub struct ChannelParams {
    d: usize,
    x: f64,
    y: f64,
}

#[derive(Deserialize)]
struct RawParams {
    d: usize,
    x: f64,
    y: f64,
}

impl TryFrom<RawParams> for ChannelParams {
    type Error = Error;

    fn try_from(raw: RawParams) -> Result<Self> {
        ChannelParams::new(raw.d, raw.x, raw.y)
    }
}

impl ChannelParams {
    pub fn new(d: usize, x: f64, y: f64) -> Result<Self> {
        if d < 2 {
            return Err(Error::InvalidParams(format!(
                "dimension must be >= 2, got {d}"
            )));
        }
        if !x.is_finite() || !y.is_finite() {
            return Err(Error::InvalidParams("x and y must be finite".into()));
        }
        if x < -PARAM_SLACK || y < -PARAM_SLACK {
            return Err(Error::InvalidParams(format!(
                "x and y must be non-negative (x={x}, y={y})"
            )));
        }
        if x + y > 1.0 + PARAM_SLACK {
            return Err(Error::InvalidParams(format!(
                "x + y must not exceed 1 (x={x}, y={y})"
            )));
        }
        Ok(ChannelParams {
            d,
            x: x.max(0.0),
            y: y.max(0.0),
        })
    }

    pub fn identity(d: usize) -> Self {
        ChannelParams {
            d: d.max(2),
            x: 0.0,
            y: 0.0,
        }
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn x(&self) -> f64 {
        self.x
    }

    pub fn y(&self) -> f64 {
        self.y
    }

    pub fn x_d(&self) -> f64 {
        self.x / (self.d as f64 - 1.0)
    }

    pub fn y_d(&self) -> f64 {
        self.y / (self.d as f64 + 1.0)
    }

    pub fn delta(&self) -> f64 {
        self.y - self.x
    }

    /// Weight `1 - x - y` of the identity part, clamped at zero.
    pub fn identity_weight(&self) -> f64 {
        (1.0 - self.x - self.y).max(0.0)
    }

    /// On the edge `x + y = 1` where the channel is `U(d)`-covariant.
    pub fn on_line(&self) -> bool {
        (self.x + self.y - 1.0).abs() <= PARAM_SLACK
    }

    fn check_dim(&self, got: usize) -> Result<()> {
        if got != self.d {
            return Err(Error::DimensionMismatch {
                expected: self.d,
                got,
            });
        }
        Ok(())
    }
}

/// Closed-form action on an arbitrary `d x d` matrix (the map is linear).
pub fn apply_linear(params: &ChannelParams, x: &ComplexMatrix) -> ComplexMatrix {
    let d = params.d();
    let (xd, yd) = (params.x_d(), params.y_d());
    x * cr(1.0 - params.x() - params.y())
        + identity(d) * (x.trace() * cr(yd + xd))
        + x.transpose() * cr(yd - xd)
}

pub fn apply_channel(params: &ChannelParams, rho: &DensityMatrix) -> Result<DensityMatrix> {
    params.check_dim(rho.dim())?;
    DensityMatrix::new(apply_linear(params, rho.matrix()))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ConstituentKind {
    Minus,
    Plus,
    Zero,
    PlusFull,
}

/// Closed forms of the four constituent channels.
pub fn apply_constituent_linear(
    kind: ConstituentKind,
    d: usize,
    x: &ComplexMatrix,
) -> ComplexMatrix {
    let df = d as f64;
    let tr_i = identity(d) * x.trace();
    match kind {
        ConstituentKind::Minus => (tr_i - x.transpose()) * cr(1.0 / (df - 1.0)),
        ConstituentKind::Plus => {
            (x.transpose() + tr_i - diagonal_part(x) * cr(2.0)) * cr(1.0 / (df - 1.0))
        }
        ConstituentKind::Zero => (diagonal_part(x) - x * cr(1.0 / df)) * cr(df / (df - 1.0)),
        ConstituentKind::PlusFull => (tr_i + x.transpose()) * cr(1.0 / (df + 1.0)),
    }
}

pub fn apply_constituent(
    kind: ConstituentKind,
    d: usize,
    rho: &DensityMatrix,
) -> Result<DensityMatrix> {
    if d < 2 {
        return Err(Error::InvalidArgument(format!(
            "constituent channels need d >= 2, got {d}"
        )));
    }
    if rho.dim() != d {
        return Err(Error::DimensionMismatch {
            expected: d,
            got: rho.dim(),
        });
    }
    DensityMatrix::new(apply_constituent_linear(kind, d, rho.matrix()))
}

/// Kraus operators of a constituent channel, built from its generator set.
pub fn constituent_kraus(kind: ConstituentKind, d: usize) -> Result<KrausFamily> {
    let df = d as f64;
    let (gen, weight) = match kind {
        ConstituentKind::Minus => (GeneratorKind::AMinus, 1.0 / (df - 1.0)),
        ConstituentKind::Plus => (GeneratorKind::APlus, 1.0 / (df - 1.0)),
        ConstituentKind::Zero => (GeneratorKind::AZero, df / (2.0 * (df - 1.0))),
        ConstituentKind::PlusFull => (GeneratorKind::APlusFull, 1.0 / (df + 1.0)),
    };
    let set = build_generators(d, gen)?;
    let s = cr(weight.sqrt());
    KrausFamily::new(d, d, set.members.iter().map(|m| m.matrix() * s).collect())
}

/// Ordered Kraus operators with `sum K^dagger K = I`.
#[derive(Debug, Clone)]
pub struct KrausFamily {
    pub d_in: usize,
    pub d_out: usize,
    pub operators: Vec<ComplexMatrix>,
}

impl KrausFamily {
    pub fn new(d_in: usize, d_out: usize, operators: Vec<ComplexMatrix>) -> Result<Self> {
        if let Some(k) = operators
            .iter()
            .find(|k| k.nrows() != d_out || k.ncols() != d_in)
        {
            return Err(Error::DimensionMismatch {
                expected: d_out,
                got: k.nrows(),
            });
        }
        let fam = KrausFamily {
            d_in,
            d_out,
            operators,
        };
        let res = fam.completeness_residual();
        if res > 1e-12 {
            return Err(Error::InvalidArgument(format!(
                "Kraus operators are not trace preserving ({res:.3e})"
            )));
        }
        Ok(fam)
    }

    pub fn len(&self) -> usize {
        self.operators.len()
    }

    pub fn is_empty(&self) -> bool {
        self.operators.is_empty()
    }

    pub fn completeness_residual(&self) -> f64 {
        let mut sum = ComplexMatrix::zeros(self.d_in, self.d_in);
        for k in &self.operators {
            sum += k.adjoint() * k;
        }
        max_abs(&(sum - identity(self.d_in)))
    }

    /// `sum_k K_k X K_k^dagger`.
    pub fn apply(&self, x: &ComplexMatrix) -> ComplexMatrix {
        let mut out = ComplexMatrix::zeros(self.d_out, self.d_out);
        for k in &self.operators {
            out += k * x * k.adjoint();
        }
        out
    }

    /// Complementary channel: `Phi^c(rho)_{ij} = Tr(K_i rho K_j^dagger)`.
    pub fn complement(&self, x: &ComplexMatrix) -> ComplexMatrix {
        let n = self.operators.len();
        let kx: Vec<ComplexMatrix> = self.operators.iter().map(|k| k * x).collect();
        let mut out = ComplexMatrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                // Tr(K_i X K_j^dagger) = sum_{ab} (K_i X)_{ab} conj(K_j)_{ab}
                out[(i, j)] = kx[i]
                    .iter()
                    .zip(self.operators[j].iter())
                    .map(|(a, b)| a * b.conj())
                    .sum();
            }
        }
        out
    }
}

/// `sqrt(1-x-y) I`, then `sqrt(x_d) A-`, then `sqrt(y_d) A(+)`, always `1 + d^2`
/// operators (zero-weight ones included).
pub fn kraus_set(params: &ChannelParams) -> KrausFamily {
    let d = params.d();
    let mut ops = Vec::with_capacity(1 + d * d);
    ops.push(identity(d) * cr(params.identity_weight().sqrt()));
    let sx = cr(params.x_d().sqrt());
    let sy = cr(params.y_d().sqrt());
    let minus = build_generators(d, GeneratorKind::AMinus).expect("d >= 2");
    let full = build_generators(d, GeneratorKind::APlusFull).expect("d >= 2");
    ops.extend(minus.members.iter().map(|m| m.matrix() * sx));
    ops.extend(full.members.iter().map(|m| m.matrix() * sy));
    KrausFamily {
        d_in: d,
        d_out: d,
        operators: ops,
    }
}

/// Output of the complementary channel for the ordered Kraus set; a
/// `(1 + d^2)`-dimensional density matrix.
pub fn complement_apply(params: &ChannelParams, rho: &DensityMatrix) -> Result<DensityMatrix> {
    params.check_dim(rho.dim())?;
    DensityMatrix::new(kraus_set(params).complement(rho.matrix()))
}

/// Eigenvalue of the map on traceless symmetric operators.
pub fn map_eigenvalue_symmetric(params: &ChannelParams) -> f64 {
    1.0 - params.x() - params.y() + params.y_d() - params.x_d()
}

/// Eigenvalue of the map on antisymmetric operators.
pub fn map_eigenvalue_antisymmetric(params: &ChannelParams) -> f64 {
    1.0 - params.x() - params.y() - params.y_d() + params.x_d()
}

/// Spectrum of the channel as a linear map on `d x d` matrices.
pub fn map_spectrum(params: &ChannelParams) -> SpectrumResult {
    let d = params.d();
    SpectrumResult::from_levels(&[
        (1.0, 1),
        (map_eigenvalue_symmetric(params), d * (d + 1) / 2 - 1),
        (map_eigenvalue_antisymmetric(params), d * (d - 1) / 2),
    ])
}

/// Matrix of a linear map on `d x d` matrices under column-stacking
/// vectorization (`vec(X)[col * d + row] = X[row, col]`).
pub fn superoperator_matrix<F>(d: usize, map: F) -> ComplexMatrix
where
    F: Fn(&ComplexMatrix) -> ComplexMatrix,
{
    let mut s = ComplexMatrix::zeros(d * d, d * d);
    for col in 0..d {
        for row in 0..d {
            let out = map(&ket_bra(d, row, col));
            for oc in 0..d {
                for or in 0..d {
                    s[(oc * d + or, col * d + row)] = out[(or, oc)];
                }
            }
        }
    }
    s
}

/// `max | Phi(U rho U^dagger) - U^* Phi(rho) U^T |`.
pub fn covariance_residual(
    params: &ChannelParams,
    u: &ComplexMatrix,
    rho: &DensityMatrix,
) -> Result<f64> {
    params.check_dim(rho.dim())?;
    params.check_dim(u.nrows())?;
    let defect = unitarity_defect(u);
    if defect > 1e-10 {
        return Err(Error::NotUnitary(defect));
    }
    let lhs = apply_linear(params, &(u * rho.matrix() * u.adjoint()));
    let rhs = u.conjugate() * apply_linear(params, rho.matrix()) * u.transpose();
    Ok(max_abs(&(lhs - rhs)))
}

/// Pauli-channel weights for `(I, sigma_x, sigma_y, sigma_z)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PauliParams {
    pub p0: f64,
    pub p1: f64,
    pub p2: f64,
    pub p3: f64,
}

pub fn pauli_matrices() -> [ComplexMatrix; 4] {
    let z = cr(0.0);
    let o = cr(1.0);
    [
        identity(2),
        ComplexMatrix::from_row_slice(2, 2, &[z, o, o, z]),
        ComplexMatrix::from_row_slice(2, 2, &[z, c(0.0, -1.0), c(0.0, 1.0), z]),
        ComplexMatrix::from_row_slice(2, 2, &[o, z, z, -o]),
    ]
}

impl PauliParams {
    pub fn new(p0: f64, p1: f64, p2: f64, p3: f64) -> Result<Self> {
        let p = [p0, p1, p2, p3];
        if p.iter().any(|&v| v < -PARAM_SLACK) || (p.iter().sum::<f64>() - 1.0).abs() > PARAM_SLACK
        {
            return Err(Error::InvalidParams(format!(
                "not a probability vector: {p:?}"
            )));
        }
        Ok(PauliParams { p0, p1, p2, p3 })
    }

    pub fn weights(&self) -> [f64; 4] {
        [self.p0, self.p1, self.p2, self.p3]
    }

    pub fn apply(&self, x: &ComplexMatrix) -> ComplexMatrix {
        let mut out = ComplexMatrix::zeros(2, 2);
        for (w, s) in self.weights().iter().zip(pauli_matrices().iter()) {
            out += s * x * s * cr(*w);
        }
        out
    }
}

/// At `d = 2` the family is the Pauli channel
/// `(1 - x - 2y/3) rho + (y/3)(X rho X + Z rho Z) + x Y rho Y`.
pub fn pauli_reduction_d2(params: &ChannelParams) -> Result<PauliParams> {
    if params.d() != 2 {
        return Err(Error::InvalidArgument(format!(
            "Pauli reduction needs d = 2, got {}",
            params.d()
        )));
    }
    let (x, y) = (params.x(), params.y());
    PauliParams::new((1.0 - x - 2.0 * y / 3.0).max(0.0), y / 3.0, x, y / 3.0)
}

/// Checks a Kraus family against a closed form on a matrix, returning the
/// largest entry deviation.
pub fn kraus_deviation(fam: &KrausFamily, closed: &ComplexMatrix, x: &ComplexMatrix) -> f64 {
    max_abs(&(fam.apply(x) - closed))
}
