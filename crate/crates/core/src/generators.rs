//! Generalized Gell-Mann generators of `u(d)`.
//!
//! * `AMinus`: `J_mn = -i(|m><n| - |n><m|)`, `m < n`
//! * `APlus`: `K_mn = |m><n| + |n><m|`, `m < n`
//! * `AZero`: `K_m = sqrt(2/(m(m+1))) (sum_{i<=m} |i><i| - m |m+1><m+1|)`, `1 <= m <= d-1`
//! * `APlusFull`: `APlus` plus the diagonal members `K_mm = sqrt(2) |m><m|`
//!
//! Basis indices in labels are zero-based; the `AZero` label is the level `m`.
//! Within each set the ordering is lexicographic in `(m, n)`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qmat::{c, cr, ComplexMatrix, DensityMatrix, HermitianMatrix};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GeneratorKind {
    AMinus,
    APlus,
    AZero,
    APlusFull,
}

impl GeneratorKind {
    pub fn expected_len(self, d: usize) -> usize {
        match self {
            GeneratorKind::AMinus | GeneratorKind::APlus => d * (d - 1) / 2,
            GeneratorKind::AZero => d - 1,
            GeneratorKind::APlusFull => d * (d + 1) / 2,
        }
    }
}

impl std::str::FromStr for GeneratorKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "aminus" | "minus" => Ok(GeneratorKind::AMinus),
            "aplus" | "plus" => Ok(GeneratorKind::APlus),
            "azero" | "zero" => Ok(GeneratorKind::AZero),
            "aplusfull" | "plusfull" => Ok(GeneratorKind::APlusFull),
            other => Err(Error::InvalidArgument(format!(
                "unknown generator kind `{other}`"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum GeneratorLabel {
    Pair(usize, usize),
    Level(usize),
}

#[derive(Debug, Clone)]
pub struct GeneratorSet {
    pub d: usize,
    pub kind: GeneratorKind,
    pub members: Vec<HermitianMatrix>,
    pub labels: Vec<GeneratorLabel>,
}

impl GeneratorSet {
    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&GeneratorLabel, &HermitianMatrix)> {
        self.labels.iter().zip(&self.members)
    }

    /// `sum_k A_k X A_k` over the members.
    pub fn conjugation_sum(&self, x: &ComplexMatrix) -> ComplexMatrix {
        let mut out = ComplexMatrix::zeros(self.d, self.d);
        for a in &self.members {
            out += a.matrix() * x * a.matrix();
        }
        out
    }
}

fn antisymmetric(d: usize, m: usize, n: usize) -> ComplexMatrix {
    let mut a = ComplexMatrix::zeros(d, d);
    a[(m, n)] = c(0.0, -1.0);
    a[(n, m)] = c(0.0, 1.0);
    a
}

fn symmetric(d: usize, m: usize, n: usize) -> ComplexMatrix {
    let mut a = ComplexMatrix::zeros(d, d);
    if m == n {
        a[(m, m)] = cr(std::f64::consts::SQRT_2);
    } else {
        a[(m, n)] = cr(1.0);
        a[(n, m)] = cr(1.0);
    }
    a
}

fn diagonal_level(d: usize, level: usize) -> ComplexMatrix {
    let norm = (2.0 / (level * (level + 1)) as f64).sqrt();
    let mut a = ComplexMatrix::zeros(d, d);
    for i in 0..level {
        a[(i, i)] = cr(norm);
    }
    a[(level, level)] = cr(-(level as f64) * norm);
    a
}

pub fn build_generators(d: usize, kind: GeneratorKind) -> Result<GeneratorSet> {
    if d < 2 {
        return Err(Error::InvalidArgument(format!(
            "generator sets need d >= 2, got {d}"
        )));
    }
    let mut labels = Vec::with_capacity(kind.expected_len(d));
    let mut mats = Vec::with_capacity(kind.expected_len(d));
    match kind {
        GeneratorKind::AMinus | GeneratorKind::APlus | GeneratorKind::APlusFull => {
            for m in 0..d {
                let start = if kind == GeneratorKind::APlusFull {
                    m
                } else {
                    m + 1
                };
                for n in start..d {
                    labels.push(GeneratorLabel::Pair(m, n));
                    mats.push(if kind == GeneratorKind::AMinus {
                        antisymmetric(d, m, n)
                    } else {
                        symmetric(d, m, n)
                    });
                }
            }
        }
        GeneratorKind::AZero => {
            for level in 1..d {
                labels.push(GeneratorLabel::Level(level));
                mats.push(diagonal_level(d, level));
            }
        }
    }
    let members = mats
        .iter()
        .map(HermitianMatrix::from_hermitian_part)
        .collect();
    Ok(GeneratorSet {
        d,
        kind,
        members,
        labels,
    })
}

/// Diagonal part `X_D = sum_n X_nn |n><n|` of any square matrix.
pub fn diagonal_part(x: &ComplexMatrix) -> ComplexMatrix {
    ComplexMatrix::from_diagonal(&x.diagonal())
}

/// The completely decohered state `rho_D`.
pub fn decohere(rho: &DensityMatrix) -> DensityMatrix {
    DensityMatrix::new(diagonal_part(rho.matrix()))
        .expect("diagonal of a density matrix is a density matrix")
}
