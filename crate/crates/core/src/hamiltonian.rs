//! PT- and anti-PT-symmetric single-qubit Hamiltonians.
//!
//! Both families are traceless and parameterized by an energy scale `s > 0`
//! and a non-Hermiticity degree `a = gamma / s > 0`:
//!
//! * PT:  `s (sigma_x + i a sigma_z) = [[i a s, s], [s, -i a s]]`
//! * APT: `s (i sigma_x + a sigma_z) = [[a s, i s], [i s, -a s]]`

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{c, re, ComplexMat2, TOL};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SymmetryClass {
    /// Parity-time symmetric.
    Pt,
    /// Anti-parity-time symmetric.
    Apt,
}

impl fmt::Display for SymmetryClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SymmetryClass::Pt => f.write_str("pt"),
            SymmetryClass::Apt => f.write_str("apt"),
        }
    }
}

impl FromStr for SymmetryClass {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "pt" => Ok(SymmetryClass::Pt),
            "apt" => Ok(SymmetryClass::Apt),
            other => Err(Error::InvalidParameter(format!(
                "kind must be pt or apt, got {other:?}"
            ))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Regime {
    Unbroken,
    Broken,
    ExceptionalPoint,
}

/// Full parameterization of one Hamiltonian family member.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct HamiltonianParams {
    pub kind: SymmetryClass,
    /// Energy scale, `s > 0`.
    pub s: f64,
    /// Non-Hermiticity degree, `a > 0`.
    pub a: f64,
}

impl HamiltonianParams {
    pub fn new(kind: SymmetryClass, s: f64, a: f64) -> Result<Self> {
        if !(s.is_finite() && s > 0.0) {
            return Err(Error::InvalidParameter(format!("s must be > 0, got {s}")));
        }
        if !(a.is_finite() && a > 0.0) {
            return Err(Error::InvalidParameter(format!("a must be > 0, got {a}")));
        }
        Ok(Self { kind, s, a })
    }

    /// `s = 1`, the convention used throughout the figures.
    pub fn unit(kind: SymmetryClass, a: f64) -> Result<Self> {
        Self::new(kind, 1.0, a)
    }

    pub fn pt(a: f64) -> Self {
        Self::unit(SymmetryClass::Pt, a).expect("a must be > 0")
    }

    pub fn apt(a: f64) -> Self {
        Self::unit(SymmetryClass::Apt, a).expect("a must be > 0")
    }

    /// Gain/loss rate `gamma = a s`.
    pub fn gamma(&self) -> f64 {
        self.a * self.s
    }

    /// `1 - a^2` for PT, `a^2 - 1` for APT; positive exactly in the
    /// unbroken regime.
    pub fn unbroken_discriminant(&self) -> f64 {
        match self.kind {
            SymmetryClass::Pt => 1.0 - self.a * self.a,
            SymmetryClass::Apt => self.a * self.a - 1.0,
        }
    }

    pub fn regime(&self) -> Regime {
        regime(self, TOL.regime_eps)
    }
}

/// The Hamiltonian matrix. `a = 0` is accepted here so the Hermitian
/// limit can be inspected; [`HamiltonianParams::new`] rejects it.
pub fn build_hamiltonian(p: &HamiltonianParams) -> ComplexMat2 {
    let (s, a) = (p.s, p.a);
    match p.kind {
        SymmetryClass::Pt => ComplexMat2::new(c(0.0, a * s), re(s), re(s), c(0.0, -a * s)),
        SymmetryClass::Apt => ComplexMat2::new(re(a * s), c(0.0, s), c(0.0, s), re(-a * s)),
    }
}

/// Eigenvalues `(+lambda, -lambda)`, with `lambda = s sqrt(1 - a^2)` (PT)
/// or `s sqrt(a^2 - 1)` (APT); real when unbroken, imaginary when broken.
pub fn eigenvalues(p: &HamiltonianParams) -> (Complex64, Complex64) {
    let d = p.unbroken_discriminant();
    let lambda = if d >= 0.0 {
        re(p.s * d.sqrt())
    } else {
        c(0.0, p.s * (-d).sqrt())
    };
    (lambda, -lambda)
}

/// Classify the symmetry regime; `|a - 1| <= eps` is the exceptional point.
pub fn regime(p: &HamiltonianParams, eps: f64) -> Regime {
    if (p.a - 1.0).abs() <= eps {
        return Regime::ExceptionalPoint;
    }
    let below = p.a < 1.0;
    match (p.kind, below) {
        (SymmetryClass::Pt, true) | (SymmetryClass::Apt, false) => Regime::Unbroken,
        _ => Regime::Broken,
    }
}
