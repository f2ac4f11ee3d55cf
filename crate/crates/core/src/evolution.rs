//! Analytic nonunitary propagators and normalized state evolution.
//!
//! `U(t) = exp(-i H t)` is written through three real functions of `s t`:
//!
//! * PT:  `U = [[A - B, -i C], [-i C, A + B]]`
//! * APT: `U = [[A + i B, C], [C, A - i B]]`
//!
//! with `A = cos(w s t)`, `C = sin(w s t) / w`, `B = -a C` in the unbroken
//! regime and the hyperbolic counterparts in the broken regime. Near the
//! exceptional point both are replaced by their common power series in
//! `d (s t)^2` (`d = +-w^2`), which at `a = 1` collapses to
//! `A = 1, B = -s t, C = s t`.

use std::f64::consts::{FRAC_1_SQRT_2, TAU};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hamiltonian::{regime, HamiltonianParams, Regime, SymmetryClass};
use crate::linalg::{c, mat_mul, re, ComplexMat2, ComplexVec2, Matrix, Vector, I, TOL};

/// Past this value of `w s t` the broken-regime propagator is stored with
/// the factor `e^{w s t}` pulled out.
const SCALE_THRESHOLD: f64 = 300.0;

const DEGENERATE_NORM: f64 = 1e-300;

/// Time-evolution operator at a fixed time.
///
/// The full operator is `exp(log_scale) * matrix`; `log_scale` is zero
/// unless the broken-regime growth would otherwise overflow, and the
/// `abc` triple carries the same scale as `matrix`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Propagator {
    pub matrix: ComplexMat2,
    pub abc: (f64, f64, f64),
    pub regime: Regime,
    pub t: f64,
    pub log_scale: f64,
}

impl Propagator {
    /// The unscaled operator (may overflow for very long broken-regime times).
    pub fn full_matrix(&self) -> ComplexMat2 {
        if self.log_scale == 0.0 {
            self.matrix
        } else {
            self.matrix.scale_real(self.log_scale.exp())
        }
    }

    /// Operator divided by its largest-magnitude entry.
    pub fn normalized_matrix(&self) -> ComplexMat2 {
        self.matrix.scale_real(1.0 / self.matrix.max_abs())
    }
}

/// `A`, and `C = S` with `B = -a S`, as functions of the dimensionless time.
fn abc_series(disc: f64, tau: f64) -> (f64, f64) {
    // cos(sqrt(disc) tau) and sin(sqrt(disc) tau)/sqrt(disc) as power series
    let x = -disc * tau * tau;
    let mut a = 1.0;
    let mut s = 1.0;
    let mut term_a = 1.0;
    let mut term_s = 1.0;
    for n in 1..40 {
        let n = n as f64;
        term_a *= x / ((2.0 * n - 1.0) * (2.0 * n));
        term_s *= x / ((2.0 * n) * (2.0 * n + 1.0));
        a += term_a;
        s += term_s;
        if term_a.abs() < 1e-18 * a.abs() && term_s.abs() < 1e-18 * s.abs() {
            break;
        }
    }
    (a, s * tau)
}

/// Returns `(A, S, log_scale)`.
fn abc_core(p: &HamiltonianParams, t: f64) -> (f64, f64, f64, Regime) {
    let tau = p.s * t;
    let disc = p.unbroken_discriminant();
    let near_ep = (p.a - 1.0).abs() <= TOL.exceptional_band;
    let reg = if near_ep {
        Regime::ExceptionalPoint
    } else {
        regime(p, 0.0)
    };
    if near_ep && disc.abs() * tau * tau <= 1.0 {
        let (a, s) = abc_series(disc, tau);
        return (a, s, 0.0, reg);
    }
    let w = disc.abs().sqrt();
    let theta = w * tau;
    if disc > 0.0 {
        (theta.cos(), theta.sin() / w, 0.0, reg)
    } else if theta <= SCALE_THRESHOLD {
        (theta.cosh(), theta.sinh() / w, 0.0, reg)
    } else {
        let e = (-2.0 * theta).exp();
        (0.5 * (1.0 + e), 0.5 * (1.0 - e) / w, theta, reg)
    }
}

/// Closed-form propagator for every regime.
pub fn propagator_analytic(p: &HamiltonianParams, t: f64) -> Result<Propagator> {
    if !(t.is_finite() && t >= 0.0) {
        return Err(Error::InvalidParameter(format!("t must be >= 0, got {t}")));
    }
    let (a_fn, s_fn, log_scale, reg) = abc_core(p, t);
    let b_fn = -p.a * s_fn;
    let c_fn = s_fn;
    let matrix = match p.kind {
        SymmetryClass::Pt => ComplexMat2::new(
            re(a_fn - b_fn),
            c(0.0, -c_fn),
            c(0.0, -c_fn),
            re(a_fn + b_fn),
        ),
        SymmetryClass::Apt => {
            ComplexMat2::new(c(a_fn, b_fn), re(c_fn), re(c_fn), c(a_fn, -b_fn))
        }
    };
    Ok(Propagator {
        matrix,
        abc: (a_fn, b_fn, c_fn),
        regime: reg,
        t,
        log_scale,
    })
}

/// Single-qubit pure state `alpha |H> + beta e^{i phi} |V>` with real
/// non-negative `alpha`, `beta`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PureState {
    pub alpha: f64,
    pub beta: f64,
    pub phi: f64,
}

impl PureState {
    /// Strict constructor: `alpha^2 + beta^2 = 1` to 1e-12.
    pub fn new(alpha: f64, beta: f64, phi: f64) -> Result<Self> {
        if !(alpha.is_finite() && beta.is_finite() && phi.is_finite()) {
            return Err(Error::InvalidParameter("state parameters must be finite".into()));
        }
        if !(0.0..=1.0).contains(&alpha) || !(0.0..=1.0).contains(&beta) {
            return Err(Error::InvalidParameter(format!(
                "alpha and beta must lie in [0, 1], got ({alpha}, {beta})"
            )));
        }
        if (alpha * alpha + beta * beta - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidParameter(format!(
                "alpha^2 + beta^2 must be 1, got {}",
                alpha * alpha + beta * beta
            )));
        }
        Ok(Self {
            alpha,
            beta,
            phi: phi.rem_euclid(TAU),
        })
    }

    /// Rescales `(alpha, beta)` onto the unit circle.
    pub fn normalized(alpha: f64, beta: f64, phi: f64) -> Result<Self> {
        let n = alpha.hypot(beta);
        if !(n.is_finite() && n > 0.0) || alpha < 0.0 || beta < 0.0 {
            return Err(Error::InvalidParameter(format!(
                "cannot normalize state with alpha={alpha}, beta={beta}"
            )));
        }
        Self::new((alpha / n).min(1.0), (beta / n).min(1.0), phi)
    }

    pub fn h() -> Self {
        Self { alpha: 1.0, beta: 0.0, phi: 0.0 }
    }

    pub fn v() -> Self {
        Self { alpha: 0.0, beta: 1.0, phi: 0.0 }
    }

    /// `(|H> + |V>)/sqrt 2`.
    pub fn d() -> Self {
        Self { alpha: FRAC_1_SQRT_2, beta: FRAC_1_SQRT_2, phi: 0.0 }
    }

    /// `(|H> + sqrt 3 |V>)/2`.
    pub fn h_sqrt3v() -> Self {
        Self { alpha: 0.5, beta: 0.75f64.sqrt(), phi: 0.0 }
    }

    pub fn to_vector(&self) -> ComplexVec2 {
        Vector::new([re(self.alpha), Complex64::from_polar(self.beta, self.phi)])
    }

    /// Strips the global phase of a nonzero vector.
    pub fn from_vector(v: &ComplexVec2) -> Result<Self> {
        let n = v.norm();
        if !(n > DEGENERATE_NORM) {
            return Err(Error::InvalidParameter("zero vector".into()));
        }
        let (h, w) = (v.components[0] / n, v.components[1] / n);
        let alpha = h.norm().min(1.0);
        let beta = w.norm().min(1.0);
        let phi = if alpha == 0.0 || beta == 0.0 {
            0.0
        } else {
            w.arg() - h.arg()
        };
        Self::normalized(alpha, beta, phi)
    }

    pub fn density(&self) -> DensityMatrix {
        DensityMatrix { rho: self.to_vector().outer() }
    }
}

/// Physical density matrix (Hermitian, unit trace, positive semidefinite).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DensityMatrix<const N: usize = 2> {
    pub rho: Matrix<N>,
}

impl<const N: usize> DensityMatrix<N> {
    /// Validates the physicality invariants at the algebraic tolerance.
    pub fn new(rho: Matrix<N>) -> Result<Self> {
        check_physical(&rho, TOL.algebraic)?;
        Ok(Self { rho })
    }

    pub fn from_pure(v: &Vector<N>) -> Result<Self> {
        let n = v.norm();
        if !(n > DEGENERATE_NORM) {
            return Err(Error::InvalidParameter("zero state vector".into()));
        }
        Ok(Self {
            rho: v.scale(re(1.0 / n)).outer(),
        })
    }

    pub fn maximally_mixed() -> Self {
        Self {
            rho: Matrix::identity().scale_real(1.0 / N as f64),
        }
    }

    pub fn is_physical(&self, tol: f64) -> bool {
        check_physical(&self.rho, tol).is_ok()
    }

    /// Hermitian part divided by its trace.
    pub(crate) fn renormalize(rho: &Matrix<N>) -> Result<Self> {
        let herm = (*rho + rho.adjoint()).scale_real(0.5);
        let tr = herm.trace().re;
        if !(tr.abs() > DEGENERATE_NORM) || !tr.is_finite() {
            return Err(Error::DegenerateEvolution(tr.abs()));
        }
        Ok(Self {
            rho: herm.scale_real(1.0 / tr),
        })
    }
}

impl DensityMatrix<2> {
    /// `rho = (I + x sigma_x + y sigma_y + z sigma_z) / 2` for `|r| <= 1`.
    pub fn from_bloch(x: f64, y: f64, z: f64) -> Result<Self> {
        let r2 = x * x + y * y + z * z;
        if r2 > 1.0 + 1e-9 {
            return Err(Error::InvalidParameter(format!(
                "Bloch vector length {} exceeds 1",
                r2.sqrt()
            )));
        }
        Ok(Self {
            rho: ComplexMat2::new(
                re(0.5 * (1.0 + z)),
                c(0.5 * x, -0.5 * y),
                c(0.5 * x, 0.5 * y),
                re(0.5 * (1.0 - z)),
            ),
        })
    }

    pub fn eigenvalues(&self) -> [f64; 2] {
        self.rho.hermitian_eigenvalues()
    }
}

fn check_physical<const N: usize>(rho: &Matrix<N>, tol: f64) -> Result<()> {
    if !rho.is_finite() {
        return Err(Error::InvalidParameter("density matrix has non-finite entries".into()));
    }
    let herm = rho.hermiticity_defect();
    if herm > tol {
        return Err(Error::InvalidParameter(format!(
            "density matrix not Hermitian (defect {herm:e})"
        )));
    }
    let tr = rho.trace();
    if (tr - re(1.0)).norm() > tol {
        return Err(Error::InvalidParameter(format!(
            "density matrix trace {tr} differs from 1"
        )));
    }
    if !is_positive_semidefinite(rho, tol) {
        return Err(Error::InvalidParameter(
            "density matrix has a negative eigenvalue".into(),
        ));
    }
    Ok(())
}

/// Cholesky of `rho + tol I`; succeeds iff every eigenvalue is `>= -tol`
/// (up to rounding).
fn is_positive_semidefinite<const N: usize>(rho: &Matrix<N>, tol: f64) -> bool {
    let mut l = [[Complex64::new(0.0, 0.0); N]; N];
    for j in 0..N {
        let mut d = rho.entries[j][j].re + tol;
        for k in 0..j {
            d -= l[j][k].norm_sqr();
        }
        if d < 0.0 {
            return false;
        }
        let d = d.sqrt();
        l[j][j] = re(d);
        for i in (j + 1)..N {
            let mut v = rho.entries[i][j];
            for k in 0..j {
                v -= l[i][k] * l[j][k].conj();
            }
            l[i][j] = if d > 0.0 { v / d } else { re(0.0) };
        }
    }
    true
}

/// `U |phi> / ||U |phi>||`.
pub fn evolve_pure(st: &PureState, p: &HamiltonianParams, t: f64) -> Result<ComplexVec2> {
    let u = propagator_analytic(p, t)?;
    let out = u.matrix.apply(&st.to_vector());
    let n = out.norm();
    if !(n > DEGENERATE_NORM) {
        return Err(Error::DegenerateEvolution(n));
    }
    Ok(out.scale(re(1.0 / n)))
}

/// `||U |phi>||^2` written through `A, B, C` (scaled like `Propagator::abc`).
pub fn normalization_constant(st: &PureState, p: &HamiltonianParams, t: f64) -> Result<f64> {
    let (a, b, cc) = propagator_analytic(p, t)?.abc;
    let (al, be, phi) = (st.alpha, st.beta, st.phi);
    Ok(match p.kind {
        SymmetryClass::Pt => {
            a * a + b * b + cc * cc + 2.0 * a * b * (be * be - al * al)
                - 4.0 * al * be * b * cc * phi.sin()
        }
        SymmetryClass::Apt => {
            a * a + b * b + cc * cc + 4.0 * cc * (a * phi.cos() + b * phi.sin()) * al * be
        }
    })
}

/// `U rho U^dagger / Tr[...]` for an arbitrary operator.
pub fn evolve_density_with<const N: usize>(
    rho: &DensityMatrix<N>,
    u: &Matrix<N>,
) -> Result<DensityMatrix<N>> {
    let out = mat_mul(&mat_mul(u, &rho.rho), &u.adjoint());
    DensityMatrix::renormalize(&out)
}

pub fn evolve_density(rho: &DensityMatrix, p: &HamiltonianParams, t: f64) -> Result<DensityMatrix> {
    let u = propagator_analytic(p, t)?;
    evolve_density_with(rho, &u.matrix)
}

/// `-i H`, the generator passed to the matrix-exponential oracle.
pub fn generator(p: &HamiltonianParams) -> ComplexMat2 {
    crate::hamiltonian::build_hamiltonian(p).scale(-I)
}
