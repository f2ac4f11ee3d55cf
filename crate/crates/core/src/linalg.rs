//! Small dense complex matrices and vectors.
//!
//! Only the fixed sizes the simulator needs (2 and 4) are exercised, but the
//! types are generic over the dimension so the same code serves the single-
//! and two-qubit paths. Everything here is `Copy` and allocation free.

use std::ops::{Add, Index, IndexMut, Mul, Neg, Sub};

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Tolerances shared across modules.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Tolerances {
    /// Algebraic identities (hermiticity, trace, norms).
    pub algebraic: f64,
    /// Width of the exceptional-point band around `a = 1` used by the
    /// propagator.
    pub exceptional_band: f64,
    /// Band used by [`crate::hamiltonian::regime`] when classifying.
    pub regime_eps: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        TOL
    }
}

pub const TOL: Tolerances = Tolerances {
    algebraic: 1e-10,
    exceptional_band: 1e-6,
    regime_eps: 1e-9,
};

pub const I: Complex64 = Complex64::new(0.0, 1.0);

#[inline]
pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

#[inline]
pub fn re(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

/// Dense `N x N` complex matrix, row-major.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Matrix<const N: usize> {
    pub entries: [[Complex64; N]; N],
}

/// Complex column vector of length `N`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Vector<const N: usize> {
    pub components: [Complex64; N],
}

pub type ComplexMat2 = Matrix<2>;
pub type ComplexMat4 = Matrix<4>;
pub type ComplexVec2 = Vector<2>;
pub type ComplexVec4 = Vector<4>;

impl<const N: usize> Matrix<N> {
    pub fn zeros() -> Self {
        Self {
            entries: [[Complex64::new(0.0, 0.0); N]; N],
        }
    }

    pub fn identity() -> Self {
        let mut m = Self::zeros();
        for i in 0..N {
            m.entries[i][i] = re(1.0);
        }
        m
    }

    pub fn from_rows(entries: [[Complex64; N]; N]) -> Self {
        Self { entries }
    }

    pub fn from_real(rows: [[f64; N]; N]) -> Self {
        let mut m = Self::zeros();
        for i in 0..N {
            for j in 0..N {
                m.entries[i][j] = re(rows[i][j]);
            }
        }
        m
    }

    pub fn scale(&self, k: Complex64) -> Self {
        let mut m = *self;
        for row in m.entries.iter_mut() {
            for z in row.iter_mut() {
                *z *= k;
            }
        }
        m
    }

    pub fn scale_real(&self, k: f64) -> Self {
        self.scale(re(k))
    }

    pub fn adjoint(&self) -> Self {
        let mut m = Self::zeros();
        for i in 0..N {
            for j in 0..N {
                m.entries[i][j] = self.entries[j][i].conj();
            }
        }
        m
    }

    pub fn trace(&self) -> Complex64 {
        (0..N).map(|i| self.entries[i][i]).sum()
    }

    pub fn apply(&self, v: &Vector<N>) -> Vector<N> {
        let mut out = Vector::zeros();
        for i in 0..N {
            out.components[i] = (0..N).map(|j| self.entries[i][j] * v.components[j]).sum();
        }
        out
    }

    /// Frobenius norm.
    pub fn norm(&self) -> f64 {
        self.entries
            .iter()
            .flatten()
            .map(|z| z.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    /// Largest entry magnitude.
    pub fn max_abs(&self) -> f64 {
        self.entries
            .iter()
            .flatten()
            .map(|z| z.norm())
            .fold(0.0, f64::max)
    }

    /// Induced 1-norm (max column sum).
    pub fn norm_one(&self) -> f64 {
        (0..N)
            .map(|j| (0..N).map(|i| self.entries[i][j].norm()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    pub fn is_finite(&self) -> bool {
        self.entries.iter().flatten().all(|z| z.is_finite())
    }

    /// Frobenius inner product `<self, other> = sum conj(self_ij) other_ij`.
    pub fn inner(&self, other: &Self) -> Complex64 {
        self.entries
            .iter()
            .flatten()
            .zip(other.entries.iter().flatten())
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    /// Largest deviation from hermiticity.
    pub fn hermiticity_defect(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for i in 0..N {
            for j in 0..N {
                worst = worst.max((self.entries[i][j] - self.entries[j][i].conj()).norm());
            }
        }
        worst
    }

    /// Sum of magnitudes of all off-diagonal entries.
    pub fn off_diagonal_l1(&self) -> f64 {
        let mut s = 0.0;
        for i in 0..N {
            for j in 0..N {
                if i != j {
                    s += self.entries[i][j].norm();
                }
            }
        }
        s
    }

    /// Determinant by Gaussian elimination with partial pivoting.
    pub fn det(&self) -> Complex64 {
        let mut a = self.entries;
        let mut det = re(1.0);
        for k in 0..N {
            let p = (k..N)
                .max_by(|&x, &y| a[x][k].norm().total_cmp(&a[y][k].norm()))
                .unwrap_or(k);
            if a[p][k].norm() == 0.0 {
                return re(0.0);
            }
            if p != k {
                a.swap(p, k);
                det = -det;
            }
            det *= a[k][k];
            for i in (k + 1)..N {
                let f = a[i][k] / a[k][k];
                for j in k..N {
                    let v = a[k][j];
                    a[i][j] -= f * v;
                }
            }
        }
        det
    }
}

impl ComplexMat2 {
    pub fn new(a: Complex64, b: Complex64, c: Complex64, d: Complex64) -> Self {
        Self::from_rows([[a, b], [c, d]])
    }

    pub fn sigma_x() -> Self {
        Self::from_real([[0.0, 1.0], [1.0, 0.0]])
    }

    pub fn sigma_y() -> Self {
        Self::new(re(0.0), c(0.0, -1.0), c(0.0, 1.0), re(0.0))
    }

    pub fn sigma_z() -> Self {
        Self::from_real([[1.0, 0.0], [0.0, -1.0]])
    }

    /// Kronecker product `self ⊗ other`.
    pub fn kron(&self, other: &ComplexMat2) -> ComplexMat4 {
        let mut m = ComplexMat4::zeros();
        for i in 0..2 {
            for j in 0..2 {
                for k in 0..2 {
                    for l in 0..2 {
                        m.entries[2 * i + k][2 * j + l] = self.entries[i][j] * other.entries[k][l];
                    }
                }
            }
        }
        m
    }

    /// Singular values in descending order.
    pub fn singular_values(&self) -> [f64; 2] {
        let fro2 = self.norm().powi(2);
        let d = self.det().norm();
        let disc = (fro2 * fro2 - 4.0 * d * d).max(0.0).sqrt();
        let s1 = ((fro2 + disc) / 2.0).sqrt();
        let s2 = if s1 > 0.0 { d / s1 } else { 0.0 };
        [s1, s2]
    }

    /// Eigenvalues of a Hermitian 2x2 matrix (ascending).
    pub fn hermitian_eigenvalues(&self) -> [f64; 2] {
        let a = self.entries[0][0].re;
        let d = self.entries[1][1].re;
        let b = self.entries[0][1].norm();
        let mean = 0.5 * (a + d);
        let r = (0.25 * (a - d) * (a - d) + b * b).sqrt();
        [mean - r, mean + r]
    }
}

impl<const N: usize> Vector<N> {
    pub fn zeros() -> Self {
        Self {
            components: [Complex64::new(0.0, 0.0); N],
        }
    }

    pub fn new(components: [Complex64; N]) -> Self {
        Self { components }
    }

    pub fn norm(&self) -> f64 {
        self.components
            .iter()
            .map(|z| z.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    pub fn scale(&self, k: Complex64) -> Self {
        let mut v = *self;
        for z in v.components.iter_mut() {
            *z *= k;
        }
        v
    }

    /// `<self|other>`.
    pub fn inner(&self, other: &Self) -> Complex64 {
        self.components
            .iter()
            .zip(other.components.iter())
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    /// `|self><self|`.
    pub fn outer(&self) -> Matrix<N> {
        let mut m = Matrix::zeros();
        for i in 0..N {
            for j in 0..N {
                m.entries[i][j] = self.components[i] * self.components[j].conj();
            }
        }
        m
    }
}

impl ComplexVec2 {
    pub fn kron(&self, other: &ComplexVec2) -> ComplexVec4 {
        let mut v = ComplexVec4::zeros();
        for i in 0..2 {
            for j in 0..2 {
                v.components[2 * i + j] = self.components[i] * other.components[j];
            }
        }
        v
    }
}

impl<const N: usize> Index<(usize, usize)> for Matrix<N> {
    type Output = Complex64;
    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.entries[i][j]
    }
}

impl<const N: usize> IndexMut<(usize, usize)> for Matrix<N> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        &mut self.entries[i][j]
    }
}

impl<const N: usize> Mul for Matrix<N> {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        mat_mul(&self, &rhs)
    }
}

impl<const N: usize> Add for Matrix<N> {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        let mut m = self;
        for i in 0..N {
            for j in 0..N {
                m.entries[i][j] += rhs.entries[i][j];
            }
        }
        m
    }
}

impl<const N: usize> Sub for Matrix<N> {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        self + (-rhs)
    }
}

impl<const N: usize> Neg for Matrix<N> {
    type Output = Self;
    fn neg(self) -> Self {
        self.scale_real(-1.0)
    }
}

/// Standard matrix product.
pub fn mat_mul<const N: usize>(a: &Matrix<N>, b: &Matrix<N>) -> Matrix<N> {
    let mut out = Matrix::zeros();
    for i in 0..N {
        for k in 0..N {
            let aik = a.entries[i][k];
            for j in 0..N {
                out.entries[i][j] += aik * b.entries[k][j];
            }
        }
    }
    out
}

/// `sqrt(sum |a_ij - b_ij|^2)`.
pub fn frobenius_dist<const N: usize>(a: &Matrix<N>, b: &Matrix<N>) -> f64 {
    (*a - *b).norm()
}

/// Frobenius distance relative to `max(1, ||b||)`.
pub fn relative_frobenius_dist<const N: usize>(a: &Matrix<N>, b: &Matrix<N>) -> f64 {
    frobenius_dist(a, b) / b.norm().max(1.0)
}

const TAYLOR_ORDER: usize = 24;

/// `exp(m * t)` by scaling and squaring around a truncated Taylor series.
///
/// The argument is halved until its 1-norm is at most 1/2, after which 24
/// Taylor terms are far below double precision. Used as the ground truth
/// for the analytic propagators, so it shares no code with them.
pub fn mat_exp_oracle<const N: usize>(m: &Matrix<N>, t: f64) -> Result<Matrix<N>> {
    if !m.is_finite() || !t.is_finite() {
        return Err(Error::Range("matrix exponential of non-finite input".into()));
    }
    let x = m.scale_real(t);
    let norm = x.norm_one();
    // exp of anything larger overflows f64 regardless of structure
    if norm > 700.0 {
        return Err(Error::Range(format!(
            "matrix exponential argument too large (1-norm {norm:.3e})"
        )));
    }
    let mut squarings = 0u32;
    let mut scaled_norm = norm;
    while scaled_norm > 0.5 {
        scaled_norm /= 2.0;
        squarings += 1;
    }
    let y = x.scale_real(0.5f64.powi(squarings as i32));

    // Horner form: I + y(I + y/2(I + y/3(...)))
    let mut acc = Matrix::<N>::identity();
    for k in (1..=TAYLOR_ORDER).rev() {
        acc = Matrix::identity() + mat_mul(&y, &acc).scale_real(1.0 / k as f64);
    }
    for _ in 0..squarings {
        acc = mat_mul(&acc, &acc);
    }
    if !acc.is_finite() {
        return Err(Error::Range("matrix exponential overflowed".into()));
    }
    Ok(acc)
}
