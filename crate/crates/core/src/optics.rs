//! Waveplate and loss-element sequences realizing the nonunitary
//! propagators, found by numerical reversal design.
//!
//! Products are written in operator order: the leftmost element acts last.
//! Matching is up to a global complex scalar, since the evolution rule
//! renormalizes the state and overall loss or phase is unobservable.

use std::f64::consts::{FRAC_PI_4, PI};

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::evolution::{propagator_analytic, PureState};
use crate::hamiltonian::{HamiltonianParams, SymmetryClass};
use crate::linalg::{c, mat_mul, re, ComplexMat2, ComplexVec2, Vector};
use crate::optimize::{levenberg_marquardt, multi_start, MultiStart, SimplexOptions};

/// Half-wave plate with fast axis at `theta`.
pub fn r_hwp(theta: f64) -> ComplexMat2 {
    let (s, co) = (2.0 * theta).sin_cos();
    ComplexMat2::from_real([[co, s], [s, -co]])
}

/// Quarter-wave plate with fast axis at `theta`:
/// `e^{-i pi/4} [[cos^2 + i sin^2, (1-i) sin cos], [(1-i) sin cos, sin^2 + i cos^2]]`.
pub fn r_qwp(theta: f64) -> ComplexMat2 {
    let (s, co) = theta.sin_cos();
    let off = c(1.0, -1.0) * (s * co);
    let m = ComplexMat2::new(c(co * co, s * s), off, off, c(s * s, co * co));
    m.scale(Complex64::from_polar(1.0, -FRAC_PI_4))
}

/// Polarization-dependent loss `[[0, sin 2 xi_i], [sin 2 xi_j, 0]]`.
pub fn loss_operator(xi_i: f64, xi_j: f64) -> ComplexMat2 {
    ComplexMat2::from_real([[0.0, (2.0 * xi_i).sin()], [(2.0 * xi_j).sin(), 0.0]])
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(into = "ElementRecord", try_from = "ElementRecord")]
pub enum OpticalElement {
    Hwp(f64),
    Qwp(f64),
    Loss(f64, f64),
}

fn reduce(theta: f64) -> f64 {
    let r = theta.rem_euclid(PI);
    if r >= PI {
        0.0
    } else {
        r
    }
}

impl OpticalElement {
    /// Setting angles are reduced to `[0, pi)`; every Jones matrix here is
    /// pi-periodic in them.
    pub fn hwp(theta: f64) -> Self {
        Self::Hwp(reduce(theta))
    }

    pub fn qwp(theta: f64) -> Self {
        Self::Qwp(reduce(theta))
    }

    pub fn loss(xi_i: f64, xi_j: f64) -> Self {
        Self::Loss(reduce(xi_i), reduce(xi_j))
    }

    pub fn matrix(&self) -> ComplexMat2 {
        match *self {
            Self::Hwp(t) => r_hwp(t),
            Self::Qwp(t) => r_qwp(t),
            Self::Loss(i, j) => loss_operator(i, j),
        }
    }

    pub fn angles(&self) -> Vec<f64> {
        match *self {
            Self::Hwp(t) | Self::Qwp(t) => vec![t],
            Self::Loss(i, j) => vec![i, j],
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
struct ElementRecord {
    #[serde(rename = "type")]
    kind: String,
    angles_rad: Vec<f64>,
}

impl From<OpticalElement> for ElementRecord {
    fn from(e: OpticalElement) -> Self {
        let kind = match e {
            OpticalElement::Hwp(_) => "hwp",
            OpticalElement::Qwp(_) => "qwp",
            OpticalElement::Loss(..) => "loss",
        };
        Self { kind: kind.into(), angles_rad: e.angles() }
    }
}

impl TryFrom<ElementRecord> for OpticalElement {
    type Error = String;

    fn try_from(r: ElementRecord) -> std::result::Result<Self, String> {
        match (r.kind.as_str(), r.angles_rad.as_slice()) {
            ("hwp", [t]) => Ok(Self::hwp(*t)),
            ("qwp", [t]) => Ok(Self::qwp(*t)),
            ("loss", [i, j]) => Ok(Self::loss(*i, *j)),
            (k, a) => Err(format!("bad element {k:?} with {} angles", a.len())),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SequenceShape {
    /// `Q H Q . L(xi_i, xi_j) . Q H Q`; realizes any 2x2 operator up to scale.
    Universal,
    /// `HWP(t1) QWP(2 t1) L(xi1, xi2) HWP(pi/4 - t1) QWP(0)`.
    PtState,
    /// `QWP(0) HWP(pi/4) L(xi3, xi3) QWP(phi1) HWP(phi2)`.
    AptState,
    Custom,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OpticalSequence {
    pub elements: Vec<OpticalElement>,
    #[serde(rename = "kind")]
    pub target_kind: SymmetryClass,
    pub t: f64,
    pub s: f64,
    pub a: f64,
    pub shape: SequenceShape,
    pub residual: f64,
}

/// Ordered product of the element matrices; empty is the identity.
pub fn assemble(seq: &OpticalSequence) -> ComplexMat2 {
    product(&seq.elements)
}

pub fn product(elements: &[OpticalElement]) -> ComplexMat2 {
    elements
        .iter()
        .fold(ComplexMat2::identity(), |acc, e| mat_mul(&acc, &e.matrix()))
}

/// `T / max|T_ij|` minus the least-squares multiple of `m`; both as flat
/// real vectors of length 8.
fn scaled_difference(target: &ComplexMat2, m: &ComplexMat2) -> [f64; 8] {
    let mm = m.inner(m).re;
    let k = if mm > 0.0 { m.inner(target) / mm } else { re(0.0) };
    let mut out = [0.0; 8];
    for i in 0..2 {
        for j in 0..2 {
            let d = target[(i, j)] - k * m[(i, j)];
            out[4 * i + 2 * j] = d.re;
            out[4 * i + 2 * j + 1] = d.im;
        }
    }
    out
}

fn normalize_target(target: &ComplexMat2) -> ComplexMat2 {
    let m = target.max_abs();
    if m > 0.0 {
        target.scale_real(1.0 / m)
    } else {
        *target
    }
}

/// Scale-invariant distance: the target is normalized by its largest
/// entry and compared with the best complex multiple of `m`.
pub fn scaled_residual(target: &ComplexMat2, m: &ComplexMat2) -> f64 {
    let t = normalize_target(target);
    scaled_difference(&t, m).iter().map(|v| v * v).sum::<f64>().sqrt()
}

/// Elements of a shape from its free angles.
pub fn shape_elements(shape: SequenceShape, x: &[f64]) -> Vec<OpticalElement> {
    use OpticalElement as E;
    match shape {
        SequenceShape::Universal => vec![
            E::qwp(x[0]),
            E::hwp(x[1]),
            E::qwp(x[2]),
            E::loss(x[3], x[4]),
            E::qwp(x[5]),
            E::hwp(x[6]),
            E::qwp(x[7]),
        ],
        SequenceShape::PtState => vec![
            E::hwp(x[0]),
            E::qwp(2.0 * x[0]),
            E::loss(x[1], x[2]),
            E::hwp(FRAC_PI_4 - x[0]),
            E::qwp(0.0),
        ],
        SequenceShape::AptState => vec![
            E::qwp(0.0),
            E::hwp(FRAC_PI_4),
            E::loss(x[0], x[0]),
            E::qwp(x[1]),
            E::hwp(x[2]),
        ],
        SequenceShape::Custom => Vec::new(),
    }
}

fn shape_dim(shape: SequenceShape) -> usize {
    match shape {
        SequenceShape::Universal => 8,
        SequenceShape::PtState | SequenceShape::AptState => 3,
        SequenceShape::Custom => 0,
    }
}

/// Same product as `product(&shape_elements(..))` without the allocation
/// and angle reduction.
fn shape_matrix(shape: SequenceShape, x: &[f64]) -> ComplexMat2 {
    match shape {
        SequenceShape::Universal => {
            let left = mat_mul(&mat_mul(&r_qwp(x[0]), &r_hwp(x[1])), &r_qwp(x[2]));
            let right = mat_mul(&mat_mul(&r_qwp(x[5]), &r_hwp(x[6])), &r_qwp(x[7]));
            mat_mul(&mat_mul(&left, &loss_operator(x[3], x[4])), &right)
        }
        _ => product(&shape_elements(shape, x)),
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SolveOptions {
    pub restarts: usize,
    pub seed: u64,
    /// Success threshold on the scaled residual.
    pub tolerance: f64,
    pub panel_size: usize,
}

impl Default for SolveOptions {
    fn default() -> Self {
        Self { restarts: 32, seed: 0x5eed, tolerance: 1e-6, panel_size: 10 }
    }
}

/// Seeded panel of Haar-random pure states.
pub fn random_states(n: usize, seed: u64) -> Vec<ComplexVec2> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| {
            let mut g = || -> f64 { StandardNormal.sample(&mut rng) };
            let v = Vector::new([c(g(), g()), c(g(), g())]);
            v.scale(re(1.0 / v.norm()))
        })
        .collect()
}

/// Distance between the rays of two nonzero vectors: `min_chi ||u - e^{i chi} v||`
/// after normalizing both.
pub fn ray_distance(u: &ComplexVec2, v: &ComplexVec2) -> f64 {
    let (nu, nv) = (u.norm(), v.norm());
    if !(nu > 0.0 && nv > 0.0) {
        return std::f64::consts::SQRT_2;
    }
    let (u, v) = (u.scale(re(1.0 / nu)), v.scale(re(1.0 / nv)));
    let z = u.inner(&v);
    if z.norm() == 0.0 {
        return std::f64::consts::SQRT_2;
    }
    // align the phase and measure the difference directly; the overlap
    // form sqrt(2 - 2|<u,v>|) loses half the digits
    let k = z / z.norm();
    [k, k.conj()]
        .iter()
        .map(|k| {
            let d0 = u.components[0] - k * v.components[0];
            let d1 = u.components[1] - k * v.components[1];
            (d0.norm_sqr() + d1.norm_sqr()).sqrt()
        })
        .fold(f64::INFINITY, f64::min)
}

/// Largest ray distance between the actions of `target` and `m` on a
/// panel of states.
pub fn state_action_error(target: &ComplexMat2, m: &ComplexMat2, panel: &[ComplexVec2]) -> f64 {
    panel
        .iter()
        .map(|psi| ray_distance(&target.apply(psi), &m.apply(psi)))
        .fold(0.0, f64::max)
}

fn fit(
    shape: SequenceShape,
    residual: impl Fn(&[f64]) -> Vec<f64> + Sync,
    opts: &SolveOptions,
) -> (Vec<f64>, f64) {
    let cost = |x: &[f64]| residual(x).iter().map(|v| v * v).sum::<f64>();
    let ms = MultiStart {
        restarts: opts.restarts.max(1),
        seed: opts.seed,
        lo: 0.0,
        hi: PI,
        polish_rounds: 4,
        target: (0.01 * opts.tolerance).powi(2),
    };
    let simplex = SimplexOptions { max_evals: 3000 * shape_dim(shape), ..SimplexOptions::default() };
    let (best, _) = multi_start(cost, shape_dim(shape), &ms, &simplex);
    let (x, c) = levenberg_marquardt(&residual, &best.x, 100);
    if c <= best.f {
        (x, c.sqrt())
    } else {
        (best.x, best.f.sqrt())
    }
}

/// Reversal design: angles of the universal sequence realizing
/// `U(t)` up to a complex scale, checked on a random state panel.
pub fn solve_angles(p: &HamiltonianParams, t: f64, opts: &SolveOptions) -> Result<OpticalSequence> {
    if !(t.is_finite() && t >= 0.0) {
        return Err(Error::InvalidParameter(format!("t must be >= 0, got {t}")));
    }
    let target = normalize_target(&propagator_analytic(p, t)?.matrix);
    let shape = SequenceShape::Universal;
    let residual = |x: &[f64]| scaled_difference(&target, &shape_matrix(shape, x)).to_vec();
    let (x, res) = fit(shape, residual, opts);
    let elements = shape_elements(shape, &x);
    let assembled = product(&elements);
    let panel = random_states(opts.panel_size, opts.seed ^ 0xa11ce);
    let panel_err = state_action_error(&target, &assembled, &panel);
    if !(res <= opts.tolerance && panel_err <= opts.tolerance) {
        return Err(Error::NoDecomposition {
            best_residual: res.max(panel_err),
            best_angles: x,
        });
    }
    Ok(OpticalSequence {
        elements,
        target_kind: p.kind,
        t,
        s: p.s,
        a: p.a,
        shape,
        residual: res,
    })
}

/// Angles of the compact five-element design for one input state: the
/// sequence maps `st` onto the ray of `U(t) st`. The residual is the ray
/// distance between the two outputs.
pub fn solve_state_angles(
    p: &HamiltonianParams,
    t: f64,
    st: &PureState,
    opts: &SolveOptions,
) -> Result<OpticalSequence> {
    if !(t.is_finite() && t >= 0.0) {
        return Err(Error::InvalidParameter(format!("t must be >= 0, got {t}")));
    }
    let psi = st.to_vector();
    let want = propagator_analytic(p, t)?.matrix.apply(&psi);
    let want = want.scale(re(1.0 / want.norm()));
    let shape = match p.kind {
        SymmetryClass::Pt => SequenceShape::PtState,
        SymmetryClass::Apt => SequenceShape::AptState,
    };
    // residual: output minus its projection onto the wanted ray
    let residual = |x: &[f64]| {
        let out = shape_matrix(shape, x).apply(&psi);
        let n = out.norm();
        if !(n > 1e-150) {
            return vec![1.0; 4];
        }
        let out = out.scale(re(1.0 / n));
        let k = want.inner(&out);
        let mut r = Vec::with_capacity(4);
        for i in 0..2 {
            let d = out.components[i] - k * want.components[i];
            r.push(d.re);
            r.push(d.im);
        }
        r
    };
    let (x, _) = fit(shape, residual, opts);
    let elements = shape_elements(shape, &x);
    let got = product(&elements).apply(&psi);
    let res = ray_distance(&want, &got);
    if !(res <= opts.tolerance) {
        return Err(Error::NoDecomposition { best_residual: res, best_angles: x });
    }
    Ok(OpticalSequence {
        elements,
        target_kind: p.kind,
        t,
        s: p.s,
        a: p.a,
        shape,
        residual: res,
    })
}
