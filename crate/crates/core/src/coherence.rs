//! l1-norm coherence: closed-form trajectories, periods, stable values and
//! stationary-point analysis.
//!
//! For a pure state the single-qubit l1 coherence is
//! `2 |psi_H| |psi_V| / (|psi_H|^2 + |psi_V|^2) = 2 sqrt(x y) / (x + y)`
//! where `x`, `y` are (any common multiple of) the squared component
//! magnitudes of `U |phi>`. The regime-specific `x`, `y` below are written
//! in terms of `theta = w s t`; in the broken regimes the hyperbolic
//! functions carry a common factor `e^{-theta}` so that nothing overflows.

use std::f64::consts::{FRAC_PI_2, PI};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::evolution::{propagator_analytic, DensityMatrix, PureState};
use crate::hamiltonian::{HamiltonianParams, Regime, SymmetryClass};
use crate::linalg::TOL;

/// `sum_{i != j} |rho_ij|`.
pub fn l1_coherence<const N: usize>(rho: &DensityMatrix<N>) -> f64 {
    rho.rho.off_diagonal_l1()
}

#[inline]
fn from_xy(x: f64, y: f64) -> f64 {
    let x = x.max(0.0);
    let y = y.max(0.0);
    let sum = x + y;
    if sum <= 0.0 {
        return 0.0;
    }
    (2.0 * (x * y).sqrt() / sum).min(1.0)
}

/// Squared component magnitudes from the `A, B, C` representation of `U`.
fn xy_from_abc(st: &PureState, kind: SymmetryClass, a: f64, b: f64, c: f64) -> (f64, f64) {
    let (al, be) = (st.alpha, st.beta);
    let (sp, cp) = st.phi.sin_cos();
    match kind {
        SymmetryClass::Pt => {
            let amb = a - b;
            let apb = a + b;
            let x = al * al * amb * amb + c * c * be * be + 2.0 * al * be * amb * c * sp;
            let y = c * c * al * al + apb * apb * be * be - 2.0 * al * be * apb * c * sp;
            (x, y)
        }
        SymmetryClass::Apt => {
            let x = (a * al + c * be * cp).powi(2) + (b * al + c * be * sp).powi(2);
            let y = ((a * cp + b * sp) * be + c * al).powi(2) + (a * sp - b * cp).powi(2) * be * be;
            (x, y)
        }
    }
}

/// Coherence from the propagator's `A, B, C` for any regime.
pub fn coherence_from_abc(st: &PureState, p: &HamiltonianParams, t: f64) -> Result<f64> {
    let (a, b, c) = propagator_analytic(p, t)?.abc;
    let (x, y) = xy_from_abc(st, p.kind, a, b, c);
    Ok(from_xy(x, y))
}

/// `cosh`, `sinh` of `theta`, both multiplied by `e^{-theta}`.
#[inline]
fn scaled_hyperbolic(theta: f64) -> (f64, f64) {
    let e = (-2.0 * theta).exp();
    (0.5 * (1.0 + e), 0.5 * (1.0 - e))
}

/// Regime-specific `(x, y)`; valid for negative `t` too (used by the
/// finite-difference stencil at the window edge).
fn xy_raw(st: &PureState, p: &HamiltonianParams, t: f64) -> (f64, f64) {
    let (al, be) = (st.alpha, st.beta);
    let (sp, cp) = st.phi.sin_cos();
    let a = p.a;
    let tau = p.s * t;
    let disc = p.unbroken_discriminant();
    let near_ep = (a - 1.0).abs() <= TOL.exceptional_band;
    if near_ep {
        let t_abs = t.abs();
        let (aa, bb, cc) = propagator_analytic(p, t_abs).expect("finite t").abc;
        // U(-t) differs from U(t) by the sign of B and C
        let sign = if t < 0.0 { -1.0 } else { 1.0 };
        return xy_from_abc(st, p.kind, aa, sign * bb, sign * cc);
    }
    let w = disc.abs().sqrt();
    let theta = w * tau;
    match (p.kind, disc > 0.0) {
        (SymmetryClass::Pt, true) => {
            let (s2, c2) = (2.0 * theta).sin_cos();
            let sin2 = theta.sin().powi(2);
            let x = al * al * (w * w * c2 + a * w * s2) + sin2 + al * be * sp * (w * s2 + 2.0 * a * sin2);
            let y = be * be * (w * w * c2 - a * w * s2) + sin2 - al * be * sp * (w * s2 - 2.0 * a * sin2);
            (x, y)
        }
        (SymmetryClass::Pt, false) => {
            let (ch, sh) = scaled_hyperbolic(theta);
            let r = a / w;
            let x = al * al * (ch + r * sh).powi(2)
                + be * be * sh * sh / (w * w)
                + 2.0 * al * be * sp * (ch * sh / w + a * sh * sh / (w * w));
            let y = be * be * (ch - r * sh).powi(2) + al * al * sh * sh / (w * w)
                - 2.0 * al * be * sp * (ch * sh / w - a * sh * sh / (w * w));
            (x, y)
        }
        (SymmetryClass::Apt, true) => {
            let s2 = (2.0 * theta).sin();
            let sin2 = theta.sin().powi(2);
            let common = al * be * w * cp * s2 + sin2 * (1.0 - 2.0 * a * al * be * sp);
            (w * w * al * al + common, w * w * be * be + common)
        }
        (SymmetryClass::Apt, false) => {
            let (ch, sh) = scaled_hyperbolic(theta);
            let diag = w * w * ch * ch + a * a * sh * sh;
            let cross = 2.0 * al * be * sh * (w * cp * ch - a * sh * sp);
            (diag * al * al + be * be * sh * sh + cross, diag * be * be + al * al * sh * sh + cross)
        }
    }
}

fn closed_form_raw(st: &PureState, p: &HamiltonianParams, t: f64) -> f64 {
    let (x, y) = xy_raw(st, p, t);
    from_xy(x, y)
}

/// Closed-form `C_l1(t)` for an initial pure state.
pub fn coherence_closed_form(st: &PureState, p: &HamiltonianParams, t: f64) -> Result<f64> {
    if !(t.is_finite() && t >= 0.0) {
        return Err(Error::InvalidParameter(format!("t must be >= 0, got {t}")));
    }
    Ok(closed_form_raw(st, p, t))
}

/// `pi / (s sqrt|1 - a^2|)` in the unbroken regime.
pub fn theoretical_period(p: &HamiltonianParams) -> Option<f64> {
    match p.regime() {
        Regime::Unbroken => Some(PI / (p.s * p.unbroken_discriminant().sqrt())),
        _ => None,
    }
}

/// Long-time coherence in the broken regime: `1/a` (PT) or `1` (APT).
pub fn asymptotic_value(p: &HamiltonianParams) -> Option<f64> {
    match (p.regime(), p.kind) {
        (Regime::Broken, SymmetryClass::Pt) => Some(1.0 / p.a),
        (Regime::Broken, SymmetryClass::Apt) => Some(1.0),
        _ => None,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ExtremumKind {
    Max,
    Min,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Extremum {
    pub t: f64,
    pub value: f64,
    pub kind: ExtremumKind,
}

/// Sampled coherence curve with derived features.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CoherenceTrace {
    pub times: Vec<f64>,
    pub values: Vec<f64>,
    pub extrema: Vec<Extremum>,
    pub period_estimate: Option<f64>,
    pub asymptote_estimate: Option<f64>,
    /// `|slope| < 1e-6` over the final tenth of the window.
    pub asymptote_converged: bool,
    pub warnings: Vec<String>,
}

impl CoherenceTrace {
    /// Builds a trace from samples, filling in the period and asymptote
    /// estimates from whatever extrema are supplied.
    pub fn from_samples(times: Vec<f64>, values: Vec<f64>, extrema: Vec<Extremum>) -> Self {
        let period_estimate = estimate_period(&extrema);
        let (asymptote, converged) = estimate_asymptote(&times, &values);
        Self {
            times,
            values,
            extrema,
            period_estimate,
            asymptote_estimate: Some(asymptote).filter(|v| v.is_finite()),
            asymptote_converged: converged,
            warnings: Vec::new(),
        }
    }

    pub fn range(&self) -> f64 {
        let lo = self.values.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        hi - lo
    }
}

/// Evenly spaced grid with `samples` points including both ends.
pub fn uniform_grid(t0: f64, t1: f64, samples: usize) -> Vec<f64> {
    let n = samples.max(2);
    let dt = (t1 - t0) / (n - 1) as f64;
    (0..n).map(|i| if i == n - 1 { t1 } else { t0 + dt * i as f64 }).collect()
}

/// Closed-form coherence on a grid.
pub fn sample_closed_form(st: &PureState, p: &HamiltonianParams, grid: &[f64]) -> Result<Vec<f64>> {
    if grid.iter().any(|t| !(t.is_finite() && *t >= 0.0)) {
        return Err(Error::InvalidParameter("grid times must be finite and >= 0".into()));
    }
    Ok(grid.par_iter().map(|&t| closed_form_raw(st, p, t)).collect())
}

/// Traces whose sampled range is below this are treated as constant.
const CONSTANT_RANGE: f64 = 1e-9;
const STENCIL_STEP: f64 = 1e-4;
const TIME_TOL: f64 = 1e-11;

fn derivative(st: &PureState, p: &HamiltonianParams, t: f64) -> f64 {
    let h = STENCIL_STEP / p.s;
    let f = |dt: f64| closed_form_raw(st, p, t + dt);
    (f(-2.0 * h) - 8.0 * f(-h) + 8.0 * f(h) - f(2.0 * h)) / (12.0 * h)
}

/// Golden-section search for the extremum of `f` on `[lo, hi]`.
pub(crate) fn golden_section(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64, kind: ExtremumKind) -> f64 {
    let g = 0.5 * (5f64.sqrt() - 1.0);
    let sign = if kind == ExtremumKind::Max { -1.0 } else { 1.0 };
    let f = |t: f64| sign * f(t);
    let mut x1 = hi - g * (hi - lo);
    let mut x2 = lo + g * (hi - lo);
    let (mut f1, mut f2) = (f(x1), f(x2));
    while hi - lo > TIME_TOL * hi.abs().max(1.0) {
        if f1 < f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - g * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + g * (hi - lo);
            f2 = f(x2);
        }
    }
    0.5 * (lo + hi)
}

/// Extrema of a sampled curve, each refined by golden-section search of
/// `f` over the neighbouring sample interval.
pub(crate) fn refine_sampled_extrema(times: &[f64], values: &[f64], f: impl Fn(f64) -> f64 + Sync) -> Vec<Extremum> {
    let mut out: Vec<Extremum> = (1..values.len().saturating_sub(1))
        .into_par_iter()
        .filter_map(|i| {
            let (l, m, r) = (values[i - 1], values[i], values[i + 1]);
            let kind = if m > l && m >= r {
                ExtremumKind::Max
            } else if m < l && m <= r {
                ExtremumKind::Min
            } else {
                return None;
            };
            let t = golden_section(&f, times[i - 1], times[i + 1], kind);
            Some(Extremum { t, value: f(t), kind })
        })
        .collect();
    out.dedup_by(|b, a| (b.t - a.t).abs() < 1e-9);
    out
}

/// Locate a stationary point bracketed by a derivative sign change.
fn refine(st: &PureState, p: &HamiltonianParams, lo: f64, hi: f64, kind: ExtremumKind) -> f64 {
    let (mut a, mut b) = (lo, hi);
    let da = derivative(st, p, a);
    for _ in 0..200 {
        if b - a <= TIME_TOL {
            break;
        }
        let m = 0.5 * (a + b);
        let dm = derivative(st, p, m);
        if dm == 0.0 {
            return m;
        }
        if (dm > 0.0) == (da > 0.0) {
            a = m;
        } else {
            b = m;
        }
    }
    let t = 0.5 * (a + b);
    // a zero of coherence is a kink; the stencil straddles it, so fall back
    // to a direct search on the values
    if kind == ExtremumKind::Min && closed_form_raw(st, p, t) < 1e-3 {
        let w = 4.0 * STENCIL_STEP / p.s;
        return golden_section(|x| closed_form_raw(st, p, x), (t - w).max(lo), (t + w).min(hi), kind);
    }
    t
}

/// Dense sampling plus bisection on the sign of the numerically
/// differentiated closed form.
pub fn find_extrema(
    st: &PureState,
    p: &HamiltonianParams,
    window: (f64, f64),
    samples: usize,
) -> Result<CoherenceTrace> {
    let (t0, t1) = window;
    if !(t0.is_finite() && t1.is_finite() && t0 >= 0.0 && t1 > t0) {
        return Err(Error::InvalidParameter(format!(
            "window must satisfy 0 <= t0 < t1, got ({t0}, {t1})"
        )));
    }
    if samples < 64 {
        return Err(Error::InvalidParameter(format!("samples must be >= 64, got {samples}")));
    }
    let times = uniform_grid(t0, t1, samples);
    let values = sample_closed_form(st, p, &times)?;
    let mut trace = CoherenceTrace::from_samples(times.clone(), values, Vec::new());
    if trace.range() < CONSTANT_RANGE {
        return Ok(trace);
    }

    let slopes: Vec<f64> = times.par_iter().map(|&t| derivative(st, p, t)).collect();
    let mut brackets = Vec::new();
    for i in 0..slopes.len() - 1 {
        let (d0, d1) = (slopes[i], slopes[i + 1]);
        if d0 > 0.0 && d1 <= 0.0 {
            brackets.push((i, ExtremumKind::Max));
        } else if d0 < 0.0 && d1 >= 0.0 {
            brackets.push((i, ExtremumKind::Min));
        }
    }
    let mut extrema: Vec<Extremum> = brackets
        .par_iter()
        .map(|&(i, kind)| {
            let t = refine(st, p, times[i], times[i + 1], kind);
            Extremum { t, value: closed_form_raw(st, p, t), kind }
        })
        // endpoints of the window are not interior stationary points
        .filter(|e| e.t > t0 + TIME_TOL && e.t < t1 - TIME_TOL)
        .collect();
    extrema.sort_by(|a, b| a.t.total_cmp(&b.t));
    extrema.dedup_by(|b, a| (b.t - a.t).abs() < 1e-9);

    let dt = (t1 - t0) / (samples - 1) as f64;
    if extrema.windows(2).any(|w| w[1].t - w[0].t < 2.0 * dt) {
        trace
            .warnings
            .push("adjacent extrema closer than two samples; increase samples".into());
    }
    if let Some(period) = theoretical_period(p) {
        if t1 - t0 < period {
            trace
                .warnings
                .push(format!("window shorter than one period ({period:.6})"));
        }
    }
    trace.period_estimate = estimate_period(&extrema);
    trace.extrema = extrema;
    Ok(trace)
}

/// Smallest shift `k` such that the extremum sequence repeats with a
/// constant time offset; returns the mean offset.
pub fn estimate_period(extrema: &[Extremum]) -> Option<f64> {
    let n = extrema.len();
    for k in 1..n {
        let pairs = n - k;
        let offsets: Vec<f64> = (0..pairs).map(|i| extrema[i + k].t - extrema[i].t).collect();
        let consistent = (0..pairs).all(|i| {
            extrema[i].kind == extrema[i + k].kind
                && (extrema[i].value - extrema[i + k].value).abs() <= 1e-6
        });
        let mean = offsets.iter().sum::<f64>() / pairs as f64;
        if consistent && offsets.iter().all(|d| (d - mean).abs() <= 1e-6 * mean.max(1.0)) {
            return Some(mean);
        }
    }
    None
}

/// Mean over the final tenth of the samples, and whether the least-squares
/// slope there is below `1e-6` per unit time.
pub fn estimate_asymptote(times: &[f64], values: &[f64]) -> (f64, bool) {
    let n = times.len().min(values.len());
    if n == 0 {
        return (f64::NAN, false);
    }
    let start = n - (n / 10).max(2).min(n);
    let ts = &times[start..n];
    let vs = &values[start..n];
    let m = ts.len() as f64;
    let tm = ts.iter().sum::<f64>() / m;
    let vm = vs.iter().sum::<f64>() / m;
    let sxx: f64 = ts.iter().map(|t| (t - tm).powi(2)).sum();
    let sxy: f64 = ts.iter().zip(vs).map(|(t, v)| (t - tm) * (v - vm)).sum();
    let slope = if sxx > 0.0 { sxy / sxx } else { 0.0 };
    (vm, slope.abs() < 1e-6)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum BackflowClass {
    /// Two complete backflows per period.
    DoubleTouch,
    SingleBackflow,
    Constant,
    /// No oscillation: broken regime or exceptional point.
    Monotonic,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BackflowReport {
    pub zeros_per_period: usize,
    pub classification: BackflowClass,
    /// Maxima per period reaching at least `C(0) - 1e-6`.
    pub full_touches: usize,
    pub period: Option<f64>,
    /// Stationary points of one period, shifted into `[T, 2T)`.
    pub stationary: Vec<Extremum>,
}

/// Counts the stationary points of `C(t)` in one period and classifies
/// the backflow pattern.
pub fn backflow_report(st: &PureState, p: &HamiltonianParams) -> Result<BackflowReport> {
    let Some(period) = theoretical_period(p) else {
        return Ok(BackflowReport {
            zeros_per_period: 0,
            classification: BackflowClass::Monotonic,
            full_touches: 0,
            period: None,
            stationary: Vec::new(),
        });
    };
    let trace = find_extrema(st, p, (0.0, 3.0 * period), 2048)?;
    if trace.range() < CONSTANT_RANGE {
        return Ok(BackflowReport {
            zeros_per_period: 0,
            classification: BackflowClass::Constant,
            full_touches: 0,
            period: Some(period),
            stationary: Vec::new(),
        });
    }
    // one representative per residue class mod T; points sitting on the
    // window boundary would otherwise be counted zero or two times
    let mut stationary: Vec<Extremum> = Vec::new();
    for e in trace.extrema.iter().filter(|e| e.t >= 0.5 * period && e.t <= 2.5 * period) {
        let r = e.t.rem_euclid(period);
        let dup = stationary.iter().any(|s| {
            let d = (s.t - period - r).rem_euclid(period);
            d.min(period - d) < 1e-6 * period
        });
        if !dup {
            stationary.push(Extremum { t: period + r, ..*e });
        }
    }
    stationary.sort_by(|a, b| a.t.total_cmp(&b.t));
    let c0 = closed_form_raw(st, p, 0.0);
    let maxima = stationary.iter().filter(|e| e.kind == ExtremumKind::Max).count();
    let full_touches = stationary
        .iter()
        .filter(|e| e.kind == ExtremumKind::Max && e.value >= c0 - 1e-6)
        .count();
    let classification = if maxima >= 2 && full_touches >= 2 {
        BackflowClass::DoubleTouch
    } else {
        BackflowClass::SingleBackflow
    };
    Ok(BackflowReport {
        zeros_per_period: stationary.len(),
        classification,
        full_touches,
        period: Some(period),
        stationary,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum PredictionStatus {
    /// `alpha, beta in (0, 1)` and `sin(phi) >= 0`.
    WithinHypotheses,
    OutsideHypotheses,
    /// The conditions carry no information (e.g. constant coherence).
    Degenerate,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum StationaryBranch {
    /// `dC/dm = 0`, i.e. `m = 1` and `C = 1`.
    UnitRatio,
    /// `dm/dtheta = 0`.
    RatioStationary,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PredictedStationary {
    pub t: f64,
    pub branch: StationaryBranch,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExtremaPrediction {
    pub status: PredictionStatus,
    pub period: f64,
    /// Sorted times in `[0, period)`.
    pub points: Vec<PredictedStationary>,
}

impl ExtremaPrediction {
    pub fn times(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.t).collect()
    }
}

/// Both roots in `[0, pi)` of `tan(2 theta) = num / den`.
fn tan2_roots(num: f64, den: f64) -> [f64; 2] {
    let half = (num.atan2(den) / 2.0).rem_euclid(FRAC_PI_2);
    [half, half + FRAC_PI_2]
}

/// Real roots in `[0, pi)` of `q2 u^2 + q1 u + q0 = 0` with `u = tan(theta)`;
/// a vanishing `q2` contributes the root at infinity (`theta = pi/2`).
fn tan_quadratic_roots(q2: f64, q1: f64, q0: f64) -> Vec<f64> {
    let scale = q2.abs().max(q1.abs()).max(q0.abs());
    if scale == 0.0 {
        return Vec::new();
    }
    let mut out = Vec::new();
    if q2.abs() <= 1e-14 * scale {
        out.push(FRAC_PI_2);
        if q1.abs() > 1e-14 * scale {
            out.push((-q0 / q1).atan().rem_euclid(PI));
        }
        return out;
    }
    let disc = q1 * q1 - 4.0 * q2 * q0;
    if disc < 0.0 {
        return out;
    }
    let sq = disc.sqrt();
    // stable quadratic formula
    let q = -0.5 * (q1 + if q1 >= 0.0 { sq } else { -sq });
    let r1 = q / q2;
    let r2 = if q != 0.0 { q0 / q } else { 0.0 };
    out.push(r1.atan().rem_euclid(PI));
    out.push(r2.atan().rem_euclid(PI));
    out
}

/// Stationary times of `C(t)` predicted from the closed-form conditions.
///
/// PT: `x = y` gives `tan 2 theta = -(alpha^2 - beta^2) w / (a + 2 alpha beta sin phi)`;
/// `dm/dtheta = 0` is a quadratic in `tan theta` obtained from `x`, `y`
/// after the substitution `u = tan theta`. APT: only
/// `tan 2 theta = -2 alpha beta w cos phi / (1 - 2 a alpha beta sin phi)`
/// survives unless `alpha^2 = beta^2`, where the coherence is constant.
pub fn verify_extrema_conditions(st: &PureState, p: &HamiltonianParams) -> Result<ExtremaPrediction> {
    let period = theoretical_period(p)
        .ok_or_else(|| Error::NotPeriodic(format!("{} a={} is not in the unbroken regime", p.kind, p.a)))?;
    let (al, be) = (st.alpha, st.beta);
    let (sp, cp) = st.phi.sin_cos();
    let a = p.a;
    let w = p.unbroken_discriminant().sqrt();
    let to_time = |theta: f64| theta / (w * p.s);

    let inside = al > 0.0 && al < 1.0 && be > 0.0 && be < 1.0 && sp >= -1e-12;
    let mut status = if inside {
        PredictionStatus::WithinHypotheses
    } else {
        PredictionStatus::OutsideHypotheses
    };
    let mut points = Vec::new();
    match p.kind {
        SymmetryClass::Pt => {
            for th in tan2_roots(-(al * al - be * be) * w, a + 2.0 * al * be * sp) {
                points.push(PredictedStationary { t: to_time(th), branch: StationaryBranch::UnitRatio });
            }
            // x, y times (1 + u^2) as quadratics in u = tan(theta)
            let ab = al * be * sp;
            let x2 = 1.0 - al * al * w * w + 2.0 * a * ab;
            let x1 = 2.0 * w * (a * al * al + ab);
            let x0 = al * al * w * w;
            let y2 = 1.0 - be * be * w * w + 2.0 * a * ab;
            let y1 = -2.0 * w * (a * be * be + ab);
            let y0 = be * be * w * w;
            let roots = tan_quadratic_roots(x2 * y1 - x1 * y2, 2.0 * (x2 * y0 - x0 * y2), x1 * y0 - x0 * y1);
            if roots.len() < 2 && status == PredictionStatus::WithinHypotheses {
                status = PredictionStatus::Degenerate;
            }
            for th in roots {
                points.push(PredictedStationary { t: to_time(th), branch: StationaryBranch::RatioStationary });
            }
        }
        SymmetryClass::Apt => {
            let num = -2.0 * al * be * w * cp;
            let den = 1.0 - 2.0 * a * al * be * sp;
            if (al * al - be * be).abs() < 1e-12 || (num.abs() < 1e-14 && den.abs() < 1e-14) {
                status = PredictionStatus::Degenerate;
            }
            for th in tan2_roots(num, den) {
                points.push(PredictedStationary { t: to_time(th), branch: StationaryBranch::RatioStationary });
            }
        }
    }
    points.sort_by(|x, y| x.t.total_cmp(&y.t));
    Ok(ExtremaPrediction { status, period, points })
}

/// Largest circular distance (mod `period`) from each predicted time to
/// the nearest found time.
pub fn max_circular_mismatch(predicted: &[f64], found: &[f64], period: f64) -> f64 {
    predicted
        .iter()
        .map(|&tp| {
            found
                .iter()
                .map(|&tf| {
                    let d = (tp - tf).rem_euclid(period);
                    d.min(period - d)
                })
                .fold(f64::INFINITY, f64::min)
        })
        .fold(0.0, f64::max)
}
