//! Simulated polarization tomography: projective probabilities, Poisson
//! counts, maximum-likelihood reconstruction and bootstrap error bars.
//!
//! Measured bases are `|H>`, `|V>`, `|R> = (|H> - i|V>)/sqrt 2` and
//! `|D> = (|H> + |V>)/sqrt 2`. In Bloch coordinates (see [`crate::bloch`])
//! `p_H = (1 + z)/2`, `p_V = (1 - z)/2`, `p_R = (1 - y)/2`, `p_D = (1 + x)/2`.

use std::f64::consts::FRAC_1_SQRT_2;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Poisson};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::evolution::DensityMatrix;
use crate::linalg::{c, re, ComplexMat2, Vector};
use crate::optimize::{polish, SimplexOptions};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Basis {
    H,
    V,
    R,
    D,
}

impl Basis {
    pub const ALL: [Basis; 4] = [Basis::H, Basis::V, Basis::R, Basis::D];

    pub fn projector(self) -> ComplexMat2 {
        let h = FRAC_1_SQRT_2;
        let v = match self {
            Basis::H => Vector::new([re(1.0), re(0.0)]),
            Basis::V => Vector::new([re(0.0), re(1.0)]),
            Basis::R => Vector::new([re(h), c(0.0, -h)]),
            Basis::D => Vector::new([re(h), re(h)]),
        };
        v.outer()
    }
}

/// The four measurement projectors in `H, V, R, D` order.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BasisSet {
    pub projectors: [ComplexMat2; 4],
}

impl Default for BasisSet {
    fn default() -> Self {
        Self { projectors: Basis::ALL.map(Basis::projector) }
    }
}

/// `Tr(Pi_b rho)` for `b = H, V, R, D`.
pub fn ideal_probabilities(rho: &DensityMatrix) -> [f64; 4] {
    BasisSet::default()
        .projectors
        .map(|p| (p * rho.rho).trace().re)
}

/// Photon counts per basis setting (`H, V, R, D`) at a fixed exposure.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CountRecord {
    pub counts: [u64; 4],
    /// Mean photon number per setting for a unit-probability outcome.
    pub exposure: u64,
    pub seed: u64,
}

fn poisson(rng: &mut ChaCha8Rng, mean: f64) -> u64 {
    if !(mean > 0.0) {
        return 0;
    }
    let d = Poisson::new(mean).expect("positive finite mean");
    d.sample(rng) as u64
}

/// Independent Poisson counts with means `exposure * p_b`.
pub fn simulate_counts(rho: &DensityMatrix, exposure: u64, seed: u64) -> Result<CountRecord> {
    if exposure == 0 {
        return Err(Error::InvalidParameter("exposure must be >= 1".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let probs = ideal_probabilities(rho);
    let counts = probs.map(|p| poisson(&mut rng, exposure as f64 * p.max(0.0)));
    Ok(CountRecord { counts, exposure, seed })
}

/// Poisson log-likelihood of a Bloch vector, up to constants.
fn log_likelihood(n: &[f64; 4], exposure: f64, r: [f64; 3]) -> f64 {
    let [x, y, z] = r;
    let probs = [(1.0 + z) / 2.0, (1.0 - z) / 2.0, (1.0 - y) / 2.0, (1.0 + x) / 2.0];
    let mut ll = 0.0;
    for (k, p) in n.iter().zip(probs) {
        if *k > 0.0 {
            if p <= 0.0 {
                return f64::NEG_INFINITY;
            }
            ll += k * p.ln();
        }
        ll -= exposure * p;
    }
    ll
}

fn sphere(theta: f64, phi: f64) -> [f64; 3] {
    let (st, ct) = theta.sin_cos();
    let (sp, cp) = phi.sin_cos();
    [st * cp, st * sp, ct]
}

/// Maximum-likelihood reconstruction from real-valued counts (for example
/// the expected counts `exposure * p_b`).
pub fn reconstruct_from_counts(n: [f64; 4], exposure: f64) -> Result<DensityMatrix> {
    if n.iter().any(|v| !(v.is_finite() && *v >= 0.0)) || !(exposure > 0.0) {
        return Err(Error::InvalidParameter("counts must be finite and >= 0, exposure > 0".into()));
    }
    let hv = n[0] + n[1];
    if !(hv > 0.0) {
        return Err(Error::InsufficientData("no counts in the H/V setting".into()));
    }
    // the likelihood is concave in r and separable; unconstrained maximizer
    let z = (n[0] - n[1]) / hv;
    let x = 2.0 * n[3] / exposure - 1.0;
    let y = 1.0 - 2.0 * n[2] / exposure;
    let len = (x * x + y * y + z * z).sqrt();
    if len <= 1.0 {
        return DensityMatrix::from_bloch(x, y, z);
    }
    if len <= 1.0 + 1e-10 {
        // rounding overshoot of a pure state; the sphere maximum is the
        // radial projection to within the overshoot
        return DensityMatrix::from_bloch(x / len, y / len, z / len);
    }
    // otherwise the maximum lies on the sphere |r| = 1
    let theta0 = (z / len).clamp(-1.0, 1.0).acos();
    let phi0 = y.atan2(x);
    let cost = |a: &[f64]| -log_likelihood(&n, exposure, sphere(a[0], a[1]));
    let opts = SimplexOptions { initial_step: 0.05, ..SimplexOptions::default() };
    let best = polish(cost, &[theta0, phi0], &opts, 4);
    let [x, y, z] = sphere(best.x[0], best.x[1]);
    let len = (x * x + y * y + z * z).sqrt();
    DensityMatrix::from_bloch(x / len, y / len, z / len)
}

/// Maximum-likelihood density matrix for a count record.
pub fn reconstruct(rec: &CountRecord) -> Result<DensityMatrix> {
    reconstruct_from_counts(rec.counts.map(|k| k as f64), rec.exposure as f64)
}

/// Expected (noiseless) counts of a state at an exposure.
pub fn expected_counts(rho: &DensityMatrix, exposure: f64) -> [f64; 4] {
    ideal_probabilities(rho).map(|p| exposure * p)
}

/// Parametric bootstrap: resample each count as Poisson around its
/// observed value, reconstruct and evaluate `quantity`. Returns the sample
/// mean and standard deviation. Resample `i` draws from its own stream of
/// the seeded generator, so the result does not depend on scheduling.
pub fn bootstrap_errorbar<Q>(rec: &CountRecord, quantity: Q, resamples: usize, seed: u64) -> Result<(f64, f64)>
where
    Q: Fn(&DensityMatrix) -> f64 + Sync,
{
    if resamples < 100 {
        return Err(Error::InvalidParameter(format!("resamples must be >= 100, got {resamples}")));
    }
    let values: Vec<f64> = (0..resamples)
        .into_par_iter()
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(i as u64);
            let counts = rec.counts.map(|k| poisson(&mut rng, k as f64));
            let boot = CountRecord { counts, ..*rec };
            reconstruct(&boot).map(|rho| quantity(&rho))
        })
        .collect::<Result<_>>()?;
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    Ok((mean, var.sqrt()))
}

/// `(1/2) ||a - b||_1`.
pub fn trace_distance(a: &DensityMatrix, b: &DensityMatrix) -> f64 {
    let d = a.rho - b.rho;
    let ev = d.hermitian_eigenvalues();
    0.5 * (ev[0].abs() + ev[1].abs())
}

/// Row-major `[re, im]` pairs.
pub fn matrix_record(m: &ComplexMat2) -> Vec<[f64; 2]> {
    m.entries.iter().flatten().map(|z| [z.re, z.im]).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bloch::bloch_vector;
    use crate::coherence::l1_coherence;
    use crate::evolution::{evolve_density, PureState};
    use crate::hamiltonian::HamiltonianParams;

    fn random_state(rng: &mut ChaCha8Rng, mixed: bool) -> DensityMatrix {
        use rand::Rng;
        let z: f64 = rng.random_range(-1.0..1.0);
        let ph: f64 = rng.random_range(0.0..std::f64::consts::TAU);
        let r: f64 = if mixed { rng.random_range(0.0..1.0) } else { 1.0 };
        let s = (1.0 - z * z).sqrt();
        DensityMatrix::from_bloch(r * s * ph.cos(), r * s * ph.sin(), r * z).unwrap()
    }

    #[test]
    fn probability_examples() {
        let p = ideal_probabilities(&PureState::h().density());
        assert_eq!(p.map(|v| (v * 1e12).round() / 1e12), [1.0, 0.0, 0.5, 0.5]);
        let p = ideal_probabilities(&DensityMatrix::maximally_mixed());
        assert!(p.iter().all(|v| (v - 0.5).abs() < 1e-15));
        let p = ideal_probabilities(&PureState::d().density());
        assert!((p[3] - 1.0).abs() < 1e-15 && (p[2] - 0.5).abs() < 1e-15);
    }

    #[test]
    fn projectors_are_idempotent() {
        for p in BasisSet::default().projectors {
            assert!(crate::linalg::frobenius_dist(&(p * p), &p) < 1e-15);
            assert!((p.trace() - re(1.0)).norm() < 1e-15);
        }
    }

    #[test]
    fn count_examples() {
        for seed in 0..5 {
            assert_eq!(simulate_counts(&PureState::h().density(), 30000, seed).unwrap().counts[1], 0);
        }
        let rec = simulate_counts(&DensityMatrix::maximally_mixed(), 30000, 11).unwrap();
        let sigma = 15000f64.sqrt();
        assert!(rec.counts.iter().all(|&k| (k as f64 - 15000.0).abs() < 5.0 * sigma));
        assert_eq!(rec, simulate_counts(&DensityMatrix::maximally_mixed(), 30000, 11).unwrap());
        assert!(simulate_counts(&DensityMatrix::maximally_mixed(), 0, 1).is_err());
    }

    #[test]
    fn noiseless_round_trip() {
        let rho = PureState::h().density();
        let back = reconstruct_from_counts(expected_counts(&rho, 1.0), 1.0).unwrap();
        assert!(trace_distance(&rho, &back) < 1e-12);
        let rho = PureState::h_sqrt3v().density();
        let back = reconstruct_from_counts(expected_counts(&rho, 30000.0), 30000.0).unwrap();
        assert!((l1_coherence(&back) - 0.75f64.sqrt()).abs() < 1e-9);

        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for i in 0..100 {
            let rho = random_state(&mut rng, i % 2 == 0);
            let back = reconstruct_from_counts(expected_counts(&rho, 1e4), 1e4).unwrap();
            assert!(crate::linalg::frobenius_dist(&rho.rho, &back.rho) < 1e-9);
            let (a, b) = (bloch_vector(&rho), bloch_vector(&back));
            assert!((a.x - b.x).abs() < 1e-9 && (a.y - b.y).abs() < 1e-9 && (a.z - b.z).abs() < 1e-9);
        }
    }

    #[test]
    fn out_of_ball_counts_land_on_sphere() {
        // x = 2*600/1000 - 1 = 0.2, y = 1 - 0 = 1, z = 1: far outside
        let rho = reconstruct_from_counts([1000.0, 0.0, 0.0, 600.0], 1000.0).unwrap();
        assert!(rho.is_physical(1e-10));
        let b = bloch_vector(&rho);
        assert!((b.radius() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn zero_counts_are_insufficient() {
        let rec = CountRecord { counts: [0; 4], exposure: 100, seed: 0 };
        assert!(matches!(reconstruct(&rec), Err(Error::InsufficientData(_))));
    }

    #[test]
    fn noisy_reconstruction_accuracy() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let mut total = 0.0;
        for seed in 0..50 {
            let rho = random_state(&mut rng, false);
            let back = reconstruct(&simulate_counts(&rho, 30000, seed).unwrap()).unwrap();
            assert!(back.is_physical(1e-10));
            total += trace_distance(&rho, &back);
        }
        assert!(total / 50.0 < 0.01);
    }

    #[test]
    fn bootstrap_behaviour() {
        let rho = evolve_density(&PureState::h().density(), &HamiltonianParams::pt(0.31), 1.0).unwrap();
        let exact = expected_counts(&rho, 1e6).map(|v| v.round() as u64);
        let rec = CountRecord { counts: exact, exposure: 1_000_000, seed: 0 };
        let (mean, sd) = bootstrap_errorbar(&rec, l1_coherence, 200, 9).unwrap();
        assert!(sd < 0.005 && (mean - l1_coherence(&rho)).abs() < 0.01);
        let again = bootstrap_errorbar(&rec, l1_coherence, 200, 9).unwrap();
        assert_eq!((mean, sd), again);
        assert!(bootstrap_errorbar(&rec, l1_coherence, 50, 9).is_err());
    }

    #[test]
    fn trace_distance_examples() {
        let h = PureState::h().density();
        let v = PureState::v().density();
        assert!((trace_distance(&h, &v) - 1.0).abs() < 1e-15);
        assert!((trace_distance(&h, &DensityMatrix::maximally_mixed()) - 0.5).abs() < 1e-15);
    }
}
