//! Two qubits under identical local PT or APT dynamics.
//!
//! The joint generator `H (x) I + I (x) H` has commuting terms, so the
//! propagator factorizes as `U (x) U`. Coherence is measured in the
//! computational basis `|00>, |01>, |10>, |11>`.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::coherence::{refine_sampled_extrema, CoherenceTrace};
use crate::error::{Error, Result};
use crate::evolution::{evolve_density_with, generator, propagator_analytic, DensityMatrix};
use crate::hamiltonian::HamiltonianParams;
use crate::linalg::{mat_exp_oracle, re, ComplexMat2, ComplexMat4, ComplexVec2, ComplexVec4, Vector};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TwoQubitState {
    pub rho4: ComplexMat4,
}

impl TwoQubitState {
    pub fn new(rho4: ComplexMat4) -> Result<Self> {
        DensityMatrix::new(rho4).map(|d| Self { rho4: d.rho })
    }

    pub fn from_vector(v: &ComplexVec4) -> Result<Self> {
        DensityMatrix::from_pure(v).map(|d| Self { rho4: d.rho })
    }

    pub fn product(a: &ComplexVec2, b: &ComplexVec2) -> Result<Self> {
        Self::from_vector(&a.kron(b))
    }

    pub fn density(&self) -> DensityMatrix<4> {
        DensityMatrix { rho: self.rho4 }
    }

    /// `(|00> + |01> + |11>)/sqrt 3`.
    pub fn psi1() -> Self {
        let k = re(1.0 / 3f64.sqrt());
        Self::from_vector(&Vector::new([k, k, re(0.0), k])).expect("normalized")
    }

    /// `(|00> + e^{i pi/5} |11>)/sqrt 2`.
    pub fn psi2() -> Self {
        let k = 1.0 / 2f64.sqrt();
        let v = Vector::new([re(k), re(0.0), re(0.0), Complex64::from_polar(k, PI / 5.0)]);
        Self::from_vector(&v).expect("normalized")
    }

    /// `(|00> + |01> + |10> + e^{i pi/5} |11>)/2`.
    pub fn psi3() -> Self {
        let v = Vector::new([re(0.5), re(0.5), re(0.5), Complex64::from_polar(0.5, PI / 5.0)]);
        Self::from_vector(&v).expect("normalized")
    }

    pub fn presets() -> [(&'static str, Self); 3] {
        [("psi1", Self::psi1()), ("psi2", Self::psi2()), ("psi3", Self::psi3())]
    }
}

/// `U (x) U` with the full (unscaled) single-qubit propagator.
pub fn two_qubit_propagator(p: &HamiltonianParams, t: f64) -> Result<ComplexMat4> {
    let u = propagator_analytic(p, t)?.full_matrix();
    let out = u.kron(&u);
    if !out.is_finite() {
        return Err(Error::Range(format!("two-qubit propagator overflows at t={t}")));
    }
    Ok(out)
}

/// `exp(-i (H_A (x) I + I (x) H_B) t)` by the series oracle, for different
/// parameters on the two qubits.
pub fn two_qubit_propagator_mixed(pa: &HamiltonianParams, pb: &HamiltonianParams, t: f64) -> Result<ComplexMat4> {
    let id = ComplexMat2::identity();
    let g = generator(pa).kron(&id) + id.kron(&generator(pb));
    mat_exp_oracle(&g, t)
}

pub fn evolve_two_qubit(st: &TwoQubitState, p: &HamiltonianParams, t: f64) -> Result<TwoQubitState> {
    // the scaled matrix keeps long broken-regime times finite; the scale
    // cancels in the renormalization
    let u = propagator_analytic(p, t)?.normalized_matrix();
    let rho = evolve_density_with(&st.density(), &u.kron(&u))?;
    Ok(TwoQubitState { rho4: rho.rho })
}

/// Sum of the 12 off-diagonal magnitudes.
pub fn two_qubit_coherence(st: &TwoQubitState) -> f64 {
    st.rho4.off_diagonal_l1()
}

/// Coherence sampled on a grid, with locally refined extrema and the
/// derived period and asymptote estimates.
pub fn two_qubit_coherence_trace(
    initial: &TwoQubitState,
    p: &HamiltonianParams,
    grid: &[f64],
) -> Result<CoherenceTrace> {
    if grid.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::InvalidParameter("grid must be sorted ascending".into()));
    }
    let values: Vec<f64> = grid
        .par_iter()
        .map(|&t| evolve_two_qubit(initial, p, t).map(|s| two_qubit_coherence(&s)))
        .collect::<Result<_>>()?;
    let f = |t: f64| {
        evolve_two_qubit(initial, p, t)
            .map(|s| two_qubit_coherence(&s))
            .unwrap_or(f64::NAN)
    };
    let extrema = refine_sampled_extrema(grid, &values, f);
    Ok(CoherenceTrace::from_samples(grid.to_vec(), values, extrema))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coherence::{theoretical_period, uniform_grid};
    use crate::evolution::{evolve_pure, PureState};
    use crate::hamiltonian::SymmetryClass;
    use crate::linalg::{relative_frobenius_dist, ComplexMat4, I};

    #[test]
    fn identity_at_zero() {
        let u = two_qubit_propagator(&HamiltonianParams::pt(0.8), 0.0).unwrap();
        assert_eq!(u, ComplexMat4::identity());
    }

    #[test]
    fn hermitian_limit() {
        let p = HamiltonianParams { kind: SymmetryClass::Pt, s: 1.0, a: 1e-300 };
        let u = two_qubit_propagator(&p, std::f64::consts::FRAC_PI_2).unwrap();
        let x = ComplexMat2::sigma_x().scale(-I);
        assert!(relative_frobenius_dist(&u, &x.kron(&x)) < 1e-15);
    }

    #[test]
    fn matches_oracle() {
        let p = HamiltonianParams::pt(0.8);
        let u = two_qubit_propagator(&p, 1.0).unwrap();
        let o = two_qubit_propagator_mixed(&p, &p, 1.0).unwrap();
        assert!(relative_frobenius_dist(&u, &o) < 1e-8);
        // different parameters still factorize
        let (pa, pb) = (HamiltonianParams::pt(0.5), HamiltonianParams::apt(1.7));
        let o = two_qubit_propagator_mixed(&pa, &pb, 0.9).unwrap();
        let ua = propagator_analytic(&pa, 0.9).unwrap().matrix;
        let ub = propagator_analytic(&pb, 0.9).unwrap().matrix;
        assert!(relative_frobenius_dist(&ua.kron(&ub), &o) < 1e-10);
    }

    #[test]
    fn presets_are_normalized() {
        for (_, s) in TwoQubitState::presets() {
            assert!(s.density().is_physical(1e-12));
        }
        let c = two_qubit_coherence(&TwoQubitState::psi1());
        assert!((c - 2.0).abs() < 1e-12);
        let c = two_qubit_coherence(&TwoQubitState::psi3());
        assert!((c - 3.0).abs() < 1e-12);
    }

    #[test]
    fn broken_regime_limit_is_state_independent() {
        for p in [HamiltonianParams::pt(1.8), HamiltonianParams::apt(0.8)] {
            let c: Vec<f64> = TwoQubitState::presets()
                .iter()
                .map(|(_, s)| two_qubit_coherence(&evolve_two_qubit(s, &p, 30.0).unwrap()))
                .collect();
            assert!((c[0] - c[1]).abs() < 1e-3 && (c[1] - c[2]).abs() < 1e-3, "{c:?}");
        }
        // product of two single-qubit limits: (1 + 1/a)^2 - 1
        let c = two_qubit_coherence(&evolve_two_qubit(&TwoQubitState::psi1(), &HamiltonianParams::pt(1.8), 40.0).unwrap());
        assert!((c - ((1.0 + 1.0 / 1.8f64).powi(2) - 1.0)).abs() < 1e-9);
    }

    #[test]
    fn unbroken_traces_are_periodic() {
        for (st, p, period) in [
            (TwoQubitState::psi2(), HamiltonianParams::pt(0.8), PI / 0.6),
            (TwoQubitState::psi3(), HamiltonianParams::apt(1.8), PI / 2.24f64.sqrt()),
        ] {
            assert!((theoretical_period(&p).unwrap() - period).abs() < 1e-12);
            let tr = two_qubit_coherence_trace(&st, &p, &uniform_grid(0.0, 3.0 * period, 1501)).unwrap();
            assert!((tr.period_estimate.unwrap() - period).abs() < 1e-6, "{:?}", tr.period_estimate);
            for &t in &[0.3, 1.1, 2.0] {
                let a = two_qubit_coherence(&evolve_two_qubit(&st, &p, t).unwrap());
                let b = two_qubit_coherence(&evolve_two_qubit(&st, &p, t + period).unwrap());
                assert!((a - b).abs() < 1e-8);
            }
        }
    }

    #[test]
    fn diagonal_state_starts_incoherent() {
        let st = TwoQubitState::product(&PureState::h().to_vector(), &PureState::h().to_vector()).unwrap();
        let tr = two_qubit_coherence_trace(&st, &HamiltonianParams::pt(0.5), &[0.0, 0.5, 1.0]).unwrap();
        assert_eq!(tr.values[0], 0.0);
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn product_states_factorize(a1 in 0.0f64..1.0, b1 in 0.0f64..1.0, f1 in 0.0f64..6.3,
                                        a2 in 0.0f64..1.0, b2 in 0.0f64..1.0, f2 in 0.0f64..6.3,
                                        a in 0.05f64..3.0, apt in any::<bool>(), t in 0.0f64..10.0) {
                prop_assume!(a1 + b1 > 1e-3 && a2 + b2 > 1e-3);
                let s1 = PureState::normalized(a1, b1, f1).unwrap();
                let s2 = PureState::normalized(a2, b2, f2).unwrap();
                let p = if apt { HamiltonianParams::apt(a) } else { HamiltonianParams::pt(a) };
                let joint = evolve_two_qubit(&TwoQubitState::product(&s1.to_vector(), &s2.to_vector()).unwrap(), &p, t).unwrap();
                let split = TwoQubitState::product(&evolve_pure(&s1, &p, t).unwrap(), &evolve_pure(&s2, &p, t).unwrap()).unwrap();
                prop_assert!((two_qubit_coherence(&joint) - two_qubit_coherence(&split)).abs() <= 1e-9);
                prop_assert!(joint.density().is_physical(1e-10));
            }
        }
    }
}
