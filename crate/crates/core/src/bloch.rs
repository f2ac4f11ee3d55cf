//! Bloch vectors and trajectories.
//!
//! Convention: `x = 2 Re rho_12`, `y = -2 Im rho_12`, `z = rho_11 - rho_22`,
//! i.e. the expectation values of the Pauli matrices. With it
//! `|D> = (|H> + |V>)/sqrt 2` sits at `+x` and `|R> = (|H> - i|V>)/sqrt 2`
//! at `-y`; the tomography module reads `y` from the R-basis probability as
//! `y = 1 - 2 p_R`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::evolution::{evolve_pure, DensityMatrix, PureState};
use crate::hamiltonian::HamiltonianParams;
use crate::linalg::ComplexVec2;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BlochPoint {
    pub t: f64,
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl BlochPoint {
    pub fn radius(&self) -> f64 {
        (self.x * self.x + self.y * self.y + self.z * self.z).sqrt()
    }

    /// Distance from the z axis; equals the l1 coherence of the state.
    pub fn transverse(&self) -> f64 {
        self.x.hypot(self.y)
    }
}

/// Bloch vector of a qubit density matrix, with `t = 0`.
pub fn bloch_vector(rho: &DensityMatrix) -> BlochPoint {
    let r = &rho.rho;
    let off = r[(0, 1)];
    BlochPoint {
        t: 0.0,
        x: 2.0 * off.re,
        y: -2.0 * off.im,
        z: r[(0, 0)].re - r[(1, 1)].re,
    }
}

fn bloch_of_vector(v: &ComplexVec2, t: f64) -> BlochPoint {
    let [h, w] = v.components;
    let off = h * w.conj();
    BlochPoint {
        t,
        x: 2.0 * off.re,
        y: -2.0 * off.im,
        z: h.norm_sqr() - w.norm_sqr(),
    }
}

/// Bloch trajectory of an evolving pure state, one point per grid time.
pub fn trajectory(st: &PureState, p: &HamiltonianParams, grid: &[f64]) -> Result<Vec<BlochPoint>> {
    if grid.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::InvalidParameter("grid must be sorted ascending".into()));
    }
    grid.par_iter()
        .map(|&t| evolve_pure(st, p, t).map(|v| bloch_of_vector(&v, t)))
        .collect()
}
