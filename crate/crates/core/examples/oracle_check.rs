//! Closed-form propagator against the series matrix exponential, across
//! both regimes and right next to the exceptional point.

use coherence_flow::evolution::{generator, propagator_analytic};
use coherence_flow::hamiltonian::{HamiltonianParams, SymmetryClass};
use coherence_flow::linalg::{mat_exp_oracle, relative_frobenius_dist};

fn main() -> coherence_flow::Result<()> {
    for kind in [SymmetryClass::Pt, SymmetryClass::Apt] {
        for a in [0.31, 0.999999, 1.0, 1.000001, 2.8] {
            let p = HamiltonianParams::unit(kind, a)?;
            let worst = [0.1, 1.0, 5.0, 20.0]
                .iter()
                .map(|&t| {
                    let u = propagator_analytic(&p, t)?.full_matrix();
                    Ok(relative_frobenius_dist(&u, &mat_exp_oracle(&generator(&p), t)?))
                })
                .collect::<coherence_flow::Result<Vec<f64>>>()?
                .into_iter()
                .fold(0.0, f64::max);
            println!("{kind} a={a:<9} regime {:?}  max distance {worst:.2e}", p.regime());
        }
    }
    Ok(())
}
