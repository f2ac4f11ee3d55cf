//! Simulated four-projector tomography of an evolved state, with a
//! bootstrap error bar on its coherence.

use coherence_flow::coherence::l1_coherence;
use coherence_flow::evolution::{evolve_density, PureState};
use coherence_flow::hamiltonian::HamiltonianParams;
use coherence_flow::tomography::{bootstrap_errorbar, reconstruct, simulate_counts, trace_distance};

fn main() -> coherence_flow::Result<()> {
    let p = HamiltonianParams::pt(0.31);
    let rho = evolve_density(&PureState::h_sqrt3v().density(), &p, 1.0)?;
    for exposure in [1_000, 30_000, 1_000_000] {
        let rec = simulate_counts(&rho, exposure, 7)?;
        let est = reconstruct(&rec)?;
        let (_, sd) = bootstrap_errorbar(&rec, |r| l1_coherence(r), 200, 8)?;
        println!(
            "exposure {exposure:>7}: counts {:?}  trace distance {:.4}  C={:.4} +- {sd:.4} (true {:.4})",
            rec.counts,
            trace_distance(&rho, &est),
            l1_coherence(&est),
            l1_coherence(&rho)
        );
    }
    Ok(())
}
