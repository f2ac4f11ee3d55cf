//! Two-qubit coherence under identical local dynamics.

use coherence_flow::coherence::{theoretical_period, uniform_grid};
use coherence_flow::hamiltonian::HamiltonianParams;
use coherence_flow::two_qubit::{evolve_two_qubit, two_qubit_coherence, two_qubit_coherence_trace, TwoQubitState};

fn main() -> coherence_flow::Result<()> {
    // broken: every input relaxes to the same value
    for p in [HamiltonianParams::pt(1.8), HamiltonianParams::apt(0.8)] {
        let row: Vec<String> = TwoQubitState::presets()
            .iter()
            .map(|(name, st)| Ok(format!("{name}={:.5}", two_qubit_coherence(&evolve_two_qubit(st, &p, 30.0)?))))
            .collect::<coherence_flow::Result<_>>()?;
        println!("{} a={} at t=30: {}", p.kind, p.a, row.join(" "));
    }
    // unbroken: the single-qubit period carries over
    for p in [HamiltonianParams::pt(0.8), HamiltonianParams::apt(1.8)] {
        let period = theoretical_period(&p).expect("unbroken");
        let tr = two_qubit_coherence_trace(&TwoQubitState::psi3(), &p, &uniform_grid(0.0, 3.0 * period, 1501))?;
        println!(
            "{} a={}: T={period:.5}, measured from psi3 {:.5}",
            p.kind,
            p.a,
            tr.period_estimate.unwrap_or(f64::NAN)
        );
    }
    Ok(())
}
