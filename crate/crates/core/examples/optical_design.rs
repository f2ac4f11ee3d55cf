//! Waveplate-and-loss sequences reproducing the propagator at one time.

use coherence_flow::evolution::PureState;
use coherence_flow::hamiltonian::HamiltonianParams;
use coherence_flow::optics::{solve_angles, solve_state_angles, SolveOptions};

fn main() -> coherence_flow::Result<()> {
    let opts = SolveOptions::default();
    for (p, t) in [(HamiltonianParams::pt(0.31), 1.0), (HamiltonianParams::apt(0.8), 2.5)] {
        let seq = solve_angles(&p, t, &opts)?;
        println!("{} a={} t={t}: residual {:.2e}", p.kind, p.a, seq.residual);
        for el in &seq.elements {
            let deg: Vec<String> = el.angles().iter().map(|x| format!("{:.3}", x.to_degrees())).collect();
            println!("    {el:?}  [{}] deg", deg.join(", "));
        }
    }
    let seq = solve_state_angles(&HamiltonianParams::pt(0.47), 1.2, &PureState::h(), &opts)?;
    println!("state-level design for |H>: {} elements, residual {:.2e}", seq.elements.len(), seq.residual);
    Ok(())
}
