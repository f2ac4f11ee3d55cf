//! Bloch-vector orbit of |D> under anti-PT dynamics: the state stays on
//! the equator, so coherence never changes.

use coherence_flow::bloch::trajectory;
use coherence_flow::coherence::uniform_grid;
use coherence_flow::evolution::PureState;
use coherence_flow::hamiltonian::HamiltonianParams;

fn main() -> coherence_flow::Result<()> {
    let p = HamiltonianParams::apt(1.5);
    for pt in trajectory(&PureState::d(), &p, &uniform_grid(0.0, 3.0, 7))? {
        println!(
            "t={:.2}  ({:+.4}, {:+.4}, {:+.4})  transverse={:.6}",
            pt.t,
            pt.x,
            pt.y,
            pt.z,
            pt.transverse()
        );
    }
    // a generic state sweeps out of the equatorial plane
    let orbit = trajectory(&PureState::h_sqrt3v(), &HamiltonianParams::pt(0.47), &uniform_grid(0.0, 3.56, 200))?;
    let zmax = orbit.iter().map(|b| b.z.abs()).fold(0.0, f64::max);
    println!("H+sqrt3V under PT a=0.47: max |z| over one period {zmax:.4}");
    Ok(())
}
