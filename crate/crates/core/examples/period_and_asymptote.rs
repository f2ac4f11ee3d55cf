//! Oscillation periods in the unbroken regimes and stable values in the
//! broken ones, for the three standard input states.

use coherence_flow::coherence::{asymptotic_value, coherence_closed_form, find_extrema, theoretical_period};
use coherence_flow::evolution::PureState;
use coherence_flow::hamiltonian::HamiltonianParams;

fn main() -> coherence_flow::Result<()> {
    let states = [("H", PureState::h()), ("D", PureState::d()), ("H+sqrt3V", PureState::h_sqrt3v())];

    println!("unbroken");
    for p in [
        HamiltonianParams::pt(0.31),
        HamiltonianParams::pt(0.47),
        HamiltonianParams::apt(1.5),
        HamiltonianParams::apt(2.8),
    ] {
        let t = theoretical_period(&p).expect("unbroken");
        let tr = find_extrema(&PureState::h_sqrt3v(), &p, (0.0, 4.0 * t), 4096)?;
        println!(
            "  {} a={:<4}  T={t:.5}  measured={:.5}",
            p.kind,
            p.a,
            tr.period_estimate.unwrap_or(f64::NAN)
        );
    }

    println!("broken, C at s*t = 10");
    for p in [HamiltonianParams::pt(1.5), HamiltonianParams::pt(2.8), HamiltonianParams::apt(0.31)] {
        let limit = asymptotic_value(&p).expect("broken");
        let row: Vec<String> = states
            .iter()
            .map(|(name, st)| Ok(format!("{name}={:.4}", coherence_closed_form(st, &p, 10.0)?)))
            .collect::<coherence_flow::Result<_>>()?;
        println!("  {} a={:<4}  limit={limit:.4}  {}", p.kind, p.a, row.join(" "));
    }
    Ok(())
}
