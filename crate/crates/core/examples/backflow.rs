//! Counts coherence stationary points per period and compares them with
//! the analytic prediction.

use coherence_flow::coherence::{backflow_report, max_circular_mismatch, verify_extrema_conditions};
use coherence_flow::evolution::PureState;
use coherence_flow::hamiltonian::HamiltonianParams;

fn main() -> coherence_flow::Result<()> {
    let st = PureState::h_sqrt3v();
    for p in [HamiltonianParams::pt(0.47), HamiltonianParams::apt(1.5), HamiltonianParams::apt(2.8)] {
        let report = backflow_report(&st, &p)?;
        let pred = verify_extrema_conditions(&st, &p)?;
        let found: Vec<f64> = report.stationary.iter().map(|e| e.t).collect();
        println!(
            "{} a={}: {} stationary points ({:?}), predicted {}, max mismatch {:.1e}",
            p.kind,
            p.a,
            report.zeros_per_period,
            report.classification,
            pred.points.len(),
            max_circular_mismatch(&pred.times(), &found, pred.period)
        );
        for e in &report.stationary {
            println!("    t={:.6} C={:.6} {:?}", e.t, e.value, e.kind);
        }
    }
    Ok(())
}
