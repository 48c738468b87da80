use super::circuit::{Circuit, Event};
use super::shots::{slot_mask, Distribution};
use super::state::PureState;
use crate::error::{Error, Result};

/// Branches below this weight are dropped; far under any tolerance we test.
const PRUNE: f64 = 1e-300;

/// Record distribution of `circuit` summed exactly over every collapse branch.
pub fn exact_probabilities(circuit: &Circuit) -> Result<Distribution> {
    circuit.validate()?;
    if circuit.measurement_count() == 0 {
        return Err(Error::InvalidCircuit("circuit has no measurement".into()));
    }
    let slots = circuit.record_slots();
    let mut probs = vec![0.0; 1 << slots];
    let start = PureState::zero(circuit.n_qubits())?;
    descend(circuit.events(), start, 1.0, 0, slots, &mut probs);
    Distribution::new(slots, probs)
}

fn descend(events: &[Event], mut state: PureState, weight: f64, record: usize, slots: usize, probs: &mut [f64]) {
    for (i, event) in events.iter().enumerate() {
        match event {
            Event::Gate(g) => state.apply_matrix(&g.matrix(), &g.qubits),
            Event::Measure { qubit, slot } => {
                let p1 = state.probability_one(*qubit);
                let rest = &events[i + 1..];
                for (one, p) in [(false, 1.0 - p1), (true, p1)] {
                    if weight * p > PRUNE {
                        let mut branch = state.clone();
                        branch.collapse(*qubit, one);
                        let r = if one { record | slot_mask(slots, *slot) } else { record };
                        descend(rest, branch, weight * p, r, slots, probs);
                    }
                }
                return;
            }
        }
    }
    probs[record] += weight;
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sim::gate::GateOp;

    #[test]
    fn hadamard_splits_evenly() {
        let mut c = Circuit::new(1);
        c.push(GateOp::h(0));
        c.measure(0);
        let d = exact_probabilities(&c).unwrap();
        assert!((d.prob_of("0").unwrap() - 0.5).abs() < 1e-15);
        assert!((d.prob_of("1").unwrap() - 0.5).abs() < 1e-15);
    }

    #[test]
    fn requires_a_measurement() {
        let mut c = Circuit::new(1);
        c.push(GateOp::h(0));
        assert!(exact_probabilities(&c).is_err());
    }

    #[test]
    fn collapse_changes_later_statistics() {
        // H, measure, H, measure: second outcome is uniform regardless of the first
        let mut c = Circuit::new(1);
        c.push(GateOp::h(0));
        c.measure(0);
        c.push(GateOp::h(0));
        c.measure(0);
        let d = exact_probabilities(&c).unwrap();
        for p in d.probs() {
            assert!((p - 0.25).abs() < 1e-15);
        }
    }
}
