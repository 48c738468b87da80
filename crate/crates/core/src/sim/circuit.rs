use std::collections::HashSet;

use super::gate::GateOp;
use super::state::MAX_QUBITS;
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub enum Event {
    Gate(GateOp),
    /// Projective σz measurement of `qubit`, outcome written to `slot`.
    Measure { qubit: usize, slot: usize },
}

/// Ordered gates and measurements with a classical record.
#[derive(Clone, Debug, PartialEq)]
pub struct Circuit {
    n_qubits: usize,
    events: Vec<Event>,
    record_slots: usize,
}

impl Circuit {
    pub fn new(n_qubits: usize) -> Self {
        Self {
            n_qubits,
            events: Vec::new(),
            record_slots: 0,
        }
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn events(&self) -> &[Event] {
        &self.events
    }

    pub fn record_slots(&self) -> usize {
        self.record_slots
    }

    pub fn push(&mut self, gate: GateOp) -> &mut Self {
        self.events.push(Event::Gate(gate));
        self
    }

    pub fn extend<I: IntoIterator<Item = GateOp>>(&mut self, fragment: I) -> &mut Self {
        self.events.extend(fragment.into_iter().map(Event::Gate));
        self
    }

    /// Measures `qubit` into the next free record slot and returns the slot.
    pub fn measure(&mut self, qubit: usize) -> usize {
        let slot = self.record_slots;
        self.events.push(Event::Measure { qubit, slot });
        self.record_slots += 1;
        slot
    }

    pub fn gates(&self) -> impl Iterator<Item = &GateOp> {
        self.events.iter().filter_map(|e| match e {
            Event::Gate(g) => Some(g),
            Event::Measure { .. } => None,
        })
    }

    pub fn measurement_count(&self) -> usize {
        self.events
            .iter()
            .filter(|e| matches!(e, Event::Measure { .. }))
            .count()
    }

    /// Qubit measured into each slot, in slot order.
    pub fn slot_qubits(&self) -> Vec<usize> {
        let mut out = vec![0; self.record_slots];
        for e in &self.events {
            if let Event::Measure { qubit, slot } = *e {
                out[slot] = qubit;
            }
        }
        out
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_qubits == 0 || self.n_qubits > MAX_QUBITS {
            return Err(Error::InvalidCircuit(format!(
                "register width {} outside 1..={MAX_QUBITS}",
                self.n_qubits
            )));
        }
        if self.record_slots > 16 {
            return Err(Error::InvalidCircuit(format!(
                "{} record slots exceeds the supported 16",
                self.record_slots
            )));
        }
        let mut written = HashSet::new();
        for e in &self.events {
            match e {
                Event::Gate(g) => g.validate(self.n_qubits)?,
                Event::Measure { qubit, slot } => {
                    if *qubit >= self.n_qubits {
                        return Err(Error::InvalidCircuit(format!("measured qubit {qubit} out of range")));
                    }
                    if *slot >= self.record_slots || !written.insert(*slot) {
                        return Err(Error::InvalidCircuit(format!("record slot {slot} reused or out of range")));
                    }
                }
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn slots_are_allocated_in_order() {
        let mut c = Circuit::new(2);
        c.push(GateOp::h(0));
        assert_eq!(c.measure(1), 0);
        assert_eq!(c.measure(0), 1);
        assert_eq!(c.slot_qubits(), vec![1, 0]);
        assert_eq!(c.measurement_count(), 2);
        assert!(c.validate().is_ok());
    }

    #[test]
    fn bad_references_fail_validation() {
        let mut c = Circuit::new(1);
        c.push(GateOp::cx(0, 1));
        assert!(c.validate().is_err());

        let mut c = Circuit::new(1);
        c.measure(3);
        assert!(c.validate().is_err());

        assert!(Circuit::new(4).validate().is_err());
    }
}
