//! Density-matrix backend with gate noise.
//!
//! Each classical record branch carries its own unnormalized density matrix.
//! After every gate the backend applies, in order: the unitary, the
//! depolarizing channel on the touched qubits, and thermal relaxation on each
//! touched qubit for the gate duration. A measurement splits every branch
//! with the two σz projectors; readout confusion only changes what is
//! reported, never the post-measurement state.

use num_complex::Complex64;

use super::circuit::{Circuit, Event};
use super::gate::{embed, GateOp, Operator};
use super::noise::NoiseModel;
use super::shots::{slot_mask, Distribution};
use super::state::MixedState;
use crate::error::{Error, Result};

#[derive(Clone, Debug)]
pub struct DensityOutcome {
    /// Reported record distribution, readout confusion included.
    pub distribution: Distribution,
    /// Unconditional final state, summed over all record branches.
    pub state: MixedState,
}

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

fn op2(entries: [Complex64; 4]) -> Operator {
    Operator::from_row_slice(2, 2, &entries)
}

fn paulis() -> [Operator; 4] {
    let z = c(0.0);
    let i = Complex64::new(0.0, 1.0);
    [
        op2([c(1.0), z, z, c(1.0)]),
        op2([z, c(1.0), c(1.0), z]),
        op2([z, -i, i, z]),
        op2([c(1.0), z, z, c(-1.0)]),
    ]
}

fn conjugate(rho: &Operator, k: &Operator) -> Operator {
    k * rho * k.adjoint()
}

/// With probability `p` the touched qubits are replaced by the maximally mixed state.
fn depolarize(rho: &Operator, p: f64, qubits: &[usize], n: usize) -> Operator {
    if p == 0.0 {
        return rho.clone();
    }
    let singles: Vec<Vec<Operator>> = qubits
        .iter()
        .map(|&q| paulis().iter().map(|s| embed(s, &[q], n)).collect())
        .collect();
    let mut strings: Vec<Operator> = vec![Operator::identity(1 << n, 1 << n)];
    for per_qubit in &singles {
        strings = strings
            .iter()
            .flat_map(|acc| per_qubit.iter().map(move |s| acc * s))
            .collect();
    }
    let weight = p / strings.len() as f64;
    let mut out = rho * c(1.0 - p);
    for s in &strings {
        out += conjugate(rho, s) * c(weight);
    }
    out
}

fn relax(rho: &Operator, noise: &NoiseModel, duration: f64, qubit: usize, n: usize) -> Operator {
    let (gamma, extra) = noise.relaxation(duration);
    let z = c(0.0);
    let mut out = rho.clone();
    if gamma > 0.0 {
        let k0 = embed(&op2([c(1.0), z, z, c((1.0 - gamma).sqrt())]), &[qubit], n);
        let k1 = embed(&op2([z, c(gamma.sqrt()), z, z]), &[qubit], n);
        out = conjugate(&out, &k0) + conjugate(&out, &k1);
    }
    if extra < 1.0 {
        let mu = 1.0 - extra * extra;
        let k0 = embed(&op2([c(1.0), z, z, c(extra)]), &[qubit], n);
        let k1 = embed(&op2([z, z, z, c(mu.sqrt())]), &[qubit], n);
        out = conjugate(&out, &k0) + conjugate(&out, &k1);
    }
    out
}

fn apply_noisy_gate(rho: &Operator, gate: &GateOp, unitary: &Operator, noise: Option<&NoiseModel>, n: usize) -> Operator {
    let mut out = conjugate(rho, unitary);
    if let Some(noise) = noise {
        let class = gate.kind.class();
        out = depolarize(&out, noise.depolarizing_for(class), &gate.qubits, n);
        let duration = noise.durations.for_class(class);
        for &q in &gate.qubits {
            out = relax(&out, noise, duration, q, n);
        }
    }
    out
}

/// Evolves the circuit as a density matrix, with `noise` if given.
///
/// Without noise the returned distribution equals the statevector branch sum.
pub fn run_density(circuit: &Circuit, noise: Option<&NoiseModel>) -> Result<DensityOutcome> {
    circuit.validate()?;
    if let Some(m) = noise {
        m.validate()?;
    }
    let n = circuit.n_qubits();
    let slots = circuit.record_slots();
    let dim = 1 << n;
    let mut start = Operator::zeros(dim, dim);
    start[(0, 0)] = c(1.0);
    let mut branches: Vec<(usize, Operator)> = vec![(0, start)];

    for event in circuit.events() {
        match event {
            Event::Gate(g) => {
                let u = embed(&g.matrix(), &g.qubits, n);
                for (_, rho) in branches.iter_mut() {
                    *rho = apply_noisy_gate(rho, g, &u, noise, n);
                }
            }
            Event::Measure { qubit, slot } => {
                let z = c(0.0);
                let p0 = embed(&op2([c(1.0), z, z, z]), &[*qubit], n);
                let p1 = embed(&op2([z, z, z, c(1.0)]), &[*qubit], n);
                let bit = slot_mask(slots, *slot);
                branches = branches
                    .into_iter()
                    .flat_map(|(record, rho)| {
                        [(record, conjugate(&rho, &p0)), (record | bit, conjugate(&rho, &p1))]
                    })
                    .filter(|(_, rho)| rho.trace().re > 0.0)
                    .collect();
            }
        }
    }

    let mut true_probs = vec![0.0; 1 << slots];
    let mut total = Operator::zeros(dim, dim);
    for (record, rho) in &branches {
        true_probs[*record] += rho.trace().re;
        total += rho;
    }
    let reported = match noise {
        Some(m) => confuse(&true_probs, &circuit.slot_qubits(), m),
        None => true_probs,
    };
    let state = MixedState::from_matrix(total)?;
    if !state.trace().is_finite() {
        return Err(Error::InvalidCircuit("density evolution diverged".into()));
    }
    Ok(DensityOutcome {
        distribution: Distribution::new(slots, reported)?,
        state,
    })
}

/// Pushes the true-record distribution through each slot's readout matrix.
fn confuse(probs: &[f64], slot_qubits: &[usize], noise: &NoiseModel) -> Vec<f64> {
    let slots = slot_qubits.len();
    let mut current = probs.to_vec();
    for (slot, &qubit) in slot_qubits.iter().enumerate() {
        let m = noise.readout_for(qubit).0;
        let bit = slot_mask(slots, slot);
        let mut next = vec![0.0; current.len()];
        for (record, &p) in current.iter().enumerate() {
            let truth = usize::from(record & bit != 0);
            next[record & !bit] += p * m[truth][0];
            next[record | bit] += p * m[truth][1];
        }
        current = next;
    }
    current
}

/// Final state of a measurement-free circuit as a density matrix.
pub fn evolve_mixed(circuit: &Circuit, noise: Option<&NoiseModel>) -> Result<MixedState> {
    if circuit.measurement_count() != 0 {
        return Err(Error::InvalidCircuit("evolve_mixed takes a circuit without measurements".into()));
    }
    Ok(run_density(circuit, noise)?.state)
}
