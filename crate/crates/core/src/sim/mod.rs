//! Dense few-qubit simulation: statevector with mid-circuit collapse, density
//! matrix with gate noise, exact branch sums, and shot sampling.

pub mod circuit;
pub mod decompose;
pub mod density;
pub mod exact;
pub mod gate;
pub mod noise;
pub mod shots;
pub mod state;

pub use circuit::{Circuit, Event};
pub use density::{evolve_mixed, run_density, DensityOutcome};
pub use exact::exact_probabilities;
pub use gate::{embed, phase_distance, GateClass, GateKind, GateOp, Operator};
pub use noise::{GateDurations, NoiseModel, ReadoutConfusion};
pub use shots::{bitstring, run_shots, sample_counts, Distribution, ShotCounts};
pub use state::{apply_gate, MixedState, PureState};

/// Outcome distribution of `circuit`: exact branch sum without noise, density
/// backend with it.
pub fn outcome_distribution(circuit: &Circuit, noise: Option<&NoiseModel>) -> crate::Result<Distribution> {
    match noise {
        None => exact_probabilities(circuit),
        Some(m) => Ok(run_density(circuit, Some(m))?.distribution),
    }
}

/// Product of a gate list as one operator on the full register.
pub fn fragment_unitary(fragment: &[GateOp], n_qubits: usize) -> Operator {
    let dim = 1 << n_qubits;
    fragment.iter().fold(Operator::identity(dim, dim), |acc, g| {
        embed(&g.matrix(), &g.qubits, n_qubits) * acc
    })
}
