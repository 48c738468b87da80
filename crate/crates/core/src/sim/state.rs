use num_complex::Complex64;

use super::gate::{qubit_mask, GateOp, Operator};
use crate::error::{Error, Result};

pub const MAX_QUBITS: usize = 3;

const NORM_TOL: f64 = 1e-12;

fn check_width(n_qubits: usize) -> Result<()> {
    if n_qubits == 0 || n_qubits > MAX_QUBITS {
        return Err(Error::InvalidCircuit(format!(
            "register width {n_qubits} outside 1..={MAX_QUBITS}"
        )));
    }
    Ok(())
}

/// Dense statevector of up to three qubits.
#[derive(Clone, Debug, PartialEq)]
pub struct PureState {
    n_qubits: usize,
    amplitudes: Vec<Complex64>,
}

impl PureState {
    /// `|0...0>`
    pub fn zero(n_qubits: usize) -> Result<Self> {
        check_width(n_qubits)?;
        let mut amplitudes = vec![Complex64::new(0.0, 0.0); 1 << n_qubits];
        amplitudes[0] = Complex64::new(1.0, 0.0);
        Ok(Self { n_qubits, amplitudes })
    }

    pub fn from_amplitudes(amplitudes: Vec<Complex64>) -> Result<Self> {
        let len = amplitudes.len();
        if !len.is_power_of_two() || len < 2 {
            return Err(Error::InvalidCircuit(format!("{len} amplitudes is not a qubit register")));
        }
        let n_qubits = len.trailing_zeros() as usize;
        check_width(n_qubits)?;
        let state = Self { n_qubits, amplitudes };
        if (state.norm_sqr() - 1.0).abs() > NORM_TOL {
            return Err(Error::InvalidCircuit(format!(
                "state norm² {} is not 1",
                state.norm_sqr()
            )));
        }
        Ok(state)
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn apply(&mut self, gate: &GateOp) -> Result<()> {
        gate.validate(self.n_qubits)?;
        self.apply_matrix(&gate.matrix(), &gate.qubits);
        Ok(())
    }

    /// Applies a validated local matrix; no bounds checks.
    pub(crate) fn apply_matrix(&mut self, local: &Operator, qubits: &[usize]) {
        let masks: Vec<usize> = qubits.iter().map(|&q| qubit_mask(self.n_qubits, q)).collect();
        let all: usize = masks.iter().sum();
        let k = 1 << masks.len();
        let mut idx = [0usize; 4];
        let mut old = [Complex64::new(0.0, 0.0); 4];
        for base in (0..self.amplitudes.len()).filter(|b| b & all == 0) {
            for (local_i, slot) in idx.iter_mut().enumerate().take(k) {
                *slot = masks
                    .iter()
                    .enumerate()
                    .filter(|(bit, _)| local_i & (1 << (masks.len() - 1 - bit)) != 0)
                    .fold(base, |acc, (_, m)| acc | m);
                old[local_i] = self.amplitudes[*slot];
            }
            for r in 0..k {
                let mut acc = Complex64::new(0.0, 0.0);
                for c in 0..k {
                    acc += local[(r, c)] * old[c];
                }
                self.amplitudes[idx[r]] = acc;
            }
        }
    }

    /// Born probability of reading `1` on `qubit`.
    pub fn probability_one(&self, qubit: usize) -> f64 {
        let m = qubit_mask(self.n_qubits, qubit);
        self.amplitudes
            .iter()
            .enumerate()
            .filter(|(i, _)| i & m != 0)
            .map(|(_, a)| a.norm_sqr())
            .sum()
    }

    /// Projects `qubit` onto `outcome` and renormalizes. Returns the branch probability.
    pub fn collapse(&mut self, qubit: usize, outcome: bool) -> f64 {
        let m = qubit_mask(self.n_qubits, qubit);
        let mut kept = 0.0;
        for (i, a) in self.amplitudes.iter_mut().enumerate() {
            if (i & m != 0) == outcome {
                kept += a.norm_sqr();
            } else {
                *a = Complex64::new(0.0, 0.0);
            }
        }
        if kept > 0.0 {
            let scale = kept.sqrt().recip();
            self.amplitudes.iter_mut().for_each(|a| *a *= scale);
        }
        kept
    }

    /// `|<self|other>|²`
    pub fn fidelity(&self, other: &PureState) -> f64 {
        self.amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| a.conj() * b)
            .sum::<Complex64>()
            .norm_sqr()
    }
}

/// Functional form of [`PureState::apply`].
pub fn apply_gate(state: &PureState, gate: &GateOp) -> Result<PureState> {
    let mut next = state.clone();
    next.apply(gate)?;
    Ok(next)
}

/// Density operator of up to three qubits.
#[derive(Clone, Debug, PartialEq)]
pub struct MixedState {
    n_qubits: usize,
    matrix: Operator,
}

impl MixedState {
    pub fn zero(n_qubits: usize) -> Result<Self> {
        check_width(n_qubits)?;
        let dim = 1 << n_qubits;
        let mut matrix = Operator::zeros(dim, dim);
        matrix[(0, 0)] = Complex64::new(1.0, 0.0);
        Ok(Self { n_qubits, matrix })
    }

    pub fn from_pure(state: &PureState) -> Self {
        let v = nalgebra::DVector::from_column_slice(state.amplitudes());
        Self {
            n_qubits: state.n_qubits(),
            matrix: &v * v.adjoint(),
        }
    }

    pub fn from_matrix(matrix: Operator) -> Result<Self> {
        let dim = matrix.nrows();
        if matrix.ncols() != dim || !dim.is_power_of_two() || dim < 2 {
            return Err(Error::InvalidCircuit(format!(
                "{}x{} is not a register density matrix",
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        let n_qubits = dim.trailing_zeros() as usize;
        check_width(n_qubits)?;
        Ok(Self { n_qubits, matrix })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn matrix(&self) -> &Operator {
        &self.matrix
    }

    pub fn trace(&self) -> f64 {
        self.matrix.trace().re
    }

    /// `Tr(ρ²)`
    pub fn purity(&self) -> f64 {
        self.matrix.iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn hermiticity_error(&self) -> f64 {
        (&self.matrix - self.matrix.adjoint())
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max)
    }

    pub fn min_eigenvalue(&self) -> f64 {
        let herm = (&self.matrix + self.matrix.adjoint()) * Complex64::new(0.5, 0.0);
        herm.symmetric_eigenvalues()
            .iter()
            .copied()
            .fold(f64::INFINITY, f64::min)
    }

    /// Hermitian within 1e-12, unit trace within 1e-12, eigenvalues ≥ -1e-10.
    pub fn is_physical(&self) -> bool {
        self.hermiticity_error() <= 1e-12
            && (self.trace() - 1.0).abs() <= 1e-12
            && self.min_eigenvalue() >= -1e-10
    }

    /// Reduced 2x2 density matrix of one qubit.
    pub fn reduced(&self, qubit: usize) -> [[Complex64; 2]; 2] {
        let m = qubit_mask(self.n_qubits, qubit);
        let dim = self.matrix.nrows();
        let mut out = [[Complex64::new(0.0, 0.0); 2]; 2];
        for i in 0..dim {
            for j in 0..dim {
                if (i & !m) == (j & !m) {
                    out[usize::from(i & m != 0)][usize::from(j & m != 0)] += self.matrix[(i, j)];
                }
            }
        }
        out
    }
}
