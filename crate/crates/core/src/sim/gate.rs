use std::f64::consts::FRAC_1_SQRT_2;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type Operator = DMatrix<Complex64>;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum GateClass {
    Single,
    Two,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum GateKind {
    H,
    /// `diag(1, e^{iα})`
    U1(f64),
    /// `(1/√2) [[1, -e^{iβ}], [e^{iα}, e^{i(α+β)}]]`
    U2(f64, f64),
    /// `exp(-i θ σz / 2)`
    Rz(f64),
    /// First qubit controls, second is the target.
    Cx,
    /// `exp(i (λ/2) σz ⊗ σz)`, diagonal with phases `±λ/2`.
    Szz(f64),
}

impl GateKind {
    pub fn arity(&self) -> usize {
        match self {
            GateKind::Cx | GateKind::Szz(_) => 2,
            _ => 1,
        }
    }

    pub fn class(&self) -> GateClass {
        if self.arity() == 1 {
            GateClass::Single
        } else {
            GateClass::Two
        }
    }

    fn params_finite(&self) -> bool {
        match *self {
            GateKind::H | GateKind::Cx => true,
            GateKind::U1(a) | GateKind::Rz(a) | GateKind::Szz(a) => a.is_finite(),
            GateKind::U2(a, b) => a.is_finite() && b.is_finite(),
        }
    }

    /// Local matrix on the gate's own qubits, first listed qubit most significant.
    pub fn matrix(&self) -> Operator {
        let c = Complex64::new;
        let phase = |t: f64| Complex64::from_polar(1.0, t);
        match *self {
            GateKind::H => {
                let s = c(FRAC_1_SQRT_2, 0.0);
                Operator::from_row_slice(2, 2, &[s, s, s, -s])
            }
            GateKind::U1(a) => Operator::from_row_slice(2, 2, &[c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), phase(a)]),
            GateKind::U2(a, b) => {
                let s = FRAC_1_SQRT_2;
                Operator::from_row_slice(
                    2,
                    2,
                    &[c(s, 0.0), -phase(b) * s, phase(a) * s, phase(a + b) * s],
                )
            }
            GateKind::Rz(t) => {
                Operator::from_row_slice(2, 2, &[phase(-t / 2.0), c(0.0, 0.0), c(0.0, 0.0), phase(t / 2.0)])
            }
            GateKind::Cx => {
                let mut m = Operator::zeros(4, 4);
                m[(0, 0)] = c(1.0, 0.0);
                m[(1, 1)] = c(1.0, 0.0);
                m[(2, 3)] = c(1.0, 0.0);
                m[(3, 2)] = c(1.0, 0.0);
                m
            }
            GateKind::Szz(l) => {
                let even = phase(l / 2.0);
                let odd = phase(-l / 2.0);
                Operator::from_diagonal(&nalgebra::DVector::from_vec(vec![even, odd, odd, even]))
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct GateOp {
    pub kind: GateKind,
    pub qubits: Vec<usize>,
}

impl GateOp {
    pub fn new(kind: GateKind, qubits: Vec<usize>) -> Self {
        Self { kind, qubits }
    }

    pub fn h(q: usize) -> Self {
        Self::new(GateKind::H, vec![q])
    }

    pub fn u1(q: usize, alpha: f64) -> Self {
        Self::new(GateKind::U1(alpha), vec![q])
    }

    pub fn u2(q: usize, alpha: f64, beta: f64) -> Self {
        Self::new(GateKind::U2(alpha, beta), vec![q])
    }

    pub fn rz(q: usize, theta: f64) -> Self {
        Self::new(GateKind::Rz(theta), vec![q])
    }

    pub fn cx(control: usize, target: usize) -> Self {
        Self::new(GateKind::Cx, vec![control, target])
    }

    pub fn szz(a: usize, b: usize, lambda: f64) -> Self {
        Self::new(GateKind::Szz(lambda), vec![a, b])
    }

    pub fn matrix(&self) -> Operator {
        self.kind.matrix()
    }

    pub fn validate(&self, n_qubits: usize) -> Result<()> {
        if self.qubits.len() != self.kind.arity() {
            return Err(Error::InvalidCircuit(format!(
                "{:?} acts on {} qubits, got {:?}",
                self.kind,
                self.kind.arity(),
                self.qubits
            )));
        }
        if let Some(&q) = self.qubits.iter().find(|&&q| q >= n_qubits) {
            return Err(Error::InvalidCircuit(format!(
                "qubit {q} out of range for a {n_qubits}-qubit register"
            )));
        }
        if self.qubits.len() == 2 && self.qubits[0] == self.qubits[1] {
            return Err(Error::InvalidCircuit(format!("repeated qubit in {:?}", self.qubits)));
        }
        if !self.kind.params_finite() {
            return Err(Error::InvalidCircuit(format!("non-finite parameter in {:?}", self.kind)));
        }
        Ok(())
    }
}

/// Bit mask of `qubit` in an `n_qubits` register (qubit 0 is the high bit).
#[inline]
pub fn qubit_mask(n_qubits: usize, qubit: usize) -> usize {
    1 << (n_qubits - 1 - qubit)
}

/// Lifts a local operator on `qubits` to the full `2^n` space.
pub fn embed(local: &Operator, qubits: &[usize], n_qubits: usize) -> Operator {
    let dim = 1 << n_qubits;
    let masks: Vec<usize> = qubits.iter().map(|&q| qubit_mask(n_qubits, q)).collect();
    let all: usize = masks.iter().sum();
    let local_index = |i: usize| {
        masks
            .iter()
            .fold(0, |acc, &m| (acc << 1) | usize::from(i & m != 0))
    };
    Operator::from_fn(dim, dim, |i, j| {
        if (i & !all) != (j & !all) {
            Complex64::new(0.0, 0.0)
        } else {
            local[(local_index(i), local_index(j))]
        }
    })
}

/// Distance between two unitaries after removing the best global phase.
pub fn phase_distance(a: &Operator, b: &Operator) -> f64 {
    assert_eq!(a.shape(), b.shape());
    let overlap: Complex64 = a.iter().zip(b.iter()).map(|(x, y)| x.conj() * y).sum();
    let phase = if overlap.norm() > 0.0 {
        overlap / overlap.norm()
    } else {
        Complex64::new(1.0, 0.0)
    };
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x * phase - y).norm())
        .fold(0.0, f64::max)
}
