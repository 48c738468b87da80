//! Parametric gate-level noise: depolarizing after every gate, thermal
//! relaxation for the gate duration, and per-qubit readout confusion.

use serde::{Deserialize, Serialize};

use super::gate::GateClass;
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GateDurations {
    /// seconds
    pub single: f64,
    /// seconds
    pub two: f64,
}

impl GateDurations {
    pub fn for_class(&self, class: GateClass) -> f64 {
        match class {
            GateClass::Single => self.single,
            GateClass::Two => self.two,
        }
    }
}

/// Row-stochastic readout matrix, `m[true][reported]`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReadoutConfusion(pub [[f64; 2]; 2]);

impl ReadoutConfusion {
    pub const IDEAL: Self = Self([[1.0, 0.0], [0.0, 1.0]]);

    /// Flip probability `e` for both outcomes.
    pub fn symmetric(e: f64) -> Self {
        Self([[1.0 - e, e], [e, 1.0 - e]])
    }

    fn validate(&self) -> Result<()> {
        for row in &self.0 {
            if row.iter().any(|p| !(0.0..=1.0).contains(p)) || (row[0] + row[1] - 1.0).abs() > 1e-12 {
                return Err(Error::Config(format!("readout row {row:?} is not a distribution")));
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NoiseModel {
    /// Single-qubit depolarizing probability.
    pub p1: f64,
    /// Two-qubit depolarizing probability.
    pub p2: f64,
    /// Relaxation time, seconds.
    pub t1: f64,
    /// Dephasing time, seconds; at most `2 t1`.
    pub t2: f64,
    pub durations: GateDurations,
    /// Indexed by qubit; qubits past the end read out ideally.
    pub readout: Vec<ReadoutConfusion>,
}

impl NoiseModel {
    /// `p1 = 1e-3`, `p2 = 1e-2`, `T1 = 100 µs`, `T2 = 80 µs`, 50 ns / 300 ns gates,
    /// 2% symmetric readout error on every qubit.
    pub fn nisq_default() -> Self {
        Self {
            p1: 1e-3,
            p2: 1e-2,
            t1: 100e-6,
            t2: 80e-6,
            durations: GateDurations {
                single: 50e-9,
                two: 300e-9,
            },
            readout: vec![ReadoutConfusion::symmetric(0.02); 3],
        }
    }

    /// Depolarizing-only model with ideal timing and readout.
    pub fn depolarizing(p1: f64, p2: f64) -> Self {
        Self {
            p1,
            p2,
            t1: f64::INFINITY,
            t2: f64::INFINITY,
            durations: GateDurations { single: 0.0, two: 0.0 },
            readout: Vec::new(),
        }
    }

    pub fn with_readout(mut self, readout: Vec<ReadoutConfusion>) -> Self {
        self.readout = readout;
        self
    }

    /// Same model with both depolarizing probabilities multiplied by `factor`.
    pub fn scale_depolarizing(&self, factor: f64) -> Self {
        Self {
            p1: self.p1 * factor,
            p2: self.p2 * factor,
            ..self.clone()
        }
    }

    pub fn depolarizing_for(&self, class: GateClass) -> f64 {
        match class {
            GateClass::Single => self.p1,
            GateClass::Two => self.p2,
        }
    }

    pub fn readout_for(&self, qubit: usize) -> ReadoutConfusion {
        self.readout.get(qubit).copied().unwrap_or(ReadoutConfusion::IDEAL)
    }

    /// Amplitude-damping probability and extra coherence factor for an idle of `duration`.
    pub(crate) fn relaxation(&self, duration: f64) -> (f64, f64) {
        if duration <= 0.0 {
            return (0.0, 1.0);
        }
        let gamma = 1.0 - (-duration / self.t1).exp();
        // amplitude damping alone leaves coherence at exp(-t / 2T1)
        let extra = (-duration / self.t2 + duration / (2.0 * self.t1)).exp();
        (gamma, extra.min(1.0))
    }

    pub fn validate(&self) -> Result<()> {
        for (name, p) in [("p1", self.p1), ("p2", self.p2)] {
            if !(0.0..=1.0).contains(&p) {
                return Err(Error::Config(format!("{name} = {p} outside [0, 1]")));
            }
        }
        if !(self.t1 > 0.0) || !(self.t2 > 0.0) {
            return Err(Error::Config(format!(
                "relaxation times must be positive (t1 = {}, t2 = {})",
                self.t1, self.t2
            )));
        }
        if self.t2 > 2.0 * self.t1 {
            return Err(Error::Config(format!("t2 = {} exceeds 2·t1 = {}", self.t2, 2.0 * self.t1)));
        }
        for (name, d) in [("single", self.durations.single), ("two", self.durations.two)] {
            if !(d >= 0.0) || !d.is_finite() {
                return Err(Error::Config(format!("{name}-qubit gate duration {d} is not a valid time")));
            }
        }
        self.readout.iter().try_for_each(ReadoutConfusion::validate)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_preset_is_valid() {
        let m = NoiseModel::nisq_default();
        m.validate().unwrap();
        assert_eq!(m.readout_for(7), ReadoutConfusion::IDEAL);
        assert_eq!(m.readout_for(0), ReadoutConfusion::symmetric(0.02));
    }

    #[test]
    fn invalid_parameters_are_config_errors() {
        let base = NoiseModel::nisq_default();
        let cases = [
            NoiseModel { p1: 1.5, ..base.clone() },
            NoiseModel { p2: -0.1, ..base.clone() },
            NoiseModel { t1: 0.0, ..base.clone() },
            NoiseModel { t2: 300e-6, ..base.clone() },
            base.clone().with_readout(vec![ReadoutConfusion([[0.9, 0.2], [0.0, 1.0]])]),
        ];
        for m in cases {
            assert!(matches!(m.validate(), Err(Error::Config(_))), "{m:?}");
        }
    }

    #[test]
    fn relaxation_factors_match_t1_t2() {
        let m = NoiseModel::nisq_default();
        let t = 1e-6;
        let (gamma, extra) = m.relaxation(t);
        assert!((gamma - (1.0 - (-t / m.t1).exp())).abs() < 1e-15);
        let coherence = (1.0 - gamma).sqrt() * extra;
        assert!((coherence - (-t / m.t2).exp()).abs() < 1e-12);
        assert_eq!(m.relaxation(0.0), (0.0, 1.0));
    }

    #[test]
    fn infinite_times_mean_no_relaxation() {
        let m = NoiseModel::depolarizing(0.1, 0.2);
        m.validate().unwrap();
        let (gamma, extra) = m.relaxation(1.0);
        assert_eq!(gamma, 0.0);
        assert_eq!(extra, 1.0);
    }
}
