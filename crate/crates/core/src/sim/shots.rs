//! Classical records, outcome distributions and shot sampling.
//!
//! A record is a `slots`-bit integer with slot 0 as its most significant bit,
//! so the printed bitstring reads left to right in slot order.

use rand::Rng;

use super::circuit::{Circuit, Event};
use super::state::PureState;
use crate::error::{Error, Result};
use crate::seed::rng_for;

#[inline]
pub fn slot_mask(slots: usize, slot: usize) -> usize {
    1 << (slots - 1 - slot)
}

pub fn bitstring(record: usize, slots: usize) -> String {
    (0..slots)
        .map(|s| if record & slot_mask(slots, s) != 0 { '1' } else { '0' })
        .collect()
}

pub fn parse_bitstring(bits: &str) -> Result<usize> {
    if bits.is_empty() || bits.len() > 16 {
        return Err(Error::Config(format!("bitstring {bits:?} has unsupported length")));
    }
    bits.chars().try_fold(0usize, |acc, ch| match ch {
        '0' => Ok(acc << 1),
        '1' => Ok((acc << 1) | 1),
        _ => Err(Error::Config(format!("bitstring {bits:?} contains {ch:?}"))),
    })
}

/// Exact probability of every record.
#[derive(Clone, Debug, PartialEq)]
pub struct Distribution {
    slots: usize,
    probs: Vec<f64>,
}

impl Distribution {
    pub fn new(slots: usize, probs: Vec<f64>) -> Result<Self> {
        if probs.len() != 1 << slots {
            return Err(Error::Config(format!(
                "{} probabilities for {slots} slots",
                probs.len()
            )));
        }
        Ok(Self { slots, probs })
    }

    pub fn slots(&self) -> usize {
        self.slots
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn prob(&self, record: usize) -> f64 {
        self.probs[record]
    }

    pub fn prob_of(&self, bits: &str) -> Result<f64> {
        let r = parse_bitstring(bits)?;
        self.probs
            .get(r)
            .copied()
            .filter(|_| bits.len() == self.slots)
            .ok_or_else(|| Error::Config(format!("{bits} does not fit {} slots", self.slots)))
    }

    pub fn total(&self) -> f64 {
        self.probs.iter().sum()
    }

    pub fn total_variation(&self, other: &Distribution) -> f64 {
        assert_eq!(self.slots, other.slots, "distributions over different records");
        0.5 * self
            .probs
            .iter()
            .zip(&other.probs)
            .map(|(a, b)| (a - b).abs())
            .sum::<f64>()
    }

    /// Marginal probability that `slot` reads 1.
    pub fn marginal_one(&self, slot: usize) -> f64 {
        let m = slot_mask(self.slots, slot);
        self.probs
            .iter()
            .enumerate()
            .filter(|(r, _)| r & m != 0)
            .map(|(_, p)| p)
            .sum()
    }
}

/// Histogram of sampled records.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ShotCounts {
    slots: usize,
    counts: Vec<u64>,
    total: u64,
}

impl ShotCounts {
    pub fn empty(slots: usize) -> Self {
        Self {
            slots,
            counts: vec![0; 1 << slots],
            total: 0,
        }
    }

    pub fn from_pairs(slots: usize, pairs: &[(&str, u64)]) -> Result<Self> {
        let mut out = Self::empty(slots);
        for &(bits, n) in pairs {
            if bits.len() != slots {
                return Err(Error::Config(format!("{bits} does not fit {slots} slots")));
            }
            out.add(parse_bitstring(bits)?, n);
        }
        Ok(out)
    }

    pub fn add(&mut self, record: usize, n: u64) {
        self.counts[record] += n;
        self.total += n;
    }

    pub fn slots(&self) -> usize {
        self.slots
    }

    pub fn total(&self) -> u64 {
        self.total
    }

    pub fn count(&self, record: usize) -> u64 {
        self.counts[record]
    }

    pub fn count_of(&self, bits: &str) -> u64 {
        match parse_bitstring(bits) {
            Ok(r) if bits.len() == self.slots => self.counts[r],
            _ => 0,
        }
    }

    pub fn frequency(&self, record: usize) -> f64 {
        if self.total == 0 {
            0.0
        } else {
            self.counts[record] as f64 / self.total as f64
        }
    }

    /// Non-zero entries as `(bitstring, count)`.
    pub fn iter(&self) -> impl Iterator<Item = (String, u64)> + '_ {
        self.counts
            .iter()
            .enumerate()
            .filter(|(_, &n)| n > 0)
            .map(move |(r, &n)| (bitstring(r, self.slots), n))
    }
}

/// Draws `shots` records from `dist` by inverse-CDF sampling, one uniform per shot.
///
/// One uniform per shot couples runs that share a stream: nearby distributions
/// yield nearby histograms.
pub fn sample_counts<R: Rng + ?Sized>(dist: &Distribution, shots: u64, rng: &mut R) -> ShotCounts {
    let mut cdf = Vec::with_capacity(dist.probs.len());
    let mut acc = 0.0;
    for p in &dist.probs {
        acc += p.max(0.0);
        cdf.push(acc);
    }
    let norm = acc;
    let last = cdf.len() - 1;
    let mut out = ShotCounts::empty(dist.slots);
    for _ in 0..shots {
        let u = rng.gen::<f64>() * norm;
        let r = cdf.iter().position(|&c| u < c).unwrap_or(last);
        out.counts[r] += 1;
    }
    out.total = shots;
    out
}

/// Simulates every shot on the statevector backend, collapsing at each measurement.
pub fn run_shots(circuit: &Circuit, shots: u64, seed: u64) -> Result<ShotCounts> {
    circuit.validate()?;
    if shots == 0 {
        return Err(Error::Config("shots must be at least 1".into()));
    }
    let compiled: Vec<_> = circuit
        .events()
        .iter()
        .map(|e| match e {
            Event::Gate(g) => Some((g.matrix(), g.qubits.clone())),
            Event::Measure { .. } => None,
        })
        .collect();
    let slots = circuit.record_slots();
    let start = PureState::zero(circuit.n_qubits())?;
    let mut rng = rng_for(seed, &[]);
    let mut out = ShotCounts::empty(slots);
    for _ in 0..shots {
        let mut state = start.clone();
        let mut record = 0usize;
        for (event, op) in circuit.events().iter().zip(&compiled) {
            match (event, op) {
                (_, Some((m, qubits))) => state.apply_matrix(m, qubits),
                (Event::Measure { qubit, slot }, None) => {
                    let p1 = state.probability_one(*qubit);
                    let one = rng.gen::<f64>() < p1;
                    state.collapse(*qubit, one);
                    if one {
                        record |= slot_mask(slots, *slot);
                    }
                }
                (Event::Gate(_), None) => unreachable!(),
            }
        }
        out.add(record, 1);
    }
    Ok(out)
}
