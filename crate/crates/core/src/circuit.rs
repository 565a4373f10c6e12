//! A complete memory experiment: data preparation, `rounds` error-detection
//! rounds, and a final data readout, flattened into gate layers.
//!
//! Layer 0 prepares the data qubits, layers `1 + 8r .. 1 + 8(r+1)` hold round
//! `r` (0-based), and the last layer reads every data qubit out in the memory
//! basis.

use alloc::vec::Vec;
use core::fmt;

use crate::layout::{Layout, QubitId, StabilizerKind};
use crate::schedule::{build_round_schedule, Gate, GateSchedule, ROUND_DEPTH};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum MemoryBasis {
    Z,
    X,
}

impl MemoryBasis {
    /// Stabilizers with a deterministic first value, decoded to protect the memory.
    pub fn kind(self) -> StabilizerKind {
        match self {
            MemoryBasis::Z => StabilizerKind::Z,
            MemoryBasis::X => StabilizerKind::X,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            MemoryBasis::Z => "z",
            MemoryBasis::X => "x",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "z" | "Z" => Some(MemoryBasis::Z),
            "x" | "X" => Some(MemoryBasis::X),
            _ => None,
        }
    }
}

impl fmt::Display for MemoryBasis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Where a measurement's result is stored.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    /// Ancilla of stabilizer `index` (of `kind`) in 0-based `round`.
    Stabilizer { round: u32, kind: StabilizerKind, index: usize },
    /// Final readout of a data qubit.
    Data(QubitId),
}

/// Where a gate sits in a [`MemoryCircuit`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Phase {
    Prepare,
    Round { round: u32, step: u32 },
    Readout,
}

#[derive(Debug, Clone)]
pub struct MemoryCircuit {
    layout: Layout,
    schedule: GateSchedule,
    rounds: u32,
    basis: MemoryBasis,
    layers: Vec<Vec<Gate>>,
    /// Flat index of the first gate of each layer, plus the total at the end.
    offsets: Vec<usize>,
    /// Measurement destination per flat gate index.
    outcomes: Vec<Option<Outcome>>,
}

impl MemoryCircuit {
    pub fn new(layout: Layout, rounds: u32, basis: MemoryBasis) -> Result<Self> {
        let schedule = build_round_schedule(&layout);
        Self::with_schedule(layout, schedule, rounds, basis)
    }

    /// Convenience constructor from a code distance.
    pub fn for_distance(distance: u32, rounds: u32, basis: MemoryBasis) -> Result<Self> {
        Self::new(Layout::new(distance)?, rounds, basis)
    }

    pub fn with_schedule(layout: Layout, schedule: GateSchedule, rounds: u32, basis: MemoryBasis) -> Result<Self> {
        if rounds < 1 {
            return Err(Error::InvalidRounds { min: 1, got: rounds });
        }
        let mut layers = Vec::with_capacity(2 + rounds as usize * ROUND_DEPTH);
        layers.push(
            layout
                .data_qubits()
                .map(|q| match basis {
                    MemoryBasis::Z => Gate::Init0(q),
                    MemoryBasis::X => Gate::InitPlus(q),
                })
                .collect(),
        );
        for _ in 0..rounds {
            layers.extend(schedule.steps().iter().cloned());
        }
        layers.push(
            layout
                .data_qubits()
                .map(|q| match basis {
                    MemoryBasis::Z => Gate::MeasureZ(q),
                    MemoryBasis::X => Gate::MeasureX(q),
                })
                .collect(),
        );

        let mut offsets = Vec::with_capacity(layers.len() + 1);
        let mut outcomes = Vec::new();
        let mut total = 0;
        let last = layers.len() - 1;
        for (li, layer) in layers.iter().enumerate() {
            offsets.push(total);
            total += layer.len();
            for g in layer {
                let out = match *g {
                    Gate::MeasureZ(q) | Gate::MeasureX(q) if li == last => Some(Outcome::Data(q)),
                    Gate::MeasureZ(q) | Gate::MeasureX(q) => {
                        let round = ((li - 1) / ROUND_DEPTH) as u32;
                        let index = layout.stabilizer_index(q).ok_or(Error::Internal("measured qubit is not an ancilla"))?;
                        let kind = match layout.role(q) {
                            crate::layout::QubitRole::Ancilla(k) => k,
                            crate::layout::QubitRole::Data => return Err(Error::Internal("data measured mid-circuit")),
                        };
                        Some(Outcome::Stabilizer { round, kind, index })
                    }
                    _ => None,
                };
                outcomes.push(out);
            }
        }
        offsets.push(total);
        Ok(Self { layout, schedule, rounds, basis, layers, offsets, outcomes })
    }

    pub fn layout(&self) -> &Layout {
        &self.layout
    }

    pub fn schedule(&self) -> &GateSchedule {
        &self.schedule
    }

    pub fn rounds(&self) -> u32 {
        self.rounds
    }

    pub fn basis(&self) -> MemoryBasis {
        self.basis
    }

    pub fn distance(&self) -> u32 {
        self.layout.distance()
    }

    pub fn layers(&self) -> &[Vec<Gate>] {
        &self.layers
    }

    pub fn num_gates(&self) -> usize {
        *self.offsets.last().unwrap_or(&0)
    }

    pub fn phase(&self, layer: u32) -> Phase {
        let layer = layer as usize;
        if layer == 0 {
            Phase::Prepare
        } else if layer == self.layers.len() - 1 {
            Phase::Readout
        } else {
            let r = (layer - 1) / ROUND_DEPTH;
            Phase::Round { round: r as u32, step: ((layer - 1) % ROUND_DEPTH) as u32 }
        }
    }

    /// Flat index of gate `gate` in `layer`, if it exists.
    pub fn flat_index(&self, layer: u32, gate: u32) -> Option<usize> {
        let (layer, gate) = (layer as usize, gate as usize);
        if layer >= self.layers.len() || gate >= self.layers[layer].len() {
            return None;
        }
        Some(self.offsets[layer] + gate)
    }

    /// Inverse of [`MemoryCircuit::flat_index`].
    pub fn location_of(&self, flat: usize) -> (u32, u32) {
        let layer = self.offsets.partition_point(|&o| o <= flat) - 1;
        (layer as u32, (flat - self.offsets[layer]) as u32)
    }

    pub(crate) fn flat_gate(&self, flat: usize) -> &Gate {
        let (l, g) = self.location_of(flat);
        &self.layers[l as usize][g as usize]
    }

    pub fn gate(&self, layer: u32, gate: u32) -> Option<&Gate> {
        self.layers.get(layer as usize)?.get(gate as usize)
    }

    pub(crate) fn outcome_of(&self, flat: usize) -> Option<Outcome> {
        self.outcomes[flat]
    }

    /// Iterates `(layer, gate_index, gate)` over the whole circuit in execution order.
    pub fn iter_gates(&self) -> impl Iterator<Item = (u32, u32, &Gate)> {
        self.layers.iter().enumerate().flat_map(|(l, gs)| gs.iter().enumerate().map(move |(i, g)| (l as u32, i as u32, g)))
    }

    /// Number of detection layers of a stabilizer kind.
    ///
    /// Memory-basis stabilizers compare against the prepared value before the
    /// first round and against the final readout after the last, giving
    /// `rounds + 1` layers numbered `0..=rounds`. The other kind only compares
    /// consecutive rounds, giving layers `1..rounds`.
    pub fn detection_layers(&self, kind: StabilizerKind) -> core::ops::Range<u32> {
        if kind == self.basis.kind() {
            0..self.rounds + 1
        } else {
            1..self.rounds
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::schedule::GateKind;

    #[test]
    fn layer_structure() {
        let c = MemoryCircuit::for_distance(3, 2, MemoryBasis::X).unwrap();
        assert_eq!(c.layers().len(), 2 + 2 * ROUND_DEPTH);
        assert!(c.layers()[0].iter().all(|g| g.kind() == GateKind::InitPlus));
        assert!(c.layers().last().unwrap().iter().all(|g| g.kind() == GateKind::MeasureX));
        assert_eq!(c.phase(0), Phase::Prepare);
        assert_eq!(c.phase(9), Phase::Round { round: 1, step: 0 });
        assert_eq!(c.phase(17), Phase::Readout);
        let measured = (0..c.num_gates()).filter(|i| c.outcome_of(*i).is_some()).count();
        assert_eq!(measured, 2 * 12 + 13);
    }

    #[test]
    fn rounds_must_be_positive() {
        assert!(matches!(MemoryCircuit::for_distance(3, 0, MemoryBasis::Z), Err(Error::InvalidRounds { .. })));
    }

    #[test]
    fn detection_layer_ranges() {
        let c = MemoryCircuit::for_distance(3, 4, MemoryBasis::Z).unwrap();
        assert_eq!(c.detection_layers(StabilizerKind::Z), 0..5);
        assert_eq!(c.detection_layers(StabilizerKind::X), 1..4);
    }
}
