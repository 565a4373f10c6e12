//! Pauli-frame simulation of a memory experiment and detection-event extraction.
//!
//! Outcomes are stored relative to the noiseless reference run: `false` means
//! "same as without faults". For memory-basis stabilizers the reference is the
//! +1 eigenvalue; for the other kind the reference is random but constant, so
//! only changes between rounds carry information.

use alloc::vec;
use alloc::vec::Vec;

use crate::circuit::{MemoryCircuit, Outcome};
use crate::layout::{Coord, Layout, StabilizerKind};
use crate::noise::{FaultKind, FaultSet};
use crate::pauli::{Pauli, PauliFrame};
use crate::schedule::Gate;
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct MeasurementRecord {
    rounds: u32,
    num_z: usize,
    num_x: usize,
    /// `[round * num_z + index]`
    z: Vec<bool>,
    x: Vec<bool>,
    data: Vec<bool>,
}

impl MeasurementRecord {
    fn empty(circuit: &MemoryCircuit) -> Self {
        let l = circuit.layout();
        let (num_z, num_x) = (l.stabilizers(StabilizerKind::Z).len(), l.stabilizers(StabilizerKind::X).len());
        let r = circuit.rounds() as usize;
        Self {
            rounds: circuit.rounds(),
            num_z,
            num_x,
            z: vec![false; r * num_z],
            x: vec![false; r * num_x],
            data: vec![false; l.num_data()],
        }
    }

    pub fn rounds(&self) -> u32 {
        self.rounds
    }

    /// Flip of stabilizer `index` of `kind` in 0-based `round`.
    pub fn stabilizer(&self, kind: StabilizerKind, round: u32, index: usize) -> bool {
        match kind {
            StabilizerKind::Z => self.z[round as usize * self.num_z + index],
            StabilizerKind::X => self.x[round as usize * self.num_x + index],
        }
    }

    /// Final readout flips of the data qubits, indexed by qubit id.
    pub fn data(&self) -> &[bool] {
        &self.data
    }

    fn set(&mut self, out: Outcome, value: bool) {
        match out {
            Outcome::Stabilizer { round, kind: StabilizerKind::Z, index } => self.z[round as usize * self.num_z + index] = value,
            Outcome::Stabilizer { round, kind: StabilizerKind::X, index } => self.x[round as usize * self.num_x + index] = value,
            Outcome::Data(q) => self.data[q] = value,
        }
    }

    /// Whether the logical readout in the memory basis differs from the prepared value.
    pub fn logical_flip(&self, circuit: &MemoryCircuit) -> bool {
        circuit.layout().logical_support(circuit.basis().kind()).iter().fold(false, |acc, q| acc ^ self.data[*q])
    }

    fn matches(&self, circuit: &MemoryCircuit) -> bool {
        let l = circuit.layout();
        self.rounds == circuit.rounds()
            && self.num_z == l.stabilizers(StabilizerKind::Z).len()
            && self.num_x == l.stabilizers(StabilizerKind::X).len()
            && self.data.len() == l.num_data()
    }
}

/// A detection event: stabilizer `index` of `kind` changed value across detection `layer`.
///
/// Layer `k` sits between measurement `k` and `k + 1`, counting the prepared
/// value as measurement 0 and the final data readout as measurement `rounds + 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct DetectionEvent {
    pub kind: StabilizerKind,
    pub layer: u32,
    pub index: usize,
}

impl DetectionEvent {
    pub fn coord(&self, layout: &Layout) -> Coord {
        layout.stabilizers(self.kind)[self.index].coord
    }
}

/// Sorted, duplicate-free detection events of one shot.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct DetectionSet {
    events: Vec<DetectionEvent>,
}

impl DetectionSet {
    pub fn from_events(mut events: Vec<DetectionEvent>) -> Self {
        events.sort();
        events.dedup();
        Self { events }
    }

    pub fn events(&self) -> &[DetectionEvent] {
        &self.events
    }

    pub fn len(&self) -> usize {
        self.events.len()
    }

    pub fn is_empty(&self) -> bool {
        self.events.is_empty()
    }

    pub fn of_kind(&self, kind: StabilizerKind) -> impl Iterator<Item = &DetectionEvent> {
        self.events.iter().filter(move |e| e.kind == kind)
    }

    pub fn count_kind(&self, kind: StabilizerKind) -> usize {
        self.of_kind(kind).count()
    }

    /// Symmetric difference.
    pub fn symmetric_difference(&self, other: &DetectionSet) -> DetectionSet {
        let mut out = Vec::with_capacity(self.len() + other.len());
        let (mut i, mut j) = (0, 0);
        while i < self.events.len() && j < other.events.len() {
            match self.events[i].cmp(&other.events[j]) {
                core::cmp::Ordering::Less => {
                    out.push(self.events[i]);
                    i += 1;
                }
                core::cmp::Ordering::Greater => {
                    out.push(other.events[j]);
                    j += 1;
                }
                core::cmp::Ordering::Equal => {
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&self.events[i..]);
        out.extend_from_slice(&other.events[j..]);
        DetectionSet { events: out }
    }
}

/// Runs one shot of `circuit` with `faults` injected.
pub fn run_shot(circuit: &MemoryCircuit, faults: &FaultSet) -> MeasurementRecord {
    run_shot_with_frame(circuit, faults).0
}

/// As [`run_shot`], also returning the Pauli frame left on the qubits at the end.
pub fn run_shot_with_frame(circuit: &MemoryCircuit, faults: &FaultSet) -> (MeasurementRecord, PauliFrame) {
    let mut frame = PauliFrame::new(circuit.layout().num_qubits());
    let mut record = MeasurementRecord::empty(circuit);
    let mut pending = faults.as_slice().iter().peekable();
    let mut flat = 0usize;
    for (layer, gates) in circuit.layers().iter().enumerate() {
        for (gi, gate) in gates.iter().enumerate() {
            let fault = match pending.peek() {
                Some(f) if f.layer as usize == layer && f.gate as usize == gi => pending.next().map(|f| f.kind),
                _ => None,
            };
            match *gate {
                Gate::Init0(q) | Gate::InitPlus(q) => {
                    frame.clear(q);
                    if fault == Some(FaultKind::InitFlip) {
                        let p = if matches!(gate, Gate::Init0(_)) { Pauli::X } else { Pauli::Z };
                        frame.apply_unchecked(q, p);
                    }
                }
                Gate::H(q) => {
                    frame.h_unchecked(q);
                    if let Some(FaultKind::Pauli1(p)) = fault {
                        frame.apply_unchecked(q, p);
                    }
                }
                Gate::Idle(q) => {
                    if let Some(FaultKind::Pauli1(p)) = fault {
                        frame.apply_unchecked(q, p);
                    }
                }
                Gate::Cx { control, target } => {
                    frame.cx_unchecked(control, target);
                    if let Some(FaultKind::Pauli2(a, b)) = fault {
                        frame.apply_unchecked(control, a);
                        frame.apply_unchecked(target, b);
                    }
                }
                Gate::MeasureZ(q) | Gate::MeasureX(q) => {
                    let bit = if matches!(gate, Gate::MeasureZ(_)) { frame.x_at(q) } else { frame.z_at(q) };
                    let flipped = bit ^ (fault == Some(FaultKind::MeasFlip));
                    if let Some(out) = circuit.outcome_of(flat) {
                        record.set(out, flipped);
                    }
                }
            }
            flat += 1;
        }
    }
    (record, frame)
}

/// Reduces a measurement record to detection events of both stabilizer kinds.
pub fn extract_detection_events(record: &MeasurementRecord, circuit: &MemoryCircuit) -> Result<DetectionSet> {
    if !record.matches(circuit) {
        return Err(Error::RecordMismatch);
    }
    let layout = circuit.layout();
    let rounds = circuit.rounds();
    let memory = circuit.basis().kind();
    let mut events = Vec::new();
    for kind in [StabilizerKind::Z, StabilizerKind::X] {
        for (index, stab) in layout.stabilizers(kind).iter().enumerate() {
            if kind == memory {
                let final_value = stab.support().fold(false, |acc, q| acc ^ record.data[q]);
                let mut prev = false;
                for layer in 0..=rounds {
                    let next = if layer == rounds { final_value } else { record.stabilizer(kind, layer, index) };
                    if prev != next {
                        events.push(DetectionEvent { kind, layer, index });
                    }
                    prev = next;
                }
            } else {
                for layer in 1..rounds {
                    if record.stabilizer(kind, layer - 1, index) != record.stabilizer(kind, layer, index) {
                        events.push(DetectionEvent { kind, layer, index });
                    }
                }
            }
        }
    }
    Ok(DetectionSet::from_events(events))
}

/// Per data qubit, whether the end-of-circuit error flips its value in the basis of `kind`'s logical.
///
/// For the memory kind this is the readout flip itself (measurement faults
/// included); for the other kind it is the X (for `Z`) or Z (for `X`) frame bit.
pub fn residual(circuit: &MemoryCircuit, record: &MeasurementRecord, frame: &PauliFrame, kind: StabilizerKind) -> Vec<bool> {
    if kind == circuit.basis().kind() {
        return record.data.clone();
    }
    let bits = match kind {
        StabilizerKind::Z => frame.x_bits(),
        StabilizerKind::X => frame.z_bits(),
    };
    bits[..circuit.layout().num_data()].to_vec()
}

/// Convenience: simulate and extract in one go, returning the events and the logical flip.
pub fn simulate(circuit: &MemoryCircuit, faults: &FaultSet) -> (DetectionSet, bool) {
    let record = run_shot(circuit, faults);
    let events = extract_detection_events(&record, circuit).expect("record built from the same circuit");
    (events, record.logical_flip(circuit))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::{MemoryBasis, Phase};
    use crate::noise::{enumerate_single_faults, FaultLocation};
    use crate::schedule::ROUND_DEPTH;

    fn circuit(d: u32, r: u32, b: MemoryBasis) -> MemoryCircuit {
        MemoryCircuit::for_distance(d, r, b).unwrap()
    }

    /// Location of the idle on data qubit at `coord` in the first step of round `round`.
    fn idle_at(c: &MemoryCircuit, coord: Coord, round: u32, step: u32) -> (u32, u32) {
        let q = c.layout().qubit_at(coord).unwrap();
        let layer = 1 + round * ROUND_DEPTH as u32 + step;
        let gi = c.layers()[layer as usize].iter().position(|g| *g == Gate::Idle(q)).unwrap();
        (layer, gi as u32)
    }

    fn one(c: &MemoryCircuit, (layer, gate): (u32, u32), kind: FaultKind) -> FaultSet {
        FaultSet::new(c, alloc::vec![FaultLocation::new(layer, gate, kind)]).unwrap()
    }

    #[test]
    fn no_faults_no_events() {
        for b in [MemoryBasis::Z, MemoryBasis::X] {
            let c = circuit(3, 4, b);
            let rec = run_shot(&c, &FaultSet::empty());
            for kind in [StabilizerKind::Z, StabilizerKind::X] {
                for i in 0..c.layout().stabilizers(kind).len() {
                    let first = rec.stabilizer(kind, 0, i);
                    assert!((0..4).all(|r| rec.stabilizer(kind, r, i) == first));
                }
            }
            let (events, flip) = simulate(&c, &FaultSet::empty());
            assert!(events.is_empty());
            assert!(!flip);
        }
    }

    #[test]
    fn bulk_x_error_lights_two_z_stabilizers() {
        let c = circuit(5, 4, MemoryBasis::Z);
        let loc = idle_at(&c, Coord::new(4, 4), 2, 0);
        let (ev, _) = simulate(&c, &one(&c, loc, FaultKind::Pauli1(Pauli::X)));
        assert_eq!(ev.count_kind(StabilizerKind::Z), 2);
        assert_eq!(ev.count_kind(StabilizerKind::X), 0);
        let coords: Vec<Coord> = ev.events().iter().map(|e| e.coord(c.layout())).collect();
        assert!(coords.contains(&Coord::new(3, 4)) && coords.contains(&Coord::new(5, 4)));
        // Both in the comparison of rounds 1 and 2 (0-based), i.e. layer 2.
        assert!(ev.events().iter().all(|e| e.layer == 2));
    }

    #[test]
    fn boundary_x_error_lights_one_z_stabilizer() {
        let c = circuit(5, 4, MemoryBasis::Z);
        let loc = idle_at(&c, Coord::new(0, 4), 2, 0);
        let (ev, flip) = simulate(&c, &one(&c, loc, FaultKind::Pauli1(Pauli::X)));
        assert_eq!(ev.len(), 1);
        assert_eq!(ev.events()[0].coord(c.layout()), Coord::new(1, 4));
        // Row 0 carries logical Z, so the readout flips.
        assert!(flip);
    }

    #[test]
    fn bulk_y_error_lights_four() {
        let c = circuit(5, 4, MemoryBasis::Z);
        let loc = idle_at(&c, Coord::new(4, 4), 1, 7);
        let (ev, _) = simulate(&c, &one(&c, loc, FaultKind::Pauli1(Pauli::Y)));
        assert_eq!(ev.count_kind(StabilizerKind::Z), 2);
        assert_eq!(ev.count_kind(StabilizerKind::X), 2);
        let mut coords: Vec<Coord> = ev.events().iter().map(|e| e.coord(c.layout())).collect();
        coords.sort();
        assert_eq!(coords, [Coord::new(3, 4), Coord::new(4, 3), Coord::new(4, 5), Coord::new(5, 4)]);
    }

    #[test]
    fn measurement_flip_gives_time_pair() {
        let c = circuit(3, 5, MemoryBasis::Z);
        let anc = c.layout().stabilizers(StabilizerKind::Z)[2].ancilla;
        let round = 2u32;
        let (layer, gi) = c
            .iter_gates()
            .find(|(l, _, g)| **g == Gate::MeasureZ(anc) && c.phase(*l) == Phase::Round { round, step: 6 })
            .map(|(l, g, _)| (l, g))
            .unwrap();
        let (ev, flip) = simulate(&c, &one(&c, (layer, gi), FaultKind::MeasFlip));
        assert!(!flip);
        // Round index 2 is measurement 3, so layers 2 and 3.
        assert_eq!(
            ev.events(),
            [
                DetectionEvent { kind: StabilizerKind::Z, layer: 2, index: 2 },
                DetectionEvent { kind: StabilizerKind::Z, layer: 3, index: 2 }
            ]
        );
    }

    #[test]
    fn record_mismatch_is_rejected() {
        let a = circuit(3, 3, MemoryBasis::Z);
        let b = circuit(3, 4, MemoryBasis::Z);
        let rec = run_shot(&a, &FaultSet::empty());
        assert_eq!(extract_detection_events(&rec, &b), Err(Error::RecordMismatch));
    }

    #[test]
    fn single_faults_light_at_most_two_per_kind() {
        for b in [MemoryBasis::Z, MemoryBasis::X] {
            let c = circuit(3, 3, b);
            for (f, _) in enumerate_single_faults(&c) {
                let (ev, flip) = simulate(&c, &FaultSet::single(f));
                for kind in [StabilizerKind::Z, StabilizerKind::X] {
                    assert!(ev.count_kind(kind) <= 2, "{f:?} lights {} {kind}", ev.count_kind(kind));
                }
                if ev.is_empty() {
                    assert!(!flip, "undetectable fault {f:?} flips the logical readout");
                }
            }
        }
    }

    #[test]
    fn detection_is_linear_in_faults() {
        let c = circuit(3, 3, MemoryBasis::X);
        let faults: Vec<FaultLocation> = enumerate_single_faults(&c).map(|(f, _)| f).collect();
        let mut state = 0x9e37_79b9_7f4a_7c15u64;
        let mut next = || {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            state as usize % faults.len()
        };
        for _ in 0..500 {
            let a = FaultSet::single(faults[next()]);
            let b = FaultSet::new(&c, alloc::vec![faults[next()], faults[next()]]).unwrap_or_default();
            let (ea, fa) = simulate(&c, &a);
            let (eb, fb) = simulate(&c, &b);
            let (eab, fab) = simulate(&c, &a.compose(&b));
            assert_eq!(eab, ea.symmetric_difference(&eb));
            assert_eq!(fab, fa ^ fb);
        }
    }
}
