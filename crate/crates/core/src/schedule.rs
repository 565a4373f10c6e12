//! Gate schedule of one round of stabilizer measurement.
//!
//! A round takes [`ROUND_DEPTH`] timesteps:
//!
//! | step | X ancilla | Z ancilla | data |
//! |------|-----------|-----------|------|
//! | 0    | init      | -         | idle |
//! | 1    | H         | init      | idle |
//! | 2-5  | CX (control) N, W, E, S | CX (target) N, W, E, S | CX or idle |
//! | 6    | H         | measure Z | idle |
//! | 7    | measure Z | -         | idle |
//!
//! An ancilla missing a neighbour in some direction idles in that slot.

use alloc::vec::Vec;
use core::fmt;

use crate::layout::{Direction, Layout, QubitId, QubitRole, StabilizerKind};

pub const ROUND_DEPTH: usize = 8;
/// Timestep of the first CX; the four CX layers follow [`Direction::SCHEDULE`].
pub const FIRST_CX_STEP: usize = 2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum GateKind {
    Init0,
    InitPlus,
    H,
    Cx,
    MeasureZ,
    MeasureX,
    Idle,
}

impl GateKind {
    pub fn name(self) -> &'static str {
        match self {
            GateKind::Init0 => "init_0",
            GateKind::InitPlus => "init_plus",
            GateKind::H => "h",
            GateKind::Cx => "cx",
            GateKind::MeasureZ => "measure_z",
            GateKind::MeasureX => "measure_x",
            GateKind::Idle => "idle",
        }
    }

    pub fn from_name(s: &str) -> Option<Self> {
        Some(match s {
            "init_0" => GateKind::Init0,
            "init_plus" => GateKind::InitPlus,
            "h" => GateKind::H,
            "cx" => GateKind::Cx,
            "measure_z" => GateKind::MeasureZ,
            "measure_x" => GateKind::MeasureX,
            "idle" => GateKind::Idle,
            _ => return None,
        })
    }

    pub fn is_measurement(self) -> bool {
        matches!(self, GateKind::MeasureZ | GateKind::MeasureX)
    }
}

impl fmt::Display for GateKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Gate {
    Init0(QubitId),
    InitPlus(QubitId),
    H(QubitId),
    Cx { control: QubitId, target: QubitId },
    MeasureZ(QubitId),
    MeasureX(QubitId),
    Idle(QubitId),
}

impl Gate {
    pub fn kind(&self) -> GateKind {
        match self {
            Gate::Init0(_) => GateKind::Init0,
            Gate::InitPlus(_) => GateKind::InitPlus,
            Gate::H(_) => GateKind::H,
            Gate::Cx { .. } => GateKind::Cx,
            Gate::MeasureZ(_) => GateKind::MeasureZ,
            Gate::MeasureX(_) => GateKind::MeasureX,
            Gate::Idle(_) => GateKind::Idle,
        }
    }

    /// Qubits acted on; for CX the control comes first.
    pub fn qubits(&self) -> (QubitId, Option<QubitId>) {
        match *self {
            Gate::Cx { control, target } => (control, Some(target)),
            Gate::Init0(q) | Gate::InitPlus(q) | Gate::H(q) | Gate::MeasureZ(q) | Gate::MeasureX(q) | Gate::Idle(q) => (q, None),
        }
    }

    pub fn touches(&self, q: QubitId) -> bool {
        let (a, b) = self.qubits();
        a == q || b == Some(q)
    }
}

impl fmt::Display for Gate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.qubits() {
            (a, Some(b)) => write!(f, "{} {} {}", self.kind(), a, b),
            (a, None) => write!(f, "{} {}", self.kind(), a),
        }
    }
}

/// Timesteps of one error-detection round. Immutable once built.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GateSchedule {
    steps: Vec<Vec<Gate>>,
}

impl GateSchedule {
    pub fn steps(&self) -> &[Vec<Gate>] {
        &self.steps
    }

    pub fn depth(&self) -> usize {
        self.steps.len()
    }

    pub fn gates(&self) -> impl Iterator<Item = &Gate> {
        self.steps.iter().flatten()
    }

    /// Gates touching `q`, as `(step, gate)`.
    pub fn gates_on(&self, q: QubitId) -> impl Iterator<Item = (usize, &Gate)> {
        self.steps.iter().enumerate().flat_map(move |(t, gs)| gs.iter().filter(move |g| g.touches(q)).map(move |g| (t, g)))
    }
}

/// Builds the schedule of one round for every stabilizer of `layout`.
pub fn build_round_schedule(layout: &Layout) -> GateSchedule {
    let mut steps: Vec<Vec<Gate>> = (0..ROUND_DEPTH).map(|_| Vec::new()).collect();
    let x_stabs = layout.stabilizers(StabilizerKind::X);
    let z_stabs = layout.stabilizers(StabilizerKind::Z);

    for s in x_stabs {
        steps[0].push(Gate::Init0(s.ancilla));
        steps[1].push(Gate::H(s.ancilla));
    }
    for s in z_stabs {
        steps[1].push(Gate::Init0(s.ancilla));
    }

    for (slot, _) in Direction::SCHEDULE.iter().enumerate() {
        let step = &mut steps[FIRST_CX_STEP + slot];
        for s in layout.all_stabilizers() {
            match (s.kind, s.neighbors[slot]) {
                (StabilizerKind::Z, Some(d)) => step.push(Gate::Cx { control: d, target: s.ancilla }),
                (StabilizerKind::X, Some(d)) => step.push(Gate::Cx { control: s.ancilla, target: d }),
                (_, None) => step.push(Gate::Idle(s.ancilla)),
            }
        }
    }

    for s in x_stabs {
        steps[6].push(Gate::H(s.ancilla));
        steps[7].push(Gate::MeasureZ(s.ancilla));
    }
    for s in z_stabs {
        steps[6].push(Gate::MeasureZ(s.ancilla));
    }

    // Every data qubit not in a CX idles.
    for step in steps.iter_mut() {
        for q in layout.data_qubits() {
            if !step.iter().any(|g| g.touches(q)) {
                step.push(Gate::Idle(q));
            }
        }
    }
    debug_assert!(layout.data_qubits().all(|q| layout.role(q) == QubitRole::Data));
    GateSchedule { steps }
}
