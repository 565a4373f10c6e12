//! Planar surface code geometry.
//!
//! Qubits live on a `(2d-1) x (2d-1)` integer grid indexed by `(row, col)`,
//! rows growing southwards and columns eastwards:
//!
//! * data qubits at `row + col` even,
//! * Z ancillas at odd `row`, even `col`,
//! * X ancillas at even `row`, odd `col`.
//!
//! Z-stabilizer rows are cut by the West and East edges, X-stabilizer columns
//! by the North and South edges. An X error on a North or South edge data qubit
//! is seen by a single Z stabilizer, so the Z-stabilizer detection lattice has
//! its boundaries on the North and South sides and the X-stabilizer lattice on
//! West and East. Logical Z runs West to East along row 0, logical X runs North
//! to South along column 0.
//!
//! Qubit ids are assigned data first, then Z ancillas, then X ancillas, each
//! group in row-major order.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::{Error, Result};

pub type QubitId = usize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Coord {
    pub row: i32,
    pub col: i32,
}

impl Coord {
    pub const fn new(row: i32, col: i32) -> Self {
        Self { row, col }
    }

    pub fn step(self, dir: Direction) -> Coord {
        let (dr, dc) = dir.offset();
        Coord::new(self.row + dr, self.col + dc)
    }
}

impl fmt::Display for Coord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.row, self.col)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum StabilizerKind {
    Z,
    X,
}

impl StabilizerKind {
    pub fn other(self) -> Self {
        match self {
            StabilizerKind::Z => StabilizerKind::X,
            StabilizerKind::X => StabilizerKind::Z,
        }
    }

    pub fn as_char(self) -> char {
        match self {
            StabilizerKind::Z => 'Z',
            StabilizerKind::X => 'X',
        }
    }
}

impl fmt::Display for StabilizerKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.as_char())
    }
}

/// Interaction directions, in schedule order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Direction {
    North,
    West,
    East,
    South,
}

impl Direction {
    pub const SCHEDULE: [Direction; 4] = [Direction::North, Direction::West, Direction::East, Direction::South];

    pub fn offset(self) -> (i32, i32) {
        match self {
            Direction::North => (-1, 0),
            Direction::West => (0, -1),
            Direction::East => (0, 1),
            Direction::South => (1, 0),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Side {
    North,
    West,
    East,
    South,
}

impl Side {
    pub const ALL: [Side; 4] = [Side::North, Side::West, Side::East, Side::South];

    pub fn opposite(self) -> Side {
        match self {
            Side::North => Side::South,
            Side::South => Side::North,
            Side::West => Side::East,
            Side::East => Side::West,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QubitRole {
    Data,
    Ancilla(StabilizerKind),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Stabilizer {
    pub kind: StabilizerKind,
    pub ancilla: QubitId,
    pub coord: Coord,
    /// Data neighbours in North, West, East, South order; `None` on a cut edge.
    pub neighbors: [Option<QubitId>; 4],
}

impl Stabilizer {
    pub fn support(&self) -> impl Iterator<Item = QubitId> + '_ {
        self.neighbors.iter().flatten().copied()
    }

    pub fn weight(&self) -> usize {
        self.support().count()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Layout {
    distance: u32,
    coords: Vec<Coord>,
    roles: Vec<QubitRole>,
    grid: Vec<Option<QubitId>>,
    num_data: usize,
    z_stabilizers: Vec<Stabilizer>,
    x_stabilizers: Vec<Stabilizer>,
    /// Stabilizer index (within its kind) of each ancilla qubit.
    ancilla_index: Vec<Option<usize>>,
    logical_z: Vec<QubitId>,
    logical_x: Vec<QubitId>,
}

/// Builds the distance-`d` planar code.
pub fn build_layout(distance: u32) -> Result<Layout> {
    Layout::new(distance)
}

impl Layout {
    pub fn new(distance: u32) -> Result<Self> {
        if distance < 2 {
            return Err(Error::InvalidDistance(distance));
        }
        let side = (2 * distance - 1) as i32;
        let role_at = |r: i32, c: i32| {
            if (r + c) % 2 == 0 {
                QubitRole::Data
            } else if r % 2 == 1 {
                QubitRole::Ancilla(StabilizerKind::Z)
            } else {
                QubitRole::Ancilla(StabilizerKind::X)
            }
        };

        let mut coords = Vec::new();
        let mut roles = Vec::new();
        for wanted in [QubitRole::Data, QubitRole::Ancilla(StabilizerKind::Z), QubitRole::Ancilla(StabilizerKind::X)] {
            for r in 0..side {
                for c in 0..side {
                    if role_at(r, c) == wanted {
                        coords.push(Coord::new(r, c));
                        roles.push(wanted);
                    }
                }
            }
        }
        let num_data = roles.iter().filter(|r| **r == QubitRole::Data).count();

        let mut grid = vec![None; (side * side) as usize];
        for (q, c) in coords.iter().enumerate() {
            grid[(c.row * side + c.col) as usize] = Some(q);
        }

        let mut layout = Layout {
            distance,
            coords,
            roles,
            grid,
            num_data,
            z_stabilizers: Vec::new(),
            x_stabilizers: Vec::new(),
            ancilla_index: Vec::new(),
            logical_z: Vec::new(),
            logical_x: Vec::new(),
        };

        let mut ancilla_index = vec![None; layout.num_qubits()];
        for q in 0..layout.num_qubits() {
            let QubitRole::Ancilla(kind) = layout.roles[q] else { continue };
            let coord = layout.coords[q];
            let mut neighbors = [None; 4];
            for (slot, dir) in Direction::SCHEDULE.iter().enumerate() {
                neighbors[slot] = layout.qubit_at(coord.step(*dir));
            }
            let stab = Stabilizer { kind, ancilla: q, coord, neighbors };
            let list = match kind {
                StabilizerKind::Z => &mut layout.z_stabilizers,
                StabilizerKind::X => &mut layout.x_stabilizers,
            };
            ancilla_index[q] = Some(list.len());
            list.push(stab);
        }
        layout.ancilla_index = ancilla_index;

        layout.logical_z = (0..distance as i32).map(|k| layout.qubit_at(Coord::new(0, 2 * k)).expect("row 0 data")).collect();
        layout.logical_x = (0..distance as i32).map(|k| layout.qubit_at(Coord::new(2 * k, 0)).expect("column 0 data")).collect();
        Ok(layout)
    }

    pub fn distance(&self) -> u32 {
        self.distance
    }

    /// Side length of the qubit grid, `2d - 1`.
    pub fn grid_size(&self) -> i32 {
        2 * self.distance as i32 - 1
    }

    pub fn num_qubits(&self) -> usize {
        self.coords.len()
    }

    pub fn num_data(&self) -> usize {
        self.num_data
    }

    pub fn data_qubits(&self) -> core::ops::Range<QubitId> {
        0..self.num_data
    }

    pub fn coord(&self, q: QubitId) -> Coord {
        self.coords[q]
    }

    pub fn role(&self, q: QubitId) -> QubitRole {
        self.roles[q]
    }

    pub fn is_data(&self, q: QubitId) -> bool {
        q < self.num_data
    }

    pub fn qubit_at(&self, c: Coord) -> Option<QubitId> {
        let side = self.grid_size();
        if c.row < 0 || c.col < 0 || c.row >= side || c.col >= side {
            return None;
        }
        self.grid[(c.row * side + c.col) as usize]
    }

    pub fn stabilizers(&self, kind: StabilizerKind) -> &[Stabilizer] {
        match kind {
            StabilizerKind::Z => &self.z_stabilizers,
            StabilizerKind::X => &self.x_stabilizers,
        }
    }

    pub fn all_stabilizers(&self) -> impl Iterator<Item = &Stabilizer> {
        self.z_stabilizers.iter().chain(self.x_stabilizers.iter())
    }

    /// Position of an ancilla's stabilizer within [`Layout::stabilizers`] of its kind.
    pub fn stabilizer_index(&self, ancilla: QubitId) -> Option<usize> {
        self.ancilla_index.get(ancilla).copied().flatten()
    }

    /// Data support of logical Z (row 0, West to East).
    pub fn logical_z(&self) -> &[QubitId] {
        &self.logical_z
    }

    /// Data support of logical X (column 0, North to South).
    pub fn logical_x(&self) -> &[QubitId] {
        &self.logical_x
    }

    /// Support of the logical operator measured when reading out in the basis of `kind`.
    ///
    /// Errors detected by `kind` stabilizers flip exactly this observable.
    pub fn logical_support(&self, kind: StabilizerKind) -> &[QubitId] {
        match kind {
            StabilizerKind::Z => &self.logical_z,
            StabilizerKind::X => &self.logical_x,
        }
    }

    /// The detection lattice whose boundary lines end on `side`.
    pub fn boundary_lattice(side: Side) -> StabilizerKind {
        match side {
            Side::North | Side::South => StabilizerKind::Z,
            Side::West | Side::East => StabilizerKind::X,
        }
    }

    /// The side crossed by the logical observable of lattice `kind`; its opposite is the far side.
    pub fn observable_side(kind: StabilizerKind) -> Side {
        match kind {
            StabilizerKind::Z => Side::North,
            StabilizerKind::X => Side::West,
        }
    }

    /// Which lattice sides a point lies on, for a grid coordinate.
    pub fn sides_of(&self, c: Coord) -> impl Iterator<Item = Side> {
        let last = self.grid_size() - 1;
        let flags = [c.row == 0, c.col == 0, c.col == last, c.row == last];
        Side::ALL.into_iter().zip(flags).filter(|(_, f)| *f).map(|(s, _)| s)
    }
}
