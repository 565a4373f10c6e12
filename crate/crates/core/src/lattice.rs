//! The space-time lattice of dots and lines for one stabilizer kind.
//!
//! Dots are every place a detection event of that kind can appear. A line joins
//! two dots when some single fault lights exactly those two, or joins one dot
//! to a spatial boundary when some single fault lights it alone. Each line
//! carries the summed first-order probability of its faults, so the line fails
//! with probability `coefficient * p` at low `p`.

use alloc::collections::BTreeMap;
use alloc::collections::VecDeque;
use alloc::vec;
use alloc::vec::Vec;

use crate::circuit::MemoryCircuit;
use crate::layout::{Coord, Layout, QubitId, Side, StabilizerKind};
use crate::noise::{enumerate_single_faults, Coefficient, FaultLocation, FaultSet};
use crate::syndrome::{extract_detection_events, residual, run_shot_with_frame, DetectionEvent};
use crate::{Error, Result};

pub type DotId = usize;
pub type LineId = usize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Dot {
    /// Detection layer (time).
    pub layer: u32,
    /// Grid position of the stabilizer's ancilla.
    pub coord: Coord,
    /// Index of the stabilizer within its kind.
    pub stabilizer: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum LineEnds {
    /// Two dots, smaller id first.
    Pair(DotId, DotId),
    Boundary(DotId, Side),
}

impl LineEnds {
    pub fn dots(&self) -> (DotId, Option<DotId>) {
        match *self {
            LineEnds::Pair(a, b) => (a, Some(b)),
            LineEnds::Boundary(a, _) => (a, None),
        }
    }

    pub fn is_boundary(&self) -> bool {
        matches!(self, LineEnds::Boundary(..))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Line {
    pub ends: LineEnds,
    /// Sum of the first-order coefficients of all contributing faults.
    pub coefficient: Coefficient,
    /// Contributing single faults, in circuit order.
    pub faults: Vec<FaultLocation>,
    /// Whether the faults of this line flip the logical observable of the lattice's kind.
    pub flips_logical: bool,
    /// Data qubits whose final value the first contributing fault flips; applying
    /// these as a correction undoes the line.
    pub correction: Vec<QubitId>,
    /// Contributing faults whose logical effect disagrees with `flips_logical`.
    pub conflicts: u32,
}

impl Line {
    /// True when both ends are the same stabilizer at different times.
    pub fn is_timelike(&self, lattice: &Lattice) -> bool {
        match self.ends {
            LineEnds::Pair(a, b) => lattice.dots[a].stabilizer == lattice.dots[b].stabilizer,
            LineEnds::Boundary(..) => false,
        }
    }
}

/// First-order probability of a line at physical error rate `p`.
pub fn line_probability(line: &Line, p: f64) -> f64 {
    line.coefficient.as_f64() * p
}

/// Identifies the circuit a lattice was built from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LatticeHeader {
    pub distance: u32,
    pub rounds: u32,
    pub basis: crate::MemoryBasis,
    pub kind: StabilizerKind,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Lattice {
    header: LatticeHeader,
    first_layer: u32,
    stabilizers_per_layer: usize,
    dots: Vec<Dot>,
    lines: Vec<Line>,
    /// Sorted `(neighbour, line)` per dot.
    adjacency: Vec<Vec<(DotId, LineId)>>,
    /// Boundary lines per dot.
    boundary: Vec<Vec<LineId>>,
}

/// Builds the lattice of `kind` by simulating every single fault of `circuit`.
pub fn build_lattice(circuit: &MemoryCircuit, kind: StabilizerKind) -> Result<Lattice> {
    if circuit.rounds() < 2 {
        return Err(Error::InvalidRounds { min: 2, got: circuit.rounds() });
    }
    let layout = circuit.layout();
    let header = LatticeHeader { distance: layout.distance(), rounds: circuit.rounds(), basis: circuit.basis(), kind };
    let dots = dots_for(circuit, kind);
    let layers = circuit.detection_layers(kind);
    let per_layer = layout.stabilizers(kind).len();
    let dot_of = |e: &DetectionEvent| (e.layer - layers.start) as usize * per_layer + e.index;
    let support = layout.logical_support(kind);

    let mut by_ends: BTreeMap<LineEnds, Line> = BTreeMap::new();
    for (fault, coefficient) in enumerate_single_faults(circuit) {
        let faults = FaultSet::single(fault);
        let (record, frame) = run_shot_with_frame(circuit, &faults);
        let events = extract_detection_events(&record, circuit)?;
        let lit: Vec<DotId> = events.of_kind(kind).map(dot_of).collect();
        let res = residual(circuit, &record, &frame, kind);
        let flips = support.iter().fold(false, |acc, q| acc ^ res[*q]);
        let ends = match lit[..] {
            [] => continue,
            [a] => LineEnds::Boundary(a, boundary_side(kind, flips)),
            [a, b] => LineEnds::Pair(a.min(b), a.max(b)),
            _ => return Err(Error::Internal("single fault lit more than two dots of one kind")),
        };
        let line = by_ends.entry(ends).or_insert_with(|| Line {
            ends,
            coefficient: Coefficient::default(),
            faults: Vec::new(),
            flips_logical: flips,
            correction: (0..res.len()).filter(|q| res[*q]).collect(),
            conflicts: 0,
        });
        line.coefficient += coefficient;
        line.faults.push(fault);
        if line.flips_logical != flips {
            line.conflicts += 1;
        }
    }
    let lines: Vec<Line> = by_ends.into_values().collect();
    Lattice::from_parts(header, dots, lines)
}

/// Boundary lines that flip the observable cross the side it runs along.
fn boundary_side(kind: StabilizerKind, flips: bool) -> Side {
    let near = Layout::observable_side(kind);
    if flips {
        near
    } else {
        near.opposite()
    }
}

fn dots_for(circuit: &MemoryCircuit, kind: StabilizerKind) -> Vec<Dot> {
    let stabs = circuit.layout().stabilizers(kind);
    circuit
        .detection_layers(kind)
        .flat_map(|layer| stabs.iter().enumerate().map(move |(i, s)| Dot { layer, coord: s.coord, stabilizer: i }))
        .collect()
}

impl Lattice {
    /// Reassembles a lattice from its header, dots and lines, rebuilding the indices.
    ///
    /// Dots must be exactly those of the described circuit, in lexicographic order.
    pub fn from_parts(header: LatticeHeader, dots: Vec<Dot>, lines: Vec<Line>) -> Result<Self> {
        let circuit = MemoryCircuit::for_distance(header.distance, header.rounds, header.basis)?;
        if dots != dots_for(&circuit, header.kind) {
            return Err(Error::InvalidArgument { name: "dots", reason: "do not match the lattice header" });
        }
        let mut adjacency = vec![Vec::new(); dots.len()];
        let mut boundary = vec![Vec::new(); dots.len()];
        for (id, line) in lines.iter().enumerate() {
            match line.ends {
                LineEnds::Pair(a, b) if a < b && b < dots.len() => {
                    adjacency[a].push((b, id));
                    adjacency[b].push((a, id));
                }
                LineEnds::Boundary(a, _) if a < dots.len() => boundary[a].push(id),
                _ => return Err(Error::InvalidArgument { name: "lines", reason: "line endpoint out of range" }),
            }
        }
        for adj in adjacency.iter_mut() {
            adj.sort_unstable();
        }
        let layers = circuit.detection_layers(header.kind);
        Ok(Self {
            header,
            first_layer: layers.start,
            stabilizers_per_layer: circuit.layout().stabilizers(header.kind).len(),
            dots,
            lines,
            adjacency,
            boundary,
        })
    }

    pub fn header(&self) -> &LatticeHeader {
        &self.header
    }

    pub fn kind(&self) -> StabilizerKind {
        self.header.kind
    }

    pub fn dots(&self) -> &[Dot] {
        &self.dots
    }

    pub fn lines(&self) -> &[Line] {
        &self.lines
    }

    pub fn num_dots(&self) -> usize {
        self.dots.len()
    }

    /// `(neighbour, line)` pairs of a dot, sorted by neighbour.
    pub fn neighbors(&self, dot: DotId) -> &[(DotId, LineId)] {
        &self.adjacency[dot]
    }

    pub fn boundary_lines(&self, dot: DotId) -> &[LineId] {
        &self.boundary[dot]
    }

    /// Number of distinct neighbouring dots.
    pub fn degree(&self, dot: DotId) -> usize {
        let adj = &self.adjacency[dot];
        adj.iter().enumerate().filter(|(i, (n, _))| *i == 0 || adj[i - 1].0 != *n).count()
    }

    /// Dot of a detection event, if it belongs to this lattice.
    pub fn dot_of(&self, event: &DetectionEvent) -> Option<DotId> {
        if event.kind != self.header.kind || event.layer < self.first_layer || event.index >= self.stabilizers_per_layer {
            return None;
        }
        let id = (event.layer - self.first_layer) as usize * self.stabilizers_per_layer + event.index;
        (id < self.dots.len()).then_some(id)
    }

    pub fn event_of(&self, dot: DotId) -> DetectionEvent {
        let d = &self.dots[dot];
        DetectionEvent { kind: self.header.kind, layer: d.layer, index: d.stabilizer }
    }

    /// A dot is in the bulk when it has no boundary line and is not in the first
    /// or last detection layer.
    pub fn is_bulk(&self, dot: DotId) -> bool {
        let last = self.dots.last().map(|d| d.layer).unwrap_or(0);
        let layer = self.dots[dot].layer;
        layer != self.first_layer && layer != last && self.boundary[dot].is_empty()
    }

    /// Histogram of dot degree (distinct neighbouring dots) to number of dots.
    pub fn degree_histogram(&self) -> BTreeMap<usize, usize> {
        let mut h = BTreeMap::new();
        for d in 0..self.dots.len() {
            *h.entry(self.degree(d)).or_insert(0) += 1;
        }
        h
    }

    pub fn max_coefficient(&self) -> Coefficient {
        self.lines.iter().map(|l| l.coefficient).max().unwrap_or_default()
    }

    /// Unit-weight breadth-first distances from `sources` (each at distance 0).
    pub fn bfs(&self, sources: &[DotId]) -> Vec<Option<u32>> {
        self.bfs_filtered(sources, |_, _| true)
    }

    fn bfs_filtered(&self, sources: &[DotId], keep: impl Fn(DotId, DotId) -> bool) -> Vec<Option<u32>> {
        let mut dist = vec![None; self.dots.len()];
        let mut queue = VecDeque::new();
        for &s in sources {
            if dist[s].is_none() {
                dist[s] = Some(0);
                queue.push_back(s);
            }
        }
        while let Some(u) = queue.pop_front() {
            let du = dist[u].unwrap();
            for &(v, _) in &self.adjacency[u] {
                if dist[v].is_none() && keep(u, v) {
                    dist[v] = Some(du + 1);
                    queue.push_back(v);
                }
            }
        }
        dist
    }

    /// Length in lines of the shortest path from boundary `from` to its opposite,
    /// counting both boundary lines. With `layer = Some(t)` only dots of that
    /// detection layer are used.
    pub fn crossing_distance(&self, from: Side, layer: Option<u32>) -> Option<u32> {
        let in_scope = |d: DotId| layer.is_none_or(|t| self.dots[d].layer == t);
        let touches =
            |d: DotId, side: Side| self.boundary[d].iter().any(|l| matches!(self.lines[*l].ends, LineEnds::Boundary(_, s) if s == side));
        let sources: Vec<DotId> = (0..self.dots.len()).filter(|d| in_scope(*d) && touches(*d, from)).collect();
        let dist = self.bfs_filtered(&sources, |_, v| in_scope(v));
        (0..self.dots.len()).filter(|d| touches(*d, from.opposite())).filter_map(|d| dist[d]).min().map(|x| x + 2)
    }
}

/// Precomputed effect of every single fault on one lattice: the dots it lights
/// and whether it flips the logical observable of the lattice's kind.
///
/// Frame propagation is linear, so the effect of a fault set is the XOR of its
/// members' effects. This is how the Monte Carlo loop avoids re-simulating.
#[derive(Debug, Clone)]
pub struct FaultEffects {
    kind: StabilizerKind,
    /// Index of the first entry of each flat gate, plus the total at the end.
    starts: Vec<usize>,
    dots: Vec<[u32; 2]>,
    lit: Vec<u8>,
    flips: Vec<bool>,
}

impl FaultEffects {
    pub fn new(circuit: &MemoryCircuit, lattice: &Lattice) -> Result<Self> {
        let kind = lattice.kind();
        let support = circuit.layout().logical_support(kind);
        let mut starts = Vec::with_capacity(circuit.num_gates() + 1);
        let (mut dots, mut lit, mut flips) = (Vec::new(), Vec::new(), Vec::new());
        let mut last_gate = None;
        for (fault, _) in enumerate_single_faults(circuit) {
            if last_gate != Some((fault.layer, fault.gate)) {
                last_gate = Some((fault.layer, fault.gate));
                starts.push(dots.len());
            }
            let (record, frame) = run_shot_with_frame(circuit, &FaultSet::single(fault));
            let events = extract_detection_events(&record, circuit)?;
            let mut pair = [0u32; 2];
            let mut n = 0u8;
            for e in events.of_kind(kind) {
                let d = lattice.dot_of(e).ok_or(Error::Internal("event outside the lattice"))?;
                if n == 2 {
                    return Err(Error::Internal("single fault lit more than two dots of one kind"));
                }
                pair[n as usize] = d as u32;
                n += 1;
            }
            let res = residual(circuit, &record, &frame, kind);
            dots.push(pair);
            lit.push(n);
            flips.push(support.iter().fold(false, |acc, q| acc ^ res[*q]));
        }
        starts.push(dots.len());
        Ok(Self { kind, starts, dots, lit, flips })
    }

    pub fn kind(&self) -> StabilizerKind {
        self.kind
    }

    /// Dots lit by one fault and whether it flips the observable.
    pub fn effect(&self, circuit: &MemoryCircuit, fault: &FaultLocation) -> Option<(&[u32], bool)> {
        let flat = circuit.flat_index(fault.layer, fault.gate)?;
        let i = self.starts[flat] + fault.kind.index();
        (i < self.starts[flat + 1]).then(|| (&self.dots[i][..self.lit[i] as usize], self.flips[i]))
    }

    /// Lit dots (sorted, each lit an odd number of times) and the logical flip of a fault set.
    pub fn combine(&self, circuit: &MemoryCircuit, faults: &FaultSet) -> Result<(Vec<DotId>, bool)> {
        let mut all = Vec::new();
        let mut flip = false;
        for f in faults {
            let (dots, fl) = self.effect(circuit, f).ok_or(Error::UnknownLocation { layer: f.layer, gate: f.gate })?;
            all.extend(dots.iter().map(|d| *d as DotId));
            flip ^= fl;
        }
        all.sort_unstable();
        let mut out = Vec::with_capacity(all.len());
        for d in all {
            if out.last() == Some(&d) {
                out.pop();
            } else {
                out.push(d);
            }
        }
        Ok((out, flip))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::MemoryBasis;
    use crate::syndrome::simulate;

    fn lattice(d: u32, r: u32, b: MemoryBasis, kind: StabilizerKind) -> (MemoryCircuit, Lattice) {
        let c = MemoryCircuit::for_distance(d, r, b).unwrap();
        let l = build_lattice(&c, kind).unwrap();
        (c, l)
    }

    #[test]
    fn needs_two_rounds() {
        let c = MemoryCircuit::for_distance(3, 1, MemoryBasis::Z).unwrap();
        assert_eq!(build_lattice(&c, StabilizerKind::Z), Err(Error::InvalidRounds { min: 2, got: 1 }));
    }

    #[test]
    fn line_probability_is_linear() {
        let line = Line {
            ends: LineEnds::Boundary(0, Side::North),
            coefficient: Coefficient::from_fifteenths(42),
            faults: Vec::new(),
            flips_logical: false,
            correction: Vec::new(),
            conflicts: 0,
        };
        assert!((line_probability(&line, 7.4e-4) - 2.072e-3).abs() < 1e-15);
        assert_eq!(line_probability(&line, 0.0), 0.0);
        let unit = Line { coefficient: Coefficient::from_fifteenths(15), ..line };
        assert!((line_probability(&unit, 1e-3) - 1e-3).abs() < 1e-18);
    }

    #[test]
    fn lines_are_reproduced_by_their_faults() {
        for b in [MemoryBasis::Z, MemoryBasis::X] {
            for kind in [StabilizerKind::Z, StabilizerKind::X] {
                let (c, l) = lattice(3, 3, b, kind);
                for line in l.lines() {
                    assert!(!line.faults.is_empty());
                    assert!(line.coefficient.fifteenths() > 0);
                    assert_eq!(line.conflicts, 0, "{:?}", line.ends);
                    let total: Coefficient = line.faults.iter().map(|f| f.kind.coefficient()).sum();
                    assert_eq!(total, line.coefficient);
                    for f in &line.faults {
                        let (ev, _) = simulate(&c, &FaultSet::single(*f));
                        let mut lit: Vec<DotId> = ev.of_kind(kind).map(|e| l.dot_of(e).unwrap()).collect();
                        lit.sort();
                        match line.ends {
                            LineEnds::Pair(a, b) => assert_eq!(lit, [a, b]),
                            LineEnds::Boundary(a, _) => assert_eq!(lit, [a]),
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn coefficients_are_conserved() {
        let (c, l) = lattice(3, 3, MemoryBasis::Z, StabilizerKind::Z);
        let from_faults: Coefficient = enumerate_single_faults(&c)
            .filter(|(f, _)| {
                let (ev, _) = simulate(&c, &FaultSet::single(*f));
                ev.count_kind(StabilizerKind::Z) > 0
            })
            .map(|(_, k)| k)
            .sum();
        let from_lines: Coefficient = l.lines().iter().map(|l| l.coefficient).sum();
        assert_eq!(from_faults, from_lines);
    }

    #[test]
    fn degree_bound_and_distance() {
        for d in 3..=5 {
            for (b, kind) in [(MemoryBasis::Z, StabilizerKind::Z), (MemoryBasis::X, StabilizerKind::X)] {
                let (_, l) = lattice(d, d, b, kind);
                for dot in 0..l.num_dots() {
                    if l.is_bulk(dot) {
                        assert!(l.degree(dot) <= 12, "d={d} dot {:?} degree {}", l.dots()[dot], l.degree(dot));
                    }
                }
                let from = Layout::observable_side(kind);
                assert_eq!(l.crossing_distance(from, None), Some(d));
                assert_eq!(l.crossing_distance(from, Some(d / 2)), Some(d));
            }
        }
    }

    #[test]
    fn opposite_kind_lattice_has_no_time_boundary_layers() {
        let (c, l) = lattice(3, 4, MemoryBasis::Z, StabilizerKind::X);
        assert_eq!(l.dots().first().unwrap().layer, 1);
        assert_eq!(l.dots().last().unwrap().layer, 3);
        assert_eq!(l.num_dots(), 3 * c.layout().stabilizers(StabilizerKind::X).len());
    }

    #[test]
    fn boundary_lines_sit_on_their_side() {
        let (c, l) = lattice(4, 3, MemoryBasis::Z, StabilizerKind::Z);
        let last_row = c.layout().grid_size() - 2;
        for line in l.lines() {
            if let LineEnds::Boundary(dot, side) = line.ends {
                let row = l.dots()[dot].coord.row;
                match side {
                    Side::North => assert_eq!(row, 1),
                    Side::South => assert_eq!(row, last_row),
                    s => panic!("Z lattice boundary on {s:?}"),
                }
            }
        }
    }

    #[test]
    fn has_spacelike_timelike_and_diagonal_lines() {
        let (_, l) = lattice(4, 4, MemoryBasis::Z, StabilizerKind::Z);
        let mut kinds = [false; 3];
        for line in l.lines() {
            if let LineEnds::Pair(a, b) = line.ends {
                let (da, db) = (&l.dots()[a], &l.dots()[b]);
                let idx = match (da.layer == db.layer, da.coord == db.coord) {
                    (true, false) => 0,
                    (false, true) => 1,
                    (false, false) => 2,
                    (true, true) => unreachable!(),
                };
                kinds[idx] = true;
            }
        }
        assert_eq!(kinds, [true; 3]);
    }

    #[test]
    fn fault_effects_match_simulation() {
        use rand::{Rng, SeedableRng};
        for b in [MemoryBasis::Z, MemoryBasis::X] {
            let (c, l) = lattice(3, 3, b, b.kind());
            let fx = FaultEffects::new(&c, &l).unwrap();
            let singles: Vec<FaultLocation> = enumerate_single_faults(&c).map(|(f, _)| f).collect();
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
            for _ in 0..300 {
                let picks: Vec<FaultLocation> = (0..rng.random_range(0..6)).map(|_| singles[rng.random_range(0..singles.len())]).collect();
                let faults = picks.iter().fold(FaultSet::empty(), |acc, f| acc.compose(&FaultSet::single(*f)));
                let (events, flip) = simulate(&c, &faults);
                let mut expect: Vec<DotId> = events.of_kind(b.kind()).map(|e| l.dot_of(e).unwrap()).collect();
                expect.sort();
                assert_eq!(fx.combine(&c, &faults).unwrap(), (expect, flip));
            }
        }
    }
}
