//! Unit-weight minimum-weight perfect matching decoder.
//!
//! Every detection event gets a boundary companion. An event may pair with
//! another event (weight: lattice distance) or with its own companion (weight:
//! distance to the nearest boundary), and unused companions pair among
//! themselves at zero cost.

use alloc::vec;
use alloc::vec::Vec;

use crate::blossom::min_weight_perfect_matching;
use crate::circuit::MemoryCircuit;
use crate::lattice::{build_lattice, DotId, FaultEffects, Lattice, LineEnds, LineId};
use crate::noise::FaultSet;
use crate::syndrome::{residual, run_shot_with_frame, simulate, DetectionSet};
use crate::{Error, Result};

/// Where a shortest path may end.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Target {
    Dot(DotId),
    Boundary,
}

/// Breadth-first distance in lines from `a` to `b`, or `None` if unreachable.
///
/// A boundary target costs one extra line past the dot that owns the boundary line.
pub fn shortest_path_weight(lattice: &Lattice, a: DotId, b: Target) -> Option<u32> {
    let dist = lattice.bfs(&[a]);
    match b {
        Target::Dot(b) => dist[b],
        Target::Boundary => {
            (0..lattice.num_dots()).filter(|d| !lattice.boundary_lines(*d).is_empty()).filter_map(|d| dist[d]).min().map(|x| x + 1)
        }
    }
}

/// Weighted graph handed to the matcher.
///
/// Built by [`MatchingProblem::with_boundary`] it holds `k` events as nodes
/// `0..k` and their companions as `k..2k`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MatchingProblem {
    num_nodes: usize,
    edges: Vec<(usize, usize, u32)>,
    events: Option<usize>,
}

impl MatchingProblem {
    /// An arbitrary graph.
    pub fn new(num_nodes: usize, edges: Vec<(usize, usize, u32)>) -> Result<Self> {
        if let Some(e) = edges.iter().find(|e| e.0 >= num_nodes || e.1 >= num_nodes || e.0 == e.1) {
            return Err(Error::InvalidArgument { name: "edges", reason: if e.0 == e.1 { "self loop" } else { "node out of range" } });
        }
        Ok(Self { num_nodes, edges, events: None })
    }

    /// Events with pairwise distances `dist(i, j)` and boundary distances `boundary[i]`.
    pub fn with_boundary(boundary: &[u32], dist: impl Fn(usize, usize) -> u32) -> Self {
        let k = boundary.len();
        let mut edges = Vec::with_capacity(k * k + k);
        for i in 0..k {
            for j in i + 1..k {
                edges.push((i, j, dist(i, j)));
            }
            edges.push((i, k + i, boundary[i]));
        }
        for i in 0..k {
            for j in i + 1..k {
                edges.push((k + i, k + j, 0));
            }
        }
        Self { num_nodes: 2 * k, edges, events: Some(k) }
    }

    pub fn num_nodes(&self) -> usize {
        self.num_nodes
    }

    /// Number of events when the problem has the companion structure.
    pub fn num_events(&self) -> Option<usize> {
        self.events
    }

    pub fn edges(&self) -> &[(usize, usize, u32)] {
        &self.edges
    }

    /// Cheapest edge between two nodes.
    pub fn weight(&self, a: usize, b: usize) -> Option<u32> {
        self.edges.iter().filter(|e| (e.0 == a && e.1 == b) || (e.0 == b && e.1 == a)).map(|e| e.2).min()
    }

    /// Total weight of `pairs` if they form a perfect matching of this graph.
    pub fn matching_weight(&self, pairs: &[(usize, usize)]) -> Option<u64> {
        let mut seen = vec![false; self.num_nodes];
        let mut total = 0u64;
        for &(a, b) in pairs {
            for x in [a, b] {
                if x >= self.num_nodes || core::mem::replace(&mut seen[x], true) {
                    return None;
                }
            }
            total += self.weight(a, b)? as u64;
        }
        seen.iter().all(|s| *s).then_some(total)
    }

    /// Exact minimum-weight perfect matching by the blossom algorithm.
    pub fn solve(&self) -> Result<NodeMatching> {
        let edges: Vec<(usize, usize, i64)> = self.edges.iter().map(|&(a, b, w)| (a, b, w as i64)).collect();
        let mates = min_weight_perfect_matching(self.num_nodes, &edges)?;
        let pairs: Vec<(usize, usize)> = (0..self.num_nodes).filter(|&u| u < mates[u]).map(|u| (u, mates[u])).collect();
        let weight = self.matching_weight(&pairs).ok_or(Error::Internal("blossom returned an invalid matching"))?;
        Ok(NodeMatching { pairs, weight })
    }
}

/// Perfect matching of a [`MatchingProblem`]; pairs are `(low, high)` sorted by `low`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NodeMatching {
    pub pairs: Vec<(usize, usize)>,
    pub weight: u64,
}

/// What a detection event was matched to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Pair {
    Dots(DotId, DotId),
    Boundary(DotId),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Matching {
    pub pairs: Vec<Pair>,
    pub weight: u64,
}

/// Lines making up a correction: the symmetric difference of one shortest path per matched pair.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct CorrectionSet {
    lines: Vec<LineId>,
}

impl CorrectionSet {
    pub fn from_lines(mut lines: Vec<LineId>) -> Self {
        lines.sort_unstable();
        let mut out: Vec<LineId> = Vec::with_capacity(lines.len());
        for l in lines {
            if out.last() == Some(&l) {
                out.pop();
            } else {
                out.push(l);
            }
        }
        Self { lines: out }
    }

    pub fn lines(&self) -> &[LineId] {
        &self.lines
    }

    pub fn is_empty(&self) -> bool {
        self.lines.is_empty()
    }

    /// Whether applying the correction flips the lattice kind's logical observable.
    pub fn flips_logical(&self, lattice: &Lattice) -> bool {
        self.lines.iter().fold(false, |acc, l| acc ^ lattice.lines()[*l].flips_logical)
    }

    /// Data qubits the correction flips. Time-like lines usually contribute nothing
    /// here: they only reinterpret a measurement.
    pub fn data_flips(&self, lattice: &Lattice, num_data: usize) -> Vec<bool> {
        let mut out = vec![false; num_data];
        for l in &self.lines {
            for q in &lattice.lines()[*l].correction {
                out[*q] ^= true;
            }
        }
        out
    }

    /// One representative fault per line; injecting them reproduces the correction.
    pub fn as_faults(&self, lattice: &Lattice) -> FaultSet {
        self.lines.iter().map(|l| FaultSet::single(lattice.lines()[*l].faults[0])).fold(FaultSet::empty(), |acc, f| acc.compose(&f))
    }
}

/// Decoder for one lattice, with all-pairs distances precomputed.
#[derive(Debug, Clone)]
pub struct Decoder {
    lattice: Lattice,
    dist: Vec<u16>,
    /// Distance from each dot to the nearest boundary, counting the boundary line.
    boundary: Vec<u16>,
}

impl Decoder {
    pub fn new(lattice: Lattice) -> Result<Self> {
        let n = lattice.num_dots();
        let mut dist = vec![u16::MAX; n * n];
        for a in 0..n {
            for (b, d) in lattice.bfs(&[a]).into_iter().enumerate() {
                let d = d.ok_or(Error::Internal("lattice is disconnected"))?;
                dist[a * n + b] = u16::try_from(d).map_err(|_| Error::Internal("lattice too large"))?;
            }
        }
        let sources: Vec<DotId> = (0..n).filter(|d| !lattice.boundary_lines(*d).is_empty()).collect();
        if sources.is_empty() {
            return Err(Error::Internal("lattice has no boundary"));
        }
        let boundary = lattice.bfs(&sources).into_iter().map(|d| d.map_or(u16::MAX, |d| d as u16 + 1)).collect();
        Ok(Self { lattice, dist, boundary })
    }

    pub fn lattice(&self) -> &Lattice {
        &self.lattice
    }

    pub fn distance(&self, a: DotId, b: Target) -> u32 {
        match b {
            Target::Dot(b) => self.dist[a * self.lattice.num_dots() + b] as u32,
            Target::Boundary => self.boundary[a] as u32,
        }
    }

    /// Matching problem for a list of distinct dots.
    pub fn problem(&self, dots: &[DotId]) -> MatchingProblem {
        let boundary: Vec<u32> = dots.iter().map(|d| self.boundary[*d] as u32).collect();
        MatchingProblem::with_boundary(&boundary, |i, j| self.distance(dots[i], Target::Dot(dots[j])))
    }

    /// Decodes the events of this lattice's kind; events of the other kind are ignored.
    pub fn decode(&self, detections: &DetectionSet) -> Result<Matching> {
        let dots = detections
            .of_kind(self.lattice.kind())
            .map(|e| self.lattice.dot_of(e).ok_or(Error::InvalidArgument { name: "detections", reason: "event outside the lattice" }))
            .collect::<Result<Vec<_>>>()?;
        self.decode_dots(&dots)
    }

    pub fn decode_dots(&self, dots: &[DotId]) -> Result<Matching> {
        let k = dots.len();
        match k {
            0 => return Ok(Matching { pairs: Vec::new(), weight: 0 }),
            1 => return Ok(Matching { pairs: vec![Pair::Boundary(dots[0])], weight: self.boundary[dots[0]] as u64 }),
            _ => {}
        }
        let solved = self.problem(dots).solve()?;
        let mut pairs = Vec::with_capacity(k);
        for &(a, b) in &solved.pairs {
            if a >= k {
                continue;
            }
            pairs.push(if b >= k { Pair::Boundary(dots[a]) } else { Pair::Dots(dots[a], dots[b]) });
        }
        pairs.sort_unstable();
        Ok(Matching { pairs, weight: solved.weight })
    }

    /// Shortest path from `a` to `b`, preferring the lowest-numbered dot at every step.
    pub fn path(&self, a: DotId, b: Target) -> Vec<LineId> {
        let lat = &self.lattice;
        let mut lines = Vec::new();
        let mut cur = a;
        loop {
            let here = self.distance(cur, b);
            if here == 0 {
                break;
            }
            if b == Target::Boundary && here == 1 {
                lines.push(lat.boundary_lines(cur)[0]);
                break;
            }
            let &(next, line) =
                lat.neighbors(cur).iter().find(|(n, _)| self.distance(*n, b) + 1 == here).expect("distances are consistent");
            lines.push(line);
            cur = next;
        }
        lines
    }

    pub fn correction(&self, matching: &Matching) -> CorrectionSet {
        let mut lines = Vec::new();
        for p in &matching.pairs {
            match *p {
                Pair::Dots(a, b) => lines.extend(self.path(a, Target::Dot(b))),
                Pair::Boundary(a) => lines.extend(self.path(a, Target::Boundary)),
            }
        }
        CorrectionSet::from_lines(lines)
    }
}

/// Builds the correction of a matching on `decoder`'s lattice.
pub fn correction_from_matching(decoder: &Decoder, matching: &Matching) -> CorrectionSet {
    decoder.correction(matching)
}

/// Whether the faults together with the correction flip the memory readout.
///
/// `decoder` must be built on the memory basis lattice of `circuit`.
pub fn logical_failure(circuit: &MemoryCircuit, decoder: &Decoder, faults: &FaultSet, correction: &CorrectionSet) -> bool {
    let kind = decoder.lattice().kind();
    let (record, frame) = run_shot_with_frame(circuit, faults);
    let mut res = residual(circuit, &record, &frame, kind);
    for (r, c) in res.iter_mut().zip(correction.data_flips(decoder.lattice(), circuit.layout().num_data())) {
        *r ^= c;
    }
    circuit.layout().logical_support(kind).iter().fold(false, |acc, q| acc ^ res[*q])
}

/// Dots where an odd number of correction lines end. A valid correction of a
/// detection set has exactly its dots here.
pub fn boundary_of(lattice: &Lattice, correction: &CorrectionSet) -> Vec<DotId> {
    let mut dots = Vec::new();
    for l in correction.lines() {
        match lattice.lines()[*l].ends {
            LineEnds::Pair(a, b) => dots.extend([a, b]),
            LineEnds::Boundary(a, _) => dots.push(a),
        }
    }
    dots.sort_unstable();
    let mut out: Vec<DotId> = Vec::new();
    for d in dots {
        if out.last() == Some(&d) {
            out.pop();
        } else {
            out.push(d);
        }
    }
    out
}

/// Everything needed to judge one memory-experiment shot: the memory basis
/// lattice, its decoder, and the single-fault effect table.
#[derive(Debug, Clone)]
pub struct ShotDecoder {
    circuit: MemoryCircuit,
    decoder: Decoder,
    effects: FaultEffects,
}

impl ShotDecoder {
    pub fn new(circuit: MemoryCircuit) -> Result<Self> {
        let lattice = build_lattice(&circuit, circuit.basis().kind())?;
        let effects = FaultEffects::new(&circuit, &lattice)?;
        let decoder = Decoder::new(lattice)?;
        Ok(Self { circuit, decoder, effects })
    }

    pub fn circuit(&self) -> &MemoryCircuit {
        &self.circuit
    }

    pub fn decoder(&self) -> &Decoder {
        &self.decoder
    }

    pub fn effects(&self) -> &FaultEffects {
        &self.effects
    }

    /// Whether decoding this shot ends in a logical error, using the effect table.
    pub fn fails(&self, faults: &FaultSet) -> Result<bool> {
        let (dots, flip) = self.effects.combine(&self.circuit, faults)?;
        if dots.is_empty() {
            return Ok(flip);
        }
        let matching = self.decoder.decode_dots(&dots)?;
        Ok(flip ^ self.decoder.correction(&matching).flips_logical(self.decoder.lattice()))
    }

    /// Same as [`ShotDecoder::fails`] by full simulation; slow, for checking.
    pub fn fails_simulated(&self, faults: &FaultSet) -> Result<bool> {
        let (events, _) = simulate(&self.circuit, faults);
        let matching = self.decoder.decode(&events)?;
        let correction = self.decoder.correction(&matching);
        Ok(logical_failure(&self.circuit, &self.decoder, faults, &correction))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::MemoryBasis;
    use crate::lattice::build_lattice;
    use crate::noise::{enumerate_single_faults, FaultKind, FaultLocation};
    use crate::pauli::Pauli;
    use crate::StabilizerKind;

    fn setup(d: u32, r: u32, b: MemoryBasis) -> (MemoryCircuit, Decoder) {
        let c = MemoryCircuit::for_distance(d, r, b).unwrap();
        let l = build_lattice(&c, b.kind()).unwrap();
        (c, Decoder::new(l).unwrap())
    }

    #[test]
    fn path_weights() {
        let (_, dec) = setup(5, 5, MemoryBasis::Z);
        let l = dec.lattice();
        let a = l.neighbors(60)[0].0;
        assert_eq!(shortest_path_weight(l, 60, Target::Dot(a)), Some(1));
        assert_eq!(shortest_path_weight(l, 60, Target::Dot(60)), Some(0));
        let edge = (0..l.num_dots()).find(|d| !l.boundary_lines(*d).is_empty()).unwrap();
        assert_eq!(shortest_path_weight(l, edge, Target::Boundary), Some(1));
        let inner = l.neighbors(edge).iter().map(|x| x.0).find(|n| l.boundary_lines(*n).is_empty()).unwrap();
        assert_eq!(shortest_path_weight(l, inner, Target::Boundary), Some(2));
        for a in [0, 17, 60, 119] {
            for b in [0, 33, 90] {
                assert_eq!(Some(dec.distance(a, Target::Dot(b))), shortest_path_weight(l, a, Target::Dot(b)));
            }
            assert_eq!(Some(dec.distance(a, Target::Boundary)), shortest_path_weight(l, a, Target::Boundary));
        }
    }

    #[test]
    fn problem_structure() {
        let p = MatchingProblem::with_boundary(&[2, 3, 1], |i, j| (i + j) as u32);
        assert_eq!(p.num_nodes(), 6);
        assert_eq!(p.weight(0, 3), Some(2));
        assert_eq!(p.weight(0, 4), None);
        assert_eq!(p.weight(4, 5), Some(0));
        assert_eq!(p.weight(1, 2), Some(3));
        assert!(MatchingProblem::new(2, vec![(0, 2, 1)]).is_err());
        assert!(MatchingProblem::new(2, vec![(1, 1, 1)]).is_err());
    }

    #[test]
    fn empty_and_single() {
        let (_, dec) = setup(3, 3, MemoryBasis::Z);
        let m = dec.decode(&DetectionSet::default()).unwrap();
        assert_eq!(m, Matching { pairs: vec![], weight: 0 });
        assert!(dec.correction(&m).is_empty());
    }

    #[test]
    fn bulk_error_pairs_adjacent_events() {
        let (c, dec) = setup(5, 4, MemoryBasis::Z);
        let q = c.layout().qubit_at(crate::layout::Coord::new(4, 4)).unwrap();
        let gate = c.layers()[9].iter().position(|g| *g == crate::schedule::Gate::Idle(q)).unwrap() as u32;
        let faults = FaultSet::single(FaultLocation::new(9, gate, FaultKind::Pauli1(Pauli::X)));
        let (ev, _) = simulate(&c, &faults);
        let m = dec.decode(&ev).unwrap();
        assert_eq!(m.weight, 1);
        assert!(matches!(m.pairs[..], [Pair::Dots(..)]));
        let corr = dec.correction(&m);
        assert_eq!(corr.lines().len(), 1);
        assert_eq!(corr.data_flips(dec.lattice(), c.layout().num_data()).iter().filter(|x| **x).count(), 1);
        assert!(!logical_failure(&c, &dec, &faults, &corr));
    }

    #[test]
    fn boundary_error_matches_companion() {
        let (c, dec) = setup(5, 4, MemoryBasis::Z);
        let q = c.layout().qubit_at(crate::layout::Coord::new(0, 4)).unwrap();
        let gate = c.layers()[9].iter().position(|g| *g == crate::schedule::Gate::Idle(q)).unwrap() as u32;
        let faults = FaultSet::single(FaultLocation::new(9, gate, FaultKind::Pauli1(Pauli::X)));
        let (ev, flip) = simulate(&c, &faults);
        assert!(flip);
        let m = dec.decode(&ev).unwrap();
        assert_eq!(m.weight, 1);
        assert!(matches!(m.pairs[..], [Pair::Boundary(_)]));
        let corr = dec.correction(&m);
        assert!(dec.lattice().lines()[corr.lines()[0]].ends.is_boundary());
        assert!(corr.flips_logical(dec.lattice()));
        assert!(!logical_failure(&c, &dec, &faults, &corr));
    }

    #[test]
    fn no_faults_no_failure() {
        let (c, dec) = setup(3, 3, MemoryBasis::X);
        assert!(!logical_failure(&c, &dec, &FaultSet::empty(), &CorrectionSet::default()));
    }

    /// Every single fault is decoded, the correction explains its events, and no logical error results.
    #[test]
    fn single_faults_are_corrected() {
        for b in [MemoryBasis::Z, MemoryBasis::X] {
            let (c, dec) = setup(3, 3, b);
            for (f, _) in enumerate_single_faults(&c) {
                let faults = FaultSet::single(f);
                let (ev, _) = simulate(&c, &faults);
                let m = dec.decode(&ev).unwrap();
                let corr = dec.correction(&m);
                let mut lit: Vec<DotId> = ev.of_kind(b.kind()).map(|e| dec.lattice().dot_of(e).unwrap()).collect();
                lit.sort();
                assert_eq!(boundary_of(dec.lattice(), &corr), lit);
                // Injecting the correction as faults cancels every event of this kind.
                let (after, _) = simulate(&c, &faults.compose(&corr.as_faults(dec.lattice())));
                assert_eq!(after.count_kind(b.kind()), 0, "{f:?}");
                assert!(!logical_failure(&c, &dec, &faults, &corr), "{b:?} {f:?}");
            }
        }
    }

    /// A logical X applied mid-circuit leaves no events; the decoder cannot see it.
    #[test]
    fn logical_chain_is_a_failure() {
        let (c, dec) = setup(3, 3, MemoryBasis::Z);
        let layer = 9;
        let faults: Vec<FaultLocation> = c
            .layout()
            .logical_x()
            .iter()
            .map(|q| {
                let gate = c.layers()[layer].iter().position(|g| *g == crate::schedule::Gate::Idle(*q)).unwrap();
                FaultLocation::new(layer as u32, gate as u32, FaultKind::Pauli1(Pauli::X))
            })
            .collect();
        let faults = FaultSet::new(&c, faults).unwrap();
        let (ev, flip) = simulate(&c, &faults);
        assert!(ev.of_kind(StabilizerKind::Z).next().is_none());
        assert!(flip);
        let corr = dec.correction(&dec.decode(&ev).unwrap());
        assert!(logical_failure(&c, &dec, &faults, &corr));
        // Two of the three errors: the decoder completes the chain the short way and fails.
        let two = FaultSet::new(&c, faults.as_slice()[..2].to_vec()).unwrap();
        let (ev, _) = simulate(&c, &two);
        let corr = dec.correction(&dec.decode(&ev).unwrap());
        assert!(logical_failure(&c, &dec, &two, &corr));
    }

    #[test]
    fn correction_of_random_events_explains_them() {
        use rand::{Rng, SeedableRng};
        let (_, dec) = setup(5, 5, MemoryBasis::Z);
        let n = dec.lattice().num_dots();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        for _ in 0..200 {
            let mut dots: Vec<DotId> = (0..rng.random_range(0..9)).map(|_| rng.random_range(0..n)).collect();
            dots.sort();
            dots.dedup();
            let m = dec.decode_dots(&dots).unwrap();
            let covered: usize = m.pairs.iter().map(|p| if matches!(p, Pair::Dots(..)) { 2 } else { 1 }).sum();
            assert_eq!(covered, dots.len());
            let corr = dec.correction(&m);
            assert_eq!(boundary_of(dec.lattice(), &corr), dots);
            let sum: u64 = m
                .pairs
                .iter()
                .map(|p| match *p {
                    Pair::Dots(a, b) => dec.distance(a, Target::Dot(b)) as u64,
                    Pair::Boundary(a) => dec.distance(a, Target::Boundary) as u64,
                })
                .sum();
            assert_eq!(sum, m.weight);
        }
    }

    #[test]
    fn fast_path_matches_simulation() {
        for b in [MemoryBasis::Z, MemoryBasis::X] {
            let sd = ShotDecoder::new(MemoryCircuit::for_distance(3, 3, b).unwrap()).unwrap();
            let sampler = crate::noise::FaultSampler::new(sd.circuit(), 0.02).unwrap();
            let mut failures = 0;
            for shot in 0..400 {
                let faults = sampler.sample(11, shot);
                let fast = sd.fails(&faults).unwrap();
                assert_eq!(fast, sd.fails_simulated(&faults).unwrap());
                failures += fast as u32;
            }
            assert!(failures > 0);
        }
    }
}
