//! Brute-force reference implementations for small instances: exhaustive
//! matching, path counting, and fault sweeps.
//!
//! Every oracle refuses inputs above its size guard instead of truncating.

use alloc::vec;
use alloc::vec::Vec;

use crate::circuit::MemoryCircuit;
use crate::decoder::{MatchingProblem, NodeMatching, ShotDecoder};
use crate::lattice::{Lattice, LineEnds};
use crate::layout::Side;
use crate::noise::{FaultKind, FaultLocation, FaultSampler, FaultSet};
use crate::{Error, Result};

/// Largest general graph [`brute_force_matching`] accepts.
pub const MAX_BRUTE_NODES: usize = 12;
/// Largest event count for a problem with boundary companions.
pub const MAX_BRUTE_EVENTS: usize = 12;

/// Minimum-weight perfect matching by trying every perfect matching.
///
/// With companions the search runs over events only: each event either pairs
/// with another or with its own companion, and leftover companions pair at no
/// cost. This keeps 10-event problems (20 nodes) cheap.
pub fn brute_force_matching(problem: &MatchingProblem) -> Result<NodeMatching> {
    match problem.num_events() {
        Some(k) => {
            if k > MAX_BRUTE_EVENTS {
                return Err(Error::LimitExceeded { what: "events", limit: MAX_BRUTE_EVENTS as u64, got: k as u64 });
            }
            brute_with_companions(problem, k)
        }
        None => {
            let n = problem.num_nodes();
            if n > MAX_BRUTE_NODES {
                return Err(Error::LimitExceeded { what: "nodes", limit: MAX_BRUTE_NODES as u64, got: n as u64 });
            }
            brute_general(problem)
        }
    }
}

fn brute_general(problem: &MatchingProblem) -> Result<NodeMatching> {
    let n = problem.num_nodes();
    let mut w = vec![vec![None; n]; n];
    for a in 0..n {
        for b in 0..n {
            if a != b {
                w[a][b] = problem.weight(a, b);
            }
        }
    }
    fn go(
        w: &[Vec<Option<u32>>],
        used: &mut [bool],
        pairs: &mut Vec<(usize, usize)>,
        cost: u64,
        best: &mut Option<(u64, Vec<(usize, usize)>)>,
    ) {
        let Some(a) = used.iter().position(|u| !u) else {
            if best.as_ref().is_none_or(|b| cost < b.0) {
                *best = Some((cost, pairs.clone()));
            }
            return;
        };
        used[a] = true;
        for b in a + 1..used.len() {
            if let (false, Some(x)) = (used[b], w[a][b]) {
                used[b] = true;
                pairs.push((a, b));
                go(w, used, pairs, cost + x as u64, best);
                pairs.pop();
                used[b] = false;
            }
        }
        used[a] = false;
    }
    let mut best = None;
    go(&w, &mut vec![false; n], &mut Vec::new(), 0, &mut best);
    let (weight, pairs) = best.ok_or(Error::InvalidArgument { name: "problem", reason: "graph has no perfect matching" })?;
    Ok(NodeMatching { pairs, weight })
}

fn brute_with_companions(problem: &MatchingProblem, k: usize) -> Result<NodeMatching> {
    let missing = Error::InvalidArgument { name: "problem", reason: "companion structure is incomplete" };
    let mut dist = vec![vec![0u32; k]; k];
    let mut bound = vec![0u32; k];
    for a in 0..k {
        bound[a] = problem.weight(a, k + a).ok_or(missing.clone())?;
        for b in a + 1..k {
            dist[a][b] = problem.weight(a, b).ok_or(missing.clone())?;
            dist[b][a] = dist[a][b];
        }
    }
    /// `partner[i] == i` means matched to the boundary.
    fn go(dist: &[Vec<u32>], bound: &[u32], partner: &mut [usize], cost: u64, best: &mut Option<(u64, Vec<usize>)>) {
        let k = partner.len();
        let Some(a) = partner.iter().position(|p| *p == usize::MAX) else {
            if best.as_ref().is_none_or(|b| cost < b.0) {
                *best = Some((cost, partner.to_vec()));
            }
            return;
        };
        partner[a] = a;
        go(dist, bound, partner, cost + bound[a] as u64, best);
        for b in a + 1..k {
            if partner[b] == usize::MAX {
                partner[a] = b;
                partner[b] = a;
                go(dist, bound, partner, cost + dist[a][b] as u64, best);
                partner[b] = usize::MAX;
            }
        }
        partner[a] = usize::MAX;
    }
    let mut best = None;
    go(&dist, &bound, &mut vec![usize::MAX; k], 0, &mut best);
    let (weight, partner) = best.unwrap_or((0, Vec::new()));
    let mut pairs = Vec::new();
    let mut spare = Vec::new();
    for a in 0..k {
        match partner[a] {
            b if b == a => pairs.push((a, k + a)),
            b if b > a => {
                pairs.push((a, b));
                spare.extend([k + a, k + b]);
            }
            _ => {}
        }
    }
    spare.sort_unstable();
    pairs.extend(spare.chunks(2).map(|c| (c[0], c[1])));
    pairs.sort_unstable();
    Ok(NodeMatching { pairs, weight })
}

/// Count of crossing paths of one length.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PathEnumeration {
    /// Side of the volume, in dots.
    pub n: u32,
    /// Path length in lines, counting the boundary line at each end.
    pub m: u32,
    pub count: u64,
    /// Count per starting face.
    pub per_face: Vec<u64>,
}

pub const MAX_PATH_N: u32 = 4;
pub const MAX_PATH_M: u32 = 7;

/// Neighbour offsets `(t, row, col)` of a bulk dot: four space-like, two
/// time-like and six diagonal lines.
pub const BULK_TEMPLATE: [(i32, i32, i32); 12] = [
    (0, -1, 0),
    (0, 1, 0),
    (0, 0, -1),
    (0, 0, 1),
    (-1, 0, 0),
    (1, 0, 0),
    (1, 0, 1),
    (-1, 0, -1),
    (1, 1, -1),
    (-1, -1, 1),
    (1, 1, 0),
    (-1, -1, 0),
];

/// A graph with boundary faces: paths enter through a start face and leave through its target.
struct Crossing {
    adj: Vec<Vec<usize>>,
    /// Per face: (dots that can enter from it, whether each dot can leave through the opposite face).
    faces: Vec<(Vec<usize>, Vec<bool>)>,
}

impl Crossing {
    fn count(&self, m: u32) -> Vec<u64> {
        fn walk(adj: &[Vec<usize>], exit: &[bool], at: usize, prev: usize, left: u32) -> u64 {
            if left == 0 {
                return exit[at] as u64;
            }
            adj[at].iter().filter(|&&n| n != prev).map(|&n| walk(adj, exit, n, at, left - 1)).sum()
        }
        self.faces
            .iter()
            .map(|(starts, exit)| {
                if m < 2 {
                    return 0;
                }
                starts.iter().map(|&s| walk(&self.adj, exit, s, usize::MAX, m - 2)).sum()
            })
            .collect()
    }
}

/// Non-backtracking crossing paths of exactly `m` lines in the synthetic `n^3`
/// volume where every dot links to the [`BULK_TEMPLATE`] neighbours that exist.
///
/// Paths start on the faces `t = 0`, `row = 0` and `col = 0` and end on the
/// opposite face. The boundary line at each end counts as one line.
pub fn enumerate_volume_paths(n: u32, m: u32) -> Result<PathEnumeration> {
    if n == 0 || m == 0 {
        return Err(Error::InvalidArgument { name: "n, m", reason: "must be at least 1" });
    }
    if n > MAX_PATH_N {
        return Err(Error::LimitExceeded { what: "volume side", limit: MAX_PATH_N as u64, got: n as u64 });
    }
    if m > MAX_PATH_M {
        return Err(Error::LimitExceeded { what: "path length", limit: MAX_PATH_M as u64, got: m as u64 });
    }
    let n = n as i32;
    let id = |t: i32, r: i32, c: i32| ((t * n + r) * n + c) as usize;
    let total = (n * n * n) as usize;
    let mut adj = vec![Vec::new(); total];
    for t in 0..n {
        for r in 0..n {
            for c in 0..n {
                for (dt, dr, dc) in BULK_TEMPLATE {
                    let (a, b, e) = (t + dt, r + dr, c + dc);
                    if (0..n).contains(&a) && (0..n).contains(&b) && (0..n).contains(&e) {
                        adj[id(t, r, c)].push(id(a, b, e));
                    }
                }
            }
        }
    }
    let coord = |i: usize| {
        let i = i as i32;
        [i / (n * n), (i / n) % n, i % n]
    };
    let faces = (0..3)
        .map(|axis| {
            let starts = (0..total).filter(|&i| coord(i)[axis] == 0).collect();
            let exit = (0..total).map(|i| coord(i)[axis] == n - 1).collect();
            (starts, exit)
        })
        .collect();
    let per_face = Crossing { adj, faces }.count(m);
    Ok(PathEnumeration { n: n as u32, m, count: per_face.iter().sum(), per_face })
}

/// Largest lattice [`enumerate_lattice_paths`] accepts, in dots.
pub const MAX_PATH_DOTS: usize = 512;

/// Non-backtracking paths of exactly `m` lines across a real lattice, from the
/// boundary on `from` to the opposite one, boundary lines included.
///
/// `n` in the result is the smallest cube side holding the lattice.
pub fn enumerate_lattice_paths(lattice: &Lattice, from: Side, m: u32) -> Result<PathEnumeration> {
    if m == 0 {
        return Err(Error::InvalidArgument { name: "m", reason: "must be at least 1" });
    }
    if m > MAX_PATH_M {
        return Err(Error::LimitExceeded { what: "path length", limit: MAX_PATH_M as u64, got: m as u64 });
    }
    if lattice.num_dots() > MAX_PATH_DOTS {
        return Err(Error::LimitExceeded { what: "dots", limit: MAX_PATH_DOTS as u64, got: lattice.num_dots() as u64 });
    }
    let touches = |d: usize, side: Side| {
        lattice.boundary_lines(d).iter().any(|l| matches!(lattice.lines()[*l].ends, LineEnds::Boundary(_, s) if s == side))
    };
    let dots = lattice.num_dots();
    let adj: Vec<Vec<usize>> = (0..dots).map(|d| lattice.neighbors(d).iter().map(|x| x.0).collect()).collect();
    let starts = (0..dots).filter(|d| touches(*d, from)).collect();
    let exit = (0..dots).map(|d| touches(d, from.opposite())).collect();
    let per_face = Crossing { adj, faces: vec![(starts, exit)] }.count(m);
    Ok(PathEnumeration { n: lattice_extent(lattice), m, count: per_face[0], per_face })
}

/// Largest of the lattice's extents in time, rows and columns of stabilizers.
pub fn lattice_extent(lattice: &Lattice) -> u32 {
    let span = |f: &dyn Fn(&crate::lattice::Dot) -> i64| {
        let lo = lattice.dots().iter().map(f).min().unwrap_or(0);
        let hi = lattice.dots().iter().map(f).max().unwrap_or(0);
        hi - lo
    };
    let t = span(&|d| d.layer as i64) + 1;
    let r = span(&|d| d.coord.row as i64) / 2 + 1;
    let c = span(&|d| d.coord.col as i64) / 2 + 1;
    t.max(r).max(c) as u32
}

/// Failures among fault combinations of one weight.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct WeightCensus {
    pub weight: u32,
    pub combinations: u64,
    pub failures: u64,
}

/// Default cap on the number of combinations an exhaustive sweep will run.
pub const DEFAULT_SWEEP_CAP: u64 = 20_000_000;

/// Number of fault sets with exactly `w` faulty gates.
pub fn combination_count(circuit: &MemoryCircuit, w: u32) -> u128 {
    // Elementary symmetric polynomial of the per-gate kind counts.
    let mut e = vec![0u128; w as usize + 1];
    e[0] = 1;
    for (_, _, g) in circuit.iter_gates() {
        let k = FaultKind::count_for(g.kind()) as u128;
        for j in (1..e.len()).rev() {
            e[j] = e[j].saturating_add(e[j - 1].saturating_mul(k));
        }
    }
    e[w as usize]
}

/// Runs every fault set of weight `1..=max_weight` (at most one fault per gate)
/// through simulation, decoding and the logical check.
///
/// Errors if the total number of combinations exceeds `cap`.
pub fn exhaustive_fault_sweep(circuit: &MemoryCircuit, max_weight: u32, cap: u64) -> Result<Vec<WeightCensus>> {
    let total: u128 = (1..=max_weight).map(|w| combination_count(circuit, w)).sum();
    if total > cap as u128 {
        return Err(Error::LimitExceeded { what: "fault combinations", limit: cap, got: total.min(u64::MAX as u128) as u64 });
    }
    let shot = ShotDecoder::new(circuit.clone())?;
    let singles: Vec<Vec<FaultLocation>> = circuit
        .iter_gates()
        .map(|(layer, gate, g)| FaultKind::kinds_for(g.kind()).into_iter().map(|k| FaultLocation::new(layer, gate, k)).collect())
        .collect();

    fn go(
        shot: &ShotDecoder,
        singles: &[Vec<FaultLocation>],
        from: usize,
        left: u32,
        chosen: &mut Vec<FaultLocation>,
        census: &mut WeightCensus,
    ) -> Result<()> {
        if left == 0 {
            census.combinations += 1;
            census.failures += shot.fails(&FaultSet::from_sorted(chosen.clone()))? as u64;
            return Ok(());
        }
        for g in from..singles.len() {
            for f in &singles[g] {
                chosen.push(*f);
                go(shot, singles, g + 1, left - 1, chosen, census)?;
                chosen.pop();
            }
        }
        Ok(())
    }

    let mut out = Vec::new();
    for w in 1..=max_weight {
        let mut census = WeightCensus { weight: w, combinations: 0, failures: 0 };
        go(&shot, &singles, 0, w, &mut Vec::new(), &mut census)?;
        out.push(census);
    }
    Ok(out)
}

/// Like [`exhaustive_fault_sweep`] for one weight, over `samples` uniformly
/// drawn fault sets instead of all of them.
pub fn sampled_fault_sweep(circuit: &MemoryCircuit, weight: u32, samples: u64, seed: u64) -> Result<WeightCensus> {
    use rand::Rng;
    let shot = ShotDecoder::new(circuit.clone())?;
    let gates: Vec<(u32, u32, Vec<FaultKind>)> =
        circuit.iter_gates().map(|(l, g, gate)| (l, g, FaultKind::kinds_for(gate.kind()))).collect();
    if (weight as usize) > gates.len() {
        return Err(Error::InvalidArgument { name: "weight", reason: "more faults than gates" });
    }
    let mut census = WeightCensus { weight, combinations: 0, failures: 0 };
    for s in 0..samples {
        let mut rng = FaultSampler::rng(seed, s);
        let mut picked: Vec<usize> = Vec::with_capacity(weight as usize);
        while picked.len() < weight as usize {
            let g = rng.random_range(0..gates.len());
            if !picked.contains(&g) {
                picked.push(g);
            }
        }
        picked.sort_unstable();
        let faults: Vec<FaultLocation> = picked
            .iter()
            .map(|&g| {
                let (l, i, kinds) = &gates[g];
                FaultLocation::new(*l, *i, kinds[rng.random_range(0..kinds.len())])
            })
            .collect();
        census.combinations += 1;
        census.failures += shot.fails(&FaultSet::from_sorted(faults))? as u64;
    }
    Ok(census)
}

/// Sorted neighbour offsets `(t, row, col)` of the first degree-12 dot of a lattice.
pub fn bulk_template_of(lattice: &Lattice) -> Option<Vec<(i32, i32, i32)>> {
    let dot = (0..lattice.num_dots()).find(|d| lattice.degree(*d) == 12)?;
    let a = lattice.dots()[dot];
    let mut offs: Vec<(i32, i32, i32)> = lattice
        .neighbors(dot)
        .iter()
        .map(|(n, _)| {
            let b = lattice.dots()[*n];
            (b.layer as i32 - a.layer as i32, (b.coord.row - a.coord.row) / 2, (b.coord.col - a.coord.col) / 2)
        })
        .collect();
    offs.sort_unstable();
    Some(offs)
}
