//! Maximum-weight matching on general graphs with Edmonds' blossom algorithm,
//! in the primal-dual form of Galil, O(n^3).
//!
//! Weights are integers. They are doubled internally so every dual stays integral.

use alloc::vec;
use alloc::vec::Vec;

use crate::{Error, Result};

const NONE: usize = usize::MAX;

/// Finds a maximum-weight matching of the graph with `num_vertices` vertices and
/// undirected `edges` `(u, v, weight)`. With `max_cardinality` the matching is
/// the heaviest among those of maximum size.
///
/// Returns the mate of every vertex.
pub fn max_weight_matching(num_vertices: usize, edges: &[(usize, usize, i64)], max_cardinality: bool) -> Result<Vec<Option<usize>>> {
    for &(u, v, _) in edges {
        if u >= num_vertices || v >= num_vertices {
            return Err(Error::InvalidQubit { qubit: u.max(v), len: num_vertices });
        }
        if u == v {
            return Err(Error::SameQubit(u));
        }
    }
    if edges.is_empty() {
        return Ok(vec![None; num_vertices]);
    }
    let mut m = Matcher::new(num_vertices, edges, max_cardinality);
    m.solve()?;
    Ok((0..num_vertices).map(|v| (m.mate[v] != NONE).then(|| m.endpoint[m.mate[v]])).collect())
}

/// Minimum-weight perfect matching. Errors if the graph has none.
///
/// Returns the mate of every vertex.
pub fn min_weight_perfect_matching(num_vertices: usize, edges: &[(usize, usize, i64)]) -> Result<Vec<usize>> {
    if num_vertices == 0 {
        return Ok(Vec::new());
    }
    let top = edges.iter().map(|e| e.2).max().unwrap_or(0);
    let flipped: Vec<(usize, usize, i64)> = edges.iter().map(|&(u, v, w)| (u, v, top - w + 1)).collect();
    let mates = max_weight_matching(num_vertices, &flipped, true)?;
    mates
        .into_iter()
        .collect::<Option<Vec<usize>>>()
        .ok_or(Error::InvalidArgument { name: "edges", reason: "graph has no perfect matching" })
}

struct Matcher {
    nvertex: usize,
    edges: Vec<(usize, usize, i64)>,
    max_cardinality: bool,
    endpoint: Vec<usize>,
    neighbend: Vec<Vec<usize>>,
    mate: Vec<usize>,
    label: Vec<u8>,
    labelend: Vec<usize>,
    inblossom: Vec<usize>,
    blossomparent: Vec<usize>,
    blossomchilds: Vec<Vec<usize>>,
    blossombase: Vec<usize>,
    blossomendps: Vec<Vec<usize>>,
    bestedge: Vec<usize>,
    blossombestedges: Vec<Option<Vec<usize>>>,
    unusedblossoms: Vec<usize>,
    dualvar: Vec<i64>,
    allowedge: Vec<bool>,
    queue: Vec<usize>,
}

impl Matcher {
    fn new(nvertex: usize, edges: &[(usize, usize, i64)], max_cardinality: bool) -> Self {
        let edges: Vec<(usize, usize, i64)> = edges.iter().map(|&(u, v, w)| (u, v, 2 * w)).collect();
        let nedge = edges.len();
        let maxweight = edges.iter().map(|e| e.2).max().unwrap_or(0).max(0);
        let endpoint = (0..2 * nedge).map(|p| if p % 2 == 0 { edges[p / 2].0 } else { edges[p / 2].1 }).collect();
        let mut neighbend = vec![Vec::new(); nvertex];
        for (k, &(i, j, _)) in edges.iter().enumerate() {
            neighbend[i].push(2 * k + 1);
            neighbend[j].push(2 * k);
        }
        let mut dualvar = vec![maxweight; nvertex];
        dualvar.extend(core::iter::repeat_n(0, nvertex));
        Self {
            nvertex,
            max_cardinality,
            endpoint,
            neighbend,
            mate: vec![NONE; nvertex],
            label: vec![0; 2 * nvertex],
            labelend: vec![NONE; 2 * nvertex],
            inblossom: (0..nvertex).collect(),
            blossomparent: vec![NONE; 2 * nvertex],
            blossomchilds: vec![Vec::new(); 2 * nvertex],
            blossombase: (0..nvertex).chain(core::iter::repeat_n(NONE, nvertex)).collect(),
            blossomendps: vec![Vec::new(); 2 * nvertex],
            bestedge: vec![NONE; 2 * nvertex],
            blossombestedges: vec![None; 2 * nvertex],
            unusedblossoms: (nvertex..2 * nvertex).collect(),
            dualvar,
            allowedge: vec![false; nedge],
            queue: Vec::new(),
            edges,
        }
    }

    fn slack(&self, k: usize) -> i64 {
        let (i, j, w) = self.edges[k];
        self.dualvar[i] + self.dualvar[j] - 2 * w
    }

    fn leaves(&self, b: usize, out: &mut Vec<usize>) {
        if b < self.nvertex {
            out.push(b);
        } else {
            for &t in &self.blossomchilds[b] {
                self.leaves(t, out);
            }
        }
    }

    fn leaves_of(&self, b: usize) -> Vec<usize> {
        let mut out = Vec::new();
        self.leaves(b, &mut out);
        out
    }

    fn assign_label(&mut self, w: usize, t: u8, p: usize) {
        let b = self.inblossom[w];
        self.label[w] = t;
        self.label[b] = t;
        self.labelend[w] = p;
        self.labelend[b] = p;
        self.bestedge[w] = NONE;
        self.bestedge[b] = NONE;
        if t == 1 {
            let leaves = self.leaves_of(b);
            self.queue.extend(leaves);
        } else if t == 2 {
            let base = self.blossombase[b];
            let mb = self.mate[base];
            self.assign_label(self.endpoint[mb], 1, mb ^ 1);
        }
    }

    /// Traces back from `v` and `w` to find a new blossom's base, or NONE for an augmenting path.
    fn scan_blossom(&mut self, mut v: usize, mut w: usize) -> usize {
        let mut path = Vec::new();
        let mut base = NONE;
        while v != NONE || w != NONE {
            let mut b = self.inblossom[v];
            if self.label[b] & 4 != 0 {
                base = self.blossombase[b];
                break;
            }
            path.push(b);
            self.label[b] = 5;
            if self.labelend[b] == NONE {
                v = NONE;
            } else {
                v = self.endpoint[self.labelend[b]];
                b = self.inblossom[v];
                v = self.endpoint[self.labelend[b]];
            }
            if w != NONE {
                core::mem::swap(&mut v, &mut w);
            }
        }
        for b in path {
            self.label[b] = 1;
        }
        base
    }

    fn add_blossom(&mut self, base: usize, k: usize) {
        let (mut v, mut w, _) = self.edges[k];
        let bb = self.inblossom[base];
        let mut bv = self.inblossom[v];
        let mut bw = self.inblossom[w];
        let b = self.unusedblossoms.pop().expect("blossom slots exhausted");
        self.blossombase[b] = base;
        self.blossomparent[b] = NONE;
        self.blossomparent[bb] = b;
        let mut path = Vec::new();
        let mut endps = Vec::new();
        while bv != bb {
            self.blossomparent[bv] = b;
            path.push(bv);
            endps.push(self.labelend[bv]);
            v = self.endpoint[self.labelend[bv]];
            bv = self.inblossom[v];
        }
        path.push(bb);
        path.reverse();
        endps.reverse();
        endps.push(2 * k);
        while bw != bb {
            self.blossomparent[bw] = b;
            path.push(bw);
            endps.push(self.labelend[bw] ^ 1);
            w = self.endpoint[self.labelend[bw]];
            bw = self.inblossom[w];
        }
        self.label[b] = 1;
        self.labelend[b] = self.labelend[bb];
        self.dualvar[b] = 0;
        self.blossomchilds[b] = path.clone();
        self.blossomendps[b] = endps;
        for v in self.leaves_of(b) {
            if self.label[self.inblossom[v]] == 2 {
                self.queue.push(v);
            }
            self.inblossom[v] = b;
        }

        let mut bestedgeto = vec![NONE; 2 * self.nvertex];
        for &bv in &path {
            let nblists: Vec<Vec<usize>> = match self.blossombestedges[bv].take() {
                Some(list) => vec![list],
                None => self.leaves_of(bv).into_iter().map(|v| self.neighbend[v].iter().map(|p| p / 2).collect()).collect(),
            };
            for nblist in nblists {
                for k in nblist {
                    let (i, j, _) = self.edges[k];
                    let j = if self.inblossom[j] == b { i } else { j };
                    let bj = self.inblossom[j];
                    if bj != b && self.label[bj] == 1 && (bestedgeto[bj] == NONE || self.slack(k) < self.slack(bestedgeto[bj])) {
                        bestedgeto[bj] = k;
                    }
                }
            }
            self.bestedge[bv] = NONE;
        }
        let list: Vec<usize> = bestedgeto.into_iter().filter(|&k| k != NONE).collect();
        let mut best = NONE;
        for &k in &list {
            if best == NONE || self.slack(k) < self.slack(best) {
                best = k;
            }
        }
        self.blossombestedges[b] = Some(list);
        self.bestedge[b] = best;
    }

    fn expand_blossom(&mut self, b: usize, endstage: bool) {
        let childs = self.blossomchilds[b].clone();
        for &s in &childs {
            self.blossomparent[s] = NONE;
            if s < self.nvertex {
                self.inblossom[s] = s;
            } else if endstage && self.dualvar[s] == 0 {
                self.expand_blossom(s, endstage);
            } else {
                for v in self.leaves_of(s) {
                    self.inblossom[v] = s;
                }
            }
        }
        if !endstage && self.label[b] == 2 {
            let len = childs.len() as isize;
            let at = |j: isize| ((j % len + len) % len) as usize;
            let entrychild = self.inblossom[self.endpoint[self.labelend[b] ^ 1]];
            let mut j = childs.iter().position(|&c| c == entrychild).unwrap() as isize;
            let (jstep, endptrick): (isize, usize) = if j & 1 != 0 {
                j -= len;
                (1, 0)
            } else {
                (-1, 1)
            };
            let endps = self.blossomendps[b].clone();
            let mut p = self.labelend[b];
            while j != 0 {
                self.label[self.endpoint[p ^ 1]] = 0;
                self.label[self.endpoint[endps[at(j - endptrick as isize)] ^ endptrick ^ 1]] = 0;
                self.assign_label(self.endpoint[p ^ 1], 2, p);
                self.allowedge[endps[at(j - endptrick as isize)] / 2] = true;
                j += jstep;
                p = endps[at(j - endptrick as isize)] ^ endptrick;
                self.allowedge[p / 2] = true;
                j += jstep;
            }
            let bv = childs[at(j)];
            self.label[self.endpoint[p ^ 1]] = 2;
            self.label[bv] = 2;
            self.labelend[self.endpoint[p ^ 1]] = p;
            self.labelend[bv] = p;
            self.bestedge[bv] = NONE;
            j += jstep;
            while childs[at(j)] != entrychild {
                let bv = childs[at(j)];
                if self.label[bv] == 1 {
                    j += jstep;
                    continue;
                }
                let leaves = self.leaves_of(bv);
                if let Some(&v) = leaves.iter().find(|&&v| self.label[v] != 0) {
                    self.label[v] = 0;
                    self.label[self.endpoint[self.mate[self.blossombase[bv]]]] = 0;
                    self.assign_label(v, 2, self.labelend[v]);
                }
                j += jstep;
            }
        }
        self.label[b] = 0xff;
        self.labelend[b] = NONE;
        self.blossomchilds[b] = Vec::new();
        self.blossomendps[b] = Vec::new();
        self.blossombase[b] = NONE;
        self.blossombestedges[b] = None;
        self.bestedge[b] = NONE;
        self.unusedblossoms.push(b);
    }

    /// Swaps matched and unmatched edges along the even path inside `b` from `v` to its base.
    fn augment_blossom(&mut self, b: usize, v: usize) {
        let mut t = v;
        while self.blossomparent[t] != b {
            t = self.blossomparent[t];
        }
        if t >= self.nvertex {
            self.augment_blossom(t, v);
        }
        let len = self.blossomchilds[b].len() as isize;
        let at = |j: isize| ((j % len + len) % len) as usize;
        let i = self.blossomchilds[b].iter().position(|&c| c == t).unwrap();
        let mut j = i as isize;
        let (jstep, endptrick): (isize, usize) = if i & 1 != 0 {
            j -= len;
            (1, 0)
        } else {
            (-1, 1)
        };
        while j != 0 {
            j += jstep;
            let t = self.blossomchilds[b][at(j)];
            let p = self.blossomendps[b][at(j - endptrick as isize)] ^ endptrick;
            if t >= self.nvertex {
                self.augment_blossom(t, self.endpoint[p]);
            }
            j += jstep;
            let t = self.blossomchilds[b][at(j)];
            if t >= self.nvertex {
                self.augment_blossom(t, self.endpoint[p ^ 1]);
            }
            self.mate[self.endpoint[p]] = p ^ 1;
            self.mate[self.endpoint[p ^ 1]] = p;
        }
        self.blossomchilds[b].rotate_left(i);
        self.blossomendps[b].rotate_left(i);
        self.blossombase[b] = self.blossombase[self.blossomchilds[b][0]];
    }

    fn augment_matching(&mut self, k: usize) {
        let (v, w, _) = self.edges[k];
        for (mut s, mut p) in [(v, 2 * k + 1), (w, 2 * k)] {
            loop {
                let bs = self.inblossom[s];
                if bs >= self.nvertex {
                    self.augment_blossom(bs, s);
                }
                self.mate[s] = p;
                if self.labelend[bs] == NONE {
                    break;
                }
                let t = self.endpoint[self.labelend[bs]];
                let bt = self.inblossom[t];
                s = self.endpoint[self.labelend[bt]];
                let j = self.endpoint[self.labelend[bt] ^ 1];
                if bt >= self.nvertex {
                    self.augment_blossom(bt, j);
                }
                self.mate[j] = self.labelend[bt];
                p = self.labelend[bt] ^ 1;
            }
        }
    }

    fn solve(&mut self) -> Result<()> {
        let n = self.nvertex;
        for _ in 0..n {
            self.label.iter_mut().for_each(|l| *l = 0);
            self.bestedge.iter_mut().for_each(|e| *e = NONE);
            self.blossombestedges[n..].iter_mut().for_each(|e| *e = None);
            self.allowedge.iter_mut().for_each(|a| *a = false);
            self.queue.clear();
            for v in 0..n {
                if self.mate[v] == NONE && self.label[self.inblossom[v]] == 0 {
                    self.assign_label(v, 1, NONE);
                }
            }
            let mut augmented = false;
            loop {
                while !augmented {
                    let Some(v) = self.queue.pop() else { break };
                    for idx in 0..self.neighbend[v].len() {
                        let p = self.neighbend[v][idx];
                        let k = p / 2;
                        let w = self.endpoint[p];
                        if self.inblossom[v] == self.inblossom[w] {
                            continue;
                        }
                        let mut kslack = 0;
                        if !self.allowedge[k] {
                            kslack = self.slack(k);
                            if kslack <= 0 {
                                self.allowedge[k] = true;
                            }
                        }
                        if self.allowedge[k] {
                            if self.label[self.inblossom[w]] == 0 {
                                self.assign_label(w, 2, p ^ 1);
                            } else if self.label[self.inblossom[w]] == 1 {
                                let base = self.scan_blossom(v, w);
                                if base != NONE {
                                    self.add_blossom(base, k);
                                } else {
                                    self.augment_matching(k);
                                    augmented = true;
                                    break;
                                }
                            } else if self.label[w] == 0 {
                                self.label[w] = 2;
                                self.labelend[w] = p ^ 1;
                            }
                        } else if self.label[self.inblossom[w]] == 1 {
                            let b = self.inblossom[v];
                            if self.bestedge[b] == NONE || kslack < self.slack(self.bestedge[b]) {
                                self.bestedge[b] = k;
                            }
                        } else if self.label[w] == 0 && (self.bestedge[w] == NONE || kslack < self.slack(self.bestedge[w])) {
                            self.bestedge[w] = k;
                        }
                    }
                }
                if augmented {
                    break;
                }

                // No augmenting path with tight edges; adjust the duals.
                let mut deltatype = 0u8;
                let mut delta = 0i64;
                let mut deltaedge = NONE;
                let mut deltablossom = NONE;
                if !self.max_cardinality {
                    deltatype = 1;
                    delta = *self.dualvar[..n].iter().min().unwrap();
                }
                for v in 0..n {
                    if self.label[self.inblossom[v]] == 0 && self.bestedge[v] != NONE {
                        let d = self.slack(self.bestedge[v]);
                        if deltatype == 0 || d < delta {
                            delta = d;
                            deltatype = 2;
                            deltaedge = self.bestedge[v];
                        }
                    }
                }
                for b in 0..2 * n {
                    if self.blossomparent[b] == NONE && self.label[b] == 1 && self.bestedge[b] != NONE {
                        let kslack = self.slack(self.bestedge[b]);
                        if kslack % 2 != 0 {
                            return Err(Error::Internal("odd slack between outer blossoms"));
                        }
                        let d = kslack / 2;
                        if deltatype == 0 || d < delta {
                            delta = d;
                            deltatype = 3;
                            deltaedge = self.bestedge[b];
                        }
                    }
                }
                for b in n..2 * n {
                    if self.blossombase[b] != NONE
                        && self.blossomparent[b] == NONE
                        && self.label[b] == 2
                        && (deltatype == 0 || self.dualvar[b] < delta)
                    {
                        delta = self.dualvar[b];
                        deltatype = 4;
                        deltablossom = b;
                    }
                }
                if deltatype == 0 {
                    // Maximum cardinality reached; one last dual update for optimality.
                    deltatype = 1;
                    delta = (*self.dualvar[..n].iter().min().unwrap()).max(0);
                }

                for v in 0..n {
                    match self.label[self.inblossom[v]] {
                        1 => self.dualvar[v] -= delta,
                        2 => self.dualvar[v] += delta,
                        _ => {}
                    }
                }
                for b in n..2 * n {
                    if self.blossombase[b] != NONE && self.blossomparent[b] == NONE {
                        match self.label[b] {
                            1 => self.dualvar[b] += delta,
                            2 => self.dualvar[b] -= delta,
                            _ => {}
                        }
                    }
                }

                match deltatype {
                    1 => break,
                    2 => {
                        self.allowedge[deltaedge] = true;
                        let (mut i, j, _) = self.edges[deltaedge];
                        if self.label[self.inblossom[i]] == 0 {
                            i = j;
                        }
                        self.queue.push(i);
                    }
                    3 => {
                        self.allowedge[deltaedge] = true;
                        let (i, _, _) = self.edges[deltaedge];
                        self.queue.push(i);
                    }
                    _ => self.expand_blossom(deltablossom, false),
                }
            }
            if !augmented {
                break;
            }
            for b in n..2 * n {
                if self.blossomparent[b] == NONE && self.blossombase[b] != NONE && self.label[b] == 1 && self.dualvar[b] == 0 {
                    self.expand_blossom(b, true);
                }
            }
        }
        Ok(())
    }
}

/// Total weight of the matched edges, taking the heaviest edge where parallel edges exist.
pub fn matching_weight(edges: &[(usize, usize, i64)], mates: &[Option<usize>]) -> i64 {
    let mut total = 0;
    for (u, m) in mates.iter().enumerate() {
        if let Some(v) = *m {
            if u < v {
                total += edges.iter().filter(|e| (e.0 == u && e.1 == v) || (e.0 == v && e.1 == u)).map(|e| e.2).max().unwrap_or(0);
            }
        }
    }
    total
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn mw(n: usize, e: &[(usize, usize, i64)], card: bool) -> Vec<Option<usize>> {
        max_weight_matching(n, e, card).unwrap()
    }

    /// Every matched edge exists and the mate relation is symmetric.
    fn consistent(n: usize, e: &[(usize, usize, i64)], m: &[Option<usize>]) -> bool {
        (0..n).all(|u| match m[u] {
            None => true,
            Some(v) => m[v] == Some(u) && e.iter().any(|x| (x.0 == u && x.1 == v) || (x.0 == v && x.1 == u)),
        })
    }

    /// Exhaustive optimum over all matchings: (max weight, max (cardinality, weight)).
    fn exhaustive(n: usize, e: &[(usize, usize, i64)]) -> (i64, (usize, i64)) {
        fn go(k: usize, e: &[(usize, usize, i64)], used: &mut Vec<bool>, card: usize, w: i64, best: &mut (i64, (usize, i64))) {
            if k == e.len() {
                best.0 = best.0.max(w);
                best.1 = best.1.max((card, w));
                return;
            }
            go(k + 1, e, used, card, w, best);
            let (u, v, x) = e[k];
            if !used[u] && !used[v] {
                used[u] = true;
                used[v] = true;
                go(k + 1, e, used, card + 1, w + x, best);
                used[u] = false;
                used[v] = false;
            }
        }
        let mut best = (0, (0, 0));
        go(0, e, &mut vec![false; n], 0, 0, &mut best);
        best
    }

    #[test]
    fn trivial_cases() {
        assert_eq!(mw(0, &[], false), Vec::<Option<usize>>::new());
        assert_eq!(mw(2, &[(0, 1, 1)], false), [Some(1), Some(0)]);
        assert_eq!(mw(3, &[(1, 2, 10), (2, 0, 11)], false), [Some(2), None, Some(0)]);
        assert_eq!(mw(4, &[(1, 2, 5), (2, 3, 11), (3, 0, 5)], false), [None, None, Some(3), Some(2)]);
    }

    #[test]
    fn max_cardinality_changes_choice() {
        let e = [(0, 1, 2), (0, 2, -2), (1, 2, 1), (1, 3, -1), (2, 3, -6)];
        assert_eq!(mw(4, &e, false), [Some(1), Some(0), None, None]);
        assert_eq!(mw(4, &e, true), [Some(2), Some(3), Some(0), Some(1)]);
    }

    #[test]
    fn blossom_cases() {
        // S-blossom used for augmentation.
        let e = [(0, 1, 8), (0, 2, 9), (1, 2, 10), (2, 3, 7)];
        assert_eq!(mw(4, &e, false), [Some(1), Some(0), Some(3), Some(2)]);
        // Nested S-blossom.
        let e = [(0, 1, 9), (0, 2, 9), (1, 2, 10), (1, 3, 8), (2, 4, 8), (3, 4, 10), (4, 5, 6)];
        assert_eq!(mw(6, &e, false), [Some(2), Some(3), Some(0), Some(1), Some(5), Some(4)]);
        // Larger instances with nested blossoms that need expanding, checked by weight.
        let cases: [&[(usize, usize, i64)]; 3] = [
            &[
                (0, 1, 45),
                (0, 6, 45),
                (1, 2, 50),
                (2, 3, 45),
                (3, 4, 95),
                (3, 5, 94),
                (4, 5, 94),
                (5, 6, 50),
                (0, 7, 30),
                (2, 10, 35),
                (4, 8, 36),
                (6, 9, 26),
                (10, 11, 5),
            ],
            &[(0, 1, 23), (0, 4, 22), (0, 5, 15), (1, 2, 25), (2, 3, 22), (3, 4, 25), (3, 7, 14), (4, 6, 13)],
            &[(0, 1, 19), (0, 2, 20), (0, 7, 8), (1, 2, 25), (1, 3, 18), (2, 4, 18), (3, 4, 13), (3, 6, 7), (4, 5, 7)],
        ];
        for e in cases {
            let n = e.iter().map(|x| x.0.max(x.1)).max().unwrap() + 1;
            let (best, best_card) = exhaustive(n, e);
            let m = mw(n, e, false);
            assert!(consistent(n, e, &m));
            assert_eq!(matching_weight(e, &m), best);
            let m = mw(n, e, true);
            assert_eq!((m.iter().flatten().count() / 2, matching_weight(e, &m)), best_card);
        }
    }

    #[test]
    fn min_weight_perfect() {
        // Unit square: opposite sides pair up.
        let e = [(0, 1, 1), (1, 2, 1), (2, 3, 1), (3, 0, 1), (0, 2, 5), (1, 3, 5)];
        let m = min_weight_perfect_matching(4, &e).unwrap();
        let total: i64 =
            (0..4).filter(|&u| u < m[u]).map(|u| e.iter().find(|x| (x.0, x.1) == (u, m[u]) || (x.1, x.0) == (u, m[u])).unwrap().2).sum();
        assert_eq!(total, 2);
        // Zero-weight edges are fine.
        let m = min_weight_perfect_matching(4, &[(0, 1, 3), (2, 3, 0), (0, 2, 1), (1, 3, 1)]).unwrap();
        assert_eq!(m, [2, 3, 0, 1]);
        assert!(min_weight_perfect_matching(3, &[(0, 1, 1), (1, 2, 1)]).is_err());
    }

    #[test]
    fn rejects_bad_edges() {
        assert!(max_weight_matching(2, &[(0, 2, 1)], false).is_err());
        assert!(max_weight_matching(2, &[(1, 1, 1)], false).is_err());
    }

    fn graph() -> impl Strategy<Value = (usize, Vec<(usize, usize, i64)>)> {
        (2usize..9).prop_flat_map(|n| {
            let pairs: Vec<(usize, usize)> = (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))).collect();
            let m = pairs.len();
            (Just(n), proptest::collection::vec((any::<bool>(), -3i64..20), m)).prop_map(move |(n, pick)| {
                let e = pairs.iter().zip(pick).filter(|(_, (keep, _))| *keep).map(|(&(u, v), (_, w))| (u, v, w)).collect();
                (n, e)
            })
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(600))]
        #[test]
        fn agrees_with_exhaustive((n, e) in graph()) {
            let (best, best_card) = exhaustive(n, &e);
            let m = mw(n, &e, false);
            prop_assert!(consistent(n, &e, &m));
            prop_assert_eq!(matching_weight(&e, &m), best);
            let m = mw(n, &e, true);
            prop_assert!(consistent(n, &e, &m));
            let card = m.iter().filter(|x| x.is_some()).count() / 2;
            prop_assert_eq!((card, matching_weight(&e, &m)), best_card);
        }
    }
}
