//! Text formats: layout map, lattice export, fault records and detection dumps.
//!
//! All writers produce a stable, byte-identical output for equal inputs.
//! Blank lines and lines starting with `#` are ignored by every parser.

use std::fmt::Write as _;

use surfmatch_core::circuit::MemoryBasis;
use surfmatch_core::lattice::{Dot, Lattice, LatticeHeader, Line, LineEnds};
use surfmatch_core::layout::{Coord, QubitRole, Side};
use surfmatch_core::noise::{Coefficient, FaultKind, FaultLocation};
use surfmatch_core::syndrome::{DetectionEvent, DetectionSet};
use surfmatch_core::{Layout, StabilizerKind};

use crate::error::{CliError, Result};

pub const LATTICE_MAGIC: &str = "surfmatch-lattice 1";
pub const FAULTS_MAGIC: &str = "surfmatch-faults 1";

pub fn side_name(side: Side) -> &'static str {
    match side {
        Side::North => "north",
        Side::West => "west",
        Side::East => "east",
        Side::South => "south",
    }
}

pub fn parse_side(s: &str) -> Option<Side> {
    Side::ALL.into_iter().find(|side| side_name(*side) == s)
}

pub fn parse_kind(s: &str) -> Option<StabilizerKind> {
    match s {
        "Z" | "z" => Some(StabilizerKind::Z),
        "X" | "x" => Some(StabilizerKind::X),
        _ => None,
    }
}

/// Renders the qubit grid, north at the top.
///
/// `.` data qubit, `Z`/`X` ancilla of that kind. Data qubits on logical Z
/// (row 0) are drawn `z`, on logical X (column 0) `x`, on both `*`.
pub fn layout_map(layout: &Layout) -> String {
    let n = layout.grid_size();
    let mut out = String::new();
    let _ = writeln!(out, "# layout d={} grid={n}x{n} qubits={} data={}", layout.distance(), layout.num_qubits(), layout.num_data());
    out.push_str("# . data, Z/X ancilla, z on logical Z, x on logical X, * on both\n");
    out.push_str("# north is the top row, west the left column\n");
    for row in 0..n {
        let cells: Vec<String> = (0..n)
            .map(|col| {
                let q = match layout.qubit_at(Coord::new(row, col)) {
                    Some(q) => q,
                    None => return " ".to_string(),
                };
                let c = match layout.role(q) {
                    QubitRole::Ancilla(k) => k.as_char(),
                    QubitRole::Data => match (layout.logical_z().contains(&q), layout.logical_x().contains(&q)) {
                        (true, true) => '*',
                        (true, false) => 'z',
                        (false, true) => 'x',
                        (false, false) => '.',
                    },
                };
                c.to_string()
            })
            .collect();
        out.push_str(cells.join(" ").trim_end());
        out.push('\n');
    }
    out
}

fn coefficient_from_str(s: &str) -> Option<Coefficient> {
    let (n, d) = match s.split_once('/') {
        Some((n, d)) => (n.parse::<u32>().ok()?, d.parse::<u32>().ok()?),
        None => (s.parse::<u32>().ok()?, 1),
    };
    if d == 0 || 15 % d != 0 {
        return None;
    }
    Some(Coefficient::from_fifteenths(n.checked_mul(15 / d)?))
}

fn fault_token(f: &FaultLocation) -> String {
    format!("{}:{}:{}", f.layer, f.gate, f.kind)
}

fn parse_fault_token(s: &str) -> Option<FaultLocation> {
    let mut it = s.splitn(3, ':');
    let layer = it.next()?.parse().ok()?;
    let gate = it.next()?.parse().ok()?;
    let kind = FaultKind::parse(it.next()?)?;
    Some(FaultLocation::new(layer, gate, kind))
}

fn list_or_dash<T>(items: &[T], f: impl Fn(&T) -> String) -> String {
    if items.is_empty() {
        "-".to_string()
    } else {
        items.iter().map(f).collect::<Vec<_>>().join(",")
    }
}

/// Serializes a lattice. The output parses back to an identical lattice with [`parse_lattice`].
pub fn export_lattice(lattice: &Lattice) -> String {
    let h = lattice.header();
    let mut out = String::new();
    out.push_str(LATTICE_MAGIC);
    out.push('\n');
    let _ = writeln!(out, "distance {}", h.distance);
    let _ = writeln!(out, "rounds {}", h.rounds);
    let _ = writeln!(out, "basis {}", h.basis);
    let _ = writeln!(out, "kind {}", h.kind);
    out.push_str(
        "# dot: id layer row col stabilizer\n\
         #   layer is the detection layer; row and col locate the ancilla on the (2d-1)x(2d-1) grid, row 0 north\n\
         # line: id dot dot|side eps boundary flips_logical conflicts correction faults\n\
         #   eps: first-order coefficient, the line fails with probability eps*p\n\
         #   boundary lines end on a side; the observable-crossing side is north (Z) or west (X)\n\
         #   correction: data qubits flipped by the first fault; faults: layer:gate:kind in circuit order\n\
         # noise: init and measure flips p; H and idle p/3 per Pauli; CX p/15 per two-qubit Pauli\n\
         # idles: every data qubit untouched in a round timestep idles once; ancillas idle in empty CX slots\n",
    );
    let _ = writeln!(out, "dots {}", lattice.num_dots());
    for (id, d) in lattice.dots().iter().enumerate() {
        let _ = writeln!(out, "dot {id} {} {} {} {}", d.layer, d.coord.row, d.coord.col, d.stabilizer);
    }
    let _ = writeln!(out, "lines {}", lattice.lines().len());
    for (id, l) in lattice.lines().iter().enumerate() {
        let (a, b) = match l.ends {
            LineEnds::Pair(a, b) => (a, b.to_string()),
            LineEnds::Boundary(a, side) => (a, side_name(side).to_string()),
        };
        let _ = writeln!(
            out,
            "line {id} {a} {b} {} {} {} {} {} {}",
            l.coefficient,
            l.ends.is_boundary() as u8,
            l.flips_logical as u8,
            l.conflicts,
            list_or_dash(&l.correction, |q| q.to_string()),
            list_or_dash(&l.faults, fault_token),
        );
    }
    out.push_str("# degree count\n");
    for (deg, count) in lattice.degree_histogram() {
        let _ = writeln!(out, "# {deg} {count}");
    }
    out.push_str("end\n");
    out
}

struct Lines<'a> {
    source: &'a str,
    iter: std::iter::Peekable<std::iter::Enumerate<std::str::Lines<'a>>>,
    line: usize,
}

impl<'a> Lines<'a> {
    fn new(source: &'a str, text: &'a str) -> Self {
        Self { source, iter: text.lines().enumerate().peekable(), line: 0 }
    }

    fn err(&self, msg: impl Into<String>) -> CliError {
        CliError::Parse { path: self.source.to_string(), line: self.line, msg: msg.into() }
    }

    /// Next meaningful line, split on whitespace.
    fn next(&mut self) -> Option<Vec<&'a str>> {
        for (i, l) in self.iter.by_ref() {
            let l = l.trim();
            if l.is_empty() || l.starts_with('#') {
                continue;
            }
            self.line = i + 1;
            return Some(l.split_whitespace().collect());
        }
        None
    }

    fn expect(&mut self) -> Result<Vec<&'a str>> {
        self.next().ok_or_else(|| self.err("unexpected end of input"))
    }

    fn keyed(&mut self, key: &str) -> Result<&'a str> {
        let t = self.expect()?;
        match t.as_slice() {
            [k, v] if *k == key => Ok(v),
            _ => Err(self.err(format!("expected `{key} <value>`"))),
        }
    }

    fn keyed_num<T: std::str::FromStr>(&mut self, key: &str) -> Result<T> {
        let v = self.keyed(key)?;
        self.num(v, key)
    }

    fn num<T: std::str::FromStr>(&self, s: &str, what: &str) -> Result<T> {
        s.parse().map_err(|_| self.err(format!("bad {what} `{s}`")))
    }
}

fn parse_basis(lines: &Lines, s: &str) -> Result<MemoryBasis> {
    MemoryBasis::parse(s).ok_or_else(|| lines.err(format!("bad basis `{s}`")))
}

/// Parses the output of [`export_lattice`]. `source` names the input in errors.
pub fn parse_lattice(source: &str, text: &str) -> Result<Lattice> {
    let mut lines = Lines::new(source, text);
    let magic = lines.expect()?;
    if magic.join(" ") != LATTICE_MAGIC {
        return Err(lines.err(format!("expected `{LATTICE_MAGIC}`")));
    }
    let distance = lines.keyed_num("distance")?;
    let rounds = lines.keyed_num("rounds")?;
    let basis = lines.keyed("basis")?;
    let basis = parse_basis(&lines, basis)?;
    let kind_s = lines.keyed("kind")?;
    let kind = parse_kind(kind_s).ok_or_else(|| lines.err(format!("bad kind `{kind_s}`")))?;
    let header = LatticeHeader { distance, rounds, basis, kind };

    let num_dots: usize = lines.keyed_num("dots")?;
    let mut dots = Vec::with_capacity(num_dots);
    for id in 0..num_dots {
        let t = lines.expect()?;
        if t.len() != 6 || t[0] != "dot" || t[1] != id.to_string() {
            return Err(lines.err(format!("expected `dot {id} layer row col stabilizer`")));
        }
        dots.push(Dot {
            layer: lines.num(t[2], "layer")?,
            coord: Coord::new(lines.num(t[3], "row")?, lines.num(t[4], "col")?),
            stabilizer: lines.num(t[5], "stabilizer")?,
        });
    }

    let num_lines: usize = lines.keyed_num("lines")?;
    let mut out = Vec::with_capacity(num_lines);
    for id in 0..num_lines {
        let t = lines.expect()?;
        if t.len() != 10 || t[0] != "line" || t[1] != id.to_string() {
            return Err(lines.err(format!("expected `line {id}` with 10 fields")));
        }
        let a: usize = lines.num(t[2], "dot")?;
        let boundary = match t[5] {
            "0" => false,
            "1" => true,
            s => return Err(lines.err(format!("bad boundary flag `{s}`"))),
        };
        let ends = if boundary {
            LineEnds::Boundary(a, parse_side(t[3]).ok_or_else(|| lines.err(format!("bad side `{}`", t[3])))?)
        } else {
            let b: usize = lines.num(t[3], "dot")?;
            if a >= b {
                return Err(lines.err("line endpoints must be increasing"));
            }
            LineEnds::Pair(a, b)
        };
        let coefficient = coefficient_from_str(t[4]).ok_or_else(|| lines.err(format!("bad eps `{}`", t[4])))?;
        let flips_logical = match t[6] {
            "0" => false,
            "1" => true,
            s => return Err(lines.err(format!("bad flip flag `{s}`"))),
        };
        let conflicts = lines.num(t[7], "conflict count")?;
        let correction =
            if t[8] == "-" { Vec::new() } else { t[8].split(',').map(|q| lines.num(q, "qubit")).collect::<Result<Vec<usize>>>()? };
        let faults = if t[9] == "-" {
            Vec::new()
        } else {
            t[9].split(',')
                .map(|f| parse_fault_token(f).ok_or_else(|| lines.err(format!("bad fault `{f}`"))))
                .collect::<Result<Vec<_>>>()?
        };
        out.push(Line { ends, coefficient, faults, flips_logical, correction, conflicts });
    }
    match lines.expect()?.as_slice() {
        ["end"] => {}
        _ => return Err(lines.err("expected `end`")),
    }
    if lines.next().is_some() {
        return Err(lines.err("trailing content after `end`"));
    }
    Lattice::from_parts(header, dots, out).map_err(|e| lines.err(e.to_string()))
}

/// Degree histogram as CSV: `degree,count`.
pub fn degree_csv(lattice: &Lattice) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["degree", "count"])?;
    for (deg, count) in lattice.degree_histogram() {
        w.write_record([deg.to_string(), count.to_string()])?;
    }
    into_string(w)
}

pub(crate) fn into_string(w: csv::Writer<Vec<u8>>) -> Result<String> {
    let bytes = w.into_inner().map_err(|e| CliError::Io(e.into_error()))?;
    String::from_utf8(bytes).map_err(|_| CliError::Internal("csv output is not utf-8".into()))
}

/// Writes detection events as `t x y type` lines: detection layer, ancilla column, ancilla row, stabilizer kind.
pub fn detection_lines(layout: &Layout, set: &DetectionSet) -> String {
    let mut out = String::new();
    for e in set.events() {
        let c = e.coord(layout);
        let _ = writeln!(out, "{} {} {} {}", e.layer, c.col, c.row, e.kind);
    }
    out
}

fn parse_detection(layout: &Layout, t: &[&str]) -> Option<DetectionEvent> {
    let [layer, x, y, kind] = t else { return None };
    let coord = Coord::new(y.parse().ok()?, x.parse().ok()?);
    let kind = parse_kind(kind)?;
    let q = layout.qubit_at(coord)?;
    if layout.role(q) != QubitRole::Ancilla(kind) {
        return None;
    }
    Some(DetectionEvent { layer: layer.parse().ok()?, kind, index: layout.stabilizer_index(q)? })
}

/// One shot of a memory experiment, as dumped for replay.
#[derive(Debug, Clone, PartialEq)]
pub struct FaultRecord {
    pub distance: u32,
    pub rounds: u32,
    pub basis: MemoryBasis,
    pub p: f64,
    pub seed: u64,
    pub shot: u64,
    /// Logical failure of the decoded shot.
    pub failed: bool,
    pub faults: Vec<FaultLocation>,
    pub events: Vec<DetectionEvent>,
}

/// Serializes fault records, one fault per line.
///
/// ```text
/// surfmatch-faults 1
/// shot 17 distance 3 rounds 3 basis z p 0.002 seed 1 failed 1
/// faults 2
/// 9 3 X
/// 12 0 XZ
/// events 2
/// 1 2 1 Z
/// 2 2 3 Z
/// end
/// ```
///
/// Fault lines are `layer gate kind` within the circuit; event lines are `t x y type`.
pub fn write_fault_records(records: &[FaultRecord], layout_of: impl Fn(&FaultRecord) -> Option<Layout>) -> String {
    let mut out = String::new();
    out.push_str(FAULTS_MAGIC);
    out.push('\n');
    for r in records {
        let _ = writeln!(
            out,
            "shot {} distance {} rounds {} basis {} p {} seed {} failed {}",
            r.shot, r.distance, r.rounds, r.basis, r.p, r.seed, r.failed as u8
        );
        let _ = writeln!(out, "faults {}", r.faults.len());
        for f in &r.faults {
            let _ = writeln!(out, "{} {} {}", f.layer, f.gate, f.kind);
        }
        let _ = writeln!(out, "events {}", r.events.len());
        if let Some(layout) = layout_of(r) {
            out.push_str(&detection_lines(&layout, &DetectionSet::from_events(r.events.clone())));
        }
        out.push_str("end\n");
    }
    out
}

/// Parses the output of [`write_fault_records`].
pub fn parse_fault_records(source: &str, text: &str) -> Result<Vec<FaultRecord>> {
    let mut lines = Lines::new(source, text);
    let magic = lines.expect()?;
    if magic.join(" ") != FAULTS_MAGIC {
        return Err(lines.err(format!("expected `{FAULTS_MAGIC}`")));
    }
    let mut out = Vec::new();
    while let Some(t) = lines.next() {
        if t.len() != 14 || t[0] != "shot" {
            return Err(lines.err("expected `shot <n> distance <d> rounds <r> basis <b> p <p> seed <s> failed <0|1>`"));
        }
        let keys = ["shot", "distance", "rounds", "basis", "p", "seed", "failed"];
        for (i, k) in keys.iter().enumerate() {
            if t[2 * i] != *k {
                return Err(lines.err(format!("expected key `{k}`")));
            }
        }
        let distance: u32 = lines.num(t[3], "distance")?;
        let p: f64 = lines.num(t[9], "p")?;
        let layout = Layout::new(distance).map_err(|e| lines.err(e.to_string()))?;
        let mut rec = FaultRecord {
            shot: lines.num(t[1], "shot")?,
            distance,
            rounds: lines.num(t[5], "rounds")?,
            basis: parse_basis(&lines, t[7])?,
            p,
            seed: lines.num(t[11], "seed")?,
            failed: match t[13] {
                "0" => false,
                "1" => true,
                s => return Err(lines.err(format!("bad failed flag `{s}`"))),
            },
            faults: Vec::new(),
            events: Vec::new(),
        };
        let nf: usize = lines.keyed_num("faults")?;
        for _ in 0..nf {
            let t = lines.expect()?;
            let [layer, gate, kind] = t.as_slice() else {
                return Err(lines.err("expected `layer gate kind`"));
            };
            let kind = FaultKind::parse(kind).ok_or_else(|| lines.err(format!("bad fault kind `{kind}`")))?;
            rec.faults.push(FaultLocation::new(lines.num(layer, "layer")?, lines.num(gate, "gate")?, kind));
        }
        let ne: usize = lines.keyed_num("events")?;
        for _ in 0..ne {
            let t = lines.expect()?;
            let e = parse_detection(&layout, &t).ok_or_else(|| lines.err("expected `t x y type` naming an ancilla"))?;
            rec.events.push(e);
        }
        match lines.expect()?.as_slice() {
            ["end"] => {}
            _ => return Err(lines.err("expected `end`")),
        }
        out.push(rec);
    }
    Ok(out)
}
