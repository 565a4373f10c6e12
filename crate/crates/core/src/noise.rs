//! Gate error model.
//!
//! Every gate location fails independently with probability `p`, and the
//! failure is drawn uniformly from the kinds compatible with the gate:
//!
//! * initialization prepares the orthogonal state (`init_flip`),
//! * measurement reports the wrong eigenvalue (`meas_flip`),
//! * H and idle are followed by one of X, Y, Z,
//! * CX is followed by one of the 15 non-identity two-qubit Paulis.
//!
//! Faults act after the gate they decorate.

use alloc::vec::Vec;
use core::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Geometric};

use crate::circuit::{MemoryCircuit, Phase};
use crate::pauli::Pauli;
use crate::schedule::GateKind;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum FaultKind {
    InitFlip,
    MeasFlip,
    Pauli1(Pauli),
    /// Pauli on (control, target); never `II`.
    Pauli2(Pauli, Pauli),
}

const PAULIS: [Pauli; 4] = [Pauli::I, Pauli::X, Pauli::Y, Pauli::Z];

impl FaultKind {
    /// All fault kinds a gate can suffer, in canonical order.
    pub fn kinds_for(gate: GateKind) -> Vec<FaultKind> {
        match gate {
            GateKind::Init0 | GateKind::InitPlus => alloc::vec![FaultKind::InitFlip],
            GateKind::MeasureZ | GateKind::MeasureX => alloc::vec![FaultKind::MeasFlip],
            GateKind::H | GateKind::Idle => Pauli::NON_IDENTITY.iter().map(|p| FaultKind::Pauli1(*p)).collect(),
            GateKind::Cx => PAULIS
                .iter()
                .flat_map(|a| PAULIS.iter().map(move |b| (*a, *b)))
                .filter(|(a, b)| (*a, *b) != (Pauli::I, Pauli::I))
                .map(|(a, b)| FaultKind::Pauli2(a, b))
                .collect(),
        }
    }

    pub fn count_for(gate: GateKind) -> usize {
        match gate {
            GateKind::Init0 | GateKind::InitPlus | GateKind::MeasureZ | GateKind::MeasureX => 1,
            GateKind::H | GateKind::Idle => 3,
            GateKind::Cx => 15,
        }
    }

    fn nth_for(gate: GateKind, i: usize) -> FaultKind {
        match gate {
            GateKind::Init0 | GateKind::InitPlus => FaultKind::InitFlip,
            GateKind::MeasureZ | GateKind::MeasureX => FaultKind::MeasFlip,
            GateKind::H | GateKind::Idle => FaultKind::Pauli1(Pauli::NON_IDENTITY[i]),
            GateKind::Cx => {
                let k = i + 1;
                FaultKind::Pauli2(PAULIS[k / 4], PAULIS[k % 4])
            }
        }
    }

    /// Position of this kind within [`FaultKind::kinds_for`] of a compatible gate.
    pub fn index(self) -> usize {
        let at = |p: Pauli| PAULIS.iter().position(|q| *q == p).unwrap();
        match self {
            FaultKind::InitFlip | FaultKind::MeasFlip => 0,
            FaultKind::Pauli1(p) => at(p) - 1,
            FaultKind::Pauli2(a, b) => at(a) * 4 + at(b) - 1,
        }
    }

    pub fn is_compatible(self, gate: GateKind) -> bool {
        match self {
            FaultKind::InitFlip => matches!(gate, GateKind::Init0 | GateKind::InitPlus),
            FaultKind::MeasFlip => gate.is_measurement(),
            FaultKind::Pauli1(p) => p != Pauli::I && matches!(gate, GateKind::H | GateKind::Idle),
            FaultKind::Pauli2(a, b) => (a, b) != (Pauli::I, Pauli::I) && gate == GateKind::Cx,
        }
    }

    /// First-order probability of this specific fault, as a multiple of `p`.
    pub fn coefficient(self) -> Coefficient {
        match self {
            FaultKind::InitFlip | FaultKind::MeasFlip => Coefficient::from_fifteenths(15),
            FaultKind::Pauli1(_) => Coefficient::from_fifteenths(5),
            FaultKind::Pauli2(..) => Coefficient::from_fifteenths(1),
        }
    }

    /// Combined effect of two faults at the same location, `None` when they cancel.
    pub fn compose(self, other: FaultKind) -> Option<FaultKind> {
        match (self, other) {
            (FaultKind::InitFlip, FaultKind::InitFlip) | (FaultKind::MeasFlip, FaultKind::MeasFlip) => None,
            (FaultKind::Pauli1(a), FaultKind::Pauli1(b)) => match a.mul(b) {
                Pauli::I => None,
                p => Some(FaultKind::Pauli1(p)),
            },
            (FaultKind::Pauli2(a, b), FaultKind::Pauli2(c, d)) => match (a.mul(c), b.mul(d)) {
                (Pauli::I, Pauli::I) => None,
                (x, y) => Some(FaultKind::Pauli2(x, y)),
            },
            _ => panic!("composing incompatible fault kinds"),
        }
    }

    pub fn label(self) -> FaultLabel {
        FaultLabel(self)
    }

    pub fn parse(s: &str) -> Option<FaultKind> {
        match s {
            "init_flip" => return Some(FaultKind::InitFlip),
            "meas_flip" => return Some(FaultKind::MeasFlip),
            _ => {}
        }
        let mut chars = s.chars();
        let a = Pauli::from_char(chars.next()?)?;
        match (chars.next(), chars.next()) {
            (None, _) if a != Pauli::I => Some(FaultKind::Pauli1(a)),
            (Some(b), None) => {
                let b = Pauli::from_char(b)?;
                ((a, b) != (Pauli::I, Pauli::I)).then_some(FaultKind::Pauli2(a, b))
            }
            _ => None,
        }
    }
}

/// Text form of a [`FaultKind`]: `init_flip`, `meas_flip`, `X`, `ZI`, ...
pub struct FaultLabel(FaultKind);

impl fmt::Display for FaultLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.0 {
            FaultKind::InitFlip => f.write_str("init_flip"),
            FaultKind::MeasFlip => f.write_str("meas_flip"),
            FaultKind::Pauli1(p) => write!(f, "{p}"),
            FaultKind::Pauli2(a, b) => write!(f, "{a}{b}"),
        }
    }
}

impl fmt::Display for FaultKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.label().fmt(f)
    }
}

/// A first-order probability coefficient (a multiple of `p`), held exactly in fifteenths.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Coefficient(u32);

impl Coefficient {
    pub const fn from_fifteenths(n: u32) -> Self {
        Self(n)
    }

    pub fn fifteenths(self) -> u32 {
        self.0
    }

    pub fn as_f64(self) -> f64 {
        self.0 as f64 / 15.0
    }

    /// Reduced `(numerator, denominator)`.
    pub fn as_fraction(self) -> (u32, u32) {
        let g = num_integer::gcd(self.0, 15);
        if self.0 == 0 {
            (0, 1)
        } else {
            (self.0 / g, 15 / g)
        }
    }
}

impl core::ops::Add for Coefficient {
    type Output = Coefficient;

    fn add(self, rhs: Coefficient) -> Coefficient {
        Coefficient(self.0 + rhs.0)
    }
}

impl core::ops::AddAssign for Coefficient {
    fn add_assign(&mut self, rhs: Coefficient) {
        self.0 += rhs.0;
    }
}

impl core::iter::Sum for Coefficient {
    fn sum<I: Iterator<Item = Coefficient>>(iter: I) -> Self {
        iter.fold(Coefficient::default(), |a, b| a + b)
    }
}

impl fmt::Display for Coefficient {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (n, d) = self.as_fraction();
        if d == 1 {
            write!(f, "{n}")
        } else {
            write!(f, "{n}/{d}")
        }
    }
}

/// A single fault: the gate at (`layer`, `gate`) of a [`MemoryCircuit`] fails with `kind`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FaultLocation {
    pub layer: u32,
    pub gate: u32,
    pub kind: FaultKind,
}

impl FaultLocation {
    pub fn new(layer: u32, gate: u32, kind: FaultKind) -> Self {
        Self { layer, gate, kind }
    }

    /// Round and timestep of the fault within `circuit`.
    pub fn phase(&self, circuit: &MemoryCircuit) -> Phase {
        circuit.phase(self.layer)
    }
}

/// Faults at distinct gate locations, sorted by location.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct FaultSet {
    faults: Vec<FaultLocation>,
}

impl FaultSet {
    pub fn empty() -> Self {
        Self::default()
    }

    /// Validates `faults` against `circuit` and sorts them.
    pub fn new(circuit: &MemoryCircuit, mut faults: Vec<FaultLocation>) -> Result<Self> {
        for f in &faults {
            let gate = circuit.gate(f.layer, f.gate).ok_or(Error::UnknownLocation { layer: f.layer, gate: f.gate })?;
            if !f.kind.is_compatible(gate.kind()) {
                return Err(Error::IncompatibleFault { kind: kind_name(f.kind), gate: gate.kind().name() });
            }
        }
        faults.sort();
        for w in faults.windows(2) {
            if (w[0].layer, w[0].gate) == (w[1].layer, w[1].gate) {
                return Err(Error::DuplicateLocation { layer: w[0].layer, gate: w[0].gate });
            }
        }
        Ok(Self { faults })
    }

    /// Trusts the caller: faults sorted, on distinct gates, compatible with them.
    pub(crate) fn from_sorted(faults: Vec<FaultLocation>) -> Self {
        debug_assert!(faults.windows(2).all(|w| (w[0].layer, w[0].gate) < (w[1].layer, w[1].gate)));
        Self { faults }
    }

    pub fn single(fault: FaultLocation) -> Self {
        Self { faults: alloc::vec![fault] }
    }

    pub fn len(&self) -> usize {
        self.faults.len()
    }

    pub fn is_empty(&self) -> bool {
        self.faults.is_empty()
    }

    pub fn iter(&self) -> core::slice::Iter<'_, FaultLocation> {
        self.faults.iter()
    }

    pub fn as_slice(&self) -> &[FaultLocation] {
        &self.faults
    }

    /// Product of two fault sets: faults at a shared location are composed.
    pub fn compose(&self, other: &FaultSet) -> FaultSet {
        let mut out = Vec::with_capacity(self.len() + other.len());
        let (mut i, mut j) = (0, 0);
        while i < self.faults.len() || j < other.faults.len() {
            let a = self.faults.get(i);
            let b = other.faults.get(j);
            match (a, b) {
                (Some(x), Some(y)) if (x.layer, x.gate) == (y.layer, y.gate) => {
                    if let Some(kind) = x.kind.compose(y.kind) {
                        out.push(FaultLocation { kind, ..*x });
                    }
                    i += 1;
                    j += 1;
                }
                (Some(x), Some(y)) if (x.layer, x.gate) < (y.layer, y.gate) => {
                    out.push(*x);
                    i += 1;
                }
                (Some(x), None) => {
                    out.push(*x);
                    i += 1;
                }
                (_, Some(y)) => {
                    out.push(*y);
                    j += 1;
                }
                (None, None) => unreachable!(),
            }
        }
        FaultSet { faults: out }
    }
}

impl<'a> IntoIterator for &'a FaultSet {
    type Item = &'a FaultLocation;
    type IntoIter = core::slice::Iter<'a, FaultLocation>;

    fn into_iter(self) -> Self::IntoIter {
        self.faults.iter()
    }
}

fn kind_name(kind: FaultKind) -> &'static str {
    match kind {
        FaultKind::InitFlip => "init_flip",
        FaultKind::MeasFlip => "meas_flip",
        FaultKind::Pauli1(_) => "pauli_1q",
        FaultKind::Pauli2(..) => "pauli_2q",
    }
}

/// Every possible single fault of `circuit` with its first-order coefficient, in location order.
pub fn enumerate_single_faults(circuit: &MemoryCircuit) -> impl Iterator<Item = (FaultLocation, Coefficient)> + '_ {
    circuit.iter_gates().flat_map(|(layer, gate, g)| {
        FaultKind::kinds_for(g.kind()).into_iter().map(move |kind| (FaultLocation::new(layer, gate, kind), kind.coefficient()))
    })
}

fn check_probability(p: f64) -> Result<()> {
    if (0.0..=1.0).contains(&p) {
        Ok(())
    } else {
        Err(Error::InvalidProbability(p))
    }
}

/// Seeded sampler of [`FaultSet`]s for one circuit and error rate.
///
/// Shot `i` of seed `s` draws from the ChaCha8 stream `i` keyed by `s`, so any
/// shot can be regenerated on its own regardless of which worker ran it.
#[derive(Debug, Clone)]
pub struct FaultSampler<'a> {
    circuit: &'a MemoryCircuit,
    p: f64,
    gaps: Option<Geometric>,
}

impl<'a> FaultSampler<'a> {
    pub fn new(circuit: &'a MemoryCircuit, p: f64) -> Result<Self> {
        check_probability(p)?;
        let gaps = if p > 0.0 && p < 1.0 { Some(Geometric::new(p).map_err(|_| Error::InvalidProbability(p))?) } else { None };
        Ok(Self { circuit, p, gaps })
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn rng(seed: u64, shot: u64) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(shot);
        rng
    }

    pub fn sample(&self, seed: u64, shot: u64) -> FaultSet {
        let mut rng = Self::rng(seed, shot);
        let n = self.circuit.num_gates();
        let mut faults = Vec::new();
        let mut push = |flat: usize, rng: &mut ChaCha8Rng| {
            let (layer, gate) = self.circuit.location_of(flat);
            let kind = self.circuit.flat_gate(flat).kind();
            let i = rng.random_range(0..FaultKind::count_for(kind));
            faults.push(FaultLocation::new(layer, gate, FaultKind::nth_for(kind, i)));
        };
        match &self.gaps {
            None if self.p == 0.0 => {}
            None => {
                for flat in 0..n {
                    push(flat, &mut rng);
                }
            }
            Some(geom) => {
                // Skip the fault-free run before each faulty location.
                let mut next: u64 = 0;
                loop {
                    next += geom.sample(&mut rng);
                    if next >= n as u64 {
                        break;
                    }
                    push(next as usize, &mut rng);
                    next += 1;
                }
            }
        }
        FaultSet { faults }
    }
}

/// Samples one shot's faults; see [`FaultSampler`].
pub fn sample_faults(circuit: &MemoryCircuit, p: f64, seed: u64, shot: u64) -> Result<FaultSet> {
    Ok(FaultSampler::new(circuit, p)?.sample(seed, shot))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::MemoryBasis;
    use crate::schedule::Gate;

    fn circuit(d: u32, r: u32) -> MemoryCircuit {
        MemoryCircuit::for_distance(d, r, MemoryBasis::Z).unwrap()
    }

    #[test]
    fn kinds_per_gate() {
        assert_eq!(FaultKind::kinds_for(GateKind::Cx).len(), 15);
        assert_eq!(FaultKind::kinds_for(GateKind::H).len(), 3);
        assert_eq!(FaultKind::kinds_for(GateKind::Idle).len(), 3);
        assert_eq!(FaultKind::kinds_for(GateKind::MeasureZ), [FaultKind::MeasFlip]);
        assert_eq!(FaultKind::kinds_for(GateKind::Init0), [FaultKind::InitFlip]);
        for g in [GateKind::Cx, GateKind::H, GateKind::MeasureX, GateKind::InitPlus] {
            let kinds = FaultKind::kinds_for(g);
            assert_eq!(kinds.len(), FaultKind::count_for(g));
            for (i, k) in kinds.iter().enumerate() {
                assert_eq!(FaultKind::nth_for(g, i), *k);
                assert_eq!(k.index(), i);
                assert!(k.is_compatible(g));
            }
            // Each gate's kinds sum to exactly p.
            assert_eq!(kinds.iter().map(|k| k.coefficient()).sum::<Coefficient>(), Coefficient::from_fifteenths(15));
        }
        assert!(!FaultKind::MeasFlip.is_compatible(GateKind::Cx));
        assert!(!FaultKind::Pauli1(Pauli::X).is_compatible(GateKind::Cx));
    }

    #[test]
    fn enumeration_matches_gate_census() {
        let c = circuit(3, 3);
        let census: usize = c.iter_gates().map(|(_, _, g)| FaultKind::count_for(g.kind())).sum();
        let faults: Vec<_> = enumerate_single_faults(&c).collect();
        assert_eq!(faults.len(), census);
        let mut locs: Vec<_> = faults.iter().map(|(f, _)| *f).collect();
        locs.dedup();
        assert_eq!(locs.len(), census);
        let cx = c.iter_gates().find(|(_, _, g)| matches!(g, Gate::Cx { .. })).unwrap();
        let at_cx: Vec<_> = faults.iter().filter(|(f, _)| (f.layer, f.gate) == (cx.0, cx.1)).collect();
        assert_eq!(at_cx.len(), 15);
        assert!(at_cx.iter().all(|(_, c)| *c == Coefficient::from_fifteenths(1)));
    }

    #[test]
    fn kind_labels_round_trip() {
        for g in [GateKind::Cx, GateKind::H, GateKind::MeasureZ, GateKind::Init0] {
            for k in FaultKind::kinds_for(g) {
                assert_eq!(FaultKind::parse(&alloc::format!("{k}")), Some(k));
            }
        }
        assert_eq!(FaultKind::parse("II"), None);
        assert_eq!(FaultKind::parse("I"), None);
        assert_eq!(FaultKind::parse("XYZ"), None);
    }

    #[test]
    fn compose_cancels_and_multiplies() {
        use Pauli::*;
        assert_eq!(FaultKind::Pauli1(X).compose(FaultKind::Pauli1(Z)), Some(FaultKind::Pauli1(Y)));
        assert_eq!(FaultKind::Pauli1(X).compose(FaultKind::Pauli1(X)), None);
        assert_eq!(FaultKind::Pauli2(X, I).compose(FaultKind::Pauli2(X, I)), None);
        assert_eq!(FaultKind::Pauli2(X, I).compose(FaultKind::Pauli2(I, Z)), Some(FaultKind::Pauli2(X, Z)));
        assert_eq!(FaultKind::MeasFlip.compose(FaultKind::MeasFlip), None);
    }

    #[test]
    fn fault_set_validation() {
        let c = circuit(2, 1);
        let ok = FaultLocation::new(0, 0, FaultKind::InitFlip);
        assert!(FaultSet::new(&c, alloc::vec![ok]).is_ok());
        assert!(matches!(
            FaultSet::new(&c, alloc::vec![FaultLocation::new(0, 0, FaultKind::MeasFlip)]),
            Err(Error::IncompatibleFault { .. })
        ));
        assert!(matches!(
            FaultSet::new(&c, alloc::vec![FaultLocation::new(99, 0, FaultKind::MeasFlip)]),
            Err(Error::UnknownLocation { .. })
        ));
        assert!(matches!(FaultSet::new(&c, alloc::vec![ok, ok]), Err(Error::DuplicateLocation { .. })));
    }

    #[test]
    fn sampler_edge_probabilities() {
        let c = circuit(3, 3);
        assert!(matches!(FaultSampler::new(&c, -0.1), Err(Error::InvalidProbability(_))));
        assert!(matches!(FaultSampler::new(&c, 1.5), Err(Error::InvalidProbability(_))));
        let zero = FaultSampler::new(&c, 0.0).unwrap();
        for shot in 0..100 {
            assert!(zero.sample(1, shot).is_empty());
        }
        let all = FaultSampler::new(&c, 1.0).unwrap().sample(1, 0);
        assert_eq!(all.len(), c.num_gates());
        assert!(FaultSet::new(&c, all.as_slice().to_vec()).is_ok());
    }

    #[test]
    fn sampler_is_deterministic_per_shot() {
        let c = circuit(3, 3);
        let s = FaultSampler::new(&c, 0.05).unwrap();
        assert_eq!(s.sample(7, 3), s.sample(7, 3));
        assert_ne!(s.sample(7, 3), s.sample(7, 4));
        assert_ne!(s.sample(7, 3), s.sample(8, 3));
        // Sampled sets are valid fault sets.
        for shot in 0..50 {
            let f = s.sample(7, shot);
            assert_eq!(FaultSet::new(&c, f.as_slice().to_vec()).unwrap(), f);
        }
    }

    #[test]
    fn sampler_rate_within_three_sigma() {
        let c = circuit(3, 3);
        let p = 0.01;
        let s = FaultSampler::new(&c, p).unwrap();
        let n = c.num_gates() as u64;
        let shots = 1_000_000 / n + 1;
        let trials = (shots * n) as f64;
        let faults: usize = (0..shots).map(|i| s.sample(42, i).len()).sum();
        let sigma = (trials * p * (1.0 - p)).sqrt();
        assert!((faults as f64 - trials * p).abs() < 3.0 * sigma, "{faults} vs {}", trials * p);
    }

    #[test]
    fn sampled_kinds_are_uniform_on_cx() {
        let c = circuit(2, 2);
        let s = FaultSampler::new(&c, 0.5).unwrap();
        let mut counts = [0u32; 15];
        for shot in 0..4000 {
            for f in s.sample(3, shot).iter() {
                if let FaultKind::Pauli2(a, b) = f.kind {
                    let idx = PAULIS.iter().position(|p| *p == a).unwrap() * 4 + PAULIS.iter().position(|p| *p == b).unwrap() - 1;
                    counts[idx] += 1;
                }
            }
        }
        let total: u32 = counts.iter().sum();
        let expect = total as f64 / 15.0;
        let sigma = (expect * (14.0 / 15.0)).sqrt();
        for c in counts {
            assert!((c as f64 - expect).abs() < 5.0 * sigma);
        }
    }
}
