//! Pauli operators, Pauli error frames and their propagation through H and CX.
//!
//! Global phases are dropped everywhere: a frame only records which qubits
//! carry an X component and which carry a Z component. A qubit with both bits
//! set holds a Y error.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use core::ops::{BitXor, BitXorAssign};

pub use num_complex::Complex64;

use crate::{Error, Result};

/// A single-qubit Pauli operator up to phase.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    pub const NON_IDENTITY: [Pauli; 3] = [Pauli::X, Pauli::Y, Pauli::Z];

    pub fn from_bits(x: bool, z: bool) -> Self {
        match (x, z) {
            (false, false) => Pauli::I,
            (true, false) => Pauli::X,
            (true, true) => Pauli::Y,
            (false, true) => Pauli::Z,
        }
    }

    pub fn has_x(self) -> bool {
        matches!(self, Pauli::X | Pauli::Y)
    }

    pub fn has_z(self) -> bool {
        matches!(self, Pauli::Z | Pauli::Y)
    }

    /// Product up to phase.
    pub fn mul(self, other: Pauli) -> Pauli {
        Pauli::from_bits(self.has_x() ^ other.has_x(), self.has_z() ^ other.has_z())
    }

    pub fn as_char(self) -> char {
        match self {
            Pauli::I => 'I',
            Pauli::X => 'X',
            Pauli::Y => 'Y',
            Pauli::Z => 'Z',
        }
    }

    pub fn from_char(c: char) -> Option<Self> {
        match c {
            'I' => Some(Pauli::I),
            'X' => Some(Pauli::X),
            'Y' => Some(Pauli::Y),
            'Z' => Some(Pauli::Z),
            _ => None,
        }
    }
}

impl fmt::Display for Pauli {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.as_char())
    }
}

/// Coefficients of a 2x2 matrix in the operator basis `I`, `X`, `XZ`, `Z`.
///
/// For `E = [[a, b], [c, d]]`:
/// `E = (a+d)/2 I + (b+c)/2 X + (c-b)/2 XZ + (a-d)/2 Z`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PauliDecomposition {
    pub c_i: Complex64,
    pub c_x: Complex64,
    pub c_xz: Complex64,
    pub c_z: Complex64,
}

/// Row-major 2x2 complex matrix.
pub type Matrix2 = [[Complex64; 2]; 2];

/// Decomposes an arbitrary single-qubit operator into no error, `X`, `XZ` and `Z` parts.
pub fn decompose_error(e: &Matrix2) -> PauliDecomposition {
    let [[a, b], [c, d]] = *e;
    PauliDecomposition { c_i: (a + d) * 0.5, c_x: (b + c) * 0.5, c_xz: (c - b) * 0.5, c_z: (a - d) * 0.5 }
}

impl PauliDecomposition {
    /// Recombines the coefficients into a matrix.
    pub fn reconstruct(&self) -> Matrix2 {
        let one = Complex64::new(1.0, 0.0);
        let zero = Complex64::new(0.0, 0.0);
        let basis: [(Complex64, Matrix2); 4] = [
            (self.c_i, [[one, zero], [zero, one]]),
            (self.c_x, [[zero, one], [one, zero]]),
            // XZ = [[0, -1], [1, 0]]
            (self.c_xz, [[zero, -one], [one, zero]]),
            (self.c_z, [[one, zero], [zero, -one]]),
        ];
        let mut out = [[zero; 2]; 2];
        for (coeff, m) in basis.iter() {
            for r in 0..2 {
                for c in 0..2 {
                    out[r][c] += coeff * m[r][c];
                }
            }
        }
        out
    }
}

/// Accumulated X and Z error bits for every qubit of a register.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PauliFrame {
    x: Vec<bool>,
    z: Vec<bool>,
}

impl PauliFrame {
    /// An error-free frame on `len` qubits.
    pub fn new(len: usize) -> Self {
        Self { x: vec![false; len], z: vec![false; len] }
    }

    pub fn len(&self) -> usize {
        self.x.len()
    }

    pub fn is_empty(&self) -> bool {
        self.x.len() == 0
    }

    /// True when no qubit carries an error.
    pub fn is_identity(&self) -> bool {
        !self.x.iter().chain(self.z.iter()).any(|&b| b)
    }

    pub fn x_bits(&self) -> &[bool] {
        &self.x
    }

    pub fn z_bits(&self) -> &[bool] {
        &self.z
    }

    fn check(&self, qubit: usize) -> Result<()> {
        if qubit < self.len() {
            Ok(())
        } else {
            Err(Error::InvalidQubit { qubit, len: self.len() })
        }
    }

    pub fn get(&self, qubit: usize) -> Result<Pauli> {
        self.check(qubit)?;
        Ok(Pauli::from_bits(self.x[qubit], self.z[qubit]))
    }

    /// Multiplies `pauli` into the frame at `qubit`.
    pub fn apply(&mut self, qubit: usize, pauli: Pauli) -> Result<()> {
        self.check(qubit)?;
        self.apply_unchecked(qubit, pauli);
        Ok(())
    }

    #[inline]
    pub(crate) fn apply_unchecked(&mut self, qubit: usize, pauli: Pauli) {
        self.x[qubit] ^= pauli.has_x();
        self.z[qubit] ^= pauli.has_z();
    }

    /// Forgets any error on `qubit`, as a reset does.
    #[inline]
    pub(crate) fn clear(&mut self, qubit: usize) {
        self.x[qubit] = false;
        self.z[qubit] = false;
    }

    #[inline]
    pub(crate) fn x_at(&self, qubit: usize) -> bool {
        self.x[qubit]
    }

    #[inline]
    pub(crate) fn z_at(&self, qubit: usize) -> bool {
        self.z[qubit]
    }

    /// Conjugates the frame by a CX gate in place.
    pub fn cx(&mut self, control: usize, target: usize) -> Result<()> {
        self.check(control)?;
        self.check(target)?;
        if control == target {
            return Err(Error::SameQubit(control));
        }
        self.cx_unchecked(control, target);
        Ok(())
    }

    #[inline]
    pub(crate) fn cx_unchecked(&mut self, control: usize, target: usize) {
        // X copies control -> target, Z copies target -> control.
        self.x[target] ^= self.x[control];
        self.z[control] ^= self.z[target];
    }

    /// Conjugates the frame by a Hadamard in place.
    pub fn h(&mut self, qubit: usize) -> Result<()> {
        self.check(qubit)?;
        self.h_unchecked(qubit);
        Ok(())
    }

    #[inline]
    pub(crate) fn h_unchecked(&mut self, qubit: usize) {
        core::mem::swap(&mut self.x[qubit], &mut self.z[qubit]);
    }
}

impl BitXorAssign<&PauliFrame> for PauliFrame {
    fn bitxor_assign(&mut self, rhs: &PauliFrame) {
        assert_eq!(self.len(), rhs.len(), "frames act on different registers");
        for (a, b) in self.x.iter_mut().zip(&rhs.x) {
            *a ^= *b;
        }
        for (a, b) in self.z.iter_mut().zip(&rhs.z) {
            *a ^= *b;
        }
    }
}

impl BitXor<&PauliFrame> for &PauliFrame {
    type Output = PauliFrame;

    fn bitxor(self, rhs: &PauliFrame) -> PauliFrame {
        let mut out = self.clone();
        out ^= rhs;
        out
    }
}

impl fmt::Display for PauliFrame {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for q in 0..self.len() {
            write!(f, "{}", Pauli::from_bits(self.x[q], self.z[q]))?;
        }
        Ok(())
    }
}

/// Returns `frame` conjugated by CX(control, target).
pub fn propagate_cx(frame: &PauliFrame, control: usize, target: usize) -> Result<PauliFrame> {
    let mut out = frame.clone();
    out.cx(control, target)?;
    Ok(out)
}

/// Returns `frame` conjugated by H on `qubit`.
pub fn propagate_h(frame: &PauliFrame, qubit: usize) -> Result<PauliFrame> {
    let mut out = frame.clone();
    out.h(qubit)?;
    Ok(out)
}
