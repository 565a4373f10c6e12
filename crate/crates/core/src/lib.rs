//! Circuit-level simulation and exact matching decoding of the planar surface code.
//!
//! The crate is `no_std` (it needs `alloc`) and performs no IO. It covers the
//! whole chain from the stabilizer measurement circuits to the logical-failure
//! decision of a memory experiment, plus the analytic bound chain used to argue
//! a finite threshold for unit-weight minimum-weight perfect matching:
//!
//! * [`pauli`]: Pauli frames, Clifford propagation and the single-qubit error decomposition.
//! * [`layout`]: code geometry, stabilizers and logical operators.
//! * [`schedule`]: the gate schedule of one error-detection round.
//! * [`circuit`]: a full memory experiment (preparation, rounds, readout) as gate layers.
//! * [`noise`]: the gate error model, as an exhaustive enumerator and a seeded sampler.
//! * [`syndrome`]: frame simulation of a shot and reduction to detection events.
//! * [`lattice`]: the dots-and-lines space-time graph built from every single fault.
//! * [`decoder`]: unit-weight matching decoder, corrections and logical failure.
//! * [`blossom`]: exact maximum-weight matching on general graphs.
//! * [`bounds`]: the path-counting logical error bound and threshold constant.
//! * [`oracles`]: brute-force checks for the decoder and the counting argument.

#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod blossom;
pub mod bounds;
pub mod circuit;
pub mod decoder;
mod error;
pub mod lattice;
pub mod layout;
pub mod noise;
pub mod oracles;
pub mod pauli;
pub mod schedule;
pub mod syndrome;

pub use circuit::{MemoryBasis, MemoryCircuit};
pub use error::{Error, Result};
pub use layout::{Layout, StabilizerKind};
