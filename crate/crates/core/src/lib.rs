//! Core library for diffractive focusing of square wavepackets in three
//! nested wave models: a two-species linear cellular automaton (discrete
//! space and time), a nearest-neighbour tight-binding chain (discrete
//! space, continuous time), and the free dimensionless Schrödinger
//! equation (fully continuous).
//!
//! The crate is `no_std` + `alloc`; all operations are pure functions and
//! can be called concurrently. IO, file formats, and the CLI live in the
//! companion `focuslab` crate.

#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod automaton;
pub mod continuum;
pub mod error;
pub mod lattice;
pub mod measures;
pub mod numerics;
pub mod tightbinding;
pub mod wigner;

pub use error::Error;
pub use lattice::{LatticeField, SpaceTimeGrid};

/// Complex amplitude type used throughout.
pub type Complex = num_complex::Complex64;
