//! Exact solver for orbit-finite linear programs.
//!
//! An orbit-finite linear program has infinitely many unknowns and
//! constraints, both indexed by tuples of distinct atoms from a countable
//! set, with only finitely many constraint shapes up to atom permutation.
//! This crate decides solvability of such systems by finitary solutions and
//! computes suprema of linear objectives, entirely over arbitrary-precision
//! rationals.
//!
//! The pipeline:
//!
//! 1. [`orbit`] describes the input systems (one row/column family per
//!    orbit, coefficients addressed by partial injections between index
//!    tuples) and their textual format.
//! 2. [`reduction`] collapses such a system to an ordinary finite system
//!    whose coefficients are integer polynomials in a parameter `n` (the
//!    number of atoms a finitary solution may touch).
//! 3. [`paramlp`] decides whether a parametric system holds for all large
//!    `n`, by an iterative split of each inequality into its leading
//!    (highest-degree) part and the remainder.
//! 4. [`simplex`] is the exact rational LP kernel underneath.
//!
//! [`instantiate`] expands an orbit system over a concrete finite atom set
//! (the brute-force cross-check), [`transforms`] converts between the
//! standard system shapes, and [`counter`] encodes counter-machine
//! reachability as an orbit-finite system.

pub mod counter;
pub mod instantiate;
pub mod numerics;
pub mod orbit;
pub mod paramlp;
pub mod pipeline;
pub mod reduction;
pub mod simplex;
pub mod transforms;
