//! Discrete-convexity toolkit for trading networks.
//!
//! The crate verifies M/M♯-convexity of integer point sets and functions,
//! solves the efficient-allocation problem over trading networks with
//! integral polymatroid constraints (both the integer program and its
//! lottery relaxation, with integrality-gap detection), and searches for or
//! refutes competitive-equilibrium prices with exact Farkas certificates.
//!
//! All arithmetic is exact rational; there is no floating point in any
//! correctness-bearing path.

pub mod builtin;
pub mod convexity;
pub mod coords;
pub mod equilibrium;
pub mod error;
pub mod generate;
pub mod lp;
pub mod network;
pub mod polymatroid;
pub mod rat;
pub mod solver;
pub mod suites;

pub use coords::{IndexSet, IntVec, RatVec};
pub use error::Error;
pub use rat::{rat, Rat, Value};
