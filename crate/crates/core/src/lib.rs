//! Solvers for allocating indivisible goods to agents with unequal
//! entitlements, maximizing Nash welfare (the weighted geometric mean of
//! utilities) or p-mean welfare.
//!
//! The crate provides:
//! - an instance/allocation data model with exact rational arithmetic and
//!   JSON I/O ([`instance`], [`allocation`], [`io`]);
//! - welfare evaluation in log domain with exact tie-breaking and a wwEF1
//!   fairness check ([`welfare`], [`envy`]);
//! - a brute-force oracle for small instances ([`oracle`]);
//! - an approximation scheme over rounded good values for identical
//!   valuations with asymmetric weights, plus a p-mean variant ([`ptas`]);
//! - an exact solver for identical valuations with few distinct values
//!   ([`kary`]);
//! - a transfer procedure that makes any allocation wwEF1 without lowering
//!   Nash welfare ([`repair`]);
//! - a maximum-weight matching engine for general graphs ([`matching`]) and
//!   an exact solver for instances where each agent values at most two goods
//!   ([`two_valuable`]);
//! - an exact enumerator and an FPTAS for constantly many agents with
//!   additive integer valuations ([`fptas`]);
//! - a deterministic instance generator ([`gen`]) and method dispatch shared
//!   by the CLI and the C API ([`solver`]).

pub mod allocation;
pub mod envy;
pub mod error;
pub mod fptas;
pub mod gen;
pub mod instance;
pub mod io;
pub mod kary;
pub mod matching;
pub mod oracle;
pub mod ptas;
pub mod rat;
pub mod repair;
pub mod solver;
pub mod two_valuable;
pub mod welfare;

pub use allocation::Allocation;
pub use envy::wwef1_violations;
pub use error::{Error, Result};
pub use instance::{Instance, Profile, TwoTable};
pub use rat::Rat;
pub use solver::{Method, SolverOutput};
pub use welfare::{nash_welfare, p_mean_welfare, PExponent, WelfareValue};
