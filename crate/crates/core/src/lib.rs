//! Minimum-cost propositional abduction with implicit hitting sets.
//!
//! The crate bundles the whole solver stack: a CDCL SAT engine, a
//! core-guided MaxSAT engine with an incremental hitting-set front end,
//! the Hyper abduction algorithm and the AbHS/AbHS+ baselines, QBF
//! emitters, instance generators and brute-force reference oracles.

pub mod baseline;
pub mod cnf;
pub mod encode;
pub mod error;
pub mod formats;
pub mod gen;
pub mod hitting;
pub mod hyper;
pub mod maxsat;
pub mod oracle;
pub mod qbf;
pub mod sat;

pub use cnf::{Assignment, Clause, Cnf, Explanation, Hypothesis, Lit, Pap};
pub use error::{CnfError, ParseError, ParseErrorKind};
pub use sat::{SatResult, Solver};
