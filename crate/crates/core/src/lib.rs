//! Kreweras walks in the quarter plane: exact enumeration oracles, the kernel
//! method with canonical factorization, closed-form generating functions,
//! and the stationary distribution and time-dependent law of the associated
//! Markov chain.

pub mod counting;
pub mod error;
pub mod kernel;
pub mod law;
pub mod report;
pub mod series;
pub mod stationary;
pub mod walks;

pub use error::{Error, Result};
