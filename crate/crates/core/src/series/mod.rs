//! Exact truncated formal-series arithmetic.

pub mod bseries;
pub mod json;
pub mod lpoly;
pub mod rat;
pub mod tseries;

pub use bseries::{BSeries, BiPoly};
pub use lpoly::LPoly;
pub use rat::{fmt_rat, parse_rat, rat, rat_int, Rat};
pub use tseries::{geometric, solve_valuation_fixed_point, TSeries, XPart, EXACT};

/// Default truncation order for symbolic work.
pub const DEFAULT_ORDER: usize = 24;
