//! Numerical tolerances shared by every module.

use serde::{Deserialize, Serialize};

/// Allowed deviation of a probability vector's total mass from 1.
pub const TAU_MASS: f64 = 1e-9;
/// Entries at or below this value are outside the support.
pub const TAU_ZERO: f64 = 1e-12;
/// Equality tolerance for derived quantities (costs, divergences, verdicts).
pub const TAU_NUM: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    pub mass: f64,
    pub zero: f64,
    pub num: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            mass: TAU_MASS,
            zero: TAU_ZERO,
            num: TAU_NUM,
        }
    }
}
