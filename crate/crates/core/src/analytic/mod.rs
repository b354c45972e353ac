//! Closed-form reference physics.

mod tfim;
mod yang_gaudin;

pub use tfim::*;
pub use yang_gaudin::*;

use crate::error::Result;
use crate::maxwell::{integrate_relation, Anchor, MaxwellResult, ReconstructionKind};

/// Pressure from `<G2> = N^2 / V`: `dP/dc = -d<G2>/dV = n^2`, integrated
/// from `P(0) = 0`. `c_axis` must contain `0`.
pub fn meanfield_pressure_maxwell(n: f64, c_axis: &[f64]) -> Result<MaxwellResult> {
    let integrand = vec![n * n; c_axis.len()];
    integrate_relation(
        ReconstructionKind::Pressure,
        c_axis,
        &integrand,
        0.0,
        Anchor::new(0.0, "non-interacting gas at zero temperature"),
    )
}
