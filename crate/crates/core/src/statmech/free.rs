//! Canonical free energies of non-interacting particles on a chain, used as
//! independent anchors at `c = 0`.
//!
//! Canonical partition functions are symmetric polynomials of the
//! single-particle Boltzmann factors `x_k`: elementary ones for fermions,
//! complete homogeneous ones for bosons. Both are built by an all-positive
//! recursion carried out in log space.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::models::Boundary;

/// Single-particle levels of `-t sum_j (a^dag_j a_{j+1} + h.c.)`.
pub fn open_chain_levels(sites: usize, hopping: f64, boundary: Boundary) -> Vec<f64> {
    match boundary {
        Boundary::Open => (1..=sites)
            .map(|k| -2.0 * hopping * (PI * k as f64 / (sites as f64 + 1.0)).cos())
            .collect(),
        Boundary::Periodic => (0..sites)
            .map(|k| -2.0 * hopping * (2.0 * PI * k as f64 / sites as f64).cos())
            .collect(),
    }
}

fn log_add(a: f64, b: f64) -> f64 {
    if a == f64::NEG_INFINITY {
        return b;
    }
    if b == f64::NEG_INFINITY {
        return a;
    }
    let m = a.max(b);
    m + ((a - m).exp() + (b - m).exp()).ln()
}

fn check(levels: &[f64], t: f64) -> Result<()> {
    if !(t > 0.0) || levels.is_empty() {
        return Err(Error::InvalidArgument(
            "canonical free energy needs T > 0 and at least one level".into(),
        ));
    }
    Ok(())
}

/// `F_N` of `n` fermions in `levels` (list each spin species separately).
pub fn free_fermion_free_energy(levels: &[f64], n: usize, t: f64) -> Result<f64> {
    check(levels, t)?;
    if n > levels.len() {
        return Err(Error::Sector(format!("{n} fermions do not fit in {} levels", levels.len())));
    }
    let mut le = vec![f64::NEG_INFINITY; n + 1];
    le[0] = 0.0;
    for &e in levels {
        let lx = -e / t;
        for j in (1..=n).rev() {
            le[j] = log_add(le[j], lx + le[j - 1]);
        }
    }
    Ok(-t * le[n])
}

/// `F_N` of `n` bosons in `levels`, without an occupation cutoff.
pub fn free_boson_free_energy(levels: &[f64], n: usize, t: f64) -> Result<f64> {
    check(levels, t)?;
    let mut lh = vec![f64::NEG_INFINITY; n + 1];
    lh[0] = 0.0;
    for &e in levels {
        let lx = -e / t;
        for j in 1..=n {
            lh[j] = log_add(lh[j], lx + lh[j - 1]);
        }
    }
    Ok(-t * lh[n])
}
