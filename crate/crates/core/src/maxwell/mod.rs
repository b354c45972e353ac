//! Reconstruction of thermodynamic quantities from `<G2>`.
//!
//! Mixed second derivatives of `F(c, X)` commute, so for `Y = +-dF/dX`
//!
//! ```text
//! Y(c) = Y(c0) + integral_{c0}^{c} (+-dG2/dX) dc'
//! ```
//!
//! with the sign and any extra factor fixed by the kind of `Y`:
//!
//! | kind                      | `X`         | integrand over `c`          |
//! |---------------------------|-------------|-----------------------------|
//! | pressure `P`              | `V`         | `-dG2/dV`                   |
//! | entropy `S`               | `T`         | `-dG2/dT`                   |
//! | chemical potential `mu`   | `N`         | `+dG2/dN`                   |
//! | magnetization `m`         | `h`         | `-(1/V) dG2/dh`             |
//! | heat capacity `C_V`       | `T`         | `-T d^2G2/dT^2`             |
//! | inverse compressibility   | `V`         | `+V d^2G2/dV^2`             |
//!
//! The magnetization is `m = -V^-1 dF/dh`. For a field entering as
//! `+h sum_j S_j` this is minus the raw spin expectation per site.

mod diff;
mod direct;
mod grid;
mod savgol;

pub use diff::{differentiate, differentiate_series, differentiate_with, fornberg_weights, DiscreteScheme, GridAxis};
pub use direct::{direct_value, direct_values};
pub use grid::{sweep_g2, AxisName, G2Grid, SweepOptions, MAX_GRID_POINTS};
pub(crate) use grid::check_axis;
pub use savgol::savgol;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quadrature::cumulative_integral;

/// Thermodynamic quantity reconstructed from `<G2>`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ReconstructionKind {
    Pressure,
    Entropy,
    ChemicalPotential,
    Magnetization,
    HeatCapacity,
    InverseCompressibility,
}

impl ReconstructionKind {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::Pressure => "pressure",
            Self::Entropy => "entropy",
            Self::ChemicalPotential => "chemical_potential",
            Self::Magnetization => "magnetization",
            Self::HeatCapacity => "heat_capacity",
            Self::InverseCompressibility => "inverse_compressibility",
        }
    }

    /// Axes the kind can be reconstructed from.
    pub fn accepts(self, axis: AxisName) -> bool {
        match self {
            Self::Pressure | Self::InverseCompressibility => axis == AxisName::Sites,
            Self::Entropy | Self::HeatCapacity => axis == AxisName::Temperature,
            Self::ChemicalPotential => axis == AxisName::Particles,
            Self::Magnetization => matches!(axis, AxisName::Hx | AxisName::Hz),
        }
    }

    pub fn derivative_order(self) -> usize {
        match self {
            Self::HeatCapacity | Self::InverseCompressibility => 2,
            _ => 1,
        }
    }

    /// The lattice `mu` is `F(N+1) - F(N)`, matched by forward differences.
    pub fn default_scheme(self) -> DiscreteScheme {
        match self {
            Self::ChemicalPotential => DiscreteScheme::Forward,
            _ => DiscreteScheme::Central,
        }
    }

    /// Factor multiplying the `X` derivative of `<G2>` in the integrand.
    /// `x` is the value of `X` at which `Y` is reconstructed.
    pub fn prefactor(self, x: f64, volume: Option<f64>) -> Result<f64> {
        Ok(match self {
            Self::Pressure | Self::Entropy => -1.0,
            Self::ChemicalPotential => 1.0,
            Self::Magnetization => {
                let v = volume.ok_or_else(|| {
                    Error::InvalidArgument("magnetization needs the system size of the grid".into())
                })?;
                -1.0 / v
            }
            Self::HeatCapacity => -x,
            Self::InverseCompressibility => x,
        })
    }
}

impl std::str::FromStr for ReconstructionKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        serde_json::from_value(serde_json::Value::String(s.to_string()))
            .map_err(|_| Error::InvalidArgument(format!("unknown reconstruction kind '{s}'")))
    }
}

/// Where the integration starts.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AnchorPoint {
    Coupling(f64),
    /// `c0 -> infinity`, e.g. the Tonks-Girardeau limit.
    Infinite,
}

/// `Y(c0)` and where it came from.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Anchor {
    pub value: f64,
    pub provenance: String,
}

impl Anchor {
    pub fn new(value: f64, provenance: impl Into<String>) -> Self {
        Self {
            value,
            provenance: provenance.into(),
        }
    }
}

/// A reconstructed `Y(c)` with a per-point quadrature error estimate.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MaxwellResult {
    pub kind: ReconstructionKind,
    pub c_axis: Vec<f64>,
    pub y: Vec<f64>,
    pub c0: AnchorPoint,
    pub y_anchor: Anchor,
    pub err_est: Vec<f64>,
    /// The `X` value the reconstruction refers to, when it came from a grid.
    pub x_name: Option<AxisName>,
    pub x_value: Option<f64>,
}

impl MaxwellResult {
    /// `Y` at `c`, which must be on the axis.
    pub fn value_at(&self, c: f64) -> Option<f64> {
        grid::locate(&self.c_axis, c).map(|i| self.y[i])
    }
}

/// `Y(c_j) = anchor + int_{c0}^{c_j} integrand dc` on the given axis.
pub fn integrate_relation(
    kind: ReconstructionKind,
    c_axis: &[f64],
    integrand: &[f64],
    c0: f64,
    anchor: Anchor,
) -> Result<MaxwellResult> {
    grid::check_axis("c", c_axis)?;
    let a = grid::locate(c_axis, c0)
        .ok_or_else(|| Error::Axis(format!("c0 = {c0} is not on the c axis")))?;
    let integral = cumulative_integral(c_axis, integrand, a)?;
    let y = integral.values.iter().map(|v| anchor.value + v).collect();
    Ok(MaxwellResult {
        kind,
        c_axis: c_axis.to_vec(),
        y,
        c0: AnchorPoint::Coupling(c_axis[a]),
        y_anchor: anchor,
        err_est: integral.err,
        x_name: None,
        x_value: None,
    })
}

/// Options for [`reconstruct_with`].
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ReconstructOptions {
    /// Overrides the kind's default scheme on discrete axes.
    pub scheme: Option<DiscreteScheme>,
    /// Savitzky-Golay `(window, poly_order)` applied along `X` before
    /// differentiating. Off unless requested.
    pub smoothing: Option<(usize, usize)>,
}

/// Reconstructs `kind` at `X = at_x` from a `<G2>` grid.
pub fn reconstruct(
    kind: ReconstructionKind,
    grid: &G2Grid,
    c0: f64,
    anchor: Anchor,
    at_x: f64,
) -> Result<MaxwellResult> {
    reconstruct_with(kind, grid, c0, anchor, at_x, &ReconstructOptions::default())
}

pub fn reconstruct_with(
    kind: ReconstructionKind,
    grid: &G2Grid,
    c0: f64,
    anchor: Anchor,
    at_x: f64,
    options: &ReconstructOptions,
) -> Result<MaxwellResult> {
    if !kind.accepts(grid.x_name) {
        return Err(Error::Axis(format!(
            "{} cannot be reconstructed from a {} axis",
            kind.as_str(),
            grid.x_name
        )));
    }
    grid.c_index(c0)?;
    let ix = grid.x_index(at_x)?;
    let smoothed;
    let source = match options.smoothing {
        Some((window, order)) => {
            let mut g = grid.clone();
            let nx = g.x_axis.len();
            for ic in 0..g.c_axis.len() {
                let s = savgol(grid.row(ic), window, order)?;
                g.values[ic * nx..(ic + 1) * nx].copy_from_slice(&s);
            }
            smoothed = g;
            &smoothed
        }
        None => grid,
    };
    let scheme = options.scheme.unwrap_or(kind.default_scheme());
    let deriv = differentiate_with(source, GridAxis::X, kind.derivative_order(), scheme)?;
    let factor = kind.prefactor(grid.x_axis[ix], grid.volume)?;
    let integrand: Vec<f64> = deriv.column(ix).iter().map(|d| factor * d).collect();
    let mut result = integrate_relation(kind, &grid.c_axis, &integrand, c0, anchor)?;
    result.x_name = Some(grid.x_name);
    result.x_value = Some(grid.x_axis[ix]);
    Ok(result)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn synthetic() -> G2Grid {
        // F = -T ln 2 + c^2 T / 2  =>  G2 = c T,  S = ln 2 - c^2 / 2.
        let c: Vec<f64> = (0..21).map(|i| i as f64 * 0.1).collect();
        let t: Vec<f64> = (1..=5).map(|i| i as f64 * 0.5).collect();
        G2Grid::from_fn(c, AxisName::Temperature, t, |c, t| c * t).unwrap()
    }

    #[test]
    fn entropy_from_a_synthetic_free_energy() {
        let g = synthetic();
        let r = reconstruct(ReconstructionKind::Entropy, &g, 0.0, Anchor::new(2f64.ln(), "S(0)"), 1.5).unwrap();
        for (c, y) in r.c_axis.iter().zip(&r.y) {
            assert!((y - (2f64.ln() - c * c / 2.0)).abs() < 1e-12);
        }
        assert!(r.err_est.iter().all(|e| *e >= 0.0));
    }

    #[test]
    fn anchor_is_reproduced_exactly() {
        let g = synthetic();
        for c0 in [0.0, 0.7, 2.0] {
            let r = reconstruct(ReconstructionKind::Entropy, &g, c0, Anchor::new(0.123, "given"), 1.0).unwrap();
            assert_eq!(r.value_at(c0), Some(0.123));
        }
    }

    #[test]
    fn re_anchoring_gives_the_same_curve() {
        let c: Vec<f64> = (0..41).map(|i| i as f64 * 0.05).collect();
        let t: Vec<f64> = (1..=5).map(|i| i as f64 * 0.5).collect();
        let g = G2Grid::from_fn(c, AxisName::Temperature, t, |c, t| (c * t).sin()).unwrap();
        let kind = ReconstructionKind::Entropy;
        let a = reconstruct(kind, &g, 0.0, Anchor::new(1.0, "a"), 1.0).unwrap();
        let b_val = a.value_at(1.5).unwrap();
        let b = reconstruct(kind, &g, 1.5, Anchor::new(b_val, "from a"), 1.0).unwrap();
        for i in 0..a.y.len() {
            let tol = 2.0 * (a.err_est[i] + b.err_est[i]).max(1e-14);
            assert!((a.y[i] - b.y[i]).abs() <= tol, "i={i}: {} vs {}", a.y[i], b.y[i]);
        }
    }

    #[test]
    fn kind_axis_mismatch_rejected() {
        let g = synthetic();
        let err = reconstruct(ReconstructionKind::Pressure, &g, 0.0, Anchor::new(0.0, ""), 1.0);
        assert!(matches!(err, Err(Error::Axis(_))));
        let err = reconstruct(ReconstructionKind::Entropy, &g, 0.05, Anchor::new(0.0, ""), 1.0);
        assert!(err.is_err());
        assert!(reconstruct(ReconstructionKind::Entropy, &g, 0.0, Anchor::new(0.0, ""), 0.75).is_err());
    }

    #[test]
    fn magnetization_needs_a_volume() {
        let g = G2Grid::from_fn(vec![0.0, 0.5, 1.0], AxisName::Hx, vec![0.9, 1.0, 1.1], |c, h| c * h).unwrap();
        let anchor = Anchor::new(0.5, "free spins");
        assert!(reconstruct(ReconstructionKind::Magnetization, &g, 0.0, anchor.clone(), 1.0).is_err());
        let r = reconstruct(ReconstructionKind::Magnetization, &g.with_volume(2.0), 0.0, anchor, 1.0).unwrap();
        // m = 1/2 - int_0^c (c'/2) dc' = 1/2 - c^2/4
        assert!((r.y[2] - 0.25).abs() < 1e-12);
    }

    #[test]
    fn kinds_parse_from_strings() {
        assert_eq!("heat_capacity".parse::<ReconstructionKind>().unwrap(), ReconstructionKind::HeatCapacity);
        assert!("volume".parse::<ReconstructionKind>().is_err());
    }
}
