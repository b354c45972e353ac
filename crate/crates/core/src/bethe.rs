//! Ground state of the Lieb-Liniger gas from the Lieb integral equation.
//!
//! With `hbar = m = 1` the ground-state energy is `E0 = V n^3 e(gamma) / 2`
//! with `gamma = 2c/n`. The quasi-momentum density `g(x)` on `[-1, 1]`
//! solves
//!
//! ```text
//! g(x) - (1/2pi) int_{-1}^{1} 2 lambda g(y) / (lambda^2 + (x-y)^2) dy = 1/2pi
//! ```
//!
//! and `gamma = lambda / int g`, `e = (gamma/lambda)^3 int x^2 g`.
//!
//! Derived quantities at fixed `N` (chain rule through `gamma ∝ V`):
//!
//! ```text
//! G2      = V n^2 e'
//! P       = n^3 (e - gamma e'/2)
//! 1/kappa = n^3 (3e - 2 gamma e' + gamma^2 e''/2)
//! dP/dc       = -dG2/dV      = n^2 (e' - gamma e'')
//! d(1/kappa)/dc = V d^2G2/dV^2 = n^2 (2e' - 2 gamma e'' + gamma^2 e''')
//! ```
//!
//! The Maxwell routes integrate the last two lines down from the
//! Tonks-Girardeau limit `c -> infinity`, where `P = pi^2 n^3 / 3` and
//! `1/kappa = pi^2 n^3`. The integral over `gamma` is mapped to
//! `u = 1/gamma`, which turns the semi-infinite range into `[0, 1/gamma]`
//! with a finite integrand at `u = 0`.

use std::f64::consts::PI;

use faer::prelude::SpSolver;
use faer::Mat;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::maxwell::{fornberg_weights, Anchor, AnchorPoint, MaxwellResult, ReconstructionKind};
use crate::quadrature::{cumulative_integral, gauss_legendre};
use crate::roots::find_root;

/// Default number of Gauss-Legendre nodes.
pub const DEFAULT_NODES: usize = 256;

/// Relative `lambda` step of the derivative stencil.
const STENCIL_STEP: f64 = 1e-3;

/// Solution of the Lieb equation at one coupling.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BetheSolution {
    pub gamma: f64,
    pub lambda: f64,
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
    /// `g` at the nodes.
    pub density: Vec<f64>,
    pub e: f64,
    pub de_dgamma: f64,
}

/// `e(gamma)` and its first three derivatives.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EnergyDerivatives {
    pub gamma: f64,
    pub e: f64,
    pub d1: f64,
    pub d2: f64,
    pub d3: f64,
}

struct LiebSystem {
    x: Vec<f64>,
    w: Vec<f64>,
}

struct AtLambda {
    gamma: f64,
    e: f64,
    density: Vec<f64>,
}

impl LiebSystem {
    fn new(nodes: usize) -> Result<Self> {
        if nodes < 64 {
            return Err(Error::InvalidArgument(format!("at least 64 nodes are needed, got {nodes}")));
        }
        let (x, w) = gauss_legendre(nodes);
        Ok(Self { x, w })
    }

    fn solve(&self, lambda: f64) -> Result<AtLambda> {
        let n = self.x.len();
        let a = Mat::from_fn(n, n, |i, j| {
            let d = self.x[i] - self.x[j];
            let k = 2.0 * lambda / (lambda * lambda + d * d) / (2.0 * PI);
            (if i == j { 1.0 } else { 0.0 }) - k * self.w[j]
        });
        let rhs = Mat::from_fn(n, 1, |_, _| 1.0 / (2.0 * PI));
        let g = a.partial_piv_lu().solve(&rhs);
        let density: Vec<f64> = (0..n).map(|i| g.read(i, 0)).collect();
        let norm: f64 = density.iter().zip(&self.w).map(|(g, w)| g * w).sum();
        let second: f64 = density
            .iter()
            .zip(&self.w)
            .zip(&self.x)
            .map(|((g, w), x)| g * w * x * x)
            .sum();
        let gamma = lambda / norm;
        if !gamma.is_finite() || !(norm > 0.0) {
            return Err(Error::Convergence {
                what: "Lieb equation linear solve",
                iterations: 1,
                residual: norm,
            });
        }
        Ok(AtLambda {
            gamma,
            e: (gamma / lambda).powi(3) * second,
            density,
        })
    }

    /// `lambda` with `gamma(lambda) = gamma`, found in `ln lambda`.
    fn lambda_for(&self, gamma: f64) -> Result<f64> {
        let guess = if gamma > 1.0 { gamma / PI } else { (PI * gamma).sqrt() / 2.0 };
        let s = find_root(
            |s| self.solve(s.exp()).map(|r| r.gamma.ln() - gamma.ln()),
            guess.ln(),
            0.5,
            1e-15,
            1e-15,
            "Lieb equation lambda",
        )?;
        Ok(s.exp())
    }

    /// Derivatives from a seven-point stencil in `lambda` around the root;
    /// `(gamma_k, e_k)` pairs share each solve, so no root error enters.
    fn derivatives(&self, gamma: f64) -> Result<(EnergyDerivatives, AtLambda, f64)> {
        let lambda = self.lambda_for(gamma)?;
        let mut gs = Vec::with_capacity(7);
        let mut es = Vec::with_capacity(7);
        let mut center = None;
        for k in -3i32..=3 {
            let r = self.solve(lambda * (1.0 + k as f64 * STENCIL_STEP))?;
            gs.push(r.gamma);
            es.push(r.e);
            if k == 0 {
                center = Some(r);
            }
        }
        let center = center.unwrap();
        let g0 = center.gamma;
        let d = |order| -> f64 {
            fornberg_weights(g0, &gs, order)
                .iter()
                .zip(&es)
                .map(|(w, e)| w * e)
                .sum()
        };
        let derivs = EnergyDerivatives {
            gamma: g0,
            e: center.e,
            d1: d(1),
            d2: d(2),
            d3: d(3),
        };
        Ok((derivs, center, lambda))
    }
}

fn check_gamma(gamma: f64) -> Result<()> {
    if !(gamma > 0.0) || !gamma.is_finite() {
        return Err(Error::InvalidArgument(format!("gamma must be positive and finite, got {gamma}")));
    }
    Ok(())
}

/// Solves the Lieb equation at coupling `gamma` on `nodes` Gauss-Legendre nodes.
pub fn solve_lieb_equation(gamma: f64, nodes: usize) -> Result<BetheSolution> {
    check_gamma(gamma)?;
    let sys = LiebSystem::new(nodes)?;
    let (d, center, lambda) = sys.derivatives(gamma)?;
    Ok(BetheSolution {
        gamma: d.gamma,
        lambda,
        nodes: sys.x,
        weights: sys.w,
        density: center.density,
        e: d.e,
        de_dgamma: d.d1,
    })
}

/// `e`, `e'`, `e''`, `e'''` at `gamma`.
pub fn energy_derivatives(gamma: f64, nodes: usize) -> Result<EnergyDerivatives> {
    check_gamma(gamma)?;
    Ok(LiebSystem::new(nodes)?.derivatives(gamma)?.0)
}

/// `e(gamma)` alone (one root solve, no stencil).
pub fn energy(gamma: f64, nodes: usize) -> Result<f64> {
    check_gamma(gamma)?;
    let sys = LiebSystem::new(nodes)?;
    Ok(sys.solve(sys.lambda_for(gamma)?)?.e)
}

/// Tonks-Girardeau pressure `pi^2 n^3 / 3`.
pub fn pressure_tonks(n: f64) -> f64 {
    PI * PI * n.powi(3) / 3.0
}

/// Tonks-Girardeau inverse compressibility `pi^2 n^3`.
pub fn inverse_compressibility_tonks(n: f64) -> f64 {
    PI * PI * n.powi(3)
}

fn check_density(n: f64) -> Result<()> {
    if !(n > 0.0) || !n.is_finite() {
        return Err(Error::InvalidArgument(format!("density must be positive, got {n}")));
    }
    Ok(())
}

/// `P = n^3 (e - gamma e'/2)`.
pub fn pressure_direct(n: f64, gamma: f64) -> Result<f64> {
    check_density(n)?;
    let d = energy_derivatives(gamma, DEFAULT_NODES)?;
    Ok(n.powi(3) * (d.e - d.gamma * d.d1 / 2.0))
}

/// Which route computes the inverse compressibility.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Route {
    Direct,
    Maxwell,
}

fn inverse_compressibility_direct(n: f64, d: &EnergyDerivatives) -> f64 {
    n.powi(3) * (3.0 * d.e - 2.0 * d.gamma * d.d1 + d.gamma * d.gamma * d.d2 / 2.0)
}

/// `1/kappa_T` at one coupling by either route.
pub fn inverse_compressibility(n: f64, gamma: f64, route: Route) -> Result<f64> {
    check_density(n)?;
    match route {
        Route::Direct => Ok(inverse_compressibility_direct(n, &energy_derivatives(gamma, DEFAULT_NODES)?)),
        Route::Maxwell => Ok(inverse_compressibility_maxwell(n, &[gamma])?.y[0]),
    }
}

/// Finest spacing in `u = 1/gamma` of the integration grid.
const U_SPACING: f64 = 1.0 / 128.0;

/// Which relation a Maxwell integral in `u` evaluates.
#[derive(Clone, Copy)]
enum Relation {
    Pressure,
    InverseCompressibility,
}

impl Relation {
    /// `(2/n^3) d Y/d gamma`, times `gamma^2` (the Jacobian of `u = 1/gamma`).
    fn integrand(self, d: &EnergyDerivatives) -> f64 {
        let g = d.gamma;
        let f = match self {
            Relation::Pressure => d.d1 - g * d.d2,
            Relation::InverseCompressibility => 2.0 * d.d1 - 2.0 * g * d.d2 + g * g * d.d3,
        };
        f * g * g
    }

    /// The integrand at `u = 0`, from `e = (pi^2/3)(1 - 4/gamma + 12/gamma^2 + ...)`.
    fn limit(self) -> f64 {
        match self {
            Relation::Pressure => 4.0 * PI * PI,
            Relation::InverseCompressibility => 16.0 * PI * PI,
        }
    }
}

fn maxwell_from_tonks(n: f64, gamma_axis: &[f64], relation: Relation) -> Result<MaxwellResult> {
    check_density(n)?;
    if gamma_axis.is_empty() {
        return Err(Error::Axis("gamma axis is empty".into()));
    }
    if gamma_axis.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::Axis("gamma axis must be strictly increasing".into()));
    }
    if gamma_axis[0] < 1.0 || !gamma_axis[gamma_axis.len() - 1].is_finite() {
        return Err(Error::Axis(format!(
            "the Tonks-Girardeau anchored route needs gamma >= 1, got {}",
            gamma_axis[0]
        )));
    }
    // u grid: 0, the targets, and fill points no further apart than U_SPACING.
    let mut targets: Vec<f64> = gamma_axis.iter().map(|g| 1.0 / g).collect();
    targets.reverse();
    let mut u = vec![0.0];
    for &t in &targets {
        let last = *u.last().unwrap();
        let pieces = ((t - last) / U_SPACING).ceil().max(1.0) as usize;
        for k in 1..=pieces {
            u.push(last + (t - last) * k as f64 / pieces as f64);
        }
        *u.last_mut().unwrap() = t;
    }
    let sys = LiebSystem::new(DEFAULT_NODES)?;
    let mut f: Vec<f64> = u[1..]
        .par_iter()
        .map(|&ui| sys.derivatives(1.0 / ui).map(|(d, _, _)| relation.integrand(&d)))
        .collect::<Result<_>>()?;
    f.insert(0, relation.limit());
    let integral = cumulative_integral(&u, &f, 0)?;

    let scale = n.powi(3) / 2.0;
    let (anchor, kind) = match relation {
        Relation::Pressure => (
            Anchor::new(pressure_tonks(n), "Tonks-Girardeau pressure pi^2 n^3 / 3"),
            ReconstructionKind::Pressure,
        ),
        Relation::InverseCompressibility => (
            Anchor::new(inverse_compressibility_tonks(n), "Tonks-Girardeau inverse compressibility pi^2 n^3"),
            ReconstructionKind::InverseCompressibility,
        ),
    };
    let mut y = Vec::with_capacity(gamma_axis.len());
    let mut err = Vec::with_capacity(gamma_axis.len());
    for g in gamma_axis {
        let j = u.iter().position(|&x| x == 1.0 / g).expect("target on the u grid");
        y.push(anchor.value - scale * integral.values[j]);
        err.push(scale * integral.err[j]);
    }
    Ok(MaxwellResult {
        kind,
        c_axis: gamma_axis.iter().map(|g| g * n / 2.0).collect(),
        y,
        c0: AnchorPoint::Infinite,
        y_anchor: anchor,
        err_est: err,
        x_name: None,
        x_value: None,
    })
}

/// Pressure along `gamma_axis` from the Maxwell relation, integrated down
/// from the Tonks-Girardeau limit. `c_axis` of the result holds `c = gamma n / 2`.
pub fn pressure_maxwell(n: f64, gamma_axis: &[f64]) -> Result<MaxwellResult> {
    maxwell_from_tonks(n, gamma_axis, Relation::Pressure)
}

/// Inverse compressibility along `gamma_axis` from the second-order
/// Maxwell relation, anchored at the Tonks-Girardeau limit.
pub fn inverse_compressibility_maxwell(n: f64, gamma_axis: &[f64]) -> Result<MaxwellResult> {
    maxwell_from_tonks(n, gamma_axis, Relation::InverseCompressibility)
}

/// One row of the `bethe` table.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BetheRow {
    pub gamma: f64,
    pub e: f64,
    pub de_dgamma: f64,
    pub pressure_direct: f64,
    pub pressure_maxwell: f64,
    pub inverse_compressibility_direct: f64,
    pub inverse_compressibility_maxwell: f64,
}

/// Both routes for pressure and inverse compressibility along `gamma_axis`.
pub fn bethe_table(n: f64, gamma_axis: &[f64]) -> Result<Vec<BetheRow>> {
    let p = pressure_maxwell(n, gamma_axis)?;
    let k = inverse_compressibility_maxwell(n, gamma_axis)?;
    let sys = LiebSystem::new(DEFAULT_NODES)?;
    let direct: Vec<EnergyDerivatives> = gamma_axis
        .par_iter()
        .map(|&g| sys.derivatives(g).map(|r| r.0))
        .collect::<Result<_>>()?;
    Ok(direct
        .iter()
        .enumerate()
        .map(|(i, d)| BetheRow {
            gamma: gamma_axis[i],
            e: d.e,
            de_dgamma: d.d1,
            pressure_direct: n.powi(3) * (d.e - d.gamma * d.d1 / 2.0),
            pressure_maxwell: p.y[i],
            inverse_compressibility_direct: inverse_compressibility_direct(n, d),
            inverse_compressibility_maxwell: k.y[i],
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn strong_coupling_expansion() {
        let g = 1e3;
        let e = energy(g, DEFAULT_NODES).unwrap();
        let asym = PI * PI / 3.0 * (1.0 - 4.0 / g + 12.0 / (g * g));
        assert!((e / asym - 1.0).abs() < 5e-3);
    }

    #[test]
    fn weak_coupling_is_mean_field() {
        let e = energy(0.01, DEFAULT_NODES).unwrap();
        assert!((e / 0.01 - 1.0).abs() < 0.05, "{e}");
    }

    #[test]
    fn density_profile_is_positive_and_even() {
        let s = solve_lieb_equation(3.0, 128).unwrap();
        assert!(s.density.iter().all(|&g| g > 0.0));
        let n = s.density.len();
        for i in 0..n {
            assert!((s.density[i] - s.density[n - 1 - i]).abs() < 1e-10);
        }
        assert!((s.gamma - 3.0).abs() < 1e-12);
        assert!(s.de_dgamma > 0.0 && s.de_dgamma < 1.0);
    }

    #[test]
    fn node_doubling_converges() {
        let a = energy(10.0, 256).unwrap();
        let b = energy(10.0, 512).unwrap();
        assert!((a - b).abs() < 1e-8);
    }

    #[test]
    fn hellmann_feynman_at_the_bethe_level() {
        let g = 5.0;
        let d = energy_derivatives(g, DEFAULT_NODES).unwrap();
        let h = 1e-3 * g;
        let fd = (energy(g + h, DEFAULT_NODES).unwrap() - energy(g - h, DEFAULT_NODES).unwrap()) / (2.0 * h);
        assert!((d.d1 - fd).abs() < 1e-6, "{} vs {fd}", d.d1);
    }

    #[test]
    fn pressure_limits() {
        let n = 1.3;
        let p = pressure_direct(n, 1e4).unwrap();
        assert!((p / pressure_tonks(n) - 1.0).abs() < 2e-3);
        let p = pressure_direct(n, 0.01).unwrap();
        assert!((p / (0.01 * n.powi(3) / 2.0) - 1.0).abs() < 0.05);
        let k = inverse_compressibility(n, 1e4, Route::Direct).unwrap();
        assert!((k / inverse_compressibility_tonks(n) - 1.0).abs() < 2e-3);
    }

    #[test]
    fn pressure_matches_volume_derivative_of_the_energy() {
        // E0(V) = N^3 e(2cV/N) / (2 V^2) at fixed N, c.
        let (nn, c, v) = (10.0f64, 4.0, 5.0);
        let e0 = |v: f64| nn.powi(3) * energy(2.0 * c * v / nn, DEFAULT_NODES).unwrap() / (2.0 * v * v);
        let dv = 1e-3;
        let p_fd = -(e0(v + dv) - e0(v - dv)) / (2.0 * dv);
        let p = pressure_direct(nn / v, 2.0 * c * v / nn).unwrap();
        assert!((p / p_fd - 1.0).abs() < 2e-3);
    }

    #[test]
    fn maxwell_route_rejects_weak_coupling() {
        assert!(pressure_maxwell(1.0, &[0.5, 2.0]).is_err());
        assert!(pressure_maxwell(1.0, &[2.0, 1.5]).is_err());
    }
}
