//! High-temperature Yang-Gaudin gas and the ideal Fermi gas reference.
//!
//! Units `hbar = m = k_B = 1`: `gamma = 2c/n`, `tau = 2T/n^2`. The pair
//! operator is `int n_up n_down dx`, so `<G2> = V n^2 g2(0) / 4`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quadrature::{cumulative_integral, integrate};
use crate::roots::find_root;
use crate::special::erfcx;

/// A Yang-Gaudin state point.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct YangGaudinPoint {
    pub gamma: f64,
    pub tau: f64,
    pub polarization: f64,
    pub n: f64,
    pub particles: f64,
    pub temperature: f64,
}

impl YangGaudinPoint {
    pub fn new(n: f64, particles: f64, c: f64, temperature: f64, polarization: f64) -> Result<Self> {
        if !(n > 0.0) || !(particles > 0.0) || !(temperature > 0.0) || !c.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "need n, N, T > 0 and finite c, got n = {n}, N = {particles}, T = {temperature}, c = {c}"
            )));
        }
        if !(polarization.abs() <= 1.0) {
            return Err(Error::InvalidArgument(format!("polarization {polarization} is outside [-1, 1]")));
        }
        Ok(Self {
            gamma: 2.0 * c / n,
            tau: 2.0 * temperature / (n * n),
            polarization,
            n,
            particles,
            temperature,
        })
    }

    pub fn c(&self) -> f64 {
        self.gamma * self.n / 2.0
    }

    pub fn volume(&self) -> f64 {
        self.particles / self.n
    }

    /// The expansion behind [`yg_g2`] needs `tau >> gamma^2`; this flags
    /// `tau >= 10 gamma^2`.
    pub fn is_high_temperature(&self) -> bool {
        self.tau >= 10.0 * self.gamma * self.gamma
    }

    fn with_c(&self, c: f64) -> Self {
        Self { gamma: 2.0 * c / self.n, ..*self }
    }

    fn with_temperature(&self, t: f64) -> Self {
        Self {
            tau: 2.0 * t / (self.n * self.n),
            temperature: t,
            ..*self
        }
    }
}

/// Local pair correlation `g2_updown(0)` at high temperature:
/// `(1 - P^2) {1 - sqrt(pi) x exp(x^2) erfc(x)}` with `x = gamma / sqrt(2 tau)`.
pub fn yg_g2(p: &YangGaudinPoint) -> f64 {
    let x = p.gamma / (2.0 * p.tau).sqrt();
    (1.0 - p.polarization * p.polarization) * (1.0 - PI.sqrt() * x * erfcx(x))
}

/// `<G2>` for the whole system.
pub fn yg_g2_total(p: &YangGaudinPoint) -> f64 {
    p.volume() * p.n * p.n * yg_g2(p) / 4.0
}

/// Tan's contact `C = c^2 n^2 g2(0) / 4`.
pub fn yg_contact(p: &YangGaudinPoint) -> Result<f64> {
    let c = p.c();
    if c == 0.0 {
        return Err(Error::InvalidArgument("the contact relation is degenerate at c = 0".into()));
    }
    Ok(c * c * p.n * p.n * yg_g2(p) / 4.0)
}

/// How [`yg_entropy`] is evaluated.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EntropyRoute {
    /// `S_IFG - N (1 - P^2) sqrt(pi / 2T^3) n c^2 / 16`.
    ClosedForm,
    /// `S_IFG - int_0^c d<G2>/dT dc'` with the full `yg_g2`.
    MaxwellNumeric,
}

/// Nodes of the Simpson grid in `c'`.
const ENTROPY_NODES: usize = 65;

/// Total entropy of `N` particles.
pub fn yg_entropy(p: &YangGaudinPoint, route: EntropyRoute) -> Result<f64> {
    let s0 = p.particles * ideal_fermi_entropy(p.temperature, p.n, p.polarization)?;
    Ok(s0 + yg_entropy_correction(p, route)?)
}

/// `S - S_IFG`.
pub fn yg_entropy_correction(p: &YangGaudinPoint, route: EntropyRoute) -> Result<f64> {
    let c = p.c();
    let t = p.temperature;
    let pol = 1.0 - p.polarization * p.polarization;
    match route {
        EntropyRoute::ClosedForm => {
            Ok(-p.particles * pol / 16.0 * (PI / (2.0 * t * t * t)).sqrt() * p.n * c * c)
        }
        EntropyRoute::MaxwellNumeric => {
            if c == 0.0 {
                return Ok(0.0);
            }
            let dt = 1e-3 * t;
            let cs: Vec<f64> = (0..ENTROPY_NODES)
                .map(|i| c * i as f64 / (ENTROPY_NODES - 1) as f64)
                .collect();
            let (cs, sign) = if c < 0.0 { (cs.into_iter().rev().collect::<Vec<_>>(), -1.0) } else { (cs, 1.0) };
            let integrand: Vec<f64> = cs
                .iter()
                .map(|&ci| {
                    let q = p.with_c(ci);
                    -(yg_g2_total(&q.with_temperature(t + dt)) - yg_g2_total(&q.with_temperature(t - dt)))
                        / (2.0 * dt)
                })
                .collect();
            let anchor = if sign > 0.0 { 0 } else { cs.len() - 1 };
            let end = if sign > 0.0 { cs.len() - 1 } else { 0 };
            Ok(cumulative_integral(&cs, &integrand, anchor)?.values[end])
        }
    }
}

/// `(n, u)` of one spin component at chemical potential `mu`; for
/// `mu < 0` the fugacity is factored out so the integrals stay O(1).
fn fermi_moments(mu: f64, t: f64) -> Result<(f64, f64)> {
    let kmax = (2.0 * (mu.max(0.0) + 60.0 * t)).sqrt();
    let scale = kmax * (1.0 + kmax * kmax);
    let tol = 1e-15 * scale;
    if mu < 0.0 {
        let z = (mu / t).exp();
        let w = |k: f64| {
            let b = (-k * k / (2.0 * t)).exp();
            b / (1.0 + z * b)
        };
        let j0 = integrate(w, 0.0, kmax, tol)?.value;
        let j1 = integrate(|k| k * k / 2.0 * w(k), 0.0, kmax, tol)?.value;
        Ok((z * j0 / PI, z * j1 / PI))
    } else {
        let f = |k: f64| 1.0 / (((k * k / 2.0 - mu) / t).exp() + 1.0);
        let j0 = integrate(f, 0.0, kmax, tol)?.value;
        let j1 = integrate(|k| k * k / 2.0 * f(k), 0.0, kmax, tol)?.value;
        Ok((j0 / PI, j1 / PI))
    }
}

/// Entropy per length of one component at density `n`:
/// `s = (3u - mu n) / T`, using `P = 2u` in one dimension.
fn component_entropy(t: f64, n: f64) -> Result<f64> {
    if n == 0.0 {
        return Ok(0.0);
    }
    let lambda = (2.0 * PI / t).sqrt();
    let kf = PI * n;
    let guess = if n * lambda < 1.0 { t * (n * lambda).ln() } else { kf * kf / 2.0 };
    let mu = find_root(
        |mu| fermi_moments(mu, t).map(|(m, _)| m.ln() - n.ln()),
        guess,
        t + 0.1 * kf * kf,
        1e-15 * (guess.abs() + t),
        1e-15,
        "ideal Fermi gas chemical potential",
    )?;
    let (_, u) = fermi_moments(mu, t)?;
    Ok((3.0 * u - mu * n) / t)
}

/// Entropy per particle of the two-component ideal Fermi gas with
/// `n_up,down = n (1 +- P) / 2`.
pub fn ideal_fermi_entropy(t: f64, n: f64, polarization: f64) -> Result<f64> {
    if !(t > 0.0) || !(n > 0.0) || !(polarization.abs() <= 1.0) {
        return Err(Error::InvalidArgument(format!(
            "need T > 0, n > 0, |P| <= 1, got T = {t}, n = {n}, P = {polarization}"
        )));
    }
    let up = component_entropy(t, n * (1.0 + polarization) / 2.0)?;
    let down = component_entropy(t, n * (1.0 - polarization) / 2.0)?;
    Ok((up + down) / n)
}

/// Mean-field pressure `P = c n^2`.
pub fn meanfield_pressure(c: f64, n: f64) -> Result<f64> {
    if !(c >= 0.0) {
        return Err(Error::InvalidArgument(format!("mean-field pressure needs c >= 0, got {c}")));
    }
    Ok(c * n * n)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pair_correlation_values() {
        let p = YangGaudinPoint::new(1.0, 10.0, 0.0, 2.0, 0.3).unwrap();
        assert!((yg_g2(&p) - 0.91).abs() < 1e-15);
        let p = YangGaudinPoint::new(1.0, 10.0, 0.4, 2.0, 1.0).unwrap();
        assert_eq!(yg_g2(&p), 0.0);
        // gamma^2 / 2 tau = 1, against a 40-digit evaluation.
        let p = YangGaudinPoint::new(2.0, 10.0, 1.0, 1.0, 0.0).unwrap();
        assert!((p.gamma * p.gamma / (2.0 * p.tau) - 1.0).abs() < 1e-15);
        assert!((yg_g2(&p) - 0.242_127_843_858_687_9).abs() < 1e-13);
        assert!((yg_contact(&p).unwrap() - 0.242_127_843_858_687_9).abs() < 1e-13);
        assert!(!p.is_high_temperature());
    }

    #[test]
    fn pair_correlation_bounds() {
        for &g in &[0.0, 1e-3, 0.1, 1.0, 10.0, 1e3, 1e6] {
            for &tau in &[1e-4, 0.1, 1.0, 50.0, 1e4] {
                for &pol in &[0.0, 0.5, -0.9] {
                    let p = YangGaudinPoint::new(1.0, 1.0, g / 2.0, tau / 2.0, pol).unwrap();
                    let v = yg_g2(&p);
                    assert!(v >= 0.0 && v <= 1.0 - pol * pol + 1e-15, "{g} {tau} {pol}: {v}");
                }
            }
        }
    }

    #[test]
    fn contact_round_trip() {
        let p = YangGaudinPoint::new(0.7, 5.0, 0.3, 3.0, 0.2).unwrap();
        let c = p.c();
        assert!((4.0 / (c * c * p.n * p.n) * yg_contact(&p).unwrap() - yg_g2(&p)).abs() < 1e-15);
        let p = YangGaudinPoint::new(0.7, 5.0, 0.0, 3.0, 0.2).unwrap();
        assert!(yg_contact(&p).is_err());
    }

    #[test]
    fn classical_limit_of_the_ideal_gas() {
        let (t, n) = (1e4, 1.0);
        let s = ideal_fermi_entropy(t, n, 0.0).unwrap();
        let lambda = (2.0 * PI / t).sqrt();
        let classical = 1.5 - (n / 2.0 * lambda).ln();
        assert!((s / classical - 1.0).abs() < 1e-3, "{s} vs {classical}");
    }

    #[test]
    fn third_law_and_component_reduction() {
        let s = ideal_fermi_entropy(1e-3, 1.0, 0.0).unwrap();
        assert!((0.0..1e-2).contains(&s), "{s}");
        // Sommerfeld in one dimension: S/N = pi^2 T / (6 eps_F), eps_F of one component.
        let eps_f = (PI * 0.5).powi(2) / 2.0;
        assert!((s / (PI * PI * 1e-3 / (6.0 * eps_f)) - 1.0).abs() < 1e-3, "{s}");
        let polarized = ideal_fermi_entropy(2.0, 0.8, 1.0).unwrap();
        let single = component_entropy(2.0, 0.8).unwrap() / 0.8;
        assert!((polarized - single).abs() < 1e-14);
    }

    #[test]
    fn entropy_routes() {
        let p = YangGaudinPoint::new(1.0, 20.0, 0.0, 25.0, 0.0).unwrap();
        let a = yg_entropy(&p, EntropyRoute::ClosedForm).unwrap();
        let b = yg_entropy(&p, EntropyRoute::MaxwellNumeric).unwrap();
        assert_eq!(a, b);
        // tau = 50, gamma = 0.2
        let q = YangGaudinPoint::new(1.0, 20.0, 0.1, 25.0, 0.0).unwrap();
        let a = yg_entropy(&q, EntropyRoute::ClosedForm).unwrap();
        let b = yg_entropy(&q, EntropyRoute::MaxwellNumeric).unwrap();
        assert!((a / b - 1.0).abs() < 0.01);
        let p = q.with_c(0.05);
        let ratio = yg_entropy_correction(&q, EntropyRoute::ClosedForm).unwrap()
            / yg_entropy_correction(&p, EntropyRoute::ClosedForm).unwrap();
        assert!((ratio - 4.0).abs() < 1e-12);
        let ratio = yg_entropy_correction(&q, EntropyRoute::MaxwellNumeric).unwrap()
            / yg_entropy_correction(&p, EntropyRoute::MaxwellNumeric).unwrap();
        assert!((ratio - 4.0).abs() < 0.1, "{ratio}");
    }

    #[test]
    fn leading_order_correction_is_sqrt2_larger_than_the_closed_form() {
        // With gamma = 2c/n the small-x expansion of g2 integrates to
        // sqrt(2) times the closed-form prefactor.
        let p = YangGaudinPoint::new(1.0, 20.0, 0.01, 500.0, 0.0).unwrap();
        let r = yg_entropy_correction(&p, EntropyRoute::MaxwellNumeric).unwrap()
            / yg_entropy_correction(&p, EntropyRoute::ClosedForm).unwrap();
        assert!((r - 2f64.sqrt()).abs() < 1e-3, "{r}");
    }

    #[test]
    fn mean_field() {
        assert_eq!(meanfield_pressure(0.0, 1.3).unwrap(), 0.0);
        assert_eq!(meanfield_pressure(0.5, 2.0).unwrap(), 4.0 * meanfield_pressure(0.5, 1.0).unwrap());
        assert!(meanfield_pressure(-1.0, 1.0).is_err());
    }
}
