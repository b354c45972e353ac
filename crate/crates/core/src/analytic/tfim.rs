//! Exact zero-temperature transverse-field Ising chain (Pfeuty).
//!
//! Conventions match [`crate::models`]: `H = h_x sum Sx_i + c sum Sz_i Sz_{i+1}`
//! with spin-1/2 operators, so the Jordan-Wigner quasiparticle energy is
//! `h_x L_k` with
//!
//! ```text
//! L_k = sqrt(1 + (c/2h_x)^2 + (c/h_x) cos k)
//! ```
//!
//! and the quantum critical point sits at `|c| = 2 h_x`. Per site,
//!
//! ```text
//! e0       = -(h_x/2pi) int_0^pi L_k dk
//! G2       = de0/dc = -(1/4pi) int_0^pi (cos k + c/2h_x) / L_k dk
//! <Sx>     = de0/dh_x = -(1/2pi) int_0^pi (1 + (c/2h_x) cos k) / L_k dk
//! dG2/dh_x = (c/8pi h_x^2) int_0^pi sin^2 k / L_k^3 dk
//! ```
//!
//! The older literature form `sqrt(1 + (c/h_x)^2 + (c/h_x) cos k)` is kept as
//! [`tfim_lambda_k_printed`]; it is not the dispersion of this Hamiltonian.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::maxwell::{Anchor, AnchorPoint, MaxwellResult, ReconstructionKind};
use crate::quadrature::integrate;

/// `|c|/h_x` at the quantum critical point of the spin-1/2 chain.
pub const CRITICAL_RATIO: f64 = 2.0;

/// Order-parameter exponent of the 2D Ising universality class.
pub const BETA: f64 = 0.125;

/// Absolute tolerance of every `k` integral.
const K_TOLERANCE: f64 = 1e-12;

/// A coupling and transverse field.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TfimPoint {
    pub c: f64,
    pub h_x: f64,
    /// `|c| / h_x`.
    pub ratio: f64,
}

impl TfimPoint {
    pub fn new(c: f64, h_x: f64) -> Result<Self> {
        if !(h_x > 0.0) || !h_x.is_finite() || !c.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "need finite c and h_x > 0, got c = {c}, h_x = {h_x}"
            )));
        }
        Ok(Self { c, h_x, ratio: c.abs() / h_x })
    }

    /// `a = c / 2h_x`; the chain is critical at `|a| = 1`.
    fn a(&self) -> f64 {
        self.c / (2.0 * self.h_x)
    }
}

/// `L_k^2 = 1 + a^2 + 2a cos k`, written around the gap minimum
/// (`k = pi` for `a > 0`, `k = 0` for `a < 0`) so that it keeps full
/// relative precision near the critical point.
fn lambda_sq(a: f64, k: f64) -> f64 {
    if a >= 0.0 {
        (1.0 - a).powi(2) + 4.0 * a * (k / 2.0).cos().powi(2)
    } else {
        (1.0 + a).powi(2) - 4.0 * a * (k / 2.0).sin().powi(2)
    }
}

/// `cos k + a` in the same cancellation-free form.
fn cos_plus_a(a: f64, k: f64) -> f64 {
    if a >= 0.0 {
        (a - 1.0) + 2.0 * (k / 2.0).cos().powi(2)
    } else {
        (1.0 + a) - 2.0 * (k / 2.0).sin().powi(2)
    }
}

/// `1 + a cos k` in the same form.
fn one_plus_a_cos(a: f64, k: f64) -> f64 {
    if a >= 0.0 {
        (1.0 - a) + 2.0 * a * (k / 2.0).cos().powi(2)
    } else {
        (1.0 + a) - 2.0 * a * (k / 2.0).sin().powi(2)
    }
}

/// Quasiparticle energy `L_k` in units of `h_x`, clamped at zero.
pub fn tfim_lambda_k(p: &TfimPoint, k: f64) -> f64 {
    lambda_sq(p.a(), k).max(0.0).sqrt()
}

/// `sqrt(1 + (c/h_x)^2 + (c/h_x) cos k)`, the form found in the literature
/// this crate reproduces, clamped at zero.
pub fn tfim_lambda_k_printed(p: &TfimPoint, k: f64) -> f64 {
    let r = p.c / p.h_x;
    (1.0 + r * r + r * k.cos()).max(0.0).sqrt()
}

fn k_integral(f: impl FnMut(f64) -> f64) -> Result<f64> {
    Ok(integrate(f, 0.0, PI, K_TOLERANCE)?.value)
}

/// Ground-state energy per site.
pub fn tfim_energy(p: &TfimPoint) -> Result<f64> {
    Ok(-p.h_x / (2.0 * PI) * k_integral(|k| tfim_lambda_k(p, k))?)
}

/// Nearest-neighbour `<Sz_i Sz_{i+1}>`, i.e. `<G2>` per bond.
///
/// The two terms are integrated together: each is logarithmically large at
/// the critical point, their sum is not.
pub fn tfim_g2_exact(p: &TfimPoint) -> Result<f64> {
    let a = p.a();
    let v = k_integral(|k| {
        let l = tfim_lambda_k(p, k);
        if l == 0.0 {
            // (cos k + a) / L_k -> sign at the critical edge
            return cos_plus_a(a, k).signum();
        }
        cos_plus_a(a, k) / l
    })?;
    Ok(-v / (4.0 * PI))
}

/// `d<G2>/dh_x` per bond as the sum of two integrals, the derivative of
/// `1/L_k` weighted by `(cos k + c/2h_x)` and the explicit `h_x` dependence
/// of the prefactor. Diverges logarithmically at `|c| = 2h_x`.
pub fn tfim_dg2_dhx(p: &TfimPoint) -> Result<f64> {
    let (a, h) = (p.a(), p.h_x);
    if a == 0.0 {
        return Ok(0.0);
    }
    if a.abs() == 1.0 {
        return Ok(a.signum() * f64::INFINITY);
    }
    // dL_k^-1/dh_x = (c/2h^2)(cos k + a)/L_k^3
    let first = k_integral(|k| {
        let l = tfim_lambda_k(p, k);
        p.c / (2.0 * h * h) * cos_plus_a(a, k).powi(2) / (l * l * l)
    })?;
    let second = k_integral(|k| 1.0 / tfim_lambda_k(p, k))?;
    Ok(-first / (4.0 * PI) + p.c / (8.0 * PI * h * h) * second)
}

/// The same derivative from the single integrand `sin^2 k / L_k^3`.
pub fn tfim_dg2_dhx_compact(p: &TfimPoint) -> Result<f64> {
    let (a, h) = (p.a(), p.h_x);
    if a == 0.0 {
        return Ok(0.0);
    }
    if a.abs() == 1.0 {
        return Ok(a.signum() * f64::INFINITY);
    }
    let v = k_integral(|k| k.sin().powi(2) / tfim_lambda_k(p, k).powi(3))?;
    Ok(p.c / (8.0 * PI * h * h) * v)
}

/// Thermodynamic transverse magnetization per site, `-<Sx>/V`, which is
/// `+1/2` at `c = 0`.
pub fn tfim_mx_exact(p: &TfimPoint) -> Result<f64> {
    let a = p.a();
    let v = k_integral(|k| {
        let l = tfim_lambda_k(p, k);
        if l == 0.0 {
            return 0.0;
        }
        one_plus_a_cos(a, k) / l
    })?;
    Ok(v / (2.0 * PI))
}

/// `m_x(c)` from `dm_x/dc = -d<G2>/dh_x`, anchored at `m_x(0) = 1/2`.
///
/// `c_axis` must contain `0`. Each panel between neighbouring couplings is
/// integrated adaptively, which never samples the panel ends, so the axis
/// may run through the critical point where the integrand has a
/// logarithmic singularity.
pub fn tfim_mx_maxwell(h_x: f64, c_axis: &[f64]) -> Result<MaxwellResult> {
    TfimPoint::new(0.0, h_x)?;
    crate::maxwell::check_axis("c", c_axis)?;
    let anchor_index = c_axis
        .iter()
        .position(|&c| c == 0.0)
        .ok_or_else(|| Error::Axis("the c axis must contain the anchor c0 = 0".into()))?;
    let integrand = |c: f64| -> f64 {
        match TfimPoint::new(c, h_x).and_then(|p| tfim_dg2_dhx_compact(&p)) {
            Ok(v) if v.is_finite() => -v,
            // A node rounded onto the critical coupling; a single point.
            Ok(_) => 0.0,
            Err(_) => f64::NAN,
        }
    };
    let n = c_axis.len();
    let mut y = vec![0.5; n];
    let mut err = vec![0.0; n];
    let tol = 1e-10;
    for j in anchor_index + 1..n {
        let r = integrate(integrand, c_axis[j - 1], c_axis[j], tol)?;
        y[j] = y[j - 1] + r.value;
        err[j] = err[j - 1] + r.error.max(tol);
    }
    for j in (0..anchor_index).rev() {
        let r = integrate(integrand, c_axis[j + 1], c_axis[j], tol)?;
        y[j] = y[j + 1] + r.value;
        err[j] = err[j + 1] + r.error.max(tol);
    }
    Ok(MaxwellResult {
        kind: ReconstructionKind::Magnetization,
        c_axis: c_axis.to_vec(),
        y,
        c0: AnchorPoint::Coupling(0.0),
        y_anchor: Anchor::new(0.5, "free spins in a transverse field, |m_x| = 1/2"),
        err_est: err,
        x_name: Some(crate::maxwell::AxisName::Hx),
        x_value: Some(h_x),
    })
}

/// Longitudinal order parameter `(1 - (|c|/h_x)^-2)^(1/8)` for
/// `|c| > h_x`, else 0, in the normalization where it saturates at 1 and
/// the transition sits at `|c| = h_x`.
pub fn tfim_mz_exact(p: &TfimPoint) -> f64 {
    if p.ratio <= 1.0 {
        return 0.0;
    }
    (1.0 - p.ratio.powi(-2)).powf(BETA)
}

/// Order parameter of the spin-1/2 chain used throughout the crate:
/// `(1/2)(1 - (2h_x/|c|)^2)^(1/8)` above the transition at `|c| = 2h_x`.
pub fn tfim_mz_spin_half(p: &TfimPoint) -> f64 {
    let r = p.ratio / CRITICAL_RATIO;
    if r <= 1.0 {
        return 0.0;
    }
    0.5 * (1.0 - r.powi(-2)).powf(BETA)
}

/// Right-hand side of the log-log scaling law for `-d<G2>/dh` that follows
/// from [`tfim_mz_exact`] through the magnetization Maxwell relation:
///
/// ```text
/// -3 ln r - ln 4 + (beta - 1) ln(1 - r^-2),   r = |c|/h_x > 1
/// ```
pub fn scaling_log_rhs(ratio: f64, beta: f64) -> f64 {
    -3.0 * ratio.ln() - 4f64.ln() + (beta - 1.0) * (1.0 - ratio.powi(-2)).ln()
}

/// Worst relative mismatch between a central difference of
/// [`tfim_mz_exact`] in `c` and the exponentiated scaling law, over the
/// given ratios (all `> 1`).
pub fn maxwell_consistency(h_x: f64, ratios: &[f64]) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for &r in ratios {
        if !(r > 1.0) {
            return Err(Error::InvalidArgument(format!("ratio {r} is not above the transition")));
        }
        let c = r * h_x;
        let dc = 1e-4 * (c - h_x).min(c);
        let mz = |c: f64| TfimPoint::new(c, h_x).map(|p| tfim_mz_exact(&p));
        let fd = (mz(c + dc)? - mz(c - dc)?) / (2.0 * dc);
        let rhs = scaling_log_rhs(r, BETA).exp() / h_x;
        worst = worst.max((fd / rhs - 1.0).abs());
    }
    Ok(worst)
}

/// Diagnostics of a log-log regression.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FitDiagnostics {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
    pub points: usize,
}

/// Ordinary least squares `y = slope x + intercept`.
pub fn linear_fit(x: &[f64], y: &[f64]) -> Result<FitDiagnostics> {
    let n = x.len();
    if n != y.len() || n < 2 {
        return Err(Error::InvalidArgument("a fit needs at least two (x, y) pairs".into()));
    }
    let mx = x.iter().sum::<f64>() / n as f64;
    let my = y.iter().sum::<f64>() / n as f64;
    let sxx: f64 = x.iter().map(|v| (v - mx).powi(2)).sum();
    let syy: f64 = y.iter().map(|v| (v - my).powi(2)).sum();
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let spread = x.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if !(sxx > n as f64 * (1e-12 * spread).powi(2)) || spread == 0.0 {
        return Err(Error::InvalidArgument("degenerate regression: all abscissae are equal".into()));
    }
    let slope = sxy / sxx;
    let r_squared = if syy > 0.0 { sxy * sxy / (sxx * syy) } else { 1.0 };
    Ok(FitDiagnostics {
        slope,
        intercept: my - slope * mx,
        r_squared,
        points: n,
    })
}

/// `ratio - 1` log-spaced over `[1e-8, 0.05]`, 20 points.
///
/// The analytic corrections to pure power-law scaling bend the fitted slope
/// by about `-1.7 (ratio - 1)`; a lower end of `1e-4` biases beta to 0.116,
/// `1e-8` to 0.123.
pub fn default_ratio_axis() -> Vec<f64> {
    let (lo, hi, n) = (1e-8f64, 0.05f64, 20);
    (0..n)
        .map(|i| 1.0 + lo * (hi / lo).powf(i as f64 / (n - 1) as f64))
        .collect()
}

/// Extracts `beta` from the slope `beta - 1` of `ln(-d<G2>/dh)` against
/// `ln(|c|/h_x - 1)`, with the data taken from [`scaling_log_rhs`] at
/// `beta = 1/8`. Ratios must lie in `(1, 1.1]`, at least 10 of them.
pub fn critical_exponent_fit(h_x: f64, ratio_axis: &[f64]) -> Result<(f64, FitDiagnostics)> {
    if !(h_x > 0.0) {
        return Err(Error::InvalidArgument(format!("h_x must be positive, got {h_x}")));
    }
    if ratio_axis.len() < 10 {
        return Err(Error::Axis(format!("need at least 10 ratios, got {}", ratio_axis.len())));
    }
    if let Some(r) = ratio_axis.iter().find(|&&r| !(r > 1.0 && r <= 1.1)) {
        return Err(Error::Axis(format!("ratio {r} is outside (1, 1.1]")));
    }
    fit_scaling_window(h_x, ratio_axis)
}

/// The regression behind [`critical_exponent_fit`] without the window
/// restriction, for window-sensitivity scans.
pub fn fit_scaling_window(h_x: f64, ratio_axis: &[f64]) -> Result<(f64, FitDiagnostics)> {
    if let Some(r) = ratio_axis.iter().find(|&&r| !(r > 1.0)) {
        return Err(Error::Axis(format!("ratio {r} is not above the transition")));
    }
    // -dG2/dh = exp(rhs) / h_x; the 1/h_x only shifts the intercept.
    let x: Vec<f64> = ratio_axis.iter().map(|r| (r - 1.0).ln()).collect();
    let y: Vec<f64> = ratio_axis.iter().map(|&r| scaling_log_rhs(r, BETA) - h_x.ln()).collect();
    let fit = linear_fit(&x, &y)?;
    Ok((fit.slope + 1.0, fit))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pt(c: f64, h: f64) -> TfimPoint {
        TfimPoint::new(c, h).unwrap()
    }

    #[test]
    fn printed_dispersion_values() {
        for k in [0.0, 0.7, 2.0, PI] {
            assert_eq!(tfim_lambda_k_printed(&pt(0.0, 1.0), k), 1.0);
            assert_eq!(tfim_lambda_k(&pt(0.0, 1.0), k), 1.0);
        }
        assert!((tfim_lambda_k_printed(&pt(1.0, 1.0), PI) - 1.0).abs() < 1e-15);
        assert!((tfim_lambda_k_printed(&pt(-1.0, 1.0), 0.0) - 1.0).abs() < 1e-15);
        // Gapless at the critical edge.
        assert!(tfim_lambda_k(&pt(2.0, 1.0), PI) < 1e-15);
    }

    #[test]
    fn g2_limits() {
        assert!(tfim_g2_exact(&pt(0.0, 1.0)).unwrap().abs() < 1e-14);
        let strong = tfim_g2_exact(&pt(1e3, 1.0)).unwrap();
        assert!((strong + 0.25).abs() < 0.25 * 0.01);
        let ferro = tfim_g2_exact(&pt(-1e3, 1.0)).unwrap();
        assert!((ferro - 0.25).abs() < 0.25 * 0.01);
        assert!(tfim_g2_exact(&pt(-2.0, 1.0)).unwrap().is_finite());
    }

    #[test]
    fn g2_is_the_coupling_derivative_of_the_energy() {
        for (c, h) in [(0.7, 1.0), (-3.1, 1.3), (1.9, 0.8)] {
            let d = 1e-4;
            let fd = (tfim_energy(&pt(c + d, h)).unwrap() - tfim_energy(&pt(c - d, h)).unwrap()) / (2.0 * d);
            assert!((fd - tfim_g2_exact(&pt(c, h)).unwrap()).abs() < 1e-8);
            let fd = (tfim_energy(&pt(c, h + d)).unwrap() - tfim_energy(&pt(c, h - d)).unwrap()) / (2.0 * d);
            assert!((fd + tfim_mx_exact(&pt(c, h)).unwrap()).abs() < 1e-8);
        }
    }

    #[test]
    fn field_derivative_forms_agree() {
        assert_eq!(tfim_dg2_dhx(&pt(0.0, 1.0)).unwrap(), 0.0);
        let p = pt(0.5, 1.0);
        let d = 1e-4;
        let fd = (tfim_g2_exact(&pt(0.5, 1.0 + d)).unwrap() - tfim_g2_exact(&pt(0.5, 1.0 - d)).unwrap()) / (2.0 * d);
        let v = tfim_dg2_dhx(&p).unwrap();
        assert!((fd - v).abs() < 1e-7, "{fd} vs {v}");
        assert!((tfim_dg2_dhx_compact(&p).unwrap() - v).abs() < 1e-10);
        let near = tfim_dg2_dhx(&pt(0.99 * CRITICAL_RATIO, 1.0)).unwrap();
        let far = tfim_dg2_dhx(&pt(0.5 * CRITICAL_RATIO, 1.0)).unwrap();
        assert!(near.abs() > far.abs());
    }

    #[test]
    fn magnetization_route() {
        let axis: Vec<f64> = (0..=20).map(|i| -0.2 * i as f64).rev().collect();
        let m = tfim_mx_maxwell(1.0, &axis).unwrap();
        assert_eq!(m.value_at(0.0), Some(0.5));
        for (c, y) in m.c_axis.iter().zip(&m.y) {
            let exact = tfim_mx_exact(&pt(*c, 1.0)).unwrap();
            assert!((y - exact).abs() < 1e-8, "c = {c}: {y} vs {exact}");
        }
        // Monotone decreasing in |c|.
        assert!(m.y.windows(2).all(|w| w[1] > w[0]));
        let far = tfim_mx_exact(&pt(1e4, 1.0)).unwrap();
        assert!(far > 0.0 && far < 1e-3);
    }

    #[test]
    fn order_parameter_values() {
        assert_eq!(tfim_mz_exact(&pt(1.0, 1.0)), 0.0);
        assert!((tfim_mz_exact(&pt(2.0, 1.0)) - 0.75f64.powf(0.125)).abs() < 1e-15);
        assert!((tfim_mz_exact(&pt(2.0, 1.0)) - 0.964_68).abs() < 1e-5);
        assert!((tfim_mz_exact(&pt(-1e8, 1.0)) - 1.0).abs() < 1e-12);
        assert!((tfim_mz_spin_half(&pt(1e8, 1.0)) - 0.5).abs() < 1e-12);
    }

    #[test]
    fn scaling_law_is_consistent_with_the_order_parameter() {
        let ratios: Vec<f64> = (1..=50).map(|i| 1.0 + i as f64 / 50.0).collect();
        assert!(maxwell_consistency(1.0, &ratios).unwrap() < 1e-6);
        assert!(maxwell_consistency(0.7, &[1.001, 1.3]).unwrap() < 1e-6);
    }

    #[test]
    fn exponent_fit() {
        let (beta, fit) = critical_exponent_fit(1.0, &default_ratio_axis()).unwrap();
        assert!((beta - 0.125).abs() < 0.005, "{beta}");
        assert!(fit.r_squared > 0.999);
        let wide: Vec<f64> = (0..20).map(|i| 1.0 + 1e-3 * 500f64.powf(i as f64 / 19.0)).collect();
        let (drifted, _) = fit_scaling_window(1.0, &wide).unwrap();
        assert!((drifted - beta).abs() > 0.0);
        assert!(critical_exponent_fit(1.0, &[1.01; 12]).is_err());
        assert!(critical_exponent_fit(1.0, &wide).is_err());
    }

    #[test]
    fn pure_power_law_slope() {
        let x: Vec<f64> = (0..20).map(|i| (1e-4 * 1.3f64.powi(i)).ln()).collect();
        let y: Vec<f64> = x.iter().map(|x| -0.875 * x + 0.3).collect();
        let fit = linear_fit(&x, &y).unwrap();
        assert!((fit.slope + 0.875).abs() < 1e-10);
    }
}
