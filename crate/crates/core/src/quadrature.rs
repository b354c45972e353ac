//! Quadrature: Gauss-Legendre rules, adaptive Gauss-Kronrod and cumulative
//! Simpson integration on tabulated data with a Richardson error estimate.

use crate::error::{Error, Result};

/// Gauss-Legendre nodes and weights on `[-1, 1]`, nodes ascending.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            // Three-term recurrence for P_n and its derivative.
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            let pn = if n == 0 { 1.0 } else if n == 1 { x } else { p1 };
            let pm = if n == 1 { 1.0 } else { p0 };
            dp = n as f64 * (x * pn - pm) / (x * x - 1.0);
            let dx = pn / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_18,
    0.140_653_259_715_525_92,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_83,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

/// Kronrod value, Kronrod-Gauss difference and Kronrod value of `|f|`.
fn gk15(f: &mut impl FnMut(f64) -> f64, a: f64, b: f64) -> (f64, f64, f64) {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut kronrod = fc * WGK[7];
    let mut gauss = fc * WG[3];
    let mut abs = fc.abs() * WGK[7];
    for (j, (&x, &w)) in XGK[..7].iter().zip(&WGK[..7]).enumerate() {
        let (l, r) = (f(center - half * x), f(center + half * x));
        kronrod += w * (l + r);
        abs += w * (l.abs() + r.abs());
        if j % 2 == 1 {
            gauss += WG[j / 2] * (l + r);
        }
    }
    (kronrod * half, ((kronrod - gauss) * half).abs(), abs * half.abs())
}

/// Result of an adaptive integration.
#[derive(Clone, Copy, Debug)]
pub struct Integral {
    pub value: f64,
    pub error: f64,
}

/// Adaptive Gauss-Kronrod (7/15) integration of `f` over `[a, b]` to an
/// absolute tolerance.
///
/// Intervals are bisected until each one's Kronrod-Gauss difference falls
/// under its share of `tol`, or under the rounding floor of the panel.
pub fn integrate(mut f: impl FnMut(f64) -> f64, a: f64, b: f64, tol: f64) -> Result<Integral> {
    if a == b {
        return Ok(Integral { value: 0.0, error: 0.0 });
    }
    const MAX_INTERVALS: usize = 20_000;
    let width = (b - a).abs();
    let mut stack = vec![(a, b)];
    let (mut value, mut error) = (0.0, 0.0);
    let mut processed = 0;
    while let Some((lo, hi)) = stack.pop() {
        processed += 1;
        let (v, e, abs) = gk15(&mut f, lo, hi);
        let share = tol * (hi - lo).abs() / width;
        let tiny = (hi - lo).abs() < 1e-14 * width.max(1.0);
        // Below ~50 ulp of int |f| the difference is rounding noise.
        if e <= share.max(50.0 * f64::EPSILON * abs) || tiny {
            value += v;
            error += e;
        } else if processed > MAX_INTERVALS {
            return Err(Error::Convergence {
                what: "adaptive Gauss-Kronrod",
                iterations: processed,
                residual: e,
            });
        } else {
            let mid = 0.5 * (lo + hi);
            stack.push((mid, hi));
            stack.push((lo, mid));
        }
    }
    if !value.is_finite() {
        return Err(Error::Convergence {
            what: "adaptive Gauss-Kronrod (non-finite integrand)",
            iterations: processed,
            residual: f64::NAN,
        });
    }
    Ok(Integral { value, error })
}

/// `int_a^b` of the interpolating polynomial through `(xs, ys)` (up to four
/// points), by three-point Gauss-Legendre, which is exact here.
fn interp_integral(xs: &[f64], ys: &[f64], a: f64, b: f64) -> f64 {
    let n = xs.len();
    let mut dd = ys.to_vec();
    for level in 1..n {
        for i in (level..n).rev() {
            dd[i] = (dd[i] - dd[i - 1]) / (xs[i] - xs[i - level]);
        }
    }
    let eval = |t: f64| {
        let mut acc = dd[n - 1];
        for i in (0..n - 1).rev() {
            acc = acc * (t - xs[i]) + dd[i];
        }
        acc
    };
    let mid = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let g = (0.6f64).sqrt();
    half * (5.0 * eval(mid - g * half) + 8.0 * eval(mid) + 5.0 * eval(mid + g * half)) / 9.0
}

fn quadratic_integral(x: [f64; 3], y: [f64; 3], a: f64, b: f64) -> f64 {
    interp_integral(&x, &y, a, b)
}

/// Cumulative integral from `x[0]` by composite Simpson on (possibly
/// non-uniform) panels of two intervals. Odd nodes take the panel quadratic
/// integrated to the node; a trailing single interval uses the quadratic
/// through the last three points; two points fall back to the trapezoid.
fn cumulative_simpson(x: &[f64], y: &[f64]) -> Vec<f64> {
    let n = x.len();
    let mut out = vec![0.0; n];
    if n < 2 {
        return out;
    }
    if n == 2 {
        out[1] = 0.5 * (x[1] - x[0]) * (y[0] + y[1]);
        return out;
    }
    let mut i = 0;
    while i + 2 < n {
        let px = [x[i], x[i + 1], x[i + 2]];
        let py = [y[i], y[i + 1], y[i + 2]];
        out[i + 1] = out[i] + quadratic_integral(px, py, x[i], x[i + 1]);
        out[i + 2] = out[i] + quadratic_integral(px, py, x[i], x[i + 2]);
        i += 2;
    }
    if i + 1 < n {
        let px = [x[n - 3], x[n - 2], x[n - 1]];
        let py = [y[n - 3], y[n - 2], y[n - 1]];
        out[n - 1] = out[n - 2] + quadratic_integral(px, py, x[n - 2], x[n - 1]);
    }
    out
}

fn cumulative_trapezoid(x: &[f64], y: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; x.len()];
    for i in 1..x.len() {
        out[i] = out[i - 1] + 0.5 * (x[i] - x[i - 1]) * (y[i] + y[i - 1]);
    }
    out
}

/// Definite integrals `int_{x[anchor]}^{x[j]} y dx` for every node `j`.
#[derive(Clone, Debug, PartialEq)]
pub struct CumulativeIntegral {
    pub values: Vec<f64>,
    /// Non-negative error estimate per node; zero at the anchor.
    pub err: Vec<f64>,
}

/// Integrates tabulated `y(x)` from the node `anchor` to every node.
///
/// The error estimate compares the grid against its half-resolution
/// subgrid (every second node): Simpson's `O(h^4)` error makes
/// `(fine - coarse) / 15` an estimate of the fine-grid error. Grids too
/// short for a subgrid compare against the trapezoid rule instead. The
/// estimate never decreases moving away from the anchor and carries a
/// floating-point floor proportional to `int |y|`.
pub fn cumulative_integral(x: &[f64], y: &[f64], anchor: usize) -> Result<CumulativeIntegral> {
    let n = x.len();
    if n == 0 || y.len() != n {
        return Err(Error::InvalidArgument(format!(
            "abscissae ({n}) and ordinates ({}) must be non-empty and equally long",
            y.len()
        )));
    }
    if anchor >= n {
        return Err(Error::InvalidArgument(format!("anchor index {anchor} out of range")));
    }
    if x.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::Axis("integration abscissae must be strictly increasing".into()));
    }
    if y.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidArgument("non-finite integrand value".into()));
    }
    let fine = cumulative_simpson(x, y);

    // Signed error estimate relative to x[0].
    let signed: Vec<f64> = if n >= 5 {
        let xc: Vec<f64> = x.iter().step_by(2).copied().collect();
        let yc: Vec<f64> = y.iter().step_by(2).copied().collect();
        let coarse = cumulative_simpson(&xc, &yc);
        let mut e = vec![0.0; n];
        for (m, c) in coarse.iter().enumerate() {
            e[2 * m] = (fine[2 * m] - c) / 15.0;
        }
        // Coarse values at its own odd nodes are half-panel integrals with a
        // lower order; interpolate between whole coarse panels instead.
        for j in (2..n).step_by(4) {
            if j + 2 < n {
                e[j] = 0.5 * (e[j - 2] + e[j + 2]);
            }
        }
        for j in (1..n).step_by(2) {
            e[j] = if j + 1 < n { 0.5 * (e[j - 1] + e[j + 1]) } else { e[j - 1] };
        }
        e
    } else {
        let trap = cumulative_trapezoid(x, y);
        fine.iter().zip(&trap).map(|(f, t)| f - t).collect()
    };

    let abs_y: Vec<f64> = y.iter().map(|v| v.abs()).collect();
    let magnitude = cumulative_trapezoid(x, &abs_y);
    let floor = 64.0 * f64::EPSILON;

    // Odd nodes end inside a Simpson panel; compare the half-panel quadratic
    // with a cubic through one more neighbour.
    let mut local = vec![0.0; n];
    if n >= 4 {
        for j in (1..n).step_by(2) {
            let i = j - 1;
            if i + 2 >= n {
                continue;
            }
            let lo = if i + 3 < n { i } else { i - 1 };
            let quad = fine[j] - fine[i];
            let cubic = interp_integral(&x[lo..lo + 4], &y[lo..lo + 4], x[i], x[j]);
            local[j] = (quad - cubic).abs();
        }
    }

    let values: Vec<f64> = fine.iter().map(|v| v - fine[anchor]).collect();
    let mut err = vec![0.0; n];
    let mut running = 0.0f64;
    for j in anchor + 1..n {
        running = running.max((signed[j] - signed[anchor]).abs());
        err[j] = running + local[j] + local[anchor] + floor * (magnitude[j] - magnitude[anchor]);
    }
    running = 0.0;
    for j in (0..anchor).rev() {
        running = running.max((signed[j] - signed[anchor]).abs());
        err[j] = running + local[j] + local[anchor] + floor * (magnitude[anchor] - magnitude[j]);
    }
    let mut values = values;
    values[anchor] = 0.0;
    Ok(CumulativeIntegral { values, err })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gauss_legendre_integrates_polynomials() {
        for n in [1, 2, 5, 16, 64, 256] {
            let (x, w) = gauss_legendre(n);
            let total: f64 = w.iter().sum();
            assert!((total - 2.0).abs() < 1e-13, "n={n}");
            assert!(x.windows(2).all(|p| p[0] < p[1]));
            if n >= 3 {
                let m4: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(4)).sum();
                assert!((m4 - 0.4).abs() < 1e-13, "n={n}");
            }
        }
    }

    #[test]
    fn gauss_kronrod_rules_are_exact_on_polynomials() {
        let mut cubic = |x: f64| x.powi(3) - 2.0 * x + 1.0;
        let (v, _, _) = gk15(&mut cubic, 0.0, 2.0);
        assert!((v - 2.0).abs() < 1e-14);
        // Gauss 7 is exact to degree 13, so the error estimate vanishes.
        let mut deg12 = |x: f64| x.powi(12);
        let (v, e, _) = gk15(&mut deg12, -1.0, 1.0);
        assert!((v - 2.0 / 13.0).abs() < 1e-14);
        assert!(e < 1e-14);
    }

    #[test]
    fn adaptive_integration_handles_peaks() {
        let r = integrate(|x| 1.0 / (1e-4 + x * x), -1.0, 1.0, 1e-10).unwrap();
        let exact = 2.0 * (1.0f64 / 1e-2).atan() / 1e-2;
        assert!((r.value - exact).abs() < 1e-8, "{} vs {exact}", r.value);
        let r = integrate(|x: f64| x.cos(), 0.0, std::f64::consts::PI, 1e-12).unwrap();
        assert!(r.value.abs() < 1e-12);
    }

    #[test]
    fn simpson_is_exact_for_cubics_on_uniform_grids() {
        let x: Vec<f64> = (0..11).map(|i| i as f64 * 0.3).collect();
        let y: Vec<f64> = x.iter().map(|x| x * x * x - x).collect();
        let r = cumulative_integral(&x, &y, 0).unwrap();
        for (j, xj) in x.iter().enumerate().step_by(2) {
            let exact = xj.powi(4) / 4.0 - xj * xj / 2.0;
            assert!((r.values[j] - exact).abs() < 1e-12);
        }
    }

    #[test]
    fn quadratics_exact_on_any_grid_and_anchor() {
        let x = [0.0, 0.1, 0.35, 0.4, 0.9, 1.0, 1.7];
        let y: Vec<f64> = x.iter().map(|x| 3.0 * x * x - x + 2.0).collect();
        let prim = |x: f64| x.powi(3) - x * x / 2.0 + 2.0 * x;
        for anchor in 0..x.len() {
            let r = cumulative_integral(&x, &y, anchor).unwrap();
            assert_eq!(r.values[anchor], 0.0);
            assert_eq!(r.err[anchor], 0.0);
            for j in 0..x.len() {
                assert!((r.values[j] - (prim(x[j]) - prim(x[anchor]))).abs() < 1e-12);
                assert!(r.err[j] >= 0.0);
            }
        }
    }

    #[test]
    fn halving_the_grid_cuts_the_error_sixteenfold() {
        let err_at = |n: usize| {
            let x: Vec<f64> = (0..=n).map(|i| i as f64 / n as f64 * 2.0).collect();
            let y: Vec<f64> = x.iter().map(|x| x.exp()).collect();
            let r = cumulative_integral(&x, &y, 0).unwrap();
            ((r.values[n] - (2f64.exp() - 1.0)).abs(), r.err[n])
        };
        let (e1, est1) = err_at(16);
        let (e2, _) = err_at(32);
        let ratio = e1 / e2;
        assert!((ratio - 16.0).abs() < 1.0, "ratio {ratio}");
        assert!(est1 > 0.5 * e1 && est1 < 2.0 * e1, "estimate {est1} vs {e1}");
    }

    #[test]
    fn two_points_use_trapezoid() {
        let r = cumulative_integral(&[0.0, 1.0], &[1.0, 3.0], 1).unwrap();
        assert_eq!(r.values, vec![-2.0, 0.0]);
    }

    #[test]
    fn rejects_bad_axes() {
        assert!(cumulative_integral(&[0.0, 0.0], &[1.0, 1.0], 0).is_err());
        assert!(cumulative_integral(&[0.0, 1.0], &[1.0], 0).is_err());
        assert!(cumulative_integral(&[0.0, 1.0], &[1.0, 2.0], 2).is_err());
    }
}
