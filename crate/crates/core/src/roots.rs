//! Bracketed scalar root finding.

use crate::error::{Error, Result};

const MAX_ITERATIONS: usize = 200;

/// Root of a monotone `f` near `guess`.
///
/// Steps of size `step` (sign chosen from `f(guess)` assuming `f` increases)
/// grow the bracket until the sign changes; the Illinois variant of regula
/// falsi then shrinks it until `|f| <= ftol` or its width falls below `xtol`.
pub fn find_root(
    mut f: impl FnMut(f64) -> Result<f64>,
    guess: f64,
    step: f64,
    xtol: f64,
    ftol: f64,
    what: &'static str,
) -> Result<f64> {
    let mut a = guess;
    let mut fa = f(a)?;
    if fa == 0.0 {
        return Ok(a);
    }
    let step = if fa < 0.0 { step.abs() } else { -step.abs() };
    let mut b = a + step;
    let mut fb = f(b)?;
    let mut grow = 1.0;
    let mut iterations = 0;
    while fa.signum() == fb.signum() {
        iterations += 1;
        if iterations > MAX_ITERATIONS || !fb.is_finite() {
            return Err(Error::Convergence { what, iterations, residual: fb });
        }
        grow *= 1.5;
        a = b;
        fa = fb;
        b += step * grow;
        fb = f(b)?;
    }
    illinois(f, a, fa, b, fb, xtol, ftol, what)
}

/// Illinois iteration on a bracket with `fa`, `fb` of opposite sign.
#[allow(clippy::too_many_arguments)]
fn illinois(
    mut f: impl FnMut(f64) -> Result<f64>,
    mut a: f64,
    mut fa: f64,
    mut b: f64,
    mut fb: f64,
    xtol: f64,
    ftol: f64,
    what: &'static str,
) -> Result<f64> {
    let mut side = 0i8;
    let mut fs = fb;
    for _ in 0..MAX_ITERATIONS {
        let s = (a * fb - b * fa) / (fb - fa);
        fs = f(s)?;
        if fs.abs() <= ftol || (b - a).abs() <= xtol {
            return Ok(s);
        }
        if fs.signum() == fb.signum() {
            b = s;
            fb = fs;
            if side == -1 {
                fa /= 2.0;
            }
            side = -1;
        } else {
            a = s;
            fa = fs;
            if side == 1 {
                fb /= 2.0;
            }
            side = 1;
        }
    }
    Err(Error::Convergence { what, iterations: MAX_ITERATIONS, residual: fs })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cube_root() {
        let r = find_root(|x| Ok(x * x * x - 2.0), 0.0, 0.1, 1e-15, 1e-15, "cube root").unwrap();
        assert!((r - 2f64.cbrt()).abs() < 1e-14);
        let r = find_root(|x| Ok(x.exp() - 0.5), 3.0, 1.0, 1e-15, 0.0, "log").unwrap();
        assert!((r - 0.5f64.ln()).abs() < 1e-14);
    }

    #[test]
    fn no_root_is_reported() {
        assert!(find_root(|x| Ok(x * x + 1.0), 0.0, 1.0, 1e-12, 0.0, "none").is_err());
    }
}
