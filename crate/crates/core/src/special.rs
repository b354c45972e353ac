//! Error-function helpers.

pub use libm::{erf, erfc};

/// Scaled complementary error function `exp(x^2) erfc(x)`.
///
/// Stays finite where `exp(x^2)` alone would overflow.
pub fn erfcx(x: f64) -> f64 {
    if x < 0.0 {
        // erfc(-x) = 2 - erfc(x)
        return 2.0 * (x * x).exp() - erfcx(-x);
    }
    if x < 25.0 {
        return (x * x).exp() * erfc(x);
    }
    // Laplace continued fraction, evaluated bottom-up:
    // erfcx(x) = (1/sqrt(pi)) / (x + (1/2)/(x + 1/(x + (3/2)/(x + ...)))).
    let mut tail = x;
    for k in (1..=40).rev() {
        tail = x + (k as f64 / 2.0) / tail;
    }
    std::f64::consts::FRAC_2_SQRT_PI / 2.0 / tail
}
