use crate::error::{Error, Result};

/// Solves the small dense system `a x = b` by Gaussian elimination with
/// partial pivoting. `a` is row-major `n x n`.
fn solve(mut a: Vec<f64>, mut b: Vec<f64>) -> Option<Vec<f64>> {
    let n = b.len();
    for col in 0..n {
        let pivot = (col..n).max_by(|&i, &j| a[i * n + col].abs().total_cmp(&a[j * n + col].abs()))?;
        if a[pivot * n + col].abs() < 1e-300 {
            return None;
        }
        if pivot != col {
            for k in 0..n {
                a.swap(col * n + k, pivot * n + k);
            }
            b.swap(col, pivot);
        }
        for row in col + 1..n {
            let f = a[row * n + col] / a[col * n + col];
            for k in col..n {
                a[row * n + k] -= f * a[col * n + k];
            }
            b[row] -= f * b[col];
        }
    }
    let mut x = vec![0.0; n];
    for row in (0..n).rev() {
        let s: f64 = (row + 1..n).map(|k| a[row * n + k] * x[k]).sum();
        x[row] = (b[row] - s) / a[row * n + row];
    }
    Some(x)
}

/// Weights that evaluate, at offset `at`, the least-squares polynomial of
/// degree `order` through samples at offsets `0..window` (unit spacing).
fn savgol_weights(window: usize, order: usize, at: usize) -> Vec<f64> {
    let m = order + 1;
    let center = (window - 1) as f64 / 2.0;
    let scale = center.max(1.0);
    let t: Vec<f64> = (0..window).map(|j| (j as f64 - center) / scale).collect();
    let mut normal = vec![0.0; m * m];
    for &tj in &t {
        for p in 0..m {
            for q in 0..m {
                normal[p * m + q] += tj.powi((p + q) as i32);
            }
        }
    }
    let t_at = t[at];
    let rhs: Vec<f64> = (0..m).map(|p| t_at.powi(p as i32)).collect();
    // Symmetric normal matrix: weight_j = sum_p (N^-1 e(t_at))_p t_j^p.
    let coef = solve(normal, rhs).expect("Savitzky-Golay normal matrix is nonsingular");
    t.iter()
        .map(|&tj| coef.iter().enumerate().map(|(p, c)| c * tj.powi(p as i32)).sum())
        .collect()
}

/// Savitzky-Golay smoothing with a symmetric window. Near the ends the
/// window is shifted inward and the fitted polynomial is evaluated off
/// center, so polynomials of degree `<= poly_order` pass through unchanged.
pub fn savgol(series: &[f64], window: usize, poly_order: usize) -> Result<Vec<f64>> {
    let n = series.len();
    if window.is_multiple_of(2) {
        return Err(Error::InvalidArgument(format!("window must be odd, got {window}")));
    }
    if poly_order >= window {
        return Err(Error::InvalidArgument(format!(
            "polynomial order {poly_order} must be below the window {window}"
        )));
    }
    if window > n {
        return Err(Error::InvalidArgument(format!(
            "window {window} exceeds the series length {n}"
        )));
    }
    let half = window / 2;
    let central = savgol_weights(window, poly_order, half);
    let mut out = vec![0.0; n];
    for (i, o) in out.iter_mut().enumerate() {
        let (start, weights) = if i < half {
            (0, savgol_weights(window, poly_order, i))
        } else if i + half >= n {
            (n - window, savgol_weights(window, poly_order, i + window - n))
        } else {
            (i - half, central.clone())
        };
        *o = weights.iter().zip(&series[start..start + window]).map(|(w, v)| w * v).sum();
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use rand_distr::{Distribution, Normal};

    #[test]
    fn cubics_pass_through() {
        let y: Vec<f64> = (0..20).map(|i| {
            let x = i as f64 * 0.3 - 2.0;
            x * x * x - 2.0 * x + 0.5
        }).collect();
        let s = savgol(&y, 7, 3).unwrap();
        for (a, b) in s.iter().zip(&y) {
            assert!((a - b).abs() < 1e-10);
        }
        assert_eq!(savgol(&[2.0; 9], 5, 2).unwrap().iter().filter(|v| (*v - 2.0).abs() > 1e-14).count(), 0);
    }

    #[test]
    fn smooths_a_noisy_sine() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let noise = Normal::new(0.0, 0.01).unwrap();
        let clean: Vec<f64> = (0..101).map(|i| (i as f64 * 0.0628).sin()).collect();
        let noisy: Vec<f64> = clean.iter().map(|v| v + noise.sample(&mut rng)).collect();
        let s = savgol(&noisy, 11, 3).unwrap();
        let rms = (s.iter().zip(&clean).map(|(a, b)| (a - b).powi(2)).sum::<f64>() / 101.0).sqrt();
        assert!(rms < 0.01, "{rms}");
    }

    #[test]
    fn bad_parameters_rejected() {
        assert!(savgol(&[0.0; 10], 4, 2).is_err());
        assert!(savgol(&[0.0; 10], 5, 5).is_err());
        assert!(savgol(&[0.0; 3], 5, 2).is_err());
    }
}
