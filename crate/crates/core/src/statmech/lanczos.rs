//! Low-lying spectrum by Lanczos with full reorthogonalization.
//!
//! Each pass builds a Krylov space from a seeded random vector kept
//! orthogonal to every eigenvector already found, and locks the converged
//! Ritz pairs below the energy window. A single Krylov space sees only one
//! vector per degenerate eigenspace, so passes repeat until one of them
//! finds nothing new.

use faer::Mat;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::hilbert::SparseMatrix;

/// Controls for [`super::diagonalize_low_lying`].
#[derive(Clone, Debug, PartialEq)]
pub struct LowSpectrumOptions {
    /// Highest temperature the truncated spectrum must serve.
    pub max_temperature: f64,
    /// Window above the ground energy, in units of `max_temperature`, on top
    /// of `ln(dimension)`. Omitted states then carry total weight below
    /// `exp(-tail)`.
    pub tail: f64,
    /// Residual tolerance relative to the spectral scale.
    pub tolerance: f64,
    pub max_krylov: usize,
    pub max_passes: usize,
    pub seed: u64,
}

impl LowSpectrumOptions {
    pub fn for_temperature(max_temperature: f64) -> Self {
        Self {
            max_temperature,
            tail: 30.0,
            tolerance: 1e-11,
            max_krylov: 1500,
            max_passes: 64,
            seed: 0x5eed,
        }
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn axpy(alpha: f64, x: &[f64], y: &mut [f64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}

fn orthogonalize(w: &mut [f64], against: &[Vec<f64>]) {
    // Two rounds of classical Gram-Schmidt.
    for _ in 0..2 {
        for q in against {
            let p = dot(q, w);
            axpy(-p, q, w);
        }
    }
}

/// Eigen-decomposition of the symmetric tridiagonal matrix `(alpha, beta)`.
fn tridiagonal_eigen(alpha: &[f64], beta: &[f64]) -> (Vec<f64>, Mat<f64>) {
    let m = alpha.len();
    let t = Mat::from_fn(m, m, |i, j| {
        if i == j {
            alpha[i]
        } else if i == j + 1 || j == i + 1 {
            beta[i.min(j)]
        } else {
            0.0
        }
    });
    let eig = t.selfadjoint_eigendecomposition(faer::Side::Lower);
    let s = eig.s().column_vector();
    let vals = (0..m).map(|i| s.read(i)).collect();
    (vals, eig.u().to_owned())
}

struct Pass {
    vectors: Vec<(f64, Vec<f64>)>,
}

/// Runs one Krylov pass; returns converged Ritz pairs whose value lies
/// below `cutoff(e0)`, where `e0` is the lowest value seen so far.
fn krylov_pass(
    h: &SparseMatrix,
    locked: &[Vec<f64>],
    e0_known: Option<f64>,
    window: f64,
    options: &LowSpectrumOptions,
    rng: &mut ChaCha8Rng,
) -> Result<Pass> {
    let n = h.rows();
    let available = n - locked.len();
    let mut v: Vec<f64> = (0..n).map(|_| StandardNormal.sample(rng)).collect();
    orthogonalize(&mut v, locked);
    let norm = dot(&v, &v).sqrt();
    if norm < 1e-8 {
        return Ok(Pass { vectors: vec![] });
    }
    v.iter_mut().for_each(|x| *x /= norm);

    let mut q: Vec<Vec<f64>> = vec![v];
    let mut alpha: Vec<f64> = Vec::new();
    let mut beta: Vec<f64> = Vec::new();
    let mut w = vec![0.0; n];
    let mut next_check = 24usize;
    let limit = options.max_krylov.min(available);
    loop {
        let j = q.len() - 1;
        h.matvec(&q[j], &mut w);
        let a = dot(&q[j], &w);
        alpha.push(a);
        axpy(-a, &q[j], &mut w);
        if j > 0 {
            axpy(-beta[j - 1], &q[j - 1], &mut w);
        }
        orthogonalize(&mut w, locked);
        orthogonalize(&mut w, &q);
        let b = dot(&w, &w).sqrt();
        let scale = alpha.iter().chain(&beta).fold(1.0f64, |m, x| m.max(x.abs()));
        let exhausted = b <= 1e-12 * scale || q.len() >= limit;

        if exhausted || q.len() >= next_check {
            let (theta, y) = tridiagonal_eigen(&alpha, &beta);
            let m = theta.len();
            let e0 = e0_known.map_or(theta[0], |e| e.min(theta[0]));
            let cutoff = e0 + window;
            let tol = options.tolerance * scale.max(theta[m - 1].abs());
            let residual = |i: usize| if exhausted && b <= 1e-12 * scale { 0.0 } else { (b * y.read(m - 1, i)).abs() };
            let inside: Vec<usize> = (0..m).filter(|&i| theta[i] <= cutoff).collect();
            let all_converged = inside.iter().all(|&i| residual(i) <= tol);
            // The first Ritz value above the window must also have settled,
            // otherwise a level may still be descending into it.
            let guard = (0..m).find(|&i| theta[i] > cutoff);
            let guard_ok = guard.is_none_or(|i| residual(i) <= 1e-3 * window.max(tol));
            if (all_converged && guard_ok) || exhausted {
                if !all_converged {
                    let worst = inside.iter().map(|&i| residual(i)).fold(0.0, f64::max);
                    return Err(Error::Convergence {
                        what: "Lanczos low-lying spectrum",
                        iterations: m,
                        residual: worst,
                    });
                }
                let vectors = inside
                    .iter()
                    .map(|&i| {
                        let mut x = vec![0.0; n];
                        for (k, qk) in q.iter().enumerate() {
                            axpy(y.read(k, i), qk, &mut x);
                        }
                        let nx = dot(&x, &x).sqrt();
                        x.iter_mut().for_each(|v| *v /= nx);
                        (theta[i], x)
                    })
                    .collect();
                return Ok(Pass { vectors });
            }
            next_check = (next_check as f64 * 1.3).ceil() as usize;
        }
        beta.push(b);
        let mut next = vec![0.0; n];
        next.iter_mut().zip(&w).for_each(|(d, s)| *d = s / b);
        q.push(next);
    }
}

/// Eigenpairs with energy below `E0 + T_max (ln d + tail)`, ascending.
/// The flag reports whether the whole spectrum was found.
pub(crate) fn low_spectrum(
    h: &SparseMatrix,
    options: &LowSpectrumOptions,
) -> Result<(Vec<f64>, Vec<Vec<f64>>, bool)> {
    let n = h.rows();
    if !(options.max_temperature >= 0.0) || !options.max_temperature.is_finite() {
        return Err(Error::InvalidArgument(
            "a low-lying spectrum needs a finite maximum temperature".into(),
        ));
    }
    // The small floor keeps exactly degenerate ground levels together at T = 0.
    let window = options.max_temperature * ((n as f64).ln() + options.tail) + 1e-8;
    let mut rng = ChaCha8Rng::seed_from_u64(options.seed);
    let mut pairs: Vec<(f64, Vec<f64>)> = Vec::new();
    for _ in 0..options.max_passes {
        if pairs.len() == n {
            break;
        }
        let locked: Vec<Vec<f64>> = pairs.iter().map(|(_, v)| v.clone()).collect();
        let e0 = pairs.iter().map(|p| p.0).reduce(f64::min);
        let pass = krylov_pass(h, &locked, e0, window, options, &mut rng)?;
        let e0_new = pass.vectors.iter().map(|p| p.0).chain(e0).reduce(f64::min);
        let fresh: Vec<_> = pass
            .vectors
            .into_iter()
            .filter(|(e, _)| *e <= e0_new.unwrap() + window)
            .collect();
        if fresh.is_empty() {
            break;
        }
        pairs.extend(fresh);
    }
    // A lower ground energy found late can push early levels out of the window.
    let e0 = pairs.iter().map(|p| p.0).fold(f64::INFINITY, f64::min);
    pairs.retain(|(e, _)| *e <= e0 + window);
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    let complete = pairs.len() == n;
    let (values, vectors) = pairs.into_iter().unzip();
    Ok((values, vectors, complete))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn finds_degenerate_copies() {
        // diag(0, 0, 0, 1, 2, ...) mixed by nothing: three-fold ground level.
        let n = 40;
        let diag: Vec<f64> = (0..n).map(|i| if i < 3 { 0.0 } else { i as f64 }).collect();
        let h = SparseMatrix::from_triplets(n, n, diag.iter().enumerate().map(|(i, &d)| (i, i, d)).collect());
        let mut opts = LowSpectrumOptions::for_temperature(0.1);
        opts.tail = 1.0;
        let (vals, vecs, complete) = low_spectrum(&h, &opts).unwrap();
        assert!(!complete);
        let window = 0.1 * ((n as f64).ln() + 1.0);
        let expected = diag.iter().filter(|&&d| d <= window).count();
        assert_eq!(vals.len(), expected);
        assert_eq!(vals.iter().filter(|v| v.abs() < 1e-10).count(), 3);
        assert_eq!(vecs.len(), vals.len());
    }

    #[test]
    fn small_matrix_is_completed() {
        let h = SparseMatrix::from_triplets(
            3,
            3,
            vec![(0, 0, 1.0), (0, 1, 0.5), (1, 0, 0.5), (1, 1, -1.0), (2, 2, 3.0)],
        );
        let (vals, _, complete) = low_spectrum(&h, &LowSpectrumOptions::for_temperature(10.0)).unwrap();
        assert!(complete);
        assert!((vals[0] + 1.25f64.sqrt()).abs() < 1e-12);
    }
}
