use serde::{Deserialize, Serialize};

use super::grid::G2Grid;
use crate::error::{Error, Result};

/// Finite-difference weights for the `order`-th derivative at `z` from
/// arbitrary distinct nodes (Fornberg's recursion).
pub fn fornberg_weights(z: f64, nodes: &[f64], order: usize) -> Vec<f64> {
    let n = nodes.len();
    let mut c = vec![vec![0.0; order + 1]; n];
    let mut c1 = 1.0;
    let mut c4 = nodes[0] - z;
    c[0][0] = 1.0;
    for i in 1..n {
        let mn = i.min(order);
        let mut c2 = 1.0;
        let c5 = c4;
        c4 = nodes[i] - z;
        for j in 0..i {
            let c3 = nodes[i] - nodes[j];
            c2 *= c3;
            if j == i - 1 {
                for k in (1..=mn).rev() {
                    c[i][k] = c1 * (k as f64 * c[i - 1][k - 1] - c5 * c[i - 1][k]) / c2;
                }
                c[i][0] = -c1 * c5 * c[i - 1][0] / c2;
            }
            for k in (1..=mn).rev() {
                c[j][k] = (c4 * c[j][k] - k as f64 * c[j][k - 1]) / c3;
            }
            c[j][0] = c4 * c[j][0] / c3;
        }
        c1 = c2;
    }
    c.into_iter().map(|row| row[order]).collect()
}

/// Difference scheme on a discrete axis.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DiscreteScheme {
    /// `[f(N+1) - f(N-1)] / 2`, one-sided at the ends.
    #[default]
    Central,
    /// `f(N+1) - f(N)`, backward at the last point.
    Forward,
}

/// Which grid axis to differentiate along.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GridAxis {
    C,
    X,
}

fn stencil_derivative(x: &[f64], y: &[f64], i: usize, lo: usize, len: usize, order: usize) -> f64 {
    let w = fornberg_weights(x[i], &x[lo..lo + len], order);
    w.iter().zip(&y[lo..lo + len]).map(|(w, v)| w * v).sum()
}

/// Derivative of tabulated `y(x)` of order 1 or 2.
///
/// Continuous axes use three-point stencils (central in the interior,
/// one-sided at the ends, four points at the ends for order 2) and need at
/// least 3 (order 1) or 5 (order 2) points. Discrete axes use unit
/// differences per `scheme`.
pub fn differentiate_series(
    x: &[f64],
    y: &[f64],
    order: usize,
    discrete: Option<DiscreteScheme>,
) -> Result<Vec<f64>> {
    let n = x.len();
    if y.len() != n {
        return Err(Error::InvalidArgument("abscissae and ordinates differ in length".into()));
    }
    if !(1..=2).contains(&order) {
        return Err(Error::InvalidArgument(format!("derivative order must be 1 or 2, got {order}")));
    }
    let needed = match (discrete, order) {
        (Some(_), 1) => 2,
        (Some(_), _) => 3,
        (None, 1) => 3,
        (None, _) => 5,
    };
    if n < needed {
        return Err(Error::Axis(format!(
            "order-{order} derivative needs at least {needed} points, axis has {n}"
        )));
    }
    let out = (0..n)
        .map(|i| match (discrete, order) {
            (Some(DiscreteScheme::Forward), 1) => {
                let j = if i + 1 < n { i } else { i - 1 };
                (y[j + 1] - y[j]) / (x[j + 1] - x[j])
            }
            (Some(DiscreteScheme::Central), 1) => {
                if i == 0 {
                    (y[1] - y[0]) / (x[1] - x[0])
                } else if i + 1 == n {
                    (y[i] - y[i - 1]) / (x[i] - x[i - 1])
                } else {
                    (y[i + 1] - y[i - 1]) / (x[i + 1] - x[i - 1])
                }
            }
            (Some(_), _) => {
                let lo = i.saturating_sub(1).min(n - 3);
                stencil_derivative(x, y, i, lo, 3, 2)
            }
            (None, 1) => {
                let lo = i.saturating_sub(1).min(n - 3);
                stencil_derivative(x, y, i, lo, 3, 1)
            }
            (None, _) => {
                if i == 0 {
                    stencil_derivative(x, y, i, 0, 4, 2)
                } else if i + 1 == n {
                    stencil_derivative(x, y, i, n - 4, 4, 2)
                } else {
                    stencil_derivative(x, y, i, i - 1, 3, 2)
                }
            }
        })
        .collect();
    Ok(out)
}

/// Derivative of a grid along one axis; discrete axes use central differences.
pub fn differentiate(grid: &G2Grid, axis: GridAxis, order: usize) -> Result<G2Grid> {
    differentiate_with(grid, axis, order, DiscreteScheme::Central)
}

/// [`differentiate`] with an explicit scheme for discrete axes.
pub fn differentiate_with(
    grid: &G2Grid,
    axis: GridAxis,
    order: usize,
    scheme: DiscreteScheme,
) -> Result<G2Grid> {
    grid.validate()?;
    let (nc, nx) = (grid.c_axis.len(), grid.x_axis.len());
    let mut values = vec![0.0; nc * nx];
    match axis {
        GridAxis::X => {
            let discrete = grid.x_name.is_discrete().then_some(scheme);
            for ic in 0..nc {
                let d = differentiate_series(&grid.x_axis, grid.row(ic), order, discrete)?;
                values[ic * nx..(ic + 1) * nx].copy_from_slice(&d);
            }
        }
        GridAxis::C => {
            for ix in 0..nx {
                let d = differentiate_series(&grid.c_axis, &grid.column(ix), order, None)?;
                for (ic, v) in d.into_iter().enumerate() {
                    values[ic * nx + ix] = v;
                }
            }
        }
    }
    Ok(G2Grid { values, ..grid.clone() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::maxwell::AxisName;

    #[test]
    fn fornberg_reproduces_textbook_stencils() {
        let w = fornberg_weights(0.0, &[-1.0, 0.0, 1.0], 1);
        assert_eq!(w, vec![-0.5, 0.0, 0.5]);
        let w = fornberg_weights(0.0, &[-1.0, 0.0, 1.0], 2);
        assert_eq!(w, vec![1.0, -2.0, 1.0]);
        let w = fornberg_weights(0.0, &[0.0, 1.0, 2.0], 1);
        assert_eq!(w, vec![-1.5, 2.0, -0.5]);
    }

    #[test]
    fn constant_grid_has_zero_derivative() {
        let g = G2Grid::from_fn(vec![0.0, 1.0, 2.0], AxisName::Temperature, vec![0.1, 0.2, 0.5, 0.9, 1.4], |_, _| 3.0)
            .unwrap();
        for axis in [GridAxis::C, GridAxis::X] {
            let d = differentiate(&g, axis, 1).unwrap();
            assert!(d.values.iter().all(|v| v.abs() < 1e-12));
        }
    }

    #[test]
    fn second_derivative_of_a_quadratic() {
        let t: Vec<f64> = (0..9).map(|i| 0.2 + 0.15 * i as f64 + 0.01 * (i * i) as f64).collect();
        let g = G2Grid::from_fn(vec![0.0], AxisName::Temperature, t, |_, t| t * t).unwrap();
        let d = differentiate(&g, GridAxis::X, 2).unwrap();
        for v in &d.values {
            assert!((v - 2.0).abs() < 1e-8, "{v}");
        }
    }

    #[test]
    fn discrete_schemes() {
        let n = vec![1.0, 2.0, 3.0, 4.0];
        let y = vec![1.0, 4.0, 9.0, 16.0];
        let c = differentiate_series(&n, &y, 1, Some(DiscreteScheme::Central)).unwrap();
        assert_eq!(c, vec![3.0, 4.0, 6.0, 7.0]);
        let f = differentiate_series(&n, &y, 1, Some(DiscreteScheme::Forward)).unwrap();
        assert_eq!(f, vec![3.0, 5.0, 7.0, 7.0]);
        let s = differentiate_series(&n, &y, 2, Some(DiscreteScheme::Central)).unwrap();
        assert!(s.iter().all(|v| (v - 2.0).abs() < 1e-12));
    }

    #[test]
    fn second_order_equals_repeated_first_order() {
        let err_at = |m: usize| {
            let x: Vec<f64> = (0..=m).map(|i| i as f64 / m as f64).collect();
            let y: Vec<f64> = x.iter().map(|x| (2.0 * x).sin()).collect();
            let d2 = differentiate_series(&x, &y, 2, None).unwrap();
            let d1 = differentiate_series(&x, &y, 1, None).unwrap();
            let d11 = differentiate_series(&x, &d1, 1, None).unwrap();
            (2..m - 1).map(|i| (d2[i] - d11[i]).abs()).fold(0.0, f64::max)
        };
        let ratio = err_at(40) / err_at(80);
        assert!(ratio > 3.0 && ratio < 5.0, "{ratio}");
    }

    #[test]
    fn too_few_points_rejected() {
        assert!(differentiate_series(&[0.0, 1.0], &[0.0, 1.0], 1, None).is_err());
        assert!(differentiate_series(&[0.0, 1.0, 2.0, 3.0], &[0.0; 4], 2, None).is_err());
        assert!(differentiate_series(&[0.0, 1.0], &[0.0, 1.0], 1, Some(DiscreteScheme::Central)).is_ok());
    }
}
