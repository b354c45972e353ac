use std::fmt;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hilbert::Sector;
use crate::models::{build_model, ModelFamily, ModelOperators, ModelSpec};
use crate::statmech::{spectrum_at, thermo_at, SpectrumMethod};

/// Largest number of grid points a single sweep may request.
pub const MAX_GRID_POINTS: usize = 200_000;

/// The thermodynamic variable `X` paired with `c` in a grid.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AxisName {
    Temperature,
    #[serde(rename = "h_x")]
    Hx,
    #[serde(rename = "h_z")]
    Hz,
    /// Particle number `N` (discrete).
    Particles,
    /// System size `V` in sites (discrete).
    Sites,
}

impl AxisName {
    pub fn is_discrete(self) -> bool {
        matches!(self, AxisName::Particles | AxisName::Sites)
    }

    pub fn as_str(self) -> &'static str {
        match self {
            AxisName::Temperature => "temperature",
            AxisName::Hx => "h_x",
            AxisName::Hz => "h_z",
            AxisName::Particles => "particles",
            AxisName::Sites => "sites",
        }
    }
}

impl fmt::Display for AxisName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// `<G2>` (or a derivative of it) tabulated over `c` and one variable `X`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct G2Grid {
    pub c_axis: Vec<f64>,
    pub x_name: AxisName,
    pub x_axis: Vec<f64>,
    /// Row-major: `values[ic * x_axis.len() + ix]`.
    pub values: Vec<f64>,
    /// Model the grid was computed from, if any.
    pub template: Option<ModelSpec>,
    /// Temperature held fixed when `X` is not the temperature.
    pub temperature: Option<f64>,
    /// System size used to turn totals into densities.
    pub volume: Option<f64>,
}

pub(crate) fn check_axis(name: &str, axis: &[f64]) -> Result<()> {
    if axis.is_empty() {
        return Err(Error::Axis(format!("{name} axis is empty")));
    }
    if axis.iter().any(|v| !v.is_finite()) {
        return Err(Error::Axis(format!("{name} axis has non-finite entries")));
    }
    if axis.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::Axis(format!("{name} axis must be strictly increasing")));
    }
    Ok(())
}

impl G2Grid {
    /// Builds a grid from precomputed values, validating shape and finiteness.
    pub fn new(c_axis: Vec<f64>, x_name: AxisName, x_axis: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        let grid = Self {
            c_axis,
            x_name,
            x_axis,
            values,
            template: None,
            temperature: None,
            volume: None,
        };
        grid.validate()?;
        Ok(grid)
    }

    /// Tabulates `f(c, x)`.
    pub fn from_fn(
        c_axis: Vec<f64>,
        x_name: AxisName,
        x_axis: Vec<f64>,
        f: impl Fn(f64, f64) -> f64,
    ) -> Result<Self> {
        let values = c_axis
            .iter()
            .flat_map(|&c| x_axis.iter().map(move |&x| (c, x)))
            .map(|(c, x)| f(c, x))
            .collect();
        Self::new(c_axis, x_name, x_axis, values)
    }

    pub fn with_volume(mut self, volume: f64) -> Self {
        self.volume = Some(volume);
        self
    }

    pub fn validate(&self) -> Result<()> {
        check_axis("c", &self.c_axis)?;
        check_axis(self.x_name.as_str(), &self.x_axis)?;
        if self.values.len() != self.c_axis.len() * self.x_axis.len() {
            return Err(Error::Axis(format!(
                "value table has {} entries for a {}x{} grid",
                self.values.len(),
                self.c_axis.len(),
                self.x_axis.len()
            )));
        }
        if let Some(k) = self.values.iter().position(|v| !v.is_finite()) {
            return Err(Error::Axis(format!(
                "non-finite value at c = {}, {} = {}",
                self.c_axis[k / self.x_axis.len()],
                self.x_name,
                self.x_axis[k % self.x_axis.len()]
            )));
        }
        Ok(())
    }

    pub fn get(&self, ic: usize, ix: usize) -> f64 {
        self.values[ic * self.x_axis.len() + ix]
    }

    /// Values along `c` at fixed `x_axis[ix]`.
    pub fn column(&self, ix: usize) -> Vec<f64> {
        (0..self.c_axis.len()).map(|ic| self.get(ic, ix)).collect()
    }

    /// Values along `X` at fixed `c_axis[ic]`.
    pub fn row(&self, ic: usize) -> &[f64] {
        let nx = self.x_axis.len();
        &self.values[ic * nx..(ic + 1) * nx]
    }

    /// Index of `x` on the `X` axis (relative tolerance `1e-12`).
    pub fn x_index(&self, x: f64) -> Result<usize> {
        locate(&self.x_axis, x).ok_or_else(|| {
            Error::Axis(format!("{} = {x} is not on the grid axis", self.x_name))
        })
    }

    pub fn c_index(&self, c: f64) -> Result<usize> {
        locate(&self.c_axis, c)
            .ok_or_else(|| Error::Axis(format!("c0 = {c} is not on the c axis")))
    }

    /// Adds seeded Gaussian noise of standard deviation `sigma` to every value.
    pub fn with_noise(mut self, sigma: f64, seed: u64) -> Result<Self> {
        if sigma == 0.0 {
            return Ok(self);
        }
        let normal = Normal::new(0.0, sigma)
            .map_err(|e| Error::InvalidArgument(format!("noise sigma {sigma}: {e}")))?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        self.values.iter_mut().for_each(|v| *v += normal.sample(&mut rng));
        Ok(self)
    }
}

pub(crate) fn locate(axis: &[f64], x: f64) -> Option<usize> {
    axis.iter()
        .position(|&a| a == x || (a - x).abs() <= 1e-12 * a.abs().max(x.abs()).max(1e-300))
}

/// What a sweep evaluates at every point.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SweepOptions {
    /// Temperature when `X` is not the temperature.
    pub temperature: f64,
    pub method: SpectrumMethod,
}

impl Default for SweepOptions {
    fn default() -> Self {
        Self {
            temperature: 0.0,
            method: SpectrumMethod::default(),
        }
    }
}

fn as_count(x: f64, name: AxisName) -> Result<usize> {
    if x < 0.0 || x.fract() != 0.0 {
        return Err(Error::Axis(format!("{name} axis needs non-negative integers, got {x}")));
    }
    Ok(x as usize)
}

/// The model at axis value `x`, for axes that change the operators.
pub(crate) fn model_for(template: &ModelSpec, name: AxisName, x: f64) -> Result<ModelSpec> {
    let mut spec = template.clone();
    match name {
        AxisName::Hx => spec.h_x = x,
        AxisName::Particles => {
            let n = as_count(x, name)?;
            spec.sector = Some(Sector::Total(n));
            if spec.family == ModelFamily::BoseHubbard && template.boson_cutoff.is_none() {
                spec.boson_cutoff = Some(n);
            }
            if spec.family == ModelFamily::Tfim {
                return Err(Error::Axis("the TFIM has no particle-number axis".into()));
            }
        }
        AxisName::Sites => spec.sites = as_count(x, name)?,
        AxisName::Temperature | AxisName::Hz => {}
    }
    Ok(spec)
}

/// Thermal `<G2>` over the `(c, X)` grid. Points are evaluated in parallel
/// and assembled in grid order, so the output does not depend on scheduling.
pub fn sweep_g2(
    template: &ModelSpec,
    c_axis: &[f64],
    x_name: AxisName,
    x_axis: &[f64],
    options: &SweepOptions,
) -> Result<G2Grid> {
    check_axis("c", c_axis)?;
    check_axis(x_name.as_str(), x_axis)?;
    let total = c_axis.len() * x_axis.len();
    if total > MAX_GRID_POINTS {
        return Err(Error::Axis(format!(
            "{total} grid points exceed the budget of {MAX_GRID_POINTS}"
        )));
    }
    if x_name == AxisName::Temperature && x_axis[0] < 0.0 {
        return Err(Error::Axis("temperatures must be non-negative".into()));
    }
    if x_name != AxisName::Temperature && !(options.temperature >= 0.0) {
        return Err(Error::InvalidArgument("sweep temperature must be non-negative".into()));
    }

    // Operators change only along h_x, N and V.
    let rebuilds = matches!(x_name, AxisName::Hx | AxisName::Particles | AxisName::Sites);
    let models: Vec<ModelOperators> = if rebuilds {
        x_axis
            .par_iter()
            .map(|&x| build_model(&model_for(template, x_name, x)?))
            .collect::<Result<_>>()?
    } else {
        vec![build_model(template)?]
    };

    let point_error = |c: f64, x: f64, e: Error| Error::GridPoint {
        coordinates: format!("c = {c}, {x_name} = {x}"),
        source: Box::new(e),
    };

    let values: Vec<f64> = if x_name == AxisName::Temperature {
        let t_max = x_axis[x_axis.len() - 1];
        let method = match options.method {
            SpectrumMethod::Auto { .. } => SpectrumMethod::Auto { max_temperature: t_max },
            SpectrumMethod::LowLying { .. } => SpectrumMethod::LowLying { max_temperature: t_max },
            m => m,
        };
        let rows: Vec<Vec<f64>> = c_axis
            .par_iter()
            .map(|&c| {
                let bundle = spectrum_at(&models[0], c, template.h_z, method)
                    .map_err(|e| point_error(c, x_axis[0], e))?;
                x_axis
                    .iter()
                    .map(|&t| thermo_at(&bundle, t).map(|s| s.g2).map_err(|e| point_error(c, t, e)))
                    .collect::<Result<Vec<f64>>>()
            })
            .collect::<Result<_>>()?;
        rows.concat()
    } else {
        let t = options.temperature;
        let method = match options.method {
            SpectrumMethod::Auto { max_temperature } if !max_temperature.is_finite() => {
                SpectrumMethod::Auto { max_temperature: t }
            }
            m => m,
        };
        let points: Vec<(usize, usize)> = (0..c_axis.len())
            .flat_map(|ic| (0..x_axis.len()).map(move |ix| (ic, ix)))
            .collect();
        points
            .par_iter()
            .map(|&(ic, ix)| {
                let (c, x) = (c_axis[ic], x_axis[ix]);
                let ops = if rebuilds { &models[ix] } else { &models[0] };
                let h_z = if x_name == AxisName::Hz { x } else { template.h_z };
                spectrum_at(ops, c, h_z, method)
                    .and_then(|b| thermo_at(&b, t))
                    .map(|s| s.g2)
                    .map_err(|e| point_error(c, x, e))
            })
            .collect::<Result<_>>()?
    };

    let mut grid = G2Grid::new(c_axis.to_vec(), x_name, x_axis.to_vec(), values)?;
    grid.template = Some(template.clone());
    grid.temperature = (x_name != AxisName::Temperature).then_some(options.temperature);
    grid.volume = Some(template.sites as f64);
    Ok(grid)
}
