//! The direct route: `Y(c)` from the spectrum at each coupling, without
//! going through `<G2>`.

use super::{AxisName, DiscreteScheme, ReconstructionKind};
use crate::error::{Error, Result};
use crate::maxwell::grid::model_for;
use crate::models::{build_model, ModelSpec};
use crate::statmech::{spectrum_at, thermo_at, SpectrumMethod, ThermoState};

fn state(spec: &ModelSpec, c: f64, t: f64, method: SpectrumMethod) -> Result<ThermoState> {
    let ops = build_model(spec)?;
    thermo_at(&spectrum_at(&ops, c, spec.h_z, method)?, t)
}

/// `Y(c)` of `kind` for `template` at `X = at_x`.
///
/// `temperature` is used when `X` is not the temperature. On discrete axes
/// the difference `scheme` should match the one used by the Maxwell route;
/// with it the two routes are equal up to quadrature error.
#[allow(clippy::too_many_arguments)]
pub fn direct_value(
    kind: ReconstructionKind,
    template: &ModelSpec,
    x_name: AxisName,
    at_x: f64,
    temperature: f64,
    c: f64,
    scheme: DiscreteScheme,
    method: SpectrumMethod,
) -> Result<f64> {
    if !kind.accepts(x_name) {
        return Err(Error::Axis(format!("{} has no direct value along {x_name}", kind.as_str())));
    }
    let at = |x: f64, t: f64| -> Result<ThermoState> {
        let mut spec = model_for(template, x_name, x)?;
        if x_name == AxisName::Hz {
            spec.h_z = x;
        }
        state(&spec, c, t, method)
    };
    let f = |x: f64| at(x, temperature).map(|s| s.free_energy);
    let first_difference = |x: f64| -> Result<f64> {
        Ok(match scheme {
            DiscreteScheme::Forward => f(x + 1.0)? - f(x)?,
            DiscreteScheme::Central => (f(x + 1.0)? - f(x - 1.0)?) / 2.0,
        })
    };
    Ok(match kind {
        ReconstructionKind::Entropy => at(at_x, at_x)?.entropy,
        ReconstructionKind::HeatCapacity => at(at_x, at_x)?.heat_capacity,
        ReconstructionKind::Magnetization => {
            let s = at(at_x, temperature)?;
            let raw = if x_name == AxisName::Hx { s.m_x } else { s.m_z };
            -raw.ok_or_else(|| Error::MissingObservable("spin magnetization".into()))?
        }
        ReconstructionKind::ChemicalPotential => first_difference(at_x)?,
        ReconstructionKind::Pressure => -first_difference(at_x)?,
        ReconstructionKind::InverseCompressibility => at_x * (f(at_x + 1.0)? - 2.0 * f(at_x)? + f(at_x - 1.0)?),
    })
}

/// [`direct_value`] at several `X`. Along the temperature one spectrum
/// serves every point.
#[allow(clippy::too_many_arguments)]
pub fn direct_values(
    kind: ReconstructionKind,
    template: &ModelSpec,
    x_name: AxisName,
    at_x: &[f64],
    temperature: f64,
    c: f64,
    scheme: DiscreteScheme,
    method: SpectrumMethod,
) -> Result<Vec<f64>> {
    if x_name != AxisName::Temperature || !kind.accepts(x_name) {
        return at_x
            .iter()
            .map(|&x| direct_value(kind, template, x_name, x, temperature, c, scheme, method))
            .collect();
    }
    let ops = build_model(template)?;
    let bundle = spectrum_at(&ops, c, template.h_z, method)?;
    at_x.iter()
        .map(|&t| {
            let s = thermo_at(&bundle, t)?;
            Ok(if kind == ReconstructionKind::Entropy { s.entropy } else { s.heat_capacity })
        })
        .collect()
}
