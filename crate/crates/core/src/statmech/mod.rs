//! Direct statistical mechanics from exact spectra.
//!
//! A [`SpectrumBundle`] holds eigenvalues and, for every requested
//! observable, its expectation value in each eigenstate. Thermal averages
//! are Boltzmann-weighted sums over that table with the ground energy
//! subtracted before exponentiating.
//!
//! Small Hilbert spaces are diagonalized densely. Above
//! [`DENSE_DIMENSION_LIMIT`] the low-lying spectrum is obtained by Lanczos
//! instead; such a bundle is only valid up to a maximum temperature, and
//! [`thermo_at`] refuses to go beyond it.

mod free;
mod hellmann;
mod lanczos;

pub use free::{free_boson_free_energy, free_fermion_free_energy, open_chain_levels};
pub use hellmann::{free_energy_difference, hellmann_feynman_residual};
pub use lanczos::LowSpectrumOptions;

use std::collections::BTreeMap;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hilbert::{BasisDescriptor, OperatorMatrix};
use crate::models::{ModelOperators, LABEL_G2, LABEL_SX, LABEL_SZ};

/// Largest dimension diagonalized densely by [`SpectrumMethod::Auto`].
pub const DENSE_DIMENSION_LIMIT: usize = 2048;

/// Eigenvalues plus per-eigenstate expectation values.
#[derive(Clone, Debug)]
pub struct SpectrumBundle {
    basis: Arc<BasisDescriptor>,
    eigenvalues: Vec<f64>,
    expectations: BTreeMap<String, Vec<f64>>,
    /// `INFINITY` for a full spectrum.
    max_temperature: f64,
}

impl SpectrumBundle {
    pub fn basis(&self) -> &Arc<BasisDescriptor> {
        &self.basis
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn ground_energy(&self) -> f64 {
        self.eigenvalues[0]
    }

    pub fn expectations(&self, label: &str) -> Option<&[f64]> {
        self.expectations.get(label).map(Vec::as_slice)
    }

    pub fn labels(&self) -> impl Iterator<Item = &str> {
        self.expectations.keys().map(String::as_str)
    }

    /// Whether every eigenvalue of the basis is present.
    pub fn is_complete(&self) -> bool {
        self.eigenvalues.len() == self.basis.dimension()
    }

    pub fn max_temperature(&self) -> f64 {
        self.max_temperature
    }
}

/// Direct thermodynamics at one temperature. Energies are totals; the
/// magnetizations are per site.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ThermoState {
    pub temperature: f64,
    /// `ln Z`; `Z` itself overflows easily.
    pub log_z: f64,
    pub free_energy: f64,
    pub internal_energy: f64,
    pub entropy: f64,
    pub heat_capacity: f64,
    pub g2: f64,
    /// `<sum_j S^x_j> / V` (spin models).
    pub m_x: Option<f64>,
    /// `<sum_j S^z_j> / V` (spin models).
    pub m_z: Option<f64>,
    /// Thermal average of every stored observable.
    pub expectations: BTreeMap<String, f64>,
}

impl ThermoState {
    pub fn partition_function(&self) -> f64 {
        self.log_z.exp()
    }
}

fn check_hermitian(h: &OperatorMatrix, observables: &[&OperatorMatrix]) -> Result<()> {
    let dev = h.max_hermitian_deviation();
    if dev >= crate::hilbert::HERMITIAN_TOLERANCE {
        return Err(Error::NonHermitian { max_deviation: dev });
    }
    if observables.iter().any(|o| !o.same_basis(h)) {
        return Err(Error::BasisMismatch);
    }
    Ok(())
}

fn collect_expectations(
    observables: &[&OperatorMatrix],
    vectors: &[Vec<f64>],
) -> BTreeMap<String, Vec<f64>> {
    observables
        .iter()
        .map(|o| {
            let vals = vectors.iter().map(|v| o.expectation(v)).collect();
            (o.label().to_string(), vals)
        })
        .collect()
}

/// Dense eigendecomposition; eigenvalues ascending, eigenvectors as columns
/// returned one `Vec` per eigenstate.
pub(crate) fn dense_eigensystem(h: &OperatorMatrix) -> Result<(Vec<f64>, Vec<Vec<f64>>)> {
    let n = h.dimension();
    let dense = h.matrix().to_dense();
    let eig = dense.selfadjoint_eigendecomposition(faer::Side::Lower);
    let s = eig.s().column_vector();
    let u = eig.u();
    let mut order: Vec<usize> = (0..n).collect();
    let values: Vec<f64> = (0..n).map(|i| s.read(i)).collect();
    if values.iter().any(|v| !v.is_finite()) {
        return Err(Error::Eigensolver(format!(
            "non-finite eigenvalue for a {n}x{n} matrix with {} nonzeros and max |entry| {:e}",
            h.matrix().nnz(),
            h.matrix().max_abs()
        )));
    }
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let eigenvalues = order.iter().map(|&k| values[k]).collect();
    let vectors = order
        .iter()
        .map(|&k| (0..n).map(|i| u.read(i, k)).collect())
        .collect();
    Ok((eigenvalues, vectors))
}

/// Full dense diagonalization with per-eigenstate expectation values.
pub fn diagonalize(h: &OperatorMatrix, observables: &[&OperatorMatrix]) -> Result<SpectrumBundle> {
    check_hermitian(h, observables)?;
    let (eigenvalues, vectors) = dense_eigensystem(h)?;
    Ok(SpectrumBundle {
        basis: h.basis().clone(),
        eigenvalues,
        expectations: collect_expectations(observables, &vectors),
        max_temperature: f64::INFINITY,
    })
}

/// Low-lying spectrum by Lanczos, valid for `T <= options.max_temperature`.
pub fn diagonalize_low_lying(
    h: &OperatorMatrix,
    observables: &[&OperatorMatrix],
    options: &LowSpectrumOptions,
) -> Result<SpectrumBundle> {
    check_hermitian(h, observables)?;
    let (eigenvalues, vectors, complete) = lanczos::low_spectrum(h.matrix(), options)?;
    Ok(SpectrumBundle {
        basis: h.basis().clone(),
        eigenvalues,
        expectations: collect_expectations(observables, &vectors),
        max_temperature: if complete { f64::INFINITY } else { options.max_temperature },
    })
}

/// How to obtain a spectrum.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "method")]
pub enum SpectrumMethod {
    Dense,
    /// Dense up to [`DENSE_DIMENSION_LIMIT`], Lanczos above it.
    Auto { max_temperature: f64 },
    LowLying { max_temperature: f64 },
}

impl Default for SpectrumMethod {
    fn default() -> Self {
        SpectrumMethod::Auto {
            max_temperature: f64::INFINITY,
        }
    }
}

/// Spectrum of `H0 + c G2 + h_z Sz` with all model observables attached.
pub fn spectrum_at(
    ops: &ModelOperators,
    c: f64,
    h_z: f64,
    method: SpectrumMethod,
) -> Result<SpectrumBundle> {
    let h = ops.hamiltonian_at(c, h_z)?;
    let observables = ops.observables();
    let low = |t_max: f64| {
        diagonalize_low_lying(&h, &observables, &LowSpectrumOptions::for_temperature(t_max))
    };
    match method {
        SpectrumMethod::Dense => diagonalize(&h, &observables),
        SpectrumMethod::LowLying { max_temperature } => low(max_temperature),
        SpectrumMethod::Auto { max_temperature } => {
            if h.dimension() <= DENSE_DIMENSION_LIMIT || !max_temperature.is_finite() {
                diagonalize(&h, &observables)
            } else {
                low(max_temperature)
            }
        }
    }
}

/// Relative tolerance deciding which levels form the ground manifold at `T = 0`.
const DEGENERACY_TOLERANCE: f64 = 1e-10;

/// Boltzmann weights (normalized) and `ln Z` with the ground energy removed.
fn weights(bundle: &SpectrumBundle, t: f64) -> (Vec<f64>, f64) {
    let e0 = bundle.ground_energy();
    if t == 0.0 {
        let scale = DEGENERACY_TOLERANCE * e0.abs().max(1.0);
        let g = bundle.eigenvalues.iter().filter(|&&e| e - e0 <= scale).count();
        let w = bundle
            .eigenvalues
            .iter()
            .map(|&e| if e - e0 <= scale { 1.0 / g as f64 } else { 0.0 })
            .collect();
        return (w, (g as f64).ln());
    }
    let raw: Vec<f64> = bundle.eigenvalues.iter().map(|&e| (-(e - e0) / t).exp()).collect();
    let z: f64 = raw.iter().sum();
    (raw.iter().map(|w| w / z).collect(), z.ln())
}

/// Direct thermodynamics at temperature `t >= 0`.
pub fn thermo_at(bundle: &SpectrumBundle, t: f64) -> Result<ThermoState> {
    if !(t >= 0.0) || !t.is_finite() {
        return Err(Error::InvalidArgument(format!("temperature must be finite and >= 0, got {t}")));
    }
    if t > bundle.max_temperature {
        return Err(Error::TemperatureOutOfRange {
            temperature: t,
            max: bundle.max_temperature,
        });
    }
    let (w, log_z_shifted) = weights(bundle, t);
    let e0 = bundle.ground_energy();
    let avg = |vals: &[f64]| w.iter().zip(vals).map(|(w, v)| w * v).sum::<f64>();

    // Moments relative to E0 keep the variance free of cancellation.
    let shifted: Vec<f64> = bundle.eigenvalues.iter().map(|e| e - e0).collect();
    let u_rel = avg(&shifted);
    let var = w
        .iter()
        .zip(&shifted)
        .map(|(w, e)| w * (e - u_rel).powi(2))
        .sum::<f64>();
    let internal_energy = e0 + u_rel;

    let (log_z, free_energy, entropy, heat_capacity) = if t == 0.0 {
        (f64::INFINITY, e0, log_z_shifted, 0.0)
    } else {
        let log_z = log_z_shifted - e0 / t;
        // F = E0 - T ln Z', S = (U - F)/T = u_rel/T + ln Z'.
        let f = e0 - t * log_z_shifted;
        (log_z, f, u_rel / t + log_z_shifted, var / (t * t))
    };

    let expectations: BTreeMap<String, f64> = bundle
        .expectations
        .iter()
        .map(|(k, v)| (k.clone(), avg(v)))
        .collect();
    let sites = bundle.basis.sites() as f64;
    Ok(ThermoState {
        temperature: t,
        log_z,
        free_energy,
        internal_energy,
        entropy,
        heat_capacity,
        g2: expectations.get(LABEL_G2).copied().unwrap_or(f64::NAN),
        m_x: expectations.get(LABEL_SX).map(|v| v / sites),
        m_z: expectations.get(LABEL_SZ).map(|v| v / sites),
        expectations,
    })
}

/// `(<sum S^x>/V, <sum S^z>/V)` at temperature `t`.
///
/// These are raw expectation values. The thermodynamic magnetization
/// `-V^-1 dF/dh` of a model with `H0 = +h_x sum S^x` has the opposite sign.
pub fn magnetization_direct(bundle: &SpectrumBundle, t: f64) -> Result<(f64, f64)> {
    for label in [LABEL_SX, LABEL_SZ] {
        if bundle.expectations(label).is_none() {
            return Err(Error::MissingObservable(label.into()));
        }
    }
    let state = thermo_at(bundle, t)?;
    Ok((state.m_x.unwrap(), state.m_z.unwrap()))
}

/// Thermal `<G2>` of `ops` at one `(c, h_z, T)` point.
pub fn thermal_g2(ops: &ModelOperators, c: f64, h_z: f64, t: f64, method: SpectrumMethod) -> Result<f64> {
    Ok(thermo_at(&spectrum_at(ops, c, h_z, method)?, t)?.g2)
}

/// Free energy `F(c)` from a dense spectrum.
pub fn free_energy(ops: &ModelOperators, c: f64, h_z: f64, t: f64) -> Result<f64> {
    Ok(thermo_at(&spectrum_at(ops, c, h_z, SpectrumMethod::Dense)?, t)?.free_energy)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::{build_model, ModelSpec};

    fn bundle(spec: &ModelSpec) -> SpectrumBundle {
        let ops = build_model(spec).unwrap();
        spectrum_at(&ops, spec.c, spec.h_z, SpectrumMethod::Dense).unwrap()
    }

    #[test]
    fn single_spin_in_a_field() {
        let b = bundle(&ModelSpec::tfim(1, 1.0, 0.0));
        assert_eq!(b.eigenvalues(), &[-0.5, 0.5]);
        for t in [0.1, 0.7, 3.0] {
            let s = thermo_at(&b, t).unwrap();
            let exact = -t * (2.0 * (1.0 / (2.0 * t)).cosh()).ln();
            assert!((s.free_energy - exact).abs() < 1e-14);
            assert!((s.entropy - (s.internal_energy - s.free_energy) / t).abs() < 1e-12);
        }
    }

    #[test]
    fn infinite_temperature_entropy() {
        let b = bundle(&ModelSpec::tfim(4, 1.0, -1.0));
        let s = thermo_at(&b, 1e6).unwrap();
        assert!((s.entropy - 4.0 * 2f64.ln()).abs() < 1e-6);
        assert!(s.m_x.unwrap().abs() < 1e-6 && s.m_z.unwrap().abs() < 1e-12);
    }

    #[test]
    fn zero_temperature_averages_the_ground_manifold() {
        // h_x = 0, c < 0: the two ferromagnetic states are degenerate.
        let b = bundle(&ModelSpec::tfim(4, 0.0, -1.0));
        let s = thermo_at(&b, 0.0).unwrap();
        assert!((s.entropy - 2f64.ln()).abs() < 1e-12);
        let (_, mz) = magnetization_direct(&b, 0.0).unwrap();
        assert!(mz.abs() < 1e-12);
        let b = bundle(&ModelSpec::tfim(4, 1.0, 0.0));
        let (mx, _) = magnetization_direct(&b, 0.0).unwrap();
        assert!((mx.abs() - 0.5).abs() < 1e-12);
        assert_eq!(thermo_at(&b, 0.0).unwrap().entropy, 0.0);
    }

    #[test]
    fn two_site_hubbard_ground_energy() {
        let b = bundle(&ModelSpec::fermi_hubbard(2, 1.0, 4.0, 1, 1));
        assert!((b.ground_energy() - (4.0 - 32f64.sqrt()) / 2.0).abs() < 1e-12);
        let s = thermo_at(&b, 0.3).unwrap();
        assert!(s.heat_capacity >= 0.0);
    }

    #[test]
    fn missing_spin_observables_are_reported() {
        let b = bundle(&ModelSpec::bose_hubbard(2, 1.0, 1.0, 2));
        assert!(matches!(magnetization_direct(&b, 1.0), Err(Error::MissingObservable(_))));
    }

    #[test]
    fn heat_capacity_matches_free_energy_curvature() {
        let b = bundle(&ModelSpec::tfim(4, 1.0, -1.5));
        let (t, dt) = (0.8, 1e-3);
        let f = |t| thermo_at(&b, t).unwrap().free_energy;
        let cv_fd = -t * (f(t + dt) - 2.0 * f(t) + f(t - dt)) / (dt * dt);
        let s_fd = -(f(t + dt) - f(t - dt)) / (2.0 * dt);
        let st = thermo_at(&b, t).unwrap();
        assert!((cv_fd - st.heat_capacity).abs() < 1e-5);
        assert!((s_fd - st.entropy).abs() < 1e-6);
    }

    #[test]
    fn low_lying_agrees_with_dense_at_low_temperature() {
        let spec = ModelSpec::tfim(8, 1.0, -1.2).with_h_z(0.01);
        let ops = build_model(&spec).unwrap();
        let dense = spectrum_at(&ops, spec.c, spec.h_z, SpectrumMethod::Dense).unwrap();
        let low = spectrum_at(&ops, spec.c, spec.h_z, SpectrumMethod::LowLying { max_temperature: 0.2 })
            .unwrap();
        assert!(low.eigenvalues().len() < dense.eigenvalues().len());
        for t in [0.0, 0.05, 0.2] {
            let a = thermo_at(&dense, t).unwrap();
            let b = thermo_at(&low, t).unwrap();
            assert!((a.free_energy - b.free_energy).abs() < 1e-9, "T={t}");
            assert!((a.g2 - b.g2).abs() < 1e-9, "T={t}");
            assert!((a.m_z.unwrap() - b.m_z.unwrap()).abs() < 1e-9, "T={t}");
        }
        assert!(matches!(thermo_at(&low, 0.5), Err(Error::TemperatureOutOfRange { .. })));
    }
}
