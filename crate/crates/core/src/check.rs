//! Self-consistency suite: every module's invariants evaluated on small
//! instances, each reported as pass/fail with the measured figure.

use std::f64::consts::PI;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::analytic::{
    maxwell_consistency, tfim_dg2_dhx, tfim_g2_exact, tfim_mx_maxwell, yg_g2, TfimPoint, YangGaudinPoint,
};
use crate::bethe::{energy, energy_derivatives, solve_lieb_equation, DEFAULT_NODES};
use crate::error::Result;
use crate::hilbert::{
    annihilation_matrix, build_basis, build_operator, BasisDescriptor, BasisKind, OperatorMatrix, SparseMatrix,
    Spin, TermDescriptor,
};
use crate::maxwell::{
    differentiate, direct_value, integrate_relation, reconstruct, reconstruct_with, sweep_g2, Anchor, AxisName, DiscreteScheme,
    G2Grid, GridAxis, ReconstructOptions, ReconstructionKind, SweepOptions,
};
use crate::models::{build_model, Boundary, ModelOperators, ModelSpec};
use crate::statmech::{free_energy, hellmann_feynman_residual, spectrum_at, thermo_at, SpectrumMethod};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Module {
    Hilbert,
    Models,
    Statmech,
    Maxwell,
    Bethe,
    Analytic,
}

impl Module {
    pub const ALL: [Module; 6] = [
        Module::Hilbert,
        Module::Models,
        Module::Statmech,
        Module::Maxwell,
        Module::Bethe,
        Module::Analytic,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Module::Hilbert => "hilbert",
            Module::Models => "models",
            Module::Statmech => "statmech",
            Module::Maxwell => "maxwell",
            Module::Bethe => "bethe",
            Module::Analytic => "analytic",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InvariantReport {
    pub module: String,
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

/// `(passed, detail)`; an `Err` counts as a failure.
type Outcome = Result<(bool, String)>;

type Check = (Module, &'static str, fn(u64) -> Outcome);

const CHECKS: &[Check] = &[
    (Module::Hilbert, "hermiticity", |_| hermiticity()),
    (Module::Hilbert, "number_conservation", |_| number_conservation()),
    (Module::Hilbert, "fermion_anticommutation", |_| fermion_anticommutation()),
    (Module::Hilbert, "basis_reproducible", |_| basis_reproducible()),
    (Module::Models, "dh_dc_is_g2", |_| dh_dc_is_g2()),
    (Module::Models, "tfim_parity", |_| tfim_parity()),
    (Module::Models, "sector_conservation", |_| sector_conservation()),
    (Module::Statmech, "hellmann_feynman_scaling", |_| hellmann_feynman_scaling()),
    (Module::Statmech, "entropy_from_free_energy", |_| entropy_from_free_energy()),
    (Module::Statmech, "heat_capacity_from_entropy", |_| heat_capacity_from_entropy()),
    (Module::Statmech, "heat_capacity_nonnegative", |_| heat_capacity_nonnegative()),
    (Module::Statmech, "heat_capacity_routes", |_| heat_capacity_routes()),
    (Module::Maxwell, "route_equality", |_| route_equality()),
    (Module::Maxwell, "anchor_independence", |_| anchor_independence()),
    (Module::Maxwell, "simpson_convergence", |_| simpson_convergence()),
    (Module::Maxwell, "second_derivative", |_| second_derivative()),
    (Module::Bethe, "hellmann_feynman", |_| bethe_hellmann_feynman()),
    (Module::Bethe, "node_convergence", |_| bethe_node_convergence()),
    (Module::Bethe, "g2_monotone", |_| bethe_g2_monotone()),
    (Module::Analytic, "dg2_dhx_finite_difference", dg2_dhx_finite_difference),
    (Module::Analytic, "mz_consistency", |_| mz_consistency()),
    (Module::Analytic, "yg_g2_bounds", |_| yg_g2_bounds()),
    (Module::Analytic, "mx_monotone", |_| mx_monotone()),
];

/// Runs the invariants of `modules` (all if empty). `seed` drives the
/// randomly drawn test points. Reports come back in a fixed order.
pub fn run(modules: &[Module], seed: u64) -> Vec<InvariantReport> {
    let selected: Vec<&Check> = CHECKS
        .iter()
        .filter(|(m, _, _)| modules.is_empty() || modules.contains(m))
        .collect();
    selected
        .par_iter()
        .map(|(module, name, f)| {
            let (passed, detail) = f(seed).unwrap_or_else(|e| (false, format!("error: {e}")));
            InvariantReport {
                module: module.as_str().to_string(),
                name: name.to_string(),
                passed,
                detail,
            }
        })
        .collect()
}

/// `error(h) / error(h/2)` for an O(h^p) quantity should be near `2^p`;
/// errors already at rounding level pass regardless.
fn converges(coarse: f64, fine: f64, order: i32, floor: f64) -> bool {
    let expected = 2f64.powi(order);
    fine <= floor || (coarse / fine > 0.75 * expected && coarse / fine < 1.25 * expected)
}

fn commutator_norm(a: &SparseMatrix, b: &SparseMatrix) -> f64 {
    SparseMatrix::linear_combination(&[(1.0, &a.product(b)), (-1.0, &b.product(a))]).max_abs()
}

fn sample_specs() -> Vec<ModelSpec> {
    vec![
        ModelSpec::tfim(6, 1.0, -0.7).with_h_z(0.2).with_boundary(Boundary::Periodic),
        ModelSpec::fermi_hubbard(4, 1.0, 3.0, 2, 1).with_boundary(Boundary::Periodic),
        ModelSpec::bose_hubbard(4, 1.0, 2.0, 4),
    ]
}

fn hermiticity() -> Outcome {
    let mut worst: f64 = 0.0;
    for spec in sample_specs() {
        let ops = build_model(&spec)?;
        for op in ops.observables() {
            worst = worst.max(op.max_hermitian_deviation());
        }
        worst = worst.max(ops.hamiltonian_at(spec.c, spec.h_z)?.max_hermitian_deviation());
    }
    Ok((worst < 1e-12, format!("max |A - A^dag| = {worst:.1e}")))
}

fn number_operator(basis: &Arc<BasisDescriptor>) -> Result<OperatorMatrix> {
    let terms: Vec<TermDescriptor> = match basis.kind() {
        BasisKind::FermionSpinful => (0..basis.sites())
            .flat_map(|j| [Spin::Up, Spin::Down].map(|spin| TermDescriptor::FermionNumber { site: j, spin }))
            .collect(),
        _ => (0..basis.sites()).map(|site| TermDescriptor::BosonNumber { site }).collect(),
    };
    let ops: Vec<OperatorMatrix> = terms
        .into_iter()
        .map(|t| build_operator(t, basis))
        .collect::<Result<_>>()?;
    let weighted: Vec<(f64, &OperatorMatrix)> = ops.iter().map(|o| (1.0, o)).collect();
    OperatorMatrix::combine(&weighted, "N")
}

fn number_conservation() -> Outcome {
    let mut fermi = ModelSpec::fermi_hubbard(3, 1.0, 2.0, 0, 0).with_boundary(Boundary::Periodic);
    fermi.sector = None;
    let mut bose = ModelSpec::bose_hubbard(3, 1.0, 1.5, 0);
    bose.sector = None;
    bose.boson_cutoff = Some(2);
    let mut worst: f64 = 0.0;
    for spec in [fermi, bose, ModelSpec::fermi_hubbard(4, 1.0, 2.0, 2, 1), ModelSpec::bose_hubbard(3, 1.0, 1.5, 3)] {
        let ops = build_model(&spec)?;
        let n = number_operator(ops.basis())?;
        let h = ops.hamiltonian_at(spec.c, 0.0)?;
        worst = worst.max(commutator_norm(n.matrix(), h.matrix()));
    }
    Ok((worst < 1e-12, format!("max ||[N, H]|| = {worst:.1e}")))
}

fn fermion_anticommutation() -> Outcome {
    let mut worst: f64 = 0.0;
    for sites in 1..=3 {
        let basis = BasisDescriptor::new(BasisKind::FermionSpinful, sites, None, None)?;
        let modes: Vec<SparseMatrix> = (0..sites)
            .flat_map(|j| [Spin::Up, Spin::Down].map(move |s| (j, s)))
            .map(|(j, s)| annihilation_matrix(&basis, j, s))
            .collect::<Result<_>>()?;
        let id = SparseMatrix::identity(basis.dimension());
        for (a, ca) in modes.iter().enumerate() {
            for (b, cb) in modes.iter().enumerate() {
                let cb_dag = cb.transpose();
                let delta = if a == b { 1.0 } else { 0.0 };
                let mixed = SparseMatrix::linear_combination(&[
                    (1.0, &ca.product(&cb_dag)),
                    (1.0, &cb_dag.product(ca)),
                    (-delta, &id),
                ]);
                let pure = SparseMatrix::linear_combination(&[(1.0, &ca.product(cb)), (1.0, &cb.product(ca))]);
                worst = worst.max(mixed.max_abs()).max(pure.max_abs());
            }
        }
    }
    Ok((worst < 1e-12, format!("max deviation from canonical anticommutators = {worst:.1e}")))
}

fn basis_reproducible() -> Outcome {
    let mut spec = sample_specs();
    spec.push(ModelSpec::fermi_hubbard(5, 1.0, 1.0, 3, 2));
    for s in &spec {
        let a = build_basis(s)?;
        let b = build_basis(s)?;
        if a.states() != b.states() {
            return Ok((false, format!("{:?} basis differs between builds", s.family)));
        }
    }
    Ok((true, format!("{} bases rebuilt identically", spec.len())))
}

fn dh_dc_is_g2() -> Outcome {
    let mut worst: f64 = 0.0;
    for spec in sample_specs() {
        let ops = build_model(&spec)?;
        let (c1, c2) = (1.5, -0.5);
        let a = ops.hamiltonian_at(c1, 0.0)?;
        let b = ops.hamiltonian_at(c2, 0.0)?;
        let resid = SparseMatrix::linear_combination(&[
            (1.0 / (c1 - c2), a.matrix()),
            (-1.0 / (c1 - c2), b.matrix()),
            (-1.0, ops.g2.matrix()),
        ]);
        worst = worst.max(resid.max_abs());
    }
    Ok((worst == 0.0, format!("max |dH/dc - G2| = {worst:.1e}")))
}

fn tfim_parity() -> Outcome {
    let spec = ModelSpec::tfim(6, 0.8, -1.3).with_boundary(Boundary::Periodic);
    let ops = build_model(&spec)?;
    let d = ops.dimension();
    // prod_j (2 S^x_j) flips every spin.
    let parity = SparseMatrix::from_triplets(d, d, (0..d).map(|i| (d - 1 - i, i, 1.0)).collect());
    let norm = commutator_norm(&parity, ops.hamiltonian_at(spec.c, 0.0)?.matrix());
    Ok((norm < 1e-12, format!("||[P, H]|| = {norm:.1e}")))
}

fn sorted_levels(ops: &ModelOperators, c: f64) -> Result<Vec<f64>> {
    let mut ev = spectrum_at(ops, c, 0.0, SpectrumMethod::Dense)?.eigenvalues().to_vec();
    ev.sort_by(f64::total_cmp);
    Ok(ev)
}

/// The full Fock-space spectrum is the union of the sector spectra.
fn sector_conservation() -> Outcome {
    let (sites, c) = (3, 2.5);
    let mut full = ModelSpec::fermi_hubbard(sites, 1.0, c, 0, 0);
    full.sector = None;
    let fock = sorted_levels(&build_model(&full)?, c)?;
    let mut union = Vec::new();
    for up in 0..=sites {
        for down in 0..=sites {
            union.extend(sorted_levels(&build_model(&ModelSpec::fermi_hubbard(sites, 1.0, c, up, down))?, c)?);
        }
    }
    union.sort_by(f64::total_cmp);
    if union.len() != fock.len() {
        return Ok((false, format!("{} sector levels vs {} Fock levels", union.len(), fock.len())));
    }
    let worst = fock.iter().zip(&union).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    Ok((worst < 1e-10, format!("{} levels, max mismatch {worst:.1e}", fock.len())))
}

fn hellmann_feynman_scaling() -> Outcome {
    let specs = [
        ModelSpec::tfim(6, 1.0, -0.7),
        ModelSpec::fermi_hubbard(4, 1.0, 3.0, 2, 1),
        ModelSpec::bose_hubbard(4, 1.0, 2.0, 4),
    ];
    let cases: Vec<(usize, f64)> = (0..specs.len()).flat_map(|i| [0.1, 1.0, 10.0].map(|t| (i, t))).collect();
    let results: Vec<(f64, f64)> = cases
        .par_iter()
        .map(|&(i, t)| {
            Ok((hellmann_feynman_residual(&specs[i], t, 1e-3)?, hellmann_feynman_residual(&specs[i], t, 1e-4)?))
        })
        .collect::<Result<_>>()?;
    let mut passed = true;
    let mut worst_ratio: f64 = 100.0;
    let mut worst_residual: f64 = 0.0;
    for &(coarse, fine) in &results {
        let ratio = coarse / fine;
        passed &= fine <= 1e-6 && (fine <= 1e-14 || (80.0..=120.0).contains(&ratio));
        worst_residual = worst_residual.max(fine);
        if (ratio - 100.0).abs() > (worst_ratio - 100.0).abs() {
            worst_ratio = ratio;
        }
    }
    Ok((
        passed,
        format!("max residual at dc=1e-4: {worst_residual:.1e}; ratio furthest from 100: {worst_ratio:.2}"),
    ))
}

fn tfim_small() -> Result<ModelOperators> {
    build_model(&ModelSpec::tfim(6, 1.0, -1.2).with_boundary(Boundary::Periodic))
}

fn entropy_from_free_energy() -> Outcome {
    let ops = tfim_small()?;
    let c = ops.spec.c;
    let t = 0.7;
    let s = thermo_at(&spectrum_at(&ops, c, 0.0, SpectrumMethod::Dense)?, t)?.entropy;
    let err = |dt: f64| -> Result<f64> {
        let d = (free_energy(&ops, c, 0.0, t + dt)? - free_energy(&ops, c, 0.0, t - dt)?) / (2.0 * dt);
        Ok((d + s).abs())
    };
    let (e1, e2) = (err(2e-2)?, err(1e-2)?);
    Ok((converges(e1, e2, 2, 1e-9), format!("|S + dF/dT| = {e1:.2e} -> {e2:.2e} on halving dT")))
}

fn heat_capacity_from_entropy() -> Outcome {
    let ops = tfim_small()?;
    let c = ops.spec.c;
    let t = 0.7;
    let bundle = spectrum_at(&ops, c, 0.0, SpectrumMethod::Dense)?;
    let cv = thermo_at(&bundle, t)?.heat_capacity;
    let err = |dt: f64| -> Result<f64> {
        let ds = (thermo_at(&bundle, t + dt)?.entropy - thermo_at(&bundle, t - dt)?.entropy) / (2.0 * dt);
        Ok((t * ds - cv).abs())
    };
    let (e1, e2) = (err(2e-2)?, err(1e-2)?);
    Ok((converges(e1, e2, 2, 1e-9), format!("|T dS/dT - C_V| = {e1:.2e} -> {e2:.2e} on halving dT")))
}

fn heat_capacity_nonnegative() -> Outcome {
    let mut lowest = f64::INFINITY;
    for spec in sample_specs() {
        let ops = build_model(&spec)?;
        let bundle = spectrum_at(&ops, spec.c, spec.h_z, SpectrumMethod::Dense)?;
        for k in 0..=40 {
            let t = 10f64.powf(-2.0 + k as f64 * 0.1);
            lowest = lowest.min(thermo_at(&bundle, t)?.heat_capacity);
        }
    }
    Ok((lowest >= -1e-12, format!("min C_V over T in [0.01, 100] = {lowest:.3e}")))
}

fn heat_capacity_routes() -> Outcome {
    let ops = tfim_small()?;
    let c = ops.spec.c;
    let bundle = spectrum_at(&ops, c, 0.0, SpectrumMethod::Dense)?;
    let dt = 1e-3;
    let mut worst: f64 = 0.0;
    for t in [0.2, 0.5, 1.0, 3.0] {
        let f = |t: f64| thermo_at(&bundle, t).map(|s| s.free_energy);
        let curvature = (f(t + dt)? - 2.0 * f(t)? + f(t - dt)?) / (dt * dt);
        let cv = thermo_at(&bundle, t)?.heat_capacity;
        worst = worst.max((cv + t * curvature).abs() / cv.abs().max(1.0));
    }
    Ok((worst < 1e-5, format!("max rel |C_V + T d2F/dT2| = {worst:.1e}")))
}

struct RouteCase {
    kind: ReconstructionKind,
    spec: ModelSpec,
    x_name: AxisName,
    x_axis: Vec<f64>,
    at_x: f64,
    temperature: f64,
    scheme: Option<DiscreteScheme>,
}

fn direct(case: &RouteCase, c: f64) -> Result<f64> {
    direct_value(
        case.kind,
        &case.spec,
        case.x_name,
        case.at_x,
        case.temperature,
        c,
        case.scheme.unwrap_or(case.kind.default_scheme()),
        SpectrumMethod::Dense,
    )
}

fn route_cases() -> Vec<RouteCase> {
    let tfim = ModelSpec::tfim(6, 1.0, 0.0);
    let t_axis = |t: f64, h: f64| (-2..=2).map(|k| t + k as f64 * h).collect::<Vec<_>>();
    vec![
        RouteCase {
            kind: ReconstructionKind::Entropy,
            spec: tfim.clone(),
            x_name: AxisName::Temperature,
            x_axis: t_axis(0.8, 3e-4),
            at_x: 0.8,
            temperature: 0.8,
            scheme: None,
        },
        RouteCase {
            kind: ReconstructionKind::HeatCapacity,
            spec: tfim.clone(),
            x_name: AxisName::Temperature,
            x_axis: t_axis(0.8, 1e-3),
            at_x: 0.8,
            temperature: 0.8,
            scheme: None,
        },
        RouteCase {
            kind: ReconstructionKind::Magnetization,
            spec: tfim.clone(),
            x_name: AxisName::Hx,
            x_axis: vec![0.9997, 1.0, 1.0003],
            at_x: 1.0,
            temperature: 0.5,
            scheme: None,
        },
        RouteCase {
            kind: ReconstructionKind::ChemicalPotential,
            spec: ModelSpec::fermi_hubbard(4, 1.0, 0.0, 2, 2),
            x_name: AxisName::Particles,
            x_axis: vec![3.0, 4.0, 5.0],
            at_x: 4.0,
            temperature: 0.3,
            scheme: None,
        },
        RouteCase {
            kind: ReconstructionKind::ChemicalPotential,
            spec: ModelSpec::bose_hubbard(4, 1.0, 0.0, 4),
            x_name: AxisName::Particles,
            x_axis: vec![3.0, 4.0, 5.0],
            at_x: 4.0,
            temperature: 0.3,
            scheme: None,
        },
        RouteCase {
            kind: ReconstructionKind::Pressure,
            spec: tfim.clone(),
            x_name: AxisName::Sites,
            x_axis: vec![4.0, 5.0, 6.0],
            at_x: 5.0,
            temperature: 0.5,
            scheme: Some(DiscreteScheme::Forward),
        },
        RouteCase {
            kind: ReconstructionKind::InverseCompressibility,
            spec: tfim,
            x_name: AxisName::Sites,
            x_axis: vec![4.0, 5.0, 6.0],
            at_x: 5.0,
            temperature: 0.5,
            scheme: None,
        },
    ]
}

/// Maxwell vs direct for every reconstruction kind on ED models, away from
/// critical points. The `X` steps keep the differentiation error well below
/// the quadrature error that `err_est` describes.
fn route_equality() -> Outcome {
    let c_axis: Vec<f64> = (0..=10).map(|i| -1.0 + i as f64 * 0.2).collect();
    let mut failures = Vec::new();
    let mut worst: f64 = 0.0;
    for case in route_cases() {
        let options = SweepOptions {
            temperature: case.temperature,
            method: SpectrumMethod::Dense,
        };
        let grid = sweep_g2(&case.spec, &c_axis, case.x_name, &case.x_axis, &options)?
            .with_volume(case.spec.sites as f64);
        let anchor = Anchor::new(direct(&case, 0.0)?, "direct at c = 0");
        let opts = ReconstructOptions {
            scheme: case.scheme,
            smoothing: None,
        };
        let r = reconstruct_with(case.kind, &grid, 0.0, anchor, case.at_x, &opts)?;
        for (i, &c) in r.c_axis.iter().enumerate() {
            let direct = direct(&case, c)?;
            // Rounding floor for quantities built from O(1) free energies.
            let tol = 3.0 * r.err_est[i] + 1e-10;
            let dev = (r.y[i] - direct).abs();
            worst = worst.max(dev / tol);
            if dev > tol {
                failures.push(format!("{} at c={c}: {dev:.1e} > {tol:.1e}", case.kind.as_str()));
                break;
            }
        }
    }
    let detail = if failures.is_empty() {
        format!("7 cases, max |deviation| / (3 err_est) = {worst:.2}")
    } else {
        failures.join("; ")
    };
    Ok((failures.is_empty(), detail))
}

fn anchor_independence() -> Outcome {
    let c_axis: Vec<f64> = (0..=40).map(|i| -2.0 + i as f64 * 0.05).collect();
    let spec = ModelSpec::tfim(6, 1.0, 0.0);
    let t_axis = vec![0.59, 0.6, 0.61];
    let grid = sweep_g2(&spec, &c_axis, AxisName::Temperature, &t_axis, &SweepOptions::default())?;
    let kind = ReconstructionKind::Entropy;
    let a = reconstruct(kind, &grid, -2.0, Anchor::new(1.0, "arbitrary"), 0.6)?;
    let mut worst: f64 = 0.0;
    for b in [-1.0, 0.0] {
        let rb = reconstruct(kind, &grid, b, Anchor::new(a.value_at(b).unwrap_or(f64::NAN), "from a"), 0.6)?;
        for i in 0..a.y.len() {
            let tol = 2.0 * (a.err_est[i] + rb.err_est[i]) + 1e-13;
            worst = worst.max((a.y[i] - rb.y[i]).abs() / tol);
        }
    }
    Ok((worst <= 1.0, format!("max |difference| / (2 err_est) = {worst:.2}")))
}

/// Reconstruction error of `int_0^c cos` on `n` nodes over [0, 2].
fn simpson_error(n: usize) -> Result<f64> {
    let c: Vec<f64> = (0..n).map(|i| 2.0 * i as f64 / (n - 1) as f64).collect();
    let y: Vec<f64> = c.iter().map(|x| x.cos()).collect();
    let r = integrate_relation(ReconstructionKind::Pressure, &c, &y, 0.0, Anchor::new(0.0, "zero"))?;
    Ok(r.c_axis.iter().zip(&r.y).map(|(c, y)| (y - c.sin()).abs()).fold(0.0, f64::max))
}

fn simpson_convergence() -> Outcome {
    let (coarse, fine) = (simpson_error(17)?, simpson_error(33)?);
    let ratio = coarse / fine;
    Ok(((12.0..=20.0).contains(&ratio), format!("error {coarse:.2e} -> {fine:.2e}, ratio {ratio:.1}")))
}

fn second_derivative_gap(n: usize) -> Result<f64> {
    let c: Vec<f64> = (0..n).map(|i| 2.0 * i as f64 / (n - 1) as f64).collect();
    let grid = G2Grid::from_fn(c, AxisName::Temperature, vec![0.5, 1.0, 1.5], |c, t| (c * t).sin() + c * c * c)?;
    let direct = differentiate(&grid, GridAxis::C, 2)?;
    let twice = differentiate(&differentiate(&grid, GridAxis::C, 1)?, GridAxis::C, 1)?;
    // Nested one-sided stencils are only O(h) within two nodes of an edge.
    let nx = grid.x_axis.len();
    Ok((2 * nx..(n - 2) * nx)
        .map(|k| (direct.values[k] - twice.values[k]).abs())
        .fold(0.0, f64::max))
}

fn second_derivative() -> Outcome {
    let (coarse, fine) = (second_derivative_gap(21)?, second_derivative_gap(41)?);
    Ok((converges(coarse, fine, 2, 1e-8), format!("max gap {coarse:.2e} -> {fine:.2e} on halving h")))
}

fn bethe_hellmann_feynman() -> Outcome {
    let mut worst: f64 = 0.0;
    for gamma in [1.0, 5.0, 20.0] {
        let exact = solve_lieb_equation(gamma, DEFAULT_NODES)?.de_dgamma;
        let err = |d: f64| -> Result<f64> {
            let fd = (energy(gamma + d, DEFAULT_NODES)? - energy(gamma - d, DEFAULT_NODES)?) / (2.0 * d);
            Ok((fd - exact).abs())
        };
        let (e1, e2) = (err(0.04 * gamma)?, err(0.02 * gamma)?);
        if !converges(e1, e2, 2, 1e-9) {
            return Ok((false, format!("gamma = {gamma}: FD error {e1:.2e} -> {e2:.2e}")));
        }
        worst = worst.max(e2);
    }
    Ok((true, format!("e' matches FD of e with O(d^2) error, max {worst:.1e}")))
}

fn bethe_node_convergence() -> Outcome {
    let a = energy(10.0, DEFAULT_NODES)?;
    let b = energy(10.0, 2 * DEFAULT_NODES)?;
    let diff = (a - b).abs();
    Ok((diff < 1e-8, format!("|e_{} - e_{}| at gamma = 10: {diff:.1e}", DEFAULT_NODES, 2 * DEFAULT_NODES)))
}

fn bethe_g2_monotone() -> Outcome {
    let gammas: Vec<f64> = (0..=30).map(|k| 10f64.powf(-1.0 + k as f64 * 0.1)).collect();
    let d: Vec<f64> = gammas
        .par_iter()
        .map(|&g| energy_derivatives(g, DEFAULT_NODES).map(|d| d.d1))
        .collect::<Result<_>>()?;
    let positive = d.iter().all(|v| *v >= 0.0);
    let decreasing = d.windows(2).all(|w| w[1] < w[0]);
    Ok((
        positive && decreasing,
        format!("e'(gamma) on [0.1, 100]: from {:.4e} to {:.4e}", d[0], d[d.len() - 1]),
    ))
}

fn dg2_dhx_finite_difference(seed: u64) -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst: f64 = 0.0;
    let mut drawn = 0;
    while drawn < 20 {
        let h: f64 = rng.gen_range(0.5..2.0);
        let c: f64 = rng.gen_range(-4.0..4.0) * h;
        // Stay clear of the log singularity at |c| = 2 h.
        if ((c / h).abs() - 2.0).abs() < 0.1 {
            continue;
        }
        drawn += 1;
        let dh = 1e-5 * h;
        let fd = (tfim_g2_exact(&TfimPoint::new(c, h + dh)?)? - tfim_g2_exact(&TfimPoint::new(c, h - dh)?)?)
            / (2.0 * dh);
        worst = worst.max((tfim_dg2_dhx(&TfimPoint::new(c, h)?)? - fd).abs());
    }
    Ok((worst < 1e-6, format!("20 points (seed {seed}), max residual {worst:.1e}")))
}

fn mz_consistency() -> Outcome {
    let ratios: Vec<f64> = (1..=50).map(|k| 1.0 + k as f64 / 50.0).collect();
    let worst = maxwell_consistency(1.0, &ratios)?;
    Ok((worst < 1e-6, format!("ratio in (1, 2], max rel error {worst:.1e}")))
}

fn yg_g2_bounds() -> Outcome {
    let mut violations = 0;
    let mut total = 0;
    for pol in [0.0, 0.3, 0.9] {
        for i in 0..=24 {
            let c = if i == 0 { 0.0 } else { 10f64.powf(-3.0 + i as f64 * 0.25) };
            for j in 0..=12 {
                let t = 10f64.powf(-2.0 + j as f64 * 0.5);
                let p = YangGaudinPoint::new(1.0, 1.0, c, t, pol)?;
                let g = yg_g2(&p);
                total += 1;
                if !(g >= 0.0 && g <= 1.0 - pol * pol) {
                    violations += 1;
                }
            }
        }
    }
    Ok((violations == 0, format!("{violations} of {total} points outside [0, 1 - P^2]")))
}

fn mx_monotone() -> Outcome {
    let c_axis: Vec<f64> = (0..=20).map(|i| -4.0 + i as f64 * 0.2).collect();
    let r = tfim_mx_maxwell(1.0, &c_axis)?;
    // m_x falls as |c| grows, i.e. rises along the increasing c axis.
    let monotone = r.y.windows(2).all(|w| w[1] > w[0]);
    let at_critical = r.value_at(-2.0).unwrap_or(f64::NAN);
    Ok((monotone, format!("m_x from {:.6} (c = -4) to {:.6} (c = 0); m_x(-2) = {at_critical:.6} vs 1/pi = {:.6}", r.y[0], r.y[r.y.len() - 1], 1.0 / PI)))
}
