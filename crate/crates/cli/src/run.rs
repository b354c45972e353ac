//! One function per command, each turning a validated config into a table.

use g2thermo::analytic::{
    critical_exponent_fit, ideal_fermi_entropy, scaling_log_rhs, tfim_dg2_dhx_compact, tfim_g2_exact,
    tfim_mx_exact, tfim_mx_maxwell, tfim_mz_exact, tfim_mz_spin_half, yg_entropy, yg_entropy_correction, yg_g2,
    EntropyRoute, TfimPoint, YangGaudinPoint, BETA,
};
use g2thermo::bethe::bethe_table;
use g2thermo::check::{self, InvariantReport};
use g2thermo::maxwell::{
    differentiate, direct_values, reconstruct_with, MaxwellResult, sweep_g2, Anchor, AxisName, GridAxis, ReconstructOptions,
    ReconstructionKind, SweepOptions,
};
use rayon::prelude::*;
use serde_json::Value;

use crate::config::{Command, Format, Grid, RunConfig, SweepConfig, XAxis, SCHEMA_VERSION};
use crate::table::{num, Table};

/// A failure inside the numerics, tagged with the module it came from.
#[derive(Debug)]
pub struct ComputeError {
    pub module: &'static str,
    pub source: g2thermo::Error,
}

impl std::fmt::Display for ComputeError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}: {}", self.module, self.source)
    }
}

impl std::error::Error for ComputeError {}

type Result<T> = std::result::Result<T, ComputeError>;

fn ctx<T>(module: &'static str, r: g2thermo::Result<T>) -> Result<T> {
    r.map_err(|source| ComputeError { module, source })
}

/// Output of [`execute`]: the table plus, for `check`, the invariant
/// reports.
pub struct Outcome {
    pub table: Table,
    pub reports: Vec<InvariantReport>,
}

impl Outcome {
    pub fn all_passed(&self) -> bool {
        self.reports.iter().all(|r| r.passed)
    }
}

pub fn execute(config: &RunConfig) -> Result<Outcome> {
    let mut reports = Vec::new();
    let mut table = match config.command {
        Command::Sweep => sweep(config)?,
        Command::Reconstruct => reconstruct(config)?,
        Command::Bethe => bethe(config)?,
        Command::TfimExact => tfim_exact(config)?,
        Command::CriticalFit => critical_fit(config)?,
        Command::YangGaudin => yang_gaudin(config)?,
        Command::Check => {
            reports = run_check(config);
            let mut t = Table::new(&["module", "name", "passed", "detail"]);
            for r in &reports {
                t.push(vec![
                    Value::from(r.module.clone()),
                    Value::from(r.name.clone()),
                    Value::from(r.passed),
                    Value::from(r.detail.clone()),
                ]);
            }
            t.meta("failed", reports.iter().filter(|r| !r.passed).count() as u64);
            t
        }
    };
    let mut echo = config.clone();
    echo.output = None;
    table.meta("command", config.command.as_str());
    table.meta("config", serde_json::to_value(&echo).expect("configs serialize"));
    table.meta("seed", config.seed);
    table.meta("schema_version", SCHEMA_VERSION);
    table.meta("version", env!("CARGO_PKG_VERSION"));
    Ok(Outcome { table, reports })
}

fn x_label(x: &XAxis) -> &'static str {
    x.name.as_str()
}

fn sweep(config: &RunConfig) -> Result<Table> {
    let s: &SweepConfig = config.sweep.as_ref().expect("validated");
    let c = s.c_axis.values();
    let x = s.x_axis.grid.values();
    let options = SweepOptions {
        temperature: s.temperature,
        method: s.method.spectrum(f64::INFINITY),
    };
    let grid = ctx("statmech", sweep_g2(&s.model, &c, s.x_axis.name, &x, &options))?;
    let grid = ctx("maxwell", grid.with_noise(config.noise_sigma, config.seed))?;
    let xl = x_label(&s.x_axis);
    let mut columns = vec!["c".to_string(), xl.to_string(), "g2".to_string()];
    let derivative = match &s.derivative {
        Some(d) => {
            let var = match d.axis {
                GridAxis::C => "c",
                GridAxis::X => xl,
            };
            columns.push(match d.order {
                1 => format!("dg2_d{var}"),
                _ => format!("d2g2_d{var}2"),
            });
            Some(ctx("maxwell", differentiate(&grid, d.axis, d.order))?)
        }
        None => None,
    };
    let mut t = Table::new(&columns.iter().map(String::as_str).collect::<Vec<_>>());
    for (ic, &cv) in c.iter().enumerate() {
        for (ix, &xv) in x.iter().enumerate() {
            let mut row = vec![cv, xv, grid.get(ic, ix)];
            if let Some(d) = &derivative {
                row.push(d.get(ic, ix));
            }
            t.push_numbers(&row);
        }
    }
    t.meta("volume", s.model.sites as u64);
    Ok(t)
}

fn symbol(kind: ReconstructionKind, axis: AxisName) -> &'static str {
    match kind {
        ReconstructionKind::Pressure => "P",
        ReconstructionKind::Entropy => "S",
        ReconstructionKind::ChemicalPotential => "mu",
        ReconstructionKind::Magnetization if axis == AxisName::Hz => "m_z",
        ReconstructionKind::Magnetization => "m_x",
        ReconstructionKind::HeatCapacity => "C_V",
        ReconstructionKind::InverseCompressibility => "inv_kappa",
    }
}

fn reconstruct(config: &RunConfig) -> Result<Table> {
    let r = config.reconstruct.as_ref().expect("validated");
    let c = r.c_axis.values();
    let x = r.x_axis.grid.values();
    let name = r.x_axis.name;
    let options = SweepOptions {
        temperature: r.temperature,
        method: r.method.spectrum(f64::INFINITY),
    };
    let grid = ctx("statmech", sweep_g2(&r.model, &c, name, &x, &options))?.with_volume(r.model.sites as f64);
    let grid = ctx("maxwell", grid.with_noise(config.noise_sigma, config.seed))?;

    let scheme = r.scheme.unwrap_or(r.kind.default_scheme());
    let at_x = r.at_x.resolve(&x);
    let t_max = if name == AxisName::Temperature {
        at_x.iter().fold(0.0f64, |m, &t| m.max(t))
    } else {
        r.temperature
    };
    let method = r.method.spectrum(t_max);
    let direct = |cv: f64, xs: &[f64]| {
        ctx(
            "statmech",
            direct_values(r.kind, &r.model, name, xs, r.temperature, cv, scheme, method),
        )
    };
    let opts = ReconstructOptions {
        scheme: r.scheme,
        smoothing: r.smoothing.as_ref().map(|s| (s.window, s.poly_order)),
    };
    let anchors = match r.anchor {
        Some(a) => vec![a; at_x.len()],
        None => direct(r.c0, &at_x)?,
    };
    let provenance = if r.anchor.is_some() { "config" } else { "direct route at c0" };
    let results: Vec<MaxwellResult> = at_x
        .par_iter()
        .zip(&anchors)
        .map(|(&xv, &a)| ctx("maxwell", reconstruct_with(r.kind, &grid, r.c0, Anchor::new(a, provenance), xv, &opts)))
        .collect::<Result<_>>()?;
    // direct[ic][ix]
    let direct_rows: Option<Vec<Vec<f64>>> = if r.direct {
        Some(c.par_iter().map(|&cv| direct(cv, &at_x)).collect::<Result<_>>()?)
    } else {
        None
    };

    let sym = symbol(r.kind, name);
    let mut columns = vec!["c".to_string()];
    let several = at_x.len() > 1;
    if several {
        columns.push(name.as_str().to_string());
    }
    columns.push(format!("{sym}_maxwell"));
    if r.direct {
        columns.push(format!("{sym}_direct"));
    }
    columns.push("err_est".to_string());
    let mut t = Table::new(&columns.iter().map(String::as_str).collect::<Vec<_>>());
    let mut worst: f64 = 0.0;
    for (ix, res) in results.iter().enumerate() {
        for (ic, &cv) in c.iter().enumerate() {
            let mut row = vec![cv];
            if several {
                row.push(at_x[ix]);
            }
            row.push(res.y[ic]);
            if let Some(d) = &direct_rows {
                row.push(d[ic][ix]);
                worst = worst.max((res.y[ic] - d[ic][ix]).abs());
            }
            row.push(res.err_est[ic]);
            t.push_numbers(&row);
        }
    }
    if r.direct {
        t.meta("max_abs_delta", num(worst));
    }
    if !several {
        t.meta("anchor", num(anchors[0]));
    }
    t.meta("anchor_provenance", provenance);
    Ok(t)
}

fn bethe(config: &RunConfig) -> Result<Table> {
    let b = config.bethe.as_ref().expect("validated");
    let rows = ctx("bethe", bethe_table(b.density, &b.gamma.values()))?;
    let mut t = Table::new(&[
        "gamma",
        "e",
        "de_dgamma",
        "pressure_direct",
        "pressure_maxwell",
        "inverse_compressibility_direct",
        "inverse_compressibility_maxwell",
    ]);
    let (mut dp, mut dk): (f64, f64) = (0.0, 0.0);
    for r in &rows {
        dp = dp.max((r.pressure_maxwell / r.pressure_direct - 1.0).abs());
        dk = dk.max((r.inverse_compressibility_maxwell / r.inverse_compressibility_direct - 1.0).abs());
        t.push_numbers(&[
            r.gamma,
            r.e,
            r.de_dgamma,
            r.pressure_direct,
            r.pressure_maxwell,
            r.inverse_compressibility_direct,
            r.inverse_compressibility_maxwell,
        ]);
    }
    t.meta("density", num(b.density));
    t.meta("max_rel_dev_pressure", num(dp));
    t.meta("max_rel_dev_inverse_compressibility", num(dk));
    Ok(t)
}

fn tfim_exact(config: &RunConfig) -> Result<Table> {
    let e = config.tfim_exact.as_ref().expect("validated");
    let c = e.c_axis.values();
    let maxwell = ctx("analytic", tfim_mx_maxwell(e.h_x, &c))?;
    let rows: Vec<Vec<f64>> = c
        .par_iter()
        .enumerate()
        .map(|(i, &cv)| {
            let p = ctx("analytic", TfimPoint::new(cv, e.h_x))?;
            let lambda_anomaly = if p.ratio > 1.0 { scaling_log_rhs(p.ratio, BETA).exp() / e.h_x } else { 0.0 };
            Ok(vec![
                cv,
                p.ratio,
                ctx("analytic", tfim_g2_exact(&p))?,
                ctx("analytic", tfim_dg2_dhx_compact(&p))?,
                ctx("analytic", tfim_mx_exact(&p))?,
                maxwell.y[i],
                maxwell.err_est[i],
                tfim_mz_exact(&p),
                tfim_mz_spin_half(&p),
                lambda_anomaly,
            ])
        })
        .collect::<Result<_>>()?;
    let mut t = Table::new(&[
        "c",
        "ratio",
        "g2",
        "dg2_dhx",
        "m_x_exact",
        "m_x_maxwell",
        "err_est",
        "m_z",
        "m_z_spin_half",
        "neg_dg2_dhz",
    ]);
    for r in rows {
        t.push_numbers(&r);
    }
    t.meta("h_x", num(e.h_x));
    Ok(t)
}

fn critical_fit(config: &RunConfig) -> Result<Table> {
    let f = config.critical_fit.as_ref().expect("validated");
    let ratios = f.ratio.values();
    let (beta, diag) = ctx("analytic", critical_exponent_fit(f.h_x, &ratios))?;
    let mut t = Table::new(&["ratio", "ln_ratio_minus_1", "ln_neg_dg2_dh"]);
    for &r in &ratios {
        t.push_numbers(&[r, (r - 1.0).ln(), scaling_log_rhs(r, BETA) - f.h_x.ln()]);
    }
    t.meta("beta", num(beta));
    t.meta("slope", num(diag.slope));
    t.meta("intercept", num(diag.intercept));
    t.meta("r_squared", num(diag.r_squared));
    t.meta("points", diag.points as u64);
    Ok(t)
}

fn yang_gaudin(config: &RunConfig) -> Result<Table> {
    let y = config.yang_gaudin.as_ref().expect("validated");
    let points: Vec<(f64, f64)> = y
        .temperature
        .values()
        .into_iter()
        .flat_map(|t| y.c.values().into_iter().map(move |c| (t, c)))
        .collect();
    let rows: Vec<Vec<Value>> = points
        .par_iter()
        .map(|&(t, c)| {
            let p = ctx("analytic", YangGaudinPoint::new(y.density, y.particles, c, t, y.polarization))?;
            let ideal = y.particles * ctx("analytic", ideal_fermi_entropy(t, y.density, y.polarization))?;
            let closed = ctx("analytic", yg_entropy_correction(&p, EntropyRoute::ClosedForm))?;
            let numeric = ctx("analytic", yg_entropy_correction(&p, EntropyRoute::MaxwellNumeric))?;
            Ok(vec![
                num(t),
                num(c),
                num(p.gamma),
                num(p.tau),
                Value::from(p.is_high_temperature()),
                num(yg_g2(&p)),
                num(ideal),
                num(ctx("analytic", yg_entropy(&p, EntropyRoute::ClosedForm))?),
                num(ctx("analytic", yg_entropy(&p, EntropyRoute::MaxwellNumeric))?),
                num(closed),
                num(numeric),
                if closed != 0.0 { num(numeric / closed) } else { Value::Null },
            ])
        })
        .collect::<Result<_>>()?;
    let mut t = Table::new(&[
        "temperature",
        "c",
        "gamma",
        "tau",
        "high_temperature",
        "g2",
        "entropy_ideal",
        "entropy_closed",
        "entropy_numeric",
        "correction_closed",
        "correction_numeric",
        "correction_ratio",
    ]);
    for r in rows {
        t.push(r);
    }
    t.meta("density", num(y.density));
    t.meta("particles", num(y.particles));
    t.meta("polarization", num(y.polarization));
    Ok(t)
}

fn run_check(config: &RunConfig) -> Vec<InvariantReport> {
    let modules = config.check.as_ref().map(|c| c.modules.clone()).unwrap_or_default();
    let mut reports = check::run(&modules, config.seed);
    if modules.is_empty() {
        reports.extend(cli_invariants(config.seed));
    }
    reports
}

/// A small noisy sweep: exercises the seeded generator and parallel
/// assembly.
fn probe_config(seed: u64) -> RunConfig {
    let mut c = RunConfig::default_for(Command::Sweep, None);
    c.seed = seed;
    c.noise_sigma = 1e-3;
    let s = c.sweep.as_mut().expect("sweep default");
    s.model.sites = 4;
    s.c_axis = Grid::Linspace { start: -1.0, stop: 1.0, points: 9 };
    s.x_axis.grid = Grid::Values(vec![0.5, 1.0, 2.0]);
    c
}

fn report(name: &str, outcome: std::result::Result<(bool, String), String>) -> InvariantReport {
    let (passed, detail) = outcome.unwrap_or_else(|e| (false, format!("error: {e}")));
    InvariantReport {
        module: "cli".into(),
        name: name.into(),
        passed,
        detail,
    }
}

fn cli_invariants(seed: u64) -> Vec<InvariantReport> {
    let render = |format: Format| -> std::result::Result<String, String> {
        Ok(execute(&probe_config(seed)).map_err(|e| e.to_string())?.table.render(format))
    };
    let identical = (|| {
        let mut same = true;
        for format in [Format::Csv, Format::Json] {
            same &= render(format)? == render(format)?;
        }
        Ok((same, "sweep with noise rendered twice as CSV and JSON".to_string()))
    })();
    let round_trip = (|| {
        let mut worst = String::new();
        for config in [probe_config(seed), RunConfig::default_for(Command::CriticalFit, None)] {
            let table = execute(&config).map_err(|e| e.to_string())?.table;
            let text = table.to_json();
            let back = Table::from_json(&text).map_err(|e| e.to_string())?;
            if back != table || back.to_json() != text {
                worst = format!("{} table changed on re-serialization", config.command.as_str());
            }
        }
        Ok((worst.is_empty(), if worst.is_empty() { "JSON parse and re-emit is the identity".into() } else { worst }))
    })();
    vec![report("byte_identical", identical), report("json_round_trip", round_trip)]
}
