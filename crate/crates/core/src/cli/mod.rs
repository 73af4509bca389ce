//! Command-line front end.
//!
//! Every subcommand reads a [`ScenarioConfig`], derives all randomness from
//! the base seed (`--seed` overrides the file), and writes its report to the
//! output directory through a temporary file and a rename. Floats are
//! printed in shortest round-trip form, so reruns with the same config and
//! seed produce identical bytes at any thread count.

pub mod config;
pub mod scenarios;

use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use serde::Serialize;
use serde_json::Value;

use crate::attractor::{
    beta_check, criterion_matrix, forward_expansion, geometric_depths, lemma61_falsify, pullback_absorption,
    AbsorptionScenario, ExpansionScenario, FalsifyReport, Orientation,
};
use crate::constants::{ConstantBundle, ConstantInputs, VarrhoVariant};
use crate::dispersion::{fit_c1_alpha, measure_dispersion, two_point_moment, BallSpec, MomentRow};
use crate::elliptic::grid::write_grid_binary;
use crate::elliptic::{verify_apriori, zvonkin_transform, EllipticProblem};
use crate::error::{Error, Result};
use crate::krylov::{verify_khasminskii, verify_krylov, OccupationFunctional};
use crate::mesh::dist;
use crate::model::probe::{beta_lower, beta_star, ShellSampling};
use crate::model::{ModelNorms, NormWindow, SdeModel, VectorFieldSpec};
use crate::plot::{heat_map, line_chart, ChartOptions, Series};
use crate::seed::derive_seed;
use crate::simulate::export::{write_csv, write_trajectory_binary};
use crate::simulate::{integrate_flow, FlowOptions, NoisePath, TimeGrid};
pub use config::{Format, ScenarioConfig};

#[derive(Debug, Parser)]
#[command(name = "sdeflow", version, about = "Stochastic flow simulation and bound checks")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Scenario file (TOML).
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Base seed; overrides the file.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Output directory; overrides the file (default `out`).
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand)]
pub enum Command {
    /// Integrate a set of initial points under one noise path.
    SimulateFlow,
    /// Track the image of a sphere and its growth.
    Dispersion,
    /// Two-point moments and the (c1, alpha) fit.
    TwoPoint,
    /// Evaluate the constant bundle for the model.
    Constants,
    /// Occupation-time bound over time windows.
    KrylovCheck,
    /// Exponential-moment bound for an occupation functional.
    KhasminskiiCheck,
    /// Solve for the drift-removing transform and certify it.
    ZvonkinSolve,
    /// Resolvent norm decay over a lambda sweep.
    PdeScaling,
    /// Pullback absorption probability and criterion matrix.
    AttractorPullback,
    /// Forward linear expansion of a large sphere.
    ExpansionForward,
    /// Monte Carlo falsification of the one-point tail bounds.
    Lemma61,
    /// Long-run drift average for the degenerate-noise example.
    #[command(name = "example-2-5")]
    Example25,
    /// Expansion bound for bounded coefficients against simulation.
    CaseStudyBounded,
}

impl Command {
    /// Label used in seed derivation and output names.
    pub fn name(self) -> &'static str {
        match self {
            Command::SimulateFlow => "simulate-flow",
            Command::Dispersion => "dispersion",
            Command::TwoPoint => "two-point",
            Command::Constants => "constants",
            Command::KrylovCheck => "krylov-check",
            Command::KhasminskiiCheck => "khasminskii-check",
            Command::ZvonkinSolve => "zvonkin-solve",
            Command::PdeScaling => "pde-scaling",
            Command::AttractorPullback => "attractor-pullback",
            Command::ExpansionForward => "expansion-forward",
            Command::Lemma61 => "lemma61",
            Command::Example25 => "example-2-5",
            Command::CaseStudyBounded => "case-study-bounded",
        }
    }
}

/// Writes `bytes` to `path` via a sibling temporary file and a rename.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
    std::fs::create_dir_all(dir)?;
    let name = path.file_name().and_then(|n| n.to_str()).unwrap_or("output");
    let tmp = dir.join(format!(".{name}.tmp{}", std::process::id()));
    std::fs::write(&tmp, bytes)?;
    std::fs::rename(&tmp, path)?;
    Ok(())
}

/// Flattens a JSON value into `key,value` rows with dotted keys.
pub fn flatten_json(v: &Value) -> String {
    fn walk(prefix: &str, v: &Value, out: &mut String) {
        let key = |k: &str| if prefix.is_empty() { k.to_string() } else { format!("{prefix}.{k}") };
        match v {
            Value::Object(m) => m.iter().for_each(|(k, x)| walk(&key(k), x, out)),
            Value::Array(a) => a.iter().enumerate().for_each(|(i, x)| walk(&key(&i.to_string()), x, out)),
            Value::String(s) => out.push_str(&format!("{prefix},{}\n", s.replace(',', ";"))),
            Value::Null => out.push_str(&format!("{prefix},\n")),
            other => out.push_str(&format!("{prefix},{other}\n")),
        }
    }
    let mut out = String::from("key,value\n");
    walk("", v, &mut out);
    out
}

/// Collected outputs of one run.
#[derive(Debug, Default)]
pub struct Outputs {
    pub files: Vec<(String, Vec<u8>)>,
}

impl Outputs {
    fn report<T: Serialize>(&mut self, name: &str, report: &T, table: Option<String>, format: Format) -> Result<Value> {
        let value = serde_json::to_value(report)?;
        match format {
            Format::Json => {
                let mut text = serde_json::to_string_pretty(&value)?;
                text.push('\n');
                self.files.push((format!("{name}.json"), text.into_bytes()));
            }
            Format::Csv => {
                let text = table.unwrap_or_else(|| flatten_json(&value));
                self.files.push((format!("{name}.csv"), text.into_bytes()));
            }
        }
        Ok(value)
    }

    fn raw(&mut self, name: &str, bytes: Vec<u8>) {
        self.files.push((name.to_string(), bytes));
    }

    pub fn write_to(&self, dir: &Path) -> Result<Vec<PathBuf>> {
        let mut written = Vec::new();
        for (name, bytes) in &self.files {
            let path = dir.join(name);
            write_atomic(&path, bytes)?;
            written.push(path);
        }
        Ok(written)
    }
}

/// Declared norms where available, otherwise measured on the configured
/// window.
pub fn resolve_norms(model: &SdeModel, cfg: &ScenarioConfig) -> Result<ModelNorms> {
    if let Ok(n) = model.declared_norms() {
        return Ok(n);
    }
    let window = NormWindow::cube(model.dim, cfg.norms.extent, cfg.norms.center_spacing);
    model.measure_norms(&window)
}

pub fn constant_inputs(model: &SdeModel, cfg: &ScenarioConfig) -> Result<ConstantInputs> {
    let n = resolve_norms(model, cfg)?;
    Ok(ConstantInputs {
        d: model.dim,
        k1: model.k1,
        k2: model.k2,
        p: model.p,
        rho: model.rho,
        norm_b: n.norm_b,
        norm_b1: n.norm_b1,
        norm_grad_sigma: n.norm_grad_sigma,
        sigma_sup: n.sigma_sup,
        omega_holder: cfg.norms.omega_holder,
        transformed: None,
        calibration: cfg.calibration.clone(),
    })
}

fn point_or(p: &[f64], dim: usize, default: Vec<f64>) -> Result<Vec<f64>> {
    if p.is_empty() {
        return Ok(default);
    }
    if p.len() != dim {
        return Err(Error::DimensionMismatch { expected: dim, got: p.len() });
    }
    Ok(p.to_vec())
}

fn unit(dim: usize) -> Vec<f64> {
    let mut e = vec![0.0; dim];
    e[0] = 1.0;
    e
}

/// Runs one subcommand and returns its files without touching the disk.
pub fn execute(command: Command, cfg: &ScenarioConfig) -> Result<Outputs> {
    let seed = derive_seed(cfg.seed, command.name(), 0);
    let fmt = cfg.format;
    let taming = cfg.taming;
    let mut out = Outputs::default();
    let chart = |title: &str, x: &str, y: &str| ChartOptions {
        title: title.into(),
        x_label: x.into(),
        y_label: y.into(),
        seed: Some(cfg.seed),
        ..Default::default()
    };
    match command {
        Command::SimulateFlow => {
            let m = cfg.model()?;
            let p = &cfg.simulate_flow;
            let initials = if p.initials.is_empty() { vec![vec![0.0; m.dim]] } else { p.initials.clone() };
            let grid = TimeGrid::horizon(p.horizon, p.dt)?;
            let noise = NoisePath::new(seed, m.dim, p.dt)?;
            let opts = FlowOptions {
                taming,
                snapshot_stride: p.snapshot_stride.max(1),
            };
            let tr = integrate_flow(m, &initials, &noise, &grid, &opts)?;
            let labels: Vec<String> = (0..initials.len()).map(|i| i.to_string()).collect();
            let mut csv = Vec::new();
            write_csv(&tr, &labels, &mut csv)?;
            let summary = serde_json::json!({
                "grid": tr.grid,
                "stride": tr.stride,
                "stats": tr.stats,
                "diverged": tr.diverged(),
                "snapshots": tr.snapshots,
            });
            out.report("trajectory", &summary, Some(String::from_utf8(csv).expect("ascii csv")), fmt)?;
            let mut bin = Vec::new();
            write_trajectory_binary(&tr, &mut bin)?;
            out.raw("trajectory.bin", bin);
        }
        Command::Dispersion => {
            let m = cfg.model()?;
            let p = &cfg.dispersion;
            let ball = p.ball.clone().unwrap_or(BallSpec {
                center: vec![0.0; m.dim],
                radius: 1.0,
                resolution: 16,
            });
            let r = measure_dispersion(m, &ball, p.horizon, p.dt, p.record_every, p.replicas, seed, taming)?;
            let mean_sup: Vec<(f64, f64)> = r
                .times
                .iter()
                .enumerate()
                .map(|(k, &t)| (t, r.replicas.iter().map(|s| s.sup_norm[k]).sum::<f64>() / r.replicas.len() as f64))
                .collect();
            let svg = line_chart(
                &[Series {
                    label: "mean sup |psi_t|".into(),
                    points: mean_sup,
                }],
                &chart("dispersion", "t", "sup norm"),
            )?;
            out.report("dispersion", &r, Some(r.to_csv()), fmt)?;
            out.raw("dispersion.svg", svg.into_bytes());
        }
        Command::TwoPoint => {
            let m = cfg.model()?;
            let p = &cfg.two_point;
            let x = point_or(&p.x, m.dim, vec![0.0; m.dim])?;
            let y = point_or(&p.y, m.dim, unit(m.dim))?;
            let mut rows = Vec::new();
            let mut table = String::from("r,horizon,sup_moment,sup_se,terminal_moment,terminal_se,excluded\n");
            for &r in &p.orders {
                for &h in &p.horizons {
                    let tp = two_point_moment(m, &x, &y, r, h, p.dt, p.replicas, seed, taming)?;
                    table.push_str(&format!(
                        "{},{},{},{},{},{},{}\n",
                        r, h, tp.sup_moment, tp.sup_se, tp.terminal_moment, tp.terminal_se, tp.excluded
                    ));
                    rows.push(tp);
                }
            }
            let fit = match p.alpha {
                Some(alpha) => {
                    let sep = dist(&x, &y);
                    let table: Vec<MomentRow> = rows
                        .iter()
                        .map(|t| MomentRow {
                            r: t.r,
                            horizon: t.horizon,
                            moment: t.sup_moment,
                            separation: sep,
                        })
                        .collect();
                    Some(fit_c1_alpha(&table, alpha)?)
                }
                None => None,
            };
            out.report("two_point", &serde_json::json!({ "moments": rows, "fit": fit }), Some(table), fmt)?;
        }
        Command::Constants => {
            let m = cfg.model()?;
            let mut inputs = constant_inputs(m, cfg)?;
            if cfg.constants.zvonkin_norms {
                let bundle = ConstantBundle::compute(&inputs)?;
                let z = zvonkin_transform(m, bundle.lambda_zvonkin, cfg.zvonkin.domain_radius, cfg.zvonkin.h, None)?;
                inputs.transformed = z.transformed;
            }
            if !cfg.constants.varrho_r.is_empty() && inputs.transformed.is_none() {
                return Err(Error::Config(
                    "varrho_r needs transformed norms: set constants.zvonkin_norms = true with a certifiable model".into(),
                ));
            }
            let bundle = ConstantBundle::compute(&inputs)?;
            let varrho: Vec<(f64, f64)> = cfg
                .constants
                .varrho_r
                .iter()
                .map(|&r| bundle.varrho(r, VarrhoVariant::Sobolev).map(|v| (r, v)))
                .collect::<Result<_>>()?;
            out.report("constants", &serde_json::json!({ "bundle": bundle, "varrho": varrho }), None, fmt)?;
        }
        Command::KrylovCheck => {
            let m = cfg.model()?;
            let p = &cfg.krylov;
            let functional = OccupationFunctional::measured(p.f.clone(), p.q, m.dim, p.norm_extent)?;
            let bundle = ConstantBundle::compute(&constant_inputs(m, cfg)?)?;
            let x0 = point_or(&p.x0, m.dim, vec![0.0; m.dim])?;
            let r = verify_krylov(
                m,
                &functional,
                &p.windows,
                &x0,
                p.dt,
                p.replicas,
                seed,
                bundle.gamma,
                cfg.calibration.c_kry(p.q),
                taming,
            )?;
            out.report("krylov", &r, None, fmt)?;
        }
        Command::KhasminskiiCheck => {
            let m = cfg.model()?;
            let p = &cfg.khasminskii;
            let functional = OccupationFunctional::measured(p.f.clone(), p.q, m.dim, p.norm_extent)?;
            let bundle = ConstantBundle::compute(&constant_inputs(m, cfg)?)?;
            let x0 = point_or(&p.x0, m.dim, vec![0.0; m.dim])?;
            let r = verify_khasminskii(
                m,
                &functional,
                p.lambda,
                p.horizon,
                &x0,
                p.dt,
                p.replicas,
                seed,
                bundle.gamma,
                cfg.calibration.c_kry(p.q),
                taming,
            )?;
            out.report("khasminskii", &r, None, fmt)?;
        }
        Command::ZvonkinSolve => {
            let m = cfg.model()?;
            let p = &cfg.zvonkin;
            let (lambda, threshold) = match p.lambda {
                Some(l) => (l, ConstantBundle::compute(&constant_inputs(m, cfg)?).ok().map(|b| b.lambda_zvonkin)),
                None => {
                    let b = ConstantBundle::compute(&constant_inputs(m, cfg)?)?;
                    (b.lambda_zvonkin, Some(b.lambda_zvonkin))
                }
            };
            let z = zvonkin_transform(m, lambda, p.domain_radius, p.h, threshold)?;
            let cert = z.certificate();
            let mut table = String::new();
            let d = z.dims;
            for a in 0..d {
                table.push_str(&format!("x{a},"));
            }
            for l in 0..d {
                table.push_str(&format!("u{l},"));
            }
            for l in 0..d {
                table.push_str(&format!("b_tilde{l},"));
            }
            table.pop();
            table.push('\n');
            for k in 0..z.u[0].len() {
                let mut row: Vec<String> = z.u[0].coord(k).iter().map(|v| v.to_string()).collect();
                row.extend(z.u.iter().map(|g| g.values[k].to_string()));
                row.extend(z.b_tilde.iter().map(|g| g.values[k].to_string()));
                table.push_str(&row.join(","));
                table.push('\n');
            }
            let mut text = serde_json::to_string_pretty(&cert)?;
            text.push('\n');
            out.raw("zvonkin_certificate.json", text.into_bytes());
            match fmt {
                Format::Csv => out.raw("zvonkin_grid.csv", table.into_bytes()),
                Format::Json => {
                    let mut t = serde_json::to_string(&z)?;
                    t.push('\n');
                    out.raw("zvonkin_grid.json", t.into_bytes());
                }
            }
            let mut bin = Vec::new();
            let mut comps: Vec<&crate::elliptic::GridFunction> = z.u.iter().collect();
            comps.extend(z.b_tilde.iter());
            write_grid_binary(&comps, &mut bin)?;
            out.raw("zvonkin_grid.bin", bin);
        }
        Command::PdeScaling => {
            let m = cfg.model()?;
            let p = &cfg.pde_scaling;
            let drift = VectorFieldSpec::Sum {
                terms: vec![m.b1.clone(), m.b2.clone()],
            };
            let threshold = ConstantBundle::compute(&constant_inputs(m, cfg)?).ok().map(|b| b.lambda_min_pde);
            let r = verify_apriori(
                |lambda| {
                    let mut e = EllipticProblem::from_specs(lambda, m.dim, &m.sigma, &drift, &p.f, p.domain_radius, p.h);
                    e.lambda_threshold = threshold.filter(|t| t.is_finite());
                    e
                },
                &p.lambdas,
                p.p,
                p.p_prime,
            )?;
            let series = |label: &str, ys: &[f64]| Series {
                label: label.into(),
                points: r.lambdas.iter().copied().zip(ys.iter().copied()).collect(),
            };
            let mut opts = chart("resolvent scaling", "lambda", "norm");
            opts.log_x = true;
            opts.log_y = true;
            let svg = line_chart(&[series("|u|", &r.u_norms), series("|grad u|", &r.grad_norms)], &opts)?;
            let mut table = String::from("lambda,u_norm,grad_norm\n");
            for k in 0..r.lambdas.len() {
                table.push_str(&format!("{},{},{}\n", r.lambdas[k], r.u_norms[k], r.grad_norms[k]));
            }
            out.report("pde_scaling", &r, Some(table), fmt)?;
            out.raw("pde_scaling.svg", svg.into_bytes());
        }
        Command::AttractorPullback => {
            let m = cfg.model()?;
            let p = &cfg.pullback;
            let beta = advisory_beta(m, cfg, Orientation::Inward, p.beta_shell);
            let scenario = AbsorptionScenario {
                gamma: p.gamma,
                r: p.r,
                depths: p.depths.clone(),
                mesh_resolution: p.mesh_resolution,
                replicas: p.replicas,
                dt: p.dt,
                base_seed: seed,
                taming,
            };
            let r = pullback_absorption(m, &scenario, beta)?;
            let mut table = String::from("replica,pass,worst,reason\n");
            for o in &r.outcomes {
                table.push_str(&format!("{},{},{},{}\n", o.replica, o.pass, o.worst, o.reason.as_deref().unwrap_or("")));
            }
            out.report("pullback", &r, Some(table), fmt)?;
            if let Some(c) = &p.criterion {
                let cm = criterion_matrix(
                    m,
                    &c.r_grid,
                    &c.big_r_grid,
                    &geometric_depths(c.horizon),
                    p.mesh_resolution,
                    c.replicas,
                    p.dt,
                    derive_seed(cfg.seed, "criterion", 0),
                    taming,
                )?;
                let last = cm.probability.last().expect("nonempty depths");
                let rows: Vec<String> = cm.r_grid.iter().map(|r| format!("r={r}")).collect();
                let cols: Vec<String> = cm.big_r_grid.iter().map(|r| format!("R={r}")).collect();
                let svg = heat_map(last, &rows, &cols, &chart("criterion matrix", "R", "r"))?;
                out.report("criterion", &cm, Some(cm.to_csv()), fmt)?;
                out.raw("criterion.svg", svg.into_bytes());
            }
        }
        Command::ExpansionForward => {
            let m = cfg.model()?;
            let p = &cfg.expansion;
            let beta = advisory_beta(m, cfg, Orientation::Outward, p.beta_shell);
            let scenario = ExpansionScenario {
                r: p.r,
                gamma: p.gamma,
                horizon: p.horizon,
                check_every: p.check_every,
                mesh_resolution: p.mesh_resolution,
                replicas: p.replicas,
                dt: p.dt,
                base_seed: seed,
                taming,
            };
            let r = forward_expansion(m, &scenario, beta)?;
            let mut table = String::from("replica,pass,margin,reason\n");
            for o in &r.outcomes {
                table.push_str(&format!("{},{},{},{}\n", o.replica, o.pass, o.worst, o.reason.as_deref().unwrap_or("")));
            }
            out.report("expansion", &r, Some(table), fmt)?;
        }
        Command::Lemma61 => {
            let m = cfg.model()?;
            if cfg.lemma61.scenarios.is_empty() {
                return Err(Error::Config("lemma61 needs at least one [[lemma61.scenarios]] entry".into()));
            }
            let mut reports: Vec<FalsifyReport> = Vec::new();
            let mut table = String::from("scenario,case,bound,vacuous,empirical,std_error,margin,violated\n");
            for (i, s) in cfg.lemma61.scenarios.iter().enumerate() {
                let mut params = s.params.clone();
                if s.sample_beta {
                    let at = if s.case == 3 { params.big_r } else { params.r };
                    let cap = s.shell_cap.unwrap_or(4.0 * at.max(params.r1).max(params.r2).max(params.big_r));
                    let sampling = ShellSampling::default();
                    params.beta_upper = beta_star(m, at, cap, &sampling)?.value;
                    params.beta_lower = beta_lower(m, at, cap, &sampling)?.value;
                }
                let r = lemma61_falsify(m, s.case, &params, s.replicas, s.dt, derive_seed(seed, "scenario", i as u64), taming)?;
                table.push_str(&format!(
                    "{},{},{},{},{},{},{},{}\n",
                    i, s.case, r.bound.value, r.bound.vacuous, r.empirical, r.std_error, r.margin, r.violated
                ));
                reports.push(r);
            }
            out.report("lemma61", &reports, Some(table), fmt)?;
        }
        Command::Example25 => {
            let r = scenarios::run_example_2_5(&cfg.example_2_5, seed, taming)?;
            let mut table = String::from("eps,empirical,oracle,relative_deviation\n");
            for row in &r.rows {
                table.push_str(&format!("{},{},{},{}\n", row.eps, row.empirical, row.oracle, row.relative_deviation));
            }
            out.report("example_2_5", &r, Some(table), fmt)?;
        }
        Command::CaseStudyBounded => {
            let m = cfg.model()?;
            let r = scenarios::run_bounded_case_study(m, &cfg.case_study, &cfg.calibration, seed, taming)?;
            out.report("case_study", &r, None, fmt)?;
        }
    }
    Ok(out)
}

/// β advisory against `β₀` from the constants engine; `None` when the
/// constants cannot be evaluated for this model.
fn advisory_beta(model: &SdeModel, cfg: &ScenarioConfig, o: Orientation, shell: f64) -> Option<crate::attractor::BetaCheck> {
    let bundle = ConstantBundle::compute(&constant_inputs(model, cfg).ok()?).ok()?;
    beta_check(model, o, shell, bundle.beta_zero).ok()
}

/// Parses flags, runs the subcommand and writes its outputs.
pub fn run(cli: Cli) -> Result<Vec<PathBuf>> {
    let mut cfg = match &cli.config {
        Some(p) => ScenarioConfig::load(p)?,
        None => ScenarioConfig::default(),
    };
    if let Some(s) = cli.seed {
        cfg.seed = s;
    }
    if let Some(f) = cli.format {
        cfg.format = f;
    }
    let dir = cli.out.clone().or_else(|| cfg.out.clone()).unwrap_or_else(|| PathBuf::from("out"));
    let outputs = match cli.threads {
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .map_err(|e| Error::Config(e.to_string()))?;
            pool.install(|| execute(cli.command, &cfg))?
        }
        None => execute(cli.command, &cfg)?,
    };
    outputs.write_to(&dir)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flatten_is_sorted_and_flat() {
        let v = serde_json::json!({"b": [1, 2], "a": {"x": 0.5, "y": "s,t"}, "c": null});
        assert_eq!(flatten_json(&v), "key,value\na.x,0.5\na.y,s;t\nb.0,1\nb.1,2\nc,\n");
    }

    #[test]
    fn atomic_write_replaces() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("sub/x.txt");
        write_atomic(&p, b"one").unwrap();
        write_atomic(&p, b"two").unwrap();
        assert_eq!(std::fs::read(&p).unwrap(), b"two");
        assert_eq!(std::fs::read_dir(dir.path().join("sub")).unwrap().count(), 1);
    }

    #[test]
    fn parses_subcommands() {
        let c = Cli::try_parse_from(["sdeflow", "example-2-5", "--seed", "3", "--format", "json"]).unwrap();
        assert_eq!(c.command, Command::Example25);
        assert_eq!(c.seed, Some(3));
        for name in [
            "simulate-flow",
            "dispersion",
            "two-point",
            "constants",
            "krylov-check",
            "khasminskii-check",
            "zvonkin-solve",
            "pde-scaling",
            "attractor-pullback",
            "expansion-forward",
            "lemma61",
            "case-study-bounded",
        ] {
            let c = Cli::try_parse_from(["sdeflow", name]).unwrap();
            assert_eq!(c.command.name(), name);
        }
    }

    #[test]
    fn model_required() {
        assert!(matches!(
            execute(Command::SimulateFlow, &ScenarioConfig::default()),
            Err(Error::Config(_))
        ));
    }
}
