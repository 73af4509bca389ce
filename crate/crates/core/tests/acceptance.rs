//! End-to-end acceptance checks. Runs without the libtest harness so every
//! criterion prints exactly one PASS/FAIL line; the process exits nonzero if
//! any criterion fails.

use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use sdeflow::attractor::{
    criterion_matrix, geometric_depths, lemma61_falsify, pullback_absorption, AbsorptionScenario, Lemma61Params,
};
use sdeflow::cli::config::Example25Params;
use sdeflow::cli::scenarios::run_example_2_5;
use sdeflow::constants::{beta_zero, gamma_factor, kappa_star, lambda_min_pde};
use sdeflow::dispersion::{rate_function_i, ChainingParams};
use sdeflow::elliptic::{solve, verify_apriori, zvonkin_transform, EllipticProblem, RESIDUAL_TOL};
use sdeflow::krylov::{verify_khasminskii, verify_krylov, OccupationFunctional};
use sdeflow::model::probe::{beta_lower, beta_star, ShellSampling};
use sdeflow::model::{bump_profile, DiffusionSpec, ScalarFieldSpec, VectorFieldSpec};
use sdeflow::simulate::{advance, verify_cocycle};
use sdeflow::{FlowEnsemble, NoisePath, SdeModel, Taming};

type Outcome = Result<String, String>;

fn ensure(ok: bool, msg: impl Into<String>) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn e2s<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

fn additive_exactness() -> Outcome {
    let m = SdeModel::brownian(2, VectorFieldSpec::Zero);
    let noise = NoisePath::new(101, 2, 1e-3).map_err(e2s)?;
    let mut ens = FlowEnsemble::new(&m, &[vec![0.3, -1.7], vec![2.9, 0.4]], 0, 1e-3).map_err(e2s)?;
    let d0 = ens.distance(0, 1).to_bits();
    let mut drift = 0u64;
    advance(&m, &mut ens, &noise, 100_000, Taming::None, |e| {
        if e.distance(0, 1).to_bits() != d0 {
            drift += 1;
        }
    })
    .map_err(e2s)?;
    ensure(drift == 0, format!("{drift} of 100000 steps changed the distance"))?;
    Ok("distance bit-identical over 1e5 steps".into())
}

fn ou_oracle() -> Outcome {
    let m = SdeModel::brownian(1, VectorFieldSpec::Linear { scale: -1.0 });
    let dt = 1e-3;
    let noise = NoisePath::new(7, 1, dt).map_err(e2s)?;
    let (x, y) = (0.25, 1.75);
    let mut ens = FlowEnsemble::new(&m, &[vec![x], vec![y]], 0, dt).map_err(e2s)?;
    let mut worst = 0.0f64;
    let mut n = 0i32;
    advance(&m, &mut ens, &noise, 1000, Taming::None, |e| {
        n += 1;
        let exact = (y - x) * (1.0 - dt).powi(n);
        worst = worst.max((e.distance(0, 1) / exact - 1.0).abs());
    })
    .map_err(e2s)?;
    ensure(worst <= 1e-12, format!("discrete recursion deviates by {worst:e}"))?;
    let cont = (ens.distance(0, 1) / ((y - x) * (-1.0f64).exp()) - 1.0).abs();
    ensure(cont <= 2e-3, format!("continuous deviation {cont:e} at t = 1"))?;
    Ok(format!("discrete rel dev {worst:.1e}, continuous rel dev {cont:.2e}"))
}

fn cocycle() -> Outcome {
    let mut ramp = SdeModel::brownian(2, VectorFieldSpec::SaturatedRadial { beta: -2.0 });
    ramp.sigma = DiffusionSpec::RadialRamp {
        base: 1.0,
        slope: 0.2,
        cap: 2.0,
    };
    ramp.k2 = 1.96;
    let models = [
        SdeModel::brownian(2, VectorFieldSpec::Zero),
        SdeModel::brownian(1, VectorFieldSpec::Linear { scale: -1.0 }),
        ramp,
    ];
    let splits = [(0.25, 0.75), (0.5, 0.5), (0.9, 0.1)];
    let mut checked = 0;
    for (k, m) in models.iter().enumerate() {
        let noise = NoisePath::new(30 + k as u64, m.dim, 1e-3).map_err(e2s)?;
        let x = vec![0.7; m.dim];
        for &(s, t) in &splits {
            let r = verify_cocycle(m, &x, s, t, &noise, Taming::Clip).map_err(e2s)?;
            ensure(r.exact, format!("model {k}, split ({s}, {t}): deviation {:e}", r.max_deviation))?;
            checked += 1;
        }
    }
    Ok(format!("{checked} model/split pairs bit-identical"))
}

/// `max(0, sup_{r >= d} r (γ - c1 r^α))` by golden-section search on the
/// concave objective.
fn rate_brute_force(gamma: f64, p: &ChainingParams) -> f64 {
    let d = p.d as f64;
    let g = |r: f64| r * (gamma - p.c1 * r.powf(p.alpha));
    let mut hi = 2.0 * d;
    while g(hi) > g(hi / 2.0) {
        hi *= 2.0;
    }
    let (mut a, mut b) = (d, hi);
    let phi = 0.5 * (5f64.sqrt() - 1.0);
    for _ in 0..400 {
        let c = b - phi * (b - a);
        let e = a + phi * (b - a);
        if g(c) < g(e) {
            a = c;
        } else {
            b = e;
        }
    }
    g(0.5 * (a + b)).max(g(d)).max(0.0)
}

fn rate_function() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut worst = 0.0f64;
    for _ in 0..20 {
        let p = ChainingParams::boundary(
            rng.random_range(0.1..3.0),
            rng.random_range(0.2..2.5),
            rng.random_range(1..5),
            1.0,
            0.0,
        );
        let lo = p.c1 * (p.d as f64).powf(p.alpha);
        let gamma = rng.random_range(0.0..4.0 * (p.alpha + 1.0) * lo);
        let got = rate_function_i(gamma, &p).map_err(e2s)?;
        let want = rate_brute_force(gamma, &p);
        let rel = if want == 0.0 { got.abs() } else { (got / want - 1.0).abs() };
        ensure(rel <= 1e-6, format!("gamma {gamma}, {p:?}: {got} vs {want}"))?;
        worst = worst.max(rel);

        let hi = (p.alpha + 1.0) * lo;
        for b in [lo, hi] {
            let left = rate_function_i(b * (1.0 - 1e-15), &p).map_err(e2s)?;
            let right = rate_function_i(b * (1.0 + 1e-15), &p).map_err(e2s)?;
            let at = rate_function_i(b, &p).map_err(e2s)?;
            let jump = (right - left).abs().max((at - left).abs());
            ensure(jump <= 1e-12 * at.max(1.0), format!("jump {jump:e} at breakpoint {b}"))?;
        }
        let top = 3.0 * hi;
        for k in 0..100 {
            let a = top * rng.random::<f64>();
            let c = top * rng.random::<f64>();
            let mid = rate_function_i(0.5 * (a + c), &p).map_err(e2s)?;
            let avg = 0.5 * (rate_function_i(a, &p).map_err(e2s)? + rate_function_i(c, &p).map_err(e2s)?);
            ensure(mid <= avg + 1e-12 * avg.max(1.0), format!("midpoint check {k} failed: {mid} > {avg}"))?;
        }
    }
    Ok(format!("20 parameter sets, worst rel dev {worst:.1e}"))
}

fn constants_spot() -> Outcome {
    let inf = f64::INFINITY;
    let g = gamma_factor(1.0, 1.0, 0.0, 1.0, inf, inf, 2).map_err(e2s)?;
    let b = beta_zero(1.0, 1.0, 1.0, 1.0).map_err(e2s)?;
    let l = lambda_min_pde(1.0, 1.0, 1.0, 1.0, 0.0, inf, 1, 1.0).map_err(e2s)?;
    let k = kappa_star(1.0, 1.0, 0.0, 0.0, inf, inf, 2, 1.0).map_err(e2s)?;
    ensure(
        g == 2.0 && b == 8.0 && l == 4.0 && k == 1.0,
        format!("got Γ={g}, β₀={b}, λ_min={l}, κ*={k}"),
    )?;
    Ok("Γ=2, β₀=8, λ_min=4, κ*=1".into())
}

fn manufactured_error(h: f64) -> Result<f64, String> {
    let p = EllipticProblem {
        lambda: 1.0,
        a_scale: 1.0,
        a: Box::new(|_, out| out[0] = 1.0),
        b: Box::new(|_, out| out[0] = 1.0),
        f: Box::new(|x| {
            let u = (-x[0] * x[0]).exp();
            u - (4.0 * x[0] * x[0] - 2.0) * u - 2.0 * x[0] * u
        }),
        domain_radius: 8.0,
        h,
        dims: 1,
        lambda_threshold: None,
    };
    let s = solve(&p).map_err(e2s)?;
    ensure(s.residual <= RESIDUAL_TOL, format!("residual {:e}", s.residual))?;
    Ok((0..s.u.len())
        .map(|k| (s.u.values[k] - (-s.u.coord(k)[0].powi(2)).exp()).abs())
        .fold(0.0, f64::max))
}

fn elliptic_convergence() -> Outcome {
    let ratio = manufactured_error(0.02)? / manufactured_error(0.01)?;
    ensure((3.5..=4.5).contains(&ratio), format!("error ratio {ratio}"))?;
    Ok(format!("error ratio {ratio:.3}"))
}

fn apriori_scaling() -> Outcome {
    let inf = f64::INFINITY;
    let r = verify_apriori(
        |lambda| EllipticProblem {
            lambda,
            a_scale: 1.0,
            a: Box::new(|_, o| o[0] = 1.0),
            b: Box::new(|_, o| o[0] = 0.0),
            f: Box::new(|x| bump_profile(x[0])),
            domain_radius: 8.0,
            h: 0.02,
            dims: 1,
            lambda_threshold: None,
        },
        &[10.0, 100.0, 1e3, 1e4],
        inf,
        inf,
    )
    .map_err(e2s)?;
    ensure(r.pass_u, format!("slope {} vs predicted {}", r.slope_u, r.predicted_u))?;
    Ok(format!("slope {:.4} <= {} + 0.1", r.slope_u, r.predicted_u))
}

fn zvonkin_certificate() -> Outcome {
    let m = SdeModel::brownian(
        1,
        VectorFieldSpec::Bump {
            height: 1.0,
            width: 1.0,
            component: 0,
        },
    );
    let z = zvonkin_transform(&m, 1e3, 8.0, 0.01, None).map_err(e2s)?;
    ensure(z.certified, format!("not certified: u {}, grad {}", z.u_sup, z.grad_u_sup))?;
    ensure(z.u_sup < 0.5 && z.grad_u_sup < 0.5, "sup bounds")?;
    ensure(z.round_trip_error <= 1e-8, format!("round trip {:e}", z.round_trip_error))?;
    let (lo, hi) = (m.k1 / 4.0 - 1e-6, 9.0 * m.k2 / 4.0 + 1e-6);
    ensure(
        z.ellipticity_min >= lo && z.ellipticity_max <= hi,
        format!("ellipticity [{}, {}]", z.ellipticity_min, z.ellipticity_max),
    )?;
    Ok(format!(
        "|U| {:.2e}, |∇U| {:.2e}, round trip {:.1e}, ellipticity [{:.4}, {:.4}]",
        z.u_sup, z.grad_u_sup, z.round_trip_error, z.ellipticity_min, z.ellipticity_max
    ))
}

fn krylov_form() -> Outcome {
    let m = SdeModel::brownian(1, VectorFieldSpec::Zero);
    let gamma = gamma_factor(1.0, 1.0, 0.0, 0.0, f64::INFINITY, f64::INFINITY, 1).map_err(e2s)?;
    let f = OccupationFunctional::measured(
        ScalarFieldSpec::SmoothIndicator { inner: 1.0, outer: 1.25 },
        f64::INFINITY,
        1,
        3.0,
    )
    .map_err(e2s)?;
    let windows = [(0.0, 1.0), (0.0, 2.0), (0.0, 4.0)];
    let r = verify_krylov(&m, &f, &windows, &[0.0], 1e-2, 10_000, 9, gamma, 1.0, Taming::Clip).map_err(e2s)?;
    let c: Vec<f64> = r.windows.iter().map(|w| w.calibration_needed).collect();
    let (lo, hi) = c.iter().fold((f64::INFINITY, 0.0f64), |(a, b), &v| (a.min(v), b.max(v)));
    ensure(lo > 0.0 && hi / lo <= 2.0, format!("calibrations {c:?}"))?;
    let one = OccupationFunctional {
        f: ScalarFieldSpec::Constant { value: 1.0 },
        q: f64::INFINITY,
        norm_f: 1.0,
    };
    let r1 = verify_krylov(&m, &one, &windows, &[0.0], 1e-2, 100, 9, gamma, 1.0, Taming::Clip).map_err(e2s)?;
    ensure(r1.c_hat <= 1.0 / gamma, format!("f = 1 needs {} > 1/Γ", r1.c_hat))?;
    Ok(format!("Ĉ per window {c:.3?} (spread {:.3}); f=1 needs {:.3} <= 1/Γ", hi / lo, r1.c_hat))
}

fn khasminskii() -> Outcome {
    let m = SdeModel::brownian(1, VectorFieldSpec::Zero);
    let gamma = gamma_factor(1.0, 1.0, 0.0, 0.0, f64::INFINITY, f64::INFINITY, 1).map_err(e2s)?;
    let constant = |v: f64| OccupationFunctional {
        f: ScalarFieldSpec::Constant { value: v },
        q: f64::INFINITY,
        norm_f: v,
    };
    let z = verify_khasminskii(&m, &constant(0.0), 0.1, 1.0, &[0.0], 1e-2, 100, 3, gamma, 1.0, Taming::Clip)
        .map_err(e2s)?;
    ensure(z.empirical == 1.0 && z.bound == 2.0 && z.pass, format!("f = 0: {} vs {}", z.empirical, z.bound))?;
    let one = verify_khasminskii(&m, &constant(1.0), 0.1, 1.0, &[0.0], 1e-2, 100, 3, gamma, 1.0, Taming::Clip)
        .map_err(e2s)?;
    ensure(one.empirical == 0.1f64.exp(), format!("deterministic integrand gives {}", one.empirical))?;
    ensure(one.pass, format!("f = 1: {} > bound {}", one.empirical, one.bound))?;
    let f = OccupationFunctional::measured(
        ScalarFieldSpec::SmoothIndicator { inner: 1.0, outer: 1.25 },
        f64::INFINITY,
        1,
        3.0,
    )
    .map_err(e2s)?;
    let b = verify_khasminskii(&m, &f, 0.1, 1.0, &[0.0], 1e-2, 2000, 3, gamma, 1.0, Taming::Clip).map_err(e2s)?;
    ensure(b.pass, format!("bounded f: {} > bound {}", b.empirical, b.bound))?;
    Ok(format!(
        "f=0: 1 <= 2; f=1: e^0.1 exact; indicator: {:.4} <= {:.4}",
        b.empirical, b.bound
    ))
}

fn example_2_5() -> Outcome {
    let p = Example25Params {
        epsilons: vec![1.0, 0.5, 0.25],
        q: 0.2,
        horizon: 1e4,
        dt: 1e-3,
        replicas: 1,
    };
    let r = run_example_2_5(&p, 25, Taming::Clip).map_err(e2s)?;
    let first = &r.rows[0];
    let avgs: Vec<f64> = r.rows.iter().map(|x| x.empirical).collect();
    ensure(
        first.relative_deviation <= 0.1,
        format!("ε=1: {} vs oracle {}", first.empirical, first.oracle),
    )?;
    ensure(r.increasing_as_eps_decreases, format!("averages {avgs:?}"))?;
    Ok(format!(
        "ε=1 {:.4} vs oracle {:.4} ({:.1}%), averages {avgs:.4?}",
        first.empirical,
        first.oracle,
        100.0 * first.relative_deviation
    ))
}

fn attractor_dichotomy() -> Outcome {
    let inward = SdeModel::brownian(2, VectorFieldSpec::SaturatedRadial { beta: -5.0 });
    let b0 = beta_zero(1.0, 1.0, 0.0, 1.0).map_err(e2s)?;
    ensure(b0 == 0.0, format!("β₀ = {b0}"))?;
    let s = AbsorptionScenario {
        gamma: 0.0,
        r: 5.0,
        depths: vec![1.0, 2.0, 4.0, 8.0],
        mesh_resolution: 16,
        replicas: 200,
        dt: 1e-2,
        base_seed: 12,
        taming: Taming::Clip,
    };
    let a = pullback_absorption(&inward, &s, None).map_err(e2s)?;
    ensure(a.probability >= 0.95, format!("absorption probability {}", a.probability))?;
    let bm = SdeModel::brownian(2, VectorFieldSpec::Zero);
    let cm = criterion_matrix(
        &bm,
        &[1.0, 2.0, 4.0],
        &[2.0, 4.0, 8.0],
        &geometric_depths(8.0),
        16,
        100,
        1e-2,
        13,
        Taming::Clip,
    )
    .map_err(e2s)?;
    for h in 1..cm.probability.len() {
        for i in 0..cm.r_grid.len() {
            for j in 0..cm.big_r_grid.len() {
                let (prev, cur) = (cm.probability[h - 1][i][j], cm.probability[h][i][j]);
                ensure(cur <= prev, format!("increase {prev} -> {cur} at horizon index {h}"))?;
            }
        }
    }
    let last = cm.probability.last().expect("depths");
    Ok(format!(
        "absorption {:.3}; Brownian P(r=1, R=8) at horizon 8: {:.2}",
        a.probability,
        last[0][2]
    ))
}

fn lemma61() -> Outcome {
    let samp = ShellSampling::default();
    let base = Lemma61Params {
        t: 1.0,
        r: 1.0,
        r1: 0.0,
        r2: 0.0,
        big_r: 0.0,
        delta: 0.0,
        delta1: 0.0,
        beta_upper: 0.0,
        beta_lower: 0.0,
        gamma: 1.0,
        norm_b1: 0.0,
        k1: 1.0,
        k2: 1.0,
        start: None,
    };
    let inward = SdeModel::brownian(2, VectorFieldSpec::ConstantRadial { beta: -3.0 });
    let outward = SdeModel::brownian(2, VectorFieldSpec::ConstantRadial { beta: 2.0 });

    let mut c1 = base.clone();
    c1.r1 = 7.0;
    c1.r2 = 2.0;
    c1.beta_upper = beta_star(&inward, c1.r, 16.0, &samp).map_err(e2s)?.value;

    let mut c3 = base.clone();
    c3.big_r = 2.0;
    c3.delta = 1.0;
    c3.delta1 = 0.001;
    c3.beta_upper = beta_star(&inward, c3.big_r, 16.0, &samp).map_err(e2s)?.value;

    let mut c5 = base.clone();
    c5.t = 4.0;
    c5.r1 = 5.0;
    c5.beta_lower = beta_lower(&outward, c5.r, 20.0, &samp).map_err(e2s)?.value;

    let runs = [(1u8, &inward, c1, 1e-3), (3, &inward, c3, 1e-5), (5, &outward, c5, 1e-3)];
    let mut summary = Vec::new();
    for (case, model, params, dt) in runs {
        let r = lemma61_falsify(model, case, &params, 2000, dt, 61 + case as u64, Taming::Clip).map_err(e2s)?;
        ensure(!r.bound.vacuous, format!("case {case}: vacuous bound {}", r.bound.value))?;
        ensure(
            !r.violated,
            format!("case {case}: empirical {} - 2SE > bound {}", r.empirical, r.bound.value),
        )?;
        summary.push(format!("case {case}: {:.3} <= {:.2e}", r.empirical, r.bound.value));
    }
    Ok(summary.join("; "))
}

fn run_cli(dir: &Path, config: &Path, sub: &str, threads: usize, format: &str) -> Result<(), String> {
    let status = Command::new(env!("CARGO_BIN_EXE_sdeflow"))
        .args([sub, "--config"])
        .arg(config)
        .arg("--out")
        .arg(dir)
        .args(["--threads", &threads.to_string(), "--format", format, "--seed", "2024"])
        .output()
        .map_err(e2s)?;
    ensure(
        status.status.success(),
        format!("{sub} failed: {}", String::from_utf8_lossy(&status.stderr)),
    )
}

fn read_dir_sorted(dir: &Path) -> Result<Vec<(String, Vec<u8>)>, String> {
    let mut files: Vec<(String, Vec<u8>)> = std::fs::read_dir(dir)
        .map_err(e2s)?
        .map(|e| {
            let e = e.map_err(e2s)?;
            Ok((e.file_name().to_string_lossy().into_owned(), std::fs::read(e.path()).map_err(e2s)?))
        })
        .collect::<Result<_, String>>()?;
    files.sort();
    Ok(files)
}

const REPRO_CONFIG: &str = r#"
[model]
dim = 2
k1 = 1.0
k2 = 1.0
sigma = { kind = "scalar", eps = 1.0 }
b2 = { kind = "saturated_radial", beta = -2.0 }

[simulate_flow]
initials = [[0.0, 0.0], [1.0, -1.0]]
horizon = 0.5
dt = 0.01
snapshot_stride = 5

[dispersion]
horizon = 1.0
dt = 0.01
record_every = 10
replicas = 16

[two_point]
orders = [1.0, 2.0]
horizons = [0.5]
dt = 0.01
replicas = 40

[pullback]
r = 2.0
depths = [1.0, 2.0]
mesh_resolution = 8
replicas = 24
dt = 0.01

[pullback.criterion]
r_grid = [1.0, 2.0]
big_r_grid = [2.0, 4.0]
horizon = 2.0
replicas = 12

[example_2_5]
epsilons = [1.0, 0.5]
horizon = 5.0
dt = 0.01
"#;

fn reproducibility() -> Outcome {
    let tmp = tempfile::tempdir().map_err(e2s)?;
    let config = tmp.path().join("scenario.toml");
    std::fs::write(&config, REPRO_CONFIG).map_err(e2s)?;
    let subs = ["simulate-flow", "dispersion", "two-point", "attractor-pullback", "example-2-5"];
    let mut compared = 0;
    for format in ["csv", "json"] {
        let mut runs = Vec::new();
        for (k, threads) in [1, 4, 4].into_iter().enumerate() {
            let dir = tmp.path().join(format!("{format}-{k}"));
            for sub in subs {
                run_cli(&dir, &config, sub, threads, format)?;
            }
            runs.push(read_dir_sorted(&dir)?);
        }
        ensure(!runs[0].is_empty(), "no outputs written")?;
        for other in &runs[1..] {
            ensure(other.len() == runs[0].len(), "different output file sets")?;
            for ((na, a), (nb, b)) in runs[0].iter().zip(other) {
                ensure(na == nb && a == b, format!("{na} differs between runs"))?;
                compared += 1;
            }
        }
    }
    Ok(format!("{compared} file comparisons byte-identical across 1 and 4 threads"))
}

type Criterion = (&'static str, Duration, fn() -> Outcome);

fn main() {
    let criteria: [Criterion; 14] = [
        ("additive-noise exactness", Duration::from_secs(1), additive_exactness),
        ("OU oracle", Duration::from_secs(1), ou_oracle),
        ("cocycle bit-exactness", Duration::from_secs(5), cocycle),
        ("rate function", Duration::from_secs(1), rate_function),
        ("constants spot values", Duration::from_secs(1), constants_spot),
        ("elliptic convergence", Duration::from_secs(10), elliptic_convergence),
        ("a-priori lambda scaling", Duration::from_secs(30), apriori_scaling),
        ("Zvonkin certificate", Duration::from_secs(30), zvonkin_certificate),
        ("Krylov functional form", Duration::from_secs(60), krylov_form),
        ("Khasminskii", Duration::from_secs(60), khasminskii),
        ("degenerate-noise drift average", Duration::from_secs(300), example_2_5),
        ("attractor dichotomy", Duration::from_secs(300), attractor_dichotomy),
        ("one-point tail bounds", Duration::from_secs(300), lemma61),
        ("CLI reproducibility", Duration::from_secs(300), reproducibility),
    ];
    let mut failed = 0;
    for (i, (name, budget, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = check();
        let took = start.elapsed();
        let (status, detail) = match outcome {
            Ok(d) if took <= *budget => ("PASS", d),
            Ok(d) => ("FAIL", format!("{d}; over runtime budget {budget:?}")),
            Err(e) => ("FAIL", e),
        };
        if status == "FAIL" {
            failed += 1;
        }
        println!("{status} {:>2} {name}: {detail} [{:.2}s]", i + 1, took.as_secs_f64());
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
