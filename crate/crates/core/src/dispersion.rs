//! Expansion of sets under the flow: rate function, κ from chaining
//! constants, two-point moments and measured dispersion.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mesh::{dist, sphere_mesh};
use crate::model::SdeModel;
use crate::seed::derive_seed;
use crate::simulate::{integrate_flow_observed, FlowOptions, NoisePath, Taming, TimeGrid};
use crate::stats::{self, linear_fit, median, Summary};

/// Constants of the moment-growth hypothesis and the one-point tail.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChainingParams {
    pub c1: f64,
    pub alpha: f64,
    pub d: usize,
    /// Box dimension Δ of the tracked set.
    pub delta_dim: f64,
    pub c2: f64,
    pub c3: f64,
}

impl ChainingParams {
    /// Parameters with `Δ = d - 1` (boundary of a ball).
    pub fn boundary(c1: f64, alpha: f64, d: usize, c2: f64, c3: f64) -> Self {
        ChainingParams {
            c1,
            alpha,
            d,
            delta_dim: d as f64 - 1.0,
            c2,
            c3,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.c1 > 0.0 && self.alpha > 0.0 && self.c2 > 0.0 && self.c3 >= 0.0) {
            return Err(Error::param("need c1 > 0, alpha > 0, c2 > 0, c3 >= 0"));
        }
        if self.d == 0 || !(0.0..=self.d as f64).contains(&self.delta_dim) {
            return Err(Error::param("need d >= 1 and 0 <= delta_dim <= d"));
        }
        Ok(())
    }
}

/// The three-branch rate function I(γ).
pub fn rate_function_i(gamma: f64, p: &ChainingParams) -> Result<f64> {
    if !(gamma >= 0.0) {
        return Err(Error::param("gamma must be nonnegative"));
    }
    if !(p.c1 > 0.0 && p.alpha > 0.0) {
        return Err(Error::param("need c1 > 0 and alpha > 0"));
    }
    let d = p.d as f64;
    let a = p.alpha;
    let lo = p.c1 * d.powf(a);
    let hi = p.c1 * (a + 1.0) * d.powf(a);
    Ok(if gamma <= lo {
        0.0
    } else if gamma <= hi {
        d * (gamma - lo)
    } else {
        gamma.powf(1.0 + 1.0 / a) * a * (1.0 + a).powf(-1.0 - 1.0 / a) * p.c1.powf(-1.0 / a)
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum KappaBranch {
    /// `d/(d-Δ) < α + 1`
    First,
    Second,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KappaResult {
    pub kappa: f64,
    pub branch: KappaBranch,
    /// γ₁ or γ₂, whichever the branch used.
    pub gamma_branch: f64,
}

/// Linear expansion rate κ from the chaining constants.
pub fn kappa_from_constants(p: &ChainingParams) -> Result<KappaResult> {
    p.validate()?;
    let d = p.d as f64;
    let delta = p.delta_dim;
    let a = p.alpha;
    let first = delta < d && d / (d - delta) < a + 1.0;
    let (branch, g) = if first {
        (KappaBranch::First, p.c1 * d.powf(a + 1.0) / (d - delta))
    } else {
        (KappaBranch::Second, p.c1 * (delta / a).powf(a) * (1.0 + a).powf(1.0 + a))
    };
    Ok(KappaResult {
        kappa: ((p.c3 + g * delta) / p.c2).sqrt(),
        branch,
        gamma_branch: g,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TwoPointMoment {
    pub r: f64,
    pub horizon: f64,
    /// `E sup_{t<=T} |psi_t(x) - psi_t(y)|^r`.
    pub sup_moment: f64,
    pub sup_se: f64,
    /// `E |psi_T(x) - psi_T(y)|^r`.
    pub terminal_moment: f64,
    pub terminal_se: f64,
    pub replicas: usize,
    pub excluded: usize,
    /// False when more than 10% of replicas diverged.
    pub valid: bool,
}

/// Monte Carlo two-point moment under shared noise.
#[allow(clippy::too_many_arguments)]
pub fn two_point_moment(
    model: &SdeModel,
    x: &[f64],
    y: &[f64],
    r: f64,
    horizon: f64,
    dt: f64,
    replicas: usize,
    base_seed: u64,
    taming: Taming,
) -> Result<TwoPointMoment> {
    if !(r >= 1.0) {
        return Err(Error::param("moment order must be at least 1"));
    }
    if replicas < 2 {
        return Err(Error::param("need at least 2 replicas"));
    }
    let grid = TimeGrid::horizon(horizon, dt)?;
    let init = [x.to_vec(), y.to_vec()];
    let opts = FlowOptions {
        taming,
        snapshot_stride: 0,
    };
    let runs: Vec<Result<Option<(f64, f64)>>> = (0..replicas)
        .into_par_iter()
        .map(|k| {
            let noise = NoisePath::new(derive_seed(base_seed, "two-point", k as u64), model.dim, dt)?;
            let d0 = dist(x, y).powf(r);
            let mut sup = d0;
            let tr = integrate_flow_observed(model, &init, &noise, &grid, &opts, |e| {
                sup = sup.max(e.distance(0, 1).powf(r));
            })?;
            if tr.final_state.any_diverged() {
                return Ok(None);
            }
            Ok(Some((sup, tr.final_state.distance(0, 1).powf(r))))
        })
        .collect();
    let mut sups = Vec::new();
    let mut terms = Vec::new();
    for run in runs {
        if let Some((s, t)) = run? {
            sups.push(s);
            terms.push(t);
        }
    }
    let excluded = replicas - sups.len();
    Ok(TwoPointMoment {
        r,
        horizon,
        sup_moment: stats::mean(&sups),
        sup_se: stats::std_error(&sups),
        terminal_moment: stats::mean(&terms),
        terminal_se: stats::std_error(&terms),
        replicas,
        excluded,
        valid: (excluded as f64) <= 0.1 * replicas as f64,
    })
}

/// One entry of a moment table.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MomentRow {
    pub r: f64,
    pub horizon: f64,
    pub moment: f64,
    /// Initial separation `|x - y|`.
    pub separation: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PerOrderFit {
    pub r: f64,
    pub slope: f64,
    pub slope_se: f64,
    pub intercept: f64,
    pub rss: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct C1Fit {
    pub alpha: f64,
    pub c: f64,
    pub c1: f64,
    pub per_order: Vec<PerOrderFit>,
}

/// Fits `moment^{1/r} = c |x-y| exp(c1 r^α T)` for fixed α by per-order
/// regression of `log moment^{1/r}` on `T`.
pub fn fit_c1_alpha(table: &[MomentRow], alpha: f64) -> Result<C1Fit> {
    if let Some(bad) = table.iter().find(|m| !(m.moment > 0.0) || !(m.separation > 0.0)) {
        return Err(Error::param(format!(
            "moment table needs positive entries (r = {}, T = {})",
            bad.r, bad.horizon
        )));
    }
    let mut orders: Vec<f64> = table.iter().map(|m| m.r).collect();
    orders.sort_by(f64::total_cmp);
    orders.dedup();
    let mut horizons: Vec<f64> = table.iter().map(|m| m.horizon).collect();
    horizons.sort_by(f64::total_cmp);
    horizons.dedup();
    if orders.len() < 2 || horizons.len() < 3 {
        return Err(Error::param("moment table needs >= 2 orders and >= 3 horizons"));
    }
    let mut per_order = Vec::new();
    let mut c1s = Vec::new();
    let mut cs = Vec::new();
    for &r in &orders {
        let rows: Vec<&MomentRow> = table.iter().filter(|m| m.r == r).collect();
        let t: Vec<f64> = rows.iter().map(|m| m.horizon).collect();
        let y: Vec<f64> = rows.iter().map(|m| m.moment.ln() / r - m.separation.ln()).collect();
        let fit = linear_fit(&t, &y);
        c1s.push(fit.slope / r.powf(alpha));
        cs.push(fit.intercept.exp());
        per_order.push(PerOrderFit {
            r,
            slope: fit.slope,
            slope_se: fit.slope_se,
            intercept: fit.intercept,
            rss: fit.rss,
        });
    }
    Ok(C1Fit {
        alpha,
        c: median(&cs),
        c1: median(&c1s),
        per_order,
    })
}

/// A ball whose boundary is tracked.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BallSpec {
    pub center: Vec<f64>,
    pub radius: f64,
    /// Boundary mesh resolution.
    pub resolution: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReplicaSeries {
    pub replica: usize,
    pub sup_norm: Vec<f64>,
    pub diameter: Vec<f64>,
    /// `sup_{t<=T} sup_x |psi_t(x)| / T` over every step.
    pub kappa_hat: f64,
    pub diverged: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DispersionReport {
    pub times: Vec<f64>,
    pub ball: BallSpec,
    pub mesh_points: usize,
    pub horizon: f64,
    pub dt: f64,
    pub replicas: Vec<ReplicaSeries>,
    pub kappa_summary: Summary,
}

impl DispersionReport {
    /// `replica,t,sup_norm,diameter`.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("replica,t,sup_norm,diameter\n");
        for rep in &self.replicas {
            for (k, t) in self.times.iter().enumerate() {
                s.push_str(&format!("{},{},{},{}\n", rep.replica, t, rep.sup_norm[k], rep.diameter[k]));
            }
        }
        s
    }
}

/// Tracks the boundary of `ball` for `replicas` independent noise paths.
/// Series are recorded every `record_every` steps (and at both ends); the
/// κ̂ statistic uses every step.
#[allow(clippy::too_many_arguments)]
pub fn measure_dispersion(
    model: &SdeModel,
    ball: &BallSpec,
    horizon: f64,
    dt: f64,
    record_every: u64,
    replicas: usize,
    base_seed: u64,
    taming: Taming,
) -> Result<DispersionReport> {
    if ball.center.len() != model.dim {
        return Err(Error::DimensionMismatch {
            expected: model.dim,
            got: ball.center.len(),
        });
    }
    if replicas == 0 {
        return Err(Error::param("need at least one replica"));
    }
    let mesh = sphere_mesh(&ball.center, ball.radius, ball.resolution);
    if mesh.is_empty() {
        return Err(Error::Empty("boundary mesh"));
    }
    let grid = TimeGrid::horizon(horizon, dt)?;
    if !(horizon > 0.0) {
        return Err(Error::param("horizon must be positive"));
    }
    let every = record_every.max(1);
    let n = grid.n_steps;
    let mut times = vec![0.0];
    for k in 1..=n {
        if k.is_multiple_of(every) || k == n {
            times.push(grid.time_at(k));
        }
    }
    let opts = FlowOptions {
        taming,
        snapshot_stride: 0,
    };
    let series: Vec<Result<ReplicaSeries>> = (0..replicas)
        .into_par_iter()
        .map(|rep| {
            let noise = NoisePath::new(derive_seed(base_seed, "dispersion", rep as u64), model.dim, dt)?;
            let mut sup_norm = vec![sup_of(&mesh)];
            let mut diameter = vec![diameter_of(&mesh)];
            let mut running = sup_norm[0];
            let tr = integrate_flow_observed(model, &mesh, &noise, &grid, &opts, |e| {
                let pts = e.positions();
                let s = sup_of(&pts);
                running = running.max(s);
                let k = e.step as u64;
                if k.is_multiple_of(every) || k == n {
                    sup_norm.push(s);
                    diameter.push(diameter_of(&pts));
                }
            })?;
            Ok(ReplicaSeries {
                replica: rep,
                sup_norm,
                diameter,
                kappa_hat: running / horizon,
                diverged: tr.final_state.any_diverged(),
            })
        })
        .collect();
    let replicas = series.into_iter().collect::<Result<Vec<_>>>()?;
    let kappas: Vec<f64> = replicas.iter().map(|r| r.kappa_hat).collect();
    Ok(DispersionReport {
        times,
        ball: ball.clone(),
        mesh_points: mesh.len(),
        horizon,
        dt,
        kappa_summary: Summary::of(&kappas),
        replicas,
    })
}

fn sup_of(pts: &[Vec<f64>]) -> f64 {
    pts.iter().map(|p| crate::mesh::norm(p)).fold(0.0, f64::max)
}

fn diameter_of(pts: &[Vec<f64>]) -> f64 {
    let mut best = 0.0f64;
    for i in 0..pts.len() {
        for j in i + 1..pts.len() {
            best = best.max(dist(&pts[i], &pts[j]));
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{DiffusionSpec, VectorFieldSpec};

    fn p(c1: f64, alpha: f64, d: usize) -> ChainingParams {
        ChainingParams::boundary(c1, alpha, d, 1.0, 0.0)
    }

    #[test]
    fn rate_function_spot_values() {
        let q = p(1.0, 1.0, 2);
        assert_eq!(rate_function_i(2.0, &q).unwrap(), 0.0);
        assert_eq!(rate_function_i(4.0, &q).unwrap(), 4.0);
        assert!((rate_function_i(6.0, &q).unwrap() - 9.0).abs() < 1e-12);
        assert!(rate_function_i(-1.0, &q).is_err());
    }

    #[test]
    fn kappa_spot_values() {
        let q = ChainingParams {
            c1: 1.0,
            alpha: 3.0,
            d: 2,
            delta_dim: 1.0,
            c2: 1.0,
            c3: 0.0,
        };
        let k = kappa_from_constants(&q).unwrap();
        assert_eq!(k.branch, KappaBranch::First);
        assert_eq!(k.gamma_branch, 16.0);
        assert_eq!(k.kappa, 4.0);
        let z = ChainingParams { delta_dim: 0.0, c3: 9.0, ..q };
        assert_eq!(kappa_from_constants(&z).unwrap().kappa, 3.0);
        let full = ChainingParams { delta_dim: 2.0, ..q };
        assert_eq!(kappa_from_constants(&full).unwrap().branch, KappaBranch::Second);
    }

    #[test]
    fn fit_recovers_synthetic_constants() {
        let mut table = Vec::new();
        for r in [1.0, 2.0, 3.0] {
            for t in [0.5, 1.0, 2.0, 4.0] {
                let m = (2.0 * 0.3 * (0.5 * f64::powf(r, 3.0) * t).exp()).powf(r);
                table.push(MomentRow {
                    r,
                    horizon: t,
                    moment: m,
                    separation: 0.3,
                });
            }
        }
        let f = fit_c1_alpha(&table, 3.0).unwrap();
        assert!((f.c - 2.0).abs() < 1e-10 && (f.c1 - 0.5).abs() < 1e-10, "{f:?}");
        for row in table.iter_mut() {
            row.moment = 0.3f64.powf(row.r);
        }
        assert!(fit_c1_alpha(&table, 3.0).unwrap().c1.abs() < 1e-12);
        table[0].moment = 0.0;
        assert!(fit_c1_alpha(&table, 3.0).is_err());
    }

    #[test]
    fn two_point_trivial_cases() {
        let m = SdeModel::brownian(2, VectorFieldSpec::Zero);
        let r = two_point_moment(&m, &[0.0, 0.0], &[0.5, 0.0], 2.0, 1.0, 0.01, 8, 1, Taming::Clip).unwrap();
        assert_eq!(r.sup_moment, 0.25);
        assert_eq!(r.sup_se, 0.0);
        let r = two_point_moment(&m, &[0.3, 0.1], &[0.3, 0.1], 3.0, 1.0, 0.01, 4, 1, Taming::Clip).unwrap();
        assert_eq!((r.sup_moment, r.terminal_moment), (0.0, 0.0));
    }

    #[test]
    fn frozen_set_dispersion() {
        let mut m = SdeModel::brownian(2, VectorFieldSpec::Zero);
        m.sigma = DiffusionSpec::Scalar { eps: 0.0 };
        let ball = BallSpec {
            center: vec![0.0, 0.0],
            radius: 1.0,
            resolution: 16,
        };
        let rep = measure_dispersion(&m, &ball, 2.0, 0.01, 50, 2, 3, Taming::Clip).unwrap();
        assert!((rep.replicas[0].kappa_hat - 0.5).abs() < 1e-12);
        assert_eq!(rep.times.len(), 5);
        assert!(rep.to_csv().starts_with("replica,t,sup_norm,diameter\n0,0,1,2\n"));
    }

    #[test]
    fn linear_outflow_diameter() {
        let mut m = SdeModel::brownian(1, VectorFieldSpec::Linear { scale: 1.0 });
        m.sigma = DiffusionSpec::Scalar { eps: 0.0 };
        let ball = BallSpec {
            center: vec![0.0],
            radius: 1.0,
            resolution: 2,
        };
        let rep = measure_dispersion(&m, &ball, 1.0, 1e-3, 1000, 1, 0, Taming::None).unwrap();
        let last = *rep.replicas[0].diameter.last().unwrap();
        let exact = 2.0 * (1.0f64 + 1e-3).powi(1000);
        assert!((last - exact).abs() < 1e-12 * exact);
    }
}
