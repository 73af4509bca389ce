//! Pullback absorption, forward expansion, the one-point tail bounds and
//! their Monte Carlo falsification, and the attractor criterion matrix.
//!
//! Set inclusions are checked on a proxy: the image of a ball is
//! represented by the images of a boundary mesh plus interior witnesses.
//! Every report carries [`PROXY_NOTE`].

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mesh::{norm, sphere_mesh, winding_number};
use crate::model::probe::{beta_lower, beta_star, ShellSampling};
use crate::model::SdeModel;
use crate::seed::derive_seed;
use crate::simulate::{advance, pullback_ensemble, steps_in, FlowEnsemble, NoisePath, Taming};
use crate::stats::wilson_interval;

pub const PROXY_NOTE: &str = "set inclusion checked on a boundary mesh plus interior witnesses; exact up to mesh resolution for a homeomorphic flow";

/// Whether the dissipative part points inward (absorption) or outward
/// (expansion).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Orientation {
    Inward,
    Outward,
}

/// Advisory comparison of the tail drift rate with `β₀`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BetaCheck {
    pub orientation: Orientation,
    /// Sampled tail rate of `x·b2(x)/|x|` on the shell `[r, 2r]`.
    pub beta: f64,
    pub beta_zero: f64,
    /// Positive when the condition holds: `-β₀ - β` inward, `β - β₀` outward.
    pub margin: f64,
    pub satisfied: bool,
    pub shell: (f64, f64),
}

/// Samples the tail rate on `[r, 2r]`: the sup for inward, the inf for
/// outward orientation.
pub fn beta_check(model: &SdeModel, orientation: Orientation, r: f64, beta_zero: f64) -> Result<BetaCheck> {
    let sampling = ShellSampling::default();
    let beta = match orientation {
        Orientation::Inward => {
            let e = beta_star(model, r, 2.0 * r, &sampling)?;
            e.value - (model.dim as f64 - 1.0) * model.k2 / (2.0 * r)
        }
        Orientation::Outward => beta_lower(model, r, 2.0 * r, &sampling)?.value,
    };
    let margin = match orientation {
        Orientation::Inward => -beta_zero - beta,
        Orientation::Outward => beta - beta_zero,
    };
    Ok(BetaCheck {
        orientation,
        beta,
        beta_zero,
        margin,
        satisfied: margin > 0.0,
        shell: (r, 2.0 * r),
    })
}

/// `{0} ∪ {1, 2, 4, ...} ∩ [0, max]`.
pub fn geometric_depths(max: f64) -> Vec<f64> {
    let mut out = vec![0.0];
    let mut t = 1.0;
    while t <= max {
        out.push(t);
        t *= 2.0;
    }
    out
}

fn ball_points(dim: usize, radius: f64, resolution: usize) -> Vec<Vec<f64>> {
    let origin = vec![0.0; dim];
    let mut pts = vec![origin.clone()];
    if radius > 0.0 {
        pts.extend(sphere_mesh(&origin, radius, resolution));
    }
    pts
}

fn replica_noise(model: &SdeModel, base_seed: u64, label: &str, i: usize, dt: f64) -> Result<NoisePath> {
    NoisePath::new(derive_seed(base_seed, label, i as u64), model.dim, dt)
}

fn check_steps(t: f64, dt: f64) -> Result<u64> {
    let m = steps_in(t, dt)?;
    if m < 0 {
        return Err(Error::param("times must be nonnegative"));
    }
    Ok(m as u64)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AbsorptionScenario {
    pub gamma: f64,
    pub r: f64,
    pub depths: Vec<f64>,
    pub mesh_resolution: usize,
    pub replicas: usize,
    pub dt: f64,
    pub base_seed: u64,
    #[serde(default)]
    pub taming: Taming,
}

impl AbsorptionScenario {
    fn validate(&self) -> Result<()> {
        if !(self.gamma >= 0.0) || !(self.r > 0.0) {
            return Err(Error::param("need gamma >= 0 and r > 0"));
        }
        if self.depths.is_empty() {
            return Err(Error::Empty("depths"));
        }
        if self.replicas == 0 {
            return Err(Error::param("need at least one replica"));
        }
        for &t in &self.depths {
            check_steps(t, self.dt)?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReplicaOutcome {
    pub replica: usize,
    pub pass: bool,
    pub reason: Option<String>,
    /// Largest norm over all checked points.
    pub worst: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AbsorptionReport {
    pub scenario: AbsorptionScenario,
    pub outcomes: Vec<ReplicaOutcome>,
    pub passes: usize,
    pub probability: f64,
    pub interval: (f64, f64),
    pub beta: Option<BetaCheck>,
    pub proxy: String,
}

/// Per replica: every point of the mesh of `B_{γt}` (plus the origin),
/// started at time `-t` for each depth `t`, must lie in `B_r` at time 0.
pub fn pullback_absorption(model: &SdeModel, scenario: &AbsorptionScenario, beta: Option<BetaCheck>) -> Result<AbsorptionReport> {
    model.validate()?;
    scenario.validate()?;
    let s = scenario;
    let outcomes: Vec<ReplicaOutcome> = (0..s.replicas)
        .into_par_iter()
        .map(|i| {
            let noise = replica_noise(model, s.base_seed, "pullback", i, s.dt)?;
            let mut worst = 0.0f64;
            let mut reason = None;
            for &t in &s.depths {
                let pts = ball_points(model.dim, s.gamma * t, s.mesh_resolution);
                let ens = pullback_ensemble(model, &pts, check_steps(t, s.dt)?, &noise, s.taming)?;
                if ens.any_diverged() {
                    reason = Some("diverged".to_string());
                    worst = f64::INFINITY;
                    break;
                }
                worst = (0..ens.len()).map(|j| ens.norm_of(j)).fold(worst, f64::max);
            }
            if reason.is_none() && worst > s.r {
                reason = Some("outside target ball".into());
            }
            Ok(ReplicaOutcome {
                replica: i,
                pass: reason.is_none(),
                reason,
                worst,
            })
        })
        .collect::<Result<_>>()?;
    let passes = outcomes.iter().filter(|o| o.pass).count();
    Ok(AbsorptionReport {
        scenario: s.clone(),
        passes,
        probability: passes as f64 / s.replicas as f64,
        interval: wilson_interval(passes, s.replicas),
        outcomes,
        beta,
        proxy: PROXY_NOTE.into(),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExpansionScenario {
    pub r: f64,
    pub gamma: f64,
    pub horizon: f64,
    /// Check the event every this many steps (and at the horizon).
    pub check_every: u64,
    pub mesh_resolution: usize,
    pub replicas: usize,
    pub dt: f64,
    pub base_seed: u64,
    #[serde(default)]
    pub taming: Taming,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExpansionReport {
    pub scenario: ExpansionScenario,
    pub outcomes: Vec<ReplicaOutcome>,
    pub passes: usize,
    pub probability: f64,
    pub interval: (f64, f64),
    pub beta: Option<BetaCheck>,
    pub proxy: String,
}

/// Whether the closed boundary image encloses the origin: winding number
/// in 2-D, a sign change in 1-D. `None` in higher dimensions.
fn encloses_origin(boundary: &[Vec<f64>]) -> Option<bool> {
    match boundary.first().map(Vec::len) {
        Some(1) => {
            let lo = boundary.iter().map(|p| p[0]).fold(f64::INFINITY, f64::min);
            let hi = boundary.iter().map(|p| p[0]).fold(f64::NEG_INFINITY, f64::max);
            Some(lo < 0.0 && hi > 0.0)
        }
        Some(2) => {
            let poly: Vec<[f64; 2]> = boundary.iter().map(|p| [p[0], p[1]]).collect();
            Some(winding_number(&poly) != 0)
        }
        _ => None,
    }
}

/// Per replica, at every checked time `t`: the boundary image of `∂B_r`
/// stays outside `B_{γt}`, and when `γt > 0` the image contains a point of
/// `B_{γt}` (origin enclosed by the boundary image, or the origin-started
/// witness inside `B_{γt}`).
pub fn forward_expansion(model: &SdeModel, scenario: &ExpansionScenario, beta: Option<BetaCheck>) -> Result<ExpansionReport> {
    model.validate()?;
    let s = scenario;
    if !(s.r > 0.0 && s.gamma >= 0.0) {
        return Err(Error::param("need r > 0 and gamma >= 0"));
    }
    if s.replicas == 0 || s.check_every == 0 {
        return Err(Error::param("need replicas > 0 and check_every > 0"));
    }
    let n_steps = check_steps(s.horizon, s.dt)?;
    let mut pts = vec![vec![0.0; model.dim]];
    pts.extend(sphere_mesh(&vec![0.0; model.dim], s.r, s.mesh_resolution));
    let outcomes: Vec<ReplicaOutcome> = (0..s.replicas)
        .into_par_iter()
        .map(|i| {
            let noise = replica_noise(model, s.base_seed, "expansion", i, s.dt)?;
            let mut ens = FlowEnsemble::new(model, &pts, 0, s.dt)?;
            let mut reason: Option<String> = None;
            let mut worst = f64::INFINITY;
            advance(model, &mut ens, &noise, n_steps, s.taming, |e| {
                if reason.is_some() || (!(e.step as u64).is_multiple_of(s.check_every) && e.step as u64 != n_steps) {
                    return;
                }
                if e.any_diverged() {
                    reason = Some("diverged".into());
                    return;
                }
                let level = s.gamma * e.time();
                let boundary: Vec<Vec<f64>> = (1..e.len()).map(|j| e.position(j)).collect();
                let min_b = boundary.iter().map(|p| norm(p)).fold(f64::INFINITY, f64::min);
                worst = worst.min(min_b - level);
                if min_b < level {
                    reason = Some(format!("boundary image inside B_gamma_t at t = {}", e.time()));
                } else if level > 0.0 {
                    let witness = e.norm_of(0) < level;
                    if !witness && encloses_origin(&boundary) != Some(true) {
                        reason = Some(format!("no interior witness at t = {}", e.time()));
                    }
                }
            })?;
            Ok(ReplicaOutcome {
                replica: i,
                pass: reason.is_none(),
                reason,
                worst,
            })
        })
        .collect::<Result<_>>()?;
    let passes = outcomes.iter().filter(|o| o.pass).count();
    Ok(ExpansionReport {
        scenario: s.clone(),
        passes,
        probability: passes as f64 / s.replicas as f64,
        interval: wilson_interval(passes, s.replicas),
        outcomes,
        beta,
        proxy: PROXY_NOTE.into(),
    })
}

/// Inputs of the one-point tail bounds. Unused fields are ignored by the
/// cases that do not need them.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Lemma61Params {
    pub t: f64,
    #[serde(default)]
    pub r: f64,
    #[serde(default)]
    pub r1: f64,
    #[serde(default)]
    pub r2: f64,
    #[serde(default)]
    pub big_r: f64,
    #[serde(default)]
    pub delta: f64,
    #[serde(default)]
    pub delta1: f64,
    /// `β*(r)`, including the curvature term `(d-1) K2 / (2r)`.
    #[serde(default)]
    pub beta_upper: f64,
    /// `β_*(r)`.
    #[serde(default)]
    pub beta_lower: f64,
    pub gamma: f64,
    pub norm_b1: f64,
    pub k1: f64,
    pub k2: f64,
    /// Start radius for case 2 (defaults to `r`).
    #[serde(default)]
    pub start: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Lemma61Bound {
    pub case: u8,
    pub value: f64,
    pub prefactor: f64,
    pub girsanov: f64,
    pub distance: f64,
    /// `value >= 1`.
    pub vacuous: bool,
}

fn pos(x: f64) -> f64 {
    x.max(0.0)
}

/// Evaluates `prefactor · exp(girsanov - distance)` for cases 1 to 5.
///
/// For `T = 0` the terms with `T` in a denominator are taken as 0.
pub fn lemma61_bound(case: u8, p: &Lemma61Params) -> Result<Lemma61Bound> {
    if !(p.k1 > 0.0 && p.k1 <= p.k2) {
        return Err(Error::param("need 0 < k1 <= k2"));
    }
    if !(p.t >= 0.0 && p.gamma >= 0.0 && p.norm_b1 >= 0.0) {
        return Err(Error::param("need t, gamma, norm_b1 >= 0"));
    }
    let order = |ok: bool, msg: &str| if ok { Ok(()) } else { Err(Error::param(msg.to_string())) };
    let (k1, k2, t) = (p.k1, p.k2, p.t);
    let b2 = p.norm_b1 * p.norm_b1;
    let girsanov = t * (p.gamma * p.gamma * b2 * b2 + k2 * k2 * p.gamma * b2) / (k1 * k2 * k2);
    let (prefactor, distance) = match case {
        1 | 4 => {
            order(p.r >= 1.0 && p.r1 > p.r && p.r2 > p.r, "need r >= 1 and r1, r2 > r")?;
            let inner = if t == 0.0 {
                0.0
            } else if case == 1 {
                -(p.r2 - p.r1) / (k2 * t).sqrt() - t.sqrt() * p.beta_upper / k2.sqrt()
            } else {
                t.sqrt() * p.beta_lower / k2.sqrt() - (p.r2 - p.r1) / (k2 * t).sqrt()
            };
            (2.0, 0.25 * pos(inner).powi(2))
        }
        2 => {
            order(p.big_r >= p.r && p.r >= 1.0, "need R >= r >= 1")?;
            order(p.beta_upper <= 0.0, "need beta_upper(r) <= 0")?;
            let dist = if t == 0.0 { 0.0 } else { (p.big_r - p.r).powi(2) / (16.0 * k2 * t) };
            (4.0, dist)
        }
        3 => {
            order(p.big_r >= 1.0 && p.delta > 0.0 && p.delta1 > 0.0, "need R >= 1 and delta, delta1 > 0")?;
            order(p.beta_upper <= 0.0, "need beta_upper(R) <= 0")?;
            (6.0, p.delta * p.delta / (16.0 * k2 * p.delta1))
        }
        5 => {
            order(p.r >= 1.0 && p.r < p.r1, "need 1 <= r < r1")?;
            (2.0, (p.r1 - p.r) * p.beta_lower / k2)
        }
        _ => return Err(Error::param(format!("case must be 1..=5, got {case}"))),
    };
    let value = prefactor * (girsanov - distance).exp();
    Ok(Lemma61Bound {
        case,
        value,
        prefactor,
        girsanov,
        distance,
        vacuous: !(value < 1.0),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FalsifyReport {
    pub bound: Lemma61Bound,
    pub params: Lemma61Params,
    pub horizon: f64,
    pub dt: f64,
    pub replicas: usize,
    pub hits: usize,
    pub diverged: usize,
    pub empirical: f64,
    pub std_error: f64,
    /// `bound - (empirical - 2 SE)`; negative means violated.
    pub margin: f64,
    pub violated: bool,
    pub note: String,
}

/// Monte Carlo estimate of the case's event from a start on the first axis.
/// Running extrema are monitored on the time grid; the case-5 event is
/// truncated at `T`.
#[allow(clippy::too_many_arguments)]
pub fn lemma61_falsify(
    model: &SdeModel,
    case: u8,
    params: &Lemma61Params,
    replicas: usize,
    dt: f64,
    base_seed: u64,
    taming: Taming,
) -> Result<FalsifyReport> {
    model.validate()?;
    let bound = lemma61_bound(case, params)?;
    if replicas < 2 {
        return Err(Error::param("need at least 2 replicas"));
    }
    let p = params;
    let (start, horizon) = match case {
        1 => (p.r2, p.t),
        2 => (p.start.unwrap_or(p.r), p.t),
        3 => (p.big_r, p.delta1),
        _ => (p.r1, p.t),
    };
    let n = check_steps(horizon, dt)?;
    let mut x0 = vec![0.0; model.dim];
    x0[0] = start;
    let results: Vec<(bool, bool)> = (0..replicas)
        .into_par_iter()
        .map(|i| {
            let noise = replica_noise(model, base_seed, "lemma61", i, dt)?;
            let mut ens = FlowEnsemble::new(model, &[x0.clone()], 0, dt)?;
            let (mut lo, mut hi) = (start, start);
            advance(model, &mut ens, &noise, n, taming, |e| {
                let v = e.norm_of(0);
                lo = lo.min(v);
                hi = hi.max(v);
            })?;
            let end = ens.norm_of(0);
            let hit = match case {
                1 => end >= p.r1 && lo >= p.r,
                2 => end >= p.big_r && lo <= p.r,
                3 => hi >= p.big_r + p.delta,
                4 => end <= p.r2 && lo >= p.r,
                _ => lo <= p.r,
            };
            Ok((hit, ens.any_diverged()))
        })
        .collect::<Result<_>>()?;
    let hits = results.iter().filter(|r| r.0).count();
    let diverged = results.iter().filter(|r| r.1).count();
    let m = replicas as f64;
    let empirical = hits as f64 / m;
    let std_error = (empirical * (1.0 - empirical) / (m - 1.0)).sqrt();
    let margin = bound.value - (empirical - 2.0 * std_error);
    Ok(FalsifyReport {
        bound,
        params: p.clone(),
        horizon,
        dt,
        replicas,
        hits,
        diverged,
        empirical,
        std_error,
        margin,
        violated: margin < 0.0,
        note: "running extrema monitored on the time grid; the infinite-horizon event of case 5 is truncated at T".into(),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CriterionMatrix {
    pub r_grid: Vec<f64>,
    pub big_r_grid: Vec<f64>,
    pub depths: Vec<f64>,
    /// `probability[h][i][j]`: horizon `depths[h]`, `r_grid[i]`, `big_r_grid[j]`.
    pub probability: Vec<Vec<Vec<f64>>>,
    pub replicas: usize,
    pub proxy: String,
}

impl CriterionMatrix {
    /// `horizon,r,R,probability` rows.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("horizon,r,R,probability\n");
        for (h, t) in self.depths.iter().enumerate() {
            for (i, r) in self.r_grid.iter().enumerate() {
                for (j, big) in self.big_r_grid.iter().enumerate() {
                    s.push_str(&format!("{t},{r},{big},{}\n", self.probability[h][i][j]));
                }
            }
        }
        s
    }
}

/// For each horizon `H` in `depths` (ascending), `r` and `R`: the fraction
/// of replicas for which every mesh point of `B_r`, pulled back from every
/// depth `t <= H` in `depths`, lies in `B_R` at time 0. The same
/// trajectories serve every cell, so entries are monotone in `R` and `H`.
#[allow(clippy::too_many_arguments)]
pub fn criterion_matrix(
    model: &SdeModel,
    r_grid: &[f64],
    big_r_grid: &[f64],
    depths: &[f64],
    mesh_resolution: usize,
    replicas: usize,
    dt: f64,
    base_seed: u64,
    taming: Taming,
) -> Result<CriterionMatrix> {
    model.validate()?;
    if r_grid.is_empty() || big_r_grid.is_empty() || depths.is_empty() {
        return Err(Error::Empty("criterion grid"));
    }
    if depths.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(Error::param("depths must be strictly increasing"));
    }
    if replicas == 0 {
        return Err(Error::param("need at least one replica"));
    }
    let steps: Vec<u64> = depths.iter().map(|&t| check_steps(t, dt)).collect::<Result<_>>()?;
    // worst[rep][h][i]: max over depths <= depths[h] of the pulled-back norms.
    let worst: Vec<Vec<Vec<f64>>> = (0..replicas)
        .into_par_iter()
        .map(|k| {
            let noise = replica_noise(model, base_seed, "criterion", k, dt)?;
            let mut per_depth = Vec::with_capacity(depths.len());
            let mut running = vec![0.0f64; r_grid.len()];
            for &m in &steps {
                for (i, &r) in r_grid.iter().enumerate() {
                    let pts = ball_points(model.dim, r, mesh_resolution);
                    let ens = pullback_ensemble(model, &pts, m, &noise, taming)?;
                    let w = if ens.any_diverged() {
                        f64::INFINITY
                    } else {
                        (0..ens.len()).map(|j| ens.norm_of(j)).fold(0.0, f64::max)
                    };
                    running[i] = running[i].max(w);
                }
                per_depth.push(running.clone());
            }
            Ok(per_depth)
        })
        .collect::<Result<_>>()?;
    let probability = (0..depths.len())
        .map(|h| {
            (0..r_grid.len())
                .map(|i| {
                    big_r_grid
                        .iter()
                        .map(|&big| worst.iter().filter(|w| w[h][i] <= big).count() as f64 / replicas as f64)
                        .collect()
                })
                .collect()
        })
        .collect();
    Ok(CriterionMatrix {
        r_grid: r_grid.to_vec(),
        big_r_grid: big_r_grid.to_vec(),
        depths: depths.to_vec(),
        probability,
        replicas,
        proxy: PROXY_NOTE.into(),
    })
}
