//! Euler–Maruyama flows of whole ensembles under one noise path.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mesh::norm;
use crate::model::SdeModel;
use crate::simulate::noise::{steps_in, NoisePath, TimeGrid};
use crate::simulate::taming::Taming;

/// Members above this count are advanced in parallel.
const PAR_THRESHOLD: usize = 64;

/// Positions of many initial conditions at a common time.
///
/// When the diffusion is constant the state is stored as
/// `position = rel + frame` with `frame = sigma W` shared by all members;
/// differences between members are then exact differences of `rel`, so
/// pure additive noise leaves them untouched to the last bit.
#[derive(Debug, Clone, PartialEq)]
pub struct FlowEnsemble {
    pub dim: usize,
    /// Local noise step the ensemble sits at.
    pub step: i64,
    pub dt: f64,
    rel: Vec<f64>,
    frame: Vec<f64>,
    additive: bool,
    pub labels: Vec<String>,
    /// First step at which a member became non-finite.
    pub diverged: Vec<Option<i64>>,
}

impl FlowEnsemble {
    pub fn new(model: &SdeModel, initials: &[Vec<f64>], start_step: i64, dt: f64) -> Result<Self> {
        if initials.is_empty() {
            return Err(Error::Empty("initial conditions"));
        }
        let d = model.dim;
        let mut rel = Vec::with_capacity(d * initials.len());
        for x in initials {
            if x.len() != d {
                return Err(Error::DimensionMismatch { expected: d, got: x.len() });
            }
            rel.extend_from_slice(x);
        }
        Ok(FlowEnsemble {
            dim: d,
            step: start_step,
            dt,
            rel,
            frame: vec![0.0; d],
            additive: model.sigma.is_constant(),
            labels: (0..initials.len()).map(|i| i.to_string()).collect(),
            diverged: vec![None; initials.len()],
        })
    }

    pub fn len(&self) -> usize {
        self.diverged.len()
    }

    pub fn is_empty(&self) -> bool {
        self.diverged.is_empty()
    }

    pub fn time(&self) -> f64 {
        self.step as f64 * self.dt
    }

    pub fn position(&self, i: usize) -> Vec<f64> {
        let d = self.dim;
        self.rel[i * d..(i + 1) * d]
            .iter()
            .zip(&self.frame)
            .map(|(r, f)| r + f)
            .collect()
    }

    /// Coordinate `axis` of member `i` without allocating.
    pub fn coordinate(&self, i: usize, axis: usize) -> f64 {
        self.rel[i * self.dim + axis] + self.frame[axis]
    }

    pub fn positions(&self) -> Vec<Vec<f64>> {
        (0..self.len()).map(|i| self.position(i)).collect()
    }

    /// Row-major positions.
    pub fn flat_positions(&self) -> Vec<f64> {
        let d = self.dim;
        self.rel
            .iter()
            .enumerate()
            .map(|(k, r)| r + self.frame[k % d])
            .collect()
    }

    /// `psi(x_i) - psi(x_j)`, exact in the additive frame.
    pub fn difference(&self, i: usize, j: usize) -> Vec<f64> {
        let d = self.dim;
        (0..d).map(|k| self.rel[i * d + k] - self.rel[j * d + k]).collect()
    }

    pub fn distance(&self, i: usize, j: usize) -> f64 {
        norm(&self.difference(i, j))
    }

    pub fn norm_of(&self, i: usize) -> f64 {
        norm(&self.position(i))
    }

    pub fn any_diverged(&self) -> bool {
        self.diverged.iter().any(Option::is_some)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FlowOptions {
    pub taming: Taming,
    /// Store a snapshot every `stride` steps (0 disables snapshots).
    pub snapshot_stride: u64,
}

impl Default for FlowOptions {
    fn default() -> Self {
        FlowOptions {
            taming: Taming::Clip,
            snapshot_stride: 0,
        }
    }
}

/// Per-run bookkeeping independent of snapshots.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunStats {
    /// Drift evaluations that hit a singular set.
    pub singular_hits: u64,
    /// `max_k |psi_{t_k}(x_i)|` over every step, including the start.
    pub running_max_norm: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Snapshot {
    pub step: i64,
    pub time: f64,
    /// Row-major `n_members x dim`.
    pub positions: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub grid: TimeGrid,
    pub stride: u64,
    pub snapshots: Vec<Snapshot>,
    pub stats: RunStats,
    pub final_state: FlowEnsemble,
}

impl Trajectory {
    pub fn diverged(&self) -> &[Option<i64>] {
        &self.final_state.diverged
    }
}

fn check_compatible(model: &SdeModel, noise: &NoisePath, dt: f64) -> Result<()> {
    if noise.dim != model.dim {
        return Err(Error::DimensionMismatch {
            expected: model.dim,
            got: noise.dim,
        });
    }
    if noise.dt != dt {
        return Err(Error::MisalignedGrid(format!("noise dt {} differs from grid dt {}", noise.dt, dt)));
    }
    Ok(())
}

/// Advances `ens` by `n_steps`, calling `observer` on the state after every
/// step (not on the starting state).
pub fn advance<O>(
    model: &SdeModel,
    ens: &mut FlowEnsemble,
    noise: &NoisePath,
    n_steps: u64,
    taming: Taming,
    mut observer: O,
) -> Result<u64>
where
    O: FnMut(&FlowEnsemble),
{
    check_compatible(model, noise, ens.dt)?;
    noise.check_covers(ens.step, n_steps)?;
    let d = model.dim;
    let dt = ens.dt;
    let mut dw = vec![0.0; d];
    let mut sigma = vec![0.0; d * d];
    let mut sdw = vec![0.0; d];
    let mut hits = 0u64;
    if ens.additive {
        // Constant diffusion: evaluate once.
        model.diffusion(&vec![0.0; d], &mut sigma);
    }
    for _ in 0..n_steps {
        noise.increment(ens.step, &mut dw);
        let k_next = ens.step + 1;
        if ens.additive {
            for i in 0..d {
                sdw[i] = (0..d).map(|j| sigma[i * d + j] * dw[j]).sum();
            }
            let frame = ens.frame.clone();
            hits += step_members(&mut ens.rel, &mut ens.diverged, d, k_next, |x, out, buf| {
                for k in 0..d {
                    buf[k] = x[k] + frame[k];
                }
                model.drift(&buf[..d], out);
                let h = taming.apply(out, dt);
                for (xk, bk) in x.iter_mut().zip(out.iter()) {
                    *xk += bk * dt;
                }
                h
            });
            for (f, s) in ens.frame.iter_mut().zip(&sdw) {
                *f += s;
            }
        } else {
            let dw = &dw;
            hits += step_members(&mut ens.rel, &mut ens.diverged, d, k_next, |x, out, buf| {
                model.drift(x, out);
                let h = taming.apply(out, dt);
                let (s, rest) = buf.split_at_mut(d * d);
                model.diffusion(x, s);
                for i in 0..d {
                    rest[i] = out[i] * dt + (0..d).map(|j| s[i * d + j] * dw[j]).sum::<f64>();
                }
                for i in 0..d {
                    x[i] += rest[i];
                }
                h
            });
        }
        ens.step = k_next;
        observer(ens);
    }
    Ok(hits)
}

/// Applies `update(x, drift_buf, scratch) -> singular_hit` to every live
/// member; flags members that become non-finite at `step`.
fn step_members<F>(rel: &mut [f64], diverged: &mut [Option<i64>], d: usize, step: i64, update: F) -> u64
where
    F: Fn(&mut [f64], &mut [f64], &mut [f64]) -> bool + Sync,
{
    let body = |(x, div): (&mut [f64], &mut Option<i64>), out: &mut Vec<f64>, buf: &mut Vec<f64>| -> u64 {
        if div.is_some() {
            return 0;
        }
        let saved: Vec<f64> = x.to_vec();
        let hit = update(x, out, buf);
        if x.iter().any(|v| !v.is_finite()) {
            x.copy_from_slice(&saved);
            *div = Some(step);
        }
        hit as u64
    };
    let n = diverged.len();
    let scratch = || (vec![0.0; d], vec![0.0; d * d + d]);
    if n >= PAR_THRESHOLD {
        rel.par_chunks_mut(d)
            .zip(diverged.par_iter_mut())
            .map_init(scratch, |(out, buf), item| body(item, out, buf))
            .sum()
    } else {
        let (mut out, mut buf) = scratch();
        rel.chunks_mut(d)
            .zip(diverged.iter_mut())
            .map(|item| body(item, &mut out, &mut buf))
            .sum()
    }
}

/// Runs the flow of `initials` over `grid`.
pub fn integrate_flow(
    model: &SdeModel,
    initials: &[Vec<f64>],
    noise: &NoisePath,
    grid: &TimeGrid,
    opts: &FlowOptions,
) -> Result<Trajectory> {
    integrate_flow_observed(model, initials, noise, grid, opts, |_| {})
}

/// [`integrate_flow`] with a per-step observer.
pub fn integrate_flow_observed<O>(
    model: &SdeModel,
    initials: &[Vec<f64>],
    noise: &NoisePath,
    grid: &TimeGrid,
    opts: &FlowOptions,
    mut observer: O,
) -> Result<Trajectory>
where
    O: FnMut(&FlowEnsemble),
{
    let mut ens = FlowEnsemble::new(model, initials, grid.start_step, grid.dt)?;
    let mut running: Vec<f64> = (0..ens.len()).map(|i| ens.norm_of(i)).collect();
    let mut snapshots = Vec::new();
    let stride = opts.snapshot_stride;
    let snap = |e: &FlowEnsemble| Snapshot {
        step: e.step,
        time: e.time(),
        positions: e.flat_positions(),
    };
    if stride > 0 {
        snapshots.push(snap(&ens));
    }
    let start = grid.start_step;
    let last = start + grid.n_steps as i64;
    let hits = advance(model, &mut ens, noise, grid.n_steps, opts.taming, |e| {
        for (i, r) in running.iter_mut().enumerate() {
            if e.diverged[i].is_none() {
                *r = r.max(e.norm_of(i));
            }
        }
        if stride > 0 && (((e.step - start) as u64).is_multiple_of(stride) || e.step == last) {
            snapshots.push(snap(e));
        }
        observer(e);
    })?;
    Ok(Trajectory {
        grid: *grid,
        stride,
        snapshots,
        stats: RunStats {
            singular_hits: hits,
            running_max_norm: running,
        },
        final_state: ens,
    })
}

/// Position at time 0 of the solution started from each point at time
/// `-depth_steps * dt`.
pub fn pullback_ensemble(
    model: &SdeModel,
    points: &[Vec<f64>],
    depth_steps: u64,
    noise: &NoisePath,
    taming: Taming,
) -> Result<FlowEnsemble> {
    let mut ens = FlowEnsemble::new(model, points, -(depth_steps as i64), noise.dt)?;
    advance(model, &mut ens, noise, depth_steps, taming, |_| {})?;
    Ok(ens)
}

/// Single-point pullback; `depth` must be a whole number of steps.
pub fn pullback_state(model: &SdeModel, x: &[f64], depth: f64, noise: &NoisePath, taming: Taming) -> Result<Vec<f64>> {
    let m = steps_in(depth, noise.dt)?;
    if m < 0 {
        return Err(Error::param("pullback depth must be nonnegative"));
    }
    let ens = pullback_ensemble(model, &[x.to_vec()], m as u64, noise, taming)?;
    if let Some(k) = ens.diverged[0] {
        return Err(Error::NonFinite {
            point: x.to_vec(),
            value: k as f64,
        });
    }
    Ok(ens.position(0))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CocycleReport {
    pub exact: bool,
    pub max_deviation: f64,
}

/// Compares the direct run over `[0, s + t]` with the run over `[0, s]`
/// continued under the noise shifted by `s`. Times must be whole steps.
pub fn verify_cocycle(
    model: &SdeModel,
    x: &[f64],
    s: f64,
    t: f64,
    noise: &NoisePath,
    taming: Taming,
) -> Result<CocycleReport> {
    let s_steps = steps_in(s, noise.dt)?;
    let t_steps = steps_in(t, noise.dt)?;
    if s_steps < 0 || t_steps < 0 {
        return Err(Error::param("cocycle legs must be nonnegative"));
    }
    let init = [x.to_vec()];
    let mut direct = FlowEnsemble::new(model, &init, 0, noise.dt)?;
    advance(model, &mut direct, noise, (s_steps + t_steps) as u64, taming, |_| {})?;

    let mut first = FlowEnsemble::new(model, &init, 0, noise.dt)?;
    advance(model, &mut first, noise, s_steps as u64, taming, |_| {})?;
    // Continue in the frame of the shifted path: local step 0 is time s.
    let shifted = noise.shift(s_steps).subpath(0, t_steps as u64)?;
    first.step = 0;
    advance(model, &mut first, &shifted, t_steps as u64, taming, |_| {})?;

    let a = direct.position(0);
    let b = first.position(0);
    let max_deviation = a.iter().zip(&b).map(|(p, q)| (p - q).abs()).fold(0.0, f64::max);
    let exact = a.iter().zip(&b).all(|(p, q)| p.to_bits() == q.to_bits());
    Ok(CocycleReport { exact, max_deviation })
}
