//! Counter-based Brownian increments.
//!
//! The increment of step `k` is generated from a ChaCha8 stream selected by
//! the absolute step index alone, so every ensemble member, every sub-path
//! and every shifted path sees identical numbers for the same step.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Uniform time grid `t_k = (start_step + k) * dt`, `k = 0..=n_steps`.
///
/// The start is an integer number of steps so grids with equal `dt` are
/// always aligned.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TimeGrid {
    pub start_step: i64,
    pub dt: f64,
    pub n_steps: u64,
}

impl TimeGrid {
    pub fn new(t_start: f64, dt: f64, n_steps: u64) -> Result<Self> {
        if !(dt > 0.0 && dt.is_finite()) {
            return Err(Error::param("dt must be positive"));
        }
        let start_step = steps_in(t_start, dt)?;
        Ok(TimeGrid {
            start_step,
            dt,
            n_steps,
        })
    }

    /// Grid `[0, horizon]` with step `dt`; `horizon` must be a whole number
    /// of steps.
    pub fn horizon(horizon: f64, dt: f64) -> Result<Self> {
        if !(dt > 0.0) {
            return Err(Error::param("dt must be positive"));
        }
        let n = steps_in(horizon, dt)?;
        if n < 0 {
            return Err(Error::param("horizon must be nonnegative"));
        }
        Ok(TimeGrid {
            start_step: 0,
            dt,
            n_steps: n as u64,
        })
    }

    pub fn t_start(&self) -> f64 {
        self.start_step as f64 * self.dt
    }

    pub fn t_end(&self) -> f64 {
        self.time_at(self.n_steps)
    }

    /// Time after `k` steps of this grid.
    pub fn time_at(&self, k: u64) -> f64 {
        (self.start_step + k as i64) as f64 * self.dt
    }
}

/// Converts a time into a whole number of steps, refusing misaligned input.
pub fn steps_in(t: f64, dt: f64) -> Result<i64> {
    let q = t / dt;
    let n = q.round();
    if !q.is_finite() || (q - n).abs() > 1e-9 * q.abs().max(1.0) {
        return Err(Error::MisalignedGrid(format!("time {t} is not a multiple of dt = {dt}")));
    }
    Ok(n as i64)
}

/// A reproducible Brownian path in `R^dim`.
///
/// Local step `j` maps to absolute step `origin + j`. [`NoisePath::shift`]
/// moves the origin (the discrete noise shift) and
/// [`NoisePath::subpath`] restricts the admissible local range; neither
/// changes any increment.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct NoisePath {
    pub seed: u64,
    pub dim: usize,
    pub dt: f64,
    pub origin: i64,
    /// Admissible local steps `[lo, hi)`; unbounded when `None`.
    pub range: Option<(i64, i64)>,
    #[serde(skip)]
    template: Option<ChaCha8Rng>,
}

impl PartialEq for NoisePath {
    fn eq(&self, other: &Self) -> bool {
        self.seed == other.seed
            && self.dim == other.dim
            && self.dt == other.dt
            && self.origin == other.origin
            && self.range == other.range
    }
}

impl NoisePath {
    pub fn new(seed: u64, dim: usize, dt: f64) -> Result<Self> {
        if !(dt > 0.0 && dt.is_finite()) {
            return Err(Error::param("dt must be positive"));
        }
        if dim == 0 {
            return Err(Error::param("noise dimension must be positive"));
        }
        Ok(NoisePath {
            seed,
            dim,
            dt,
            origin: 0,
            range: None,
            template: Some(ChaCha8Rng::seed_from_u64(seed)),
        })
    }

    /// The path `W(s + .) - W(s)` for `s = steps * dt`.
    pub fn shift(&self, steps: i64) -> NoisePath {
        let mut p = self.clone();
        p.origin += steps;
        p.range = self.range.map(|(lo, hi)| (lo - steps, hi - steps));
        p
    }

    /// Restriction to local steps `[start, start + len)`.
    pub fn subpath(&self, start: i64, len: u64) -> Result<NoisePath> {
        let (lo, hi) = (start, start + len as i64);
        if let Some((a, b)) = self.range {
            if lo < a || hi > b {
                return Err(Error::MisalignedGrid(format!(
                    "sub-path [{lo}, {hi}) outside parent range [{a}, {b})"
                )));
            }
        }
        let mut p = self.clone();
        p.range = Some((lo, hi));
        Ok(p)
    }

    /// Checks that local steps `[start, start + n)` are available.
    pub fn check_covers(&self, start: i64, n: u64) -> Result<()> {
        if let Some((a, b)) = self.range {
            if start < a || start + n as i64 > b {
                return Err(Error::MisalignedGrid(format!(
                    "steps [{start}, {}) not covered by noise range [{a}, {b})",
                    start + n as i64
                )));
            }
        }
        Ok(())
    }

    /// Writes the increment `W(t_{k+1}) - W(t_k)` of local step `k`.
    pub fn increment(&self, k: i64, out: &mut [f64]) {
        let mut rng = match &self.template {
            Some(t) => t.clone(),
            None => ChaCha8Rng::seed_from_u64(self.seed),
        };
        rng.set_stream((self.origin + k) as u64);
        let s = self.dt.sqrt();
        for o in out.iter_mut().take(self.dim) {
            let z: f64 = StandardNormal.sample(&mut rng);
            *o = s * z;
        }
    }

    pub fn increments(&self, start: i64, n: u64) -> Vec<f64> {
        let mut out = vec![0.0; self.dim * n as usize];
        for (j, chunk) in out.chunks_mut(self.dim).enumerate() {
            self.increment(start + j as i64, chunk);
        }
        out
    }
}
