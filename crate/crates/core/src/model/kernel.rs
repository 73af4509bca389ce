//! The fixed localization kernel used by all localized norms.

use serde::{Deserialize, Serialize};

/// `exp(-1/t)` for `t > 0`, else 0.
fn g(t: f64) -> f64 {
    if t <= 0.0 {
        0.0
    } else {
        (-1.0 / t).exp()
    }
}

/// Smooth monotone step on `[0, 1]`: 0 at 0, 1 at 1, flat to all orders at
/// both ends. Clamped outside.
pub fn smooth_step(t: f64) -> f64 {
    if t <= 0.0 {
        return 0.0;
    }
    if t >= 1.0 {
        return 1.0;
    }
    let a = g(t);
    a / (a + g(1.0 - t))
}

/// Radial cut-off `xi` with `xi = 1` on `|x| <= delta/2` and `xi = 0` on
/// `|x| >= delta`. On the band the profile is
/// `smooth_step(2 - 2|x|/delta)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LocalizationKernel {
    pub delta: f64,
}

impl Default for LocalizationKernel {
    fn default() -> Self {
        LocalizationKernel { delta: 1.0 }
    }
}

impl LocalizationKernel {
    pub fn profile(&self, radius: f64) -> f64 {
        let s = radius / self.delta;
        if s <= 0.5 {
            1.0
        } else if s >= 1.0 {
            0.0
        } else {
            smooth_step(2.0 - 2.0 * s)
        }
    }

    /// `xi(x - z)`.
    pub fn eval(&self, x: &[f64], z: &[f64]) -> f64 {
        self.profile(crate::mesh::dist(x, z))
    }
}
