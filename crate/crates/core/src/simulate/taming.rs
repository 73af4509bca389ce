use serde::{Deserialize, Serialize};

/// Drift stabilisation for the explicit scheme.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Taming {
    /// `b * min(1, dt^{-1/2} / |b|)`.
    #[default]
    Clip,
    /// `b / (1 + dt |b|)`.
    Rational,
    /// Raw drift.
    None,
}

impl Taming {
    /// Tames `b` in place. Returns `true` when `b` had an infinite or NaN
    /// component (a hit on a singular set); such a drift is replaced by
    /// the cap in the direction of its infinite components.
    pub fn apply(self, b: &mut [f64], dt: f64) -> bool {
        let singular = b.iter().any(|v| !v.is_finite());
        if self == Taming::None {
            return singular;
        }
        let cap = match self {
            Taming::Clip => dt.sqrt().recip(),
            _ => dt.recip(),
        };
        if singular {
            let mut n = 0.0;
            for v in b.iter_mut() {
                *v = if v.is_infinite() { v.signum() } else { 0.0 };
                n += *v * *v;
            }
            if n == 0.0 {
                // only NaNs: no usable direction
                b.fill(0.0);
            } else {
                let s = cap / n.sqrt();
                b.iter_mut().for_each(|v| *v *= s);
            }
            return true;
        }
        let norm = b.iter().map(|v| v * v).sum::<f64>().sqrt();
        match self {
            Taming::Clip => {
                if norm > cap {
                    let s = cap / norm;
                    b.iter_mut().for_each(|v| *v *= s);
                }
            }
            Taming::Rational => {
                let s = 1.0 / (1.0 + dt * norm);
                b.iter_mut().for_each(|v| *v *= s);
            }
            Taming::None => {}
        }
        false
    }
}
