//! Built-in coefficient fields.
//!
//! Fields are plain data (serialisable from scenario files) and are
//! evaluated by enum dispatch. All evaluations are pure.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mesh::norm;
use crate::model::kernel::smooth_step;

/// A set on which a field is allowed to be unbounded.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Singularity {
    Point { at: Vec<f64> },
    /// `{x : x[axis] == offset}`
    Hyperplane { axis: usize, offset: f64 },
}

fn one() -> f64 {
    1.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum VectorFieldSpec {
    Zero,
    Constant {
        value: Vec<f64>,
    },
    /// `scale * x`
    Linear {
        scale: f64,
    },
    /// `beta * x / |x|`, zero at the origin.
    ConstantRadial {
        beta: f64,
    },
    /// `beta * x / max(|x|, 1)`
    SaturatedRadial {
        beta: f64,
    },
    /// `scale * |x[source]|^(-q)` in component `target`, infinite on
    /// `x[source] == 0`.
    PowerSingular {
        q: f64,
        source: usize,
        target: usize,
        #[serde(default = "one")]
        scale: f64,
    },
    /// `clamp(-x[c], -1, 1)` in component `c`.
    ClampLinear {
        component: usize,
    },
    /// Componentwise polynomial `sum_k coeffs[k] * x_i^k`.
    Polynomial {
        coeffs: Vec<f64>,
    },
    /// `height * exp(1 - 1/(1 - |x|^2/width^2))` in one component, zero for
    /// `|x| >= width`.
    Bump {
        height: f64,
        width: f64,
        #[serde(default)]
        component: usize,
    },
    Sum {
        terms: Vec<VectorFieldSpec>,
    },
}

impl VectorFieldSpec {
    /// Adds the field value at `x` into `out`.
    pub fn eval_add(&self, x: &[f64], out: &mut [f64]) {
        match self {
            VectorFieldSpec::Zero => {}
            VectorFieldSpec::Constant { value } => {
                for (o, v) in out.iter_mut().zip(value) {
                    *o += v;
                }
            }
            VectorFieldSpec::Linear { scale } => {
                for (o, xi) in out.iter_mut().zip(x) {
                    *o += scale * xi;
                }
            }
            VectorFieldSpec::ConstantRadial { beta } => {
                let r = norm(x);
                if r > 0.0 {
                    for (o, xi) in out.iter_mut().zip(x) {
                        *o += beta * xi / r;
                    }
                }
            }
            VectorFieldSpec::SaturatedRadial { beta } => {
                let r = norm(x).max(1.0);
                for (o, xi) in out.iter_mut().zip(x) {
                    *o += beta * xi / r;
                }
            }
            VectorFieldSpec::PowerSingular {
                q,
                source,
                target,
                scale,
            } => {
                let y = x[*source].abs();
                out[*target] += if y == 0.0 {
                    if *q > 0.0 {
                        f64::INFINITY
                    } else {
                        *scale
                    }
                } else {
                    scale * y.powf(-q)
                };
            }
            VectorFieldSpec::ClampLinear { component } => {
                out[*component] += (-x[*component]).clamp(-1.0, 1.0);
            }
            VectorFieldSpec::Polynomial { coeffs } => {
                for (o, xi) in out.iter_mut().zip(x) {
                    *o += coeffs.iter().rev().fold(0.0, |acc, c| acc * xi + c);
                }
            }
            VectorFieldSpec::Bump {
                height,
                width,
                component,
            } => {
                out[*component] += height * bump_profile(norm(x) / width);
            }
            VectorFieldSpec::Sum { terms } => {
                for t in terms {
                    t.eval_add(x, out);
                }
            }
        }
    }

    pub fn eval(&self, x: &[f64], out: &mut [f64]) {
        out.fill(0.0);
        self.eval_add(x, out);
    }

    pub fn singularities(&self) -> Vec<Singularity> {
        match self {
            VectorFieldSpec::PowerSingular { q, source, .. } if *q > 0.0 => {
                vec![Singularity::Hyperplane {
                    axis: *source,
                    offset: 0.0,
                }]
            }
            VectorFieldSpec::Sum { terms } => {
                terms.iter().flat_map(VectorFieldSpec::singularities).collect()
            }
            _ => Vec::new(),
        }
    }

    pub fn validate(&self, dim: usize) -> Result<()> {
        let comp = |c: usize| {
            if c < dim {
                Ok(())
            } else {
                Err(Error::param(format!("component {c} out of range for dimension {dim}")))
            }
        };
        match self {
            VectorFieldSpec::Constant { value } if value.len() != dim => Err(Error::DimensionMismatch {
                expected: dim,
                got: value.len(),
            }),
            VectorFieldSpec::PowerSingular { q, source, target, .. } => {
                if !(*q >= 0.0) {
                    return Err(Error::param("power_singular requires q >= 0"));
                }
                comp(*source)?;
                comp(*target)
            }
            VectorFieldSpec::ClampLinear { component } => comp(*component),
            VectorFieldSpec::Bump {
                width, component, ..
            } => {
                if !(*width > 0.0) {
                    return Err(Error::param("bump width must be positive"));
                }
                comp(*component)
            }
            VectorFieldSpec::Sum { terms } => terms.iter().try_for_each(|t| t.validate(dim)),
            _ => Ok(()),
        }
    }

    /// Bound on `sup |b|` when the field is bounded.
    pub fn sup_bound(&self) -> Option<f64> {
        match self {
            VectorFieldSpec::Zero => Some(0.0),
            VectorFieldSpec::Constant { value } => Some(norm(value)),
            VectorFieldSpec::ConstantRadial { beta } | VectorFieldSpec::SaturatedRadial { beta } => {
                Some(beta.abs())
            }
            VectorFieldSpec::ClampLinear { .. } => Some(1.0),
            VectorFieldSpec::Bump { height, .. } => Some(height.abs()),
            VectorFieldSpec::Linear { scale } if *scale == 0.0 => Some(0.0),
            VectorFieldSpec::Sum { terms } => terms
                .iter()
                .map(|t| t.sup_bound())
                .try_fold(0.0, |acc, b| b.map(|v| acc + v)),
            _ => None,
        }
    }
}

/// `exp(1 - 1/(1 - s^2))` for `|s| < 1`, zero otherwise; equals 1 at 0.
pub fn bump_profile(s: f64) -> f64 {
    let s2 = s * s;
    if s2 >= 1.0 {
        0.0
    } else {
        (1.0 - 1.0 / (1.0 - s2)).exp()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum DiffusionSpec {
    /// `eps * I`
    Scalar { eps: f64 },
    Diagonal { diag: Vec<f64> },
    /// Row-major constant matrix.
    Matrix { rows: Vec<Vec<f64>> },
    /// `(base + slope * min(|x|, cap)) * I`
    RadialRamp { base: f64, slope: f64, cap: f64 },
}

impl DiffusionSpec {
    /// Writes `sigma(x)` row-major into `out` (`dim * dim`).
    pub fn eval(&self, x: &[f64], out: &mut [f64]) {
        let d = x.len();
        match self {
            DiffusionSpec::Scalar { eps } => diag_fill(out, d, |_| *eps),
            DiffusionSpec::Diagonal { diag } => diag_fill(out, d, |i| diag[i]),
            DiffusionSpec::Matrix { rows } => {
                for (i, row) in rows.iter().enumerate() {
                    out[i * d..(i + 1) * d].copy_from_slice(row);
                }
            }
            DiffusionSpec::RadialRamp { base, slope, cap } => {
                let s = base + slope * norm(x).min(*cap);
                diag_fill(out, d, |_| s);
            }
        }
    }

    /// Diagonal entries when the matrix is diagonal for every `x`.
    pub fn is_diagonal(&self) -> bool {
        !matches!(self, DiffusionSpec::Matrix { .. })
    }

    /// Diffusion independent of `x`.
    pub fn is_constant(&self) -> bool {
        !matches!(self, DiffusionSpec::RadialRamp { slope, .. } if *slope != 0.0)
    }

    pub fn validate(&self, dim: usize) -> Result<()> {
        match self {
            DiffusionSpec::Diagonal { diag } if diag.len() != dim => Err(Error::DimensionMismatch {
                expected: dim,
                got: diag.len(),
            }),
            DiffusionSpec::Matrix { rows } => {
                if rows.len() != dim || rows.iter().any(|r| r.len() != dim) {
                    Err(Error::param(format!("diffusion matrix must be {dim}x{dim}")))
                } else {
                    Ok(())
                }
            }
            DiffusionSpec::RadialRamp { cap, .. } if !(*cap >= 0.0) => {
                Err(Error::param("radial_ramp cap must be nonnegative"))
            }
            _ => Ok(()),
        }
    }
}

fn diag_fill(out: &mut [f64], d: usize, f: impl Fn(usize) -> f64) {
    out.fill(0.0);
    for i in 0..d {
        out[i * d + i] = f(i);
    }
}

/// Nonnegative scalar fields used as occupation integrands and PDE data.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ScalarFieldSpec {
    Zero,
    Constant { value: f64 },
    /// 1 on `|x| <= inner`, 0 on `|x| >= outer`, smooth in between.
    SmoothIndicator { inner: f64, outer: f64 },
    Indicator { radius: f64 },
    Bump { height: f64, width: f64 },
}

impl ScalarFieldSpec {
    pub fn eval(&self, x: &[f64]) -> f64 {
        match self {
            ScalarFieldSpec::Zero => 0.0,
            ScalarFieldSpec::Constant { value } => *value,
            ScalarFieldSpec::SmoothIndicator { inner, outer } => {
                let r = norm(x);
                if r <= *inner {
                    1.0
                } else if r >= *outer {
                    0.0
                } else {
                    smooth_step((outer - r) / (outer - inner))
                }
            }
            ScalarFieldSpec::Indicator { radius } => {
                if norm(x) <= *radius {
                    1.0
                } else {
                    0.0
                }
            }
            ScalarFieldSpec::Bump { height, width } => height * bump_profile(norm(x) / width),
        }
    }

    pub fn sup(&self) -> f64 {
        match self {
            ScalarFieldSpec::Zero => 0.0,
            ScalarFieldSpec::Constant { value } => value.abs(),
            ScalarFieldSpec::SmoothIndicator { .. } | ScalarFieldSpec::Indicator { .. } => 1.0,
            ScalarFieldSpec::Bump { height, .. } => height.abs(),
        }
    }

    /// True when `f >= 0` everywhere.
    pub fn is_nonnegative(&self) -> bool {
        match self {
            ScalarFieldSpec::Constant { value } => *value >= 0.0,
            ScalarFieldSpec::Bump { height, .. } => *height >= 0.0,
            _ => true,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            ScalarFieldSpec::SmoothIndicator { inner, outer } if !(0.0 <= *inner && inner < outer) => {
                Err(Error::param("smooth_indicator requires 0 <= inner < outer"))
            }
            ScalarFieldSpec::Bump { width, .. } if !(*width > 0.0) => Err(Error::param("bump width must be positive")),
            _ => Ok(()),
        }
    }
}
