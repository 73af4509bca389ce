//! Localized `L_p` norms: `sup_z || xi(. - z) f ||_{L_p}` over a lattice of
//! centers.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::fields::Singularity;
use crate::model::kernel::LocalizationKernel;
use crate::model::quadrature::{composite_cells, gauss_legendre, graded_breaks};

/// Half-width of the excluded slab/ball around declared singularities.
pub const SINGULAR_GAP: f64 = 1e-6;

/// Lattice of centers and quadrature resolution.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NormWindow {
    /// Lower corner of the center lattice (per coordinate).
    pub lo: Vec<f64>,
    /// Upper corner of the center lattice.
    pub hi: Vec<f64>,
    pub center_spacing: f64,
    /// Composite cells per unit length.
    #[serde(default = "default_cells")]
    pub cells_per_unit: usize,
    /// Gauss–Legendre points per cell.
    #[serde(default = "default_order")]
    pub order: usize,
    #[serde(default)]
    pub singularities: Vec<Singularity>,
}

fn default_cells() -> usize {
    8
}
fn default_order() -> usize {
    6
}

impl NormWindow {
    /// Cube of centers `[-half, half]^dim`.
    pub fn cube(dim: usize, half: f64, spacing: f64) -> Self {
        NormWindow {
            lo: vec![-half; dim],
            hi: vec![half; dim],
            center_spacing: spacing,
            cells_per_unit: default_cells(),
            order: default_order(),
            singularities: Vec::new(),
        }
    }

    pub fn centers(&self) -> Result<Vec<Vec<f64>>> {
        if self.lo.len() != self.hi.len() {
            return Err(Error::DimensionMismatch {
                expected: self.lo.len(),
                got: self.hi.len(),
            });
        }
        if !(self.center_spacing > 0.0) {
            return Err(Error::param("center_spacing must be positive"));
        }
        let axes: Vec<Vec<f64>> = self
            .lo
            .iter()
            .zip(&self.hi)
            .map(|(&a, &b)| {
                if b < a {
                    return Vec::new();
                }
                let n = ((b - a) / self.center_spacing + 1e-9).floor() as usize;
                (0..=n).map(|k| a + k as f64 * self.center_spacing).collect()
            })
            .collect();
        let centers = tensor(&axes);
        if centers.is_empty() {
            return Err(Error::Empty("center lattice"));
        }
        Ok(centers)
    }
}

fn tensor(axes: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let mut out: Vec<Vec<f64>> = vec![Vec::new()];
    for ax in axes {
        let mut next = Vec::with_capacity(out.len() * ax.len());
        for p in &out {
            for &v in ax {
                let mut q = p.clone();
                q.push(v);
                next.push(q);
            }
        }
        out = next;
    }
    if axes.is_empty() {
        Vec::new()
    } else {
        out
    }
}

/// Estimates `||f||_{~L_p}` for `f` given as a magnitude oracle `|f|(x)`.
///
/// `p = f64::INFINITY` takes the maximum of `xi |f|` over the quadrature
/// nodes and the center itself.
pub fn localized_lp_norm<F>(f: F, dim: usize, p: f64, window: &NormWindow) -> Result<f64>
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    if !(p >= 1.0) {
        return Err(Error::param(format!("exponent p = {p} must be in [1, inf]")));
    }
    if window.lo.len() != dim {
        return Err(Error::DimensionMismatch {
            expected: dim,
            got: window.lo.len(),
        });
    }
    let kernel = LocalizationKernel::default();
    let centers = window.centers()?;
    let rule = gauss_legendre(window.order.max(1));
    let per_center: Vec<Result<f64>> = centers
        .par_iter()
        .map(|z| center_norm(&f, &kernel, z, p, window, &rule))
        .collect();
    let mut best = 0.0f64;
    for v in per_center {
        best = best.max(v?);
    }
    Ok(best)
}

fn center_norm<F>(
    f: &F,
    kernel: &LocalizationKernel,
    z: &[f64],
    p: f64,
    window: &NormWindow,
    rule: &(Vec<f64>, Vec<f64>),
) -> Result<f64>
where
    F: Fn(&[f64]) -> f64,
{
    let dim = z.len();
    let axes: Vec<Vec<(f64, f64)>> = (0..dim)
        .map(|a| {
            let graded: Vec<f64> = window
                .singularities
                .iter()
                .filter_map(|s| match s {
                    Singularity::Hyperplane { axis, offset } if *axis == a => Some(*offset),
                    Singularity::Point { at } => at.get(a).copied(),
                    _ => None,
                })
                .collect();
            let br = graded_breaks(z[a] - 1.0, z[a] + 1.0, window.cells_per_unit, &graded, SINGULAR_GAP);
            composite_cells(&br, rule)
        })
        .collect();
    let near_point = |x: &[f64]| {
        window.singularities.iter().any(|s| match s {
            Singularity::Point { at } => crate::mesh::dist(x, at) < SINGULAR_GAP,
            Singularity::Hyperplane { axis, offset } => (x[*axis] - offset).abs() < SINGULAR_GAP,
        })
    };
    let mut x = vec![0.0; dim];
    let mut idx = vec![0usize; dim];
    let mut acc = 0.0f64;
    let mut sup = 0.0f64;
    if p.is_infinite() && !near_point(z) {
        let v = f(z);
        check_finite(z, v)?;
        sup = v.abs();
    }
    'outer: loop {
        let mut w = 1.0;
        for a in 0..dim {
            let (xa, wa) = axes[a][idx[a]];
            x[a] = xa;
            w *= wa;
        }
        let k = kernel.eval(&x, z);
        if k > 0.0 && !near_point(&x) {
            let v = f(&x);
            check_finite(&x, v)?;
            let m = k * v.abs();
            if p.is_infinite() {
                sup = sup.max(m);
            } else {
                acc += w * m.powf(p);
            }
        }
        for a in (0..dim).rev() {
            idx[a] += 1;
            if idx[a] < axes[a].len() {
                continue 'outer;
            }
            idx[a] = 0;
        }
        break;
    }
    Ok(if p.is_infinite() { sup } else { acc.powf(1.0 / p) })
}

fn check_finite(x: &[f64], v: f64) -> Result<()> {
    if v.is_finite() {
        Ok(())
    } else {
        Err(Error::NonFinite {
            point: x.to_vec(),
            value: v,
        })
    }
}
