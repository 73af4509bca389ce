//! Functions sampled on a square lattice with zero Dirichlet boundary.

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::model::LocalizationKernel;
use crate::simulate::export::{write_binary, SnapshotHeader};

/// Values on the nodes `origin + i h`, `i = 0..=n`, per axis. Node
/// `(i, j)` is stored at `i (n + 1) + j`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridFunction {
    pub dims: usize,
    pub n: usize,
    pub h: f64,
    pub origin: f64,
    pub values: Vec<f64>,
    /// Always `"zero_dirichlet"`.
    pub boundary: String,
}

impl GridFunction {
    pub fn zeros(dims: usize, n: usize, h: f64, origin: f64) -> Self {
        GridFunction {
            dims,
            n,
            h,
            origin,
            values: vec![0.0; (n + 1).pow(dims as u32)],
            boundary: "zero_dirichlet".into(),
        }
    }

    pub fn nodes_per_axis(&self) -> usize {
        self.n + 1
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Multi-index of flat node `k`.
    pub fn multi_index(&self, k: usize) -> Vec<usize> {
        let m = self.n + 1;
        match self.dims {
            1 => vec![k],
            _ => vec![k / m, k % m],
        }
    }

    pub fn flat(&self, idx: &[usize]) -> usize {
        let m = self.n + 1;
        match self.dims {
            1 => idx[0],
            _ => idx[0] * m + idx[1],
        }
    }

    pub fn coord(&self, k: usize) -> Vec<f64> {
        self.multi_index(k)
            .into_iter()
            .map(|i| self.origin + i as f64 * self.h)
            .collect()
    }

    pub fn is_boundary(&self, k: usize) -> bool {
        self.multi_index(k).iter().any(|&i| i == 0 || i == self.n)
    }

    /// Piecewise (bi)linear interpolation; zero outside the domain.
    pub fn interpolate(&self, x: &[f64]) -> f64 {
        let mut base = [0usize; 2];
        let mut frac = [0.0f64; 2];
        for a in 0..self.dims {
            let s = (x[a] - self.origin) / self.h;
            if !(s >= 0.0 && s <= self.n as f64) {
                return 0.0;
            }
            let i = (s.floor() as usize).min(self.n - 1);
            base[a] = i;
            frac[a] = s - i as f64;
        }
        match self.dims {
            1 => {
                let (u0, u1) = (self.values[base[0]], self.values[base[0] + 1]);
                u0 + frac[0] * (u1 - u0)
            }
            _ => {
                let v = |di: usize, dj: usize| self.values[self.flat(&[base[0] + di, base[1] + dj])];
                let (fx, fy) = (frac[0], frac[1]);
                (1.0 - fx) * ((1.0 - fy) * v(0, 0) + fy * v(0, 1)) + fx * ((1.0 - fy) * v(1, 0) + fy * v(1, 1))
            }
        }
    }

    /// Discrete gradient at node `k`: central inside, one-sided on the edge.
    pub fn gradient_at(&self, k: usize) -> Vec<f64> {
        let idx = self.multi_index(k);
        (0..self.dims)
            .map(|a| {
                let mut lo = idx.clone();
                let mut hi = idx.clone();
                let mut span = 2.0;
                if idx[a] == 0 {
                    hi[a] += 1;
                    span = 1.0;
                } else if idx[a] == self.n {
                    lo[a] -= 1;
                    span = 1.0;
                } else {
                    lo[a] -= 1;
                    hi[a] += 1;
                }
                (self.values[self.flat(&hi)] - self.values[self.flat(&lo)]) / (span * self.h)
            })
            .collect()
    }

    /// Gradient as one grid function per partial derivative.
    pub fn gradient(&self) -> Vec<GridFunction> {
        let mut out = vec![GridFunction::zeros(self.dims, self.n, self.h, self.origin); self.dims];
        for k in 0..self.len() {
            for (a, g) in self.gradient_at(k).into_iter().enumerate() {
                out[a].values[k] = g;
            }
        }
        out
    }

    pub fn sup_norm(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Localized `L_p` norm of the node values: kernel-weighted Riemann
    /// sums around centers on a lattice of spacing 1/2.
    pub fn localized_norm(&self, p: f64) -> f64 {
        localized_norm_of(self, |k| self.values[k].abs(), p)
    }

    /// `coords..., value` rows.
    pub fn to_csv(&self) -> String {
        let mut s = String::new();
        for a in 0..self.dims {
            s.push_str(&format!("x{a},"));
        }
        s.push_str("value\n");
        for k in 0..self.len() {
            for c in self.coord(k) {
                s.push_str(&format!("{c},"));
            }
            s.push_str(&format!("{}\n", self.values[k]));
        }
        s
    }
}

/// Localized norm of a nonnegative nodal quantity `g(k)` on the lattice of
/// `grid`.
pub fn localized_norm_of<G: Fn(usize) -> f64>(grid: &GridFunction, g: G, p: f64) -> f64 {
    let kernel = LocalizationKernel::default();
    let lo = grid.origin;
    let hi = grid.origin + grid.n as f64 * grid.h;
    let nc = ((hi - lo) / 0.5).floor() as usize;
    let axis: Vec<f64> = (0..=nc).map(|k| lo + 0.5 * k as f64).collect();
    let centers: Vec<Vec<f64>> = match grid.dims {
        1 => axis.iter().map(|&c| vec![c]).collect(),
        _ => axis.iter().flat_map(|&a| axis.iter().map(move |&b| vec![a, b])).collect(),
    };
    let vol = grid.h.powi(grid.dims as i32);
    let reach = (1.0 / grid.h).ceil() as isize + 1;
    let mut best = 0.0f64;
    for z in &centers {
        let ci: Vec<isize> = z.iter().map(|c| ((c - lo) / grid.h).round() as isize).collect();
        let range = |a: usize| (ci[a] - reach).max(0) as usize..=((ci[a] + reach).min(grid.n as isize)) as usize;
        let mut acc = 0.0f64;
        let mut visit = |k: usize| {
            let w = kernel.eval(&grid.coord(k), z);
            if w > 0.0 {
                let v = w * g(k);
                if p.is_infinite() {
                    acc = acc.max(v);
                } else {
                    acc += vol * v.powf(p);
                }
            }
        };
        if grid.dims == 1 {
            for i in range(0) {
                visit(i);
            }
        } else {
            for i in range(0) {
                for j in range(1) {
                    visit(grid.flat(&[i, j]));
                }
            }
        }
        let val = if p.is_infinite() { acc } else { acc.powf(1.0 / p) };
        best = best.max(val);
    }
    best
}

/// Writes components sharing one lattice in the binary snapshot format:
/// one snapshot, one "member" per node, `dim = dims + components` columns
/// `(coords..., values...)`.
pub fn write_grid_binary<W: Write>(components: &[&GridFunction], out: &mut W) -> Result<()> {
    let g = components[0];
    let width = g.dims + components.len();
    let mut rows = Vec::with_capacity(g.len() * width);
    for k in 0..g.len() {
        rows.extend(g.coord(k));
        rows.extend(components.iter().map(|c| c.values[k]));
    }
    let header = SnapshotHeader {
        dim: width as u32,
        n_members: g.len() as u32,
        n_snapshots: 1,
        stride: 0,
    };
    write_binary(header, &[(0.0, &rows)], out)
}
