//! Compressed sparse rows, ILU(0) and preconditioned BiCGSTAB.

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct Csr {
    pub n: usize,
    pub row_ptr: Vec<usize>,
    pub cols: Vec<usize>,
    pub vals: Vec<f64>,
}

impl Csr {
    /// Builds from per-row `(col, value)` lists; duplicate columns are summed
    /// and columns sorted.
    pub fn from_rows(rows: Vec<Vec<(usize, f64)>>) -> Self {
        let n = rows.len();
        let mut row_ptr = Vec::with_capacity(n + 1);
        let mut cols = Vec::new();
        let mut vals = Vec::new();
        row_ptr.push(0);
        for mut r in rows {
            r.sort_by_key(|e| e.0);
            let mut last: Option<usize> = None;
            for (c, v) in r {
                if last == Some(c) {
                    *vals.last_mut().unwrap() += v;
                } else {
                    cols.push(c);
                    vals.push(v);
                    last = Some(c);
                }
            }
            row_ptr.push(cols.len());
        }
        Csr { n, row_ptr, cols, vals }
    }

    pub fn matvec(&self, x: &[f64], y: &mut [f64]) {
        for (i, yi) in y.iter_mut().enumerate().take(self.n) {
            let mut s = 0.0;
            for k in self.row_ptr[i]..self.row_ptr[i + 1] {
                s += self.vals[k] * x[self.cols[k]];
            }
            *yi = s;
        }
    }
}

/// Incomplete LU with the sparsity of `A`. `L` has unit diagonal.
pub struct Ilu0 {
    lu: Csr,
    diag: Vec<usize>,
}

impl Ilu0 {
    pub fn new(a: &Csr) -> Result<Self> {
        let mut lu = a.clone();
        let n = a.n;
        let mut diag = vec![usize::MAX; n];
        for (i, di) in diag.iter_mut().enumerate() {
            for k in lu.row_ptr[i]..lu.row_ptr[i + 1] {
                if lu.cols[k] == i {
                    *di = k;
                }
            }
            if *di == usize::MAX {
                return Err(Error::Inconsistent(format!("row {i} has no diagonal entry")));
            }
        }
        let mut pos = vec![usize::MAX; n];
        for i in 0..n {
            let (start, end) = (lu.row_ptr[i], lu.row_ptr[i + 1]);
            for k in start..end {
                pos[lu.cols[k]] = k;
            }
            for k in start..end {
                let j = lu.cols[k];
                if j >= i {
                    break;
                }
                let piv = lu.vals[diag[j]];
                if piv == 0.0 {
                    return Err(Error::Inconsistent("zero pivot in ILU(0)".into()));
                }
                let m = lu.vals[k] / piv;
                lu.vals[k] = m;
                for kk in diag[j] + 1..lu.row_ptr[j + 1] {
                    let c = lu.cols[kk];
                    if pos[c] != usize::MAX {
                        lu.vals[pos[c]] -= m * lu.vals[kk];
                    }
                }
            }
            for k in start..end {
                pos[lu.cols[k]] = usize::MAX;
            }
        }
        Ok(Ilu0 { lu, diag })
    }

    /// Solves `L U z = r`.
    pub fn apply(&self, r: &[f64], z: &mut [f64]) {
        let lu = &self.lu;
        for i in 0..lu.n {
            let mut s = r[i];
            for k in lu.row_ptr[i]..self.diag[i] {
                s -= lu.vals[k] * z[lu.cols[k]];
            }
            z[i] = s;
        }
        for i in (0..lu.n).rev() {
            let mut s = z[i];
            for k in self.diag[i] + 1..lu.row_ptr[i + 1] {
                s -= lu.vals[k] * z[lu.cols[k]];
            }
            z[i] = s / lu.vals[self.diag[i]];
        }
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn nrm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveInfo {
    pub iterations: usize,
    /// `|b - A x| / |b|` (absolute when `b = 0`).
    pub residual: f64,
    pub history: Vec<f64>,
}

/// Right-preconditioned BiCGSTAB.
pub fn bicgstab(a: &Csr, b: &[f64], x: &mut [f64], tol: f64, max_iter: usize) -> Result<SolveInfo> {
    let n = a.n;
    let bnorm = nrm(b);
    if bnorm == 0.0 {
        x.fill(0.0);
        return Ok(SolveInfo {
            iterations: 0,
            residual: 0.0,
            history: vec![0.0],
        });
    }
    let m = Ilu0::new(a)?;
    let mut r = vec![0.0; n];
    a.matvec(x, &mut r);
    for i in 0..n {
        r[i] = b[i] - r[i];
    }
    let r0 = r.clone();
    let (mut rho, mut alpha, mut omega) = (1.0, 1.0, 1.0);
    let mut v = vec![0.0; n];
    let mut p = vec![0.0; n];
    let mut phat = vec![0.0; n];
    let mut s = vec![0.0; n];
    let mut shat = vec![0.0; n];
    let mut t = vec![0.0; n];
    let mut history = vec![nrm(&r) / bnorm];
    for it in 1..=max_iter {
        let rho_new = dot(&r0, &r);
        if rho_new == 0.0 {
            break;
        }
        let beta = (rho_new / rho) * (alpha / omega);
        for i in 0..n {
            p[i] = r[i] + beta * (p[i] - omega * v[i]);
        }
        m.apply(&p, &mut phat);
        a.matvec(&phat, &mut v);
        alpha = rho_new / dot(&r0, &v);
        for i in 0..n {
            s[i] = r[i] - alpha * v[i];
        }
        if nrm(&s) / bnorm <= tol {
            for i in 0..n {
                x[i] += alpha * phat[i];
            }
            let res = true_residual(a, b, x) / bnorm;
            history.push(res);
            if res <= tol {
                return Ok(SolveInfo {
                    iterations: it,
                    residual: res,
                    history,
                });
            }
            a.matvec(x, &mut r);
            for i in 0..n {
                r[i] = b[i] - r[i];
            }
            rho = 1.0;
            alpha = 1.0;
            omega = 1.0;
            v.fill(0.0);
            p.fill(0.0);
            continue;
        }
        m.apply(&s, &mut shat);
        a.matvec(&shat, &mut t);
        omega = dot(&t, &s) / dot(&t, &t);
        for i in 0..n {
            x[i] += alpha * phat[i] + omega * shat[i];
            r[i] = s[i] - omega * t[i];
        }
        rho = rho_new;
        let rel = nrm(&r) / bnorm;
        history.push(rel);
        if rel <= tol {
            let res = true_residual(a, b, x) / bnorm;
            if res <= tol {
                return Ok(SolveInfo {
                    iterations: it,
                    residual: res,
                    history,
                });
            }
        }
        if !rel.is_finite() || omega == 0.0 {
            break;
        }
    }
    let res = true_residual(a, b, x) / bnorm;
    Err(Error::NoConvergence {
        iterations: history.len() - 1,
        residual: res,
        history,
    })
}

pub fn true_residual(a: &Csr, b: &[f64], x: &[f64]) -> f64 {
    let mut ax = vec![0.0; a.n];
    a.matvec(x, &mut ax);
    ax.iter().zip(b).map(|(p, q)| (q - p) * (q - p)).sum::<f64>().sqrt()
}

/// Thomas algorithm for `lower[i] x[i-1] + diag[i] x[i] + upper[i] x[i+1] = rhs[i]`.
pub fn solve_tridiagonal(lower: &[f64], diag: &[f64], upper: &[f64], rhs: &[f64]) -> Result<Vec<f64>> {
    let n = diag.len();
    let mut c = vec![0.0; n];
    let mut d = vec![0.0; n];
    let mut x = vec![0.0; n];
    if n == 0 {
        return Ok(x);
    }
    let mut denom = diag[0];
    for i in 0..n {
        if i > 0 {
            denom = diag[i] - lower[i] * c[i - 1];
        }
        if denom == 0.0 || !denom.is_finite() {
            return Err(Error::Inconsistent(format!("singular tridiagonal pivot at row {i}")));
        }
        c[i] = if i + 1 < n { upper[i] / denom } else { 0.0 };
        d[i] = (rhs[i] - if i > 0 { lower[i] * d[i - 1] } else { 0.0 }) / denom;
    }
    x[n - 1] = d[n - 1];
    for i in (0..n - 1).rev() {
        x[i] = d[i] - c[i] * x[i + 1];
    }
    Ok(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn laplace_2d(m: usize, shift: f64, conv: f64) -> Csr {
        let idx = |i: usize, j: usize| i * m + j;
        let mut rows = Vec::new();
        for i in 0..m {
            for j in 0..m {
                let mut r = vec![(idx(i, j), 4.0 + shift)];
                if i > 0 {
                    r.push((idx(i - 1, j), -1.0 - conv));
                }
                if i + 1 < m {
                    r.push((idx(i + 1, j), -1.0 + conv));
                }
                if j > 0 {
                    r.push((idx(i, j - 1), -1.0));
                }
                if j + 1 < m {
                    r.push((idx(i, j + 1), -1.0));
                }
                rows.push(r);
            }
        }
        Csr::from_rows(rows)
    }

    #[test]
    fn bicgstab_solves_nonsymmetric_system() {
        let a = laplace_2d(30, 0.01, 0.3);
        let xs: Vec<f64> = (0..a.n).map(|k| ((k * 7919) % 101) as f64 / 101.0 - 0.5).collect();
        let mut b = vec![0.0; a.n];
        a.matvec(&xs, &mut b);
        let mut x = vec![0.0; a.n];
        let info = bicgstab(&a, &b, &mut x, 1e-12, 10_000).unwrap();
        assert!(info.residual <= 1e-12);
        let err = xs.iter().zip(&x).map(|(p, q)| (p - q).abs()).fold(0.0, f64::max);
        assert!(err < 1e-8, "{err}");
    }

    #[test]
    fn tridiagonal_matches_dense() {
        let lower = [0.0, -1.0, -1.0, -1.0];
        let diag = [3.0, 3.0, 3.0, 3.0];
        let upper = [-1.0, -1.0, -0.5, 0.0];
        let x = [1.0, -2.0, 0.5, 4.0];
        let rhs: Vec<f64> = (0..4)
            .map(|i| {
                diag[i] * x[i] + if i > 0 { lower[i] * x[i - 1] } else { 0.0 } + if i < 3 { upper[i] * x[i + 1] } else { 0.0 }
            })
            .collect();
        let got = solve_tridiagonal(&lower, &diag, &upper, &rhs).unwrap();
        for (g, e) in got.iter().zip(x) {
            assert!((g - e).abs() < 1e-14);
        }
    }

    #[test]
    fn zero_rhs_gives_zero() {
        let a = laplace_2d(5, 1.0, 0.0);
        let mut x = vec![1.0; a.n];
        bicgstab(&a, &vec![0.0; a.n], &mut x, 1e-12, 10).unwrap();
        assert!(x.iter().all(|v| *v == 0.0));
    }
}
