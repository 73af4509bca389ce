//! Gauss–Legendre rules and composite 1-D partitions.

use std::f64::consts::PI;

/// Nodes and weights of the `n`-point Gauss–Legendre rule on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre(n, x);
        if d != 0.0 {
            dp = d;
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

fn legendre(n: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
        p0 = p1;
        p1 = p2;
    }
    (p1, n as f64 * (x * p1 - p0) / (x * x - 1.0))
}

/// Composite rule on `[a, b]`: breakpoints and `(node, weight)` pairs.
pub fn composite(breaks: &[f64], rule: &(Vec<f64>, Vec<f64>)) -> Vec<(f64, f64)> {
    let mut out = Vec::with_capacity(breaks.len() * rule.0.len());
    for w in breaks.windows(2) {
        let (lo, hi) = (w[0], w[1]);
        let half = 0.5 * (hi - lo);
        let mid = 0.5 * (hi + lo);
        for (x, wt) in rule.0.iter().zip(&rule.1) {
            out.push((mid + half * x, half * wt));
        }
    }
    out
}

/// Uniform breakpoints on `[a, b]` with about `per_unit` cells per unit
/// length, geometrically graded towards each point of `graded` inside the
/// interval. An interval of half-width `gap` around each graded point is
/// left out.
pub fn graded_breaks(a: f64, b: f64, per_unit: usize, graded: &[f64], gap: f64) -> Vec<f64> {
    let n = (((b - a) * per_unit as f64).ceil() as usize).max(1);
    let mut br: Vec<f64> = (0..=n).map(|k| a + (b - a) * k as f64 / n as f64).collect();
    let h = (b - a) / n as f64;
    for &c in graded {
        if c <= a || c >= b {
            continue;
        }
        let mut s = h;
        while s > gap {
            for v in [c - s, c + s] {
                if v > a && v < b {
                    br.push(v);
                }
            }
            s *= 0.5;
        }
        br.push((c - gap).max(a));
        br.push((c + gap).min(b));
    }
    br.sort_by(f64::total_cmp);
    br.dedup_by(|x, y| (*x - *y).abs() < 1e-15);
    let excluded = |lo: f64, hi: f64| graded.iter().any(|&c| lo >= c - gap - 1e-15 && hi <= c + gap + 1e-15);
    // Rebuild as a list of (lo, hi) cells and drop excluded ones by
    // encoding them as separate break runs.
    let mut cells = Vec::new();
    for w in br.windows(2) {
        if !excluded(w[0], w[1]) && w[1] > w[0] {
            cells.push((w[0], w[1]));
        }
    }
    flatten_cells(&cells)
}

/// Encodes cells as a breakpoint list where an excluded gap appears as a
/// NaN separator; [`composite_cells`] understands this encoding.
fn flatten_cells(cells: &[(f64, f64)]) -> Vec<f64> {
    let mut out: Vec<f64> = Vec::new();
    for &(lo, hi) in cells {
        match out.last() {
            Some(&last) if last == lo => out.push(hi),
            Some(_) => {
                out.push(f64::NAN);
                out.push(lo);
                out.push(hi);
            }
            None => {
                out.push(lo);
                out.push(hi);
            }
        }
    }
    out
}

/// Like [`composite`] but skips NaN-separated gaps.
pub fn composite_cells(breaks: &[f64], rule: &(Vec<f64>, Vec<f64>)) -> Vec<(f64, f64)> {
    let mut out = Vec::new();
    for run in breaks.split(|v| v.is_nan()) {
        out.extend(composite(run, rule));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gauss_legendre_integrates_polynomials_exactly() {
        let rule = gauss_legendre(6);
        for k in 0..12 {
            let s: f64 = rule.0.iter().zip(&rule.1).map(|(x, w)| w * x.powi(k)).sum();
            let exact = if k % 2 == 1 { 0.0 } else { 2.0 / (k as f64 + 1.0) };
            assert!((s - exact).abs() < 1e-14, "k={k} got {s}");
        }
    }

    #[test]
    fn graded_breaks_skip_gap() {
        let br = graded_breaks(-1.0, 1.0, 4, &[0.0], 1e-6);
        let q = composite_cells(&br, &gauss_legendre(8));
        assert!(q.iter().all(|(x, _)| x.abs() >= 1e-6));
        let total: f64 = q.iter().map(|(_, w)| w).sum();
        assert!((total - (2.0 - 2e-6)).abs() < 1e-12);
        // integrable singularity |x|^{-1/2}
        let s: f64 = q.iter().map(|(x, w)| w * x.abs().powf(-0.5)).sum();
        assert!((s - (4.0 - 4.0 * 1e-3)).abs() < 1e-6, "{s}");
    }
}
