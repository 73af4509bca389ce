//! Deterministic point sets on spheres: boundary meshes, probe directions and
//! shell samples.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

/// `n` unit vectors in `R^dim`.
///
/// * `dim == 1`: the two endpoints `+1`, `-1` (`n` is ignored).
/// * `dim == 2`: uniform angles `2πk/n`.
/// * `dim == 3`: Fibonacci sphere.
/// * larger `dim`: normalised Gaussian vectors from a fixed seed.
pub fn unit_directions(dim: usize, n: usize) -> Vec<Vec<f64>> {
    match dim {
        0 => Vec::new(),
        1 => vec![vec![1.0], vec![-1.0]],
        2 => (0..n)
            .map(|k| {
                let th = std::f64::consts::TAU * k as f64 / n as f64;
                vec![th.cos(), th.sin()]
            })
            .collect(),
        3 => fibonacci_sphere(n),
        _ => {
            let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_d1ec);
            (0..n)
                .map(|_| {
                    let v: Vec<f64> = (0..dim).map(|_| StandardNormal.sample(&mut rng)).collect();
                    let norm = v.iter().map(|c| c * c).sum::<f64>().sqrt();
                    v.into_iter().map(|c| c / norm).collect()
                })
                .collect()
        }
    }
}

fn fibonacci_sphere(n: usize) -> Vec<Vec<f64>> {
    if n == 1 {
        return vec![vec![0.0, 0.0, 1.0]];
    }
    let golden = std::f64::consts::PI * (3.0 - 5f64.sqrt());
    (0..n)
        .map(|k| {
            let z = 1.0 - 2.0 * k as f64 / (n - 1) as f64;
            let rad = (1.0 - z * z).max(0.0).sqrt();
            let th = golden * k as f64;
            vec![rad * th.cos(), rad * th.sin(), z]
        })
        .collect()
}

/// Coordinate axes `±e_i` followed by `n` further directions; used for
/// Rayleigh-quotient probing where the axes must always be present.
pub fn probe_directions(dim: usize, n: usize) -> Vec<Vec<f64>> {
    let mut dirs = Vec::with_capacity(2 * dim + n);
    for i in 0..dim {
        let mut e = vec![0.0; dim];
        e[i] = 1.0;
        dirs.push(e);
    }
    if dim > 1 {
        dirs.extend(unit_directions(dim, n));
    }
    dirs
}

/// Points on the sphere of given centre and radius.
pub fn sphere_mesh(center: &[f64], radius: f64, resolution: usize) -> Vec<Vec<f64>> {
    unit_directions(center.len(), resolution)
        .into_iter()
        .map(|u| center.iter().zip(&u).map(|(c, e)| c + radius * e).collect())
        .collect()
}

pub fn norm(x: &[f64]) -> f64 {
    x.iter().map(|c| c * c).sum::<f64>().sqrt()
}

pub fn dist(x: &[f64], y: &[f64]) -> f64 {
    x.iter().zip(y).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt()
}

/// Winding number of the closed polygon `pts` (2-D) around the origin.
pub fn winding_number(pts: &[[f64; 2]]) -> i64 {
    let n = pts.len();
    if n < 2 {
        return 0;
    }
    let mut total = 0.0;
    for i in 0..n {
        let a = pts[i];
        let b = pts[(i + 1) % n];
        let cross = a[0] * b[1] - a[1] * b[0];
        let dot = a[0] * b[0] + a[1] * b[1];
        total += cross.atan2(dot);
    }
    (total / std::f64::consts::TAU).round() as i64
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn directions_are_unit() {
        for dim in 1..=5 {
            for u in unit_directions(dim, 17) {
                assert!((norm(&u) - 1.0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn even_circle_mesh_has_antipodes() {
        let m = sphere_mesh(&[0.0, 0.0], 1.0, 8);
        assert!((dist(&m[0], &m[4]) - 2.0).abs() < 1e-15);
    }

    #[test]
    fn winding_of_circle() {
        let pts: Vec<[f64; 2]> = unit_directions(2, 12).iter().map(|u| [u[0], u[1]]).collect();
        assert_eq!(winding_number(&pts), 1);
        let shifted: Vec<[f64; 2]> = pts.iter().map(|p| [p[0] + 3.0, p[1]]).collect();
        assert_eq!(winding_number(&shifted), 0);
    }
}
