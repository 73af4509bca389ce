//! Numerical probes of the standing assumptions.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mesh::{dist, norm, probe_directions, unit_directions};
use crate::model::SdeModel;

pub const ELLIPTICITY_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EllipticityViolation {
    pub point: Vec<f64>,
    pub direction: Vec<f64>,
    pub quotient: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EllipticityReport {
    pub k1_hat: f64,
    pub k2_hat: f64,
    pub probes: usize,
    pub violations: Vec<EllipticityViolation>,
}

/// Rayleigh quotients `<a(x) z, z> / |z|^2` over `points` and
/// `directions_per_point` directions (coordinate axes always included).
pub fn probe_ellipticity(
    model: &SdeModel,
    points: &[Vec<f64>],
    directions_per_point: usize,
) -> Result<EllipticityReport> {
    if points.is_empty() {
        return Err(Error::Empty("probe sample"));
    }
    let d = model.dim;
    let dirs = probe_directions(d, directions_per_point);
    let mut k1_hat = f64::INFINITY;
    let mut k2_hat = 0.0f64;
    let mut violations = Vec::new();
    let mut probes = 0;
    for x in points {
        if x.len() != d {
            return Err(Error::DimensionMismatch { expected: d, got: x.len() });
        }
        let a = model.diffusion_a(x);
        for z in &dirs {
            let zz: f64 = z.iter().map(|v| v * v).sum();
            let q: f64 = (0..d)
                .map(|i| z[i] * (0..d).map(|j| a[i * d + j] * z[j]).sum::<f64>())
                .sum::<f64>()
                / zz;
            probes += 1;
            if q.is_finite() {
                k1_hat = k1_hat.min(q);
                k2_hat = k2_hat.max(q);
            }
            let bad = !q.is_finite()
                || q <= 0.0
                || q < model.k1 - ELLIPTICITY_TOL
                || q > model.k2 + ELLIPTICITY_TOL;
            if bad {
                violations.push(EllipticityViolation {
                    point: x.clone(),
                    direction: z.clone(),
                    quotient: q,
                });
            }
        }
    }
    Ok(EllipticityReport {
        k1_hat,
        k2_hat,
        probes,
        violations,
    })
}

/// Largest singular value of a row-major `d x d` matrix.
pub fn operator_norm(m: &[f64], d: usize) -> f64 {
    DMatrix::from_row_slice(d, d, m)
        .singular_values()
        .iter()
        .fold(0.0f64, |acc, v| acc.max(*v))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HolderEstimate {
    pub omega: f64,
    pub exponent: f64,
    pub used: usize,
    pub skipped: usize,
}

/// Lower estimate of the `(1 - d/rho)`-Hölder modulus of `a` from sampled
/// pairs. Pairs farther apart than 1 (or coincident) are skipped and counted.
pub fn holder_modulus_a(model: &SdeModel, pairs: &[(Vec<f64>, Vec<f64>)]) -> Result<HolderEstimate> {
    let d = model.dim;
    if !(model.rho > d as f64) {
        return Err(Error::param("Hölder exponent needs rho > d"));
    }
    let exponent = 1.0 - d as f64 / model.rho;
    let mut omega = 0.0f64;
    let (mut used, mut skipped) = (0, 0);
    for (x, y) in pairs {
        let r = dist(x, y);
        if r > 1.0 || r == 0.0 {
            skipped += 1;
            continue;
        }
        used += 1;
        let ax = model.diffusion_a(x);
        let ay = model.diffusion_a(y);
        let diff: Vec<f64> = ax.iter().zip(&ay).map(|(p, q)| p - q).collect();
        omega = omega.max(operator_norm(&diff, d) / r.powf(exponent));
    }
    Ok(HolderEstimate {
        omega,
        exponent,
        used,
        skipped,
    })
}

/// Sampling design for radial sup/inf over a shell `r <= |x| <= shell_cap`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ShellSampling {
    /// Spacing of the radius lattice, anchored at the inner radius.
    pub radial_step: f64,
    pub directions: usize,
}

impl Default for ShellSampling {
    fn default() -> Self {
        ShellSampling {
            radial_step: 0.25,
            directions: 64,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ShellEstimate {
    pub value: f64,
    pub r: f64,
    pub shell_cap: f64,
    /// Radius at which the extremum was attained.
    pub attained_at: f64,
}

fn shell_extremum(
    model: &SdeModel,
    r: f64,
    shell_cap: f64,
    sampling: &ShellSampling,
    want_max: bool,
) -> Result<ShellEstimate> {
    if !(r >= 1.0) {
        return Err(Error::param("inner radius must be at least 1"));
    }
    if !(shell_cap > r) {
        return Err(Error::param("shell_cap must exceed r"));
    }
    if !(sampling.radial_step > 0.0) || sampling.directions == 0 {
        return Err(Error::param("shell sampling must be nonempty"));
    }
    let d = model.dim;
    let dirs = unit_directions(d, sampling.directions);
    let mut radii = Vec::new();
    let mut k = 0usize;
    loop {
        let rho = r + k as f64 * sampling.radial_step;
        if rho >= shell_cap {
            break;
        }
        radii.push(rho);
        k += 1;
    }
    radii.push(shell_cap);
    let mut best = if want_max { f64::NEG_INFINITY } else { f64::INFINITY };
    let mut at = r;
    let mut out = vec![0.0; d];
    let mut x = vec![0.0; d];
    for &rad in &radii {
        for u in &dirs {
            for i in 0..d {
                x[i] = rad * u[i];
            }
            model.b2.eval(&x, &mut out);
            let radial: f64 = x.iter().zip(&out).map(|(a, b)| a * b).sum::<f64>() / norm(&x);
            if !radial.is_finite() {
                return Err(Error::NonFinite {
                    point: x.clone(),
                    value: radial,
                });
            }
            let better = if want_max { radial > best } else { radial < best };
            if better {
                best = radial;
                at = rad;
            }
        }
    }
    Ok(ShellEstimate {
        value: best,
        r,
        shell_cap,
        attained_at: at,
    })
}

/// Sampled `sup_{r <= |x| <= shell_cap} x.b2(x)/|x| + (d-1) K2 / (2r)`.
///
/// Raising `shell_cap` can only add samples (the radius lattice is anchored
/// at `r`), so on caps aligned with the lattice the value is nondecreasing
/// in `shell_cap`.
pub fn beta_star(model: &SdeModel, r: f64, shell_cap: f64, sampling: &ShellSampling) -> Result<ShellEstimate> {
    let mut e = shell_extremum(model, r, shell_cap, sampling, true)?;
    e.value += (model.dim as f64 - 1.0) * model.k2 / (2.0 * r);
    Ok(e)
}

/// Sampled `inf_{r <= |x| <= shell_cap} x.b2(x)/|x|`; nonincreasing in
/// `shell_cap` on lattice-aligned caps.
pub fn beta_lower(model: &SdeModel, r: f64, shell_cap: f64, sampling: &ShellSampling) -> Result<ShellEstimate> {
    shell_extremum(model, r, shell_cap, sampling, false)
}

/// Smallest `r` in `[1, r_max]` (to `tol`) with `beta_star(r) <= 0`, by
/// bisection. `None` when even `r_max` fails. The shell extends to
/// `r + shell_width`. This is a candidate only: sufficiency is not claimed.
pub fn candidate_r0(
    model: &SdeModel,
    r_max: f64,
    shell_width: f64,
    sampling: &ShellSampling,
    tol: f64,
) -> Result<Option<f64>> {
    let f = |r: f64| beta_star(model, r, r + shell_width, sampling).map(|e| e.value);
    if f(1.0)? <= 0.0 {
        return Ok(Some(1.0));
    }
    if f(r_max)? > 0.0 {
        return Ok(None);
    }
    let (mut lo, mut hi) = (1.0, r_max);
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if f(mid)? <= 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(Some(hi))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{DiffusionSpec, VectorFieldSpec};

    fn diag_model(k2: f64) -> SdeModel {
        let mut m = SdeModel::brownian(2, VectorFieldSpec::Zero);
        m.sigma = DiffusionSpec::Diagonal { diag: vec![1.0, 2.0] };
        m.k1 = 1.0;
        m.k2 = k2;
        m
    }

    #[test]
    fn ellipticity_identity() {
        let m = SdeModel::brownian(2, VectorFieldSpec::Zero);
        let r = probe_ellipticity(&m, &[vec![0.0, 0.0], vec![1.0, 3.0]], 16).unwrap();
        assert_eq!((r.k1_hat, r.k2_hat), (1.0, 1.0));
        assert!(r.violations.is_empty());
    }

    #[test]
    fn ellipticity_diag() {
        let r = probe_ellipticity(&diag_model(4.0), &[vec![0.0, 0.0]], 16).unwrap();
        assert_eq!((r.k1_hat, r.k2_hat), (1.0, 4.0));
        assert!(r.violations.is_empty());
        let r = probe_ellipticity(&diag_model(3.0), &[vec![0.0, 0.0]], 16).unwrap();
        assert!(r.violations.iter().any(|v| v.direction == vec![0.0, 1.0] && v.quotient == 4.0));
    }

    #[test]
    fn singular_a_is_violation_not_panic() {
        let mut m = diag_model(4.0);
        m.sigma = DiffusionSpec::Diagonal { diag: vec![0.0, 1.0] };
        let r = probe_ellipticity(&m, &[vec![0.0, 0.0]], 4).unwrap();
        assert!(!r.violations.is_empty());
    }

    #[test]
    fn holder_constant_and_skipped() {
        let m = SdeModel::brownian(1, VectorFieldSpec::Zero);
        let pairs = vec![(vec![0.0], vec![0.5]), (vec![0.0], vec![2.0])];
        let h = holder_modulus_a(&m, &pairs).unwrap();
        assert_eq!(h.omega, 0.0);
        assert_eq!((h.used, h.skipped), (1, 1));
        let far = vec![(vec![0.0], vec![3.0]), (vec![1.0], vec![-1.0])];
        let h = holder_modulus_a(&m, &far).unwrap();
        assert_eq!((h.omega, h.used, h.skipped), (0.0, 0, 2));
    }

    #[test]
    fn beta_examples() {
        let s = ShellSampling::default();
        let mut m = SdeModel::brownian(2, VectorFieldSpec::ConstantRadial { beta: -3.0 });
        assert!((beta_star(&m, 2.0, 10.0, &s).unwrap().value - (-3.0 + 0.25)).abs() < 1e-12);
        assert!((beta_lower(&m, 2.0, 10.0, &s).unwrap().value + 3.0).abs() < 1e-12);
        m.b2 = VectorFieldSpec::Zero;
        assert_eq!(beta_star(&m, 2.0, 10.0, &s).unwrap().value, 0.25);
        m.b2 = VectorFieldSpec::Linear { scale: -1.0 };
        let up = beta_star(&m, 2.0, 10.0, &s).unwrap();
        assert!((up.value - (-2.0 + 0.25)).abs() < 1e-12);
        let down = beta_lower(&m, 2.0, 10.0, &s).unwrap();
        assert!((down.value + 10.0).abs() < 1e-12);
        assert_eq!(down.shell_cap, 10.0);
    }

    #[test]
    fn r0_candidate_for_inward_drift() {
        // beta*(r) = -1 + 1/(2r) <= 0 iff r >= 1/2, so r0 = 1.
        let m = SdeModel::brownian(2, VectorFieldSpec::ConstantRadial { beta: -1.0 });
        assert_eq!(candidate_r0(&m, 10.0, 2.0, &ShellSampling::default(), 1e-6).unwrap(), Some(1.0));
        // beta*(r) = -0.1 + 1/(2r) <= 0 iff r >= 5.
        let m = SdeModel::brownian(2, VectorFieldSpec::ConstantRadial { beta: -0.1 });
        let r0 = candidate_r0(&m, 10.0, 2.0, &ShellSampling::default(), 1e-9).unwrap().unwrap();
        assert!((r0 - 5.0).abs() < 1e-6);
    }
}
