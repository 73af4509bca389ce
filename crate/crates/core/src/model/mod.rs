//! SDE coefficient models, localized norms and assumption probes.

pub mod fields;
pub mod kernel;
pub mod norm;
pub mod probe;
pub mod quadrature;
pub mod serde_inf;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
pub use fields::{bump_profile, DiffusionSpec, ScalarFieldSpec, Singularity, VectorFieldSpec};
pub use kernel::LocalizationKernel;
pub use norm::{localized_lp_norm, NormWindow};
pub use probe::{
    beta_lower, beta_star, candidate_r0, holder_modulus_a, probe_ellipticity, EllipticityReport,
    HolderEstimate, ShellEstimate, ShellSampling,
};

/// Norms that feed the constants engine. Declared values take precedence;
/// missing values can be filled in by [`SdeModel::measure_norms`].
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DeclaredNorms {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub norm_b: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub norm_b1: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub norm_b2: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub norm_grad_sigma: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sigma_sup: Option<f64>,
}

/// Fully resolved norms.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelNorms {
    pub norm_b: f64,
    pub norm_b1: f64,
    pub norm_b2: f64,
    pub norm_grad_sigma: f64,
    pub sigma_sup: f64,
}

/// `dX = (b1 + b2)(X) dt + sigma(X) dW` in `R^dim` with ellipticity
/// bounds `k1 |z|^2 <= <sigma sigma^T z, z> <= k2 |z|^2`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SdeModel {
    pub dim: usize,
    #[serde(default = "zero_field")]
    pub b1: VectorFieldSpec,
    #[serde(default = "zero_field")]
    pub b2: VectorFieldSpec,
    pub sigma: DiffusionSpec,
    pub k1: f64,
    pub k2: f64,
    /// Drift integrability exponent; `inf` by default.
    #[serde(default = "infinity", with = "serde_inf")]
    pub p: f64,
    /// Integrability exponent of the diffusion gradient; `inf` by default.
    #[serde(default = "infinity", with = "serde_inf")]
    pub rho: f64,
    #[serde(default)]
    pub norms: DeclaredNorms,
}

fn zero_field() -> VectorFieldSpec {
    VectorFieldSpec::Zero
}
fn infinity() -> f64 {
    f64::INFINITY
}

impl SdeModel {
    /// Identity-diffusion model with drift `b2` and `K1 = K2 = 1`.
    pub fn brownian(dim: usize, b2: VectorFieldSpec) -> Self {
        SdeModel {
            dim,
            b1: VectorFieldSpec::Zero,
            b2,
            sigma: DiffusionSpec::Scalar { eps: 1.0 },
            k1: 1.0,
            k2: 1.0,
            p: f64::INFINITY,
            rho: f64::INFINITY,
            norms: DeclaredNorms::default(),
        }
    }

    /// Checks the standing assumptions that can be checked statically.
    pub fn validate(&self) -> Result<()> {
        let d = self.dim;
        if d == 0 {
            return Err(Error::param("dimension must be positive"));
        }
        if !(self.k1 > 0.0 && self.k1 <= self.k2) {
            return Err(Error::param(format!(
                "ellipticity bounds must satisfy 0 < k1 <= k2 (got {}, {})",
                self.k1, self.k2
            )));
        }
        if !(self.p > 2.0 * d as f64) {
            return Err(Error::param(format!("p = {} must exceed 2d = {}", self.p, 2 * d)));
        }
        if !(self.rho > 2.0 * d as f64) {
            return Err(Error::param(format!("rho = {} must exceed 2d = {}", self.rho, 2 * d)));
        }
        self.b1.validate(d)?;
        self.b2.validate(d)?;
        self.sigma.validate(d)?;
        let n = &self.norms;
        for v in [n.norm_b, n.norm_b1, n.norm_b2, n.norm_grad_sigma, n.sigma_sup].into_iter().flatten() {
            if !(v >= 0.0) {
                return Err(Error::param("declared norms must be nonnegative"));
            }
        }
        Ok(())
    }

    /// `b(x) = b1(x) + b2(x)`; may contain infinities on singular sets.
    pub fn drift(&self, x: &[f64], out: &mut [f64]) {
        out.fill(0.0);
        self.b1.eval_add(x, out);
        self.b2.eval_add(x, out);
    }

    /// Row-major `sigma(x)`.
    pub fn diffusion(&self, x: &[f64], out: &mut [f64]) {
        self.sigma.eval(x, out);
    }

    /// Row-major `a = sigma sigma^T`.
    pub fn diffusion_a(&self, x: &[f64]) -> Vec<f64> {
        let d = self.dim;
        let mut s = vec![0.0; d * d];
        self.sigma.eval(x, &mut s);
        let mut a = vec![0.0; d * d];
        for i in 0..d {
            for j in 0..d {
                a[i * d + j] = (0..d).map(|k| s[i * d + k] * s[j * d + k]).sum();
            }
        }
        a
    }

    pub fn singularities(&self) -> Vec<Singularity> {
        let mut s = self.b1.singularities();
        s.extend(self.b2.singularities());
        s
    }

    /// Fills in missing norms by measurement on `window`.
    ///
    /// Drift norms use the model's `p`, the diffusion gradient uses `rho`
    /// (central differences with step `1e-5`), and `sigma_sup` is the
    /// largest operator norm over the window's quadrature centers.
    pub fn measure_norms(&self, window: &NormWindow) -> Result<ModelNorms> {
        let d = self.dim;
        let n = &self.norms;
        let mut window = window.clone();
        window.singularities.extend(self.singularities());
        fn mag(f: &VectorFieldSpec, d: usize) -> impl Fn(&[f64]) -> f64 + Sync + '_ {
            move |x: &[f64]| {
                let mut o = vec![0.0; d];
                f.eval(x, &mut o);
                crate::mesh::norm(&o)
            }
        }
        let norm_b = match n.norm_b {
            Some(v) => v,
            None => localized_lp_norm(
                |x| {
                    let mut o = vec![0.0; d];
                    self.drift(x, &mut o);
                    crate::mesh::norm(&o)
                },
                d,
                self.p,
                &window,
            )?,
        };
        let norm_b1 = match n.norm_b1 {
            Some(v) => v,
            None => localized_lp_norm(mag(&self.b1, d), d, self.p, &window)?,
        };
        let norm_b2 = match n.norm_b2 {
            Some(v) => v,
            None => localized_lp_norm(mag(&self.b2, d), d, self.p, &window)?,
        };
        let norm_grad_sigma = match n.norm_grad_sigma {
            Some(v) => v,
            None if self.sigma.is_constant() => 0.0,
            None => localized_lp_norm(|x| self.grad_sigma_frobenius(x), d, self.rho, &window)?,
        };
        let sigma_sup = match n.sigma_sup {
            Some(v) => v,
            None => {
                let mut best = 0.0f64;
                for z in window.centers()? {
                    best = best.max(probe::operator_norm(&self.diffusion_matrix(&z), d));
                }
                if !self.sigma.is_constant() {
                    if let DiffusionSpec::RadialRamp { base, slope, cap } = &self.sigma {
                        best = best.max((base + slope * cap).abs()).max(base.abs());
                    }
                }
                best
            }
        };
        Ok(ModelNorms {
            norm_b,
            norm_b1,
            norm_b2,
            norm_grad_sigma,
            sigma_sup,
        })
    }

    /// Norms that are declared; errors naming the first missing one.
    pub fn declared_norms(&self) -> Result<ModelNorms> {
        let n = &self.norms;
        let get = |v: Option<f64>, name: &str| v.ok_or_else(|| Error::Config(format!("norm `{name}` is not declared")));
        Ok(ModelNorms {
            norm_b: get(n.norm_b, "norm_b")?,
            norm_b1: get(n.norm_b1, "norm_b1")?,
            norm_b2: get(n.norm_b2, "norm_b2")?,
            norm_grad_sigma: get(n.norm_grad_sigma, "norm_grad_sigma")?,
            sigma_sup: get(n.sigma_sup, "sigma_sup")?,
        })
    }

    pub fn diffusion_matrix(&self, x: &[f64]) -> Vec<f64> {
        let mut s = vec![0.0; self.dim * self.dim];
        self.sigma.eval(x, &mut s);
        s
    }

    fn grad_sigma_frobenius(&self, x: &[f64]) -> f64 {
        let d = self.dim;
        let h = 1e-5;
        let mut total = 0.0;
        let mut xp = x.to_vec();
        let mut xm = x.to_vec();
        for k in 0..d {
            xp[k] = x[k] + h;
            xm[k] = x[k] - h;
            let sp = self.diffusion_matrix(&xp);
            let sm = self.diffusion_matrix(&xm);
            total += sp.iter().zip(&sm).map(|(a, b)| ((a - b) / (2.0 * h)).powi(2)).sum::<f64>();
            xp[k] = x[k];
            xm[k] = x[k];
        }
        total.sqrt()
    }
}
