//! Closed-form constants and thresholds.
//!
//! Constants whose existence is proved without a value enter as named
//! calibration factors (default 1) and are echoed with every result.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::serde_inf;

/// `1 - d/q`, which must be positive.
fn gap(d: f64, q: f64, what: &str) -> Result<f64> {
    let g = 1.0 - d / q;
    if !(g > 0.0) {
        return Err(Error::param(format!("exponent denominator 1 - d/{what} = {g} is not positive")));
    }
    Ok(g)
}

fn check_pos(v: f64, what: &str) -> Result<()> {
    if !(v > 0.0) {
        return Err(Error::param(format!("{what} must be positive (got {v})")));
    }
    Ok(())
}

/// Factors standing in for unspecified universal constants.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CalibrationSet {
    /// Krylov constant; per-exponent overrides in `c_kry_by_q`.
    pub c_kry: f64,
    /// Keys are the exponent `q` written as in the config (`"4"`, `"inf"`).
    pub c_kry_by_q: BTreeMap<String, f64>,
    /// Prefactor of the expansion-rate bound and of the transformed Γ.
    pub c_prd: f64,
    /// Resolvent threshold constant.
    pub c0_pde: f64,
    /// Constant in the Zvonkin threshold λ.
    pub c1_star: f64,
    /// Constant of the one-point tail term `c3`.
    pub c7_star: f64,
    /// Two-point stability constants (fit targets only).
    pub kappa0: f64,
    pub kappa1: f64,
    /// Prefactor of the bounded-coefficient expansion bound.
    pub case_c1: f64,
    /// Prefactor of the bounded-coefficient attractor threshold.
    pub case_c2: f64,
    /// Free-text provenance per entry; entries without a note are defaults.
    pub notes: BTreeMap<String, String>,
}

impl Default for CalibrationSet {
    fn default() -> Self {
        CalibrationSet {
            c_kry: 1.0,
            c_kry_by_q: BTreeMap::new(),
            c_prd: 1.0,
            c0_pde: 1.0,
            c1_star: 1.0,
            c7_star: 1.0,
            kappa0: 1.0,
            kappa1: 1.0,
            case_c1: 1.0,
            case_c2: 1.0,
            notes: BTreeMap::new(),
        }
    }
}

impl CalibrationSet {
    pub const NAMES: [&'static str; 9] = [
        "c_kry", "c_prd", "c0_pde", "c1_star", "c7_star", "kappa0", "kappa1", "case_c1", "case_c2",
    ];

    pub fn values(&self) -> [f64; 9] {
        [
            self.c_kry,
            self.c_prd,
            self.c0_pde,
            self.c1_star,
            self.c7_star,
            self.kappa0,
            self.kappa1,
            self.case_c1,
            self.case_c2,
        ]
    }

    pub fn validate(&self) -> Result<()> {
        for (n, v) in Self::NAMES.iter().zip(self.values()) {
            check_pos(v, n)?;
        }
        for (q, v) in &self.c_kry_by_q {
            check_pos(*v, &format!("c_kry[{q}]"))?;
        }
        Ok(())
    }

    /// Krylov constant for exponent `q`.
    pub fn c_kry(&self, q: f64) -> f64 {
        self.c_kry_by_q
            .iter()
            .find(|(k, _)| parse_exponent(k) == Some(q))
            .map(|(_, v)| *v)
            .unwrap_or(self.c_kry)
    }

    /// Provenance line per entry.
    pub fn provenance(&self) -> BTreeMap<String, String> {
        Self::NAMES
            .iter()
            .zip(self.values())
            .map(|(n, v)| {
                let note = match self.notes.get(*n) {
                    Some(s) => format!("{v} ({s})"),
                    None if v == 1.0 => "1 (default; constant has no known value)".to_string(),
                    None => format!("{v} (configured)"),
                };
                (n.to_string(), note)
            })
            .collect()
    }
}

fn parse_exponent(s: &str) -> Option<f64> {
    match s.trim() {
        "inf" | "infinity" => Some(f64::INFINITY),
        t => t.parse().ok(),
    }
}

/// `Γ = (K2/K1)^{4d²/(1-d/ρ)} + (|∇σ|²/K1)^{4d²/(1-d/ρ)} + (|b|/K1)^{4d/(1-d/p)}`.
pub fn gamma_factor(k1: f64, k2: f64, grad_sigma: f64, norm_b: f64, p: f64, rho: f64, d: usize) -> Result<f64> {
    check_pos(k1, "K1")?;
    let df = d as f64;
    let e_rho = 4.0 * df * df / gap(df, rho, "rho")?;
    let e_p = 4.0 * df / gap(df, p, "p")?;
    Ok((k2 / k1).powf(e_rho) + (grad_sigma * grad_sigma / k1).powf(e_rho) + (norm_b / k1).powf(e_p))
}

/// `Γ' = (K2/K1)^{4d²/(1-d/ρ)} + (|∇σ|²/K1)^{4d²/(1-d/ρ)}`.
pub fn gamma_prime(k1: f64, k2: f64, grad_sigma: f64, rho: f64, d: usize) -> Result<f64> {
    gamma_factor(k1, k2, grad_sigma, 0.0, f64::INFINITY, rho, d)
}

/// Γ of the transformed equation, in its closed upper-bound form
/// `C [(K2/K1)^{8d³/(g g_ρ)} + (|b|/K1)^{16d²/g} + (|∇σ|²/K1)^{16d³/(g g_ρ)}]`
/// with `g = 1 - d/(p∧ρ)`, `g_ρ = 1 - d/ρ`.
pub fn gamma_tilde(k1: f64, k2: f64, grad_sigma: f64, norm_b: f64, p: f64, rho: f64, d: usize, c_prd: f64) -> Result<f64> {
    check_pos(k1, "K1")?;
    let df = d as f64;
    let g = gap(df, p.min(rho), "(p^rho)")?;
    let gr = gap(df, rho, "rho")?;
    let d2 = df * df;
    let d3 = d2 * df;
    Ok(c_prd
        * ((k2 / k1).powf(8.0 * d3 / (g * gr))
            + (norm_b / k1).powf(16.0 * d2 / g)
            + (grad_sigma * grad_sigma / k1).powf(16.0 * d3 / (g * gr))))
}

/// Resolvent parameter used for the Zvonkin transform:
/// `C K1 [ (K2²/K1²) B^{2/(1-d/ρ)} + B^{2d/((1-d/ρ)(1-d/p))} (|b|/K1)^{2/(1-d/p)} ]`
/// with `B = (K1 + sqrt(K2) |∇σ|)/K1`.
pub fn lambda_zvonkin(k1: f64, k2: f64, grad_sigma: f64, norm_b: f64, p: f64, rho: f64, d: usize, c1_star: f64) -> Result<f64> {
    check_pos(k1, "K1")?;
    let df = d as f64;
    let gr = gap(df, rho, "rho")?;
    let gp = gap(df, p, "p")?;
    let base = (k1 + k2.sqrt() * grad_sigma) / k1;
    Ok(c1_star
        * k1
        * ((k2 * k2 / (k1 * k1)) * base.powf(2.0 / gr)
            + base.powf(2.0 * df / (gr * gp)) * (norm_b / k1).powf(2.0 / gp)))
}

/// Expansion-rate bound
/// `C (K2 + |b|² K2/K1² + |∇σ|²) [(K2/K1)^{16d³/(g g_ρ)} + (|b|/K1)^{32d²/g} + (|∇σ|²/K1)^{32d³/(g g_ρ)}]`.
pub fn kappa_star(k1: f64, k2: f64, grad_sigma: f64, norm_b: f64, p: f64, rho: f64, d: usize, c_prd: f64) -> Result<f64> {
    check_pos(k1, "K1")?;
    let df = d as f64;
    let g = gap(df, p.min(rho), "(p^rho)")?;
    let gr = gap(df, rho, "rho")?;
    let d2 = df * df;
    let d3 = d2 * df;
    let gs2 = grad_sigma * grad_sigma;
    let pre = k2 + norm_b * norm_b * k2 / (k1 * k1) + gs2;
    let bracket = (k2 / k1).powf(16.0 * d3 / (g * gr))
        + (norm_b / k1).powf(32.0 * d2 / g)
        + (gs2 / k1).powf(32.0 * d3 / (g * gr));
    Ok(c_prd * pre * bracket)
}

/// `β0 = 4 (|b1|² Γ + K2 |b1| sqrt(Γ)) / sqrt(K1 K2)`.
pub fn beta_zero(k1: f64, k2: f64, norm_b1: f64, gamma: f64) -> Result<f64> {
    if !(k1 * k2 > 0.0) {
        return Err(Error::param("K1 K2 must be positive"));
    }
    if !(gamma >= 0.0) {
        return Err(Error::param("Γ must be nonnegative"));
    }
    Ok(4.0 * (norm_b1 * norm_b1 * gamma + k2 * norm_b1 * gamma.sqrt()) / (k1 * k2).sqrt())
}

/// Norms of the transformed coefficients entering ϱ.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TransformedNorms {
    pub b_sup: f64,
    pub sigma_sup: f64,
    pub grad_b: f64,
    pub grad_sigma: f64,
    pub k2_tilde: f64,
    pub gamma_tilde: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum VarrhoVariant {
    Sobolev,
    /// Lipschitz diffusion with constant `l`.
    Lipschitz { l: f64 },
}

/// Stability exponent ϱ(r).
pub fn varrho(r: f64, n: &TransformedNorms, variant: VarrhoVariant) -> Result<f64> {
    if !(r >= 1.0) {
        return Err(Error::param("r must be at least 1"));
    }
    check_pos(n.k2_tilde, "transformed K2")?;
    let gb = n.gamma_tilde * n.grad_b;
    let common = n.b_sup + gb * gb / n.k2_tilde + gb;
    Ok(match variant {
        VarrhoVariant::Sobolev => {
            let gs2 = n.grad_sigma * n.grad_sigma;
            r.powi(4)
                * (common
                    + n.sigma_sup * n.sigma_sup
                    + n.gamma_tilde * n.gamma_tilde * gs2 * gs2 / n.k2_tilde
                    + n.gamma_tilde * gs2)
        }
        VarrhoVariant::Lipschitz { l } => r * r * (common + l * l),
    })
}

/// `(c1, c2, c3, α)` of the two-point/one-point chaining input.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CBundle {
    pub c1: f64,
    pub c2: f64,
    pub c3: f64,
    pub alpha: f64,
}

#[allow(clippy::too_many_arguments)]
pub fn c_bundle(
    k1: f64,
    k2: f64,
    grad_sigma: f64,
    norm_b: f64,
    sigma_sup: f64,
    lambda: f64,
    gamma_tilde: f64,
    gamma_prime: f64,
    c7_star: f64,
) -> Result<CBundle> {
    check_pos(k1, "K1")?;
    check_pos(k2, "K2")?;
    if !(sigma_sup > 0.0) {
        return Err(Error::param("|sigma|_inf must be positive for c2"));
    }
    let m = k2 * norm_b * norm_b / (k1 * k1) + grad_sigma * grad_sigma;
    let gl = gamma_tilde * lambda;
    let c1 = lambda + k2 + gl + gl * gl / k2 + gamma_tilde * gamma_tilde * m * m / k2 + gamma_tilde * m;
    let c2 = 1.0 / (4.0 * sigma_sup * sigma_sup);
    let b2 = norm_b * norm_b;
    let c3 = c7_star * (gamma_prime * gamma_prime * b2 * b2 / (k1 * k1 * k2) + gamma_prime * b2 / k1);
    Ok(CBundle { c1, c2, c3, alpha: 3.0 })
}

/// Resolvent threshold
/// `C0 K1 [ (K2²/K1²) B^{2/α} + B^{(d/α)(2/(1-d/p1))} (|b|/K1)^{2/(1-d/p1)} ]`,
/// `B = (K1 + ω)/K1`.
pub fn lambda_min_pde(k1: f64, k2: f64, omega: f64, alpha_holder: f64, norm_b: f64, p1: f64, d: usize, c0: f64) -> Result<f64> {
    check_pos(k1, "K1")?;
    if !(alpha_holder > 0.0 && alpha_holder <= 1.0) {
        return Err(Error::param("Hölder exponent must lie in (0, 1]"));
    }
    let df = d as f64;
    let g = gap(df, p1, "p1")?;
    let base = (k1 + omega) / k1;
    Ok(c0
        * k1
        * ((k2 * k2 / (k1 * k1)) * base.powf(2.0 / alpha_holder)
            + base.powf((df / alpha_holder) * (2.0 / g)) * (norm_b / k1).powf(2.0 / g)))
}

/// Krylov bound `C Γ (K2^{-1/2} sqrt(t-s) + (t-s)) |f|`.
pub fn krylov_bound(c_kry: f64, gamma: f64, k2: f64, span: f64, norm_f: f64) -> f64 {
    c_kry * gamma * (span.sqrt() / k2.sqrt() + span) * norm_f
}

/// Khasminskii bound `2 * 2^{T (κ²/K2 + 2κ)}` with `κ = 2 C λ Γ |f|`.
pub fn khasminskii_bound(c_kry: f64, lambda: f64, gamma: f64, norm_f: f64, k2: f64, horizon: f64) -> f64 {
    let kappa = 2.0 * c_kry * lambda * gamma * norm_f;
    2.0 * 2f64.powf(horizon * (kappa * kappa / k2 + 2.0 * kappa))
}

/// Bounded-coefficient expansion bound with exponent slack `eps`.
pub fn case_study_kappa(k1: f64, k2: f64, b_sup: f64, grad_sigma_sup: f64, d: usize, eps: f64, c1: f64) -> Result<f64> {
    if !(eps > 0.0) {
        return Err(Error::param("exponent slack eps must be positive"));
    }
    check_pos(k1, "K1")?;
    let df = d as f64;
    let gs2 = grad_sigma_sup * grad_sigma_sup;
    let pre = k2 + b_sup * b_sup * k2 / (k1 * k1) + gs2;
    let bracket = (k2 / k1).powf(16.0 * df.powi(3) + eps)
        + (gs2 / k1).powf(32.0 * df.powi(3) + eps)
        + (b_sup / k1).powf(32.0 * df * df + eps);
    Ok(c1 * pre * bracket)
}

/// Bounded-coefficient attractor threshold: attraction needs `β` below
/// `-value`.
#[allow(clippy::too_many_arguments)]
pub fn case_study_beta_threshold(k1: f64, k2: f64, b1_sup: f64, b2_sup: f64, grad_sigma_sup: f64, d: usize, eps: f64, c2: f64) -> Result<f64> {
    if !(eps > 0.0) {
        return Err(Error::param("exponent slack eps must be positive"));
    }
    check_pos(k1, "K1")?;
    let df = d as f64;
    let bracket = (k2 / k1).powf(4.0 * df * df + eps)
        + (grad_sigma_sup * grad_sigma_sup / k1).powf(4.0 * df * df + eps)
        + (b2_sup / k1).powf(4.0 * df + eps);
    Ok(c2 * (b1_sup * b1_sup + k2 * b1_sup) / (k1 * k2).sqrt() * bracket)
}

/// Everything the bundle is computed from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConstantInputs {
    pub d: usize,
    pub k1: f64,
    pub k2: f64,
    #[serde(with = "serde_inf")]
    pub p: f64,
    #[serde(with = "serde_inf")]
    pub rho: f64,
    pub norm_b: f64,
    pub norm_b1: f64,
    pub norm_grad_sigma: f64,
    pub sigma_sup: f64,
    /// Hölder modulus of `a` (0 for constant diffusion).
    #[serde(default)]
    pub omega_holder: f64,
    #[serde(default)]
    pub transformed: Option<TransformedNorms>,
    #[serde(default)]
    pub calibration: CalibrationSet,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConstantBundle {
    pub gamma: f64,
    pub gamma_tilde: f64,
    pub gamma_prime: f64,
    pub lambda_zvonkin: f64,
    pub c1: f64,
    pub c2: f64,
    pub c3: f64,
    pub alpha: f64,
    pub kappa_star: f64,
    pub beta_zero: f64,
    pub lambda_min_pde: f64,
    pub k1_tilde: f64,
    pub k2_tilde: f64,
    /// ϱ(1) when transformed norms were supplied.
    pub varrho_r1: Option<f64>,
    pub inputs: ConstantInputs,
    pub provenance: BTreeMap<String, String>,
}

impl ConstantBundle {
    pub fn compute(inputs: &ConstantInputs) -> Result<Self> {
        let i = inputs;
        let c = &i.calibration;
        c.validate()?;
        if !(i.k1 > 0.0 && i.k1 <= i.k2) {
            return Err(Error::param("need 0 < K1 <= K2"));
        }
        let d2 = 2.0 * i.d as f64;
        if !(i.p > d2 && i.rho > d2) {
            return Err(Error::param("need p > 2d and rho > 2d"));
        }
        let gamma = gamma_factor(i.k1, i.k2, i.norm_grad_sigma, i.norm_b, i.p, i.rho, i.d)?;
        let gamma_tilde = gamma_tilde(i.k1, i.k2, i.norm_grad_sigma, i.norm_b, i.p, i.rho, i.d, c.c_prd)?;
        let gamma_prime = gamma_prime(i.k1, i.k2, i.norm_grad_sigma, i.rho, i.d)?;
        let lambda = lambda_zvonkin(i.k1, i.k2, i.norm_grad_sigma, i.norm_b, i.p, i.rho, i.d, c.c1_star)?;
        let cb = c_bundle(
            i.k1,
            i.k2,
            i.norm_grad_sigma,
            i.norm_b,
            i.sigma_sup,
            lambda,
            gamma_tilde,
            gamma_prime,
            c.c7_star,
        )?;
        let alpha_holder = 1.0 - i.d as f64 / i.rho;
        Ok(ConstantBundle {
            gamma,
            gamma_tilde,
            gamma_prime,
            lambda_zvonkin: lambda,
            c1: cb.c1,
            c2: cb.c2,
            c3: cb.c3,
            alpha: cb.alpha,
            kappa_star: kappa_star(i.k1, i.k2, i.norm_grad_sigma, i.norm_b, i.p, i.rho, i.d, c.c_prd)?,
            beta_zero: beta_zero(i.k1, i.k2, i.norm_b1, gamma)?,
            lambda_min_pde: lambda_min_pde(i.k1, i.k2, i.omega_holder, alpha_holder, i.norm_b, i.p, i.d, c.c0_pde)?,
            k1_tilde: i.k1 / 4.0,
            k2_tilde: 9.0 * i.k2 / 4.0,
            varrho_r1: match &i.transformed {
                Some(t) => Some(varrho(1.0, t, VarrhoVariant::Sobolev)?),
                None => None,
            },
            inputs: i.clone(),
            provenance: c.provenance(),
        })
    }

    pub fn varrho(&self, r: f64, variant: VarrhoVariant) -> Result<f64> {
        let t = self
            .inputs
            .transformed
            .as_ref()
            .ok_or_else(|| Error::Config("transformed norms were not supplied".into()))?;
        varrho(r, t, variant)
    }
}
