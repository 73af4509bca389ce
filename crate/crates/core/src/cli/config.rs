//! Declarative scenario files (TOML).

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::attractor::Lemma61Params;
use crate::constants::CalibrationSet;
use crate::dispersion::BallSpec;
use crate::error::{Error, Result};
use crate::model::{ScalarFieldSpec, SdeModel};
use crate::simulate::Taming;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

/// A complete scenario. Every subcommand section has defaults, so a file
/// with only `[model]` runs every subcommand except the packaged examples,
/// which build their own models.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    #[serde(default)]
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
    #[serde(default)]
    pub format: Format,
    #[serde(default)]
    pub taming: Taming,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub model: Option<SdeModel>,
    #[serde(default)]
    pub calibration: CalibrationSet,
    #[serde(default)]
    pub norms: NormsParams,
    #[serde(default)]
    pub simulate_flow: SimulateFlowParams,
    #[serde(default)]
    pub dispersion: DispersionParams,
    #[serde(default)]
    pub two_point: TwoPointParams,
    #[serde(default)]
    pub constants: ConstantsParams,
    #[serde(default)]
    pub krylov: KrylovParams,
    #[serde(default)]
    pub khasminskii: KhasminskiiParams,
    #[serde(default)]
    pub zvonkin: ZvonkinParams,
    #[serde(default)]
    pub pde_scaling: PdeScalingParams,
    #[serde(default)]
    pub pullback: PullbackParams,
    #[serde(default)]
    pub expansion: ExpansionParams,
    #[serde(default)]
    pub lemma61: Lemma61Section,
    #[serde(default)]
    pub example_2_5: Example25Params,
    #[serde(default)]
    pub case_study: CaseStudyParams,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        ScenarioConfig {
            seed: 0,
            out: None,
            format: Format::Csv,
            taming: Taming::Clip,
            model: None,
            calibration: CalibrationSet::default(),
            norms: NormsParams::default(),
            simulate_flow: SimulateFlowParams::default(),
            dispersion: DispersionParams::default(),
            two_point: TwoPointParams::default(),
            constants: ConstantsParams::default(),
            krylov: KrylovParams::default(),
            khasminskii: KhasminskiiParams::default(),
            zvonkin: ZvonkinParams::default(),
            pde_scaling: PdeScalingParams::default(),
            pullback: PullbackParams::default(),
            expansion: ExpansionParams::default(),
            lemma61: Lemma61Section::default(),
            example_2_5: Example25Params::default(),
            case_study: CaseStudyParams::default(),
        }
    }
}

impl ScenarioConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: ScenarioConfig = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_toml(&std::fs::read_to_string(path)?)
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn validate(&self) -> Result<()> {
        self.calibration.validate()?;
        if let Some(m) = &self.model {
            m.validate()?;
        }
        Ok(())
    }

    pub fn model(&self) -> Result<&SdeModel> {
        self.model
            .as_ref()
            .ok_or_else(|| Error::Config("this subcommand needs a [model] section".into()))
    }
}

fn origin_point() -> Vec<f64> {
    Vec::new()
}

/// Where norms come from when the model does not declare them.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct NormsParams {
    /// Half-width of the measurement window.
    pub extent: f64,
    pub center_spacing: f64,
    /// Hölder modulus of `a`.
    pub omega_holder: f64,
}

impl Default for NormsParams {
    fn default() -> Self {
        NormsParams {
            extent: 3.0,
            center_spacing: 0.5,
            omega_holder: 0.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SimulateFlowParams {
    /// Initial points; the origin when empty.
    pub initials: Vec<Vec<f64>>,
    pub horizon: f64,
    pub dt: f64,
    pub snapshot_stride: u64,
}

impl Default for SimulateFlowParams {
    fn default() -> Self {
        SimulateFlowParams {
            initials: Vec::new(),
            horizon: 1.0,
            dt: 1e-3,
            snapshot_stride: 100,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DispersionParams {
    /// Centered at the origin with radius 1 when absent.
    pub ball: Option<BallSpec>,
    pub horizon: f64,
    pub dt: f64,
    pub record_every: u64,
    pub replicas: usize,
}

impl Default for DispersionParams {
    fn default() -> Self {
        DispersionParams {
            ball: None,
            horizon: 5.0,
            dt: 1e-2,
            record_every: 10,
            replicas: 32,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TwoPointParams {
    /// Defaults: the origin and the first unit vector.
    #[serde(default = "origin_point")]
    pub x: Vec<f64>,
    #[serde(default = "origin_point")]
    pub y: Vec<f64>,
    pub orders: Vec<f64>,
    pub horizons: Vec<f64>,
    pub dt: f64,
    pub replicas: usize,
    /// Exponent for the `c1` fit; no fit when absent.
    pub alpha: Option<f64>,
}

impl Default for TwoPointParams {
    fn default() -> Self {
        TwoPointParams {
            x: Vec::new(),
            y: Vec::new(),
            orders: vec![1.0, 2.0, 4.0],
            horizons: vec![0.5, 1.0, 2.0],
            dt: 1e-3,
            replicas: 200,
            alpha: None,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ConstantsParams {
    /// Radii at which ϱ is evaluated (needs transformed norms).
    pub varrho_r: Vec<f64>,
    /// Transformed norms for ϱ; taken from a Zvonkin solve when absent
    /// and `zvonkin_norms` is set.
    pub zvonkin_norms: bool,
}

fn smoothed_indicator() -> ScalarFieldSpec {
    ScalarFieldSpec::SmoothIndicator { inner: 1.0, outer: 1.25 }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct KrylovParams {
    pub f: ScalarFieldSpec,
    #[serde(with = "crate::model::serde_inf")]
    pub q: f64,
    pub windows: Vec<(f64, f64)>,
    #[serde(default = "origin_point")]
    pub x0: Vec<f64>,
    pub dt: f64,
    pub replicas: usize,
    /// Half-width of the window on which `‖f‖` is measured.
    pub norm_extent: f64,
}

impl Default for KrylovParams {
    fn default() -> Self {
        KrylovParams {
            f: smoothed_indicator(),
            q: f64::INFINITY,
            windows: vec![(0.0, 1.0), (0.0, 2.0), (0.0, 4.0)],
            x0: Vec::new(),
            dt: 1e-2,
            replicas: 1000,
            norm_extent: 3.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct KhasminskiiParams {
    pub f: ScalarFieldSpec,
    #[serde(with = "crate::model::serde_inf")]
    pub q: f64,
    pub lambda: f64,
    pub horizon: f64,
    #[serde(default = "origin_point")]
    pub x0: Vec<f64>,
    pub dt: f64,
    pub replicas: usize,
    pub norm_extent: f64,
}

impl Default for KhasminskiiParams {
    fn default() -> Self {
        KhasminskiiParams {
            f: smoothed_indicator(),
            q: f64::INFINITY,
            lambda: 0.1,
            horizon: 1.0,
            x0: Vec::new(),
            dt: 1e-2,
            replicas: 1000,
            norm_extent: 3.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ZvonkinParams {
    /// Taken from the constants engine when absent.
    pub lambda: Option<f64>,
    pub domain_radius: f64,
    pub h: f64,
}

impl Default for ZvonkinParams {
    fn default() -> Self {
        ZvonkinParams {
            lambda: None,
            domain_radius: 8.0,
            h: 0.05,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PdeScalingParams {
    pub lambdas: Vec<f64>,
    pub f: ScalarFieldSpec,
    #[serde(with = "crate::model::serde_inf")]
    pub p: f64,
    #[serde(with = "crate::model::serde_inf")]
    pub p_prime: f64,
    pub domain_radius: f64,
    pub h: f64,
}

impl Default for PdeScalingParams {
    fn default() -> Self {
        PdeScalingParams {
            lambdas: vec![10.0, 100.0, 1e3, 1e4],
            f: ScalarFieldSpec::Bump { height: 1.0, width: 1.0 },
            p: 4.0,
            p_prime: 4.0,
            domain_radius: 8.0,
            h: 0.02,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CriterionParams {
    pub r_grid: Vec<f64>,
    pub big_r_grid: Vec<f64>,
    /// Depths `{0, 1, 2, 4, ...}` up to this horizon.
    pub horizon: f64,
    pub replicas: usize,
}

impl Default for CriterionParams {
    fn default() -> Self {
        CriterionParams {
            r_grid: vec![1.0, 2.0, 4.0],
            big_r_grid: vec![2.0, 4.0, 8.0],
            horizon: 8.0,
            replicas: 100,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PullbackParams {
    pub gamma: f64,
    pub r: f64,
    pub depths: Vec<f64>,
    pub mesh_resolution: usize,
    pub replicas: usize,
    pub dt: f64,
    /// Inner radius of the shell on which the tail drift rate is sampled.
    pub beta_shell: f64,
    pub criterion: Option<CriterionParams>,
}

impl Default for PullbackParams {
    fn default() -> Self {
        PullbackParams {
            gamma: 0.0,
            r: 5.0,
            depths: vec![1.0, 2.0, 4.0, 8.0],
            mesh_resolution: 16,
            replicas: 200,
            dt: 1e-2,
            beta_shell: 10.0,
            criterion: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExpansionParams {
    pub r: f64,
    pub gamma: f64,
    pub horizon: f64,
    pub check_every: u64,
    pub mesh_resolution: usize,
    pub replicas: usize,
    pub dt: f64,
    pub beta_shell: f64,
}

impl Default for ExpansionParams {
    fn default() -> Self {
        ExpansionParams {
            r: 10.0,
            gamma: 2.0,
            horizon: 10.0,
            check_every: 10,
            mesh_resolution: 32,
            replicas: 100,
            dt: 1e-2,
            beta_shell: 10.0,
        }
    }
}

fn yes() -> bool {
    true
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Lemma61Scenario {
    pub case: u8,
    pub params: Lemma61Params,
    pub replicas: usize,
    pub dt: f64,
    /// Replace `beta_upper`/`beta_lower` by values sampled from the model
    /// (at `r`, or at `big_r` for case 3).
    #[serde(default = "yes")]
    pub sample_beta: bool,
    /// Outer radius of the sampling shell.
    #[serde(default)]
    pub shell_cap: Option<f64>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Lemma61Section {
    pub scenarios: Vec<Lemma61Scenario>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Example25Params {
    pub epsilons: Vec<f64>,
    pub q: f64,
    pub horizon: f64,
    pub dt: f64,
    pub replicas: usize,
}

impl Default for Example25Params {
    fn default() -> Self {
        Example25Params {
            epsilons: vec![1.0, 0.5, 0.25],
            q: 0.2,
            horizon: 1e4,
            dt: 1e-3,
            replicas: 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CaseStudyParams {
    /// Exponent slack ε > 0.
    pub eps: f64,
    /// Declared `‖∇σ‖∞`; zero for constant diffusion when absent.
    pub grad_sigma_sup: Option<f64>,
    pub dispersion: DispersionParams,
}

impl Default for CaseStudyParams {
    fn default() -> Self {
        CaseStudyParams {
            eps: 0.01,
            grad_sigma_sup: None,
            dispersion: DispersionParams::default(),
        }
    }
}
