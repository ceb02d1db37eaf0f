//! Run configuration: a TOML file with one table per concern.
//!
//! Every key has a default except `model.kind`. Unknown keys are rejected.

use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context, Result};
use ct_core::ea::{compute_bounds, AlignmentBounds, ComparisonKind, InfluenceKind, InfluenceSpec};
use ct_core::pde::PdeConfig;
use ct_core::profiles::{RadialVelocity, Shape};
use ct_core::{CharState, IntegratorConfig, ModelKind, ModelParams, ProfileKind, RadialField, RadialProfile};
use serde::{Deserialize, Serialize};

/// Model selector as written in the config file.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ModelName {
    EulerPoisson,
    EulerAlignment,
    InviscidBurgers,
    DampedBurgers,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelSection {
    pub kind: ModelName,
    /// Spatial dimension.
    #[serde(default = "one")]
    pub n: f64,
    /// Force strength; the damping constant for damped Burgers.
    #[serde(default = "one")]
    pub kappa: f64,
    /// Background density.
    #[serde(default)]
    pub c: f64,
}

fn one() -> f64 {
    1.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct IntegratorSection {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub h_init: f64,
    pub h_min: f64,
    pub h_max: f64,
    pub t_max: f64,
    pub magnitude_cap: f64,
    pub max_steps: usize,
}

impl Default for IntegratorSection {
    fn default() -> Self {
        let d = IntegratorConfig::default();
        Self {
            rel_tol: d.rel_tol,
            abs_tol: d.abs_tol,
            h_init: d.h_init,
            h_min: d.h_min,
            h_max: d.h_max,
            t_max: d.t_max,
            magnitude_cap: d.magnitude_cap,
            max_steps: d.max_steps,
        }
    }
}

/// Initial characteristic state `(p, q, s, rho)` for Euler-Poisson and Burgers runs.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct StateSection {
    pub p0: f64,
    pub q0: f64,
    pub s0: f64,
    pub rho0: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Quantity {
    #[default]
    Q,
    G,
}

/// Alignment thresholds: either explicit bounds or bounds computed from the
/// `[influence]`, `[density]` and `[velocity]` tables.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct AlignmentSection {
    pub quantity: Quantity,
    /// Initial value of `q` or `G`.
    pub y0: f64,
    /// Initial envelope; computed from the profiles when absent.
    pub c0: Option<f64>,
    pub psi_min: Option<f64>,
    pub psi_max: Option<f64>,
    /// Radius containing the flock, needed when bounds come from profiles.
    pub flock_radius: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum InfluenceName {
    Constant,
    Algebraic,
    CuckerSmale,
    Exponential,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct InfluenceSection {
    pub kind: InfluenceName,
    /// Decay exponent, rate or constant value depending on the family.
    pub param: f64,
    pub scale: f64,
}

impl Default for InfluenceSection {
    fn default() -> Self {
        Self {
            kind: InfluenceName::Algebraic,
            param: 0.5,
            scale: 1.0,
        }
    }
}

/// A closed-form profile or a two-column `r,value` CSV file.
///
/// Velocity shapes are multiplied by `r` so that they vanish at the origin.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ProfileSection {
    pub shape: String,
    pub amplitude: f64,
    /// Width or radius.
    pub scale: f64,
    /// Only used by `polynomial-decay`.
    pub exponent: f64,
    pub file: Option<PathBuf>,
}

impl Default for ProfileSection {
    fn default() -> Self {
        Self {
            shape: "gaussian-bump".into(),
            amplitude: 1.0,
            scale: 1.0,
            exponent: 2.0,
            file: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Axis {
    pub name: String,
    pub min: f64,
    pub max: f64,
    pub count: usize,
}

impl Default for Axis {
    fn default() -> Self {
        Self {
            name: "p0".into(),
            min: 0.0,
            max: 1.0,
            count: 1,
        }
    }
}

impl Axis {
    pub fn values(&self) -> Vec<f64> {
        if self.count == 1 {
            return vec![self.min];
        }
        (0..self.count)
            .map(|i| self.min + (self.max - self.min) * i as f64 / (self.count - 1) as f64)
            .collect()
    }
}

/// Two-axis grid; rows follow `rows`, columns follow `cols`.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SweepSection {
    pub rows: Axis,
    pub cols: Axis,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CurvesSection {
    /// Right end of the envelope axis for alignment curves.
    pub x_max: f64,
    pub samples: usize,
    /// Range of `v0 = 1/rho0` for the explicit Euler-Poisson bound.
    pub v0_min: f64,
    pub v0_max: f64,
    /// `(q0, s0)` driving the explicit Euler-Poisson bound.
    pub q0: f64,
    pub s0: f64,
}

impl Default for CurvesSection {
    fn default() -> Self {
        Self {
            x_max: 0.5,
            samples: 101,
            v0_min: 0.1,
            v0_max: 2.0,
            q0: 1.0,
            s0: 0.1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SimulateSection {
    pub paths: usize,
    pub t_end: f64,
    pub snapshots: usize,
    pub radius: Option<f64>,
    pub max_dt: Option<f64>,
    pub angular_nodes: usize,
    pub angular_levels: u32,
}

impl Default for SimulateSection {
    fn default() -> Self {
        let d = PdeConfig::default();
        Self {
            paths: d.paths,
            t_end: d.t_end,
            snapshots: d.snapshots,
            radius: d.radius,
            max_dt: d.max_dt,
            angular_nodes: d.angular_nodes,
            angular_levels: d.angular_levels,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PortraitSection {
    /// Seeds as `[q0, s0]` pairs.
    pub seeds: Vec<[f64; 2]>,
    /// Integrate the rescaled system in logarithmic time instead.
    pub rescaled: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub model: ModelSection,
    #[serde(default)]
    pub integrator: IntegratorSection,
    pub state: Option<StateSection>,
    pub alignment: Option<AlignmentSection>,
    pub influence: Option<InfluenceSection>,
    pub density: Option<ProfileSection>,
    pub velocity: Option<ProfileSection>,
    pub sweep: Option<SweepSection>,
    #[serde(default)]
    pub curves: CurvesSection,
    #[serde(default)]
    pub simulate: SimulateSection,
    pub portrait: Option<PortraitSection>,
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<Self> {
        Ok(toml::from_str(text)?)
    }

    #[cfg(test)]
    pub fn to_toml(&self) -> Result<String> {
        Ok(toml::to_string(self)?)
    }

    pub fn params(&self) -> Result<ModelParams> {
        let m = &self.model;
        let params = match m.kind {
            ModelName::EulerPoisson => ModelParams::euler_poisson(m.n, m.kappa, m.c),
            ModelName::DampedBurgers => ModelParams::damped_burgers(m.n, m.kappa),
            ModelName::InviscidBurgers => ModelParams::new(m.n, m.kappa, m.c, ModelKind::InviscidBurgers),
            ModelName::EulerAlignment => ModelParams::new(m.n, m.kappa, m.c, ModelKind::EulerAlignment),
        }?;
        Ok(params)
    }

    pub fn integrator(&self) -> Result<IntegratorConfig> {
        let i = &self.integrator;
        let cfg = IntegratorConfig {
            rel_tol: i.rel_tol,
            abs_tol: i.abs_tol,
            h_init: i.h_init,
            h_min: i.h_min,
            h_max: i.h_max,
            t_max: i.t_max,
            magnitude_cap: i.magnitude_cap,
            max_steps: i.max_steps,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn state(&self) -> Result<CharState> {
        let s = self.state.as_ref().ok_or_else(|| anyhow!("missing [state] table"))?;
        Ok(CharState::new(s.p0, s.q0, s.s0, s.rho0))
    }

    pub fn alignment(&self) -> Result<&AlignmentSection> {
        self.alignment.as_ref().ok_or_else(|| anyhow!("missing [alignment] table"))
    }

    pub fn influence(&self) -> Result<InfluenceSpec> {
        let s = self.influence.as_ref().ok_or_else(|| anyhow!("missing [influence] table"))?;
        let kind = match s.kind {
            InfluenceName::Constant => InfluenceKind::Constant { value: s.param },
            InfluenceName::Algebraic => InfluenceKind::Algebraic { beta: s.param },
            InfluenceName::CuckerSmale => InfluenceKind::CuckerSmale { beta: s.param },
            InfluenceName::Exponential => InfluenceKind::Exponential { rate: s.param },
        };
        Ok(InfluenceSpec::new(kind, s.scale)?)
    }

    /// Integer dimension required by the alignment and PDE solvers.
    pub fn dimension(&self) -> Result<usize> {
        Ok(self.params()?.integer_dimension()?)
    }

    pub fn density(&self, base: &Path) -> Result<Box<dyn RadialField + Send + Sync>> {
        let s = self.density.as_ref().ok_or_else(|| anyhow!("missing [density] table"))?;
        load_profile(s, ProfileKind::Density, base)
    }

    pub fn velocity(&self, base: &Path) -> Result<Box<dyn RadialField + Send + Sync>> {
        let s = self.velocity.as_ref().ok_or_else(|| anyhow!("missing [velocity] table"))?;
        load_profile(s, ProfileKind::Velocity, base)
    }

    /// Alignment bounds, explicit when `psi_min` and `psi_max` are given.
    pub fn bounds(&self, base: &Path) -> Result<AlignmentBounds> {
        let a = self.alignment()?;
        let c0 = a.c0.unwrap_or(0.0);
        match (a.psi_min, a.psi_max) {
            (Some(lo), Some(hi)) => Ok(AlignmentBounds::from_psi(lo, hi, c0)?),
            (None, None) => {
                let d = a
                    .flock_radius
                    .ok_or_else(|| anyhow!("[alignment] needs psi_min/psi_max or flock_radius"))?;
                let rho = self.density(base)?;
                let u = self.velocity(base)?;
                let b = compute_bounds(rho.as_ref(), u.as_ref(), &self.influence()?, d, self.dimension()?)?;
                Ok(match a.c0 {
                    Some(c0) => b.with_c0(c0),
                    None => b,
                })
            }
            _ => bail!("[alignment] needs both psi_min and psi_max"),
        }
    }

    pub fn comparison_kind(&self) -> Result<ComparisonKind> {
        Ok(match self.alignment()?.quantity {
            Quantity::Q => ComparisonKind::Q,
            Quantity::G => ComparisonKind::G,
        })
    }

    pub fn pde(&self) -> Result<PdeConfig> {
        let s = &self.simulate;
        let cfg = PdeConfig {
            paths: s.paths,
            t_end: s.t_end,
            snapshots: s.snapshots,
            radius: s.radius,
            integrator: self.integrator()?,
            max_dt: s.max_dt,
            angular_nodes: s.angular_nodes,
            angular_levels: s.angular_levels,
        };
        cfg.validate()?;
        Ok(cfg)
    }
}

fn load_profile(s: &ProfileSection, kind: ProfileKind, base: &Path) -> Result<Box<dyn RadialField + Send + Sync>> {
    if let Some(file) = &s.file {
        let path = if file.is_absolute() { file.clone() } else { base.join(file) };
        let (nodes, values) = read_profile_csv(&path)?;
        return Ok(Box::new(RadialProfile::new(nodes, values, kind)?));
    }
    let shape = Shape::from_name(&s.shape, s.amplitude, s.scale, s.exponent)?;
    Ok(match kind {
        ProfileKind::Velocity => Box::new(RadialVelocity::new(shape)),
        _ => Box::new(shape),
    })
}

/// Read `r,value` rows, skipping `#` comments and a non-numeric header.
fn read_profile_csv(path: &Path) -> Result<(Vec<f64>, Vec<f64>)> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .from_path(path)
        .with_context(|| format!("cannot open profile {}", path.display()))?;
    let (mut nodes, mut values) = (Vec::new(), Vec::new());
    for (k, row) in reader.records().enumerate() {
        let row = row?;
        if row.len() != 2 {
            bail!("{}: row {} needs two columns", path.display(), k + 1);
        }
        match (row[0].parse::<f64>(), row[1].parse::<f64>()) {
            (Ok(r), Ok(v)) => {
                nodes.push(r);
                values.push(v);
            }
            _ if k == 0 => continue,
            _ => bail!("{}: row {} is not numeric", path.display(), k + 1),
        }
    }
    Ok((nodes, values))
}
