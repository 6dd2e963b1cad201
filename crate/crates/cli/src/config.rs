//! Scenario files: UTF-8 JSON, one fixed schema version, unknown keys rejected.

use serde::Deserialize;

pub const SCHEMA_VERSION: u32 = 1;

pub type V3 = [f64; 3];
pub type M3 = [[f64; 3]; 3];

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Integrator {
    pub h: f64,
    pub steps: usize,
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Output {
    /// Write every n-th sample; the final sample is always written.
    #[serde(default = "one")]
    pub every: usize,
}

fn one() -> usize {
    1
}

impl Default for Output {
    fn default() -> Self {
        Self { every: 1 }
    }
}

/// Piecewise-linear table, clamped outside its range.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Table {
    pub t: Vec<f64>,
    pub values: Vec<Vec<f64>>,
}

impl Table {
    pub fn validate(&self, width: usize, key: &str) -> Result<(), String> {
        if self.t.is_empty() || self.t.len() != self.values.len() {
            return Err(format!("`{key}`: table needs matching non-empty `t` and `values`"));
        }
        if self.t.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(format!("`{key}.t` must be strictly increasing"));
        }
        if let Some(row) = self.values.iter().find(|r| r.len() != width) {
            return Err(format!("`{key}.values` rows must have {width} entries, found {}", row.len()));
        }
        Ok(())
    }

    pub fn at(&self, t: f64) -> Vec<f64> {
        let n = self.t.len();
        if t <= self.t[0] {
            return self.values[0].clone();
        }
        if t >= self.t[n - 1] {
            return self.values[n - 1].clone();
        }
        let i = self.t.partition_point(|&s| s <= t) - 1;
        let s = (t - self.t[i]) / (self.t[i + 1] - self.t[i]);
        self.values[i].iter().zip(&self.values[i + 1]).map(|(a, b)| a + s * (b - a)).collect()
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PointConfig {
    pub x: V3,
    pub m: f64,
    #[serde(default)]
    pub nu: f64,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MassProperties {
    pub mass: f64,
    #[serde(default)]
    pub com: V3,
    /// Rotational inertia about the centre of mass, body axes.
    pub inertia: M3,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "snake_case")]
pub enum BodyConfig {
    Points(Vec<PointConfig>),
    MassProperties(MassProperties),
}

/// Wrench on a rigid body, in body coordinates `(force; torque)`.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, tag = "type", rename_all = "snake_case")]
pub enum WrenchConfig {
    None,
    Constant { value: [f64; 6] },
    /// Uniform field, acceleration given in frame 0.
    Gravity { g: V3 },
    Table(Table),
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RigidInitial {
    /// Attitude as a rotation vector (axis times angle).
    #[serde(default)]
    pub rotation_vector: V3,
    #[serde(default)]
    pub position: V3,
    /// Body-frame linear velocity.
    #[serde(default)]
    pub velocity: V3,
    /// Body-frame angular velocity.
    #[serde(default)]
    pub angular_velocity: V3,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RigidScenario {
    pub schema_version: u32,
    #[serde(default)]
    pub kind: Option<String>,
    pub body: BodyConfig,
    pub initial: RigidInitial,
    #[serde(default = "no_wrench")]
    pub wrench: WrenchConfig,
    pub integrator: Integrator,
    #[serde(default)]
    pub output: Output,
}

fn no_wrench() -> WrenchConfig {
    WrenchConfig::None
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NbodyBody {
    pub x: V3,
    pub v: V3,
    pub m: f64,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NbodyScenario {
    pub schema_version: u32,
    #[serde(default)]
    pub kind: Option<String>,
    pub gamma: f64,
    #[serde(default = "default_min_distance")]
    pub min_distance: f64,
    pub bodies: Vec<NbodyBody>,
    pub integrator: Integrator,
    #[serde(default)]
    pub output: Output,
}

fn default_min_distance() -> f64 {
    1e-9
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, tag = "type", rename_all = "snake_case")]
pub enum ForceConfig {
    None,
    Constant { value: V3 },
    /// `f = m g`.
    Gravity { g: V3 },
    Table(Table),
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, tag = "type", rename_all = "snake_case")]
pub enum MassRateConfig {
    Constant { value: f64 },
    /// `ν = −k m`.
    Exponential { k: f64 },
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, tag = "type", rename_all = "snake_case")]
pub enum GainVelocityConfig {
    Absolute { value: V3 },
    /// `u = v + value`.
    Relative { value: V3 },
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MassPointScenario {
    pub schema_version: u32,
    #[serde(default)]
    pub kind: Option<String>,
    pub mass: f64,
    #[serde(default)]
    pub m_min: f64,
    #[serde(default)]
    pub x: V3,
    #[serde(default)]
    pub v: V3,
    pub force: ForceConfig,
    pub mass_rate: MassRateConfig,
    pub gain_velocity: GainVelocityConfig,
    pub integrator: Integrator,
    #[serde(default)]
    pub output: Output,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BodyPointScenario {
    pub schema_version: u32,
    #[serde(default)]
    pub kind: Option<String>,
    pub rho: f64,
    #[serde(default)]
    pub nu: f64,
    pub a: M3,
    pub b: M3,
    #[serde(default)]
    pub v: V3,
    #[serde(default)]
    pub mu: V3,
    #[serde(default)]
    pub alpha: V3,
    #[serde(default)]
    pub beta: V3,
    pub integrator: Integrator,
    #[serde(default)]
    pub output: Output,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MultiphaseScenario {
    pub schema_version: u32,
    #[serde(default)]
    pub kind: Option<String>,
    pub rho: Vec<f64>,
    pub offsets: Vec<V3>,
    pub rates: Vec<f64>,
    pub stoichiometry: Vec<Vec<f64>>,
    #[serde(default)]
    pub div_v: f64,
    pub integrator: Integrator,
    #[serde(default)]
    pub output: Output,
}

/// Common header checks shared by every scenario kind.
pub fn check_header(version: u32, kind: Option<&str>, expected: &str, integ: &Integrator, out: &Output) -> Result<(), String> {
    if version != SCHEMA_VERSION {
        return Err(format!("`schema_version`: expected {SCHEMA_VERSION}, found {version}"));
    }
    if let Some(k) = kind {
        if k != expected {
            return Err(format!("`kind`: config is for `{k}` but `{expected}` was requested"));
        }
    }
    if !(integ.h > 0.0 && integ.h.is_finite()) {
        return Err(format!("`integrator.h` must be positive and finite, found {}", integ.h));
    }
    if out.every == 0 {
        return Err("`output.every` must be at least 1".into());
    }
    Ok(())
}
