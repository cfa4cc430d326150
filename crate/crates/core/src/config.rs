//! Manipulator geometry, component stiffness coefficients and per-limb frames.
//!
//! Configuration files are TOML. Keys carry SI units (metres, N/m, N·m/rad);
//! any angle-bearing key may instead be given with a `_deg` suffix, in which
//! case angles are read in degrees and torsional coefficients in N·m/deg.
//! Serialisation always writes the SI keys so a reload is bit-exact.

use std::f64::consts::{FRAC_PI_2, PI};

use nalgebra::Vector3;
use serde::{Deserialize, Serialize};
use toml::{Table, Value};

use crate::error::ConfigError;
use crate::rotation::{rot_z, OrientationChart};

/// Nominal stiffness and geometry of the Sprint Z3 head. Torsional values are tabulated in N·m/deg.
pub mod defaults {
    pub const R_BASE: f64 = 0.326923;
    pub const R_PLATFORM: f64 = 0.250;
    pub const LINK_LENGTH: f64 = 0.400;
    pub const TILT_LIMIT_DEG: f64 = 40.0;
    pub const HEAVE: f64 = 0.39;
    pub const K_CARRIAGE: f64 = 3.8e7;
    pub const K_REVOLUTE: f64 = 3.2e9;
    pub const K_LIMB_BODY: f64 = 976e6;
    pub const K_SPHERICAL_DEG: f64 = 8.9e5;
    pub const K_LIMB_BODY_T_DEG: f64 = 7.8e5;
}

/// N·m/deg → N·m/rad.
pub const PER_DEG_TO_PER_RAD: f64 = 180.0 / PI;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AxialStiffness {
    pub k_carriage: f64,
    pub k_revolute: f64,
    pub k_limb_body: f64,
}

/// Torsional chain coefficients, N·m/rad.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TorsionalStiffness {
    pub k_spherical: f64,
    pub k_limb_body_t: f64,
}

/// Diagonal of the spherical-joint stiffness in its own frame, N·m/rad.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SphericalAxes {
    pub k_six: f64,
    pub k_siy: f64,
    pub k_siz: f64,
}

impl SphericalAxes {
    pub fn isotropic(k: f64) -> Self {
        Self {
            k_six: k,
            k_siy: k,
            k_siz: k,
        }
    }

    pub fn diagonal(&self) -> Vector3<f64> {
        Vector3::new(self.k_six, self.k_siy, self.k_siz)
    }
}

/// Length-dependent carriage model: the lead screw stretches with `d_i`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ParametricCompliance {
    /// Lead screw axial rigidity EA, N.
    pub ea_leadscrew: f64,
    /// Fixed-length link axial rigidity EA, N.
    pub ea_link: f64,
    pub k_guiderail: f64,
    pub k_slider: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub enum ComplianceModel {
    #[default]
    Lumped,
    Parametric(ParametricCompliance),
}

impl ComplianceModel {
    pub fn name(&self) -> &'static str {
        match self {
            Self::Lumped => "lumped",
            Self::Parametric(_) => "parametric",
        }
    }
}

/// Which root of the limb-length equation places the revolute joint.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum AssemblyMode {
    /// Revolute joint below the spherical joint (minus root).
    #[default]
    ElbowBelow,
    ElbowAbove,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ManipulatorConfig {
    pub r_base: f64,
    pub r_platform: f64,
    pub link_length: f64,
    pub limb_count: usize,
    /// Workspace bound on both tilt coordinates, radians.
    pub tilt_limit: f64,
    /// Default heave used by sweeps, metres.
    pub heave: f64,
    pub axial: AxialStiffness,
    pub torsional: TorsionalStiffness,
    pub spherical_axes: SphericalAxes,
    pub compliance_model: ComplianceModel,
    pub assembly_mode: AssemblyMode,
    pub orientation_chart: OrientationChart,
    /// When set, angular rows/columns of K are divided by this length so all
    /// blocks share N/m units.
    pub stiffness_length_scale: Option<f64>,
}

impl Default for ManipulatorConfig {
    fn default() -> Self {
        use defaults::*;
        let k_spherical = K_SPHERICAL_DEG * PER_DEG_TO_PER_RAD;
        Self {
            r_base: R_BASE,
            r_platform: R_PLATFORM,
            link_length: LINK_LENGTH,
            limb_count: 3,
            tilt_limit: TILT_LIMIT_DEG.to_radians(),
            heave: HEAVE,
            axial: AxialStiffness {
                k_carriage: K_CARRIAGE,
                k_revolute: K_REVOLUTE,
                k_limb_body: K_LIMB_BODY,
            },
            torsional: TorsionalStiffness {
                k_spherical,
                k_limb_body_t: K_LIMB_BODY_T_DEG * PER_DEG_TO_PER_RAD,
            },
            spherical_axes: SphericalAxes::isotropic(k_spherical),
            compliance_model: ComplianceModel::Lumped,
            assembly_mode: AssemblyMode::ElbowBelow,
            orientation_chart: OrientationChart::TiltAxis,
            stiffness_length_scale: None,
        }
    }
}

/// Geometry of limb `index` (1-based) in the base frame.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LimbFrame {
    pub index: usize,
    pub xi: f64,
    /// Base attachment on the base circle.
    pub b: Vector3<f64>,
    /// Spherical-joint centre in platform coordinates.
    pub a_home: Vector3<f64>,
    /// Prismatic axis.
    pub s1: Vector3<f64>,
    /// Revolute axis, tangent to the base circle.
    pub s2: Vector3<f64>,
    /// Unit radial direction `(cos ξ, sin ξ, 0)`.
    pub radial: Vector3<f64>,
}

impl ManipulatorConfig {
    pub fn validate(&self) -> Result<(), ConfigError> {
        positive_finite("r_base", self.r_base)?;
        positive_finite("r_platform", self.r_platform)?;
        positive_finite("link_length", self.link_length)?;
        if self.limb_count != 3 {
            return Err(ConfigError::parameter(
                "limb_count",
                format!("must be 3, got {}", self.limb_count),
            ));
        }
        if !(self.tilt_limit > 0.0 && self.tilt_limit < FRAC_PI_2) {
            return Err(ConfigError::parameter(
                "tilt_limit",
                format!("must lie in (0, π/2) rad, got {}", self.tilt_limit),
            ));
        }
        if !self.heave.is_finite() {
            return Err(ConfigError::parameter("heave", "must be finite"));
        }
        positive_finite("axial.k_carriage", self.axial.k_carriage)?;
        positive_finite("axial.k_revolute", self.axial.k_revolute)?;
        positive_finite("axial.k_limb_body", self.axial.k_limb_body)?;
        positive_finite("torsional.k_spherical", self.torsional.k_spherical)?;
        positive_finite("torsional.k_limb_body_t", self.torsional.k_limb_body_t)?;
        positive_finite("spherical_axes.k_six", self.spherical_axes.k_six)?;
        positive_finite("spherical_axes.k_siy", self.spherical_axes.k_siy)?;
        positive_finite("spherical_axes.k_siz", self.spherical_axes.k_siz)?;
        if let ComplianceModel::Parametric(p) = &self.compliance_model {
            positive_finite("parametric.ea_leadscrew", p.ea_leadscrew)?;
            positive_finite("parametric.ea_link", p.ea_link)?;
            positive_finite("parametric.k_guiderail", p.k_guiderail)?;
            positive_finite("parametric.k_slider", p.k_slider)?;
        }
        if let Some(lc) = self.stiffness_length_scale {
            positive_finite("stiffness_length_scale", lc)?;
        }
        let gap = (self.r_base - self.r_platform).abs();
        if self.link_length <= gap {
            return Err(ConfigError::Geometry(format!(
                "link_length {} m must exceed |r_base - r_platform| = {} m",
                self.link_length, gap
            )));
        }
        Ok(())
    }

    /// Frames at ξ = 0°, 120°, 240°.
    pub fn limb_frames(&self) -> [LimbFrame; 3] {
        std::array::from_fn(|i| {
            let xi = i as f64 * 2.0 * PI / 3.0;
            let radial = Vector3::new(xi.cos(), xi.sin(), 0.0);
            LimbFrame {
                index: i + 1,
                xi,
                b: radial * self.r_base,
                a_home: radial * self.r_platform,
                s1: Vector3::z(),
                s2: rot_z(xi) * Vector3::y(),
                radial,
            }
        })
    }

    /// Parses and validates a TOML document; missing keys take default values.
    pub fn from_toml_str(text: &str) -> Result<Self, ConfigError> {
        let table: Table = text
            .parse()
            .map_err(|e: toml::de::Error| ConfigError::Parse(e.to_string()))?;
        Self::from_table(&table)
    }

    /// Builds a configuration from an optional document plus `key=value`
    /// overrides. Dotted keys address sections (`axial.k_carriage=4e7`).
    pub fn load(text: Option<&str>, overrides: &[(String, String)]) -> Result<Self, ConfigError> {
        let mut table: Table = match text {
            Some(t) => t
                .parse()
                .map_err(|e: toml::de::Error| ConfigError::Parse(e.to_string()))?,
            None => Table::new(),
        };
        for (key, value) in overrides {
            set_dotted(&mut table, key, parse_override_value(value))?;
        }
        Self::from_table(&table)
    }

    pub fn from_table(table: &Table) -> Result<Self, ConfigError> {
        let raw: RawConfig = Value::Table(table.clone())
            .try_into()
            .map_err(|e: toml::de::Error| ConfigError::Parse(e.to_string()))?;
        let config = raw.resolve()?;
        config.validate()?;
        Ok(config)
    }

    /// TOML document with SI keys only.
    pub fn to_toml_string(&self) -> String {
        toml::to_string(&self.to_table()).expect("config tables always serialise")
    }

    pub fn to_table(&self) -> Table {
        let mut t = Table::new();
        t.insert("r_base".into(), self.r_base.into());
        t.insert("r_platform".into(), self.r_platform.into());
        t.insert("link_length".into(), self.link_length.into());
        t.insert("limb_count".into(), (self.limb_count as i64).into());
        t.insert("tilt_limit".into(), self.tilt_limit.into());
        t.insert("heave".into(), self.heave.into());
        t.insert(
            "compliance_model".into(),
            self.compliance_model.name().into(),
        );
        t.insert(
            "assembly_mode".into(),
            Value::try_from(self.assembly_mode).expect("enum serialises"),
        );
        t.insert(
            "orientation_chart".into(),
            Value::try_from(self.orientation_chart).expect("enum serialises"),
        );
        if let Some(lc) = self.stiffness_length_scale {
            t.insert("stiffness_length_scale".into(), lc.into());
        }
        t.insert(
            "axial".into(),
            Value::try_from(self.axial).expect("plain struct serialises"),
        );
        t.insert(
            "torsional".into(),
            Value::try_from(self.torsional).expect("plain struct serialises"),
        );
        t.insert(
            "spherical_axes".into(),
            Value::try_from(self.spherical_axes).expect("plain struct serialises"),
        );
        if let ComplianceModel::Parametric(p) = &self.compliance_model {
            t.insert(
                "parametric".into(),
                Value::try_from(*p).expect("plain struct serialises"),
            );
        }
        t
    }
}

/// Validated default configuration.
pub fn load_config(text: &str) -> Result<ManipulatorConfig, ConfigError> {
    ManipulatorConfig::from_toml_str(text)
}

/// Free-function form of [`ManipulatorConfig::limb_frames`].
pub fn limb_frames(config: &ManipulatorConfig) -> [LimbFrame; 3] {
    config.limb_frames()
}

fn positive_finite(key: &str, value: f64) -> Result<(), ConfigError> {
    if value.is_finite() && value > 0.0 {
        Ok(())
    } else {
        Err(ConfigError::parameter(
            key,
            format!("must be strictly positive and finite, got {value}"),
        ))
    }
}

fn parse_override_value(raw: &str) -> Value {
    let doc = format!("v = {raw}");
    match doc.parse::<Table>() {
        Ok(mut t) => t.remove("v").unwrap_or_else(|| Value::String(raw.into())),
        Err(_) => Value::String(raw.to_string()),
    }
}

fn set_dotted(table: &mut Table, key: &str, value: Value) -> Result<(), ConfigError> {
    let mut parts: Vec<&str> = key.split('.').collect();
    let last = parts
        .pop()
        .filter(|s| !s.is_empty())
        .ok_or_else(|| ConfigError::parameter(key, "empty override key"))?;
    let mut cursor = table;
    for part in parts {
        let entry = cursor
            .entry(part.to_string())
            .or_insert_with(|| Value::Table(Table::new()));
        cursor = entry
            .as_table_mut()
            .ok_or_else(|| ConfigError::parameter(key, format!("`{part}` is not a section")))?;
    }
    cursor.insert(last.to_string(), value);
    Ok(())
}

/// Picks exactly one of `key` (SI) or `key_deg` (scaled by `deg_factor`).
fn pick(
    key: &str,
    si: Option<f64>,
    deg: Option<f64>,
    deg_factor: f64,
) -> Result<Option<f64>, ConfigError> {
    match (si, deg) {
        (Some(_), Some(_)) => Err(ConfigError::parameter(
            key,
            format!("give either `{key}` or `{key}_deg`, not both"),
        )),
        (Some(v), None) => Ok(Some(v)),
        (None, Some(v)) => Ok(Some(v * deg_factor)),
        (None, None) => Ok(None),
    }
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    r_base: Option<f64>,
    r_platform: Option<f64>,
    link_length: Option<f64>,
    limb_count: Option<i64>,
    tilt_limit: Option<f64>,
    tilt_limit_deg: Option<f64>,
    heave: Option<f64>,
    compliance_model: Option<String>,
    assembly_mode: Option<AssemblyMode>,
    orientation_chart: Option<OrientationChart>,
    stiffness_length_scale: Option<f64>,
    #[serde(default)]
    axial: RawAxial,
    #[serde(default)]
    torsional: RawTorsional,
    #[serde(default)]
    spherical_axes: RawSphericalAxes,
    parametric: Option<RawParametric>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawAxial {
    k_carriage: Option<f64>,
    k_revolute: Option<f64>,
    k_limb_body: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawTorsional {
    k_spherical: Option<f64>,
    k_spherical_deg: Option<f64>,
    k_limb_body_t: Option<f64>,
    k_limb_body_t_deg: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSphericalAxes {
    k_six: Option<f64>,
    k_six_deg: Option<f64>,
    k_siy: Option<f64>,
    k_siy_deg: Option<f64>,
    k_siz: Option<f64>,
    k_siz_deg: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawParametric {
    ea_leadscrew: Option<f64>,
    ea_link: Option<f64>,
    k_guiderail: Option<f64>,
    k_slider: Option<f64>,
}

impl RawConfig {
    fn resolve(self) -> Result<ManipulatorConfig, ConfigError> {
        let d = ManipulatorConfig::default();
        let deg = PI / 180.0;
        let tilt_limit =
            pick("tilt_limit", self.tilt_limit, self.tilt_limit_deg, deg)?.unwrap_or(d.tilt_limit);
        let limb_count = match self.limb_count {
            None => 3,
            Some(n) if n >= 0 => n as usize,
            Some(n) => {
                return Err(ConfigError::parameter(
                    "limb_count",
                    format!("must be 3, got {n}"),
                ))
            }
        };
        let t = &self.torsional;
        let k_spherical = pick(
            "torsional.k_spherical",
            t.k_spherical,
            t.k_spherical_deg,
            PER_DEG_TO_PER_RAD,
        )?
        .unwrap_or(d.torsional.k_spherical);
        let k_limb_body_t = pick(
            "torsional.k_limb_body_t",
            t.k_limb_body_t,
            t.k_limb_body_t_deg,
            PER_DEG_TO_PER_RAD,
        )?
        .unwrap_or(d.torsional.k_limb_body_t);
        let s = &self.spherical_axes;
        let axis = |key: &str, si, dg| -> Result<f64, ConfigError> {
            Ok(pick(key, si, dg, PER_DEG_TO_PER_RAD)?.unwrap_or(k_spherical))
        };
        let spherical_axes = SphericalAxes {
            k_six: axis("spherical_axes.k_six", s.k_six, s.k_six_deg)?,
            k_siy: axis("spherical_axes.k_siy", s.k_siy, s.k_siy_deg)?,
            k_siz: axis("spherical_axes.k_siz", s.k_siz, s.k_siz_deg)?,
        };
        let compliance_model = match self.compliance_model.as_deref().unwrap_or("lumped") {
            "lumped" => ComplianceModel::Lumped,
            "parametric" => {
                let p = self.parametric.ok_or_else(|| {
                    ConfigError::parameter(
                        "parametric",
                        "section required when compliance_model = \"parametric\"",
                    )
                })?;
                let need = |key: &str, v: Option<f64>| {
                    v.ok_or_else(|| ConfigError::parameter(key, "missing"))
                };
                ComplianceModel::Parametric(ParametricCompliance {
                    ea_leadscrew: need("parametric.ea_leadscrew", p.ea_leadscrew)?,
                    ea_link: need("parametric.ea_link", p.ea_link)?,
                    k_guiderail: need("parametric.k_guiderail", p.k_guiderail)?,
                    k_slider: need("parametric.k_slider", p.k_slider)?,
                })
            }
            other => {
                return Err(ConfigError::parameter(
                    "compliance_model",
                    format!("expected \"lumped\" or \"parametric\", got \"{other}\""),
                ))
            }
        };
        Ok(ManipulatorConfig {
            r_base: self.r_base.unwrap_or(d.r_base),
            r_platform: self.r_platform.unwrap_or(d.r_platform),
            link_length: self.link_length.unwrap_or(d.link_length),
            limb_count,
            tilt_limit,
            heave: self.heave.unwrap_or(d.heave),
            axial: AxialStiffness {
                k_carriage: self.axial.k_carriage.unwrap_or(d.axial.k_carriage),
                k_revolute: self.axial.k_revolute.unwrap_or(d.axial.k_revolute),
                k_limb_body: self.axial.k_limb_body.unwrap_or(d.axial.k_limb_body),
            },
            torsional: TorsionalStiffness {
                k_spherical,
                k_limb_body_t,
            },
            spherical_axes,
            compliance_model,
            assembly_mode: self.assembly_mode.unwrap_or_default(),
            orientation_chart: self.orientation_chart.unwrap_or_default(),
            stiffness_length_scale: self.stiffness_length_scale,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    #[test]
    fn defaults_match_tables() {
        let c = load_config("").unwrap();
        assert_eq!(c.r_base, 0.326923);
        assert_eq!(c.r_platform, 0.250);
        assert_relative_eq!(c.tilt_limit, 40f64.to_radians());
        assert_eq!(c.axial.k_carriage, 3.8e7);
        assert_eq!(c.limb_count, 3);
        assert_eq!(
            c.spherical_axes,
            SphericalAxes::isotropic(c.torsional.k_spherical)
        );
    }

    #[test]
    fn torsional_input_per_degree_is_converted() {
        let c = load_config("[torsional]\nk_spherical_deg = 8.9e5\n").unwrap();
        // 8.9e5 · 180/π
        assert_relative_eq!(
            c.torsional.k_spherical,
            5.099_324_376e7,
            max_relative = 1e-9
        );
        assert_relative_eq!(c.torsional.k_spherical, 5.099e7, max_relative = 1e-3);
    }

    #[test]
    fn degree_and_radian_keys_conflict() {
        let err = load_config("tilt_limit = 0.5\ntilt_limit_deg = 30\n").unwrap_err();
        assert!(matches!(err, ConfigError::Parameter { ref key, .. } if key == "tilt_limit"));
    }

    #[test]
    fn negative_parameter_names_key() {
        let err = load_config("[axial]\nk_revolute = -1.0\n").unwrap_err();
        match err {
            ConfigError::Parameter { key, .. } => assert_eq!(key, "axial.k_revolute"),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn short_link_is_geometry_error() {
        let err = load_config("link_length = 0.05\n").unwrap_err();
        assert!(matches!(err, ConfigError::Geometry(_)));
    }

    #[test]
    fn tilt_limit_range() {
        assert!(load_config("tilt_limit_deg = 90\n").is_err());
        assert!(load_config("tilt_limit_deg = 0\n").is_err());
        assert!(load_config("tilt_limit_deg = 89\n").is_ok());
    }

    #[test]
    fn unknown_key_is_rejected() {
        assert!(matches!(
            load_config("r_bse = 1.0\n"),
            Err(ConfigError::Parse(_))
        ));
    }

    #[test]
    fn parametric_requires_section() {
        let err = load_config("compliance_model = \"parametric\"\n").unwrap_err();
        assert!(matches!(err, ConfigError::Parameter { ref key, .. } if key == "parametric"));
        let ok = load_config(
            "compliance_model = \"parametric\"\n[parametric]\nea_leadscrew = 1e8\nea_link = 2e8\nk_guiderail = 5e8\nk_slider = 6e8\n",
        )
        .unwrap();
        assert_eq!(ok.compliance_model.name(), "parametric");
    }

    #[test]
    fn overrides_address_sections() {
        let c = ManipulatorConfig::load(
            Some("r_base = 0.3\n"),
            &[
                ("axial.k_carriage".into(), "4e7".into()),
                ("orientation_chart".into(), "euler-xyz".into()),
                ("link_length".into(), "0.45".into()),
            ],
        )
        .unwrap();
        assert_eq!(c.r_base, 0.3);
        assert_eq!(c.axial.k_carriage, 4e7);
        assert_eq!(c.link_length, 0.45);
        assert_eq!(c.orientation_chart, OrientationChart::EulerXyz);
    }

    #[test]
    fn limb_frame_values() {
        let c = ManipulatorConfig::default();
        let f = c.limb_frames();
        assert_eq!(f[0].s2, Vector3::new(0.0, 1.0, 0.0));
        assert_eq!(f[0].b, Vector3::new(0.326923, 0.0, 0.0));
        let half_root3 = 3f64.sqrt() / 2.0;
        assert_relative_eq!(
            f[1].s2,
            Vector3::new(-half_root3, -0.5, 0.0),
            epsilon = 1e-15
        );
        assert_relative_eq!(f[2].xi, 4.0 * PI / 3.0);
        let sum_b: Vector3<f64> = f.iter().map(|l| l.b).sum();
        let sum_a: Vector3<f64> = f.iter().map(|l| l.a_home).sum();
        assert!(sum_b.norm() < 1e-15 && sum_a.norm() < 1e-15);
        for l in &f {
            assert!(l.s2.dot(&l.b).abs() < 1e-16);
            assert_relative_eq!(l.s1.norm(), 1.0);
            assert_relative_eq!(l.s2.norm(), 1.0, epsilon = 1e-16);
            assert_eq!(l.s2, rot_z(l.xi) * Vector3::y());
        }
    }

    proptest! {
        #[test]
        fn serialise_reload_is_bit_exact(
            r_base in 0.1f64..1.0,
            r_platform in 0.1f64..1.0,
            extra in 0.01f64..1.0,
            tilt in 0.01f64..1.5,
            kc in 1e3f64..1e12,
            ks in 1e3f64..1e12,
            kx in 1e3f64..1e12,
        ) {
            let mut c = ManipulatorConfig {
                r_base,
                r_platform,
                link_length: (r_base - r_platform).abs() + extra,
                tilt_limit: tilt,
                ..ManipulatorConfig::default()
            };
            c.axial.k_carriage = kc;
            c.torsional.k_spherical = ks;
            c.spherical_axes.k_six = kx;
            c.stiffness_length_scale = Some(extra);
            let text = c.to_toml_string();
            let back = load_config(&text).unwrap();
            prop_assert_eq!(back, c);
        }
    }
}
