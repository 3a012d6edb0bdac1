//! Run configuration: the raw layer shared by flags and config files, and the
//! validated per-command form.

use std::f64::consts::PI;
use std::path::{Path, PathBuf};

use clap::ValueEnum;
use ffa_core::dynamics::{default_dt, spectral_radius_bound, WavePacketSpec, STABILITY_LIMIT};
use ffa_core::resolvent::Rect;
use ffa_core::ModelParams;
use serde::{Deserialize, Serialize};

use crate::CliError;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CommandKind {
    Singularities,
    DomainScan,
    Reflectance,
    Wavepacket,
    Decay,
    Selfenergy,
    Poles,
}

impl CommandKind {
    pub fn name(self) -> &'static str {
        match self {
            CommandKind::Singularities => "singularities",
            CommandKind::DomainScan => "domain-scan",
            CommandKind::Reflectance => "reflectance",
            CommandKind::Wavepacket => "wavepacket",
            CommandKind::Decay => "decay",
            CommandKind::Selfenergy => "selfenergy",
            CommandKind::Poles => "poles",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

/// Every option the tool understands, all optional. Flags and config files
/// both produce one of these; flags win when merged.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct RawConfig {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub command: Option<CommandKind>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub kappa0: Option<f64>,
    #[serde(rename = "kappaA", skip_serializing_if = "Option::is_none")]
    pub kappa_a: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub re_ea: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub im_ea: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tol: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub re_ea_over_kappa0: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub grid: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub kappa_max: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub im_max: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub kpoints: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n0: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub delta_n: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub t_final: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dt: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub snapshots: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub normalize: Option<bool>,
    #[serde(rename = "legacyCnInit", skip_serializing_if = "Option::is_none")]
    pub legacy_cn_init: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub e_min: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub e_max: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub points: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub re_min: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub re_max: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub im_min: Option<f64>,
    #[serde(rename = "imTop", skip_serializing_if = "Option::is_none")]
    pub im_top: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub format: Option<Format>,
}

macro_rules! merge_fields {
    ($base:ident, $over:ident; $($field:ident),*) => {
        $(if $over.$field.is_some() { $base.$field = $over.$field.clone(); })*
    };
}

impl RawConfig {
    /// Fields set in `over` replace those in `self`.
    pub fn merge(mut self, over: &RawConfig) -> RawConfig {
        merge_fields!(self, over; command, kappa0, kappa_a, re_ea, im_ea, tol, re_ea_over_kappa0, grid,
            kappa_max, im_max, kpoints, k, n0, delta_n, t_final, dt, snapshots, normalize, legacy_cn_init,
            e_min, e_max, points, re_min, re_max, im_min, im_top, out, format);
        self
    }

    /// Reads a config file. A sidecar written by an earlier run is accepted as
    /// well; its `config` member is used.
    pub fn load(path: &Path) -> Result<RawConfig, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Invalid(format!("cannot read {}: {e}", path.display())))?;
        let value: serde_json::Value =
            serde_json::from_str(&text).map_err(|e| CliError::Invalid(format!("{}: {e}", path.display())))?;
        let value = match value {
            serde_json::Value::Object(mut map) if map.contains_key("schema_version") => {
                let version = map.get("schema_version").and_then(|v| v.as_u64());
                if version != Some(SCHEMA_VERSION as u64) {
                    return Err(CliError::Invalid(format!("{}: unsupported schema_version", path.display())));
                }
                map.remove("config").ok_or_else(|| CliError::Invalid(format!("{}: sidecar has no config", path.display())))?
            }
            other => other,
        };
        serde_json::from_value(value).map_err(|e| CliError::Invalid(format!("{}: {e}", path.display())))
    }

    /// Names of the options that are set, as spelled on the command line.
    fn set_options(&self) -> Vec<&'static str> {
        let mut names = Vec::new();
        let mut add = |set: bool, name: &'static str| {
            if set {
                names.push(name);
            }
        };
        add(self.kappa0.is_some(), "kappa0");
        add(self.kappa_a.is_some(), "kappaA");
        add(self.re_ea.is_some(), "reEa");
        add(self.im_ea.is_some(), "imEa");
        add(self.tol.is_some(), "tol");
        add(self.re_ea_over_kappa0.is_some(), "reEaOverKappa0");
        add(self.grid.is_some(), "grid");
        add(self.kappa_max.is_some(), "kappaMax");
        add(self.im_max.is_some(), "imMax");
        add(self.kpoints.is_some(), "kpoints");
        add(self.k.is_some(), "k");
        add(self.n0.is_some(), "n0");
        add(self.delta_n.is_some(), "deltaN");
        add(self.t_final.is_some(), "tFinal");
        add(self.dt.is_some(), "dt");
        add(self.snapshots.is_some(), "snapshots");
        add(self.normalize.is_some(), "normalize");
        add(self.legacy_cn_init.is_some(), "legacy-cn-init");
        add(self.e_min.is_some(), "eMin");
        add(self.e_max.is_some(), "eMax");
        add(self.points.is_some(), "points");
        add(self.re_min.is_some(), "reMin");
        add(self.re_max.is_some(), "reMax");
        add(self.im_min.is_some(), "imMin");
        add(self.im_top.is_some(), "imTop");
        names
    }
}

const PARAM_OPTIONS: [&str; 4] = ["kappa0", "kappaA", "reEa", "imEa"];

fn allowed_options(command: CommandKind) -> Vec<&'static str> {
    let extra: &[&str] = match command {
        CommandKind::Singularities => &["tol"],
        CommandKind::DomainScan => return vec!["reEaOverKappa0", "grid", "kappaMax", "imMax"],
        CommandKind::Reflectance => &["kpoints"],
        CommandKind::Wavepacket => &["k", "n0", "deltaN", "tFinal", "dt", "snapshots", "normalize"],
        CommandKind::Decay => &["tFinal", "dt", "legacy-cn-init"],
        CommandKind::Selfenergy => &["eMin", "eMax", "points"],
        CommandKind::Poles => &["reMin", "reMax", "imMin", "imTop"],
    };
    PARAM_OPTIONS.iter().chain(extra).copied().collect()
}

/// Validated options of one command.
#[derive(Debug, Clone, PartialEq)]
pub enum CommandOptions {
    Singularities { tol: f64 },
    DomainScan { re_ea_over_kappa0: f64, im_points: usize, kappa_points: usize, kappa_max: f64, im_max: f64 },
    Reflectance { kpoints: usize },
    Wavepacket { spec: WavePacketSpec, t_final: f64, dt: f64, snapshots: usize },
    Decay { t_final: f64, dt: f64, legacy_cn_init: bool },
    Selfenergy { e_min: f64, e_max: f64, points: usize },
    Poles { region: Rect },
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub command: CommandKind,
    pub params: ModelParams,
    pub options: CommandOptions,
    pub out: Option<PathBuf>,
    pub format: Format,
}

fn invalid(message: impl Into<String>) -> CliError {
    CliError::Invalid(message.into())
}

fn finite(value: f64, name: &str) -> Result<f64, CliError> {
    if value.is_finite() {
        Ok(value)
    } else {
        Err(invalid(format!("--{name} must be finite")))
    }
}

fn positive(value: f64, name: &str) -> Result<f64, CliError> {
    if value > 0.0 && value.is_finite() {
        Ok(value)
    } else {
        Err(invalid(format!("--{name} must be positive and finite")))
    }
}

/// Parses `<im points>x<kappa points>`.
pub fn parse_grid(text: &str) -> Result<(usize, usize), CliError> {
    let err = || invalid(format!("--grid expects <imPoints>x<kappaPoints>, got {text:?}"));
    let (a, b) = text.split_once(['x', 'X']).ok_or_else(err)?;
    let a: usize = a.trim().parse().map_err(|_| err())?;
    let b: usize = b.trim().parse().map_err(|_| err())?;
    if a < 2 || b < 2 {
        return Err(invalid("--grid needs at least 2 points per axis"));
    }
    Ok((a, b))
}

fn check_dt(params: &ModelParams, dt: f64) -> Result<f64, CliError> {
    let dt = positive(dt, "dt")?;
    let limit = STABILITY_LIMIT / spectral_radius_bound(params);
    if dt > limit {
        return Err(invalid(format!("--dt {dt} exceeds the RK4 stability limit {limit:.6e} for these parameters")));
    }
    Ok(dt)
}

impl RunConfig {
    /// Fills defaults and checks every option against the preconditions of
    /// the library call it feeds.
    pub fn resolve(raw: &RawConfig) -> Result<RunConfig, CliError> {
        let command = raw.command.ok_or_else(|| invalid("no command given (use a subcommand or a config file with \"command\")"))?;
        let allowed = allowed_options(command);
        if let Some(bad) = raw.set_options().into_iter().find(|name| !allowed.contains(name)) {
            return Err(invalid(format!("option --{bad} does not apply to {}", command.name())));
        }
        let params = ModelParams::from_parts(
            finite(raw.kappa0.unwrap_or(1.0), "kappa0")?,
            finite(raw.kappa_a.unwrap_or(1.0), "kappaA")?,
            finite(raw.re_ea.unwrap_or(0.0), "reEa")?,
            finite(raw.im_ea.unwrap_or(0.0), "imEa")?,
        )
        .map_err(|e| invalid(e.to_string()))?;
        let k0 = params.kappa0();

        let options = match command {
            CommandKind::Singularities => {
                if params.is_hermitian() {
                    return Err(invalid("singularities needs a non-zero --imEa"));
                }
                CommandOptions::Singularities { tol: positive(raw.tol.unwrap_or(1e-9), "tol")? }
            }
            CommandKind::DomainScan => {
                let (im_points, kappa_points) = parse_grid(raw.grid.as_deref().unwrap_or("200x200"))?;
                CommandOptions::DomainScan {
                    re_ea_over_kappa0: finite(raw.re_ea_over_kappa0.unwrap_or(0.0), "reEaOverKappa0")?,
                    im_points,
                    kappa_points,
                    kappa_max: positive(raw.kappa_max.unwrap_or(2.0), "kappaMax")?,
                    im_max: positive(raw.im_max.unwrap_or(3.0), "imMax")?,
                }
            }
            CommandKind::Reflectance => {
                let kpoints = raw.kpoints.unwrap_or(2000);
                if kpoints == 0 {
                    return Err(invalid("--kpoints must be positive"));
                }
                CommandOptions::Reflectance { kpoints }
            }
            CommandKind::Wavepacket => {
                let spec = WavePacketSpec::new(
                    raw.n0.unwrap_or(50),
                    finite(raw.delta_n.unwrap_or(12.0), "deltaN")?,
                    finite(raw.k.unwrap_or(PI / 2.0), "k")?,
                    raw.normalize.unwrap_or(false),
                )
                .map_err(|e| invalid(e.to_string()))?;
                let snapshots = raw.snapshots.unwrap_or(100);
                if snapshots == 0 {
                    return Err(invalid("--snapshots must be positive"));
                }
                CommandOptions::Wavepacket {
                    spec,
                    t_final: positive(raw.t_final.unwrap_or(40.0), "tFinal")?,
                    dt: check_dt(&params, raw.dt.unwrap_or_else(|| default_dt(&params)))?,
                    snapshots,
                }
            }
            CommandKind::Decay => CommandOptions::Decay {
                t_final: positive(raw.t_final.unwrap_or(40.0), "tFinal")?,
                dt: check_dt(&params, raw.dt.unwrap_or_else(|| default_dt(&params)))?,
                legacy_cn_init: raw.legacy_cn_init.unwrap_or(false),
            },
            CommandKind::Selfenergy => {
                let e_min = finite(raw.e_min.unwrap_or(-3.0 * k0), "eMin")?;
                let e_max = finite(raw.e_max.unwrap_or(3.0 * k0), "eMax")?;
                let points = raw.points.unwrap_or(601);
                if e_min.partial_cmp(&e_max) != Some(std::cmp::Ordering::Less) || points < 2 {
                    return Err(invalid("selfenergy needs eMin < eMax and at least 2 points"));
                }
                CommandOptions::Selfenergy { e_min, e_max, points }
            }
            CommandKind::Poles => {
                let edge = params.band_edge();
                let region = Rect::new(
                    raw.re_min.unwrap_or(-0.995 * edge),
                    raw.re_max.unwrap_or(0.995 * edge),
                    raw.im_min.unwrap_or(-4.0 * k0),
                    raw.im_top.unwrap_or(0.1 * k0),
                )
                .map_err(|e| invalid(e.to_string()))?;
                if region.re_min <= -edge || region.re_max >= edge {
                    return Err(invalid("pole search region must satisfy -2 kappa0 < reMin < reMax < 2 kappa0"));
                }
                if region.im_max > 0.5 * k0 {
                    return Err(invalid("--imTop must not exceed kappa0 / 2"));
                }
                CommandOptions::Poles { region }
            }
        };
        Ok(RunConfig { command, params, options, out: raw.out.clone(), format: raw.format.unwrap_or_default() })
    }

    /// Fully resolved configuration; feeding it back reproduces the run.
    pub fn echo(&self) -> RawConfig {
        let p = &self.params;
        let mut raw = RawConfig {
            command: Some(self.command),
            out: self.out.clone(),
            format: Some(self.format),
            ..RawConfig::default()
        };
        if self.command != CommandKind::DomainScan {
            raw.kappa0 = Some(p.kappa0());
            raw.kappa_a = Some(p.kappa_a());
            raw.re_ea = Some(p.ea().re);
            raw.im_ea = Some(p.ea().im);
        }
        match &self.options {
            CommandOptions::Singularities { tol } => raw.tol = Some(*tol),
            CommandOptions::DomainScan { re_ea_over_kappa0, im_points, kappa_points, kappa_max, im_max } => {
                raw.re_ea_over_kappa0 = Some(*re_ea_over_kappa0);
                raw.grid = Some(format!("{im_points}x{kappa_points}"));
                raw.kappa_max = Some(*kappa_max);
                raw.im_max = Some(*im_max);
            }
            CommandOptions::Reflectance { kpoints } => raw.kpoints = Some(*kpoints),
            CommandOptions::Wavepacket { spec, t_final, dt, snapshots } => {
                raw.k = Some(spec.k());
                raw.n0 = Some(spec.n0());
                raw.delta_n = Some(spec.delta_n());
                raw.normalize = Some(spec.normalize());
                raw.t_final = Some(*t_final);
                raw.dt = Some(*dt);
                raw.snapshots = Some(*snapshots);
            }
            CommandOptions::Decay { t_final, dt, legacy_cn_init } => {
                raw.t_final = Some(*t_final);
                raw.dt = Some(*dt);
                raw.legacy_cn_init = Some(*legacy_cn_init);
            }
            CommandOptions::Selfenergy { e_min, e_max, points } => {
                raw.e_min = Some(*e_min);
                raw.e_max = Some(*e_max);
                raw.points = Some(*points);
            }
            CommandOptions::Poles { region } => {
                raw.re_min = Some(region.re_min);
                raw.re_max = Some(region.re_max);
                raw.im_min = Some(region.im_min);
                raw.im_top = Some(region.im_max);
            }
        }
        raw
    }
}
