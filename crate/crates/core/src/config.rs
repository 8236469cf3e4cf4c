//! Scenario configuration: TOML files, dotted `key=value` overrides, and
//! `RINGTRAFFIC_*` environment overrides, resolved against per-kind defaults.
//!
//! Resolution is idempotent: the echo written next to every run loads back
//! into the same configuration.

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::history::delay_steps;
use crate::lane_change::VehicleInit;
use crate::model::ModelParams;
use crate::single_lane::Perturbation;

/// Environment variables with this prefix override config keys;
/// `__` separates table levels (`RINGTRAFFIC_LANE_CHANGE__R=0.3`).
pub const ENV_PREFIX: &str = "RINGTRAFFIC_";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExperimentKind {
    FundamentalDiagram,
    SingleLane,
    Stability,
    TauCurve,
    LoadBalance,
    Aggressive,
    Custom,
}

impl ExperimentKind {
    pub const ALL: [ExperimentKind; 7] = [
        ExperimentKind::FundamentalDiagram,
        ExperimentKind::SingleLane,
        ExperimentKind::Stability,
        ExperimentKind::TauCurve,
        ExperimentKind::LoadBalance,
        ExperimentKind::Aggressive,
        ExperimentKind::Custom,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            ExperimentKind::FundamentalDiagram => "fundamental-diagram",
            ExperimentKind::SingleLane => "single-lane",
            ExperimentKind::Stability => "stability",
            ExperimentKind::TauCurve => "tau-curve",
            ExperimentKind::LoadBalance => "load-balance",
            ExperimentKind::Aggressive => "aggressive",
            ExperimentKind::Custom => "custom",
        }
    }

    pub fn is_two_lane(self) -> bool {
        matches!(
            self,
            ExperimentKind::LoadBalance | ExperimentKind::Aggressive | ExperimentKind::Custom
        )
    }
}

impl fmt::Display for ExperimentKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ExperimentKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|k| k.as_str() == s)
            .ok_or_else(|| Error::Validation(format!("unknown experiment kind '{s}'")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LaneChangeSettings {
    pub r: f64,
    pub p: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GrowthSettings {
    /// Vehicle whose velocity series is analysed.
    pub vehicle: usize,
    /// Prominence floor for oscillation minima, as a fraction of `v_max`.
    pub prominence_floor: f64,
    /// Minimum spacing of minima, in periods of the slowest ring mode.
    pub separation_periods: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FlowSettings {
    /// Averaging window, s.
    pub delta: f64,
    pub grid_t: usize,
    pub grid_x: usize,
    /// Detector position for flow time series, as a fraction of the track.
    pub position: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StabilitySettings {
    pub delays: Vec<f64>,
    pub n_list: Vec<usize>,
    pub tol: f64,
    pub branch_lo: i32,
    pub branch_hi: i32,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub kind: ExperimentKind,
    pub n_vehicles: usize,
    /// Reaction time Δ, s.
    pub delay: f64,
    pub dt: f64,
    pub t_end: f64,
    pub replicas: usize,
    pub base_seed: u64,
    /// Snapshot every this many steps; 0 picks a default for the kind.
    pub record_stride: usize,
    /// Points of the fundamental diagram table.
    pub diagram_points: usize,
    pub params: ModelParams,
    /// A zero displacement leaves the ring unperturbed.
    pub perturbation: Perturbation,
    pub lane_change: LaneChangeSettings,
    pub growth: GrowthSettings,
    pub flow: FlowSettings,
    pub stability: StabilitySettings,
    /// Explicit two-lane layout for `custom`; empty means all cars in lane 0.
    pub vehicles: Vec<VehicleInit>,
}

impl ScenarioConfig {
    /// Reference parameters plus the settings of the kind's standard experiment.
    pub fn defaults(kind: ExperimentKind) -> Self {
        let mut c = ScenarioConfig {
            kind,
            n_vehicles: 50,
            delay: 0.0,
            dt: 0.01,
            t_end: 1200.0,
            replicas: 1,
            base_seed: 0,
            record_stride: 0,
            diagram_points: 200,
            params: ModelParams::default(),
            perturbation: Perturbation {
                vehicle: 0,
                displacement: 1.0,
            },
            lane_change: LaneChangeSettings { r: 0.1, p: 0.2 },
            growth: GrowthSettings {
                vehicle: 0,
                prominence_floor: 1e-6,
                separation_periods: 0.75,
            },
            flow: FlowSettings {
                delta: 18.63,
                grid_t: 50,
                grid_x: 50,
                position: 0.5,
            },
            stability: StabilitySettings {
                delays: (0..=16).map(|k| k as f64 * 0.05).collect(),
                n_list: vec![10, 25, 50, 75, 100, 133],
                tol: 1e-3,
                branch_lo: -8,
                branch_hi: 8,
            },
            vehicles: Vec::new(),
        };
        match kind {
            ExperimentKind::LoadBalance => {
                c.dt = 0.05;
                c.t_end = 100.0;
                c.replicas = 10;
                c.perturbation.displacement = 0.0;
                c.flow.delta = 5.0;
            }
            ExperimentKind::Aggressive => {
                c.dt = 0.05;
                c.t_end = 500.0;
                c.replicas = 20;
                c.perturbation.displacement = 0.0;
                c.lane_change.p = 0.1;
                c.flow.delta = 5.0;
            }
            ExperimentKind::Custom => {
                c.dt = 0.05;
                c.t_end = 100.0;
                c.perturbation.displacement = 0.0;
                c.flow.delta = 5.0;
            }
            _ => {}
        }
        c
    }

    /// Check every cross-field invariant; errors name the one violated.
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Validation(m));
        self.params
            .validate()
            .map_err(|e| Error::Validation(e.to_string()))?;
        if !(self.dt.is_finite() && self.dt > 0.0) {
            return bad(format!("dt must be > 0 (got {})", self.dt));
        }
        if !(self.t_end.is_finite() && self.t_end >= 0.0) {
            return bad(format!("t_end must be >= 0 (got {})", self.t_end));
        }
        if !(self.delay.is_finite() && self.delay >= 0.0) {
            return bad(format!("delay must be >= 0 (got {})", self.delay));
        }
        if delay_steps(self.delay, self.dt).is_err() {
            return bad(format!(
                "delay must be an integer multiple of dt (delay = {}, dt = {})",
                self.delay, self.dt
            ));
        }
        if self.replicas < 1 {
            return bad("replicas must be >= 1".into());
        }
        if self
            .base_seed
            .checked_add(self.replicas as u64 - 1)
            .is_none()
        {
            return bad("base_seed + replicas overflows".into());
        }
        if self.n_vehicles < 2 {
            return bad(format!("n_vehicles must be >= 2 (got {})", self.n_vehicles));
        }
        if self.kind == ExperimentKind::Aggressive && !self.n_vehicles.is_multiple_of(2) {
            return bad(format!(
                "aggressive needs an even n_vehicles (got {})",
                self.n_vehicles
            ));
        }
        if self.perturbation.vehicle >= self.n_vehicles {
            return bad(format!(
                "perturbation.vehicle must be < n_vehicles (got {})",
                self.perturbation.vehicle
            ));
        }
        if !self.perturbation.displacement.is_finite() {
            return bad("perturbation.displacement must be finite".into());
        }
        let lc = &self.lane_change;
        if !(lc.r.is_finite() && lc.r >= 0.0 && lc.p.is_finite() && lc.p >= 0.0) {
            return bad(format!(
                "lane_change.r and lane_change.p must be >= 0 (got {}, {})",
                lc.r, lc.p
            ));
        }
        if self.growth.vehicle >= self.n_vehicles {
            return bad(format!(
                "growth.vehicle must be < n_vehicles (got {})",
                self.growth.vehicle
            ));
        }
        if !(self.growth.prominence_floor >= 0.0 && self.growth.separation_periods >= 0.0) {
            return bad(
                "growth.prominence_floor and growth.separation_periods must be >= 0".into(),
            );
        }
        let f = &self.flow;
        if !(f.delta.is_finite() && f.delta > 0.0) {
            return bad(format!("flow.delta must be > 0 (got {})", f.delta));
        }
        if f.grid_t == 0 || f.grid_x == 0 {
            return bad("flow.grid_t and flow.grid_x must be >= 1".into());
        }
        if !(0.0..1.0).contains(&f.position) {
            return bad(format!(
                "flow.position must be in [0, 1) (got {})",
                f.position
            ));
        }
        let s = &self.stability;
        if s.delays.iter().any(|d| !(d.is_finite() && *d >= 0.0)) {
            return bad("stability.delays must all be >= 0".into());
        }
        if s.n_list.iter().any(|&n| n < 2) {
            return bad("stability.n_list entries must be >= 2".into());
        }
        if !(s.tol > 0.0) {
            return bad(format!("stability.tol must be > 0 (got {})", s.tol));
        }
        if s.branch_lo > s.branch_hi {
            return bad("stability.branch_lo must be <= stability.branch_hi".into());
        }
        if self.diagram_points < 2 {
            return bad("diagram_points must be >= 2".into());
        }
        for (i, v) in self.vehicles.iter().enumerate() {
            if v.lane > 1 {
                return bad(format!(
                    "vehicles[{i}].lane must be 0 or 1 (got {})",
                    v.lane
                ));
            }
        }
        Ok(())
    }

    /// Canonical TOML text; feeding it back to [`load_config_str`] gives `self`.
    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    /// SHA-256 of the canonical TOML text, hex encoded.
    pub fn hash(&self) -> String {
        hex::encode(Sha256::digest(self.to_toml().as_bytes()))
    }

    pub fn seeds(&self) -> Vec<u64> {
        (0..self.replicas as u64)
            .map(|i| self.base_seed + i)
            .collect()
    }
}

/// Where a config comes from, besides the kind.
#[derive(Debug, Clone, Default)]
pub struct ConfigSources {
    pub text: Option<String>,
    /// `dotted.key=value` pairs, applied after the file.
    pub overrides: Vec<String>,
    /// Environment pairs, applied after the file and before `overrides`.
    pub env: Vec<(String, String)>,
}

impl ConfigSources {
    pub fn from_file(path: &Path) -> Result<Self> {
        Ok(ConfigSources {
            text: Some(std::fs::read_to_string(path)?),
            ..Default::default()
        })
    }

    pub fn with_process_env(mut self) -> Self {
        self.env = std::env::vars()
            .filter(|(k, _)| k.starts_with(ENV_PREFIX))
            .collect();
        self.env.sort();
        self
    }
}

/// Resolve a config from TOML text alone.
pub fn load_config_str(text: &str, kind: Option<ExperimentKind>) -> Result<ScenarioConfig> {
    load_config(
        &ConfigSources {
            text: Some(text.to_owned()),
            ..Default::default()
        },
        kind,
    )
}

/// Merge defaults for the kind, the file, environment overrides and `--set`
/// overrides (in that order of increasing priority), then validate.
///
/// `kind` overrides a `kind` key in the file; one of the two must be present.
pub fn load_config(src: &ConfigSources, kind: Option<ExperimentKind>) -> Result<ScenarioConfig> {
    let text = src.text.as_deref().unwrap_or("");
    let mut user: toml::Table = toml::from_str(text).map_err(|e| parse_error(text, &e))?;

    for (name, value) in &src.env {
        let key = env_key(name)?;
        set_dotted(&mut user, &key, value)
            .map_err(|e| Error::Validation(format!("environment variable {name}: {e}")))?;
    }
    for item in &src.overrides {
        let (key, value) = item
            .split_once('=')
            .ok_or_else(|| Error::Validation(format!("override '{item}' is not key=value")))?;
        set_dotted(&mut user, key.trim(), value.trim())
            .map_err(|e| Error::Validation(format!("override '{item}': {e}")))?;
    }

    let kind = match (kind, user.get("kind")) {
        (Some(k), _) => k,
        (None, Some(toml::Value::String(s))) => s.parse()?,
        (None, Some(v)) => {
            return Err(Error::Validation(format!("kind must be a string, got {v}")))
        }
        (None, None) => return Err(Error::Validation("experiment kind not given".into())),
    };
    user.insert("kind".into(), toml::Value::String(kind.as_str().into()));

    let mut merged =
        toml::Table::try_from(ScenarioConfig::defaults(kind)).expect("defaults serialize");
    merge(&mut merged, user, "", text)?;
    let cfg: ScenarioConfig = toml::Value::Table(merged)
        .try_into()
        .map_err(|e: toml::de::Error| Error::Validation(e.message().to_owned()))?;
    cfg.validate()?;
    Ok(cfg)
}

fn parse_error(text: &str, e: &toml::de::Error) -> Error {
    let line = e
        .span()
        .map(|s| text[..s.start.min(text.len())].matches('\n').count() + 1);
    Error::Parse {
        line,
        message: e.message().to_owned(),
    }
}

/// `RINGTRAFFIC_LANE_CHANGE__R` -> `lane_change.r`.
fn env_key(name: &str) -> Result<String> {
    let rest = name
        .strip_prefix(ENV_PREFIX)
        .ok_or_else(|| Error::Validation(format!("{name} lacks the {ENV_PREFIX} prefix")))?;
    if rest.is_empty() {
        return Err(Error::Validation(format!("{name} names no key")));
    }
    Ok(rest.to_ascii_lowercase().replace("__", "."))
}

/// Interpret an override value: TOML literal if it parses as one, else a string.
fn parse_value(raw: &str) -> toml::Value {
    let doc = format!("v = {raw}");
    match toml::from_str::<toml::Table>(&doc) {
        Ok(mut t) => t
            .remove("v")
            .unwrap_or_else(|| toml::Value::String(raw.into())),
        Err(_) => toml::Value::String(raw.into()),
    }
}

fn set_dotted(table: &mut toml::Table, key: &str, raw: &str) -> std::result::Result<(), String> {
    let parts: Vec<&str> = key.split('.').collect();
    if parts.iter().any(|p| p.is_empty()) {
        return Err(format!("malformed key '{key}'"));
    }
    let mut cur = table;
    for p in &parts[..parts.len() - 1] {
        let entry = cur
            .entry(p.to_string())
            .or_insert_with(|| toml::Value::Table(toml::Table::new()));
        cur = entry
            .as_table_mut()
            .ok_or_else(|| format!("'{p}' is not a table"))?;
    }
    cur.insert(parts[parts.len() - 1].to_string(), parse_value(raw));
    Ok(())
}

/// Overlay `user` on `base`, rejecting keys that `base` does not have.
fn merge(base: &mut toml::Table, user: toml::Table, prefix: &str, text: &str) -> Result<()> {
    for (k, v) in user {
        let path = if prefix.is_empty() {
            k.clone()
        } else {
            format!("{prefix}.{k}")
        };
        match base.get_mut(&k) {
            None => {
                return Err(Error::Parse {
                    line: find_key_line(text, &k),
                    message: format!("unknown key '{path}'"),
                })
            }
            Some(toml::Value::Table(bt)) => match v {
                toml::Value::Table(ut) => merge(bt, ut, &path, text)?,
                other => {
                    return Err(Error::Validation(format!(
                        "'{path}' must be a table, got {other}"
                    )))
                }
            },
            Some(slot) => *slot = v,
        }
    }
    Ok(())
}

fn find_key_line(text: &str, key: &str) -> Option<usize> {
    text.lines()
        .position(|l| {
            let l = l.trim_start();
            l.strip_prefix(key)
                .is_some_and(|r| r.trim_start().starts_with('='))
                || l.trim_start_matches('[').starts_with(&format!("{key}]"))
                || l.trim_start_matches('[').starts_with(&format!("{key}."))
        })
        .map(|i| i + 1)
}

/// Flat `key -> value` view of a resolved config, for logs and manifests.
pub fn flatten(cfg: &ScenarioConfig) -> BTreeMap<String, String> {
    fn walk(prefix: &str, v: &toml::Value, out: &mut BTreeMap<String, String>) {
        match v {
            toml::Value::Table(t) => {
                for (k, v) in t {
                    let p = if prefix.is_empty() {
                        k.clone()
                    } else {
                        format!("{prefix}.{k}")
                    };
                    walk(&p, v, out);
                }
            }
            other => {
                out.insert(prefix.to_owned(), other.to_string());
            }
        }
    }
    let mut out = BTreeMap::new();
    walk(
        "",
        &toml::Value::try_from(cfg).expect("config serializes"),
        &mut out,
    );
    out
}
