//! Experiment configuration files.
//!
//! A configuration is a JSON object. Every key is optional and falls back to
//! the reference scenario. Physical quantities may carry unit suffixes (see
//! [`units`](super::units)); the loaded [`ExperimentConfig`] is entirely in
//! linear units.
//!
//! ```json
//! {
//!   "name": "reference",
//!   "carrier": "3.5 GHz",
//!   "tx_power": "30 dBm",
//!   "noise_power": "-114 dBm",
//!   "rho0": "-13.3 dBm",
//!   "path_loss_exponent": 2.1,
//!   "bs_distance": "50 m",
//!   "aperture": {
//!     "width": "1 m", "height": "1 m",
//!     "subareas": [6, 6], "presets": [100, 100],
//!     "min_spacing": "0.5 lambda"
//!   },
//!   "rician_k": 5,
//!   "directions": {"feed": [0.5, 0, 0.866], "reflect": [-0.3, 0.2, 0.93], "transmit": [-0.3, 0.2, -0.93]},
//!   "phase_error": {"kind": "ideal"},
//!   "target_rate": 1,
//!   "fading_draws": 5,
//!   "mode": "both",
//!   "surface": "fires",
//!   "pso": {"particles": 30, "iterations": 60},
//!   "sweep": {"axis": "snr_db", "values": [124, 134, 144, 154]},
//!   "seeds": [1, 2, 3],
//!   "out": "results/snr.csv",
//!   "timing": false,
//!   "bound": {"tau": 0.5, "beta_r": 0.5, "p_r": 0.25}
//! }
//! ```
//!
//! `rician_k`, `phase_error` and `target_rate` accept either one value for
//! every hop/user or an object keyed by `feed`/`reflect`/`transmit` (for K)
//! or `r`/`t`.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use super::units::{parse, Kind};
use crate::channel::PhaseErrorModel;
use crate::coverage::QosTargets;
use crate::error::{Error, Result};
use crate::geometry::{ApertureConfig, SPEED_OF_LIGHT};
use crate::pso::PsoConfig;
use crate::scenario::{Mode, Scenario, Surface};

/// Which access schemes to run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModeChoice {
    Oma,
    Noma,
    Both,
}

impl ModeChoice {
    pub fn modes(self) -> Vec<Mode> {
        match self {
            ModeChoice::Oma => vec![Mode::Oma],
            ModeChoice::Noma => vec![Mode::Noma],
            ModeChoice::Both => vec![Mode::Oma, Mode::Noma],
        }
    }

    pub fn parse(key: &str, s: &str) -> Result<Self> {
        match s {
            "oma" => Ok(ModeChoice::Oma),
            "noma" => Ok(ModeChoice::Noma),
            "both" => Ok(ModeChoice::Both),
            _ => Err(Error::config(key, format!("expected oma, noma or both, got {s:?}"))),
        }
    }
}

/// Which surfaces to run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SurfaceChoice {
    Fires,
    Star,
    Both,
}

impl SurfaceChoice {
    pub fn surfaces(self) -> Vec<Surface> {
        match self {
            SurfaceChoice::Fires => vec![Surface::Fires],
            SurfaceChoice::Star => vec![Surface::StarRis],
            SurfaceChoice::Both => vec![Surface::Fires, Surface::StarRis],
        }
    }

    pub fn parse(key: &str, s: &str) -> Result<Self> {
        match s {
            "fires" => Ok(SurfaceChoice::Fires),
            "star" | "star_ris" => Ok(SurfaceChoice::Star),
            "both" => Ok(SurfaceChoice::Both),
            _ => Err(Error::config(key, format!("expected fires, star or both, got {s:?}"))),
        }
    }
}

/// Experiment axes a sweep can vary.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepAxis {
    /// PSO iteration budget `T`.
    Iterations,
    /// Transmit SNR `P/σ²` in dB (sets `P`, keeps `σ²`).
    SnrDb,
    /// Element count `M` (square layouts).
    Elements,
    /// Common target rate of both users (bit/s/Hz).
    Rate,
    /// Phase quantization levels `Q` on both sides.
    Quantization,
    /// Gaussian phase-jitter variance (rad²) on both sides.
    Jitter,
    /// Energy-splitting factor `β_r` with full power to both users.
    BetaR,
    /// Rician factor `K` on every hop.
    RicianK,
    /// Swarm size `N_p`.
    Particles,
}

impl SweepAxis {
    pub const ALL: [SweepAxis; 9] = [
        SweepAxis::Iterations,
        SweepAxis::SnrDb,
        SweepAxis::Elements,
        SweepAxis::Rate,
        SweepAxis::Quantization,
        SweepAxis::Jitter,
        SweepAxis::BetaR,
        SweepAxis::RicianK,
        SweepAxis::Particles,
    ];

    pub fn name(self) -> &'static str {
        match self {
            SweepAxis::Iterations => "iterations",
            SweepAxis::SnrDb => "snr_db",
            SweepAxis::Elements => "elements",
            SweepAxis::Rate => "rate",
            SweepAxis::Quantization => "quantization",
            SweepAxis::Jitter => "jitter",
            SweepAxis::BetaR => "beta_r",
            SweepAxis::RicianK => "rician_k",
            SweepAxis::Particles => "particles",
        }
    }

    pub fn from_name(key: &str, s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|a| a.name() == s)
            .ok_or_else(|| Error::config(key, format!("unknown sweep axis {s:?}")))
    }

    /// Applies one axis value to a configuration.
    pub fn apply(self, cfg: &mut ExperimentConfig, value: f64) -> Result<()> {
        let as_count = |v: f64| -> Result<usize> {
            if v >= 1.0 && v.fract() == 0.0 {
                Ok(v as usize)
            } else {
                Err(Error::Domain(format!("{} needs a positive integer, got {v}", self.name())))
            }
        };
        let s = &mut cfg.scenario;
        match self {
            SweepAxis::Iterations => cfg.pso.iterations = as_count(value)?,
            SweepAxis::Particles => cfg.pso.particles = as_count(value)?,
            SweepAxis::SnrDb => s.tx_power = s.noise_power * 10f64.powf(value / 10.0),
            SweepAxis::Elements => *s = s.clone().with_elements(as_count(value)?)?,
            SweepAxis::Rate => s.targets = QosTargets::symmetric(value)?,
            SweepAxis::Quantization => {
                let levels = as_count(value)? as u32;
                s.phase_r = PhaseErrorModel::Quantized { levels };
                s.phase_t = PhaseErrorModel::Quantized { levels };
            }
            SweepAxis::Jitter => {
                s.phase_r = PhaseErrorModel::GaussianJitter { variance: value };
                s.phase_t = PhaseErrorModel::GaussianJitter { variance: value };
            }
            SweepAxis::BetaR => {
                if !(0.0..=1.0).contains(&value) {
                    return Err(Error::Domain(format!("beta_r {value} outside [0, 1]")));
                }
            }
            SweepAxis::RicianK => {
                if !(value >= 0.0) {
                    return Err(Error::Domain(format!("Rician factor {value} is negative")));
                }
                s.k_factor = [value; 3];
            }
        }
        s.validate()
    }

    /// Modes scored at one axis value.
    pub fn modes(self, choice: ModeChoice, value: f64) -> Vec<Mode> {
        match self {
            SweepAxis::BetaR => vec![Mode::Es { beta_r: value }],
            _ => choice.modes(),
        }
    }
}

/// One sweep axis and its values.
#[derive(Debug, Clone, PartialEq)]
pub struct Sweep {
    pub axis: SweepAxis,
    pub values: Vec<f64>,
}

/// Parameters of the fixed-allocation `bound` report.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundSettings {
    /// OMA time fraction of user `r`.
    pub tau: f64,
    /// NOMA energy split.
    pub beta_r: f64,
    /// NOMA power fraction of user `r`.
    pub p_r: f64,
}

impl Default for BoundSettings {
    fn default() -> Self {
        Self {
            tau: 0.5,
            beta_r: 0.5,
            p_r: 0.25,
        }
    }
}

/// A fully resolved experiment.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub name: String,
    pub scenario: Scenario,
    pub mode: ModeChoice,
    pub surface: SurfaceChoice,
    pub pso: PsoConfig,
    pub sweep: Option<Sweep>,
    pub seeds: Vec<u64>,
    pub out: Option<PathBuf>,
    /// Record wall-clock seconds in sweep output. Off by default so that
    /// repeated runs produce identical files.
    pub timing: bool,
    /// Evaluate seeds on the rayon pool.
    pub parallel: bool,
    pub bound: BoundSettings,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            name: "reference".into(),
            scenario: Scenario::reference(),
            mode: ModeChoice::Both,
            surface: SurfaceChoice::Fires,
            pso: PsoConfig::default(),
            sweep: None,
            seeds: (1..=10).collect(),
            out: None,
            timing: false,
            parallel: false,
            bound: BoundSettings::default(),
        }
    }
}

/// Reads keys out of one JSON object and rejects leftovers.
struct Section<'a> {
    path: String,
    map: &'a Map<String, Value>,
    seen: Vec<&'static str>,
}

impl<'a> Section<'a> {
    fn new(path: &str, value: &'a Value) -> Result<Self> {
        let map = value
            .as_object()
            .ok_or_else(|| Error::config(path_or_root(path), "expected an object"))?;
        Ok(Self {
            path: path.to_string(),
            map,
            seen: Vec::new(),
        })
    }

    fn key(&self, k: &str) -> String {
        if self.path.is_empty() {
            k.to_string()
        } else {
            format!("{}.{k}", self.path)
        }
    }

    fn get(&mut self, k: &'static str) -> Option<&'a Value> {
        self.seen.push(k);
        self.map.get(k)
    }

    fn quantity(&mut self, k: &'static str, kind: Kind, wavelength: Option<f64>) -> Result<Option<f64>> {
        let key = self.key(k);
        match self.get(k) {
            None => Ok(None),
            Some(v) => quantity(&key, v, kind, wavelength).map(Some),
        }
    }

    fn finish(self) -> Result<()> {
        for k in self.map.keys() {
            if !self.seen.contains(&k.as_str()) {
                return Err(Error::config(self.key(k), "unknown key"));
            }
        }
        Ok(())
    }
}

fn path_or_root(p: &str) -> &str {
    if p.is_empty() {
        "<root>"
    } else {
        p
    }
}

fn quantity(key: &str, v: &Value, kind: Kind, wavelength: Option<f64>) -> Result<f64> {
    match v {
        Value::Number(n) => n
            .as_f64()
            .ok_or_else(|| Error::config(key, "number out of range")),
        Value::String(s) => parse(key, s, kind, wavelength),
        _ => Err(Error::config(key, "expected a number or a unit-tagged string")),
    }
}

fn string<'a>(key: &str, v: &'a Value) -> Result<&'a str> {
    v.as_str().ok_or_else(|| Error::config(key, "expected a string"))
}

fn count_pair(key: &str, v: &Value) -> Result<(usize, usize)> {
    let arr = v
        .as_array()
        .filter(|a| a.len() == 2)
        .ok_or_else(|| Error::config(key, "expected [horizontal, vertical]"))?;
    let n = |x: &Value| {
        x.as_u64()
            .filter(|&n| n >= 1)
            .map(|n| n as usize)
            .ok_or_else(|| Error::config(key, "expected positive integers"))
    };
    Ok((n(&arr[0])?, n(&arr[1])?))
}

fn vector3(key: &str, v: &Value) -> Result<[f64; 3]> {
    let arr = v
        .as_array()
        .filter(|a| a.len() == 3)
        .ok_or_else(|| Error::config(key, "expected a 3-vector"))?;
    let mut out = [0.0; 3];
    for (o, x) in out.iter_mut().zip(arr) {
        *o = x.as_f64().ok_or_else(|| Error::config(key, "expected numbers"))?;
    }
    Ok(out)
}

fn phase_model(key: &str, v: &Value) -> Result<PhaseErrorModel> {
    serde_json::from_value(v.clone()).map_err(|e| Error::config(key, e.to_string()))
}

/// Either one value for all, or an object keyed per member.
fn per_member<T>(
    key: &str,
    v: &Value,
    names: &[&'static str],
    is_single: impl Fn(&Value) -> bool,
    one: impl Fn(&str, &Value) -> Result<T>,
) -> Result<Vec<T>>
where
    T: Clone,
{
    if is_single(v) {
        let x = one(key, v)?;
        return Ok(vec![x; names.len()]);
    }
    let mut sec = Section::new(key, v)?;
    let mut out = Vec::with_capacity(names.len());
    for &n in names {
        let sub = format!("{key}.{n}");
        let val = sec
            .get(n)
            .ok_or_else(|| Error::config(&sub, "missing"))?;
        out.push(one(&sub, val)?);
    }
    sec.finish()?;
    Ok(out)
}

fn scenario_error(e: Error) -> Error {
    match e {
        Error::Config { .. } => e,
        other => Error::config("<scenario>", other.to_string()),
    }
}

impl ExperimentConfig {
    /// Loads a configuration file.
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::config(path.display().to_string(), e.to_string()))?;
        Self::from_json(&text)
    }

    /// Parses a configuration from JSON text.
    pub fn from_json(text: &str) -> Result<Self> {
        let root: Value =
            serde_json::from_str(text).map_err(|e| Error::config("<root>", e.to_string()))?;
        Self::from_value(&root)
    }

    pub fn from_value(root: &Value) -> Result<Self> {
        let mut cfg = ExperimentConfig::default();
        let mut top = Section::new("", root)?;

        if let Some(v) = top.get("name") {
            cfg.name = string("name", v)?.to_string();
        }

        let s = &mut cfg.scenario;
        let carrier = top
            .quantity("carrier", Kind::Frequency, None)?
            .unwrap_or(SPEED_OF_LIGHT / s.aperture.wavelength);
        if !(carrier > 0.0) {
            return Err(Error::config("carrier", "must be positive"));
        }
        let wavelength = SPEED_OF_LIGHT / carrier;
        if let Some(p) = top.quantity("tx_power", Kind::Power, None)? {
            s.tx_power = p;
        }
        if let Some(p) = top.quantity("noise_power", Kind::Power, None)? {
            s.noise_power = p;
        }
        if let Some(g) = top.quantity("rho0", Kind::Gain, None)? {
            s.rho0 = g;
        }
        if let Some(a) = top.quantity("path_loss_exponent", Kind::Ratio, None)? {
            s.alpha = a;
        }
        if let Some(d) = top.quantity("bs_distance", Kind::Length, None)? {
            s.bs_distance = d;
        }

        // Aperture: start from the reference layout rescaled to the carrier.
        let base = &s.aperture;
        let spacing_ratio = base.min_spacing / base.wavelength;
        let mut width = base.width;
        let mut height = base.height;
        let mut subareas = (base.subareas_h, base.subareas_v);
        let mut presets = (base.presets_h, base.presets_v);
        let mut min_spacing = spacing_ratio * wavelength;
        if let Some(v) = top.get("aperture") {
            let mut a = Section::new("aperture", v)?;
            if let Some(x) = a.quantity("width", Kind::Length, Some(wavelength))? {
                width = x;
            }
            if let Some(x) = a.quantity("height", Kind::Length, Some(wavelength))? {
                height = x;
            }
            if let Some(x) = a.get("subareas") {
                subareas = count_pair("aperture.subareas", x)?;
            }
            if let Some(x) = a.get("presets") {
                presets = count_pair("aperture.presets", x)?;
            }
            if let Some(x) = a.quantity("min_spacing", Kind::Length, Some(wavelength))? {
                min_spacing = x;
            }
            a.finish()?;
        }
        s.aperture = ApertureConfig::new(width, height, subareas, presets, wavelength, min_spacing)
            .map_err(|e| Error::config("aperture", e.to_string()))?;

        if let Some(v) = top.get("rician_k") {
            let k = per_member(
                "rician_k",
                v,
                &["feed", "reflect", "transmit"],
                |v| !v.is_object(),
                |key, v| quantity(key, v, Kind::Ratio, None),
            )?;
            s.k_factor = [k[0], k[1], k[2]];
        }
        if let Some(v) = top.get("directions") {
            let mut d = Section::new("directions", v)?;
            for (i, name) in ["feed", "reflect", "transmit"].into_iter().enumerate() {
                if let Some(x) = d.get(name) {
                    s.directions[i] = vector3(&format!("directions.{name}"), x)?;
                }
            }
            d.finish()?;
        }
        if let Some(v) = top.get("phase_error") {
            let m = per_member(
                "phase_error",
                v,
                &["r", "t"],
                |v| v.get("kind").is_some(),
                phase_model,
            )?;
            s.phase_r = m[0];
            s.phase_t = m[1];
        }
        if let Some(v) = top.get("target_rate") {
            let r = per_member("target_rate", v, &["r", "t"], |v| !v.is_object(), |key, v| {
                quantity(key, v, Kind::Ratio, None)
            })?;
            s.targets = QosTargets::new(r[0], r[1]).map_err(|e| Error::config("target_rate", e.to_string()))?;
        }
        if let Some(v) = top.get("fading_draws") {
            s.n_mc = v
                .as_u64()
                .filter(|&n| n >= 1)
                .ok_or_else(|| Error::config("fading_draws", "expected a positive integer"))?
                as usize;
        }
        s.validate().map_err(scenario_error)?;

        if let Some(v) = top.get("mode") {
            cfg.mode = ModeChoice::parse("mode", string("mode", v)?)?;
        }
        if let Some(v) = top.get("surface") {
            cfg.surface = SurfaceChoice::parse("surface", string("surface", v)?)?;
        }
        if let Some(v) = top.get("pso") {
            cfg.pso = serde_json::from_value(v.clone()).map_err(|e| Error::config("pso", e.to_string()))?;
            cfg.pso.validate().map_err(|e| Error::config("pso", e.to_string()))?;
        }
        if let Some(v) = top.get("sweep") {
            let mut sw = Section::new("sweep", v)?;
            let axis = sw
                .get("axis")
                .ok_or_else(|| Error::config("sweep.axis", "missing"))?;
            let axis = SweepAxis::from_name("sweep.axis", string("sweep.axis", axis)?)?;
            let values = sw
                .get("values")
                .and_then(Value::as_array)
                .filter(|a| !a.is_empty())
                .ok_or_else(|| Error::config("sweep.values", "expected a non-empty list"))?
                .iter()
                .map(|x| quantity("sweep.values", x, Kind::Ratio, None))
                .collect::<Result<Vec<_>>>()?;
            sw.finish()?;
            // Reject values the axis cannot take now rather than mid-run.
            for &x in &values {
                let mut probe = cfg.clone();
                axis.apply(&mut probe, x)
                    .map_err(|e| Error::config("sweep.values", e.to_string()))?;
            }
            cfg.sweep = Some(Sweep { axis, values });
        }
        if let Some(v) = top.get("seeds") {
            cfg.seeds = v
                .as_array()
                .filter(|a| !a.is_empty())
                .ok_or_else(|| Error::config("seeds", "expected a non-empty list"))?
                .iter()
                .map(|x| x.as_u64().ok_or_else(|| Error::config("seeds", "expected integers")))
                .collect::<Result<_>>()?;
        }
        if let Some(v) = top.get("out") {
            cfg.out = Some(PathBuf::from(string("out", v)?));
        }
        if let Some(v) = top.get("timing") {
            cfg.timing = v.as_bool().ok_or_else(|| Error::config("timing", "expected a boolean"))?;
        }
        if let Some(v) = top.get("parallel") {
            cfg.parallel = v.as_bool().ok_or_else(|| Error::config("parallel", "expected a boolean"))?;
        }
        if let Some(v) = top.get("bound") {
            let mut b = Section::new("bound", v)?;
            for (k, slot) in [
                ("tau", &mut cfg.bound.tau),
                ("beta_r", &mut cfg.bound.beta_r),
                ("p_r", &mut cfg.bound.p_r),
            ] {
                if let Some(x) = b.quantity(k, Kind::Ratio, None)? {
                    *slot = x;
                }
            }
            b.finish()?;
        }
        top.finish()?;
        Ok(cfg)
    }
}

/// Parses `--seed` lists such as `3`, `1,2,5` or `1-10`.
pub fn parse_seeds(text: &str) -> Result<Vec<u64>> {
    let bad = || Error::config("--seed", format!("cannot read seed list {text:?}"));
    let mut out = Vec::new();
    for part in text.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        if let Some((a, b)) = part.split_once('-') {
            let a: u64 = a.trim().parse().map_err(|_| bad())?;
            let b: u64 = b.trim().parse().map_err(|_| bad())?;
            if a > b {
                return Err(bad());
            }
            out.extend(a..=b);
        } else {
            out.push(part.parse().map_err(|_| bad())?);
        }
    }
    if out.is_empty() {
        return Err(bad());
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_object_is_the_reference() {
        let c = ExperimentConfig::from_json("{}").unwrap();
        assert_eq!(c, ExperimentConfig::default());
    }

    #[test]
    fn unit_strings_resolve() {
        let c = ExperimentConfig::from_json(
            r#"{"tx_power": "20 dBm", "carrier": "28 GHz", "aperture": {"min_spacing": "1 lambda"}}"#,
        )
        .unwrap();
        assert!((c.scenario.tx_power - 0.1).abs() < 1e-15);
        let l = SPEED_OF_LIGHT / 28e9;
        assert!((c.scenario.aperture.wavelength - l).abs() < 1e-15);
        assert!((c.scenario.aperture.min_spacing - l).abs() < 1e-15);
    }

    #[test]
    fn errors_carry_the_key() {
        let e = ExperimentConfig::from_json(r#"{"noise_power": "-114 parsecs"}"#).unwrap_err();
        assert!(matches!(&e, Error::Config { key, .. } if key == "noise_power"), "{e}");
        let e = ExperimentConfig::from_json(r#"{"aperture": {"widht": 1}}"#).unwrap_err();
        assert!(matches!(&e, Error::Config { key, .. } if key == "aperture.widht"), "{e}");
        let e = ExperimentConfig::from_json(r#"{"sweep": {"axis": "elements", "values": [20]}}"#)
            .unwrap_err();
        assert!(matches!(&e, Error::Config { key, .. } if key == "sweep.values"), "{e}");
    }

    #[test]
    fn per_member_values() {
        let c = ExperimentConfig::from_json(
            r#"{"rician_k": {"feed": 1, "reflect": 2, "transmit": "10 dB"},
                "phase_error": {"r": {"kind": "quantized", "levels": 2}, "t": {"kind": "ideal"}},
                "target_rate": {"r": 1, "t": 2}}"#,
        )
        .unwrap();
        assert_eq!(c.scenario.k_factor, [1.0, 2.0, 10.0]);
        assert_eq!(c.scenario.phase_r, PhaseErrorModel::Quantized { levels: 2 });
        assert_eq!(c.scenario.targets.rate_t, 2.0);
    }

    #[test]
    fn seed_lists() {
        assert_eq!(parse_seeds("3").unwrap(), vec![3]);
        assert_eq!(parse_seeds("1,4-6").unwrap(), vec![1, 4, 5, 6]);
        assert!(parse_seeds("x").is_err());
        assert!(parse_seeds("5-2").is_err());
    }
}
