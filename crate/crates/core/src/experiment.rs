//! Parameter sweeps and figure presets, emitted as CSV.
//!
//! One row per (scheme, M, T, R, SNR, user) point:
//!
//! ```text
//! preset,scheme,gen_model,M,T,R,snr_db,user_id,aoi_analytic,aoi_sim,sim_ci_halfwidth,frames,seed
//! ```
//!
//! `user_id` is a 1-based user index or `overall`. `sim_ci_halfwidth` is three
//! batch-means standard errors. Simulation columns are empty when only the
//! closed forms are requested, and `aoi_analytic` is empty for simulation-only
//! runs. Numbers carry six significant digits, so identical specs and seeds
//! give byte-identical output.
//!
//! Primary and secondary SNR are always equal in sweeps.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;

use crate::analytic;
use crate::error::{Error, Result};
use crate::model::{db_to_linear, epsilon_of, split_seed, GenerationModel, Scheme, SystemConfig};
use crate::simulator::{self, AoiReport};

pub const CSV_HEADER: [&str; 13] = [
    "preset",
    "scheme",
    "gen_model",
    "M",
    "T",
    "R",
    "snr_db",
    "user_id",
    "aoi_analytic",
    "aoi_sim",
    "sim_ci_halfwidth",
    "frames",
    "seed",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Preset {
    Fig4a,
    Fig4b,
    Fig5,
    Fig6a,
    Fig6b,
    Fig7x,
    Fig7a,
    Fig7b,
    Custom,
}

impl Preset {
    pub const ALL: [Preset; 9] = [
        Preset::Fig4a,
        Preset::Fig4b,
        Preset::Fig5,
        Preset::Fig6a,
        Preset::Fig6b,
        Preset::Fig7x,
        Preset::Fig7a,
        Preset::Fig7b,
        Preset::Custom,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Preset::Fig4a => "fig4a",
            Preset::Fig4b => "fig4b",
            Preset::Fig5 => "fig5",
            Preset::Fig6a => "fig6a",
            Preset::Fig6b => "fig6b",
            Preset::Fig7x => "fig7x",
            Preset::Fig7a => "fig7a",
            Preset::Fig7b => "fig7b",
            Preset::Custom => "custom",
        }
    }
}

impl fmt::Display for Preset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Preset {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Preset::ALL
            .into_iter()
            .find(|p| p.name().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| Error::UnknownPreset(s.to_string()))
    }
}

/// Which rows a grid point produces.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum UserSelection {
    Overall,
    /// Every user plus the overall average.
    All,
    /// The listed 1-based users.
    Users(Vec<usize>),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outputs {
    Analytic,
    Simulated,
    Both,
}

impl Outputs {
    fn analytic(self) -> bool {
        matches!(self, Outputs::Analytic | Outputs::Both)
    }

    fn simulated(self) -> bool {
        matches!(self, Outputs::Simulated | Outputs::Both)
    }
}

/// A full sweep description.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentSpec {
    pub preset: Preset,
    pub snr_db: Vec<f64>,
    pub users: Vec<usize>,
    pub rates: Vec<f64>,
    pub slots: Vec<f64>,
    pub schemes: Vec<Scheme>,
    pub generation: GenerationModel,
    pub report: UserSelection,
    pub outputs: Outputs,
    pub frames: u64,
    pub warmup: u64,
    pub seed: u64,
}

/// 0, 5, ..., 40 dB.
fn snr_sweep() -> Vec<f64> {
    (0..=8).map(|i| 5.0 * i as f64).collect()
}

impl ExperimentSpec {
    pub fn preset(preset: Preset) -> Self {
        let both = vec![Scheme::Tdma, Scheme::CrNoma];
        let base = ExperimentSpec {
            preset,
            snr_db: snr_sweep(),
            users: vec![8],
            rates: vec![1.0],
            slots: vec![0.5],
            schemes: both,
            generation: GenerationModel::AtWill,
            report: UserSelection::Overall,
            outputs: Outputs::Both,
            frames: SystemConfig::DEFAULT_FRAMES,
            warmup: SystemConfig::DEFAULT_WARMUP,
            seed: 1,
        };
        match preset {
            // GAW, M = 8; R = 0.5 and R = 1 panels, three slot durations each
            Preset::Fig4a => ExperimentSpec {
                rates: vec![0.5],
                slots: vec![0.5, 1.0, 1.5],
                ..base
            },
            Preset::Fig4b => ExperimentSpec {
                slots: vec![0.5, 1.0, 1.5],
                ..base
            },
            // GAW, R = 1.5, T = 0.5, sweep over M at a few SNRs
            Preset::Fig5 => ExperimentSpec {
                snr_db: vec![0.0, 10.0, 20.0],
                users: (1..=8).map(|k| 4 * k).collect(),
                rates: vec![1.5],
                ..base
            },
            // GAR, M = 8, R = 1, T = 0.5: first and second pair members
            Preset::Fig6a => ExperimentSpec {
                generation: GenerationModel::AtRequest,
                report: UserSelection::Users(vec![1, 2, 3, 4]),
                ..base
            },
            Preset::Fig6b => ExperimentSpec {
                generation: GenerationModel::AtRequest,
                report: UserSelection::Users(vec![5, 6, 7, 8]),
                ..base
            },
            // GAR, m = 1, M = 8, R = 1, T = 0.5: U_1 against its partner U_5
            Preset::Fig7x => ExperimentSpec {
                generation: GenerationModel::AtRequest,
                report: UserSelection::Users(vec![1, 5]),
                ..base
            },
            // GAR overall AoI, T = 0.5, for several network sizes
            Preset::Fig7a => ExperimentSpec {
                generation: GenerationModel::AtRequest,
                users: vec![4, 8, 16],
                rates: vec![0.5],
                ..base
            },
            Preset::Fig7b => ExperimentSpec {
                generation: GenerationModel::AtRequest,
                users: vec![4, 8, 16],
                rates: vec![1.5],
                ..base
            },
            Preset::Custom => base,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let fail = |msg: &str| Err(Error::Config(msg.to_string()));
        if self.schemes.is_empty() {
            return fail("no schemes selected");
        }
        if self.snr_db.is_empty() || self.users.is_empty() || self.rates.is_empty() || self.slots.is_empty() {
            return fail("every sweep axis needs at least one value");
        }
        if let Some(m) = self.users.iter().find(|&&m| m < 2 || m % 2 != 0) {
            return Err(Error::Config(format!("user count must be even and at least 2, got {m}")));
        }
        if self.rates.iter().any(|r| !(*r >= 0.0 && r.is_finite())) {
            return fail("rates must be finite and non-negative");
        }
        if self.slots.iter().any(|t| !(*t > 0.0 && t.is_finite())) {
            return fail("slot durations must be positive");
        }
        if self.snr_db.iter().any(|s| !s.is_finite()) {
            return fail("SNR values must be finite");
        }
        if let UserSelection::Users(list) = &self.report {
            if list.is_empty() {
                return fail("empty user list");
            }
            let smallest = *self.users.iter().min().unwrap_or(&0);
            if let Some(u) = list.iter().find(|&&u| u == 0 || u > smallest) {
                return Err(Error::Config(format!(
                    "user {u} does not exist in a network of {smallest} users"
                )));
            }
        }
        if self.outputs.simulated() && self.frames <= self.warmup {
            return fail("frames must exceed warm-up frames");
        }
        Ok(())
    }
}

/// Parse a flat `key = value` document on top of `base`. Lists are
/// comma-separated; `#` starts a comment. A `preset` key resets every field to
/// that preset before the remaining keys apply; axis keys are only accepted
/// for the custom preset.
pub fn parse_config(text: &str, base: ExperimentSpec) -> Result<ExperimentSpec> {
    let mut entries = BTreeMap::new();
    for (n, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| Error::Config(format!("line {}: expected key = value", n + 1)))?;
        entries.insert(k.trim().to_ascii_lowercase(), v.trim().to_string());
    }
    let mut spec = match entries.remove("preset") {
        Some(p) => ExperimentSpec::preset(p.parse()?),
        None => base,
    };
    for (key, value) in entries {
        apply_setting(&mut spec, &key, &value)?;
    }
    Ok(spec)
}

fn list<T: FromStr>(key: &str, value: &str) -> Result<Vec<T>> {
    value
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| {
            s.parse()
                .map_err(|_| Error::Config(format!("bad value `{s}` for `{key}`")))
        })
        .collect()
}

fn scalar<T: FromStr>(key: &str, value: &str) -> Result<T> {
    value
        .trim()
        .parse()
        .map_err(|_| Error::Config(format!("bad value `{value}` for `{key}`")))
}

/// Apply one `key = value` setting.
pub fn apply_setting(spec: &mut ExperimentSpec, key: &str, value: &str) -> Result<()> {
    let is_axis = matches!(
        key,
        "snr_db" | "users" | "m" | "rate" | "r" | "slot" | "t" | "schemes" | "gen_model" | "report"
    );
    if is_axis && spec.preset != Preset::Custom {
        return Err(Error::Config(format!(
            "preset {} fixes its axes; `{key}` needs preset = custom",
            spec.preset
        )));
    }
    match key {
        "snr_db" => spec.snr_db = list(key, value)?,
        "users" | "m" => spec.users = list(key, value)?,
        "rate" | "r" => spec.rates = list(key, value)?,
        "slot" | "t" => spec.slots = list(key, value)?,
        "schemes" => {
            spec.schemes = value
                .split(',')
                .map(str::trim)
                .filter(|s| !s.is_empty())
                .map(str::parse)
                .collect::<Result<_>>()?
        }
        "gen_model" => spec.generation = value.parse()?,
        "report" => {
            spec.report = match value.trim() {
                "overall" => UserSelection::Overall,
                "all" => UserSelection::All,
                other => UserSelection::Users(list(key, other)?),
            }
        }
        "outputs" => {
            spec.outputs = match value.trim() {
                "analytic" => Outputs::Analytic,
                "simulated" | "sim" => Outputs::Simulated,
                "both" => Outputs::Both,
                other => return Err(Error::Config(format!("unknown outputs `{other}`"))),
            }
        }
        "frames" => spec.frames = scalar(key, value)?,
        "warmup" => spec.warmup = scalar(key, value)?,
        "seed" => spec.seed = scalar(key, value)?,
        other => return Err(Error::Config(format!("unknown key `{other}`"))),
    }
    Ok(())
}

/// One grid point of a sweep.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridPoint {
    pub scheme: Scheme,
    pub users: usize,
    pub slot: f64,
    pub rate: f64,
    pub snr_db: f64,
}

fn sorted_axis(values: &[f64]) -> Vec<f64> {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    v.dedup();
    v
}

/// Grid points in output order: scheme, M, T, R, then SNR.
pub fn grid(spec: &ExperimentSpec) -> Vec<GridPoint> {
    let mut schemes = spec.schemes.clone();
    schemes.sort();
    schemes.dedup();
    let mut users = spec.users.clone();
    users.sort_unstable();
    users.dedup();
    let (slots, rates, snrs) = (sorted_axis(&spec.slots), sorted_axis(&spec.rates), sorted_axis(&spec.snr_db));
    let mut points = Vec::new();
    for &scheme in &schemes {
        for &m in &users {
            for &slot in &slots {
                for &rate in &rates {
                    for &snr_db in &snrs {
                        points.push(GridPoint { scheme, users: m, slot, rate, snr_db });
                    }
                }
            }
        }
    }
    points
}

impl GridPoint {
    pub fn config(&self, spec: &ExperimentSpec, seed: u64) -> SystemConfig {
        SystemConfig::new(self.scheme, spec.generation, self.users, self.slot, self.rate, self.snr_db)
            .with_frames(spec.frames, spec.warmup)
            .with_seed(seed)
    }

    /// Closed-form AoI of user `k` (1-based), or the overall average when
    /// `k` is `None`.
    pub fn analytic_aoi(&self, generation: GenerationModel, k: Option<usize>) -> Result<f64> {
        let eps = epsilon_of(self.rate)?.value();
        let snr = db_to_linear(self.snr_db);
        let (m, t) = (self.users, self.slot);
        match (self.scheme, generation, k) {
            (Scheme::Tdma, GenerationModel::AtWill, _) => Ok(analytic::tdma_gaw_aoi(m, t, eps, snr)),
            (Scheme::CrNoma, GenerationModel::AtWill, _) => analytic::crnoma_gaw_aoi(m, t, eps, snr, snr),
            (Scheme::Tdma, GenerationModel::AtRequest, None) => {
                Ok(analytic::tdma_gar_overall(m, t, eps, snr))
            }
            (Scheme::Tdma, GenerationModel::AtRequest, Some(k)) => {
                analytic::tdma_gar_user_aoi(k, m, t, eps, snr)
            }
            (Scheme::CrNoma, GenerationModel::AtRequest, None) => {
                analytic::crnoma_gar_overall(m, t, eps, snr, snr)
            }
            (Scheme::CrNoma, GenerationModel::AtRequest, Some(k)) => {
                analytic::crnoma_gar_user_aoi(k, m, t, eps, snr, snr)
            }
        }
    }
}

/// Format with six significant digits; scientific notation outside
/// [1e-4, 1e6).
pub fn format_sig(x: f64) -> String {
    const DIGITS: i32 = 6;
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return if x.is_nan() { "nan".into() } else if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    let mag = x.abs().log10().floor() as i32;
    if !(-4..6).contains(&mag) {
        return format!("{:.*e}", (DIGITS - 1) as usize, x);
    }
    let decimals = (DIGITS - 1 - mag).max(0) as usize;
    let s = format!("{x:.decimals$}");
    // rounding may carry into a new digit (999999.5 → 1000000)
    if s.trim_start_matches('-').split('.').next().map_or(0, str::len) > DIGITS as usize {
        return format!("{:.*e}", (DIGITS - 1) as usize, x);
    }
    s
}

fn rows_for_point(
    spec: &ExperimentSpec,
    point: &GridPoint,
    seed: u64,
    sim: Option<&AoiReport>,
) -> Vec<Vec<String>> {
    let selection: Vec<Option<usize>> = match &spec.report {
        UserSelection::Overall => vec![None],
        UserSelection::All => (1..=point.users).map(Some).chain([None]).collect(),
        UserSelection::Users(list) => list.iter().copied().map(Some).collect(),
    };
    selection
        .into_iter()
        .map(|k| {
            let analytic = if spec.outputs.analytic() {
                match point.analytic_aoi(spec.generation, k) {
                    Ok(v) => format_sig(v),
                    Err(Error::NeverDelivers) => "inf".into(),
                    Err(e) => e.to_string(),
                }
            } else {
                String::new()
            };
            let (aoi_sim, ci, frames, seed) = match sim {
                Some(r) => {
                    let (v, se) = match k {
                        Some(k) => (r.per_user_aoi[k - 1], r.per_user_std_error[k - 1]),
                        None => (r.overall_aoi, r.overall_std_error),
                    };
                    (format_sig(v), format_sig(3.0 * se), spec.frames.to_string(), seed.to_string())
                }
                None => Default::default(),
            };
            vec![
                spec.preset.name().to_string(),
                point.scheme.as_str().to_string(),
                spec.generation.as_str().to_string(),
                point.users.to_string(),
                format_sig(point.slot),
                format_sig(point.rate),
                format_sig(point.snr_db),
                k.map_or_else(|| "overall".to_string(), |k| k.to_string()),
                analytic,
                aoi_sim,
                ci,
                frames,
                seed,
            ]
        })
        .collect()
}

/// Run a sweep and return the CSV document.
///
/// Simulated points run in parallel; grid point `i` (in output order) uses
/// seed `split_seed(spec.seed, i)`, so the document does not depend on thread
/// scheduling.
pub fn run_experiment(spec: &ExperimentSpec) -> Result<String> {
    spec.validate()?;
    let points = grid(spec);
    let results: Vec<(u64, Option<AoiReport>)> = points
        .par_iter()
        .enumerate()
        .map(|(i, point)| {
            let seed = split_seed(spec.seed, i as u64);
            let sim = if spec.outputs.simulated() {
                Some(simulator::run(&point.config(spec, seed))?)
            } else {
                None
            };
            Ok((seed, sim))
        })
        .collect::<Result<_>>()?;

    let mut writer = csv::Writer::from_writer(Vec::new());
    writer.write_record(CSV_HEADER).map_err(csv_error)?;
    for (point, (seed, sim)) in points.iter().zip(&results) {
        for row in rows_for_point(spec, point, *seed, sim.as_ref()) {
            writer.write_record(&row).map_err(csv_error)?;
        }
    }
    let bytes = writer.into_inner().map_err(|e| Error::Io(e.into_error()))?;
    Ok(String::from_utf8(bytes).expect("CSV fields are ASCII"))
}

fn csv_error(e: csv::Error) -> Error {
    Error::Io(std::io::Error::other(e))
}
