//! The acceptance checks, runnable at two effort levels.
//!
//! Each criterion is a group of [`Check`]s; a criterion passes when all of its
//! checks do. Seeds are fixed, so a given level always produces the same
//! verdicts.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;

use crate::analytic;
use crate::error::{Error, Result};
use crate::experiment::{run_experiment, ExperimentSpec, Outputs, Preset};
use crate::model::{db_to_linear, epsilon_of, rng_from_seed, split_seed};
use crate::oracle::{estimate_gar_partitions, estimate_gaw_partition, geometric_moment_check, renewal_aoi};
use crate::simulator::{self, AoiReport};
use crate::{GenerationModel, Scheme, SystemConfig};

const SEED: u64 = 20_240_601;

use GenerationModel::{AtRequest, AtWill};
use Scheme::{CrNoma, Tdma};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Level {
    /// 2·10^4 frames per run, 10^5 Monte Carlo trials per grid point.
    Fast,
    /// 2·10^5 frames per run, 10^6 trials.
    Full,
}

impl Level {
    pub fn frames(self) -> u64 {
        match self {
            Level::Fast => 20_000,
            Level::Full => 200_000,
        }
    }

    pub fn trials(self) -> u64 {
        match self {
            Level::Fast => 100_000,
            Level::Full => 1_000_000,
        }
    }
}

impl FromStr for Level {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "fast" => Ok(Level::Fast),
            "full" => Ok(Level::Full),
            _ => Err(Error::Config(format!("unknown validation level '{s}'"))),
        }
    }
}

/// One comparison inside a criterion.
#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub label: String,
    pub detail: String,
    pub passed: bool,
}

impl Check {
    fn relative(label: impl Into<String>, measured: f64, reference: f64, tol: f64) -> Self {
        let rel = (measured - reference).abs() / reference.abs();
        Check {
            label: label.into(),
            detail: format!("{measured:.6} vs {reference:.6} (rel {rel:.2e}, tol {tol:.0e})"),
            passed: rel <= tol,
        }
    }

    fn absolute(label: impl Into<String>, measured: f64, reference: f64, tol: f64) -> Self {
        let dev = (measured - reference).abs();
        Check {
            label: label.into(),
            detail: format!("{measured:.6} vs {reference} (dev {dev:.2e}, tol {tol:.0e})"),
            passed: dev <= tol,
        }
    }

    fn condition(label: impl Into<String>, passed: bool, detail: String) -> Self {
        Check { label: label.into(), detail, passed }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CriterionResult {
    pub id: u8,
    pub title: &'static str,
    pub checks: Vec<Check>,
}

impl CriterionResult {
    pub fn passed(&self) -> bool {
        !self.checks.is_empty() && self.checks.iter().all(|c| c.passed)
    }

    /// `criterion N: PASS  title (k/n checks)`
    pub fn summary_line(&self) -> String {
        let ok = self.checks.iter().filter(|c| c.passed).count();
        format!(
            "criterion {:>2}: {}  {} ({ok}/{} checks)",
            self.id,
            if self.passed() { "PASS" } else { "FAIL" },
            self.title,
            self.checks.len()
        )
    }
}

impl fmt::Display for CriterionResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{}", self.summary_line())?;
        for c in &self.checks {
            let mark = if c.passed { "ok  " } else { "FAIL" };
            writeln!(f, "    {mark} {}: {}", c.label, c.detail)?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ValidationReport {
    pub level: Level,
    pub criteria: Vec<CriterionResult>,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.criteria.iter().all(CriterionResult::passed)
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.criteria {
            write!(f, "{c}")?;
        }
        let failed = self.criteria.iter().filter(|c| !c.passed()).count();
        writeln!(f, "{} criteria, {failed} failed ({:?} level)", self.criteria.len(), self.level)
    }
}

/// Run every criterion in order.
pub fn run_validation(level: Level) -> Result<ValidationReport> {
    let runners: [fn(Level) -> Result<CriterionResult>; 10] = [
        criterion_1, criterion_2, criterion_3, criterion_4, criterion_5, criterion_6, criterion_7,
        criterion_8, criterion_9, criterion_10,
    ];
    let criteria = runners.iter().map(|f| f(level)).collect::<Result<_>>()?;
    Ok(ValidationReport { level, criteria })
}

fn at_level(c: SystemConfig, level: Level, seed: u64) -> SystemConfig {
    c.with_frames(level.frames(), SystemConfig::DEFAULT_WARMUP).with_seed(seed)
}

fn simulate_all(configs: &[SystemConfig]) -> Result<Vec<AoiReport>> {
    configs.par_iter().map(simulator::run).collect()
}

/// Configurations the point checks (criteria 1 through 5) simulate.
fn point_configs(level: Level) -> Vec<(u8, SystemConfig)> {
    let seed = |id: u64| split_seed(SEED, id);
    vec![
        (1, at_level(SystemConfig::new(Tdma, AtWill, 8, 1.5, 1.0, 0.0), level, seed(1))),
        (2, at_level(SystemConfig::new(CrNoma, AtWill, 8, 1.5, 1.0, 0.0), level, seed(2))),
        (3, at_level(SystemConfig::new(Tdma, AtWill, 8, 1.5, 1.0, 40.0), level, seed(3))),
        (3, at_level(SystemConfig::new(CrNoma, AtWill, 8, 1.5, 1.0, 40.0), level, seed(3))),
        (4, at_level(SystemConfig::new(Tdma, AtRequest, 8, 0.5, 1.0, 0.0), level, seed(4))),
        (4, at_level(SystemConfig::new(CrNoma, AtRequest, 8, 0.5, 1.0, 0.0), level, seed(4))),
        (5, at_level(SystemConfig::new(Tdma, AtRequest, 8, 0.5, 1.0, 40.0), level, seed(5))),
        (5, at_level(SystemConfig::new(CrNoma, AtRequest, 8, 0.5, 1.0, 40.0), level, seed(5))),
    ]
}

fn simulate_point(level: Level, id: u8) -> Result<Vec<AoiReport>> {
    let configs: Vec<SystemConfig> =
        point_configs(level).into_iter().filter(|(i, _)| *i == id).map(|(_, c)| c).collect();
    simulate_all(&configs)
}

/// TDMA generate-at-will reference point: M = 8, T = 1.5, R = 1, 0 dB.
pub fn criterion_1(level: Level) -> Result<CriterionResult> {
    let closed = analytic::tdma_gaw_aoi(8, 1.5, 1.0, 1.0);
    let sim = &simulate_point(level, 1)?[0];
    Ok(CriterionResult {
        id: 1,
        title: "TDMA GAW closed form and simulation at 0 dB",
        checks: vec![
            Check::absolute("closed form, 3 decimals", closed, 28.119, 5e-4),
            Check::absolute("closed form near 28", closed, 28.0, 0.5),
            Check::relative("simulated vs closed form", sim.overall_aoi, closed, 0.02),
        ],
    })
}

/// CR-NOMA generate-at-will at the same point, and its gain over TDMA.
pub fn criterion_2(level: Level) -> Result<CriterionResult> {
    let tdma = analytic::tdma_gaw_aoi(8, 1.5, 1.0, 1.0);
    let noma = analytic::crnoma_gaw_aoi(8, 1.5, 1.0, 1.0, 1.0)?;
    let sim = &simulate_point(level, 2)?[0];
    let reduction = 1.0 - noma / tdma;
    let sim_reduction = 1.0 - sim.overall_aoi / tdma;
    Ok(CriterionResult {
        id: 2,
        title: "CR-NOMA GAW closed form, simulation and reduction over TDMA",
        checks: vec![
            Check::absolute("closed form, 2 decimals", noma, 20.55, 5e-3),
            Check::relative("simulated vs closed form", sim.overall_aoi, noma, 0.02),
            Check::condition(
                "closed-form reduction above 25%",
                reduction > 0.25,
                format!("{:.2}%", 100.0 * reduction),
            ),
            Check::condition(
                "simulated reduction above 25%",
                sim_reduction > 0.25,
                format!("{:.2}%", 100.0 * sim_reduction),
            ),
        ],
    })
}

/// Generate-at-will schemes coincide at high SNR.
pub fn criterion_3(level: Level) -> Result<CriterionResult> {
    let snr = db_to_linear(40.0);
    let tdma = analytic::tdma_gaw_aoi(8, 1.5, 1.0, snr);
    let noma = analytic::crnoma_gaw_aoi(8, 1.5, 1.0, snr, snr)?;
    let limit = analytic::gaw_high_snr_aoi(8, 1.5);
    let sims = simulate_point(level, 3)?;
    let (sim_t, sim_n) = (sims[0].overall_aoi, sims[1].overall_aoi);
    Ok(CriterionResult {
        id: 3,
        title: "GAW schemes converge to T + MT/2 at 40 dB",
        checks: vec![
            Check::absolute("limit value", limit, 7.5, 1e-12),
            Check::relative("closed forms: CR-NOMA vs TDMA", noma, tdma, 0.01),
            Check::relative("closed form TDMA vs limit", tdma, limit, 0.01),
            Check::relative("closed form CR-NOMA vs limit", noma, limit, 0.01),
            Check::relative("simulated: CR-NOMA vs TDMA", sim_n, sim_t, 0.01),
            Check::relative("simulated TDMA vs limit", sim_t, limit, 0.01),
            Check::relative("simulated CR-NOMA vs limit", sim_n, limit, 0.01),
        ],
    })
}

/// Generate-at-request second pair member, M = 8, T = 0.5, R = 1, 0 dB.
pub fn criterion_4(level: Level) -> Result<CriterionResult> {
    let noma = analytic::crnoma_gar_user_aoi(5, 8, 0.5, 1.0, 1.0, 1.0)?;
    let tdma = analytic::tdma_gar_user_aoi(5, 8, 0.5, 1.0, 1.0)?;
    let sims = simulate_point(level, 4)?;
    Ok(CriterionResult {
        id: 4,
        title: "GAR user m' = 5 at 0 dB, closed forms and simulation",
        checks: vec![
            Check::absolute("CR-NOMA closed form", noma, 8.00, 5e-3),
            Check::absolute("TDMA closed form", tdma, 11.37, 5e-3),
            Check::relative("TDMA simulated vs closed form", sims[0].per_user_aoi[4], tdma, 0.02),
            Check::relative("CR-NOMA simulated vs closed form", sims[1].per_user_aoi[4], noma, 0.02),
        ],
    })
}

/// Generate-at-request high-SNR gap and fairness, m = 1, m' = 5.
pub fn criterion_5(level: Level) -> Result<CriterionResult> {
    let eps = epsilon_of(1.0)?.value();
    let gap = analytic::gar_high_snr_gap(8, 0.5, eps);
    let sims = simulate_point(level, 5)?;
    let (t, n) = (&sims[0].per_user_aoi, &sims[1].per_user_aoi);
    let (m, mp) = (0, 4);
    Ok(CriterionResult {
        id: 5,
        title: "GAR at 40 dB: second-member gain and per-pair fairness",
        checks: vec![
            Check::absolute("high-SNR gap formula", -gap, 1.0, 1e-12),
            Check::absolute("simulated TDMA - CR-NOMA, user m'", t[mp] - n[mp], 1.0, 0.05),
            Check::relative("simulated user m, CR-NOMA vs TDMA", n[m], t[m], 0.01),
            Check::absolute("TDMA gap user m' - user m", t[mp] - t[m], 2.0, 0.05),
            Check::absolute("CR-NOMA gap user m' - user m", n[mp] - n[m], 1.0, 0.05),
        ],
    })
}

/// Grid of (ε, P = P_S) points for the partition oracle: four rates by five
/// SNRs.
pub fn partition_grid() -> Vec<(f64, f64)> {
    let mut grid = Vec::new();
    for rate in [0.5, 1.0, 1.5, 2.0] {
        for snr_db in [-5.0, 0.0, 5.0, 10.0, 15.0] {
            grid.push(((2.0f64).powf(rate) - 1.0, db_to_linear(snr_db)));
        }
    }
    grid
}

const PARTITION_NAMES: [&str; 10] = [
    "gaw p0", "gaw p_m", "gaw p_m'", "gar p_0m", "gar p_mm", "gar p_m'm", "gar p_0m'", "gar p_mm'",
    "gar p_m'm'", "gar joint",
];

/// Partition probabilities against an independent Monte Carlo oracle.
pub fn criterion_6(level: Level) -> Result<CriterionResult> {
    let trials = level.trials();
    let seed = split_seed(SEED, 6);
    let mut checks: Vec<Check> = partition_grid()
        .par_iter()
        .enumerate()
        .map(|(i, &(eps, p))| {
            let mut rng = rng_from_seed(split_seed(seed, i as u64));
            let gaw = estimate_gaw_partition(eps, p, p, trials, &mut rng);
            let gar = estimate_gar_partitions(eps, p, p, trials, &mut rng);
            let expect_gaw = analytic::gaw_partition(eps, p, p).as_array();
            let expect_m = analytic::gar_partition_user_m(eps, p, p).as_array();
            let expect_mp = analytic::gar_partition_user_mprime(eps, p, p).as_array();
            let joint = (-eps / p).exp() * analytic::tau(eps, p, p);

            let pairs = gaw
                .iter()
                .zip(expect_gaw)
                .chain(gar.user_m.iter().zip(expect_m))
                .chain(gar.user_mprime.iter().zip(expect_mp))
                .chain(std::iter::once((&gar.owner_fail_overlay_success, joint)));
            let mut missed = Vec::new();
            let mut worst = 0.0f64;
            let mut total = 0;
            for ((est, value), name) in pairs.zip(PARTITION_NAMES) {
                total += 1;
                let z = est.sigmas_from(value);
                if !est.covers(value) {
                    missed.push(format!("{name} {:.6} vs {value:.6} ({z:.2}σ)", est.estimate));
                }
                worst = worst.max(z);
            }
            let covered = total - missed.len();
            let mut detail = format!("{covered}/{total} inside 3σ, worst {worst:.2}σ");
            if !missed.is_empty() {
                detail += &format!("; outside: {}", missed.join(", "));
            }
            Check::condition(
                format!("eps={eps:.4} P={p:.4}"),
                missed.is_empty(),
                detail,
            )
        })
        .collect();

    let mut worst_sum = 0.0f64;
    for &(eps, p) in &partition_grid() {
        for part in [
            analytic::gaw_partition(eps, p, p),
            analytic::gar_partition_user_m(eps, p, p),
            analytic::gar_partition_user_mprime(eps, p, p),
        ] {
            worst_sum = worst_sum.max((part.sum() - 1.0).abs());
        }
    }
    checks.push(Check::condition(
        "closed-form partitions sum to one",
        worst_sum <= 1e-12,
        format!("max |sum - 1| = {worst_sum:.2e}"),
    ));
    Ok(CriterionResult { id: 6, title: "partition probabilities vs Monte Carlo oracle", checks })
}

/// The renewal recomputation agrees with the simulator on every run of the
/// point checks.
pub fn criterion_7(level: Level) -> Result<CriterionResult> {
    let mut checks = Vec::new();
    for (id, c) in point_configs(level) {
        let (report, log) = simulator::run_with_log(&c)?;
        let renewal = renewal_aoi(&log)?;
        let worst = report
            .per_user_aoi
            .iter()
            .zip(&renewal)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        checks.push(Check::condition(
            format!("criterion {id} run, {} {} at {} dB", c.scheme.as_str(), c.generation.as_str(), 10.0 * c.primary_snr.log10()),
            worst < 1e-9,
            format!("max |simulator - renewal| = {worst:.2e} over {} deliveries", log.records.len()),
        ));
    }
    Ok(CriterionResult { id: 7, title: "renewal recomputation from delivery logs", checks })
}

/// Geometric moment identities used by the closed forms.
pub fn criterion_8(_level: Level) -> Result<CriterionResult> {
    let mut checks = Vec::new();
    for x in [0.1, 0.5, 0.9] {
        let (first, second) = geometric_moment_check(x, 2_000)?;
        checks.push(Check::condition(
            format!("x = {x}"),
            first < 1e-10 && second < 1e-10,
            format!("residuals {first:.2e}, {second:.2e}"),
        ));
    }
    Ok(CriterionResult { id: 8, title: "geometric series moments", checks })
}

fn strictly_increasing(v: &[f64]) -> bool {
    v.windows(2).all(|w| w[1] > w[0])
}

/// Qualitative trends: growth in M and R, and the GAR ordering of schemes.
pub fn criterion_9(level: Level) -> Result<CriterionResult> {
    let seed = split_seed(SEED, 9);
    let mut checks = Vec::new();

    // AoI grows with M (GAW, R = 1.5, T = 0.5)
    let fig5 = ExperimentSpec::preset(Preset::Fig5);
    for scheme in [Tdma, CrNoma] {
        for &snr_db in &fig5.snr_db {
            let closed: Vec<f64> = fig5
                .users
                .iter()
                .map(|&m| {
                    let eps = epsilon_of(1.5)?.value();
                    let p = db_to_linear(snr_db);
                    match scheme {
                        Tdma => Ok(analytic::tdma_gaw_aoi(m, 0.5, eps, p)),
                        CrNoma => analytic::crnoma_gaw_aoi(m, 0.5, eps, p, p),
                    }
                })
                .collect::<Result<_>>()?;
            let configs: Vec<SystemConfig> = fig5
                .users
                .iter()
                .map(|&m| at_level(SystemConfig::new(scheme, AtWill, m, 0.5, 1.5, snr_db), level, seed))
                .collect();
            let sim: Vec<f64> = simulate_all(&configs)?.iter().map(|r| r.overall_aoi).collect();
            checks.push(Check::condition(
                format!("{} GAW increasing in M at {snr_db} dB", scheme.as_str()),
                strictly_increasing(&closed) && strictly_increasing(&sim),
                format!("M = 4..32: closed {:.3}..{:.3}, simulated {:.3}..{:.3}", closed[0], closed[7], sim[0], sim[7]),
            ));
        }
    }

    // AoI grows with R (GAW, M = 8): R = 0.5 against R = 1, common seeds
    let fig4 = ExperimentSpec::preset(Preset::Fig4a);
    for scheme in [Tdma, CrNoma] {
        let mut closed_ok = true;
        let mut sim_ok = true;
        let mut points = 0;
        for &slot in &fig4.slots {
            for &snr_db in &fig4.snr_db {
                let p = db_to_linear(snr_db);
                let mut closed = Vec::new();
                let mut configs = Vec::new();
                for rate in [0.5, 1.0] {
                    let eps = epsilon_of(rate)?.value();
                    closed.push(match scheme {
                        Tdma => analytic::tdma_gaw_aoi(8, slot, eps, p),
                        CrNoma => analytic::crnoma_gaw_aoi(8, slot, eps, p, p)?,
                    });
                    configs.push(at_level(SystemConfig::new(scheme, AtWill, 8, slot, rate, snr_db), level, seed));
                }
                let sim = simulate_all(&configs)?;
                closed_ok &= closed[1] > closed[0];
                sim_ok &= sim[1].overall_aoi >= sim[0].overall_aoi;
                points += 1;
            }
        }
        checks.push(Check::condition(
            format!("{} GAW increasing in R", scheme.as_str()),
            closed_ok && sim_ok,
            format!("{points} (T, SNR) points: closed forms {closed_ok}, simulated {sim_ok}"),
        ));
    }

    // GAR: CR-NOMA overall never above TDMA
    for preset in [Preset::Fig7a, Preset::Fig7b] {
        let spec = ExperimentSpec::preset(preset);
        let rate = spec.rates[0];
        let eps = epsilon_of(rate)?.value();
        let mut violations = Vec::new();
        let mut points = 0;
        for &m in &spec.users {
            let mut configs = Vec::new();
            for &snr_db in &spec.snr_db {
                for scheme in [Tdma, CrNoma] {
                    configs.push(at_level(SystemConfig::new(scheme, AtRequest, m, 0.5, rate, snr_db), level, seed));
                }
            }
            let sims = simulate_all(&configs)?;
            for (j, &snr_db) in spec.snr_db.iter().enumerate() {
                let p = db_to_linear(snr_db);
                let closed_t = analytic::tdma_gar_overall(m, 0.5, eps, p);
                let closed_n = analytic::crnoma_gar_overall(m, 0.5, eps, p, p)?;
                let (sim_t, sim_n) = (sims[2 * j].overall_aoi, sims[2 * j + 1].overall_aoi);
                if closed_n > closed_t || sim_n > sim_t {
                    violations.push(format!("M={m} {snr_db} dB"));
                }
                points += 1;
            }
        }
        checks.push(Check::condition(
            format!("GAR CR-NOMA <= TDMA overall, R = {rate}"),
            violations.is_empty(),
            format!("{points} points, violations: [{}]", violations.join(", ")),
        ));
    }
    Ok(CriterionResult { id: 9, title: "monotonicity and scheme ordering", checks })
}

/// The sweep CSV is byte-identical across repeated runs with one seed.
pub fn criterion_10(level: Level) -> Result<CriterionResult> {
    let spec = ExperimentSpec {
        frames: level.frames(),
        outputs: Outputs::Both,
        seed: split_seed(SEED, 10),
        ..ExperimentSpec::preset(Preset::Fig7x)
    };
    let first = run_experiment(&spec)?;
    let second = run_experiment(&spec)?;
    let rows = first.lines().count().saturating_sub(1);
    Ok(CriterionResult {
        id: 10,
        title: "reproducible sweep output",
        checks: vec![Check::condition(
            "fig7x CSV, two runs",
            first == second && rows > 0,
            format!("{rows} rows, {} bytes, identical: {}", first.len(), first == second),
        )],
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_has_twenty_points() {
        assert_eq!(partition_grid().len(), 20);
    }

    #[test]
    fn level_parsing() {
        assert_eq!("FAST".parse::<Level>().unwrap(), Level::Fast);
        assert_eq!("full".parse::<Level>().unwrap(), Level::Full);
        assert!("medium".parse::<Level>().is_err());
    }

    #[test]
    fn closed_form_only_criterion() {
        let r = criterion_8(Level::Fast).unwrap();
        assert!(r.passed(), "{r}");
        assert!(r.summary_line().starts_with("criterion  8: PASS"));
    }

    #[test]
    fn failing_check_fails_criterion() {
        let r = CriterionResult {
            id: 1,
            title: "t",
            checks: vec![Check::relative("a", 1.0, 1.0, 0.0), Check::relative("b", 1.1, 1.0, 0.05)],
        };
        assert!(!r.passed());
        assert!(r.to_string().contains("FAIL b"));
    }
}
