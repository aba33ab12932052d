//! Independent checks on the closed forms and on the simulator.
//!
//! The partition estimators classify per-frame protocol events straight from
//! fading draws, sharing only the decoding predicates with the simulator and
//! nothing with [`crate::analytic`]. [`renewal_aoi`] recomputes average age from
//! a delivery log by summing renewal intervals, independent of the
//! simulator's incremental integrator.

use rand::Rng;

use crate::error::{Error, Result};
use crate::model::{
    draw_gain, primary_success, secondary_capped_success, secondary_solo_success, Threshold,
};
use crate::simulator::EventLog;

/// Empirical probability with a 3σ binomial half-interval.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EstimateWithCI {
    pub estimate: f64,
    pub half_width: f64,
    pub trials: u64,
}

impl EstimateWithCI {
    pub fn from_counts(hits: u64, trials: u64) -> Self {
        let n = trials as f64;
        let estimate = hits as f64 / n;
        EstimateWithCI {
            estimate,
            half_width: 3.0 * (estimate * (1.0 - estimate) / n).sqrt(),
            trials,
        }
    }

    /// Whether the estimate is within 3σ of a hypothesised probability
    /// `value`, with σ evaluated at `value` rather than at the estimate so that
    /// rare events with no hits are still judged fairly.
    pub fn covers(&self, value: f64) -> bool {
        self.sigmas_from(value) <= 3.0
    }

    /// |estimate − value| in units of the null σ.
    pub fn sigmas_from(&self, value: f64) -> f64 {
        let dev = (value - self.estimate).abs();
        let sigma = null_sigma(value, self.trials);
        if sigma > 0.0 {
            dev / sigma
        } else if dev == 0.0 {
            0.0
        } else {
            f64::INFINITY
        }
    }
}

fn null_sigma(p: f64, trials: u64) -> f64 {
    (p * (1.0 - p) / trials as f64).sqrt()
}

/// Tallies of the three mutually exclusive frame outcomes.
#[derive(Debug, Default, Clone, Copy)]
struct Tally {
    none: u64,
    first: u64,
    second: u64,
}

impl Tally {
    fn record(&mut self, first: bool, second: bool) {
        if first {
            self.first += 1;
        } else if second {
            self.second += 1;
        } else {
            self.none += 1;
        }
    }

    /// `[p0, p_first, p_second]`.
    fn estimates(&self, trials: u64) -> [EstimateWithCI; 3] {
        [
            EstimateWithCI::from_counts(self.none, trials),
            EstimateWithCI::from_counts(self.first, trials),
            EstimateWithCI::from_counts(self.second, trials),
        ]
    }
}

/// Monte Carlo estimate of the generate-at-will CR-NOMA partition of U_m,
/// returned as `[p0, p_m, p_{m'}]`.
///
/// Each trial draws U_m's gain in slot m, U_m's gain in slot m' and U_{m'}'s
/// gain in slot m'. U_m succeeds first if its primary attempt clears the
/// threshold, otherwise second if its overlay attempt, capped against U_{m'},
/// does.
pub fn estimate_gaw_partition<R: Rng + ?Sized>(
    eps: f64,
    p: f64,
    p_s: f64,
    trials: u64,
    rng: &mut R,
) -> [EstimateWithCI; 3] {
    let eps = Threshold(eps);
    let mut tally = Tally::default();
    for _ in 0..trials {
        let own_first = draw_gain(rng);
        let own_second = draw_gain(rng);
        let owner_second = draw_gain(rng);
        let first = primary_success(p, own_first, eps);
        let second = !first && secondary_capped_success(p_s, own_second, p, owner_second, eps);
        tally.record(first, second);
    }
    tally.estimates(trials)
}

/// Both users' generate-at-request CR-NOMA partitions, each as
/// `[p0, p_first, p_second]`.
#[derive(Debug, Clone, Copy)]
pub struct GarEstimates {
    /// (p_{0m}, p_{mm}, p_{m'm})
    pub user_m: [EstimateWithCI; 3],
    /// (p_{0m'}, p_{mm'}, p_{m'm'})
    pub user_mprime: [EstimateWithCI; 3],
    /// U_m fails in slot m while U_{m'}, capped against it, succeeds there;
    /// the closed form is e^{-ε/P_S} τ.
    pub owner_fail_overlay_success: EstimateWithCI,
}

/// Monte Carlo estimate of both generate-at-request partitions of a pair.
///
/// Per trial, four gains: both users in slot m and both in slot m'. In slot m
/// U_m is primary and U_{m'} overlays with a capped rate. In slot m' U_{m'}
/// retransmits as primary only if it failed in slot m; U_m retransmits as
/// overlay if it failed, capped when U_{m'} is active and interference-free
/// when U_{m'} is silent.
pub fn estimate_gar_partitions<R: Rng + ?Sized>(
    eps: f64,
    p: f64,
    p_s: f64,
    trials: u64,
    rng: &mut R,
) -> GarEstimates {
    let eps = Threshold(eps);
    let mut m_tally = Tally::default();
    let mut mp_tally = Tally::default();
    let mut joint = 0u64;
    for _ in 0..trials {
        let m_in_m = draw_gain(rng);
        let mp_in_m = draw_gain(rng);
        let mp_in_mp = draw_gain(rng);
        let m_in_mp = draw_gain(rng);

        let m_first = primary_success(p, m_in_m, eps);
        let mp_first = secondary_capped_success(p_s, mp_in_m, p, m_in_m, eps);

        let mp_second = !mp_first && primary_success(p, mp_in_mp, eps);
        let m_second = !m_first
            && if mp_first {
                secondary_solo_success(p_s, m_in_mp, eps)
            } else {
                secondary_capped_success(p_s, m_in_mp, p, mp_in_mp, eps)
            };

        joint += u64::from(!m_first && mp_first);
        m_tally.record(m_first, m_second);
        mp_tally.record(mp_first, mp_second);
    }
    GarEstimates {
        user_m: m_tally.estimates(trials),
        user_mprime: mp_tally.estimates(trials),
        owner_fail_overlay_success: EstimateWithCI::from_counts(joint, trials),
    }
}

/// Average age of every user recomputed from a delivery log.
///
/// For each user, consecutive deliveries bound renewal intervals of length
/// y_j with reset age a_j at their start; each contributes the trapezoid
/// Q_j = a_j y_j + y_j²/2. The last interval is closed at the horizon, and the
/// part of any interval before the log's window start is subtracted out.
pub fn renewal_aoi(log: &EventLog) -> Result<Vec<f64>> {
    let window = log.horizon - log.window_start;
    if window.is_nan() || window <= 0.0 {
        return Err(Error::EmptyWindow);
    }
    let mut per_user: Vec<Vec<(f64, f64)>> = vec![Vec::new(); log.users];
    for r in &log.records {
        per_user[r.user - 1].push((r.time, r.reset_age));
    }
    per_user
        .iter()
        .enumerate()
        .map(|(u, events)| {
            if events.is_empty() {
                return Err(Error::NoDeliveries(u + 1));
            }
            let q = |age: f64, y: f64| age * y + 0.5 * y * y;
            let mut total = 0.0;
            for (j, &(start, age)) in events.iter().enumerate() {
                let end = events.get(j + 1).map_or(log.horizon, |e| e.0);
                if end <= log.window_start {
                    continue;
                }
                let mut area = q(age, end - start);
                if start < log.window_start {
                    area -= q(age, log.window_start - start);
                }
                total += area;
            }
            Ok(total / window)
        })
        .collect()
}

/// Residuals of the two geometric moment identities
/// Σ j x^j = x/(1−x)² and Σ j² x^j = x(1+x)/(1−x)³, summed to `terms` terms.
pub fn geometric_moment_check(x: f64, terms: u32) -> Result<(f64, f64)> {
    if !(x > 0.0 && x < 1.0) {
        return Err(Error::RatioOutOfRange(x));
    }
    let (mut first, mut second) = (0.0, 0.0);
    let mut pow = 1.0;
    for j in 1..=terms {
        pow *= x;
        let j = j as f64;
        first += j * pow;
        second += j * j * pow;
    }
    let one_minus = 1.0 - x;
    let first_closed = x / (one_minus * one_minus);
    let second_closed = x * (1.0 + x) / (one_minus * one_minus * one_minus);
    Ok(((first - first_closed).abs(), (second - second_closed).abs()))
}
