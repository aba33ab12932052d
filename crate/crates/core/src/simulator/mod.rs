//! Frame-by-frame simulation of TDMA and CR-NOMA under both generation
//! models, with exact integration of every user's age process.
//!
//! Slot `s` (0-based) of every frame belongs to user `s`. Users `m` and
//! `m + M/2` form a pair. In each slot the gains of both pair members are
//! drawn fresh, whether or not they transmit, so the random stream consumed
//! per frame is the same for every scheme and rate. Deliveries take effect at
//! the end of the slot that carries them.

mod event_log;
mod tracker;

pub use event_log::{DeliveryRecord, EventLog};
pub use tracker::AoiTracker;

use crate::error::Result;
use crate::model::{
    self, draw_gain, rng_from_seed, ChannelGain, GenerationModel, Scheme, SimRng, SystemConfig,
    Threshold,
};

/// Number of batches used for the batch-means standard error.
pub const BATCHES: u64 = 20;

/// How a user's delivery cycles ended. A cycle is one frame's worth of
/// opportunities: the owned slot plus, under CR-NOMA, the overlay chance.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct OutcomeCounts {
    pub first: u64,
    pub second: u64,
    pub none: u64,
}

impl OutcomeCounts {
    pub fn total(&self) -> u64 {
        self.first + self.second + self.none
    }

    /// Empirical `(p0, p_first, p_second)`.
    pub fn frequencies(&self) -> [f64; 3] {
        let n = self.total().max(1) as f64;
        [self.none as f64 / n, self.first as f64 / n, self.second as f64 / n]
    }
}

/// Time-average AoI of one run.
#[derive(Debug, Clone, PartialEq)]
pub struct AoiReport {
    /// Average age of users `1..=M`, seconds.
    pub per_user_aoi: Vec<f64>,
    /// Batch-means standard error of each entry of `per_user_aoi`.
    pub per_user_std_error: Vec<f64>,
    pub overall_aoi: f64,
    pub overall_std_error: f64,
    /// Frames that contributed to the averages (warm-up excluded).
    pub frames_used: u64,
    pub seed: u64,
    /// Per-user cycle outcomes, counted for cycles starting after warm-up.
    pub outcomes: Vec<OutcomeCounts>,
}

/// Role a user plays in a slot it transmits in.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Role {
    /// Slot owner at power P, decoded interference-free after SIC.
    Primary,
    /// Overlay transmitter at power P_S with a capped rate.
    Secondary,
}

#[derive(Debug, Clone, Copy)]
enum Opportunity {
    First,
    Second,
}

/// Protocol state a user carries between slots.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UserProtocolState {
    pub pair_partner: usize,
    /// The first attempt of the current cycle failed and the second
    /// opportunity is still ahead.
    pub pending_retry: bool,
    /// Generation time of the update awaiting retransmission. Generate-at-will
    /// users regenerate before every attempt and never set this.
    pub pending_update_birth: Option<f64>,
    /// Frame in which the pending cycle started.
    cycle_frame: u64,
}

impl UserProtocolState {
    fn new(pair_partner: usize) -> Self {
        UserProtocolState {
            pair_partner,
            pending_retry: false,
            pending_update_birth: None,
            cycle_frame: 0,
        }
    }
}

/// Slots (0-based) a user may transmit in and the role in each, for one frame.
pub fn role_schedule(scheme: Scheme, user: usize, users: usize) -> Vec<(usize, Role)> {
    let half = users / 2;
    let partner = if user < half { user + half } else { user - half };
    match scheme {
        Scheme::Tdma => vec![(user, Role::Primary)],
        Scheme::CrNoma => {
            let mut s = vec![(user, Role::Primary), (partner, Role::Secondary)];
            s.sort_by_key(|&(slot, _)| slot);
            s
        }
    }
}

pub fn run(config: &SystemConfig) -> Result<AoiReport> {
    config.validate()?;
    Engine::new(config, false).simulate().map(|(report, _)| report)
}

/// Like [`run`], also returning every delivery (plus each user's initial
/// state at time zero) as an [`EventLog`].
pub fn run_with_log(config: &SystemConfig) -> Result<(AoiReport, EventLog)> {
    config.validate()?;
    let (report, records) = Engine::new(config, true).simulate()?;
    let frame = config.frame_duration();
    let log = EventLog {
        users: config.users,
        slot_duration: config.slot_duration,
        window_start: config.warmup_frames as f64 * frame,
        horizon: config.frames as f64 * frame,
        records: records.unwrap_or_default(),
    };
    Ok((report, log))
}

struct Engine<'a> {
    cfg: &'a SystemConfig,
    eps: Threshold,
    rng: SimRng,
    trackers: Vec<AoiTracker>,
    states: Vec<UserProtocolState>,
    outcomes: Vec<OutcomeCounts>,
    log: Option<Vec<DeliveryRecord>>,
}

impl<'a> Engine<'a> {
    fn new(cfg: &'a SystemConfig, record: bool) -> Self {
        let users = cfg.users;
        let half = users / 2;
        let window_start = cfg.warmup_frames as f64 * cfg.frame_duration();
        let mut log = record.then(Vec::new);
        let trackers = (0..users)
            .map(|u| {
                let age = Self::initial_age(cfg, u);
                if let Some(log) = log.as_mut() {
                    log.push(DeliveryRecord {
                        time: 0.0,
                        user: u + 1,
                        slot: 0,
                        reset_age: age,
                    });
                }
                AoiTracker::new(0.0, age, window_start)
            })
            .collect();
        let states = (0..users)
            .map(|u| UserProtocolState::new(if u < half { u + half } else { u - half }))
            .collect();
        Engine {
            cfg,
            eps: cfg.threshold(),
            rng: rng_from_seed(cfg.seed),
            trackers,
            states,
            outcomes: vec![OutcomeCounts::default(); users],
            log,
        }
    }

    fn initial_age(cfg: &SystemConfig, user: usize) -> f64 {
        match cfg.generation {
            GenerationModel::AtWill => cfg.slot_duration,
            GenerationModel::AtRequest => (user + 1) as f64 * cfg.slot_duration,
        }
    }

    fn deliver(&mut self, user: usize, slot: usize, t: f64, reset_age: f64) -> Result<()> {
        self.trackers[user].reset_age(t, reset_age)?;
        if let Some(log) = self.log.as_mut() {
            log.push(DeliveryRecord {
                time: t,
                user: user + 1,
                slot: slot + 1,
                reset_age,
            });
        }
        Ok(())
    }

    fn tally(&mut self, user: usize, cycle_frame: u64, outcome: Option<Opportunity>) {
        if cycle_frame < self.cfg.warmup_frames {
            return;
        }
        let c = &mut self.outcomes[user];
        match outcome {
            Some(Opportunity::First) => c.first += 1,
            Some(Opportunity::Second) => c.second += 1,
            None => c.none += 1,
        }
    }

    /// Reset age of a delivery at the end of `slot`.
    fn reset_for(&self, slot: usize) -> f64 {
        match self.cfg.generation {
            GenerationModel::AtWill => self.cfg.slot_duration,
            GenerationModel::AtRequest => (slot + 1) as f64 * self.cfg.slot_duration,
        }
    }

    fn simulate(mut self) -> Result<(AoiReport, Option<Vec<DeliveryRecord>>)> {
        let cfg = self.cfg;
        let users = cfg.users;
        let frame = cfg.frame_duration();
        let used = cfg.frames - cfg.warmup_frames;
        let batches = BATCHES.min(used);
        let boundaries: Vec<u64> = (1..=batches)
            .map(|b| cfg.warmup_frames + b * used / batches)
            .collect();
        let mut next_boundary = 0;
        let mut snapshots: Vec<Vec<f64>> = Vec::with_capacity(batches as usize);
        let mut gains = vec![(ChannelGain(0.0), ChannelGain(0.0)); users];

        for i in 0..cfg.frames {
            for g in gains.iter_mut() {
                let own = draw_gain(&mut self.rng);
                let partner = draw_gain(&mut self.rng);
                *g = (own, partner);
            }
            let frame_start = i as f64 * frame;
            match (cfg.scheme, cfg.generation) {
                (Scheme::Tdma, _) => self.tdma_frame(i, frame_start, &gains)?,
                (Scheme::CrNoma, GenerationModel::AtWill) => {
                    self.noma_gaw_frame(i, frame_start, &gains)?
                }
                (Scheme::CrNoma, GenerationModel::AtRequest) => {
                    self.noma_gar_frame(i, frame_start, &gains)?
                }
            }
            if next_boundary < boundaries.len() && i + 1 == boundaries[next_boundary] {
                let t = (i + 1) as f64 * frame;
                snapshots.push(self.trackers.iter().map(|tr| tr.area_until(t)).collect());
                next_boundary += 1;
            }
        }

        let horizon = cfg.frames as f64 * frame;
        let per_user_aoi = self
            .trackers
            .iter()
            .map(|tr| tr.finalize(horizon))
            .collect::<Result<Vec<_>>>()?;
        let overall_aoi = per_user_aoi.iter().sum::<f64>() / users as f64;

        // batch averages: per user, then their mean across users
        let mut prev_area = vec![0.0; users];
        let mut prev_frame = cfg.warmup_frames;
        let mut per_batch_user: Vec<Vec<f64>> = vec![Vec::with_capacity(snapshots.len()); users];
        let mut per_batch_overall = Vec::with_capacity(snapshots.len());
        for (snap, &end) in snapshots.iter().zip(&boundaries) {
            let span = (end - prev_frame) as f64 * frame;
            let mut sum = 0.0;
            for u in 0..users {
                let avg = (snap[u] - prev_area[u]) / span;
                per_batch_user[u].push(avg);
                sum += avg;
            }
            per_batch_overall.push(sum / users as f64);
            prev_area.clone_from(snap);
            prev_frame = end;
        }

        let report = AoiReport {
            per_user_std_error: per_batch_user.iter().map(|b| std_error(b)).collect(),
            overall_std_error: std_error(&per_batch_overall),
            per_user_aoi,
            overall_aoi,
            frames_used: used,
            seed: cfg.seed,
            outcomes: self.outcomes,
        };
        Ok((report, self.log))
    }

    fn tdma_frame(&mut self, i: u64, start: f64, gains: &[(ChannelGain, ChannelGain)]) -> Result<()> {
        let (p, t) = (self.cfg.primary_snr, self.cfg.slot_duration);
        for (s, &(own, _)) in gains.iter().enumerate() {
            if model::primary_success(p, own, self.eps) {
                self.deliver(s, s, start + (s + 1) as f64 * t, self.reset_for(s))?;
                self.tally(s, i, Some(Opportunity::First));
            } else {
                self.tally(s, i, None);
            }
        }
        Ok(())
    }

    /// Generate-at-will CR-NOMA. U_m retries as overlay in slot m' of the same
    /// frame; U_{m'} retries as overlay in slot m of the next frame.
    fn noma_gaw_frame(
        &mut self,
        i: u64,
        start: f64,
        gains: &[(ChannelGain, ChannelGain)],
    ) -> Result<()> {
        let cfg = self.cfg;
        let (p, p_s, t) = (cfg.primary_snr, cfg.secondary_snr, cfg.slot_duration);
        let half = cfg.users / 2;
        let reset = t;
        for (s, &(own, other)) in gains.iter().enumerate() {
            let end = start + (s + 1) as f64 * t;
            let partner = self.states[s].pair_partner;

            // overlay retry of the partner, decoded first against the owner
            if self.states[partner].pending_retry {
                let cycle = self.states[partner].cycle_frame;
                self.states[partner].pending_retry = false;
                if model::secondary_capped_success(p_s, other, p, own, self.eps) {
                    self.deliver(partner, s, end, reset)?;
                    self.tally(partner, cycle, Some(Opportunity::Second));
                } else {
                    self.tally(partner, cycle, None);
                }
            }

            if model::primary_success(p, own, self.eps) {
                self.deliver(s, s, end, reset)?;
                self.tally(s, i, Some(Opportunity::First));
            } else {
                let st = &mut self.states[s];
                st.pending_retry = true;
                st.cycle_frame = i;
            }
        }
        debug_assert!(self.states[..half].iter().all(|st| !st.pending_retry));
        Ok(())
    }

    /// Generate-at-request CR-NOMA. Both pair members try in slot m (U_{m'} as
    /// overlay); whoever failed retries in slot m'. U_m's retry is capped only
    /// if U_{m'} also retransmits there.
    fn noma_gar_frame(
        &mut self,
        i: u64,
        start: f64,
        gains: &[(ChannelGain, ChannelGain)],
    ) -> Result<()> {
        let cfg = self.cfg;
        let (p, p_s, t) = (cfg.primary_snr, cfg.secondary_snr, cfg.slot_duration);
        let half = cfg.users / 2;
        for (s, &(own, other)) in gains.iter().enumerate() {
            let end = start + (s + 1) as f64 * t;
            let reset = self.reset_for(s);
            if s < half {
                let (m, mp) = (s, s + half);
                for u in [m, mp] {
                    let st = &mut self.states[u];
                    st.pending_update_birth = Some(start);
                    st.pending_retry = false;
                }
                if model::primary_success(p, own, self.eps) {
                    self.deliver(m, s, end, reset)?;
                    self.tally(m, i, Some(Opportunity::First));
                } else {
                    self.states[m].pending_retry = true;
                }
                if model::secondary_capped_success(p_s, other, p, own, self.eps) {
                    self.deliver(mp, s, end, reset)?;
                    self.tally(mp, i, Some(Opportunity::First));
                } else {
                    self.states[mp].pending_retry = true;
                }
            } else {
                let (m, mp) = (s - half, s);
                let owner_active = self.states[mp].pending_retry;
                if owner_active {
                    if model::primary_success(p, own, self.eps) {
                        self.deliver(mp, s, end, reset)?;
                        self.tally(mp, i, Some(Opportunity::Second));
                    } else {
                        self.tally(mp, i, None);
                    }
                }
                if self.states[m].pending_retry {
                    let ok = if owner_active {
                        model::secondary_capped_success(p_s, other, p, own, self.eps)
                    } else {
                        model::secondary_solo_success(p_s, other, self.eps)
                    };
                    if ok {
                        self.deliver(m, s, end, reset)?;
                        self.tally(m, i, Some(Opportunity::Second));
                    } else {
                        self.tally(m, i, None);
                    }
                }
                for u in [m, mp] {
                    let st = &mut self.states[u];
                    st.pending_retry = false;
                    st.pending_update_birth = None;
                }
            }
        }
        Ok(())
    }
}

/// Standard error of the mean of `samples` (sample standard deviation / √n).
fn std_error(samples: &[f64]) -> f64 {
    let n = samples.len();
    if n < 2 {
        return f64::NAN;
    }
    let mean = samples.iter().sum::<f64>() / n as f64;
    let var = samples.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
    (var / n as f64).sqrt()
}
