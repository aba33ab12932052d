//! Physical-layer primitives shared by every protocol: the SINR threshold,
//! Rayleigh block-fading draws and the three decoding predicates.
//!
//! Powers are linear SNRs (noise normalized to one). Decoding succeeds when
//! the instantaneous Shannon rate reaches the target rate `R`; equality counts
//! as success.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

/// Random stream used throughout the crate. ChaCha8 is portable, so a seed
/// reproduces the same run on every platform.
pub type SimRng = ChaCha8Rng;

pub fn rng_from_seed(seed: u64) -> SimRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Seed for the `index`-th independent run derived from a base seed.
///
/// The index is spread with the 64-bit golden-ratio constant before being
/// XORed in, so neighbouring indices land far apart in seed space.
pub fn split_seed(seed: u64, index: u64) -> u64 {
    seed ^ index.wrapping_mul(0x9E37_79B9_7F4A_7C15)
}

/// Multiple-access scheme.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Scheme {
    Tdma,
    CrNoma,
}

impl Scheme {
    pub fn as_str(self) -> &'static str {
        match self {
            Scheme::Tdma => "TDMA",
            Scheme::CrNoma => "CR-NOMA",
        }
    }
}

impl std::str::FromStr for Scheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "tdma" => Ok(Scheme::Tdma),
            "cr-noma" | "crnoma" | "noma" => Ok(Scheme::CrNoma),
            other => Err(Error::Config(format!("unknown scheme `{other}`"))),
        }
    }
}

/// When users generate the updates they transmit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum GenerationModel {
    /// A fresh update right before every transmission attempt.
    AtWill,
    /// One update per frame, generated at the frame start.
    AtRequest,
}

impl GenerationModel {
    pub fn as_str(self) -> &'static str {
        match self {
            GenerationModel::AtWill => "GAW",
            GenerationModel::AtRequest => "GAR",
        }
    }
}

impl std::str::FromStr for GenerationModel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "gaw" | "at-will" => Ok(GenerationModel::AtWill),
            "gar" | "at-request" => Ok(GenerationModel::AtRequest),
            other => Err(Error::Config(format!("unknown generation model `{other}`"))),
        }
    }
}

/// Every physical and protocol parameter of one simulation run.
#[derive(Debug, Clone, PartialEq)]
pub struct SystemConfig {
    /// Number of users, equal to the number of slots per frame.
    pub users: usize,
    /// Slot duration in seconds.
    pub slot_duration: f64,
    /// Target rate N/T in bits/s/Hz, non-negative.
    pub rate: f64,
    /// Primary transmit SNR, linear.
    pub primary_snr: f64,
    /// Secondary transmit SNR, linear.
    pub secondary_snr: f64,
    pub scheme: Scheme,
    pub generation: GenerationModel,
    /// Total simulated frames, warm-up included.
    pub frames: u64,
    pub warmup_frames: u64,
    pub seed: u64,
}

impl SystemConfig {
    pub const DEFAULT_FRAMES: u64 = 200_000;
    pub const DEFAULT_WARMUP: u64 = 100;

    /// Configuration with `P = P^S = snr_db` and the default horizon.
    pub fn new(
        scheme: Scheme,
        generation: GenerationModel,
        users: usize,
        slot_duration: f64,
        rate: f64,
        snr_db: f64,
    ) -> Self {
        let snr = db_to_linear(snr_db);
        SystemConfig {
            users,
            slot_duration,
            rate,
            primary_snr: snr,
            secondary_snr: snr,
            scheme,
            generation,
            frames: Self::DEFAULT_FRAMES,
            warmup_frames: Self::DEFAULT_WARMUP,
            seed: 0,
        }
    }

    pub fn with_frames(mut self, frames: u64, warmup_frames: u64) -> Self {
        self.frames = frames;
        self.warmup_frames = warmup_frames;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let fail = |msg: String| Err(Error::Config(msg));
        if self.users < 2 || !self.users.is_multiple_of(2) {
            return fail(format!("user count must be even and at least 2, got {}", self.users));
        }
        if !(self.slot_duration > 0.0 && self.slot_duration.is_finite()) {
            return fail(format!("slot duration must be positive, got {}", self.slot_duration));
        }
        // R = 0 is accepted: every attempt succeeds, giving the error-free sawtooth
        if !(self.rate >= 0.0 && self.rate.is_finite()) {
            return fail(format!("rate must be non-negative, got {}", self.rate));
        }
        if !(self.primary_snr > 0.0 && self.primary_snr.is_finite()) {
            return fail(format!("primary SNR must be positive, got {}", self.primary_snr));
        }
        if !(self.secondary_snr > 0.0 && self.secondary_snr.is_finite()) {
            return fail(format!("secondary SNR must be positive, got {}", self.secondary_snr));
        }
        if self.frames <= self.warmup_frames {
            return fail(format!(
                "frames ({}) must exceed warm-up frames ({})",
                self.frames, self.warmup_frames
            ));
        }
        Ok(())
    }

    pub fn threshold(&self) -> Threshold {
        // validate() guarantees rate >= 0
        epsilon_of(self.rate).unwrap_or(Threshold(0.0))
    }

    pub fn frame_duration(&self) -> f64 {
        self.users as f64 * self.slot_duration
    }
}

/// Squared magnitude |h|² of a unit-variance Rayleigh channel.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct ChannelGain(pub f64);

/// SINR threshold ε = 2^R − 1 a slot must reach to carry one update.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct Threshold(pub f64);

impl Threshold {
    pub fn value(self) -> f64 {
        self.0
    }
}

pub fn epsilon_of(rate: f64) -> Result<Threshold> {
    if rate.is_nan() || rate < 0.0 {
        return Err(Error::NegativeRate(rate));
    }
    Ok(Threshold(rate.exp2() - 1.0))
}

/// Exp(1) sample by inversion of a uniform `u` in [0, 1).
pub fn gain_from_uniform(u: f64) -> ChannelGain {
    ChannelGain(-(-u).ln_1p())
}

pub fn draw_gain<R: Rng + ?Sized>(rng: &mut R) -> ChannelGain {
    gain_from_uniform(rng.gen::<f64>())
}

/// The slot owner decodes interference-free: log2(1 + P g) ≥ R.
pub fn primary_success(primary_snr: f64, gain: ChannelGain, eps: Threshold) -> bool {
    primary_snr * gain.0 >= eps.0
}

/// Overlay user decoded first in SIC, treating the primary as noise. Its rate
/// is capped at log2(1 + P_S g_s / (P g_p + 1)), which leaves the primary
/// untouched.
pub fn secondary_capped_success(
    secondary_snr: f64,
    secondary_gain: ChannelGain,
    primary_snr: f64,
    primary_gain: ChannelGain,
    eps: Threshold,
) -> bool {
    secondary_snr * secondary_gain.0 >= eps.0 * (primary_snr * primary_gain.0 + 1.0)
}

/// Overlay user in a slot whose owner stays silent.
pub fn secondary_solo_success(secondary_snr: f64, gain: ChannelGain, eps: Threshold) -> bool {
    secondary_snr * gain.0 >= eps.0
}

pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const DRAWS: usize = 1_000_000;

    fn rate_of<F: FnMut(&mut SimRng) -> bool>(seed: u64, mut trial: F) -> f64 {
        let mut rng = rng_from_seed(seed);
        (0..DRAWS).filter(|_| trial(&mut rng)).count() as f64 / DRAWS as f64
    }

    #[test]
    fn threshold_values() {
        assert_eq!(epsilon_of(1.0).unwrap().value(), 1.0);
        assert_eq!(epsilon_of(0.0).unwrap().value(), 0.0);
        assert!((epsilon_of(1.5).unwrap().value() - 1.828_427_124_746_19).abs() < 1e-15);
        assert!(matches!(epsilon_of(-0.1), Err(Error::NegativeRate(_))));
    }

    #[test]
    fn inversion_at_median() {
        assert!((gain_from_uniform(0.5).0 - std::f64::consts::LN_2).abs() < 1e-15);
        assert_eq!(gain_from_uniform(0.0).0, 0.0);
    }

    #[test]
    fn gain_moments() {
        let mut rng = rng_from_seed(11);
        let mut sum = 0.0;
        let mut below_one = 0usize;
        for _ in 0..DRAWS {
            let g = draw_gain(&mut rng).0;
            assert!(g >= 0.0);
            sum += g;
            below_one += usize::from(g <= 1.0);
        }
        let mean = sum / DRAWS as f64;
        assert!((mean - 1.0).abs() < 0.003, "mean {mean}");
        let cdf = below_one as f64 / DRAWS as f64;
        assert!((cdf - (1.0 - (-1.0f64).exp())).abs() < 0.002, "cdf {cdf}");
    }

    #[test]
    fn predicate_boundaries() {
        let eps = Threshold(1.0);
        assert!(primary_success(1.0, ChannelGain(1.0), eps));
        assert!(!primary_success(1.0, ChannelGain(0.5), eps));
        assert!(secondary_capped_success(1.0, ChannelGain(2.0), 1.0, ChannelGain(1.0), eps));
        assert!(secondary_solo_success(2.0, ChannelGain(1.0), eps));
        assert!(!secondary_solo_success(1.0, ChannelGain(0.99), eps));
    }

    #[test]
    fn predicate_success_rates() {
        let eps = Threshold(1.0);
        let e1 = (-1.0f64).exp();

        let p = rate_of(1, |r| primary_success(1.0, draw_gain(r), eps));
        assert!((p - e1).abs() < 0.0015, "primary {p}");

        let p = rate_of(2, |r| secondary_solo_success(1.0, draw_gain(r), eps));
        assert!((p - e1).abs() < 0.0015, "solo {p}");

        // e^{-ε/P_S} / (1 + εP/P_S)
        let p = rate_of(3, |r| {
            let gs = draw_gain(r);
            let gp = draw_gain(r);
            secondary_capped_success(1.0, gs, 1.0, gp, eps)
        });
        assert!((p - e1 / 2.0).abs() < 0.0012, "capped {p}");
    }

    #[test]
    fn decibels() {
        assert_eq!(db_to_linear(0.0), 1.0);
        assert!((db_to_linear(10.0) - 10.0).abs() < 1e-12);
        assert!((db_to_linear(3.0) - 1.995_262_314_968_879_5).abs() < 1e-12);
    }

    #[test]
    fn seeded_streams_repeat() {
        let a: Vec<f64> = {
            let mut r = rng_from_seed(42);
            (0..32).map(|_| draw_gain(&mut r).0).collect()
        };
        let b: Vec<f64> = {
            let mut r = rng_from_seed(42);
            (0..32).map(|_| draw_gain(&mut r).0).collect()
        };
        assert_eq!(a, b);
        assert_ne!(split_seed(42, 1), split_seed(42, 2));
        assert_eq!(split_seed(42, 0), 42);
    }

    #[test]
    fn config_validation() {
        let ok = SystemConfig::new(Scheme::Tdma, GenerationModel::AtWill, 8, 1.5, 1.0, 0.0);
        ok.validate().unwrap();
        let mut odd = ok.clone();
        odd.users = 7;
        assert!(odd.validate().is_err());
        let short = ok.clone().with_frames(10, 10);
        assert!(short.validate().is_err());
        let mut slot = ok;
        slot.slot_duration = 0.0;
        assert!(slot.validate().is_err());
    }

    proptest! {
        #[test]
        fn capped_reduces_to_solo(ps in 0.01f64..100.0, g in 0.0f64..10.0, p in 0.01f64..100.0, eps in 0.0f64..10.0) {
            let eps = Threshold(eps);
            prop_assert_eq!(
                secondary_capped_success(ps, ChannelGain(g), p, ChannelGain(0.0), eps),
                secondary_solo_success(ps, ChannelGain(g), eps)
            );
        }

        #[test]
        fn capped_is_monotone(
            ps in 0.01f64..100.0, gs in 0.0f64..10.0, p in 0.01f64..100.0,
            gp in 0.0f64..10.0, eps in 0.0f64..10.0, bump in 0.0f64..5.0,
        ) {
            let base = secondary_capped_success(ps, ChannelGain(gs), p, ChannelGain(gp), Threshold(eps));
            if base {
                prop_assert!(secondary_capped_success(ps, ChannelGain(gs + bump), p, ChannelGain(gp), Threshold(eps)));
                prop_assert!(secondary_capped_success(ps + bump, ChannelGain(gs), p, ChannelGain(gp), Threshold(eps)));
            } else {
                prop_assert!(!secondary_capped_success(ps, ChannelGain(gs), p, ChannelGain(gp + bump), Threshold(eps)));
                prop_assert!(!secondary_capped_success(ps, ChannelGain(gs), p + bump, ChannelGain(gp), Threshold(eps)));
                prop_assert!(!secondary_capped_success(ps, ChannelGain(gs), p, ChannelGain(gp), Threshold(eps + bump)));
            }
        }
    }
}
