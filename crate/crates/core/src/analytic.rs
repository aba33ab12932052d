//! Closed-form average AoI for TDMA and CR-NOMA under both data generation
//! models, together with the per-frame outcome probabilities they rest on.
//!
//! Throughout, `users` is the frame length M, `slot` the slot duration T in
//! seconds, `eps` the SINR threshold, and `p`/`p_s` the primary and secondary
//! linear SNRs. Users are paired as `(m, m + M/2)` for `1 <= m <= M/2`.
//!
//! The expressions are written out term by term rather than simplified, so
//! each can be audited against its derivation.

use crate::error::{Error, Result};

/// Per-frame outcome probabilities of one user: both opportunities fail,
/// success in the first opportunity, or failure then success in the second.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProbabilityPartition {
    pub p0: f64,
    pub p_first: f64,
    pub p_second: f64,
}

impl ProbabilityPartition {
    pub const PERFECT: ProbabilityPartition = ProbabilityPartition {
        p0: 0.0,
        p_first: 1.0,
        p_second: 0.0,
    };

    pub fn sum(&self) -> f64 {
        self.p0 + self.p_first + self.p_second
    }

    pub fn success(&self) -> f64 {
        self.p_first + self.p_second
    }

    pub fn as_array(&self) -> [f64; 3] {
        [self.p0, self.p_first, self.p_second]
    }
}

/// Auxiliary integral of the GAR analysis:
/// τ = (1 − e^{−(εP/P_S + 1) ε/P}) / (εP/P_S + 1).
///
/// `e^{-ε/P_S} τ` is the probability that the slot owner fails while the
/// overlay user, capped against it, succeeds.
pub fn tau(eps: f64, p: f64, p_s: f64) -> f64 {
    let c = eps * p / p_s + 1.0;
    -(-c * eps / p).exp_m1() / c
}

/// TDMA with generate-at-will: T + (MT/2)(2e^{ε/P} − 1).
pub fn tdma_gaw_aoi(users: usize, slot: f64, eps: f64, p: f64) -> f64 {
    let frame = users as f64 * slot;
    slot + frame / 2.0 * (2.0 * (eps / p).exp() - 1.0)
}

/// Mean excess age over the reset value for a user with i.i.d. per-frame
/// outcomes `(x, y, z)` = (fail, first, second) whose two opportunities sit
/// half a frame apart:
///
/// (MT/4) [2(y+z)²(1+x) + yz(1−x)²] / [(y+z)²(1−x)].
pub fn delta_kernel(x: f64, y: f64, z: f64, users: usize, slot: f64) -> Result<f64> {
    let s = y + z;
    if s <= 0.0 || x >= 1.0 {
        return Err(Error::NeverDelivers);
    }
    let frame = users as f64 * slot;
    let num = 2.0 * s * s * (1.0 + x) + y * z * (1.0 - x) * (1.0 - x);
    let den = s * s * (1.0 - x);
    Ok(frame / 4.0 * num / den)
}

fn kernel_of(part: &ProbabilityPartition, users: usize, slot: f64) -> Result<f64> {
    delta_kernel(part.p0, part.p_first, part.p_second, users, slot)
}

/// Generate-at-will partition of user m: `p_first` = p_m, `p_second` = p_{m'}.
///
/// p_m is taken as e^{−ε/P_S} verbatim. The slot-m attempt is actually made
/// at power P, so this matches the protocol only when P = P_S.
pub fn gaw_partition(eps: f64, p: f64, p_s: f64) -> ProbabilityPartition {
    let e_s = (-eps / p_s).exp();
    let capped = e_s / (1.0 + p * eps / p_s);
    ProbabilityPartition {
        p0: (1.0 - e_s) * (1.0 - capped),
        p_first: e_s,
        p_second: (1.0 - e_s) * capped,
    }
}

/// Normalized overall AoI of CR-NOMA with generate-at-will.
pub fn crnoma_gaw_aoi(users: usize, slot: f64, eps: f64, p: f64, p_s: f64) -> Result<f64> {
    Ok(slot + kernel_of(&gaw_partition(eps, p, p_s), users, slot)?)
}

/// High-SNR limit shared by TDMA and CR-NOMA under generate-at-will.
pub fn gaw_high_snr_aoi(users: usize, slot: f64) -> f64 {
    slot + users as f64 * slot / 2.0
}

/// TDMA with generate-at-request for the user owning slot `k` (1-based):
/// kT + (MT/2)(2e^{ε/P} − 1).
pub fn tdma_gar_user_aoi(k: usize, users: usize, slot: f64, eps: f64, p: f64) -> Result<f64> {
    if k == 0 || k > users {
        return Err(Error::UserOutOfRange { index: k, users });
    }
    let frame = users as f64 * slot;
    Ok(k as f64 * slot + frame / 2.0 * (2.0 * (eps / p).exp() - 1.0))
}

/// Mean over all users of [`tdma_gar_user_aoi`]: T(M+1)/2 + (MT/2)(2e^{ε/P} − 1).
pub fn tdma_gar_overall(users: usize, slot: f64, eps: f64, p: f64) -> f64 {
    let frame = users as f64 * slot;
    slot * (users as f64 + 1.0) / 2.0 + frame / 2.0 * (2.0 * (eps / p).exp() - 1.0)
}

/// Generate-at-request partition of the first user of a pair, U_m:
/// (p_{0m}, p_{mm}, p_{m'm}).
pub fn gar_partition_user_m(eps: f64, p: f64, p_s: f64) -> ProbabilityPartition {
    let t = tau(eps, p, p_s);
    let e_s = (-eps / p_s).exp();
    let e_p = (-eps / p).exp();
    let capped = e_s / (1.0 + p * eps / p_s);
    // U_m fails in slot m while U_{m'} also fails there
    let both_fail_first = 1.0 - e_p - e_s * t;
    ProbabilityPartition {
        p0: both_fail_first * (1.0 - capped) + e_s * t * (1.0 - e_s),
        p_first: e_s,
        p_second: both_fail_first * capped + (-2.0 * eps / p_s).exp() * t,
    }
}

/// Generate-at-request partition of the second user of a pair, U_{m'}:
/// (p_{0m'}, p_{mm'}, p_{m'm'}).
pub fn gar_partition_user_mprime(eps: f64, p: f64, p_s: f64) -> ProbabilityPartition {
    let e_p = (-eps / p).exp();
    let first = (-eps / p_s).exp() / (1.0 + eps * p / p_s);
    ProbabilityPartition {
        p0: (1.0 - first) * (1.0 - e_p),
        p_first: first,
        p_second: (1.0 - first) * e_p,
    }
}

/// Reset-age term Δ_{k,0} of the generate-at-request analysis, kept in its
/// original two-bracket form including the (1−p0)²/(p_first+p_second)²
/// prefactor. `m` and `m_prime` are the 1-based slots of the two
/// opportunities.
pub fn delta_k0(m: usize, m_prime: usize, slot: f64, part: &ProbabilityPartition) -> Result<f64> {
    let s = part.success();
    let fail = 1.0 - part.p0;
    if s <= 0.0 || fail <= 0.0 {
        return Err(Error::NeverDelivers);
    }
    let (pa, pb) = (part.p_first, part.p_second);
    let first = m as f64 * slot * pa;
    let second = m_prime as f64 * slot * pb;
    let prefactor = fail * fail / (s * s);
    let bracket_first = s * first / (fail * fail) + pb / 2.0 * first / fail;
    let bracket_second = s * second / (fail * fail) - pa / 2.0 * second / fail;
    Ok(prefactor * (bracket_first + bracket_second))
}

/// Which member of a pair a GAR user is.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PairRole {
    /// U_m, owner of slot m in the first half of the frame.
    First,
    /// U_{m'}, owner of slot m' = m + M/2.
    Second,
}

/// Pair index m (1-based, ≤ M/2) and role of user `k`.
pub fn pair_of(k: usize, users: usize) -> Result<(usize, PairRole)> {
    if k == 0 || k > users || !users.is_multiple_of(2) {
        return Err(Error::UserOutOfRange { index: k, users });
    }
    let half = users / 2;
    Ok(if k <= half { (k, PairRole::First) } else { (k - half, PairRole::Second) })
}

/// Average AoI of user `k` under CR-NOMA with generate-at-request.
pub fn crnoma_gar_user_aoi(
    k: usize,
    users: usize,
    slot: f64,
    eps: f64,
    p: f64,
    p_s: f64,
) -> Result<f64> {
    let (m, role) = pair_of(k, users)?;
    let part = match role {
        PairRole::First => gar_partition_user_m(eps, p, p_s),
        PairRole::Second => gar_partition_user_mprime(eps, p, p_s),
    };
    Ok(delta_k0(m, m + users / 2, slot, &part)? + kernel_of(&part, users, slot)?)
}

/// Normalized overall AoI of CR-NOMA with generate-at-request.
pub fn crnoma_gar_overall(users: usize, slot: f64, eps: f64, p: f64, p_s: f64) -> Result<f64> {
    if users < 2 || !users.is_multiple_of(2) {
        return Err(Error::Config(format!("user count must be even, got {users}")));
    }
    let mut total = 0.0;
    for k in 1..=users {
        total += crnoma_gar_user_aoi(k, users, slot, eps, p, p_s)?;
    }
    Ok(total / users as f64)
}

/// High-SNR AoI advantage of CR-NOMA over TDMA for the second user of each
/// pair, −MT / (2(1+ε)).
pub fn gar_high_snr_gap(users: usize, slot: f64, eps: f64) -> f64 {
    -(users as f64 * slot) / (2.0 * (1.0 + eps))
}

/// High-SNR approximation of U_{m'}'s CR-NOMA AoI, (mT + m'Tε)/(1+ε) + MT/2.
pub fn gar_high_snr_second_user_aoi(m: usize, users: usize, slot: f64, eps: f64) -> f64 {
    let m_prime = m + users / 2;
    (m as f64 * slot + m_prime as f64 * slot * eps) / (1.0 + eps) + users as f64 * slot / 2.0
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    /// Independent renewal-reward oracle: stationary mean age of a user with
    /// i.i.d. frame outcomes, enumerating (previous slot, next slot, frames
    /// elapsed) directly. Offsets and reset ages are in seconds.
    fn renewal_enumeration(
        part: &ProbabilityPartition,
        offsets: [f64; 2],
        resets: [f64; 2],
        frame: f64,
    ) -> f64 {
        let weights = [part.p_first, part.p_second];
        let s = part.success();
        let (mut num, mut den) = (0.0, 0.0);
        for prev in 0..2 {
            for next in 0..2 {
                let mut geo = weights[prev] / s * weights[next];
                for k in 1..20_000 {
                    if geo < 1e-300 {
                        break;
                    }
                    let y = k as f64 * frame + offsets[next] - offsets[prev];
                    num += geo * (resets[prev] * y + y * y / 2.0);
                    den += geo * y;
                    geo *= part.p0;
                }
            }
        }
        num / den
    }

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn tdma_gaw_values() {
        let e = 1f64.exp();
        assert!(close(tdma_gaw_aoi(8, 1.5, 1.0, 1.0), 1.5 + 6.0 * (2.0 * e - 1.0), 1e-12));
        assert!(close(tdma_gaw_aoi(8, 1.5, 1.0, 1.0), 28.119_381_941_508_54, 1e-10));
        assert!(close(tdma_gaw_aoi(8, 1.5, 0.0, 3.0), 7.5, 1e-15));
        assert!(close(tdma_gaw_aoi(2, 1.0, 1.0, 1e6), 2.000_002, 1e-8));
    }

    #[test]
    fn kernel_values() {
        assert!(close(delta_kernel(0.0, 1.0, 0.0, 8, 1.5).unwrap(), 6.0, 1e-15));
        let g = gaw_partition(1.0, 1.0, 1.0);
        let k = delta_kernel(g.p0, g.p_first, g.p_second, 8, 1.5).unwrap();
        assert!(close(k, 19.050_674_877_205_09, 1e-9), "{k}");
        assert!(matches!(delta_kernel(1.0, 0.0, 0.0, 8, 1.5), Err(Error::NeverDelivers)));
    }

    #[test]
    fn gaw_partition_values() {
        assert_eq!(gaw_partition(0.0, 1.0, 1.0), ProbabilityPartition::PERFECT);
        let g = gaw_partition(1.0, 1.0, 1.0);
        assert!(close(g.p0, 0.515_848_479_861_142_9, 1e-12));
        assert!(close(g.p_first, 0.367_879_441_171_442_3, 1e-12));
        assert!(close(g.p_second, 0.116_272_078_967_414_8, 1e-12));
    }

    #[test]
    fn crnoma_gaw_values() {
        let v = crnoma_gaw_aoi(8, 1.5, 1.0, 1.0, 1.0).unwrap();
        assert!(close(v, 20.550_674_877_205_09, 1e-9), "{v}");
        assert!(close(crnoma_gaw_aoi(8, 1.5, 0.0, 1.0, 1.0).unwrap(), 7.5, 1e-12));
        assert!(close(crnoma_gaw_aoi(8, 1.5, 1.0, 1e4, 1e4).unwrap(), 7.5, 0.01));
        assert_eq!(gaw_high_snr_aoi(8, 1.5), 7.5);
        assert_eq!(gaw_high_snr_aoi(2, 1.0), 2.0);
        let hi = crnoma_gaw_aoi(8, 1.5, 1.0, 1e5, 1e5).unwrap();
        assert!((hi - 7.5).abs() / 7.5 < 1e-3);
    }

    #[test]
    fn crnoma_gaw_matches_enumeration() {
        // user m: opportunities at the ends of slots m and m + M/2, reset to T
        for &(eps, snr) in &[(1.0, 1.0), (0.414, 0.5), (1.828, 3.0), (3.0, 10.0)] {
            let part = gaw_partition(eps, snr, snr);
            let oracle = renewal_enumeration(&part, [1.5, 7.5], [1.5, 1.5], 12.0);
            let closed = crnoma_gaw_aoi(8, 1.5, eps, snr, snr).unwrap();
            assert!((closed - oracle).abs() / oracle < 1e-10, "{closed} vs {oracle}");
        }
    }

    #[test]
    fn tdma_gar_values() {
        let v = tdma_gar_user_aoi(5, 8, 0.5, 1.0, 1.0).unwrap();
        assert!(close(v, 11.373_127_313_836_18, 1e-10));
        assert!(close(tdma_gar_user_aoi(5, 8, 0.5, 0.0, 1.0).unwrap(), 4.5, 1e-15));
        for &p in &[0.3, 1.0, 100.0] {
            let gap = tdma_gar_user_aoi(5, 8, 0.5, 1.0, p).unwrap()
                - tdma_gar_user_aoi(1, 8, 0.5, 1.0, p).unwrap();
            assert!(close(gap, 2.0, 1e-12));
        }
        assert!(tdma_gar_user_aoi(0, 8, 0.5, 1.0, 1.0).is_err());
        assert!(tdma_gar_user_aoi(9, 8, 0.5, 1.0, 1.0).is_err());
        let mean: f64 = (1..=8)
            .map(|k| tdma_gar_user_aoi(k, 8, 0.5, 1.0, 2.0).unwrap())
            .sum::<f64>()
            / 8.0;
        assert!(close(mean, tdma_gar_overall(8, 0.5, 1.0, 2.0), 1e-12));
    }

    #[test]
    fn verbatim_user_m_partition_needs_equal_powers() {
        // p_mm = e^{-ε/P_S} while the slot-m attempt is at power P; the
        // three terms then sum to 1 − e^{-ε/P} + e^{-ε/P_S}
        let part = gar_partition_user_m(1.0, 2.0, 1.0);
        let expect = 1.0 - (-0.5f64).exp() + (-1.0f64).exp();
        assert!((part.sum() - expect).abs() < 1e-12);
    }

    #[test]
    fn gar_partition_values() {
        assert!(close(tau(1.0, 1.0, 1.0), 0.432_332_358_381_693_65, 1e-12));
        let um = gar_partition_user_m(1.0, 1.0, 1.0);
        assert!(close(um.p0, 0.486_593_568_774_173_2, 1e-12));
        assert!(close(um.p_first, 0.367_879_441_171_442_3, 1e-12));
        assert!(close(um.p_second, 0.145_526_990_054_384_4, 1e-12));
        let ump = gar_partition_user_mprime(1.0, 1.0, 1.0);
        assert!(close(ump.p0, 0.515_848_479_861_142_9, 1e-12));
        assert!(close(ump.p_first, 0.183_939_720_585_721_16, 1e-12));
        assert!(close(ump.p_second, 0.300_211_799_553_136, 1e-12));
        assert_eq!(gar_partition_user_m(0.0, 1.0, 1.0), ProbabilityPartition::PERFECT);
        assert_eq!(gar_partition_user_mprime(0.0, 1.0, 1.0), ProbabilityPartition::PERFECT);
    }

    #[test]
    fn delta_k0_values() {
        assert!(close(delta_k0(1, 5, 0.5, &ProbabilityPartition::PERFECT).unwrap(), 0.5, 1e-15));
        let ump = gar_partition_user_mprime(1.0, 1.0, 1.0);
        let d = delta_k0(1, 5, 0.5, &ump).unwrap();
        assert!(close(d, 1.626_099_375_715_199, 1e-10), "{d}");
        let bad = ProbabilityPartition { p0: 1.0, p_first: 0.0, p_second: 0.0 };
        assert!(delta_k0(1, 5, 0.5, &bad).is_err());
    }

    #[test]
    fn crnoma_gar_values() {
        let v = crnoma_gar_user_aoi(5, 8, 0.5, 1.0, 1.0, 1.0).unwrap();
        assert!(close(v, 8.002_032_747_489_56, 1e-9), "{v}");
        let v = crnoma_gar_user_aoi(1, 8, 0.5, 1.0, 1.0, 1.0).unwrap();
        assert!(close(v, 6.858_005_897_712_075, 1e-9), "{v}");
        assert!(close(crnoma_gar_user_aoi(3, 8, 0.5, 0.0, 1.0, 1.0).unwrap(), 1.5 + 2.0, 1e-12));
        let hi = crnoma_gar_user_aoi(5, 8, 0.5, 1.0, 1e4, 1e4).unwrap();
        assert!(close(hi, 3.5, 0.01), "{hi}");
        assert!(close(gar_high_snr_second_user_aoi(1, 8, 0.5, 1.0), 3.5, 1e-15));
        assert!(close(crnoma_gar_overall(2, 1.0, 0.0, 1.0, 1.0).unwrap(), 2.0, 1e-15));
        assert!(crnoma_gar_overall(7, 1.0, 1.0, 1.0, 1.0).is_err());
        let mean: f64 = (1..=8)
            .map(|k| crnoma_gar_user_aoi(k, 8, 0.5, 1.0, 1.0, 1.0).unwrap())
            .sum::<f64>()
            / 8.0;
        assert!(close(crnoma_gar_overall(8, 0.5, 1.0, 1.0, 1.0).unwrap(), mean, 1e-12));
    }

    #[test]
    fn crnoma_gar_matches_enumeration() {
        let (users, slot) = (8usize, 0.5);
        let frame = users as f64 * slot;
        for &(eps, p, p_s) in &[(1.0, 1.0, 1.0), (0.414, 0.5, 2.0), (3.0, 10.0, 4.0)] {
            for k in 1..=users {
                let (m, role) = pair_of(k, users).unwrap();
                let part = match role {
                    PairRole::First => gar_partition_user_m(eps, p, p_s),
                    PairRole::Second => gar_partition_user_mprime(eps, p, p_s),
                };
                let t = [m as f64 * slot, (m + users / 2) as f64 * slot];
                let oracle = renewal_enumeration(&part, t, t, frame);
                let closed = crnoma_gar_user_aoi(k, users, slot, eps, p, p_s).unwrap();
                assert!((closed - oracle).abs() / oracle < 1e-10, "k={k}: {closed} vs {oracle}");
            }
        }
    }

    #[test]
    fn high_snr_gap() {
        assert_eq!(gar_high_snr_gap(8, 0.5, 1.0), -1.0);
        assert!(gar_high_snr_gap(8, 0.5, 1e12).abs() < 1e-10);
        let tdma = tdma_gar_user_aoi(5, 8, 0.5, 1.0, 1e5).unwrap();
        let noma = crnoma_gar_user_aoi(5, 8, 0.5, 1.0, 1e5, 1e5).unwrap();
        let predicted = tdma + gar_high_snr_gap(8, 0.5, 1.0);
        assert!((noma - predicted).abs() / noma < 5e-3);
    }

    #[test]
    fn high_snr_limits() {
        let (users, slot, eps, snr) = (8, 0.5, 1.0, 1e5);
        let gaw = crnoma_gaw_aoi(users, slot, eps, snr, snr).unwrap();
        assert!((gaw - gaw_high_snr_aoi(users, slot)).abs() / gaw < 1e-3);
        for m in 1..=users / 2 {
            let v = crnoma_gar_user_aoi(m, users, slot, eps, snr, snr).unwrap();
            let lim = m as f64 * slot + users as f64 * slot / 2.0;
            assert!((v - lim).abs() / lim < 1e-3, "m={m}: {v} vs {lim}");
        }
    }

    #[test]
    fn gar_fairness_gap() {
        let (users, slot, eps, snr) = (8, 0.5, 1.0, 1e4);
        let gap = crnoma_gar_user_aoi(5, users, slot, eps, snr, snr).unwrap()
            - crnoma_gar_user_aoi(1, users, slot, eps, snr, snr).unwrap();
        assert!((gap - 1.0).abs() < 0.01, "{gap}");
        let tdma_gap = tdma_gar_user_aoi(5, users, slot, eps, snr).unwrap()
            - tdma_gar_user_aoi(1, users, slot, eps, snr).unwrap();
        assert!(close(tdma_gap, 2.0, 1e-12));
    }

    #[test]
    fn tdma_gaw_monotone() {
        let grid = [0.1, 0.5, 1.0, 2.0, 5.0];
        for w in grid.windows(2) {
            assert!(tdma_gaw_aoi(8, 1.0, w[1], 1.0) > tdma_gaw_aoi(8, 1.0, w[0], 1.0));
            assert!(tdma_gaw_aoi(8, 1.0, 1.0, w[1]) < tdma_gaw_aoi(8, 1.0, 1.0, w[0]));
        }
        assert!(tdma_gaw_aoi(10, 1.0, 1.0, 1.0) > tdma_gaw_aoi(8, 1.0, 1.0, 1.0));
    }

    proptest! {
        #[test]
        fn partitions_sum_to_one(eps in 0.0f64..5.0, p in 0.5f64..1e4, p_s in 0.5f64..1e4) {
            // U_m's verbatim p_mm uses P_S, so its identity needs P = P_S
            let parts = [
                gaw_partition(eps, p, p_s),
                gar_partition_user_mprime(eps, p, p_s),
                gar_partition_user_m(eps, p, p),
                gar_partition_user_m(eps, p_s, p_s),
            ];
            for part in parts {
                prop_assert!((part.sum() - 1.0).abs() < 1e-12, "{:?}", part);
                for v in part.as_array() {
                    prop_assert!((-1e-15..=1.0 + 1e-15).contains(&v), "{:?}", part);
                }
            }
            let t = tau(eps, p, p_s);
            prop_assert!((0.0..=1.0).contains(&t));
            prop_assert!(t <= eps / p + 1e-15);
        }

        #[test]
        fn kernel_is_symmetric(a in 0.01f64..1.0, b in 0.0f64..1.0, c in 0.0f64..1.0) {
            let total = a + b + c;
            let (x, y, z) = (b / total, a / total, c / total);
            let k1 = delta_kernel(x, y, z, 8, 0.5).unwrap();
            let k2 = delta_kernel(x, z, y, 8, 0.5).unwrap();
            prop_assert!((k1 - k2).abs() <= 1e-12 * k1.max(1.0));
        }

        #[test]
        fn k0_prefactor_is_unity(eps in 0.0f64..5.0, p in 0.5f64..1e3, p_s in 0.5f64..1e3) {
            for part in [gar_partition_user_m(eps, p, p), gar_partition_user_mprime(eps, p, p_s)] {
                let pre = (1.0 - part.p0).powi(2) / part.success().powi(2);
                prop_assert!((pre - 1.0).abs() < 1e-12);
            }
        }

        #[test]
        fn crnoma_gaw_never_worse(eps in 0.01f64..8.0, snr_db in -5.0f64..40.0) {
            let snr = crate::model::db_to_linear(snr_db);
            let noma = crnoma_gaw_aoi(8, 1.0, eps, snr, snr).unwrap();
            let tdma = tdma_gaw_aoi(8, 1.0, eps, snr);
            prop_assert!(noma <= tdma * (1.0 + 1e-12));
        }
    }
}
