//! Generate-at-request: per-user AoI for M = 8, T = 0.5 s, R = 1. Users 1..4
//! own the first half of the frame, 5..8 the second half and are paired
//! with user k - 4 under CR-NOMA.
//!
//!     cargo run --release --example gar_fairness [snr_db]

use crnoma_aoi::analytic;
use crnoma_aoi::model::db_to_linear;
use crnoma_aoi::simulator;
use crnoma_aoi::{GenerationModel, Scheme, SystemConfig};

fn main() -> crnoma_aoi::Result<()> {
    let snr_db: f64 = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(0.0);
    let (users, slot, rate) = (8, 0.5, 1.0);
    let eps = 2f64.powf(rate) - 1.0;
    let p = db_to_linear(snr_db);

    let run = |scheme| {
        let c = SystemConfig::new(scheme, GenerationModel::AtRequest, users, slot, rate, snr_db).with_seed(3);
        simulator::run(&c)
    };
    let (tdma, noma) = (run(Scheme::Tdma)?, run(Scheme::CrNoma)?);

    println!("SNR {snr_db} dB");
    println!("{:>4} {:>9} {:>9} {:>9} {:>9}", "user", "TDMA", "sim", "CR-NOMA", "sim");
    for k in 1..=users {
        println!(
            "{k:>4} {:>9.4} {:>9.4} {:>9.4} {:>9.4}",
            analytic::tdma_gar_user_aoi(k, users, slot, eps, p)?,
            tdma.per_user_aoi[k - 1],
            analytic::crnoma_gar_user_aoi(k, users, slot, eps, p, p)?,
            noma.per_user_aoi[k - 1],
        );
    }
    let gap = |r: &simulator::AoiReport| r.per_user_aoi[4] - r.per_user_aoi[0];
    println!("user 5 minus user 1: TDMA {:.3}, CR-NOMA {:.3}", gap(&tdma), gap(&noma));
    println!("high-SNR gain of the second pair member: {:.3}", -analytic::gar_high_snr_gap(users, slot, eps));
    Ok(())
}
