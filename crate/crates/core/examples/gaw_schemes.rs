//! Generate-at-will: TDMA against CR-NOMA, closed form next to simulation,
//! across SNR for M = 8, T = 1.5 s, R = 1 bit/s/Hz.
//!
//!     cargo run --release --example gaw_schemes

use crnoma_aoi::analytic;
use crnoma_aoi::model::db_to_linear;
use crnoma_aoi::simulator;
use crnoma_aoi::{GenerationModel, Scheme, SystemConfig};

fn main() -> crnoma_aoi::Result<()> {
    let (users, slot, rate) = (8, 1.5, 1.0);
    let eps = 2f64.powf(rate) - 1.0;
    println!("{:>6} {:>10} {:>10} {:>10} {:>10}", "SNR", "TDMA", "sim", "CR-NOMA", "sim");
    for snr_db in [0.0, 5.0, 10.0, 20.0, 40.0] {
        let p = db_to_linear(snr_db);
        let tdma = analytic::tdma_gaw_aoi(users, slot, eps, p);
        let noma = analytic::crnoma_gaw_aoi(users, slot, eps, p, p)?;
        let sim = |scheme| {
            let c = SystemConfig::new(scheme, GenerationModel::AtWill, users, slot, rate, snr_db)
                .with_frames(100_000, 100)
                .with_seed(1);
            simulator::run(&c).map(|r| r.overall_aoi)
        };
        println!(
            "{snr_db:>6} {tdma:>10.4} {:>10.4} {noma:>10.4} {:>10.4}",
            sim(Scheme::Tdma)?,
            sim(Scheme::CrNoma)?
        );
    }
    println!("high-SNR limit T + MT/2 = {}", analytic::gaw_high_snr_aoi(users, slot));
    Ok(())
}
