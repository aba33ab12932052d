//! Write a simulator delivery log, read it back and recompute the average
//! age from its renewal intervals.
//!
//!     cargo run --release --example delivery_log [path]

use crnoma_aoi::oracle::renewal_aoi;
use crnoma_aoi::simulator::{self, EventLog};
use crnoma_aoi::{GenerationModel, Scheme, SystemConfig};

fn main() -> crnoma_aoi::Result<()> {
    let path = std::env::args().nth(1).unwrap_or_else(|| "deliveries.log".into());
    let config = SystemConfig::new(Scheme::CrNoma, GenerationModel::AtRequest, 4, 0.5, 1.0, 5.0)
        .with_frames(10_000, 100)
        .with_seed(8);
    let (report, log) = simulator::run_with_log(&config)?;
    std::fs::write(&path, log.to_text())?;

    let parsed: EventLog = std::fs::read_to_string(&path)?.parse()?;
    let renewal = renewal_aoi(&parsed)?;
    println!("{} deliveries written to {path}", parsed.records.len());
    for (k, (sim, ren)) in report.per_user_aoi.iter().zip(&renewal).enumerate() {
        println!("user {}: simulator {sim:.9}, renewal {ren:.9}, diff {:.1e}", k + 1, (sim - ren).abs());
    }
    for r in parsed.for_user(1).take(5) {
        println!("  t={:<8} slot {} reset age {}", r.time, r.slot, r.reset_age);
    }
    Ok(())
}
