//! Run the acceptance checks at the fast level and print every check.
//!
//!     cargo run --release --example validate [fast|full]

use crnoma_aoi::validation::{run_validation, Level};

fn main() -> crnoma_aoi::Result<()> {
    let level: Level = std::env::args().nth(1).as_deref().unwrap_or("fast").parse()?;
    let report = run_validation(level)?;
    print!("{report}");
    if !report.passed() {
        std::process::exit(1);
    }
    Ok(())
}
