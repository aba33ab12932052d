//! Sweep a figure preset and print its CSV. Closed forms only unless
//! `--sim` is given.
//!
//!     cargo run --release --example figure_sweep fig6a --sim

use crnoma_aoi::experiment::{run_experiment, ExperimentSpec, Outputs, Preset};

fn main() -> crnoma_aoi::Result<()> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let preset: Preset = args.first().map(String::as_str).unwrap_or("fig4b").parse()?;
    let mut spec = ExperimentSpec::preset(preset);
    if args.iter().any(|a| a == "--sim") {
        spec.frames = 50_000;
    } else {
        spec.outputs = Outputs::Analytic;
    }
    print!("{}", run_experiment(&spec)?);
    Ok(())
}
