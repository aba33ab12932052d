//! Age of information (AoI) of legacy TDMA uplinks and their cognitive-radio
//! NOMA (CR-NOMA) add-on, under generate-at-will and generate-at-request
//! update models.
//!
//! The crate offers two independent routes to every number it reports:
//!
//! * [`analytic`] evaluates the closed-form AoI expressions and the per-frame
//!   outcome probabilities they depend on.
//! * [`simulator`] runs the frame/slot protocol over Rayleigh block fading and
//!   integrates each user's sawtooth age process exactly.
//!
//! [`oracle`] cross-checks the two (Monte Carlo partition estimates, renewal
//! recomputation from event logs, series identities), and [`experiment`]
//! turns sweeps and the acceptance checks into CSV and pass/fail reports.

pub mod analytic;
pub mod error;
pub mod experiment;
pub mod model;
pub mod oracle;
pub mod simulator;
pub mod validation;

pub use error::{Error, Result};
pub use model::{GenerationModel, Scheme, SystemConfig};
