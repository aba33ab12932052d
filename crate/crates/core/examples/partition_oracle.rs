//! Monte Carlo estimates of the per-frame outcome partitions against their
//! closed forms, at P = P_S and at P = 4 P_S.
//!
//!     cargo run --release --example partition_oracle

use crnoma_aoi::analytic;
use crnoma_aoi::model::rng_from_seed;
use crnoma_aoi::oracle::{estimate_gar_partitions, estimate_gaw_partition, EstimateWithCI};

fn show(name: &str, est: &[EstimateWithCI], closed: [f64; 3]) {
    for ((label, e), c) in ["none", "first", "second"].iter().zip(est).zip(closed) {
        println!(
            "  {name:<10} {label:<7} closed {c:.6}  estimate {:.6} ± {:.6}  ({:.2}σ)",
            e.estimate,
            e.half_width,
            e.sigmas_from(c)
        );
    }
}

fn main() {
    let trials = 1_000_000;
    for (eps, p, p_s) in [(1.0, 1.0, 1.0), (1.0, 4.0, 1.0)] {
        println!("eps = {eps}, P = {p}, P_S = {p_s}");
        let mut rng = rng_from_seed(11);
        let gaw = estimate_gaw_partition(eps, p, p_s, trials, &mut rng);
        let gar = estimate_gar_partitions(eps, p, p_s, trials, &mut rng);
        show("gaw", &gaw, analytic::gaw_partition(eps, p, p_s).as_array());
        show("gar m", &gar.user_m, analytic::gar_partition_user_m(eps, p, p_s).as_array());
        show("gar m'", &gar.user_mprime, analytic::gar_partition_user_mprime(eps, p, p_s).as_array());
        let joint = (-eps / p_s).exp() * analytic::tau(eps, p, p_s);
        let e = gar.owner_fail_overlay_success;
        println!("  tau term   closed {joint:.6}  estimate {:.6} ± {:.6}", e.estimate, e.half_width);
    }
    // The own-slot success terms use P_S; the attempt is made at P, which
    // only matters when the two differ.
    println!("own-slot success at P = 4: e^(-1/4) = {:.6}", (-0.25f64).exp());
}
