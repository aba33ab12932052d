//! The three decoding rules on a single fading draw, and the rate cap that
//! keeps an overlay transmission from hurting the slot owner.
//!
//!     cargo run --release --example decoding_rules

use crnoma_aoi::model::{
    draw_gain, epsilon_of, primary_success, rng_from_seed, secondary_capped_success, secondary_solo_success,
    ChannelGain,
};

fn main() -> crnoma_aoi::Result<()> {
    let eps = epsilon_of(1.0)?;
    let (p, p_s) = (1.0, 1.0);
    println!("R = 1 bit/s/Hz gives eps = {}", eps.value());

    let owner = ChannelGain(0.4);
    let overlay = ChannelGain(2.5);
    println!("owner gain 0.4 at P = 1: decoded {}", primary_success(p, owner, eps));
    println!(
        "overlay gain 2.5 capped against it: decoded {} (needs P_S g >= eps (P g_owner + 1) = {})",
        secondary_capped_success(p_s, overlay, p, owner, eps),
        eps.value() * (p * owner.0 + 1.0)
    );
    println!("same overlay with the owner silent: decoded {}", secondary_solo_success(p_s, overlay, eps));

    let mut rng = rng_from_seed(1);
    let n = 200_000;
    let mean: f64 = (0..n).map(|_| draw_gain(&mut rng).0).sum::<f64>() / n as f64;
    println!("mean of {n} Rayleigh power gains: {mean:.4}");
    Ok(())
}
