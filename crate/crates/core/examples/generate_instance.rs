//! Draws a random stable instance, prints its key numbers and the JSON document.
//!
//! `cargo run --example generate_instance -- [d] [k] [seed]`

use kode::matops::spectral_radius;
use kode::{generate_instance, LgdsParams};

fn main() -> kode::Result<()> {
    let mut args = std::env::args().skip(1).map(|s| s.parse::<u64>().expect("integer argument"));
    let d = args.next().unwrap_or(4) as usize;
    let k = args.next().unwrap_or(3) as usize;
    let seed = args.next().unwrap_or(7);

    let params = generate_instance(d, k, seed)?;
    let z = params.steady_state_covariance()?;
    eprintln!("spectral radius {:.6}", spectral_radius(&params.gamma)?);
    eprintln!("sigma^2 {:.6}, tr(Z) {:.4}", params.sigma2, z.trace());

    let json = params.to_json();
    assert_eq!(LgdsParams::from_json(&json)?, params);
    print!("{json}");
    Ok(())
}
