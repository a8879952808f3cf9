//! Regret and angle bounds of an instance, with the per-action DARE traces.
//!
//! `cargo run --release --example steady_state_bounds -- [instance.json]`

use kode::bounds::{bound_report, compute_p_bar};
use kode::{generate_instance, LgdsParams};

fn main() -> kode::Result<()> {
    let params = match std::env::args().nth(1) {
        Some(path) => LgdsParams::from_json(&std::fs::read_to_string(path)?)?,
        None => generate_instance(5, 4, 2)?,
    };
    let pb = compute_p_bar(&params)?;
    for (i, p) in pb.per_action.iter().enumerate() {
        println!("tr(P_a{i}) = {:.4}", p.trace());
    }
    println!("largest-trace action {}, inflated {} (mu = {:.4})", pb.candidate_index, pb.inflated, pb.inflation);

    let r = bound_report(&params, 1000, 0.95, 100_000, 0)?;
    println!("regret bound per round {:.4}, over 1000 rounds {:.1}", r.regret_bound_per_round, r.regret_bound_n);
    println!("nu {:.4}", r.nu);
    match r.theta_s.value() {
        Some(t) => println!("steady angle bound {t:.4} rad"),
        None => println!("steady angle bound not applicable"),
    }
    if let Some(u) = r.u_tilde {
        println!("u_tilde {u:.4e}");
    }
    Ok(())
}
