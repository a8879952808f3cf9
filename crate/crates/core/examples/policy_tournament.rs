//! Every policy on the same instance and the same environment noise.
//!
//! `cargo run --release --example policy_tournament -- [seed]`

use kode::experiments::{run_episode, seeds, EpisodeOptions};
use kode::generate_instance;
use kode::policies::{build_policy, PolicyHyperparams, PolicyKind, RewardScale};

fn main() -> kode::Result<()> {
    let seed: u64 = std::env::args().nth(1).map_or(3, |s| s.parse().expect("seed"));
    let params = generate_instance(10, 10, seed)?;
    let scale = RewardScale::from_params(&params)?;
    let hyper = PolicyHyperparams::default();
    let n = 1000;

    println!("{:<8} {:>12}", "policy", "regret");
    for kind in PolicyKind::ALL {
        let mut total = 0.0;
        let repeats = 5;
        for rep in 0..repeats {
            let mut policy = build_policy(kind, &params, &scale, &hyper, n, seeds::policy_seed(seed, kind, rep))?;
            let trace = run_episode(&params, policy.as_mut(), n, seeds::env_seed(seed, rep), EpisodeOptions::default())?;
            total += trace.cumulative_regret;
        }
        println!("{:<8} {:>12.1}", kind.label(), total / repeats as f64);
    }
    Ok(())
}
