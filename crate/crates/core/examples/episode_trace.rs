//! Writes a per-round CSV trace of KODE with the angle diagnostics.
//!
//! `cargo run --example episode_trace -- [rounds] > trace.csv`

use kode::experiments::{run_episode, EpisodeOptions};
use kode::generate_instance;
use kode::policies::Kode;

fn main() -> kode::Result<()> {
    let n: usize = std::env::args().nth(1).map_or(200, |s| s.parse().expect("round count"));
    let params = generate_instance(4, 5, 9)?;
    let mut kode = Kode::new(params.clone());
    let options = EpisodeOptions {
        burn_in: 1000,
        diagnostics: true,
    };
    let trace = run_episode(&params, &mut kode, n, 42, options)?;
    trace.write_csv(std::io::stdout().lock())?;
    eprintln!("cumulative regret {:.3}", trace.cumulative_regret);
    Ok(())
}
