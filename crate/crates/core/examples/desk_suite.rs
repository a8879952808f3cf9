//! Runs a sweep over random instances and prints the regret comparison.
//!
//! `cargo run --release --example desk_suite -- [instances] [workers] [out_dir]`

use std::path::PathBuf;

use kode::experiments::{run_suite, ExperimentConfig};

fn main() -> kode::Result<()> {
    let mut args = std::env::args().skip(1);
    let num_instances = args.next().map_or(100, |s| s.parse().expect("instance count"));
    let workers = args.next().map_or(8, |s| s.parse().expect("worker count"));
    let out = args.next().map_or_else(|| PathBuf::from("desk_results"), PathBuf::from);

    let cfg = ExperimentConfig {
        num_instances,
        output_dir: out.clone(),
        ..ExperimentConfig::default()
    };
    let report = run_suite(&cfg, workers)?;
    report.write(&out)?;

    println!("{} instances, {} failed", report.results.len(), report.failures.len());
    for b in &report.baselines {
        if let Some(s) = &b.boxplot {
            println!(
                "KODE vs {:<7} median {:>7.2}%  IQR [{:.2}, {:.2}]",
                b.baseline.label(),
                s.median,
                s.q1,
                s.q3
            );
        }
    }
    for c in &report.correlations {
        match c.correlation {
            Some(r) => println!("corr({:<9}, log10 u~) r = {:.3}  p = {:.2e}  m = {}", c.label, r.r, r.p_value, r.m),
            None => println!("corr({:<9}) undefined", c.label),
        }
    }
    println!("written to {}", out.display());
    Ok(())
}
