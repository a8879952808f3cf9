//! Observability split of a coupled system and the implicit exploration it
//! does or does not produce.

use kode::bounds::{exploration_variance, coupling_conditions};
use kode::matops::{observability_decompose, Matrix};
use kode::{LgdsParams, Vector};

fn show(title: &str, gamma: Matrix) -> kode::Result<()> {
    let e1 = Vector::from_column_slice(&[1.0, 0.0, 0.0]);
    let e3 = Vector::from_column_slice(&[0.0, 0.0, 1.0]);
    let params = LgdsParams::new(
        gamma,
        Matrix::identity(3, 3),
        0.5,
        vec![e1.clone(), e3.clone()],
        Matrix::identity(3, 3),
    )?;
    let p_a = kode::matops::solve_dare(&params.gamma, &params.q, params.sigma2, &e1, 1e-12, 100_000)?;
    let dec = observability_decompose(&params.gamma, &e1)?;
    let cond = coupling_conditions(&params, &e1, &e3, &p_a)?;
    println!("{title}");
    println!("  observable dimension through e1: {}", dec.obs_dim);
    println!("  coupling block norm {:.3}", dec.gamma_u_prime.norm());
    println!(
        "  condition 1 {}, condition 2 {}, structural zero {}",
        cond.condition1, cond.condition2, cond.structural_zero
    );
    println!(
        "  variance of the exploration term for e3 while playing e1: {:.4e}",
        exploration_variance(&e3, &e1, &p_a, &params.gamma, params.sigma2)
    );
    Ok(())
}

fn main() -> kode::Result<()> {
    show(
        "decoupled",
        Matrix::from_row_slice(3, 3, &[0.8, 0.1, 0.0, 0.0, 0.5, 0.0, 0.0, 0.0, 0.3]),
    )?;
    show(
        "coupled",
        Matrix::from_row_slice(3, 3, &[0.8, 0.1, 0.0, 0.0, 0.5, 0.2, 0.0, 0.0, 0.3]),
    )
}
