//! Follows the hidden state with the one-step predictor while always playing
//! the same action, and compares the empirical error with the filter's `P`.

use kode::kalman::KalmanState;
use kode::{generate_instance, EnvState};

fn main() -> kode::Result<()> {
    let params = generate_instance(3, 2, 11)?;
    let mut env = EnvState::init(&params, 1)?;
    let mut filter = KalmanState::new(&params);

    let rounds = 20_000;
    let mut sq_err = 0.0;
    let mut trace_p = 0.0;
    for t in 0..rounds {
        let err = &env.z - &filter.z_hat;
        if t >= rounds / 2 {
            sq_err += err.norm_squared();
            trace_p += filter.p.trace();
        }
        let out = env.step(&params, 0)?;
        filter.update(&params.actions[0], out.reward, &params)?;
        if t % 4000 == 0 {
            println!("t={t:>5}  |z - z_hat| = {:.3}  tr(P) = {:.3}", err.norm(), filter.p.trace());
        }
    }
    let half = (rounds / 2) as f64;
    println!("mean |z - z_hat|^2 = {:.3}, mean tr(P) = {:.3}", sq_err / half, trace_p / half);
    Ok(())
}
