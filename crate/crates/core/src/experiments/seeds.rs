//! Counter-based seed derivation, so that every random stream is fixed by
//! its coordinates rather than by execution order.

use crate::policies::PolicyKind;

// splitmix64 finalizer
fn finalize(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Mixes `value` into `state`.
pub fn mix(state: u64, value: u64) -> u64 {
    finalize(state ^ finalize(value.wrapping_add(0x9e37_79b9_7f4a_7c15)))
}

const ENV_STREAM: u64 = 1;
const POLICY_STREAM: u64 = 2;
const NU_STREAM: u64 = 3;

pub fn instance_seed(base_seed: u64, instance: usize) -> u64 {
    mix(base_seed, instance as u64)
}

/// Shared by every policy on the same instance and repeat.
pub fn env_seed(instance_seed: u64, repeat: usize) -> u64 {
    mix(mix(instance_seed, ENV_STREAM), repeat as u64)
}

pub fn policy_seed(instance_seed: u64, policy: PolicyKind, repeat: usize) -> u64 {
    mix(mix(mix(instance_seed, POLICY_STREAM), policy.stream_id()), repeat as u64)
}

pub fn nu_seed(instance_seed: u64) -> u64 {
    mix(instance_seed, NU_STREAM)
}
