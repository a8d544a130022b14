//! Workloads shared by the benchmarks.

use confapprox_core::generate::{random_net, synthetic_log, NetShape};
use confapprox_core::{ActivityKey, EventLog, SystemNet};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// A generated block-structured net and a noisy log of `variants` distinct
/// traces spread over `traces` cases.
pub fn workload(
    seed: u64,
    transitions: usize,
    variants: usize,
    traces: u64,
) -> (ActivityKey, SystemNet, EventLog) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut key = ActivityKey::new();
    let shape = NetShape {
        transitions,
        alphabet_size: (transitions * 4 / 5).max(2),
        silent_leaf: 0.1,
        allow_loops: true,
    };
    let net = random_net(&mut rng, &mut key, &shape);
    let log = synthetic_log(&mut rng, &net, &key, variants, traces, 0.2)
        .expect("the generated net yields enough distinct traces");
    (key, net, log)
}
