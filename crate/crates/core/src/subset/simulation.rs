use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::ModelBehaviorSet;
use crate::error::{Error, Result};
use crate::log::{ActivityKey, Trace};
use crate::petri::SystemNet;

/// Attempts allowed per requested walk before giving up.
pub const SIMULATION_RETRY_FACTOR: usize = 100;

const BATCH: usize = 256;

/// `4 * (transitions + longest log variant)`.
pub fn default_max_steps(net: &SystemNet, longest_variant: usize) -> usize {
    4 * (net.transitions().len() + longest_variant)
}

/// One uniform random walk. Returns the visible trace if the final marking
/// is reached within `max_steps` firings.
fn walk(net: &SystemNet, max_steps: usize, rng: &mut ChaCha8Rng) -> Option<Trace> {
    let mut marking = net.initial_marking().clone();
    let mut visible = Vec::new();
    for _ in 0..=max_steps {
        if net.is_final(&marking) {
            return Some(Trace(visible));
        }
        let enabled = net.enabled(&marking);
        if enabled.is_empty() {
            return None;
        }
        let t = enabled[rng.random_range(0..enabled.len())];
        if let Some(a) = net.label(t) {
            visible.push(a);
        }
        marking = net.fire_unchecked(&marking, t);
    }
    None
}

/// Builds a model-behavior set from random complete firing sequences.
///
/// Walk `i` draws from its own ChaCha stream `i` of `seed`, so the result
/// does not depend on the worker count. Stops after `target_count`
/// successful walks or `100 * target_count` attempts.
pub fn build_by_simulation(
    net: &SystemNet,
    key: &ActivityKey,
    target_count: usize,
    max_steps: usize,
    seed: u64,
) -> Result<ModelBehaviorSet> {
    if target_count == 0 || max_steps == 0 {
        return Err(Error::Argument(
            "simulation needs target_count >= 1 and max_steps >= 1".into(),
        ));
    }
    let budget = target_count.saturating_mul(SIMULATION_RETRY_FACTOR);
    let mut found = Vec::with_capacity(target_count);
    let mut next = 0usize;
    while found.len() < target_count && next < budget {
        let end = (next + BATCH).min(budget);
        let batch: Vec<Option<Trace>> = (next..end)
            .into_par_iter()
            .map(|i| {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                rng.set_stream(i as u64);
                walk(net, max_steps, &mut rng)
            })
            .collect();
        for trace in batch.into_iter().flatten() {
            if found.len() < target_count {
                found.push(trace);
            }
        }
        next = end;
    }
    if found.is_empty() {
        return Err(Error::Model(format!(
            "no random walk reached the final marking within {max_steps} steps after {budget} attempts"
        )));
    }
    Ok(ModelBehaviorSet::new(found, key))
}
