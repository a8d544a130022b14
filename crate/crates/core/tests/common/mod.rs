#![allow(dead_code)]

use std::collections::HashMap;

use confapprox_core::generate::{random_net, random_trace, NetShape};
use confapprox_core::petri::DEFAULT_STATE_CAP;
use confapprox_core::{edit_distance, Activity, ActivityKey, Marking, SystemNet, Trace};
use rand::Rng;

pub const FIXTURES: &str = concat!(env!("CARGO_MANIFEST_DIR"), "/tests/fixtures");

pub fn fixture(name: &str) -> std::fs::File {
    std::fs::File::open(format!("{FIXTURES}/{name}")).unwrap()
}

/// Random acyclic net with 1..=8 transitions plus a trace of length <= 8
/// over the net's alphabet and one foreign activity.
pub fn random_instance<R: Rng>(rng: &mut R) -> (ActivityKey, SystemNet, Trace) {
    let mut key = ActivityKey::new();
    let shape = NetShape {
        transitions: rng.random_range(1..=8),
        alphabet_size: rng.random_range(2..=5),
        silent_leaf: 0.15,
        allow_loops: false,
    };
    let net = random_net(rng, &mut key, &shape);
    let mut alphabet: Vec<Activity> = (0..shape.alphabet_size)
        .map(|i| key.intern(&format!("a{i}")))
        .collect();
    alphabet.push(key.intern("foreign"));
    let trace = random_trace(rng, &alphabet, 8);
    (key, net, trace)
}

/// Every visible trace of an acyclic net. Each transition fires at most once
/// per token path, so the transition count bounds the visible length.
pub fn full_language(net: &SystemNet) -> Vec<Trace> {
    let bound = net.transitions().len();
    net.enumerate_visible_traces(bound, DEFAULT_STATE_CAP)
        .unwrap()
        .into_iter()
        .collect()
}

/// Minimum edit distance from `trace` to any member of `language`.
pub fn phi(trace: &Trace, language: &[Trace]) -> usize {
    language
        .iter()
        .map(|m| edit_distance(trace, m))
        .min()
        .expect("non-empty language")
}

/// Exhaustive minimum alignment cost under unit costs: memoized recursion
/// over every move sequence of the synchronous product. Only terminates on
/// acyclic nets.
pub fn brute_force_cost(trace: &Trace, net: &SystemNet) -> Option<u64> {
    fn go(
        net: &SystemNet,
        trace: &[Activity],
        m: &Marking,
        pos: usize,
        memo: &mut HashMap<(Marking, usize), Option<u64>>,
    ) -> Option<u64> {
        if let Some(v) = memo.get(&(m.clone(), pos)) {
            return *v;
        }
        let mut best = if pos == trace.len() && net.is_final(m) {
            Some(0)
        } else {
            None
        };
        let mut consider = |c: Option<u64>, add: u64| {
            if let Some(c) = c {
                best = Some(best.map_or(c + add, |b: u64| b.min(c + add)));
            }
        };
        for t in net.enabled(m) {
            let next = net.fire(m, t).unwrap();
            let label = net.label(t);
            // model move
            consider(go(net, trace, &next, pos, memo), u64::from(label.is_some()));
            // synchronous move
            if pos < trace.len() && label == Some(trace[pos]) {
                consider(go(net, trace, &next, pos + 1, memo), 0);
            }
        }
        if pos < trace.len() {
            consider(go(net, trace, m, pos + 1, memo), 1);
        }
        memo.insert((m.clone(), pos), best);
        best
    }
    let mut memo = HashMap::new();
    go(net, trace.as_slice(), net.initial_marking(), 0, &mut memo)
}
