//! Net and log generators for tests and benchmarks.
//!
//! Random nets are block-structured (sequence, exclusive choice, parallel
//! split/join and optional loops), so their final marking is always
//! reachable.

use rand::seq::IndexedRandom;
use rand::Rng;

use crate::log::{Activity, ActivityKey, EventLog, Trace};
use crate::petri::{NetBuilder, PlaceId, SystemNet};

/// The textbook example: `a`, then `b` concurrently with one of
/// {silent, `c`, `f`}, then `e`. Six transitions, `t3` silent.
pub fn running_example(key: &mut ActivityKey) -> SystemNet {
    let mut b = NetBuilder::new();
    let start = b.place("p_start");
    let p: Vec<_> = (1..=4).map(|i| b.place(format!("p{i}"))).collect();
    let end = b.place("p_end");
    let t1 = b.transition("t1", Some(key.intern("a")));
    let t2 = b.transition("t2", Some(key.intern("b")));
    let t3 = b.transition("t3", None);
    let t4 = b.transition("t4", Some(key.intern("c")));
    let t5 = b.transition("t5", Some(key.intern("f")));
    let t6 = b.transition("t6", Some(key.intern("e")));
    b.input(start, t1, 1)
        .output(t1, p[0], 1)
        .output(t1, p[1], 1);
    b.input(p[0], t2, 1).output(t2, p[2], 1);
    for t in [t3, t4, t5] {
        b.input(p[1], t, 1).output(t, p[3], 1);
    }
    b.input(p[2], t6, 1).input(p[3], t6, 1).output(t6, end, 1);
    b.initial(start, 1).final_tokens(end, 1);
    b.build().expect("running example is well formed")
}

/// The log of the running example: 20 traces over five variants.
pub fn running_example_log(key: &mut ActivityKey) -> EventLog {
    EventLog::from_weighted(
        [
            (key.trace(&["a", "b", "c", "e"]), 10),
            (key.trace(&["a", "e"]), 4),
            (key.trace(&["a", "c", "b", "d", "e"]), 3),
            (key.trace(&["a", "b", "e"]), 2),
            (key.trace(&["c", "e"]), 1),
        ],
        key,
    )
}

#[derive(Debug, Clone)]
pub struct NetShape {
    /// Number of transitions, silent ones included.
    pub transitions: usize,
    /// Activities are drawn from `alphabet_size` names, so labels may repeat.
    pub alphabet_size: usize,
    /// Chance that a leaf is silent.
    pub silent_leaf: f64,
    pub allow_loops: bool,
}

impl Default for NetShape {
    fn default() -> Self {
        NetShape {
            transitions: 8,
            alphabet_size: 6,
            silent_leaf: 0.1,
            allow_loops: false,
        }
    }
}

#[derive(Debug)]
enum Block {
    Leaf(Option<usize>),
    Seq(Vec<Block>),
    Xor(Vec<Block>),
    And(Vec<Block>),
    Loop(Box<Block>, Box<Block>),
}

fn split_budget<R: Rng>(rng: &mut R, budget: usize, parts: usize) -> Vec<usize> {
    let mut shares = vec![1; parts];
    for _ in 0..budget - parts {
        let i = rng.random_range(0..parts);
        shares[i] += 1;
    }
    shares
}

/// A block with exactly `budget` transitions.
fn random_block<R: Rng>(rng: &mut R, budget: usize, shape: &NetShape) -> Block {
    let leaf = |rng: &mut R| {
        if rng.random_bool(shape.silent_leaf) {
            Block::Leaf(None)
        } else {
            Block::Leaf(Some(rng.random_range(0..shape.alphabet_size)))
        }
    };
    if budget <= 1 {
        return leaf(rng);
    }
    let mut choices = vec![0u8, 1];
    if budget >= 4 {
        choices.push(2);
    }
    if shape.allow_loops && budget >= 3 {
        choices.push(3);
    }
    match choices[rng.random_range(0..choices.len())] {
        0 | 1 => {
            let parts = rng.random_range(2..=budget.min(3));
            let kids = split_budget(rng, budget, parts)
                .into_iter()
                .map(|b| random_block(rng, b, shape))
                .collect();
            if rng.random_bool(0.5) {
                Block::Seq(kids)
            } else {
                Block::Xor(kids)
            }
        }
        2 => {
            let inner = budget - 2;
            let parts = rng.random_range(2..=inner.clamp(2, 3));
            let kids = split_budget(rng, inner, parts)
                .into_iter()
                .map(|b| random_block(rng, b, shape))
                .collect();
            Block::And(kids)
        }
        3 => {
            let inner = budget - 1;
            let shares = split_budget(rng, inner, 2);
            Block::Loop(
                Box::new(random_block(rng, shares[0], shape)),
                Box::new(random_block(rng, shares[1], shape)),
            )
        }
        _ => unreachable!(),
    }
}

struct Emitter {
    b: NetBuilder,
    names: Vec<Activity>,
    transitions: usize,
    places: usize,
}

impl Emitter {
    fn place(&mut self) -> PlaceId {
        self.places += 1;
        self.b.place(format!("p{}", self.places))
    }

    fn transition(&mut self, label: Option<Activity>) -> crate::petri::TransitionId {
        self.transitions += 1;
        self.b.transition(format!("t{}", self.transitions), label)
    }

    fn emit(&mut self, block: &Block, input: PlaceId, output: PlaceId) {
        match block {
            Block::Leaf(label) => {
                let label = label.map(|i| self.names[i]);
                let t = self.transition(label);
                self.b.input(input, t, 1).output(t, output, 1);
            }
            Block::Seq(kids) => {
                let mut from = input;
                for (i, kid) in kids.iter().enumerate() {
                    let to = if i + 1 == kids.len() {
                        output
                    } else {
                        self.place()
                    };
                    self.emit(kid, from, to);
                    from = to;
                }
            }
            Block::Xor(kids) => {
                for kid in kids {
                    self.emit(kid, input, output);
                }
            }
            Block::And(kids) => {
                let split = self.transition(None);
                let join = self.transition(None);
                self.b.input(input, split, 1).output(join, output, 1);
                for kid in kids {
                    let (a, z) = (self.place(), self.place());
                    self.b.output(split, a, 1).input(z, join, 1);
                    self.emit(kid, a, z);
                }
            }
            Block::Loop(body, redo) => {
                let mid = self.place();
                self.emit(body, input, mid);
                self.emit(redo, mid, input);
                let exit = self.transition(None);
                self.b.input(mid, exit, 1).output(exit, output, 1);
            }
        }
    }
}

/// A random block-structured net with exactly `shape.transitions`
/// transitions. Activity names are `a0`, `a1`, ...
pub fn random_net<R: Rng>(rng: &mut R, key: &mut ActivityKey, shape: &NetShape) -> SystemNet {
    let block = random_block(rng, shape.transitions.max(1), shape);
    let names = (0..shape.alphabet_size)
        .map(|i| key.intern(&format!("a{i}")))
        .collect();
    let mut em = Emitter {
        b: NetBuilder::new(),
        names,
        transitions: 0,
        places: 0,
    };
    let source = em.place();
    let sink = em.place();
    em.emit(&block, source, sink);
    em.b.initial(source, 1).final_tokens(sink, 1);
    em.b.build().expect("generated nets are well formed")
}

/// Uniform random activity sequence of length `0..=max_len` over `alphabet`.
pub fn random_trace<R: Rng>(rng: &mut R, alphabet: &[Activity], max_len: usize) -> Trace {
    let len = rng.random_range(0..=max_len);
    (0..len)
        .map(|_| alphabet[rng.random_range(0..alphabet.len())])
        .collect()
}

/// One random complete firing sequence projected to visible labels, or
/// `None` if the walk dead-ends or exceeds `max_steps`.
pub fn random_model_trace<R: Rng>(rng: &mut R, net: &SystemNet, max_steps: usize) -> Option<Trace> {
    let mut m = net.initial_marking().clone();
    let mut out = Vec::new();
    for _ in 0..=max_steps {
        if net.is_final(&m) {
            return Some(Trace(out));
        }
        let enabled = net.enabled(&m);
        let t = *enabled.choose(rng)?;
        if let Some(a) = net.label(t) {
            out.push(a);
        }
        m = net.fire_unchecked(&m, t);
    }
    None
}

/// Applies independent deletions, insertions and adjacent swaps, each with
/// probability `noise` per position.
pub fn perturb<R: Rng>(rng: &mut R, trace: &Trace, alphabet: &[Activity], noise: f64) -> Trace {
    let mut out: Vec<Activity> = Vec::with_capacity(trace.len() + 2);
    for &a in trace.iter() {
        if rng.random_bool(noise) {
            continue;
        }
        out.push(a);
        if rng.random_bool(noise) {
            out.push(alphabet[rng.random_range(0..alphabet.len())]);
        }
    }
    if out.len() >= 2 && rng.random_bool(noise) {
        let i = rng.random_range(0..out.len() - 1);
        out.swap(i, i + 1);
    }
    Trace(out)
}

/// A log drawn from `net` with noise: `variants` distinct traces whose
/// frequencies follow a Zipf-like decay and sum to `traces`.
///
/// Returns `None` if the net cannot produce enough distinct behavior.
pub fn synthetic_log<R: Rng>(
    rng: &mut R,
    net: &SystemNet,
    key: &ActivityKey,
    variants: usize,
    traces: u64,
    noise: f64,
) -> Option<EventLog> {
    assert!(traces >= variants as u64);
    let mut alphabet: Vec<Activity> = net.transitions().iter().filter_map(|t| t.label).collect();
    alphabet.sort_unstable();
    alphabet.dedup();
    if alphabet.is_empty() {
        return None;
    }
    let max_steps = 8 * net.transitions().len();
    let mut seen = std::collections::HashSet::new();
    let mut pool = Vec::with_capacity(variants);
    let mut attempts = 0usize;
    while pool.len() < variants {
        attempts += 1;
        if attempts > variants * 1000 {
            return None;
        }
        let Some(base) = random_model_trace(rng, net, max_steps) else {
            continue;
        };
        let t = perturb(rng, &base, &alphabet, noise);
        if seen.insert(t.clone()) {
            pool.push(t);
        }
    }
    // frequencies proportional to 1/(rank+1), at least one each
    let weights: Vec<f64> = (0..variants).map(|i| 1.0 / (i as f64 + 1.0)).collect();
    let total_w: f64 = weights.iter().sum();
    let spare = traces - variants as u64;
    let mut freq: Vec<u64> = weights
        .iter()
        .map(|w| 1 + (w / total_w * spare as f64).floor() as u64)
        .collect();
    let assigned: u64 = freq.iter().sum();
    freq[0] += traces - assigned;
    Some(EventLog::from_weighted(pool.into_iter().zip(freq), key))
}
