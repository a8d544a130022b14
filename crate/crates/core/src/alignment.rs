//! Optimal alignments between a trace and a system net.
//!
//! Search runs A* over the synchronous product, whose states are pairs of a
//! net marking and a position in the trace.

use std::cmp::{Ordering, Reverse};
use std::collections::hash_map::Entry;
use std::collections::{BinaryHeap, HashMap};

use crate::error::{Error, Result};
use crate::log::{Activity, Trace};
use crate::petri::{Marking, SystemNet, TransitionId, DEFAULT_STATE_CAP};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum MoveKind {
    Synchronous,
    ModelOnly,
    LogOnly,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Move {
    pub kind: MoveKind,
    pub log_activity: Option<Activity>,
    pub transition: Option<TransitionId>,
}

impl Move {
    pub fn synchronous(a: Activity, t: TransitionId) -> Self {
        Move {
            kind: MoveKind::Synchronous,
            log_activity: Some(a),
            transition: Some(t),
        }
    }

    pub fn log_only(a: Activity) -> Self {
        Move {
            kind: MoveKind::LogOnly,
            log_activity: Some(a),
            transition: None,
        }
    }

    pub fn model_only(t: TransitionId) -> Self {
        Move {
            kind: MoveKind::ModelOnly,
            log_activity: None,
            transition: Some(t),
        }
    }
}

/// A sequence of moves relating a trace to a complete firing sequence.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Alignment {
    pub moves: Vec<Move>,
    pub cost: u64,
}

impl Alignment {
    /// Log side of the alignment.
    pub fn log_projection(&self) -> Trace {
        self.moves.iter().filter_map(|m| m.log_activity).collect()
    }

    /// Model side of the alignment as a transition sequence.
    pub fn firing_sequence(&self) -> Vec<TransitionId> {
        self.moves.iter().filter_map(|m| m.transition).collect()
    }

    /// Labels of the visible transitions on the model side.
    pub fn model_trace(&self, net: &SystemNet) -> Trace {
        net.visible_projection(self.firing_sequence())
    }
}

/// Move costs. Synchronous and silent moves are always free.
#[derive(Debug, Clone)]
pub struct CostFunction {
    default_log_move: u64,
    default_model_move: u64,
    log_move: HashMap<Activity, u64>,
    model_move: HashMap<TransitionId, u64>,
}

impl Default for CostFunction {
    fn default() -> Self {
        Self::standard()
    }
}

impl CostFunction {
    /// Unit cost for every visible asynchronous move.
    pub fn standard() -> Self {
        CostFunction {
            default_log_move: 1,
            default_model_move: 1,
            log_move: HashMap::new(),
            model_move: HashMap::new(),
        }
    }

    /// Sets the cost of a log move on `activity`. Must be positive.
    pub fn with_log_move(mut self, activity: Activity, cost: u64) -> Result<Self> {
        if cost == 0 {
            return Err(Error::Argument("log move costs must be positive".into()));
        }
        self.log_move.insert(activity, cost);
        Ok(self)
    }

    pub fn with_model_move(mut self, t: TransitionId, cost: u64) -> Self {
        self.model_move.insert(t, cost);
        self
    }

    pub fn log_move(&self, a: Activity) -> u64 {
        self.log_move
            .get(&a)
            .copied()
            .unwrap_or(self.default_log_move)
    }

    pub fn model_move(&self, net: &SystemNet, t: TransitionId) -> u64 {
        if net.transition(t).is_silent() {
            0
        } else {
            self.model_move
                .get(&t)
                .copied()
                .unwrap_or(self.default_model_move)
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Heuristic {
    /// Cost of the remaining trace symbols no transition can ever match.
    #[default]
    RemainingLog,
    Zero,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AlignmentConfig {
    pub heuristic: Heuristic,
    /// Maximum number of expanded search states.
    pub state_cap: usize,
}

impl Default for AlignmentConfig {
    fn default() -> Self {
        AlignmentConfig {
            heuristic: Heuristic::RemainingLog,
            state_cap: DEFAULT_STATE_CAP,
        }
    }
}

/// Heuristic value for every trace position `0..=len`.
pub fn heuristic_table(
    trace: &Trace,
    net: &SystemNet,
    cost: &CostFunction,
    heuristic: Heuristic,
) -> Vec<u64> {
    let mut table = vec![0u64; trace.len() + 1];
    if heuristic == Heuristic::Zero {
        return table;
    }
    for (i, &a) in trace.iter().enumerate().rev() {
        let own = if net.has_label(a) {
            0
        } else {
            cost.log_move(a)
        };
        table[i] = table[i + 1] + own;
    }
    table
}

#[derive(Debug, PartialEq, Eq)]
struct QueueEntry {
    f: u64,
    pos: usize,
    seq: u64,
    node: usize,
}

impl Ord for QueueEntry {
    // min-heap on f, then deeper trace position, then generation order
    fn cmp(&self, other: &Self) -> Ordering {
        (Reverse(self.f), self.pos, Reverse(self.seq)).cmp(&(
            Reverse(other.f),
            other.pos,
            Reverse(other.seq),
        ))
    }
}

impl PartialOrd for QueueEntry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

struct Node {
    marking: Marking,
    pos: usize,
    g: u64,
    parent: Option<(usize, Move)>,
}

/// Computes an optimal alignment of `trace` and `net` under `cost`.
///
/// Among equally cheap successors, synchronous moves are generated before
/// model moves and model moves before log moves, each group in transition id
/// order; together with FIFO tie-breaking this makes the result deterministic.
pub fn optimal_alignment(
    trace: &Trace,
    net: &SystemNet,
    cost: &CostFunction,
    config: &AlignmentConfig,
) -> Result<Alignment> {
    let n = trace.len();
    let h = heuristic_table(trace, net, cost, config.heuristic);
    let mut nodes: Vec<Node> = Vec::new();
    let mut best_g: HashMap<(Marking, usize), (u64, bool)> = HashMap::new();
    let mut heap = BinaryHeap::new();
    let mut seq = 0u64;
    let mut expanded = 0usize;

    nodes.push(Node {
        marking: net.initial_marking().clone(),
        pos: 0,
        g: 0,
        parent: None,
    });
    best_g.insert((net.initial_marking().clone(), 0), (0, false));
    heap.push(QueueEntry {
        f: h[0],
        pos: 0,
        seq,
        node: 0,
    });

    let mut successors: Vec<(Marking, usize, u64, Move)> = Vec::new();
    while let Some(entry) = heap.pop() {
        let (marking, pos, g) = {
            let node = &nodes[entry.node];
            (node.marking.clone(), node.pos, node.g)
        };
        match best_g.get_mut(&(marking.clone(), pos)) {
            Some((best, closed)) => {
                if *closed || *best < g {
                    continue;
                }
                *closed = true;
            }
            None => unreachable!("queued states are always registered"),
        }
        if pos == n && net.is_final(&marking) {
            return Ok(rebuild(&nodes, entry.node));
        }
        expanded += 1;
        if expanded > config.state_cap {
            return Err(Error::Resource(format!(
                "alignment search expanded more than {} states",
                config.state_cap
            )));
        }

        successors.clear();
        if pos < n {
            let a = trace.as_slice()[pos];
            for &t in net.transitions_labeled(a) {
                if net.is_enabled(&marking, t) {
                    successors.push((
                        net.fire_unchecked(&marking, t),
                        pos + 1,
                        0,
                        Move::synchronous(a, t),
                    ));
                }
            }
        }
        for t in net.enabled(&marking) {
            let c = cost.model_move(net, t);
            successors.push((net.fire_unchecked(&marking, t), pos, c, Move::model_only(t)));
        }
        if pos < n {
            let a = trace.as_slice()[pos];
            successors.push((
                marking.clone(),
                pos + 1,
                cost.log_move(a),
                Move::log_only(a),
            ));
        }

        for (next, next_pos, c, mv) in successors.drain(..) {
            let next_g = g + c;
            match best_g.entry((next.clone(), next_pos)) {
                Entry::Occupied(mut e) => {
                    let (best, closed) = e.get_mut();
                    if *closed || *best <= next_g {
                        continue;
                    }
                    *best = next_g;
                }
                Entry::Vacant(e) => {
                    e.insert((next_g, false));
                }
            }
            nodes.push(Node {
                marking: next,
                pos: next_pos,
                g: next_g,
                parent: Some((entry.node, mv)),
            });
            seq += 1;
            heap.push(QueueEntry {
                f: next_g + h[next_pos],
                pos: next_pos,
                seq,
                node: nodes.len() - 1,
            });
        }
    }
    Err(Error::Model(
        "the final marking is not reachable from the initial marking".into(),
    ))
}

fn rebuild(nodes: &[Node], mut at: usize) -> Alignment {
    let cost = nodes[at].g;
    let mut moves = Vec::new();
    while let Some((parent, mv)) = nodes[at].parent {
        moves.push(mv);
        at = parent;
    }
    moves.reverse();
    Alignment { moves, cost }
}

/// Fewest visible transitions on any complete firing sequence, i.e. the
/// cost of aligning the empty trace under unit costs.
pub fn shortest_path_model(net: &SystemNet, config: &AlignmentConfig) -> Result<u64> {
    optimal_alignment(&Trace::empty(), net, &CostFunction::standard(), config).map(|a| a.cost)
}

/// `1 - cost / (trace_length + spm)`; 1 when the denominator is zero.
pub fn trace_fitness(cost: u64, trace_length: usize, spm: u64) -> f64 {
    let denominator = trace_length as u64 + spm;
    if denominator == 0 {
        return 1.0;
    }
    1.0 - cost as f64 / denominator as f64
}
