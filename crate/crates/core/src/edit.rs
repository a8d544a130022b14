//! Insertion/deletion edit distance between traces.
//!
//! Substitution is not an edit operation here, so the distance equals
//! `|s| + |t| - 2 * LCS(s, t)`.

use crate::error::{Error, Result};
use crate::log::{Activity, Trace};
use crate::subset::ModelBehaviorSet;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum EditOp {
    Match,
    Delete,
    Insert,
}

/// A minimal script turning a source trace into a target trace.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct EditScript {
    pub steps: Vec<(EditOp, Activity)>,
}

impl EditScript {
    pub fn cost(&self) -> usize {
        self.steps
            .iter()
            .filter(|(op, _)| *op != EditOp::Match)
            .count()
    }

    pub fn count(&self, op: EditOp) -> usize {
        self.steps.iter().filter(|(o, _)| *o == op).count()
    }

    /// Replays the script against `source`, returning the produced trace, or
    /// `None` if a match or deletion does not agree with the source.
    pub fn apply(&self, source: &Trace) -> Option<Trace> {
        let mut rest = source.iter();
        let mut out = Vec::new();
        for &(op, a) in &self.steps {
            match op {
                EditOp::Match => {
                    if rest.next() != Some(&a) {
                        return None;
                    }
                    out.push(a);
                }
                EditOp::Delete => {
                    if rest.next() != Some(&a) {
                        return None;
                    }
                }
                EditOp::Insert => out.push(a),
            }
        }
        rest.next().is_none().then_some(Trace(out))
    }
}

/// Length of the longest common subsequence, with two rolling rows.
fn lcs_len(s: &[Activity], t: &[Activity]) -> usize {
    let (s, t) = if s.len() < t.len() { (t, s) } else { (s, t) };
    if t.is_empty() {
        return 0;
    }
    let mut prev = vec![0u32; t.len() + 1];
    let mut cur = vec![0u32; t.len() + 1];
    for &x in s {
        for (j, &y) in t.iter().enumerate() {
            cur[j + 1] = if x == y {
                prev[j] + 1
            } else {
                prev[j + 1].max(cur[j])
            };
        }
        std::mem::swap(&mut prev, &mut cur);
    }
    prev[t.len()] as usize
}

/// Minimum number of single-activity insertions and deletions turning `s`
/// into `t`.
pub fn edit_distance(s: &Trace, t: &Trace) -> usize {
    s.len() + t.len() - 2 * lcs_len(s.as_slice(), t.as_slice())
}

/// Edit distance with per-activity insertion and deletion weights.
pub fn edit_distance_weighted<I, D>(s: &Trace, t: &Trace, insert_cost: I, delete_cost: D) -> u64
where
    I: Fn(Activity) -> u64,
    D: Fn(Activity) -> u64,
{
    let (s, t) = (s.as_slice(), t.as_slice());
    let mut prev: Vec<u64> = Vec::with_capacity(t.len() + 1);
    prev.push(0);
    for &y in t {
        let last = *prev.last().unwrap();
        prev.push(last + insert_cost(y));
    }
    let mut cur = vec![0u64; t.len() + 1];
    for &x in s {
        cur[0] = prev[0] + delete_cost(x);
        for (j, &y) in t.iter().enumerate() {
            let mut best = (prev[j + 1] + delete_cost(x)).min(cur[j] + insert_cost(y));
            if x == y {
                best = best.min(prev[j]);
            }
            cur[j + 1] = best;
        }
        std::mem::swap(&mut prev, &mut cur);
    }
    prev[t.len()]
}

/// A minimal edit script from `s` to `t`.
///
/// Backtracking prefers a match, then a deletion, then an insertion at every
/// cell, so the script is deterministic.
pub fn edit_script(s: &Trace, t: &Trace) -> EditScript {
    let (s, t) = (s.as_slice(), t.as_slice());
    let (n, m) = (s.len(), t.len());
    let w = m + 1;
    // dist[i][j]: distance between s[..i] and t[..j]
    let mut dist = vec![0u32; (n + 1) * w];
    for (j, d) in dist[..w].iter_mut().enumerate() {
        *d = j as u32;
    }
    for i in 1..=n {
        dist[i * w] = i as u32;
        for j in 1..=m {
            let del = dist[(i - 1) * w + j] + 1;
            let ins = dist[i * w + j - 1] + 1;
            let mut best = del.min(ins);
            if s[i - 1] == t[j - 1] {
                best = best.min(dist[(i - 1) * w + j - 1]);
            }
            dist[i * w + j] = best;
        }
    }

    let mut steps = Vec::with_capacity(n + m);
    let (mut i, mut j) = (n, m);
    while i > 0 || j > 0 {
        let here = dist[i * w + j];
        if i > 0 && j > 0 && s[i - 1] == t[j - 1] && here == dist[(i - 1) * w + j - 1] {
            steps.push((EditOp::Match, s[i - 1]));
            i -= 1;
            j -= 1;
        } else if i > 0 && here == dist[(i - 1) * w + j] + 1 {
            steps.push((EditOp::Delete, s[i - 1]));
            i -= 1;
        } else {
            steps.push((EditOp::Insert, t[j - 1]));
            j -= 1;
        }
    }
    steps.reverse();
    EditScript { steps }
}

/// Distance from `s` to the closest member of `set`, with that member.
///
/// Ties go to the member that comes first in canonical trace order.
pub fn min_distance_to_set<'a>(s: &Trace, set: &'a ModelBehaviorSet) -> Result<(usize, &'a Trace)> {
    let mut best: Option<(usize, &Trace)> = None;
    for candidate in set.traces() {
        let lower = s.len().abs_diff(candidate.len());
        if let Some((d, _)) = best {
            if lower >= d {
                continue;
            }
        }
        let d = edit_distance(s, candidate);
        if best.is_none_or(|(b, _)| d < b) {
            best = Some((d, candidate));
            if d == 0 {
                break;
            }
        }
    }
    best.ok_or_else(|| Error::Argument("model behavior set is empty".into()))
}
