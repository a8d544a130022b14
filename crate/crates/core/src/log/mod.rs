//! Event logs as multisets of trace variants.
//!
//! Activities are interned into dense [`Activity`] handles by an
//! [`ActivityKey`]. The same key must be shared between a log and the net it
//! is checked against so that labels compare by handle.

mod csv;
mod xes;

use std::cmp::Ordering;
use std::collections::{BTreeSet, HashMap};
use std::fmt;

pub use self::csv::{parse_csv, CsvConfig};
pub use self::xes::parse_xes;

/// Dense handle for an activity name within one [`ActivityKey`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Activity(u32);

impl Activity {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

/// Interner mapping activity names to handles and back.
#[derive(Debug, Clone, Default)]
pub struct ActivityKey {
    names: Vec<String>,
    ids: HashMap<String, Activity>,
}

impl ActivityKey {
    pub fn new() -> Self {
        Self::default()
    }

    /// Returns the handle for `name`, allocating one on first sight.
    ///
    /// Panics on an empty name; parsers reject those before interning.
    pub fn intern(&mut self, name: &str) -> Activity {
        assert!(!name.is_empty(), "activity names must be non-empty");
        if let Some(&a) = self.ids.get(name) {
            return a;
        }
        let a = Activity(self.names.len() as u32);
        self.names.push(name.to_owned());
        self.ids.insert(name.to_owned(), a);
        a
    }

    pub fn get(&self, name: &str) -> Option<Activity> {
        self.ids.get(name).copied()
    }

    pub fn name(&self, activity: Activity) -> &str {
        &self.names[activity.index()]
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    /// Interns every name of `names` and returns the resulting trace.
    pub fn trace<S: AsRef<str>>(&mut self, names: &[S]) -> Trace {
        Trace(names.iter().map(|n| self.intern(n.as_ref())).collect())
    }

    /// Canonical order on traces: lexicographic by activity name sequence,
    /// a proper prefix sorting first.
    pub fn cmp_traces(&self, a: &Trace, b: &Trace) -> Ordering {
        for (x, y) in a.0.iter().zip(&b.0) {
            if x != y {
                match self.name(*x).cmp(self.name(*y)) {
                    Ordering::Equal => {}
                    other => return other,
                }
            }
        }
        a.len().cmp(&b.len())
    }

    pub fn display<'a>(&'a self, trace: &'a Trace) -> TraceDisplay<'a> {
        TraceDisplay { key: self, trace }
    }

    pub fn names(&self, trace: &Trace) -> Vec<String> {
        trace.iter().map(|a| self.name(*a).to_owned()).collect()
    }
}

/// An ordered sequence of activities. The empty trace is valid.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct Trace(pub Vec<Activity>);

impl Trace {
    pub fn empty() -> Self {
        Trace(Vec::new())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Activity> {
        self.0.iter()
    }

    pub fn as_slice(&self) -> &[Activity] {
        &self.0
    }
}

impl From<Vec<Activity>> for Trace {
    fn from(v: Vec<Activity>) -> Self {
        Trace(v)
    }
}

impl FromIterator<Activity> for Trace {
    fn from_iter<I: IntoIterator<Item = Activity>>(iter: I) -> Self {
        Trace(iter.into_iter().collect())
    }
}

pub struct TraceDisplay<'a> {
    key: &'a ActivityKey,
    trace: &'a Trace,
}

impl fmt::Display for TraceDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("<")?;
        for (i, a) in self.trace.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            f.write_str(self.key.name(*a))?;
        }
        f.write_str(">")
    }
}

/// A multiset of traces, stored as distinct variants with frequencies in
/// canonical order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EventLog {
    variants: Vec<(Trace, u64)>,
    total_traces: u64,
}

impl EventLog {
    /// Builds a log from individual traces, merging identical ones.
    pub fn from_traces<I>(traces: I, key: &ActivityKey) -> Self
    where
        I: IntoIterator<Item = Trace>,
    {
        Self::from_weighted(traces.into_iter().map(|t| (t, 1)), key)
    }

    /// Builds a log from `(trace, count)` pairs. Zero counts are dropped and
    /// repeated traces are summed.
    pub fn from_weighted<I>(weighted: I, key: &ActivityKey) -> Self
    where
        I: IntoIterator<Item = (Trace, u64)>,
    {
        let mut counts: HashMap<Trace, u64> = HashMap::new();
        for (t, f) in weighted {
            if f > 0 {
                *counts.entry(t).or_insert(0) += f;
            }
        }
        let mut variants: Vec<(Trace, u64)> = counts.into_iter().collect();
        variants.sort_by(|a, b| key.cmp_traces(&a.0, &b.0));
        let total_traces = variants.iter().map(|(_, f)| f).sum();
        EventLog {
            variants,
            total_traces,
        }
    }

    /// All variants with their frequencies in canonical order.
    pub fn variants(&self) -> &[(Trace, u64)] {
        &self.variants
    }

    pub fn variant_count(&self) -> usize {
        self.variants.len()
    }

    pub fn total_traces(&self) -> u64 {
        self.total_traces
    }

    pub fn is_empty(&self) -> bool {
        self.variants.is_empty()
    }

    pub fn frequency(&self, trace: &Trace) -> Option<u64> {
        self.variants
            .iter()
            .find(|(t, _)| t == trace)
            .map(|(_, f)| *f)
    }

    pub fn alphabet(&self) -> BTreeSet<Activity> {
        self.variants
            .iter()
            .flat_map(|(t, _)| t.iter().copied())
            .collect()
    }

    pub fn longest_variant(&self) -> usize {
        self.variants
            .iter()
            .map(|(t, _)| t.len())
            .max()
            .unwrap_or(0)
    }
}
