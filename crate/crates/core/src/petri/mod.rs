//! Labeled place/transition nets with initial and final markings.

mod pnml;

use std::collections::{HashSet, VecDeque};
use std::fmt;

pub use self::pnml::{parse_pnml, PnmlOptions};

use crate::error::{Error, Result};
use crate::log::{Activity, ActivityKey, Trace};

/// Default bound on distinct states visited by exhaustive searches.
pub const DEFAULT_STATE_CAP: usize = 1_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PlaceId(pub usize);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TransitionId(pub usize);

impl fmt::Display for TransitionId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "t#{}", self.0)
    }
}

/// Token counts indexed by place.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Marking(Vec<u32>);

impl Marking {
    pub fn empty(places: usize) -> Self {
        Marking(vec![0; places])
    }

    pub fn tokens(&self, place: PlaceId) -> u32 {
        self.0[place.0]
    }

    pub fn set(&mut self, place: PlaceId, tokens: u32) {
        self.0[place.0] = tokens;
    }

    pub fn total(&self) -> u64 {
        self.0.iter().map(|&t| u64::from(t)).sum()
    }

    pub fn as_slice(&self) -> &[u32] {
        &self.0
    }
}

#[derive(Debug, Clone)]
pub struct Place {
    pub id: String,
}

#[derive(Debug, Clone)]
pub struct Transition {
    pub id: String,
    /// `None` for silent transitions.
    pub label: Option<Activity>,
    pub inputs: Vec<(PlaceId, u32)>,
    pub outputs: Vec<(PlaceId, u32)>,
}

impl Transition {
    pub fn is_silent(&self) -> bool {
        self.label.is_none()
    }
}

/// A labeled Petri net with designated initial and final markings.
#[derive(Debug, Clone)]
pub struct SystemNet {
    places: Vec<Place>,
    transitions: Vec<Transition>,
    initial: Marking,
    final_marking: Marking,
    /// transitions grouped by label, for synchronous-move lookup
    by_label: Vec<Vec<TransitionId>>,
}

impl SystemNet {
    pub fn places(&self) -> &[Place] {
        &self.places
    }

    pub fn transitions(&self) -> &[Transition] {
        &self.transitions
    }

    pub fn transition(&self, t: TransitionId) -> &Transition {
        &self.transitions[t.0]
    }

    pub fn label(&self, t: TransitionId) -> Option<Activity> {
        self.transitions[t.0].label
    }

    pub fn initial_marking(&self) -> &Marking {
        &self.initial
    }

    pub fn final_marking(&self) -> &Marking {
        &self.final_marking
    }

    pub fn place_index(&self, id: &str) -> Option<PlaceId> {
        self.places.iter().position(|p| p.id == id).map(PlaceId)
    }

    pub fn transition_index(&self, id: &str) -> Option<TransitionId> {
        self.transitions
            .iter()
            .position(|t| t.id == id)
            .map(TransitionId)
    }

    /// Transitions carrying `activity`, in id order.
    pub fn transitions_labeled(&self, activity: Activity) -> &[TransitionId] {
        self.by_label
            .get(activity.index())
            .map(Vec::as_slice)
            .unwrap_or(&[])
    }

    pub fn has_label(&self, activity: Activity) -> bool {
        !self.transitions_labeled(activity).is_empty()
    }

    pub fn is_enabled(&self, m: &Marking, t: TransitionId) -> bool {
        self.transitions[t.0]
            .inputs
            .iter()
            .all(|&(p, w)| m.0[p.0] >= w)
    }

    /// All transitions enabled in `m`, in id order.
    pub fn enabled(&self, m: &Marking) -> Vec<TransitionId> {
        (0..self.transitions.len())
            .map(TransitionId)
            .filter(|&t| self.is_enabled(m, t))
            .collect()
    }

    /// Fires `t` in `m`. Fails if `t` is not enabled.
    pub fn fire(&self, m: &Marking, t: TransitionId) -> Result<Marking> {
        if !self.is_enabled(m, t) {
            return Err(Error::NotEnabled(self.transitions[t.0].id.clone()));
        }
        Ok(self.fire_unchecked(m, t))
    }

    pub(crate) fn fire_unchecked(&self, m: &Marking, t: TransitionId) -> Marking {
        let tr = &self.transitions[t.0];
        let mut next = m.clone();
        for &(p, w) in &tr.inputs {
            next.0[p.0] -= w;
        }
        for &(p, w) in &tr.outputs {
            next.0[p.0] += w;
        }
        next
    }

    pub fn is_final(&self, m: &Marking) -> bool {
        *m == self.final_marking
    }

    /// Visible projection of a transition sequence.
    pub fn visible_projection<I>(&self, firing: I) -> Trace
    where
        I: IntoIterator<Item = TransitionId>,
    {
        firing.into_iter().filter_map(|t| self.label(t)).collect()
    }

    /// Every visible trace of a complete firing sequence with at most
    /// `max_length` visible transitions.
    ///
    /// Breadth-first search over `(marking, visible prefix)` states; silent
    /// cycles collapse onto already visited states. Fails once more than
    /// `state_cap` distinct states are discovered.
    pub fn enumerate_visible_traces(
        &self,
        max_length: usize,
        state_cap: usize,
    ) -> Result<HashSet<Trace>> {
        let mut found = HashSet::new();
        let mut seen: HashSet<(Marking, Trace)> = HashSet::new();
        let mut queue = VecDeque::new();
        let start = (self.initial.clone(), Trace::empty());
        seen.insert(start.clone());
        queue.push_back(start);

        while let Some((m, prefix)) = queue.pop_front() {
            if self.is_final(&m) {
                found.insert(prefix.clone());
            }
            for t in self.enabled(&m) {
                let label = self.label(t);
                if label.is_some() && prefix.len() >= max_length {
                    continue;
                }
                let next_m = self.fire_unchecked(&m, t);
                let mut next_prefix = prefix.clone();
                if let Some(a) = label {
                    next_prefix.0.push(a);
                }
                let state = (next_m, next_prefix);
                if !seen.contains(&state) {
                    if seen.len() >= state_cap {
                        return Err(Error::Resource(format!(
                            "visible trace enumeration exceeded {state_cap} states"
                        )));
                    }
                    seen.insert(state.clone());
                    queue.push_back(state);
                }
            }
        }
        Ok(found)
    }

    pub fn describe(&self, key: &ActivityKey, t: TransitionId) -> String {
        let tr = &self.transitions[t.0];
        match tr.label {
            Some(a) => format!("{}({})", tr.id, key.name(a)),
            None => format!("{}(tau)", tr.id),
        }
    }
}

/// Incremental constructor for [`SystemNet`].
#[derive(Debug, Default)]
pub struct NetBuilder {
    places: Vec<Place>,
    transitions: Vec<Transition>,
    initial: Vec<(PlaceId, u32)>,
    final_marking: Vec<(PlaceId, u32)>,
}

impl NetBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn place(&mut self, id: impl Into<String>) -> PlaceId {
        self.places.push(Place { id: id.into() });
        PlaceId(self.places.len() - 1)
    }

    pub fn transition(&mut self, id: impl Into<String>, label: Option<Activity>) -> TransitionId {
        self.transitions.push(Transition {
            id: id.into(),
            label,
            inputs: Vec::new(),
            outputs: Vec::new(),
        });
        TransitionId(self.transitions.len() - 1)
    }

    pub fn input(&mut self, place: PlaceId, t: TransitionId, weight: u32) -> &mut Self {
        add_weight(&mut self.transitions[t.0].inputs, place, weight);
        self
    }

    pub fn output(&mut self, t: TransitionId, place: PlaceId, weight: u32) -> &mut Self {
        add_weight(&mut self.transitions[t.0].outputs, place, weight);
        self
    }

    pub fn initial(&mut self, place: PlaceId, tokens: u32) -> &mut Self {
        self.initial.push((place, tokens));
        self
    }

    pub fn final_tokens(&mut self, place: PlaceId, tokens: u32) -> &mut Self {
        self.final_marking.push((place, tokens));
        self
    }

    pub fn place_count(&self) -> usize {
        self.places.len()
    }

    pub fn build(self) -> Result<SystemNet> {
        if self.transitions.is_empty() {
            return Err(Error::Structural("net has no transitions".into()));
        }
        let n = self.places.len();
        let check = |p: PlaceId, what: &str| {
            if p.0 >= n {
                Err(Error::Structural(format!(
                    "{what} references unknown place #{}",
                    p.0
                )))
            } else {
                Ok(())
            }
        };
        for t in &self.transitions {
            for &(p, _) in t.inputs.iter().chain(&t.outputs) {
                check(p, &format!("transition {}", t.id))?;
            }
        }
        let mut initial = Marking::empty(n);
        for &(p, k) in &self.initial {
            check(p, "initial marking")?;
            initial.0[p.0] += k;
        }
        let mut final_marking = Marking::empty(n);
        for &(p, k) in &self.final_marking {
            check(p, "final marking")?;
            final_marking.0[p.0] += k;
        }
        let mut by_label: Vec<Vec<TransitionId>> = Vec::new();
        for (i, t) in self.transitions.iter().enumerate() {
            if let Some(a) = t.label {
                if by_label.len() <= a.index() {
                    by_label.resize(a.index() + 1, Vec::new());
                }
                by_label[a.index()].push(TransitionId(i));
            }
        }
        Ok(SystemNet {
            places: self.places,
            transitions: self.transitions,
            initial,
            final_marking,
            by_label,
        })
    }
}

fn add_weight(arcs: &mut Vec<(PlaceId, u32)>, place: PlaceId, weight: u32) {
    match arcs.iter_mut().find(|(p, _)| *p == place) {
        Some((_, w)) => *w += weight,
        None => arcs.push((place, weight)),
    }
}
