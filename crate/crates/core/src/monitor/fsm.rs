//! Explicit finite-state monitors.

use crate::error::{Error, Result};
use crate::monitor::Verdict;

/// Name given to the implicit sink that absorbs undefined transitions.
pub const SINK_STATE: &str = "<sink>";

/// A total deterministic FSM over alphabet indices, one verdict per state.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Fsm {
    states: Vec<String>,
    initial: usize,
    alphabet_size: usize,
    next: Vec<usize>,
    labels: Vec<Verdict>,
}

impl Fsm {
    /// Builds the machine from `(source, event, target)` triples.
    ///
    /// Transitions left undefined go to an extra sink state labelled
    /// `fail`, added only when needed. A pair defined twice is an error.
    pub fn new(
        states: Vec<String>,
        initial: usize,
        alphabet_size: usize,
        transitions: &[(usize, usize, usize)],
        labels: Vec<Verdict>,
    ) -> Result<Self> {
        let n = states.len();
        let bad = |message: String| Error::SpecSyntax { line: 0, message };
        if initial >= n || labels.len() != n {
            return Err(bad("malformed state table".into()));
        }
        let mut table: Vec<Option<usize>> = vec![None; n * alphabet_size];
        for &(s, e, t) in transitions {
            if s >= n || t >= n || e >= alphabet_size {
                return Err(bad("transition out of range".into()));
            }
            let slot = &mut table[s * alphabet_size + e];
            if slot.is_some() {
                return Err(bad(format!("transition from `{}` on event #{e} defined twice", states[s])));
            }
            *slot = Some(t);
        }
        let mut states = states;
        let mut labels = labels;
        let needs_sink = table.iter().any(Option::is_none);
        if needs_sink {
            states.push(SINK_STATE.to_string());
            labels.push(Verdict::Fail);
        }
        let sink = n;
        let mut next: Vec<usize> = table.into_iter().map(|t| t.unwrap_or(sink)).collect();
        if needs_sink {
            next.extend(std::iter::repeat(sink).take(alphabet_size));
        }
        Ok(Fsm { states, initial, alphabet_size, next, labels })
    }

    pub fn initial(&self) -> usize {
        self.initial
    }

    pub fn step(&self, state: usize, event: usize) -> usize {
        self.next[state * self.alphabet_size + event]
    }

    pub fn label(&self, state: usize) -> Verdict {
        self.labels[state]
    }

    pub fn state_count(&self) -> usize {
        self.states.len()
    }

    pub fn state_name(&self, state: usize) -> &str {
        &self.states[state]
    }

    pub fn state_id(&self, name: &str) -> Option<usize> {
        self.states.iter().position(|s| s == name)
    }
}
