//! Base monitors: deterministic Moore-style machines `(S, E, C, ι, σ, γ)`
//! that classify finite event words into verdict categories.
//!
//! [`BaseMonitor`] is the interface the parametric engines are generic over.
//! [`MonitorSpec`] is the concrete monitor built from a property-spec file;
//! it dispatches to one of four plugins (explicit FSM, regex DFA, lock
//! balance counter, success ratio).

use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::lattice::ParamName;
use crate::trace::{BaseEvent, ParametricEvent};

pub mod balance;
pub mod fsm;
pub mod ratio;
pub mod regex;
pub mod spec;

pub use balance::{Balance, BalanceRoles, BalanceState};
pub use fsm::Fsm;
pub use ratio::Ratio;
pub use regex::{compile_pattern, compile_regex, parse_pattern, Dfa, Pattern};
pub use spec::{parse_property_spec, render_property_spec};

/// Output category of a monitor state.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Verdict {
    Match,
    Fail,
    Unknown,
    /// `successes / total`; `total >= successes`.
    Ratio { successes: u64, total: u64 },
}

impl Verdict {
    pub fn tag(&self) -> VerdictTag {
        match self {
            Verdict::Match => VerdictTag::Match,
            Verdict::Fail => VerdictTag::Fail,
            Verdict::Unknown => VerdictTag::Unknown,
            Verdict::Ratio { .. } => VerdictTag::Ratio,
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Verdict::Match => f.write_str("match"),
            Verdict::Fail => f.write_str("fail"),
            Verdict::Unknown => f.write_str("unknown"),
            Verdict::Ratio { successes, total } => write!(f, "{successes}/{total}"),
        }
    }
}

/// Verdict category without payload; the unit of a trigger set.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum VerdictTag {
    Match,
    Fail,
    Unknown,
    Ratio,
}

impl FromStr for VerdictTag {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "match" => Ok(VerdictTag::Match),
            "fail" => Ok(VerdictTag::Fail),
            "unknown" => Ok(VerdictTag::Unknown),
            "ratio" => Ok(VerdictTag::Ratio),
            other => Err(format!("unknown verdict `{other}`")),
        }
    }
}

impl fmt::Display for VerdictTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            VerdictTag::Match => "match",
            VerdictTag::Fail => "fail",
            VerdictTag::Unknown => "unknown",
            VerdictTag::Ratio => "ratio",
        })
    }
}

/// A deterministic monitor over base events.
///
/// States must behave as values: stepping a clone never affects the
/// original, since the parametric engines copy states between instances.
pub trait BaseMonitor {
    type State: Clone + PartialEq + fmt::Debug;

    /// `ι`.
    fn initial(&self) -> Self::State;

    /// Position of `event` in the alphabet, or [`Error::UnknownEvent`].
    fn resolve(&self, event: &BaseEvent) -> Result<usize>;

    /// `σ` on a resolved alphabet index.
    fn step_resolved(&self, state: &Self::State, event: usize) -> Self::State;

    /// `γ`.
    fn output(&self, state: &Self::State) -> Verdict;

    /// Validates a parametric event and resolves its base event. The
    /// default only checks the alphabet.
    fn admit(&self, event: &ParametricEvent) -> Result<usize> {
        self.resolve(&event.base)
    }

    fn step(&self, state: &Self::State, event: &BaseEvent) -> Result<Self::State> {
        Ok(self.step_resolved(state, self.resolve(event)?))
    }

    /// `σ(ι, w)`.
    fn run(&self, word: &[BaseEvent]) -> Result<Self::State> {
        let mut s = self.initial();
        for e in word {
            s = self.step(&s, e)?;
        }
        Ok(s)
    }
}

impl<M: BaseMonitor + ?Sized> BaseMonitor for &M {
    type State = M::State;

    fn initial(&self) -> Self::State {
        (**self).initial()
    }

    fn resolve(&self, event: &BaseEvent) -> Result<usize> {
        (**self).resolve(event)
    }

    fn step_resolved(&self, state: &Self::State, event: usize) -> Self::State {
        (**self).step_resolved(state, event)
    }

    fn output(&self, state: &Self::State) -> Verdict {
        (**self).output(state)
    }

    fn admit(&self, event: &ParametricEvent) -> Result<usize> {
        (**self).admit(event)
    }
}

/// Declared event with its parameter list.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EventDecl {
    pub event: BaseEvent,
    pub params: Vec<ParamName>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum MonitorKind {
    Fsm(Fsm),
    Regex { pattern: String, dfa: Dfa },
    Balance(Balance),
    Ratio(Ratio),
}

impl MonitorKind {
    pub fn name(&self) -> &'static str {
        match self {
            MonitorKind::Fsm(_) => "fsm",
            MonitorKind::Regex { .. } => "regex",
            MonitorKind::Balance(_) => "balance",
            MonitorKind::Ratio(_) => "ratio",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum MonitorState {
    Fsm(usize),
    Dfa(usize),
    Balance(BalanceState),
    Ratio { successes: u64, total: u64 },
}

/// A validated parametric property: parameters, alphabet, base monitor and
/// trigger set.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MonitorSpec {
    pub name: String,
    pub params: Vec<ParamName>,
    pub events: Vec<EventDecl>,
    pub kind: MonitorKind,
    pub trigger: BTreeSet<VerdictTag>,
    index: HashMap<BaseEvent, usize>,
}

impl MonitorSpec {
    /// Assembles a spec, checking event uniqueness and parameter
    /// declarations. `kind` must already be built over `events` in order.
    pub fn new(
        name: impl Into<String>,
        params: Vec<ParamName>,
        events: Vec<EventDecl>,
        kind: MonitorKind,
        trigger: BTreeSet<VerdictTag>,
    ) -> Result<Self> {
        let mut index = HashMap::new();
        for (i, decl) in events.iter().enumerate() {
            if index.insert(decl.event.clone(), i).is_some() {
                return Err(Error::DuplicateEventDecl(decl.event.to_string()));
            }
            for p in &decl.params {
                if !params.contains(p) {
                    return Err(Error::UndeclaredParameter { event: decl.event.to_string(), param: p.to_string() });
                }
            }
        }
        Ok(MonitorSpec { name: name.into(), params, events, kind, trigger, index })
    }

    pub fn alphabet(&self) -> Vec<BaseEvent> {
        self.events.iter().map(|d| d.event.clone()).collect()
    }

    pub fn decl(&self, event: &BaseEvent) -> Option<&EventDecl> {
        self.index.get(event).map(|&i| &self.events[i])
    }

    /// Checks that `event` is declared and binds only declared parameters.
    pub fn check_event(&self, event: &ParametricEvent) -> Result<()> {
        let decl = self.decl(&event.base).ok_or_else(|| Error::UnknownEvent(event.base.to_string()))?;
        for name in event.instance.names() {
            if !decl.params.contains(name) {
                return Err(Error::UndeclaredParameter { event: event.base.to_string(), param: name.to_string() });
            }
        }
        Ok(())
    }

    pub fn triggers(&self, verdict: &Verdict) -> bool {
        self.trigger.contains(&verdict.tag())
    }
}

impl BaseMonitor for MonitorSpec {
    type State = MonitorState;

    fn initial(&self) -> MonitorState {
        match &self.kind {
            MonitorKind::Fsm(m) => MonitorState::Fsm(m.initial()),
            MonitorKind::Regex { dfa, .. } => MonitorState::Dfa(dfa.start()),
            MonitorKind::Balance(_) => MonitorState::Balance(BalanceState::initial()),
            MonitorKind::Ratio(_) => MonitorState::Ratio { successes: 0, total: 0 },
        }
    }

    fn resolve(&self, event: &BaseEvent) -> Result<usize> {
        self.index.get(event).copied().ok_or_else(|| Error::UnknownEvent(event.to_string()))
    }

    fn admit(&self, event: &ParametricEvent) -> Result<usize> {
        self.check_event(event)?;
        self.resolve(&event.base)
    }

    fn step_resolved(&self, state: &MonitorState, event: usize) -> MonitorState {
        match (&self.kind, state) {
            (MonitorKind::Fsm(m), MonitorState::Fsm(s)) => MonitorState::Fsm(m.step(*s, event)),
            (MonitorKind::Regex { dfa, .. }, MonitorState::Dfa(s)) => MonitorState::Dfa(dfa.step(*s, event)),
            (MonitorKind::Balance(b), MonitorState::Balance(s)) => MonitorState::Balance(b.step(s, event)),
            (MonitorKind::Ratio(r), MonitorState::Ratio { successes, total }) => {
                let (successes, total) = r.step((*successes, *total), event);
                MonitorState::Ratio { successes, total }
            }
            (kind, state) => panic!("state {state:?} does not belong to a {} monitor", kind.name()),
        }
    }

    fn output(&self, state: &MonitorState) -> Verdict {
        match (&self.kind, state) {
            (MonitorKind::Fsm(m), MonitorState::Fsm(s)) => m.label(*s),
            (MonitorKind::Regex { dfa, .. }, MonitorState::Dfa(s)) => dfa.label(*s),
            (MonitorKind::Balance(_), MonitorState::Balance(s)) => s.verdict(),
            (MonitorKind::Ratio(_), MonitorState::Ratio { successes, total }) => {
                Verdict::Ratio { successes: *successes, total: *total }
            }
            (kind, state) => panic!("state {state:?} does not belong to a {} monitor", kind.name()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const HASNEXT: &str = "\
property HasNext
params: i
event hasnexttrue(i)
event hasnextfalse(i)
event next(i)
monitor: fsm
state unknown initial
state more
state none
state error
trans unknown hasnexttrue more
trans unknown hasnextfalse none
trans unknown next error
trans more hasnexttrue more
trans more hasnextfalse more
trans more next unknown
trans none hasnexttrue none
trans none hasnextfalse none
trans none next error
trans error hasnexttrue error
trans error hasnextfalse error
trans error next error
label error fail
report: fail
";

    fn ev(s: &str) -> BaseEvent {
        BaseEvent::new(s).unwrap()
    }

    #[test]
    fn hasnext_fsm_steps() {
        let spec = parse_property_spec(HASNEXT.as_bytes()).unwrap();
        let init = spec.initial();
        let MonitorKind::Fsm(fsm) = &spec.kind else { panic!() };
        assert_eq!(fsm.state_name(match init {
            MonitorState::Fsm(s) => s,
            _ => unreachable!(),
        }), "unknown");
        let err = spec.step(&init, &ev("next")).unwrap();
        assert_eq!(spec.output(&err), Verdict::Fail);
        let more = spec.step(&init, &ev("hasnexttrue")).unwrap();
        assert_eq!(more, MonitorState::Fsm(fsm.state_id("more").unwrap()));
        assert_eq!(spec.step(&init, &ev("remove")), Err(Error::UnknownEvent("remove".into())));
    }

    #[test]
    fn ratio_counts() {
        let spec = parse_property_spec(
            b"property SuccessRatio\nparams: a\nevent success(a)\nevent fail(a)\nmonitor: ratio\nreport: ratio\n",
        )
        .unwrap();
        assert_eq!(spec.initial(), MonitorState::Ratio { successes: 0, total: 0 });
        let s = MonitorState::Ratio { successes: 1, total: 2 };
        assert_eq!(spec.step(&s, &ev("success")).unwrap(), MonitorState::Ratio { successes: 2, total: 3 });
        assert_eq!(spec.step(&s, &ev("fail")).unwrap(), MonitorState::Ratio { successes: 1, total: 3 });
        assert_eq!(spec.output(&s).to_string(), "1/2");
    }

    #[test]
    fn stepping_a_clone_leaves_original() {
        let spec = parse_property_spec(HASNEXT.as_bytes()).unwrap();
        let a = spec.initial();
        let b = a.clone();
        let c = spec.step(&b, &ev("next")).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, c);
    }

    #[test]
    fn check_event_rejects_undeclared_params() {
        let spec = parse_property_spec(HASNEXT.as_bytes()).unwrap();
        let ok = ParametricEvent::of("next", &[("i", "i1")]).unwrap();
        assert!(spec.check_event(&ok).is_ok());
        let partial = ParametricEvent::of("next", &[]).unwrap();
        assert!(spec.check_event(&partial).is_ok());
        let bad = ParametricEvent::of("next", &[("c", "c1")]).unwrap();
        assert!(matches!(spec.check_event(&bad), Err(Error::UndeclaredParameter { .. })));
        let unknown = ParametricEvent::of("remove", &[]).unwrap();
        assert!(matches!(spec.check_event(&unknown), Err(Error::UnknownEvent(_))));
    }
}
