//! Parametric monitoring.
//!
//! A parametric monitor behaves as one copy of a base monitor per parameter
//! instance, each fed exactly the slice for its instance. Two engines
//! realize this online:
//!
//! * [`FullScanMonitor`] combines every event with the whole instance
//!   domain on each step.
//! * [`IndexedMonitor`] keeps, for each instance, the more informative
//!   instances defined so far, so an event only touches the states it
//!   affects and the domain is joined only when a new instance appears.
//!
//! [`reference_verdict`] is the definitional semantics both are tested
//! against.

mod full_scan;
mod indexed;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

pub use full_scan::FullScanMonitor;
pub use indexed::IndexedMonitor;

use crate::error::Result;
use crate::lattice::{less_informative, ParamInstance};
use crate::monitor::{BaseMonitor, Verdict, VerdictTag};
use crate::trace::{ParametricEvent, ParametricTrace};

/// One verdict emitted while monitoring.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VerdictReport {
    pub instance: ParamInstance,
    pub verdict: Verdict,
    /// 1-based position of the triggering event.
    pub event_index: usize,
    pub event: ParametricEvent,
}

impl fmt::Display for VerdictReport {
    /// `<index>\t<verdict>\t<instance>\t<event name>`
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}\t{}\t{}\t{}", self.event_index, self.verdict, self.instance.canonical(), self.event.base)
    }
}

/// Instrumentation shared by both engines. All counts are cumulative.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Counters {
    /// Events processed.
    pub events: u64,
    /// Base-monitor transitions taken.
    pub monitor_steps: u64,
    /// Pairwise compatibility tests between the event's instance and a
    /// stored instance.
    pub compat_checks: u64,
    /// Passes over the entire instance domain.
    pub domain_scans: u64,
    /// Instances created by copying a less informative state.
    pub states_copied: u64,
}

/// Which verdicts are reported, and whether repeats are suppressed.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReportPolicy {
    pub trigger: BTreeSet<VerdictTag>,
    /// Report every triggering assignment, not only changes.
    pub every: bool,
}

impl ReportPolicy {
    pub fn new(trigger: BTreeSet<VerdictTag>) -> Self {
        ReportPolicy { trigger, every: false }
    }

    /// Whether assigning `new` over `old` produces a report.
    pub fn fires(&self, old: Option<&Verdict>, new: &Verdict) -> bool {
        self.trigger.contains(&new.tag()) && (self.every || old != Some(new))
    }
}

/// Interface shared by the online engines.
pub trait ParametricMonitor {
    type State: Clone + PartialEq + fmt::Debug;

    /// Consumes one event and returns the reports it triggers, ordered by
    /// instance. On error the tables are left unchanged.
    fn process(&mut self, event: &ParametricEvent) -> Result<Vec<VerdictReport>>;

    /// Snapshot of the state table.
    fn states(&self) -> BTreeMap<ParamInstance, Self::State>;

    /// Snapshot of the verdict table. Only instances stepped at least once
    /// have a verdict.
    fn verdicts(&self) -> BTreeMap<ParamInstance, Verdict>;

    /// The parametric verdict for any instance, read from the most
    /// informative stored state below it.
    fn verdict_for(&self, theta: &ParamInstance) -> Result<Verdict>;

    fn counters(&self) -> Counters;

    /// Number of instances with a stored state.
    fn instance_count(&self) -> usize;
}

/// Verdict of the base monitor on exactly the events of `tau` whose instance
/// is below `theta`. Every event is validated, relevant or not.
pub fn reference_verdict<M: BaseMonitor>(monitor: &M, tau: &ParametricTrace, theta: &ParamInstance) -> Result<Verdict> {
    let mut state = monitor.initial();
    for ev in tau {
        let e = monitor.admit(ev)?;
        if less_informative(&ev.instance, theta) {
            state = monitor.step_resolved(&state, e);
        }
    }
    Ok(monitor.output(&state))
}

/// Runs an engine over a whole trace, collecting every report.
pub fn run_to_end<P: ParametricMonitor>(engine: &mut P, tau: &ParametricTrace) -> Result<Vec<VerdictReport>> {
    let mut out = Vec::new();
    for ev in tau {
        out.extend(engine.process(ev)?);
    }
    Ok(out)
}
