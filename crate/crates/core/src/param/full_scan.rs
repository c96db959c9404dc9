use std::collections::BTreeMap;

use crate::error::Result;
use crate::lattice::{first_member_below, lub, InstanceSet, ParamInstance, DEFAULT_CAP};
use crate::monitor::{BaseMonitor, Verdict};
use crate::param::{Counters, ParametricMonitor, ReportPolicy, VerdictReport};
use crate::trace::ParametricEvent;

/// Engine that joins each event's instance with the entire domain.
///
/// Every event costs a pass over all stored instances, which makes this the
/// simple baseline for [`IndexedMonitor`](crate::param::IndexedMonitor).
#[derive(Clone, Debug)]
pub struct FullScanMonitor<M: BaseMonitor> {
    monitor: M,
    policy: ReportPolicy,
    cap: usize,
    states: BTreeMap<ParamInstance, M::State>,
    verdicts: BTreeMap<ParamInstance, Verdict>,
    counters: Counters,
}

impl<M: BaseMonitor> FullScanMonitor<M> {
    pub fn new(monitor: M, policy: ReportPolicy) -> Self {
        let mut states = BTreeMap::new();
        states.insert(ParamInstance::bottom(), monitor.initial());
        FullScanMonitor { monitor, policy, cap: DEFAULT_CAP, states, verdicts: BTreeMap::new(), counters: Counters::default() }
    }

    pub fn with_cap(mut self, cap: usize) -> Self {
        self.cap = cap;
        self
    }

    pub fn monitor(&self) -> &M {
        &self.monitor
    }

    /// The instances the next event with instance `theta` would step.
    pub fn affected_by(&self, theta: &ParamInstance) -> InstanceSet {
        self.states.keys().filter_map(|t| lub(theta, t).defined()).collect()
    }
}

impl<M: BaseMonitor> ParametricMonitor for FullScanMonitor<M> {
    type State = M::State;

    fn process(&mut self, event: &ParametricEvent) -> Result<Vec<VerdictReport>> {
        let e = self.monitor.admit(event)?;
        let theta = &event.instance;
        let targets = self.affected_by(theta);

        let mut updates = Vec::with_capacity(targets.len());
        for target in targets {
            let src = first_member_below(&target, |t| self.states.contains_key(t), self.cap)?
                .expect("⊥ is always defined");
            let next = self.monitor.step_resolved(&self.states[&src], e);
            updates.push((target, next));
        }

        self.counters.events += 1;
        self.counters.domain_scans += 1;
        self.counters.compat_checks += self.states.len() as u64;
        self.counters.monitor_steps += updates.len() as u64;
        let event_index = self.counters.events as usize;
        let mut reports = Vec::new();
        for (target, next) in updates {
            if !self.states.contains_key(&target) {
                self.counters.states_copied += 1;
            }
            let verdict = self.monitor.output(&next);
            if self.policy.fires(self.verdicts.get(&target), &verdict) {
                reports.push(VerdictReport { instance: target.clone(), verdict, event_index, event: event.clone() });
            }
            self.verdicts.insert(target.clone(), verdict);
            self.states.insert(target, next);
        }
        Ok(reports)
    }

    fn states(&self) -> BTreeMap<ParamInstance, M::State> {
        self.states.clone()
    }

    fn verdicts(&self) -> BTreeMap<ParamInstance, Verdict> {
        self.verdicts.clone()
    }

    fn verdict_for(&self, theta: &ParamInstance) -> Result<Verdict> {
        let src = first_member_below(theta, |t| self.states.contains_key(t), self.cap)?.expect("⊥ is always defined");
        Ok(self.monitor.output(&self.states[&src]))
    }

    fn counters(&self) -> Counters {
        self.counters
    }

    fn instance_count(&self) -> usize {
        self.states.len()
    }
}
