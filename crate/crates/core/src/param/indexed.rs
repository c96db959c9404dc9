use std::collections::{BTreeMap, HashMap, HashSet};

use crate::error::{Error, Result};
use crate::lattice::{
    compatible, first_member_below, lub, strict_subinstances_desc, strictly_less_informative, ParamInstance,
    DEFAULT_CAP,
};
use crate::monitor::{BaseMonitor, Verdict};
use crate::param::{Counters, ParametricMonitor, ReportPolicy, VerdictReport};
use crate::trace::ParametricEvent;

/// Engine that indexes each instance by the instances above it.
///
/// For every stored instance `θ`, `above(θ)` lists the stored instances
/// strictly more informative than `θ`. An event whose instance is already
/// stored steps exactly that instance and the ones above it. A new instance
/// is seeded from its most informative stored restriction, and is joined
/// with the compatible instances stored above each of its restrictions.
#[derive(Clone, Debug)]
pub struct IndexedMonitor<M: BaseMonitor> {
    monitor: M,
    policy: ReportPolicy,
    cap: usize,
    states: HashMap<ParamInstance, M::State>,
    above: HashMap<ParamInstance, Vec<ParamInstance>>,
    verdicts: HashMap<ParamInstance, Verdict>,
    counters: Counters,
    skip_join: bool,
}

impl<M: BaseMonitor> IndexedMonitor<M> {
    pub fn new(monitor: M, policy: ReportPolicy) -> Self {
        let mut states = HashMap::new();
        states.insert(ParamInstance::bottom(), monitor.initial());
        IndexedMonitor {
            monitor,
            policy,
            cap: DEFAULT_CAP,
            states,
            above: HashMap::new(),
            verdicts: HashMap::new(),
            counters: Counters::default(),
            skip_join: false,
        }
    }

    pub fn with_cap(mut self, cap: usize) -> Self {
        self.cap = cap;
        self
    }

    /// Fault injection for mutation testing: new instances are never joined
    /// with compatible stored instances.
    #[doc(hidden)]
    pub fn with_skip_join(mut self, on: bool) -> Self {
        self.skip_join = on;
        self
    }

    pub fn monitor(&self) -> &M {
        &self.monitor
    }

    /// Whether `theta` has a stored state.
    pub fn is_defined(&self, theta: &ParamInstance) -> bool {
        self.states.contains_key(theta)
    }

    /// Stored instances strictly more informative than `theta`.
    pub fn above(&self, theta: &ParamInstance) -> &[ParamInstance] {
        self.above.get(theta).map(Vec::as_slice).unwrap_or(&[])
    }

    /// Checks that every index entry lists exactly the stored instances
    /// strictly above its key. Quadratic; meant for tests.
    pub fn check_index(&self) -> std::result::Result<(), String> {
        let mut keys: Vec<&ParamInstance> = self.states.keys().collect();
        keys.extend(self.above.keys());
        for theta in keys {
            let mut expected: Vec<&ParamInstance> =
                self.states.keys().filter(|t| strictly_less_informative(theta, t)).collect();
            let mut actual: Vec<&ParamInstance> = self.above(theta).iter().collect();
            expected.sort();
            actual.sort();
            if expected != actual {
                return Err(format!("index of {theta:?} is {actual:?}, expected {expected:?}"));
            }
        }
        Ok(())
    }

    /// New instances to create for `theta`, each with the instance its state
    /// is copied from, in creation order.
    fn plan_definitions(&mut self, theta: &ParamInstance) -> Result<Vec<(ParamInstance, ParamInstance)>> {
        let subs = strict_subinstances_desc(theta, self.cap)?;
        let mut plan = Vec::new();
        let mut planned = HashSet::new();
        let src = subs.iter().find(|t| self.states.contains_key(*t)).expect("⊥ is always defined");
        plan.push((theta.clone(), src.clone()));
        planned.insert(theta.clone());
        if self.skip_join {
            return Ok(plan);
        }
        let mut checks = 0;
        for restriction in &subs {
            for comp in self.above.get(restriction).into_iter().flatten() {
                checks += 1;
                if !compatible(comp, theta) {
                    continue;
                }
                let joined = lub(comp, theta).defined().expect("compatible instances have a lub");
                if self.states.contains_key(&joined) || planned.contains(&joined) {
                    continue;
                }
                if joined.len() > self.cap {
                    return Err(Error::CapExceeded { size: joined.len(), cap: self.cap });
                }
                planned.insert(joined.clone());
                plan.push((joined, comp.clone()));
            }
        }
        self.counters.compat_checks += checks;
        Ok(plan)
    }

    /// Stores a copy of `src`'s state at `theta` and indexes `theta` under
    /// each of its strict restrictions.
    fn define_to(&mut self, theta: ParamInstance, src: &ParamInstance) {
        debug_assert!(!self.states.contains_key(&theta));
        debug_assert!(strictly_less_informative(src, &theta));
        let state = self.states[src].clone();
        let subs = strict_subinstances_desc(&theta, self.cap).expect("size checked when planning");
        for sub in subs {
            self.above.entry(sub).or_default().push(theta.clone());
        }
        self.states.insert(theta, state);
        self.counters.states_copied += 1;
    }
}

impl<M: BaseMonitor> ParametricMonitor for IndexedMonitor<M> {
    type State = M::State;

    fn process(&mut self, event: &ParametricEvent) -> Result<Vec<VerdictReport>> {
        let e = self.monitor.admit(event)?;
        let theta = &event.instance;
        if !self.states.contains_key(theta) {
            let plan = self.plan_definitions(theta)?;
            for (target, src) in plan {
                self.define_to(target, &src);
            }
        }

        let mut touched: Vec<ParamInstance> = Vec::with_capacity(1 + self.above(theta).len());
        touched.push(theta.clone());
        touched.extend(self.above(theta).iter().cloned());
        touched.sort();

        self.counters.events += 1;
        self.counters.monitor_steps += touched.len() as u64;
        let event_index = self.counters.events as usize;
        let mut reports = Vec::new();
        for target in touched {
            let state = self.states.get_mut(&target).expect("touched instances are defined");
            *state = self.monitor.step_resolved(state, e);
            let verdict = self.monitor.output(state);
            if self.policy.fires(self.verdicts.get(&target), &verdict) {
                reports.push(VerdictReport { instance: target.clone(), verdict, event_index, event: event.clone() });
            }
            self.verdicts.insert(target, verdict);
        }
        Ok(reports)
    }

    fn states(&self) -> BTreeMap<ParamInstance, M::State> {
        self.states.iter().map(|(k, v)| (k.clone(), v.clone())).collect()
    }

    fn verdicts(&self) -> BTreeMap<ParamInstance, Verdict> {
        self.verdicts.iter().map(|(k, v)| (k.clone(), *v)).collect()
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
