//! Online trace slicing.
//!
//! [`Slicer`] consumes a parametric trace one event at a time and keeps a
//! slice for every instance in the lub closure of the instances seen so far.
//! Any slice, including one for an instance that never occurred, is then a
//! single lookup away.

use std::collections::BTreeMap;

use crate::error::Result;
use crate::lattice::{first_member_below, lub, InstanceSet, ParamInstance, DEFAULT_CAP};
use crate::trace::{BaseEvent, BaseTrace, ParametricEvent};

/// Incremental slicer over a parametric event stream.
///
/// Slices are stored as index lists into a shared event log.
#[derive(Clone, Debug)]
pub struct Slicer {
    cap: usize,
    log: Vec<BaseEvent>,
    table: BTreeMap<ParamInstance, Vec<u32>>,
    live_reads: bool,
}

impl Default for Slicer {
    fn default() -> Self {
        Slicer::new(DEFAULT_CAP)
    }
}

impl Slicer {
    /// A slicer holding only the empty slice for ⊥.
    pub fn new(cap: usize) -> Self {
        let mut table = BTreeMap::new();
        table.insert(ParamInstance::bottom(), Vec::new());
        Slicer { cap, log: Vec::new(), table, live_reads: false }
    }

    /// Fault injection for mutation testing: reads during a step see writes
    /// already made in the same step instead of the pre-step table.
    #[doc(hidden)]
    pub fn with_live_reads(mut self, on: bool) -> Self {
        self.live_reads = on;
        self
    }

    pub fn cap(&self) -> usize {
        self.cap
    }

    /// Number of events consumed.
    pub fn events_seen(&self) -> usize {
        self.log.len()
    }

    /// Consumes one event.
    ///
    /// On `CapExceeded` the table is left unchanged.
    pub fn push(&mut self, event: &ParametricEvent) -> Result<()> {
        let theta = &event.instance;
        let targets: Vec<ParamInstance> =
            self.table.keys().filter_map(|t| lub(theta, t).defined()).collect::<InstanceSet>().into_iter().collect();
        let idx = u32::try_from(self.log.len()).expect("trace longer than u32::MAX events");
        self.log.push(event.base.clone());

        if self.live_reads {
            for target in targets {
                let src = match first_member_below(&target, |t| self.table.contains_key(t), self.cap) {
                    Ok(src) => src.expect("⊥ is always present"),
                    Err(e) => {
                        self.log.pop();
                        return Err(e);
                    }
                };
                let mut slice = self.table[&src].clone();
                slice.push(idx);
                self.table.insert(target, slice);
            }
            return Ok(());
        }

        let mut updates = Vec::with_capacity(targets.len());
        for target in targets {
            let src = match first_member_below(&target, |t| self.table.contains_key(t), self.cap) {
                Ok(src) => src.expect("⊥ is always present"),
                Err(e) => {
                    self.log.pop();
                    return Err(e);
                }
            };
            let mut slice = self.table[&src].clone();
            slice.push(idx);
            updates.push((target, slice));
        }
        self.table.extend(updates);
        Ok(())
    }

    /// Consumes a sequence of events.
    pub fn extend<'a, I>(&mut self, events: I) -> Result<()>
    where
        I: IntoIterator<Item = &'a ParametricEvent>,
    {
        events.into_iter().try_for_each(|ev| self.push(ev))
    }

    /// The instances that currently have a stored slice.
    pub fn instances(&self) -> InstanceSet {
        let mut set: InstanceSet = self.table.keys().cloned().collect();
        set.check_closed();
        set
    }

    /// The stored slice of a member instance, if any.
    pub fn stored(&self, theta: &ParamInstance) -> Option<BaseTrace> {
        self.table.get(theta).map(|s| self.render(s))
    }

    /// `τ↾θ` for an arbitrary instance, via the most informative stored
    /// instance below it.
    pub fn slice(&self, theta: &ParamInstance) -> Result<BaseTrace> {
        let src = first_member_below(theta, |t| self.table.contains_key(t), self.cap)?
            .expect("⊥ is always present");
        Ok(self.render(&self.table[&src]))
    }

    /// Every stored `(instance, slice)` pair, smallest instances first.
    pub fn iter(&self) -> impl Iterator<Item = (&ParamInstance, BaseTrace)> + '_ {
        self.table.iter().map(|(k, v)| (k, self.render(v)))
    }

    fn render(&self, indices: &[u32]) -> BaseTrace {
        BaseTrace(indices.iter().map(|&i| self.log[i as usize].clone()).collect())
    }
}
