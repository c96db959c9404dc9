//! Success-ratio monitor: counts every event and the successes among them.

/// Counter pair `(s, t)`; `t` increments on every event, `s` only on the
/// success event.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Ratio {
    pub success: usize,
}

impl Ratio {
    pub fn step(&self, (successes, total): (u64, u64), event: usize) -> (u64, u64) {
        (successes + u64::from(event == self.success), total + 1)
    }
}
