//! Lock-balance monitor for a single lock.
//!
//! Within every procedure (`begin` … `end`) the lock must be released as
//! many times as it is acquired, and never released more often than
//! acquired. The state keeps one counter per open procedure, plus the
//! top level, so it is unbounded.

use crate::monitor::Verdict;

/// Alphabet indices playing each role; events without a role are ignored.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BalanceRoles {
    pub begin: usize,
    pub end: usize,
    pub acquire: usize,
    pub release: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Balance {
    pub roles: BalanceRoles,
}

/// Per-procedure acquire counters, outermost first. `levels[0]` is the top
/// level outside any procedure. A violated state is absorbing.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct BalanceState {
    levels: Vec<u64>,
    failed: bool,
}

impl BalanceState {
    pub fn initial() -> Self {
        BalanceState { levels: vec![0], failed: false }
    }

    fn violated() -> Self {
        BalanceState { levels: Vec::new(), failed: true }
    }

    /// Procedure nesting depth (0 outside any procedure).
    pub fn depth(&self) -> usize {
        self.levels.len().saturating_sub(1)
    }

    /// Acquire count in the innermost open procedure.
    pub fn counter(&self) -> u64 {
        self.levels.last().copied().unwrap_or(0)
    }

    pub fn is_violated(&self) -> bool {
        self.failed
    }

    pub fn verdict(&self) -> Verdict {
        if self.failed {
            Verdict::Fail
        } else if self.levels == [0] {
            Verdict::Match
        } else {
            Verdict::Unknown
        }
    }
}

impl Balance {
    pub fn step(&self, state: &BalanceState, event: usize) -> BalanceState {
        if state.failed {
            return state.clone();
        }
        let r = &self.roles;
        let mut next = state.clone();
        if event == r.begin {
            next.levels.push(0);
        } else if event == r.end {
            if next.levels.len() < 2 || next.counter() != 0 {
                return BalanceState::violated();
            }
            next.levels.pop();
        } else if event == r.acquire {
            *next.levels.last_mut().expect("nonempty while not violated") += 1;
        } else if event == r.release {
            let top = next.levels.last_mut().expect("nonempty while not violated");
            if *top == 0 {
                return BalanceState::violated();
            }
            *top -= 1;
        }
        next
    }
}
