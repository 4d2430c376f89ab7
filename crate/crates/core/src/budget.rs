//! Cooperative time budgets.
//!
//! Long-running searches poll a [`Deadline`] between candidates. The core
//! crate never reads a clock itself.

use core::cell::Cell;

pub trait Deadline {
    fn expired(&self) -> bool;
}

/// A deadline that never expires.
#[derive(Clone, Copy, Debug, Default)]
pub struct Unlimited;

impl Deadline for Unlimited {
    fn expired(&self) -> bool {
        false
    }
}

impl<D: Deadline + ?Sized> Deadline for &D {
    fn expired(&self) -> bool {
        (**self).expired()
    }
}

/// Expires after a fixed number of polls. Deterministic stand-in for a clock
/// in tests.
#[derive(Debug)]
pub struct PollBudget {
    left: Cell<u64>,
}

impl PollBudget {
    pub fn new(polls: u64) -> Self {
        PollBudget { left: Cell::new(polls) }
    }
}

impl Deadline for PollBudget {
    fn expired(&self) -> bool {
        let n = self.left.get();
        if n == 0 {
            return true;
        }
        self.left.set(n - 1);
        false
    }
}

/// Monotonic milliseconds since some fixed origin.
pub trait Clock {
    fn now_ms(&self) -> u64;
}

/// Clock that advances by a fixed step each time it is read.
#[derive(Debug, Default)]
pub struct StepClock {
    now: Cell<u64>,
    step: u64,
}

impl StepClock {
    pub fn new(step: u64) -> Self {
        StepClock { now: Cell::new(0), step }
    }
}

impl Clock for StepClock {
    fn now_ms(&self) -> u64 {
        let t = self.now.get();
        self.now.set(t + self.step);
        t
    }
}

/// Deadline derived from a clock: expires once `now >= at`.
pub struct ClockDeadline<'a, C: Clock + ?Sized> {
    clock: &'a C,
    at: Option<u64>,
}

impl<'a, C: Clock + ?Sized> ClockDeadline<'a, C> {
    pub fn after(clock: &'a C, millis: Option<u64>) -> Self {
        let at = millis.map(|m| clock.now_ms().saturating_add(m));
        ClockDeadline { clock, at }
    }
}

impl<C: Clock + ?Sized> Deadline for ClockDeadline<'_, C> {
    fn expired(&self) -> bool {
        match self.at {
            None => false,
            Some(at) => self.clock.now_ms() >= at,
        }
    }
}
