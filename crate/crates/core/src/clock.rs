//! Injected time source so issuance and ledger contents are reproducible.

use std::sync::atomic::{AtomicU64, Ordering};
use std::time::{SystemTime, UNIX_EPOCH};

/// Supplies the UTC timestamp (whole seconds) recorded in transactions.
pub trait Clock {
    fn unix_now(&self) -> u64;
}

/// Wall clock.
#[derive(Debug, Clone, Copy, Default)]
pub struct SystemClock;

impl Clock for SystemClock {
    fn unix_now(&self) -> u64 {
        SystemTime::now()
            .duration_since(UNIX_EPOCH)
            .expect("system clock before unix epoch")
            .as_secs()
    }
}

/// Always returns the same instant.
#[derive(Debug, Clone, Copy)]
pub struct FixedClock(pub u64);

impl Clock for FixedClock {
    fn unix_now(&self) -> u64 {
        self.0
    }
}

/// Starts at a given instant and advances by a fixed step per reading.
#[derive(Debug)]
pub struct StepClock {
    next: AtomicU64,
    step: u64,
}

impl StepClock {
    pub fn new(start: u64, step: u64) -> Self {
        StepClock {
            next: AtomicU64::new(start),
            step,
        }
    }
}

impl Clock for StepClock {
    fn unix_now(&self) -> u64 {
        self.next.fetch_add(self.step, Ordering::Relaxed)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn step_clock_advances() {
        let clock = StepClock::new(100, 5);
        assert_eq!(clock.unix_now(), 100);
        assert_eq!(clock.unix_now(), 105);
        assert_eq!(FixedClock(7).unix_now(), 7);
    }
}
