//! The shared politeness gate: one pause signal for every worker.
//!
//! A rate-limit response trips the gate, pausing all new requests for the
//! current backoff window; consecutive trips double the window up to a cap,
//! and a successful response resets it.

use std::sync::Mutex;
use std::time::{Duration, Instant};

#[derive(Debug)]
struct GateState {
    pause_until: Option<Instant>,
    backoff: Duration,
}

#[derive(Debug)]
pub struct Gate {
    initial: Duration,
    cap: Duration,
    state: Mutex<GateState>,
}

impl Gate {
    pub fn new(initial: Duration, cap: Duration) -> Gate {
        Gate {
            initial,
            cap,
            state: Mutex::new(GateState { pause_until: None, backoff: initial }),
        }
    }

    pub fn from_secs(initial_secs: u64, cap_secs: u64) -> Gate {
        Gate::new(
            Duration::from_secs(initial_secs),
            Duration::from_secs(cap_secs),
        )
    }

    /// Record a rate-limit response: pause everyone for the current backoff
    /// window and double the next one (capped). Returns the applied pause.
    pub fn trip(&self) -> Duration {
        let mut state = self.state.lock().expect("gate lock");
        let pause = state.backoff;
        let until = Instant::now() + pause;
        state.pause_until = Some(match state.pause_until {
            Some(existing) if existing > until => existing,
            _ => until,
        });
        state.backoff = (state.backoff * 2).min(self.cap);
        pause
    }

    /// Record a successful response: the next trip starts over at the
    /// initial window. An active pause keeps running.
    pub fn reset(&self) {
        let mut state = self.state.lock().expect("gate lock");
        state.backoff = self.initial;
    }

    /// Time left on the active pause, if any.
    pub fn pause_remaining(&self) -> Option<Duration> {
        let mut state = self.state.lock().expect("gate lock");
        match state.pause_until {
            Some(until) => {
                let now = Instant::now();
                if until <= now {
                    state.pause_until = None;
                    None
                } else {
                    Some(until - now)
                }
            }
            None => None,
        }
    }

    /// Block until no pause is active. Loops because another worker may
    /// extend the pause while this one sleeps.
    pub fn wait_ready(&self) {
        while let Some(remaining) = self.pause_remaining() {
            std::thread::sleep(remaining);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::sync::Arc;

    fn fast_gate() -> Gate {
        Gate::new(Duration::from_millis(20), Duration::from_millis(70))
    }

    #[test]
    fn trip_pauses_and_doubles() {
        let gate = fast_gate();
        assert!(gate.pause_remaining().is_none());
        assert_eq!(gate.trip(), Duration::from_millis(20));
        assert!(gate.pause_remaining().is_some());
        assert_eq!(gate.trip(), Duration::from_millis(40));
        assert_eq!(gate.trip(), Duration::from_millis(70)); // capped
        assert_eq!(gate.trip(), Duration::from_millis(70));
    }

    #[test]
    fn reset_restores_initial_backoff() {
        let gate = fast_gate();
        gate.trip();
        gate.trip();
        gate.reset();
        assert_eq!(gate.trip(), Duration::from_millis(20));
    }

    #[test]
    fn pause_expires() {
        let gate = Gate::new(Duration::from_millis(10), Duration::from_millis(40));
        gate.trip();
        let started = Instant::now();
        gate.wait_ready();
        assert!(started.elapsed() >= Duration::from_millis(9));
        assert!(gate.pause_remaining().is_none());
    }

    #[test]
    fn concurrent_trips_never_exceed_cap() {
        let gate = Arc::new(fast_gate());
        std::thread::scope(|scope| {
            for _ in 0..8 {
                let gate = Arc::clone(&gate);
                scope.spawn(move || {
                    for _ in 0..5 {
                        assert!(gate.trip() <= Duration::from_millis(70));
                    }
                });
            }
        });
    }

    #[test]
    fn longer_existing_pause_is_kept() {
        let gate = Gate::new(Duration::from_millis(50), Duration::from_millis(400));
        gate.trip(); // pause 50ms, next 100ms
        gate.trip(); // pause 100ms from now, further out than the first
        let remaining = gate.pause_remaining().unwrap();
        assert!(remaining > Duration::from_millis(60), "remaining {remaining:?}");
    }
}
