//! Event queue ordered by (fire time, insertion sequence) and the simulated
//! clock that advances through it.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use super::EngineError;
use crate::Minutes;

/// Simulated clock. Monotonically non-decreasing across event processing.
#[derive(Debug, Clone, Copy, Default)]
pub struct SimClock {
    now: Minutes,
}

impl SimClock {
    pub fn now(&self) -> Minutes {
        self.now
    }

    /// Advances the clock; never moves backwards.
    pub fn advance_to(&mut self, t: Minutes) {
        debug_assert!(t >= self.now, "clock moved backwards: {} -> {}", self.now, t);
        if t > self.now {
            self.now = t;
        }
    }
}

/// A pending event: payload to be delivered at `fire_time`. Events with equal
/// fire times are delivered in insertion order.
#[derive(Debug)]
pub struct Event<P> {
    pub fire_time: Minutes,
    pub sequence: u64,
    pub payload: P,
}

impl<P> PartialEq for Event<P> {
    fn eq(&self, other: &Self) -> bool {
        self.fire_time == other.fire_time && self.sequence == other.sequence
    }
}

impl<P> Eq for Event<P> {}

impl<P> PartialOrd for Event<P> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl<P> Ord for Event<P> {
    // Reversed so the BinaryHeap (a max-heap) pops the earliest event first.
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .fire_time
            .total_cmp(&self.fire_time)
            .then_with(|| other.sequence.cmp(&self.sequence))
    }
}

/// Pending events ordered by (fire_time, sequence).
#[derive(Debug, Default)]
pub struct EventQueue<P> {
    heap: BinaryHeap<Event<P>>,
    next_sequence: u64,
}

impl<P> EventQueue<P> {
    pub fn new() -> Self {
        EventQueue {
            heap: BinaryHeap::new(),
            next_sequence: 0,
        }
    }

    pub fn push(&mut self, fire_time: Minutes, payload: P) {
        let sequence = self.next_sequence;
        self.next_sequence += 1;
        self.heap.push(Event {
            fire_time,
            sequence,
            payload,
        });
    }

    pub fn peek_time(&self) -> Option<Minutes> {
        self.heap.peek().map(|ev| ev.fire_time)
    }

    pub fn pop(&mut self) -> Option<Event<P>> {
        self.heap.pop()
    }

    pub fn len(&self) -> usize {
        self.heap.len()
    }

    pub fn is_empty(&self) -> bool {
        self.heap.is_empty()
    }
}

/// Clock plus event queue. Guards the two causality invariants: events cannot
/// be scheduled in the past, and popping advances the clock to the event's
/// fire time, never beyond the requested horizon.
#[derive(Debug, Default)]
pub struct Scheduler<P> {
    clock: SimClock,
    queue: EventQueue<P>,
}

impl<P> Scheduler<P> {
    pub fn new() -> Self {
        Scheduler {
            clock: SimClock::default(),
            queue: EventQueue::new(),
        }
    }

    pub fn now(&self) -> Minutes {
        self.clock.now()
    }

    pub fn pending(&self) -> usize {
        self.queue.len()
    }

    /// Schedules `payload` to fire at `at`. Scheduling before the current
    /// clock signals a logic bug and is rejected.
    pub fn schedule(&mut self, at: Minutes, payload: P) -> Result<(), EngineError> {
        if !at.is_finite() {
            return Err(EngineError::NonFiniteTime(at));
        }
        if at < self.clock.now() {
            return Err(EngineError::ScheduleInPast {
                fire_time: at,
                now: self.clock.now(),
            });
        }
        self.queue.push(at, payload);
        Ok(())
    }

    /// Pops the next event if it fires at or before `t_end`, advancing the
    /// clock to its fire time. Otherwise advances the clock to `t_end` and
    /// returns `None`, leaving later events in place.
    pub fn next_before(&mut self, t_end: Minutes) -> Option<Event<P>> {
        match self.queue.peek_time() {
            Some(t) if t <= t_end => {
                let ev = self.queue.pop().expect("peeked event present");
                self.clock.advance_to(ev.fire_time);
                Some(ev)
            }
            _ => {
                if t_end > self.clock.now() {
                    self.clock.advance_to(t_end);
                }
                None
            }
        }
    }

    /// Pops the next event regardless of horizon (used to drain in-flight
    /// work after arrivals have stopped).
    pub fn pop_next(&mut self) -> Option<Event<P>> {
        let ev = self.queue.pop()?;
        self.clock.advance_to(ev.fire_time);
        Some(ev)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pops_in_time_order() {
        let mut s: Scheduler<&str> = Scheduler::new();
        s.schedule(5.0, "late").unwrap();
        s.schedule(3.0, "early").unwrap();
        assert_eq!(s.next_before(10.0).unwrap().payload, "early");
        assert_eq!(s.next_before(10.0).unwrap().payload, "late");
        assert_eq!(s.now(), 5.0);
    }

    #[test]
    fn equal_times_pop_in_insertion_order() {
        let mut s: Scheduler<&str> = Scheduler::new();
        s.schedule(7.0, "a").unwrap();
        s.schedule(7.0, "b").unwrap();
        assert_eq!(s.next_before(10.0).unwrap().payload, "a");
        assert_eq!(s.next_before(10.0).unwrap().payload, "b");
    }

    #[test]
    fn schedule_at_clock_now_pops_next() {
        let mut s: Scheduler<&str> = Scheduler::new();
        s.schedule(4.0, "first").unwrap();
        s.next_before(10.0).unwrap();
        s.schedule(4.0, "boundary").unwrap();
        assert_eq!(s.next_before(10.0).unwrap().payload, "boundary");
    }

    #[test]
    fn rejects_past_and_non_finite_times() {
        let mut s: Scheduler<&str> = Scheduler::new();
        s.schedule(4.0, "x").unwrap();
        s.next_before(10.0);
        assert!(matches!(
            s.schedule(3.0, "past"),
            Err(EngineError::ScheduleInPast { .. })
        ));
        assert!(matches!(
            s.schedule(f64::NAN, "nan"),
            Err(EngineError::NonFiniteTime(_))
        ));
    }

    #[test]
    fn empty_queue_advances_clock_to_horizon() {
        let mut s: Scheduler<()> = Scheduler::new();
        assert!(s.next_before(42.0).is_none());
        assert_eq!(s.now(), 42.0);
    }

    #[test]
    fn horizon_leaves_later_events_pending() {
        let mut s: Scheduler<&str> = Scheduler::new();
        s.schedule(20.0, "later").unwrap();
        assert!(s.next_before(10.0).is_none());
        assert_eq!(s.now(), 10.0);
        assert_eq!(s.pending(), 1);
        assert_eq!(s.next_before(30.0).unwrap().payload, "later");
    }
}
