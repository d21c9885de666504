use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::SimError;

/// A scheduled event: fires at `time`, ties broken by insertion `seq`.
#[derive(Debug, Clone)]
pub struct SimEvent<E> {
    pub time: f64,
    pub seq: u64,
    pub payload: E,
}

impl<E> PartialEq for SimEvent<E> {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl<E> Eq for SimEvent<E> {}

impl<E> PartialOrd for SimEvent<E> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl<E> Ord for SimEvent<E> {
    // BinaryHeap is a max-heap, so the earliest (time, seq) must compare greatest.
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .time
            .total_cmp(&self.time)
            .then_with(|| other.seq.cmp(&self.seq))
    }
}

/// Priority queue of future events plus the simulation clock.
#[derive(Debug)]
pub struct EventQueue<E> {
    heap: BinaryHeap<SimEvent<E>>,
    now: f64,
    next_seq: u64,
}

impl<E> Default for EventQueue<E> {
    fn default() -> Self {
        Self::new()
    }
}

impl<E> EventQueue<E> {
    pub fn new() -> Self {
        Self { heap: BinaryHeap::new(), now: 0.0, next_seq: 0 }
    }

    pub fn now(&self) -> f64 {
        self.now
    }

    pub fn len(&self) -> usize {
        self.heap.len()
    }

    pub fn is_empty(&self) -> bool {
        self.heap.is_empty()
    }

    pub fn schedule(&mut self, at: f64, payload: E) -> Result<u64, SimError> {
        if !(at >= self.now) {
            return Err(SimError::PastEvent { at, now: self.now });
        }
        let seq = self.next_seq;
        self.next_seq += 1;
        self.heap.push(SimEvent { time: at, seq, payload });
        Ok(seq)
    }

    /// Schedules `delay` seconds from now. Negative delays are clamped to zero.
    pub fn schedule_in(&mut self, delay: f64, payload: E) -> u64 {
        let at = self.now + delay.max(0.0);
        self.schedule(at, payload).expect("relative schedule is never in the past")
    }

    pub fn peek_time(&self) -> Option<f64> {
        self.heap.peek().map(|e| e.time)
    }

    /// Pops the next event and moves the clock to it; `None` once the
    /// queue has drained.
    pub fn advance(&mut self) -> Option<SimEvent<E>> {
        let ev = self.heap.pop()?;
        self.now = ev.time;
        Some(ev)
    }
}
