use std::cmp::Ordering;
use std::collections::{BinaryHeap, HashSet};

use crate::error::{Error, Result};

/// Identifies a scheduled event so it can be cancelled.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct TimerHandle(u64);

#[derive(Debug)]
struct Scheduled<P> {
    time: f64,
    seq: u64,
    payload: P,
}

impl<P> PartialEq for Scheduled<P> {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl<P> Eq for Scheduled<P> {}

impl<P> PartialOrd for Scheduled<P> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

// Reversed so the max-heap pops the earliest (time, seq) first.
impl<P> Ord for Scheduled<P> {
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .time
            .total_cmp(&self.time)
            .then_with(|| other.seq.cmp(&self.seq))
    }
}

/// Future-event list ordered by `(time, insertion sequence)`.
#[derive(Debug)]
pub struct EventQueue<P> {
    heap: BinaryHeap<Scheduled<P>>,
    cancelled: HashSet<u64>,
    now: f64,
    next_seq: u64,
}

impl<P> Default for EventQueue<P> {
    fn default() -> Self {
        Self::new()
    }
}

impl<P> EventQueue<P> {
    pub fn new() -> Self {
        Self {
            heap: BinaryHeap::new(),
            cancelled: HashSet::new(),
            now: 0.0,
            next_seq: 0,
        }
    }

    /// Current simulation clock: the time of the last popped event.
    pub fn now(&self) -> f64 {
        self.now
    }

    /// Scheduled events, including cancelled ones not yet discarded.
    pub fn len(&self) -> usize {
        self.heap.len()
    }

    pub fn is_empty(&self) -> bool {
        self.heap.len() == self.cancelled.len()
    }

    pub fn schedule(&mut self, at: f64, payload: P) -> Result<TimerHandle> {
        if !at.is_finite() || at < self.now {
            return Err(Error::usage(format!(
                "cannot schedule at {at} when the clock reads {}",
                self.now
            )));
        }
        let seq = self.next_seq;
        self.next_seq += 1;
        self.heap.push(Scheduled { time: at, seq, payload });
        Ok(TimerHandle(seq))
    }

    /// Prevents a pending event from being delivered. Returns false if it was already
    /// cancelled or delivered.
    pub fn cancel(&mut self, handle: TimerHandle) -> bool {
        let pending = self.heap.iter().any(|e| e.seq == handle.0);
        pending && self.cancelled.insert(handle.0)
    }

    /// Removes the earliest live event and advances the clock to it.
    pub fn pop(&mut self) -> Option<(f64, P)> {
        loop {
            let ev = self.heap.pop()?;
            if !self.cancelled.is_empty() && self.cancelled.remove(&ev.seq) {
                continue;
            }
            debug_assert!(ev.time >= self.now);
            self.now = ev.time;
            return Some((ev.time, ev.payload));
        }
    }

    pub fn peek_time(&self) -> Option<f64> {
        self.heap.peek().map(|e| e.time)
    }
}
