//! Deficit Round Robin egress scheduling over per-class flow queues.
//!
//! A visited flow serves head packets while its deficit covers them. When the head no longer
//! fits, the flow is credited one quantum and moves to the back of the active ring. Empty flows
//! leave the ring and forfeit their deficit. Each flow queue tail-drops at a fixed packet count.

use std::collections::{HashMap, VecDeque};

use crate::error::{Error, Result};
use crate::packet::{ClassId, Packet};

/// One Ethernet MTU.
pub const DEFAULT_QUANTUM: u32 = 1500;
pub const DEFAULT_QUEUE_CAPACITY: usize = 100;

#[derive(Debug, Clone)]
pub struct FlowQueue {
    flow_id: ClassId,
    quantum: u32,
    deficit: u64,
    packets: VecDeque<Packet>,
    capacity: usize,
    max_packet_seen: u32,
    bytes_served: u64,
}

impl FlowQueue {
    fn new(flow_id: ClassId, quantum: u32, capacity: usize) -> Self {
        Self {
            flow_id,
            quantum,
            deficit: 0,
            packets: VecDeque::new(),
            capacity,
            max_packet_seen: 0,
            bytes_served: 0,
        }
    }

    pub fn flow_id(&self) -> ClassId {
        self.flow_id
    }

    pub fn quantum(&self) -> u32 {
        self.quantum
    }

    pub fn deficit(&self) -> u64 {
        self.deficit
    }

    pub fn len(&self) -> usize {
        self.packets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.packets.is_empty()
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    pub fn bytes_served(&self) -> u64 {
        self.bytes_served
    }

    pub fn max_packet_seen(&self) -> u32 {
        self.max_packet_seen
    }

    pub fn packets(&self) -> impl Iterator<Item = &Packet> {
        self.packets.iter()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Enqueue {
    Accepted,
    /// The flow queue was full; the packet is handed back untouched.
    Dropped(Packet),
}

#[derive(Debug, Clone, Default)]
pub struct DrrScheduler {
    flows: Vec<FlowQueue>,
    index: HashMap<ClassId, usize>,
    active_ring: VecDeque<usize>,
    total_enqueued: u64,
    total_served: u64,
    total_dropped: u64,
}

impl DrrScheduler {
    pub fn new() -> Self {
        Self::default()
    }

    /// Registers `flow`. Re-registering an existing flow is an error.
    pub fn register_flow(&mut self, flow: ClassId, quantum: u32, capacity: usize) -> Result<()> {
        if quantum == 0 {
            return Err(Error::usage("DRR quantum must be positive"));
        }
        if self.index.contains_key(&flow) {
            return Err(Error::usage(format!("flow {flow:?} already registered")));
        }
        self.index.insert(flow, self.flows.len());
        self.flows.push(FlowQueue::new(flow, quantum, capacity));
        Ok(())
    }

    pub fn has_flow(&self, flow: ClassId) -> bool {
        self.index.contains_key(&flow)
    }

    pub fn flow(&self, flow: ClassId) -> Option<&FlowQueue> {
        self.index.get(&flow).map(|&i| &self.flows[i])
    }

    pub fn flows(&self) -> impl Iterator<Item = &FlowQueue> {
        self.flows.iter()
    }

    /// Flow ids currently in the active ring, front first.
    pub fn active_flows(&self) -> impl Iterator<Item = ClassId> + '_ {
        self.active_ring.iter().map(|&i| self.flows[i].flow_id)
    }

    pub fn enqueue(&mut self, flow: ClassId, pkt: Packet) -> Result<Enqueue> {
        let &i = self
            .index
            .get(&flow)
            .ok_or_else(|| Error::usage(format!("flow {flow:?} is not registered")))?;
        let q = &mut self.flows[i];
        if q.packets.len() >= q.capacity {
            self.total_dropped += 1;
            return Ok(Enqueue::Dropped(pkt));
        }
        q.max_packet_seen = q.max_packet_seen.max(pkt.size);
        q.packets.push_back(pkt);
        if q.packets.len() == 1 {
            self.active_ring.push_back(i);
        }
        self.total_enqueued += 1;
        Ok(Enqueue::Accepted)
    }

    /// Next packet to transmit, or `None` when every queue is empty.
    pub fn next_packet(&mut self) -> Option<(ClassId, Packet)> {
        loop {
            let &i = self.active_ring.front()?;
            let q = &mut self.flows[i];
            let head = u64::from(q.packets.front().expect("active flows are backlogged").size);
            if q.deficit >= head {
                q.deficit -= head;
                q.bytes_served += head;
                let pkt = q.packets.pop_front().unwrap();
                if q.packets.is_empty() {
                    q.deficit = 0;
                    self.active_ring.pop_front();
                }
                self.total_served += 1;
                return Some((q.flow_id, pkt));
            }
            q.deficit += u64::from(q.quantum);
            self.active_ring.rotate_left(1);
        }
    }

    /// Removes every queued packet (link failure). Deficits reset with the queues.
    pub fn flush(&mut self) -> Vec<Packet> {
        let mut out = Vec::new();
        for q in &mut self.flows {
            out.extend(q.packets.drain(..));
            q.deficit = 0;
        }
        self.active_ring.clear();
        out
    }

    pub fn is_idle(&self) -> bool {
        self.active_ring.is_empty()
    }

    pub fn backlog_packets(&self) -> usize {
        self.flows.iter().map(FlowQueue::len).sum()
    }

    pub fn total_enqueued(&self) -> u64 {
        self.total_enqueued
    }

    pub fn total_served(&self) -> u64 {
        self.total_served
    }

    pub fn total_dropped(&self) -> u64 {
        self.total_dropped
    }
}
