//! Per-router forwarding pipeline.
//!
//! Interest: Content Store → local producer → PIT aggregation → FIB + strategy → DRR egress.
//! Data: PIT match → Content Store insert → fan-out to every waiting face → strategy feedback.
//! Handlers mutate the node and return [`Effect`]s for the event loop to carry out.

mod cs;
mod fib;
mod pit;

use std::collections::VecDeque;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub use cs::ContentStore;
pub use fib::{Fib, FibEntry};
pub use pit::{Face, Pit, PitEntry};

use crate::baselines::{baseline_select, BaselineKind, FaceStats};
use crate::drr::{DrrScheduler, Enqueue};
use crate::error::{Error, Result};
use crate::packet::{ClassId, Name, Packet, PacketKind};
use crate::strategy::{normalized_state, StrategyParams, StrategyTable};

/// Window over which recently serialized bytes are subtracted from link capacity.
pub const BANDWIDTH_WINDOW: f64 = 0.1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct NodeId(pub usize);

/// Which forwarding strategy a node runs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum StrategyKind {
    DrrMdpf,
    Baseline(BaselineKind),
}

impl StrategyKind {
    pub fn label(self) -> &'static str {
        match self {
            StrategyKind::DrrMdpf => "drr-mdpf",
            StrategyKind::Baseline(b) => b.label(),
        }
    }
}

impl std::fmt::Display for StrategyKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.label())
    }
}

impl std::str::FromStr for StrategyKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "drr-mdpf" => Ok(StrategyKind::DrrMdpf),
            other => other.parse().map(StrategyKind::Baseline),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NodeConfig {
    pub cs_capacity: usize,
    pub pit_timeout: f64,
    pub quantum: u32,
    pub queue_capacity: usize,
    /// Size of Data packets the local producer creates.
    pub data_size: u32,
}

impl Default for NodeConfig {
    fn default() -> Self {
        Self {
            cs_capacity: 0,
            pit_timeout: 2.0,
            quantum: crate::drr::DEFAULT_QUANTUM,
            queue_capacity: crate::drr::DEFAULT_QUEUE_CAPACITY,
            data_size: 1024,
        }
    }
}

/// One end of a point-to-point link, with its transmitter state.
#[derive(Debug, Clone)]
pub struct FaceLink {
    pub peer: NodeId,
    pub peer_face: usize,
    pub bandwidth_bps: f64,
    pub delay: f64,
    up: bool,
    busy: bool,
    sent_window: VecDeque<(f64, f64)>,
    sent_window_bits: f64,
}

impl FaceLink {
    pub fn new(peer: NodeId, peer_face: usize, bandwidth_bps: f64, delay: f64) -> Self {
        Self {
            peer,
            peer_face,
            bandwidth_bps,
            delay,
            up: true,
            busy: false,
            sent_window: VecDeque::new(),
            sent_window_bits: 0.0,
        }
    }

    pub fn is_up(&self) -> bool {
        self.up
    }

    pub fn is_busy(&self) -> bool {
        self.busy
    }

    fn expire_window(&mut self, now: f64) {
        while let Some(&(t, bits)) = self.sent_window.front() {
            if t > now - BANDWIDTH_WINDOW {
                break;
            }
            self.sent_window.pop_front();
            self.sent_window_bits -= bits;
        }
        if self.sent_window.is_empty() {
            self.sent_window_bits = 0.0;
        }
    }

    /// Capacity minus the rate of bits serialized over the last window, floored at zero.
    pub fn available_bandwidth(&mut self, now: f64) -> f64 {
        self.expire_window(now);
        if !self.up {
            return 0.0;
        }
        (self.bandwidth_bps - self.sent_window_bits / BANDWIDTH_WINDOW).max(0.0)
    }
}

/// Work the event loop must do on behalf of a node.
#[derive(Debug, Clone, PartialEq)]
pub enum Effect {
    /// A packet was queued on `face`; start the transmitter if it is idle.
    Transmit { face: usize },
    /// Data for the local consumer application.
    DeliverToApp(Packet),
    /// The local application's Interest for `name` expired in the PIT.
    AppTimeout(Name),
    /// The local application's Interest for `name` was dropped before leaving the node.
    AppDropped(Name),
    /// Fire [`NdnNode::handle_timeout`] for `name` at `at`.
    PitExpiry { name: Name, at: f64 },
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct NodeCounters {
    pub interests_received: u64,
    /// Interests sent upstream on a network face; the per-node request count.
    pub interests_forwarded: u64,
    pub interests_aggregated: u64,
    pub data_received: u64,
    pub data_sent: u64,
    pub cache_hits: u64,
    pub produced: u64,
    pub unsolicited_data: u64,
    pub pit_expired: u64,
    pub drops_queue: u64,
    pub drops_no_route: u64,
    pub drops_malformed: u64,
    pub drops_link_down: u64,
}

impl NodeCounters {
    pub fn drops(&self) -> u64 {
        self.drops_queue + self.drops_no_route + self.drops_malformed + self.drops_link_down
    }
}

#[derive(Debug)]
pub struct NdnNode {
    id: NodeId,
    faces: Vec<FaceLink>,
    cs: ContentStore,
    pit: Pit,
    fib: Fib,
    strategy: StrategyKind,
    table: Option<StrategyTable<f64>>,
    face_stats: FaceStats,
    egress: Vec<DrrScheduler>,
    config: NodeConfig,
    producer_prefixes: Vec<Name>,
    counters: NodeCounters,
    rng: ChaCha8Rng,
}

impl NdnNode {
    pub fn new(
        id: NodeId,
        faces: Vec<FaceLink>,
        config: NodeConfig,
        strategy: StrategyKind,
        params: StrategyParams<f64>,
        seed: u64,
    ) -> Result<Self> {
        if !(config.pit_timeout > 0.0) {
            return Err(Error::usage("PIT timeout must be positive"));
        }
        if config.quantum == 0 || config.data_size == 0 {
            return Err(Error::usage("quantum and data size must be positive"));
        }
        params.validate()?;
        let table = match strategy {
            StrategyKind::DrrMdpf if !faces.is_empty() => {
                Some(StrategyTable::new(faces.len(), params)?)
            }
            _ => None,
        };
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(id.0 as u64 + 1);
        Ok(Self {
            id,
            cs: ContentStore::new(config.cs_capacity),
            pit: Pit::new(),
            fib: Fib::new(faces.len()),
            strategy,
            table,
            face_stats: FaceStats::new(faces.len()),
            egress: (0..faces.len()).map(|_| DrrScheduler::new()).collect(),
            faces,
            config,
            producer_prefixes: Vec::new(),
            counters: NodeCounters::default(),
            rng,
        })
    }

    pub fn id(&self) -> NodeId {
        self.id
    }

    pub fn faces(&self) -> &[FaceLink] {
        &self.faces
    }

    pub fn face(&self, face: usize) -> &FaceLink {
        &self.faces[face]
    }

    pub fn cs(&self) -> &ContentStore {
        &self.cs
    }

    pub fn pit(&self) -> &Pit {
        &self.pit
    }

    pub fn fib(&self) -> &Fib {
        &self.fib
    }

    pub fn fib_mut(&mut self) -> &mut Fib {
        &mut self.fib
    }

    pub fn strategy(&self) -> StrategyKind {
        self.strategy
    }

    pub fn strategy_table(&self) -> Option<&StrategyTable<f64>> {
        self.table.as_ref()
    }

    pub fn strategy_table_mut(&mut self) -> Option<&mut StrategyTable<f64>> {
        self.table.as_mut()
    }

    pub fn face_stats(&self) -> &FaceStats {
        &self.face_stats
    }

    pub fn egress(&self, face: usize) -> &DrrScheduler {
        &self.egress[face]
    }

    pub fn counters(&self) -> &NodeCounters {
        &self.counters
    }

    pub fn config(&self) -> &NodeConfig {
        &self.config
    }

    /// Makes this node answer every Interest under `prefix`.
    pub fn add_producer_prefix(&mut self, prefix: Name) {
        self.producer_prefixes.push(prefix);
    }

    pub fn is_producer_for(&self, name: &Name) -> bool {
        self.producer_prefixes.iter().any(|p| {
            name.prefixes_longest_first()
                .any(|q| q == std::borrow::Borrow::<str>::borrow(p))
        })
    }

    fn ensure_class(&mut self, class: ClassId) {
        if let Some(t) = self.table.as_mut() {
            t.init_class(class);
        }
        for sched in &mut self.egress {
            if !sched.has_flow(class) {
                sched
                    .register_flow(class, self.config.quantum, self.config.queue_capacity)
                    .expect("quantum validated at construction");
            }
        }
    }

    /// Queues `pkt` on `face`. Returns false (and counts the drop) if it could not be queued.
    fn send(&mut self, face: usize, pkt: Packet, effects: &mut Vec<Effect>) -> bool {
        if !self.faces[face].up {
            self.counters.drops_link_down += 1;
            return false;
        }
        self.ensure_class(pkt.class);
        let is_data = pkt.kind == PacketKind::Data;
        match self.egress[face].enqueue(pkt.class, pkt).expect("flow registered") {
            Enqueue::Accepted => {
                if is_data {
                    self.counters.data_sent += 1;
                }
                effects.push(Effect::Transmit { face });
                true
            }
            Enqueue::Dropped(_) => {
                self.counters.drops_queue += 1;
                false
            }
        }
    }

    fn reply_with_data(&mut self, in_face: Face, data: Packet, effects: &mut Vec<Effect>) {
        match in_face {
            Face::App => effects.push(Effect::DeliverToApp(data)),
            Face::Net(f) => {
                self.send(f, data, effects);
            }
        }
    }

    fn choose_face(&mut self, class: ClassId, candidates: &[usize], now: f64) -> Result<usize> {
        match self.strategy {
            StrategyKind::DrrMdpf => {
                let raw: Vec<_> = candidates
                    .iter()
                    .map(|&f| {
                        let bw = self.faces[f].available_bandwidth(now);
                        self.table.as_ref().unwrap().interface_state(class, f, bw)
                    })
                    .collect();
                let norm = normalized_state(&raw)?;
                let table = self.table.as_mut().expect("faces exist when candidates do");
                table.select_among(class, candidates, &norm, &mut self.rng)
            }
            StrategyKind::Baseline(kind) => {
                baseline_select(kind, candidates, &self.face_stats, &mut self.rng)
            }
        }
    }

    pub fn handle_interest(&mut self, in_face: Face, pkt: Packet, now: f64) -> Vec<Effect> {
        let mut effects = Vec::new();
        self.counters.interests_received += 1;
        let in_range = matches!(in_face, Face::App) || matches!(in_face, Face::Net(f) if f < self.faces.len());
        if pkt.kind != PacketKind::Interest || !pkt.is_well_formed() || !in_range {
            self.counters.drops_malformed += 1;
            if in_face == Face::App {
                effects.push(Effect::AppDropped(pkt.name));
            }
            return effects;
        }

        if let Some(cached) = self.cs.lookup(&pkt.name) {
            let data = Packet { created_at: now, ..cached.clone() };
            self.counters.cache_hits += 1;
            self.reply_with_data(in_face, data, &mut effects);
            return effects;
        }

        if self.is_producer_for(&pkt.name) {
            self.counters.produced += 1;
            let data = Packet::data(pkt.name, pkt.class, self.config.data_size, now);
            self.reply_with_data(in_face, data, &mut effects);
            return effects;
        }

        if let Some(entry) = self.pit.get_mut(&pkt.name) {
            entry.add_in_face(in_face);
            self.counters.interests_aggregated += 1;
            return effects;
        }

        let candidates: Vec<usize> = match self.fib.lookup(&pkt.name) {
            Some(entry) => entry
                .candidate_faces
                .iter()
                .copied()
                .filter(|&f| Face::Net(f) != in_face && self.faces[f].up)
                .collect(),
            None => Vec::new(),
        };
        if candidates.is_empty() {
            self.counters.drops_no_route += 1;
            if in_face == Face::App {
                effects.push(Effect::AppDropped(pkt.name));
            }
            return effects;
        }

        let class = pkt.class;
        self.ensure_class(class);
        let out_face = self
            .choose_face(class, &candidates, now)
            .expect("candidates are valid faces of an initialised class");
        let name = pkt.name.clone();
        if !self.send(out_face, pkt, &mut effects) {
            if in_face == Face::App {
                effects.push(Effect::AppDropped(name));
            }
            return effects;
        }

        let expiry = now + self.config.pit_timeout;
        self.pit.insert(PitEntry {
            name: name.clone(),
            in_faces: vec![in_face],
            out_face,
            class,
            created_at: now,
            expiry,
        });
        if let Some(t) = self.table.as_mut() {
            t.note_forwarded(class, out_face).expect("class initialised");
        }
        self.face_stats.on_forward(out_face);
        self.counters.interests_forwarded += 1;
        effects.push(Effect::PitExpiry { name, at: expiry });
        effects
    }

    pub fn handle_data(&mut self, in_face: usize, pkt: Packet, now: f64) -> Vec<Effect> {
        let mut effects = Vec::new();
        if pkt.kind != PacketKind::Data || !pkt.is_well_formed() || in_face >= self.faces.len() {
            self.counters.drops_malformed += 1;
            return effects;
        }
        self.counters.data_received += 1;
        let Some(entry) = self.pit.take_satisfied(&pkt.name) else {
            self.counters.unsolicited_data += 1;
            return effects;
        };

        self.cs.insert(pkt.clone());
        for &face in &entry.in_faces {
            self.reply_with_data(face, pkt.clone(), &mut effects);
        }

        let rtt = now - entry.created_at;
        if let Some(t) = self.table.as_mut() {
            t.note_resolved(entry.class, entry.out_face).expect("forward was counted");
            if rtt > 0.0 {
                t.record_rtt(entry.class, entry.out_face, rtt).expect("positive sample");
            }
            t.positive_feedback(entry.class, entry.out_face).expect("class initialised");
        }
        if rtt > 0.0 {
            self.face_stats.on_success(entry.out_face, rtt);
        }
        effects
    }

    /// Expires the PIT entry for `name` if it is due. Stale timers are ignored.
    pub fn handle_timeout(&mut self, name: &Name, now: f64) -> Vec<Effect> {
        let mut effects = Vec::new();
        let Some(entry) = self.pit.take_expired(name, now) else {
            return effects;
        };
        self.counters.pit_expired += 1;
        if let Some(t) = self.table.as_mut() {
            t.note_resolved(entry.class, entry.out_face).expect("forward was counted");
            t.negative_feedback(entry.class, entry.out_face).expect("class initialised");
        }
        self.face_stats.on_timeout(entry.out_face);
        if entry.in_faces.contains(&Face::App) {
            effects.push(Effect::AppTimeout(entry.name));
        }
        effects
    }

    /// Pulls the next packet for an idle, up face and marks the transmitter busy.
    pub fn start_transmission(&mut self, face: usize, now: f64) -> Option<Packet> {
        let link = &self.faces[face];
        if link.busy || !link.up {
            return None;
        }
        let (_, pkt) = self.egress[face].next_packet()?;
        let link = &mut self.faces[face];
        link.busy = true;
        link.expire_window(now);
        let bits = f64::from(pkt.size) * 8.0;
        link.sent_window.push_back((now, bits));
        link.sent_window_bits += bits;
        Some(pkt)
    }

    pub fn finish_transmission(&mut self, face: usize) {
        self.faces[face].busy = false;
    }

    /// Takes the face down and drops everything queued on it.
    pub fn set_face_down(&mut self, face: usize) -> usize {
        self.faces[face].up = false;
        let flushed = self.egress[face].flush().len();
        self.counters.drops_link_down += flushed as u64;
        flushed
    }

    /// A packet arrived over a face that is down (in flight when the link failed).
    pub(crate) fn drop_on_dead_face(&mut self) {
        self.counters.drops_link_down += 1;
    }

    /// Cross-checks the pending-Interest counters against the PIT and the CS bound.
    pub fn check_invariants(&self) -> Result<()> {
        if self.cs.len() > self.cs.capacity() {
            return Err(Error::Runtime(format!("{:?}: CS over capacity", self.id)));
        }
        let Some(table) = &self.table else {
            return Ok(());
        };
        for class in table.classes() {
            for face in 0..self.faces.len() {
                let live = self
                    .pit
                    .entries()
                    .filter(|e| e.class == class && e.out_face == face)
                    .count() as u32;
                if live != table.pending(class, face) {
                    return Err(Error::Runtime(format!(
                        "{:?}: pending count {} for {class:?} on face {face} but {live} PIT entries",
                        self.id,
                        table.pending(class, face)
                    )));
                }
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::prob::ProbabilityVector;

    const K: ClassId = ClassId(0);

    fn name(s: &str) -> Name {
        Name::parse(s).unwrap()
    }

    fn interest(s: &str) -> Packet {
        Packet::interest(name(s), K, 64, 0.0)
    }

    fn data(s: &str) -> Packet {
        Packet::data(name(s), K, 1024, 0.0)
    }

    fn node(faces: usize, cs: usize, strategy: StrategyKind) -> NdnNode {
        let links = (0..faces).map(|f| FaceLink::new(NodeId(f + 1), 0, 10e6, 0.01)).collect();
        let config = NodeConfig { cs_capacity: cs, ..NodeConfig::default() };
        let mut n = NdnNode::new(NodeId(0), links, config, strategy, StrategyParams::default(), 1).unwrap();
        if faces > 0 {
            n.fib_mut().insert(Name::root(), (0..faces).collect()).unwrap();
        }
        n
    }

    fn drr() -> StrategyKind {
        StrategyKind::DrrMdpf
    }

    fn transmitted(effects: &[Effect]) -> Vec<usize> {
        effects
            .iter()
            .filter_map(|e| match e {
                Effect::Transmit { face } => Some(*face),
                _ => None,
            })
            .collect()
    }

    #[test]
    fn cs_hit_short_circuits() {
        let mut n = node(2, 10, drr());
        n.cs.insert(data("/c0/1"));
        let fx = n.handle_interest(Face::Net(1), interest("/c0/1"), 1.0);
        assert_eq!(fx, vec![Effect::Transmit { face: 1 }]);
        assert!(n.pit().is_empty());
        assert_eq!(n.counters().cache_hits, 1);
        let (_, sent) = n.egress[1].clone().next_packet().unwrap();
        assert_eq!(sent.kind, PacketKind::Data);
    }

    #[test]
    fn cs_hit_from_app_delivers_locally() {
        let mut n = node(1, 10, drr());
        n.cs.insert(data("/c0/1"));
        let fx = n.handle_interest(Face::App, interest("/c0/1"), 1.0);
        assert!(matches!(&fx[..], [Effect::DeliverToApp(p)] if p.name == name("/c0/1")));
    }

    #[test]
    fn aggregation_adds_in_face_without_forwarding() {
        let mut n = node(3, 0, drr());
        n.handle_interest(Face::Net(0), interest("/c0/1"), 0.0);
        let fx = n.handle_interest(Face::Net(1), interest("/c0/1"), 0.1);
        assert!(fx.is_empty());
        let e = n.pit().get(&name("/c0/1")).unwrap();
        assert_eq!(e.in_faces, vec![Face::Net(0), Face::Net(1)]);
        assert_eq!(n.counters().interests_forwarded, 1);
    }

    #[test]
    fn never_forwards_back_on_in_face() {
        let mut n = node(2, 0, drr());
        for i in 0..20 {
            let fx = n.handle_interest(Face::Net(0), interest(&format!("/c0/{i}")), 0.0);
            assert_eq!(transmitted(&fx), [1]);
        }
    }

    #[test]
    fn restricted_argmax_over_fib_candidates() {
        let mut n = node(4, 0, drr());
        n.fib_mut().insert(Name::root(), vec![1, 3]).unwrap();
        n.ensure_class(K);
        let peaked = ProbabilityVector::new(vec![0.05, 0.3, 0.6, 0.05]).unwrap();
        n.strategy_table_mut().unwrap().set_probs(K, peaked).unwrap();
        let fx = n.handle_interest(Face::App, interest("/c0/1"), 0.0);
        assert_eq!(transmitted(&fx), [1]);
        assert_eq!(n.pit().get(&name("/c0/1")).unwrap().out_face, 1);
    }

    #[test]
    fn no_route_drops() {
        let mut n = node(2, 0, drr());
        n.fib = Fib::new(2);
        let fx = n.handle_interest(Face::App, interest("/c0/1"), 0.0);
        assert_eq!(fx, vec![Effect::AppDropped(name("/c0/1"))]);
        assert_eq!(n.counters().drops_no_route, 1);
    }

    #[test]
    fn malformed_interest_is_counted_not_fatal() {
        let mut n = node(2, 0, drr());
        let bad = Packet::interest(Name::root(), K, 64, 0.0);
        n.handle_interest(Face::Net(0), bad, 0.0);
        let zero = Packet::interest(name("/c0/1"), K, 0, 0.0);
        n.handle_interest(Face::Net(0), zero, 0.0);
        n.handle_interest(Face::Net(7), interest("/c0/2"), 0.0);
        assert_eq!(n.counters().drops_malformed, 3);
        assert!(n.pit().is_empty());
    }

    #[test]
    fn data_fans_out_to_every_in_face() {
        let mut n = node(4, 10, drr());
        n.handle_interest(Face::Net(0), interest("/c0/1"), 0.0);
        n.handle_interest(Face::Net(1), interest("/c0/1"), 0.0);
        n.handle_interest(Face::Net(2), interest("/c0/1"), 0.0);
        let out = n.pit().get(&name("/c0/1")).unwrap().out_face;
        let fx = n.handle_data(out, data("/c0/1"), 0.05);
        let mut faces = transmitted(&fx);
        faces.sort();
        assert_eq!(faces, [0, 1, 2]);
        assert_eq!(n.cs().len(), 1);
        assert!(n.pit().is_empty());
    }

    #[test]
    fn data_updates_strategy_and_counters() {
        let mut n = node(2, 0, drr());
        n.handle_interest(Face::App, interest("/c0/1"), 0.0);
        let out = n.pit().get(&name("/c0/1")).unwrap().out_face;
        assert_eq!(n.strategy_table().unwrap().pending(K, out), 1);
        let before = n.strategy_table().unwrap().probs(K).unwrap()[out];
        let fx = n.handle_data(out, data("/c0/1"), 0.04);
        assert!(matches!(&fx[..], [Effect::DeliverToApp(_)]));
        let t = n.strategy_table().unwrap();
        assert_eq!(t.pending(K, out), 0);
        assert_eq!(t.delay(K, out), Some(0.04));
        assert!(t.probs(K).unwrap()[out] > before);
        n.check_invariants().unwrap();
    }

    #[test]
    fn unsolicited_data_discarded() {
        let mut n = node(2, 10, drr());
        let fx = n.handle_data(0, data("/c0/9"), 0.0);
        assert!(fx.is_empty());
        assert_eq!(n.counters().unsolicited_data, 1);
        assert_eq!(n.cs().len(), 0);
    }

    #[test]
    fn timeout_removes_entry_and_keeps_probs() {
        let mut n = node(3, 0, drr());
        n.handle_interest(Face::App, interest("/c0/1"), 0.0);
        let probs = n.strategy_table().unwrap().probs(K).unwrap().clone();
        assert!(n.handle_timeout(&name("/c0/1"), 1.0).is_empty(), "not yet due");
        let fx = n.handle_timeout(&name("/c0/1"), 2.0);
        assert_eq!(fx, vec![Effect::AppTimeout(name("/c0/1"))]);
        assert!(n.pit().is_empty());
        assert_eq!(n.strategy_table().unwrap().probs(K).unwrap(), &probs);
        assert_eq!(n.counters().pit_expired, 1);
    }

    #[test]
    fn stale_timeout_is_noop() {
        let mut n = node(2, 0, drr());
        n.handle_interest(Face::App, interest("/c0/1"), 0.0);
        let out = n.pit().get(&name("/c0/1")).unwrap().out_face;
        n.handle_data(out, data("/c0/1"), 0.05);
        let before = n.counters().clone();
        assert!(n.handle_timeout(&name("/c0/1"), 2.0).is_empty());
        assert_eq!(n.counters(), &before);
    }

    #[test]
    fn timeout_decrements_pending_count() {
        let mut n = node(1, 0, drr());
        for i in 0..5 {
            n.handle_interest(Face::App, interest(&format!("/c0/{i}")), 0.0);
        }
        assert_eq!(n.strategy_table().unwrap().pending(K, 0), 5);
        n.handle_timeout(&name("/c0/0"), 2.0);
        assert_eq!(n.strategy_table().unwrap().pending(K, 0), 4);
        n.check_invariants().unwrap();
    }

    #[test]
    fn full_egress_queue_drops_without_pit_entry() {
        let links = vec![FaceLink::new(NodeId(1), 0, 10e6, 0.01)];
        let config = NodeConfig { queue_capacity: 2, ..NodeConfig::default() };
        let mut n = NdnNode::new(NodeId(0), links, config, drr(), StrategyParams::default(), 1).unwrap();
        n.fib_mut().insert(Name::root(), vec![0]).unwrap();
        for i in 0..3 {
            n.handle_interest(Face::App, interest(&format!("/c0/{i}")), 0.0);
        }
        assert_eq!(n.pit().len(), 2);
        assert_eq!(n.counters().drops_queue, 1);
        n.check_invariants().unwrap();
    }

    #[test]
    fn producer_answers_directly() {
        let mut n = node(1, 0, StrategyKind::Baseline(BaselineKind::BestRoute));
        n.add_producer_prefix(name("/c0"));
        let fx = n.handle_interest(Face::Net(0), interest("/c0/5"), 0.0);
        assert_eq!(transmitted(&fx), [0]);
        assert_eq!(n.counters().produced, 1);
        assert!(n.is_producer_for(&name("/c0/5/x")));
        assert!(!n.is_producer_for(&name("/c01/5")));
    }

    #[test]
    fn available_bandwidth_tracks_window() {
        let mut n = node(1, 0, drr());
        n.handle_interest(Face::App, interest("/c0/1"), 0.0);
        assert!(n.start_transmission(0, 0.0).is_some());
        let bw = n.faces[0].available_bandwidth(0.05);
        assert!((bw - (10e6 - 64.0 * 8.0 / BANDWIDTH_WINDOW)).abs() < 1e-6);
        assert_eq!(n.faces[0].available_bandwidth(0.2), 10e6);
    }
}
