use std::collections::HashMap;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp, Zipf};

use crate::error::{Error, Result};
use crate::metrics::{finalize_report, MetricsReport, RunCounters, RunLabel};
use crate::node::{Effect, Face, FaceLink, NdnNode, NodeConfig, NodeId};
use crate::packet::{ClassId, Name, Packet, PacketKind};

use super::event::EventQueue;
use super::scenario::{Arrivals, Routing, Scenario};
use super::topology::{Role, Topology};

const CONSUMER_STREAM_BASE: u64 = 1 << 32;

#[derive(Debug)]
enum Timer {
    PitExpiry { node: usize, name: Name },
    TxComplete { node: usize, face: usize },
    LinkDown { link: usize },
}

#[derive(Debug)]
enum Event {
    PacketArrival { node: usize, face: usize, pkt: Packet },
    TimerFire(Timer),
    AppTick { consumer: usize },
}

/// What an observer passed to [`Simulation::run_observed`] sees.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TraceKind {
    /// A packet finished serialization onto a face.
    Sent,
    /// A packet reached the far end of a face.
    Arrived,
}

#[derive(Debug, Clone, Copy)]
pub struct TraceEvent<'a> {
    pub time: f64,
    pub kind: TraceKind,
    /// Sending node and face for `Sent`, receiving node and face for `Arrived`.
    pub node: NodeId,
    pub face: usize,
    pub packet: &'a Packet,
}

#[derive(Debug)]
struct Consumer {
    node: usize,
    rng: ChaCha8Rng,
    /// Outstanding names and when they were issued.
    pending: HashMap<Name, f64>,
    issued: u64,
}

/// One run of a scenario. Single threaded and fully determined by the scenario and its seed.
pub struct Simulation {
    scenario: Scenario,
    topo: Topology,
    nodes: Vec<NdnNode>,
    consumers: Vec<Consumer>,
    consumer_at: Vec<Option<usize>>,
    link_faces: Vec<[(usize, usize); 2]>,
    catalog: Vec<Name>,
    zipf: Zipf<f64>,
    gap: Exp<f64>,
    queue: EventQueue<Event>,
    counters: RunCounters,
    finished: bool,
}

impl std::fmt::Debug for Simulation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Simulation")
            .field("scenario", &self.scenario.name)
            .field("nodes", &self.nodes.len())
            .field("now", &self.queue.now())
            .finish_non_exhaustive()
    }
}

/// Runs `scenario` to completion and returns its report.
pub fn run_scenario(scenario: &Scenario) -> Result<MetricsReport> {
    Simulation::new(scenario.clone())?.run()
}

impl Simulation {
    /// Validates the scenario, builds the network and schedules the first events.
    pub fn new(scenario: Scenario) -> Result<Self> {
        scenario.validate()?;
        let topo = scenario.resolve_topology()?;
        let faces = topo.faces();
        let producers: Vec<NodeId> = topo.with_role(Role::Producer).collect();
        let dist = topo.hop_distances(&producers);

        let config = NodeConfig {
            cs_capacity: scenario.cs_capacity(),
            pit_timeout: scenario.pit_timeout,
            quantum: scenario.quantum,
            queue_capacity: scenario.queue_capacity,
            data_size: scenario.data_size,
        };
        let mut nodes = Vec::with_capacity(topo.node_count());
        for (i, node_faces) in faces.iter().enumerate() {
            let links = node_faces
                .iter()
                .map(|f| FaceLink::new(f.peer, f.peer_face, f.bandwidth_bps, f.delay))
                .collect();
            let mut node = NdnNode::new(
                NodeId(i),
                links,
                config,
                scenario.strategy,
                scenario.params,
                scenario.seed,
            )
            .map_err(|e| Error::Config(e.to_string()))?;
            let mut candidates: Vec<(usize, usize)> = node_faces
                .iter()
                .enumerate()
                .filter_map(|(f, spec)| dist[spec.peer.0].map(|d| (d, f)))
                .filter(|&(d, _)| match scenario.routing {
                    Routing::AllRoutes => true,
                    Routing::ShortestPaths => dist[i].is_some_and(|own| d < own),
                })
                .collect();
            candidates.sort_unstable();
            if !candidates.is_empty() {
                node.fib_mut()
                    .insert(Name::root(), candidates.into_iter().map(|(_, f)| f).collect())?;
            }
            if topo.nodes()[i].role == Role::Producer {
                node.add_producer_prefix(Name::root());
            }
            nodes.push(node);
        }

        let mut link_faces = vec![[(0, 0); 2]; topo.link_count()];
        for (n, node_faces) in faces.iter().enumerate() {
            for (f, spec) in node_faces.iter().enumerate() {
                let slot = usize::from(topo.links()[spec.link].a.0 != n);
                link_faces[spec.link][slot] = (n, f);
            }
        }

        let classes = scenario.content_classes as u64;
        let catalog = (0..scenario.catalog_size)
            .map(|i| Name::parse(&format!("/c{}/o{i}", i % classes)))
            .collect::<Result<Vec<_>>>()?;
        let zipf = Zipf::new(scenario.catalog_size as f64, scenario.zipf_exponent)
            .map_err(|e| Error::Config(format!("popularity: {e}")))?;
        let gap = Exp::new(scenario.interest_rate)
            .map_err(|e| Error::Config(format!("interest_rate: {e}")))?;

        let mut consumer_at = vec![None; topo.node_count()];
        let consumers: Vec<Consumer> = topo
            .with_role(Role::Consumer)
            .enumerate()
            .map(|(c, n)| {
                consumer_at[n.0] = Some(c);
                let mut rng = ChaCha8Rng::seed_from_u64(scenario.seed);
                rng.set_stream(CONSUMER_STREAM_BASE + c as u64);
                Consumer {
                    node: n.0,
                    rng,
                    pending: HashMap::new(),
                    issued: 0,
                }
            })
            .collect();

        let mut sim = Self {
            counters: RunCounters {
                per_node_requests: Vec::new(),
                ..RunCounters::default()
            },
            scenario,
            topo,
            nodes,
            consumers,
            consumer_at,
            link_faces,
            catalog,
            zipf,
            gap,
            queue: EventQueue::new(),
            finished: false,
        };
        for c in 0..sim.consumers.len() {
            let first = match sim.scenario.arrivals {
                Arrivals::Constant => 0.0,
                Arrivals::Poisson => sim.gap.sample(&mut sim.consumers[c].rng),
            };
            sim.schedule_tick(c, first)?;
        }
        if let Some(ld) = &sim.scenario.link_down {
            let a = sim.topo.index_of(&ld.a).expect("checked by resolve_topology");
            let b = sim.topo.index_of(&ld.b).expect("checked by resolve_topology");
            let link = sim.topo.link_between(a, b).expect("checked by resolve_topology");
            sim.queue
                .schedule(ld.at, Event::TimerFire(Timer::LinkDown { link }))?;
        }
        Ok(sim)
    }

    pub fn topology(&self) -> &Topology {
        &self.topo
    }

    pub fn nodes(&self) -> &[NdnNode] {
        &self.nodes
    }

    pub fn now(&self) -> f64 {
        self.queue.now()
    }

    fn schedule_tick(&mut self, consumer: usize, at: f64) -> Result<()> {
        let c = &self.consumers[consumer];
        let capped = self
            .scenario
            .max_interests
            .is_some_and(|m| c.issued >= m);
        if at < self.scenario.duration && !capped {
            self.queue.schedule(at, Event::AppTick { consumer })?;
        }
        Ok(())
    }

    pub fn run(mut self) -> Result<MetricsReport> {
        self.run_observed(|_| {})
    }

    /// Runs to completion, reporting every link transmission and arrival to `observe`.
    /// The simulation stays inspectable afterwards but cannot be run again.
    pub fn run_observed(&mut self, mut observe: impl FnMut(&TraceEvent<'_>)) -> Result<MetricsReport> {
        if self.finished {
            return Err(Error::usage("simulation already ran"));
        }
        self.finished = true;
        while let Some(t) = self.queue.peek_time() {
            if !self.scenario.drain && t > self.scenario.duration {
                break;
            }
            let Some((now, event)) = self.queue.pop() else {
                break;
            };
            self.counters.events += 1;
            if self.counters.events > self.scenario.max_events {
                return Err(Error::Runtime(format!(
                    "event cap of {} reached at t = {now}",
                    self.scenario.max_events
                )));
            }
            self.dispatch(now, event, &mut observe)?;
        }
        self.finish()
    }

    fn dispatch(&mut self, now: f64, event: Event, observe: &mut impl FnMut(&TraceEvent<'_>)) -> Result<()> {
        match event {
            Event::AppTick { consumer } => self.app_tick(consumer, now, observe),
            Event::PacketArrival { node, face, pkt } => {
                observe(&TraceEvent {
                    time: now,
                    kind: TraceKind::Arrived,
                    node: NodeId(node),
                    face,
                    packet: &pkt,
                });
                if !self.nodes[node].face(face).is_up() {
                    self.nodes[node].drop_on_dead_face();
                    return Ok(());
                }
                let effects = match pkt.kind {
                    PacketKind::Interest => self.nodes[node].handle_interest(Face::Net(face), pkt, now),
                    PacketKind::Data => self.nodes[node].handle_data(face, pkt, now),
                };
                self.apply(node, effects, now, observe)
            }
            Event::TimerFire(Timer::PitExpiry { node, name }) => {
                let effects = self.nodes[node].handle_timeout(&name, now);
                self.apply(node, effects, now, observe)
            }
            Event::TimerFire(Timer::TxComplete { node, face }) => {
                self.nodes[node].finish_transmission(face);
                self.transmit(node, face, now, observe)
            }
            Event::TimerFire(Timer::LinkDown { link }) => {
                for (node, face) in self.link_faces[link] {
                    self.nodes[node].set_face_down(face);
                }
                Ok(())
            }
        }
    }

    fn app_tick(
        &mut self,
        consumer: usize,
        now: f64,
        observe: &mut impl FnMut(&TraceEvent<'_>),
    ) -> Result<()> {
        let c = &mut self.consumers[consumer];
        let rank = self.zipf.sample(&mut c.rng) as usize;
        let object = rank.clamp(1, self.catalog.len()) - 1;
        let gap = match self.scenario.arrivals {
            Arrivals::Constant => 1.0 / self.scenario.interest_rate,
            Arrivals::Poisson => self.gap.sample(&mut c.rng),
        };
        let name = &self.catalog[object];
        let node = c.node;
        let mut issued = None;
        if c.pending.contains_key(name) {
            self.counters.suppressed += 1;
        } else {
            c.pending.insert(name.clone(), now);
            c.issued += 1;
            self.counters.interests_sent += 1;
            let class = ClassId((object as u64 % u64::from(self.scenario.content_classes)) as u32);
            issued = Some(Packet::interest(name.clone(), class, self.scenario.interest_size, now));
        }
        self.schedule_tick(consumer, now + gap)?;
        if let Some(pkt) = issued {
            let effects = self.nodes[node].handle_interest(Face::App, pkt, now);
            self.apply(node, effects, now, observe)?;
        }
        Ok(())
    }

    fn resolve_app(&mut self, node: usize, name: &Name) -> Option<f64> {
        let c = self.consumer_at[node]?;
        self.consumers[c].pending.remove(name)
    }

    fn apply(
        &mut self,
        node: usize,
        effects: Vec<Effect>,
        now: f64,
        observe: &mut impl FnMut(&TraceEvent<'_>),
    ) -> Result<()> {
        for effect in effects {
            match effect {
                Effect::Transmit { face } => self.transmit(node, face, now, observe)?,
                Effect::PitExpiry { name, at } => {
                    self.queue
                        .schedule(at, Event::TimerFire(Timer::PitExpiry { node, name }))?;
                }
                Effect::DeliverToApp(pkt) => {
                    if let Some(sent) = self.resolve_app(node, &pkt.name) {
                        self.counters.satisfied += 1;
                        self.counters.retrieval_time_total += now - sent;
                    }
                }
                Effect::AppTimeout(name) => {
                    if self.resolve_app(node, &name).is_some() {
                        self.counters.timed_out += 1;
                    }
                }
                Effect::AppDropped(name) => {
                    if self.resolve_app(node, &name).is_some() {
                        self.counters.interests_dropped += 1;
                    }
                }
            }
        }
        Ok(())
    }

    /// Starts serializing the next queued packet on an idle face.
    fn transmit(
        &mut self,
        node: usize,
        face: usize,
        now: f64,
        observe: &mut impl FnMut(&TraceEvent<'_>),
    ) -> Result<()> {
        let Some(pkt) = self.nodes[node].start_transmission(face, now) else {
            return Ok(());
        };
        let link = self.nodes[node].face(face);
        let done = now + f64::from(pkt.size) * 8.0 / link.bandwidth_bps;
        let (peer, peer_face, arrive) = (link.peer.0, link.peer_face, done + link.delay);
        observe(&TraceEvent {
            time: now,
            kind: TraceKind::Sent,
            node: NodeId(node),
            face,
            packet: &pkt,
        });
        self.queue
            .schedule(done, Event::TimerFire(Timer::TxComplete { node, face }))?;
        self.queue.schedule(
            arrive,
            Event::PacketArrival {
                node: peer,
                face: peer_face,
                pkt,
            },
        )?;
        Ok(())
    }

    fn finish(&mut self) -> Result<MetricsReport> {
        for node in &self.nodes {
            node.check_invariants()?;
        }
        let c = &mut self.counters;
        c.pending_at_end = self.consumers.iter().map(|c| c.pending.len() as u64).sum();
        for node in &self.nodes {
            let n = node.counters();
            c.packets_dropped += n.drops();
            c.cache_hits += n.cache_hits;
            c.unsolicited_data += n.unsolicited_data;
        }
        let has_routers = self.topo.with_role(Role::Router).next().is_some();
        c.per_node_requests = self
            .nodes
            .iter()
            .zip(self.topo.nodes())
            .filter(|(_, t)| !has_routers || t.role == Role::Router)
            .map(|(n, _)| n.counters().interests_forwarded)
            .collect();
        if !c.reconciles() {
            return Err(Error::Runtime(format!(
                "Interest accounting does not reconcile: sent {} != satisfied {} + timed out {} + dropped {} + pending {}",
                c.interests_sent, c.satisfied, c.timed_out, c.interests_dropped, c.pending_at_end
            )));
        }
        let s = &self.scenario;
        let label = RunLabel {
            scenario: s.name.clone(),
            strategy: s.strategy.label().to_owned(),
            seed: s.seed,
            rate: s.interest_rate,
            cache_frac: s.cache_fraction,
        };
        Ok(finalize_report(label, self.counters.clone(), s.duration))
    }
}
