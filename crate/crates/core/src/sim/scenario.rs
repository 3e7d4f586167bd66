use std::path::PathBuf;

use crate::error::{Error, Result};
use crate::node::StrategyKind;
use crate::strategy::StrategyParams;

use super::topology::{assign_roles, load_topology, BuiltinTopology, LinkParams, Role, Topology};

/// Upper bound on processed events before a run is aborted.
pub const DEFAULT_MAX_EVENTS: u64 = 100_000_000;

#[derive(Debug, Clone, PartialEq)]
pub enum TopologySource {
    File(PathBuf),
    Builtin(BuiltinTopology),
    Inline(Topology),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Arrivals {
    /// Exponential inter-arrival times.
    #[default]
    Poisson,
    /// Evenly spaced at `1 / rate`, starting at time 0.
    Constant,
}

/// How FIB entries are populated from hop distances to the producers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Routing {
    /// Only faces whose neighbour is strictly closer to a producer. Loop free.
    #[default]
    ShortestPaths,
    /// Every face whose neighbour can reach a producer, nearest first. Interests can loop
    /// back to a node that already holds their PIT entry and then wait out the timeout.
    AllRoutes,
}

impl Routing {
    pub fn label(self) -> &'static str {
        match self {
            Routing::AllRoutes => "all-routes",
            Routing::ShortestPaths => "shortest-paths",
        }
    }
}

impl std::str::FromStr for Routing {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "all-routes" => Ok(Routing::AllRoutes),
            "shortest-paths" => Ok(Routing::ShortestPaths),
            _ => Err(Error::usage(format!("unknown routing {s:?}"))),
        }
    }
}

/// A scheduled failure of the link between two nodes.
#[derive(Debug, Clone, PartialEq)]
pub struct LinkDown {
    pub a: String,
    pub b: String,
    pub at: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    /// Label written to the `scenario` column.
    pub name: String,
    pub topology: TopologySource,
    /// When non-empty, exactly these nodes consume.
    pub consumers: Vec<String>,
    /// When non-empty, exactly these nodes produce.
    pub producers: Vec<String>,
    /// Links of generated topologies.
    pub link: LinkParams,
    pub routing: Routing,
    pub catalog_size: u64,
    pub content_classes: u32,
    pub zipf_exponent: f64,
    /// Interests per second per consumer.
    pub interest_rate: f64,
    pub arrivals: Arrivals,
    /// Cap on Interests issued per consumer.
    pub max_interests: Option<u64>,
    /// Content Store size as a fraction of the catalog, applied at every node.
    pub cache_fraction: f64,
    /// Seconds during which consumers issue Interests.
    pub duration: f64,
    /// Keep running after `duration` until every outstanding Interest resolves.
    pub drain: bool,
    pub strategy: StrategyKind,
    pub params: StrategyParams<f64>,
    pub seed: u64,
    pub quantum: u32,
    pub queue_capacity: usize,
    pub pit_timeout: f64,
    pub interest_size: u32,
    pub data_size: u32,
    pub link_down: Option<LinkDown>,
    pub max_events: u64,
}

impl Default for Scenario {
    fn default() -> Self {
        Self {
            name: "scenario".into(),
            topology: TopologySource::Builtin(BuiltinTopology::Line(3)),
            consumers: Vec::new(),
            producers: Vec::new(),
            link: LinkParams::default(),
            routing: Routing::ShortestPaths,
            catalog_size: 10_000,
            content_classes: 10,
            zipf_exponent: 1.0,
            interest_rate: 2000.0,
            arrivals: Arrivals::Poisson,
            max_interests: None,
            cache_fraction: 0.1,
            duration: 150.0,
            drain: true,
            strategy: StrategyKind::DrrMdpf,
            params: StrategyParams::default(),
            seed: 1,
            quantum: crate::drr::DEFAULT_QUANTUM,
            queue_capacity: crate::drr::DEFAULT_QUEUE_CAPACITY,
            pit_timeout: 2.0,
            interest_size: 64,
            data_size: 1024,
            link_down: None,
            max_events: DEFAULT_MAX_EVENTS,
        }
    }
}

fn positive(name: &str, x: f64) -> Result<()> {
    if x > 0.0 && x.is_finite() {
        Ok(())
    } else {
        Err(Error::Config(format!("{name} = {x} must be positive")))
    }
}

impl Scenario {
    pub fn validate(&self) -> Result<()> {
        if self.catalog_size == 0 || self.content_classes == 0 {
            return Err(Error::Config("catalog_size and content_classes must be positive".into()));
        }
        if !(self.zipf_exponent >= 0.0 && self.zipf_exponent.is_finite()) {
            return Err(Error::Config(format!("zipf_exponent = {} must be >= 0", self.zipf_exponent)));
        }
        positive("interest_rate", self.interest_rate)?;
        positive("pit_timeout", self.pit_timeout)?;
        positive("link_bandwidth", self.link.bandwidth_bps)?;
        if !(self.link.delay >= 0.0 && self.link.delay.is_finite()) {
            return Err(Error::Config("link_delay_ms must be >= 0".into()));
        }
        if !(self.duration >= 0.0 && self.duration.is_finite()) {
            return Err(Error::Config(format!("duration = {} must be >= 0", self.duration)));
        }
        if !(0.0..=1.0).contains(&self.cache_fraction) {
            return Err(Error::Config(format!(
                "cache_fraction = {} outside [0, 1]",
                self.cache_fraction
            )));
        }
        if self.quantum == 0 || self.queue_capacity == 0 {
            return Err(Error::Config("quantum and queue_capacity must be positive".into()));
        }
        if self.interest_size == 0 || self.data_size == 0 {
            return Err(Error::Config("packet sizes must be positive".into()));
        }
        if self.max_events == 0 {
            return Err(Error::Config("max_events must be positive".into()));
        }
        if let Some(ld) = &self.link_down {
            if !(ld.at >= 0.0 && ld.at.is_finite()) {
                return Err(Error::Config("link_down time must be >= 0".into()));
            }
        }
        self.params.validate().map_err(|e| Error::Config(e.to_string()))
    }

    /// Content Store capacity in objects.
    pub fn cs_capacity(&self) -> usize {
        (self.cache_fraction * self.catalog_size as f64).round() as usize
    }

    /// Loads or generates the topology and applies the role overrides.
    pub fn resolve_topology(&self) -> Result<Topology> {
        let mut topo = match &self.topology {
            TopologySource::File(path) => {
                let text = std::fs::read_to_string(path).map_err(|e| {
                    Error::Config(format!("cannot read topology {}: {e}", path.display()))
                })?;
                load_topology(&text).map_err(|e| {
                    Error::Config(format!("topology {}: {e}", path.display()))
                })?
            }
            TopologySource::Builtin(b) => b
                .generate(self.seed, self.link)
                .map_err(|e| Error::Config(e.to_string()))?,
            TopologySource::Inline(t) => t.clone(),
        };
        assign_roles(&mut topo, &self.consumers, &self.producers)?;
        if topo.with_role(Role::Consumer).next().is_none() {
            return Err(Error::Config("topology has no consumer".into()));
        }
        if topo.with_role(Role::Producer).next().is_none() {
            return Err(Error::Config("topology has no producer".into()));
        }
        if let Some(ld) = &self.link_down {
            let a = topo.index_of(&ld.a);
            let b = topo.index_of(&ld.b);
            let found = a.zip(b).and_then(|(a, b)| topo.link_between(a, b));
            if found.is_none() {
                return Err(Error::Config(format!("link_down: no link {} {}", ld.a, ld.b)));
            }
        }
        Ok(topo)
    }
}
