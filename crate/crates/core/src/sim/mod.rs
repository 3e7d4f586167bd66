//! Discrete-event simulation of a network of forwarding nodes.

mod engine;
mod event;
mod scenario;
mod topology;

pub use engine::{run_scenario, Simulation, TraceEvent, TraceKind};
pub use event::{EventQueue, TimerHandle};
pub use scenario::{Arrivals, LinkDown, Routing, Scenario, TopologySource, DEFAULT_MAX_EVENTS};
pub use topology::{
    assign_roles, grid_topology, line_topology, load_topology, random_topology, tree_topology,
    BuiltinTopology, FaceSpec, LinkParams, Role, TopoLink, TopoNode, Topology,
};
