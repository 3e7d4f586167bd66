//! Network graphs: the line-oriented topology format and a few generators.
//!
//! ```text
//! # comment
//! node a consumer
//! node r
//! node p producer
//! link a r 10000000 10
//! link r p 10000000 10
//! ```
//!
//! `link <a> <b> <bandwidth_bps> <delay_ms>` adds one bidirectional link. Each link gives both
//! endpoints a face; a node's faces are numbered in the order its links appear.

use std::collections::{HashMap, HashSet, VecDeque};
use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::node::NodeId;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum Role {
    #[default]
    Router,
    Consumer,
    Producer,
}

impl Role {
    pub fn label(self) -> &'static str {
        match self {
            Role::Router => "router",
            Role::Consumer => "consumer",
            Role::Producer => "producer",
        }
    }
}

impl FromStr for Role {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "router" => Ok(Role::Router),
            "consumer" => Ok(Role::Consumer),
            "producer" => Ok(Role::Producer),
            other => Err(Error::usage(format!("unknown node role {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TopoNode {
    pub id: String,
    pub role: Role,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TopoLink {
    pub a: NodeId,
    pub b: NodeId,
    pub bandwidth_bps: f64,
    /// One-way propagation delay in seconds.
    pub delay: f64,
}

/// The far end of one of a node's faces.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FaceSpec {
    pub link: usize,
    pub peer: NodeId,
    pub peer_face: usize,
    pub bandwidth_bps: f64,
    pub delay: f64,
}

/// Bandwidth and delay given to every link of a generated topology.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinkParams {
    pub bandwidth_bps: f64,
    pub delay: f64,
}

impl Default for LinkParams {
    fn default() -> Self {
        Self {
            bandwidth_bps: 10e6,
            delay: 0.010,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Topology {
    nodes: Vec<TopoNode>,
    links: Vec<TopoLink>,
}

impl Topology {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_node(&mut self, id: &str, role: Role) -> Result<NodeId> {
        if id.is_empty() || id.chars().any(char::is_whitespace) {
            return Err(Error::usage(format!("invalid node id {id:?}")));
        }
        if self.index_of(id).is_some() {
            return Err(Error::usage(format!("duplicate node {id:?}")));
        }
        self.nodes.push(TopoNode {
            id: id.to_owned(),
            role,
        });
        Ok(NodeId(self.nodes.len() - 1))
    }

    pub fn add_link(&mut self, a: NodeId, b: NodeId, bandwidth_bps: f64, delay: f64) -> Result<()> {
        if a.0 >= self.nodes.len() || b.0 >= self.nodes.len() {
            return Err(Error::usage("link endpoint does not exist"));
        }
        if a == b {
            return Err(Error::usage(format!("self-loop on {:?}", self.nodes[a.0].id)));
        }
        if !(bandwidth_bps > 0.0 && bandwidth_bps.is_finite()) {
            return Err(Error::usage(format!("bandwidth {bandwidth_bps} must be positive")));
        }
        if !(delay >= 0.0 && delay.is_finite()) {
            return Err(Error::usage(format!("delay {delay} must be non-negative")));
        }
        if self.link_between(a, b).is_some() {
            return Err(Error::usage(format!(
                "duplicate link {} {}",
                self.nodes[a.0].id, self.nodes[b.0].id
            )));
        }
        self.links.push(TopoLink {
            a,
            b,
            bandwidth_bps,
            delay,
        });
        Ok(())
    }

    pub fn nodes(&self) -> &[TopoNode] {
        &self.nodes
    }

    pub fn links(&self) -> &[TopoLink] {
        &self.links
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn link_count(&self) -> usize {
        self.links.len()
    }

    /// Directed faces, two per link.
    pub fn face_count(&self) -> usize {
        2 * self.links.len()
    }

    pub fn index_of(&self, id: &str) -> Option<NodeId> {
        self.nodes.iter().position(|n| n.id == id).map(NodeId)
    }

    pub fn link_between(&self, a: NodeId, b: NodeId) -> Option<usize> {
        self.links
            .iter()
            .position(|l| (l.a == a && l.b == b) || (l.a == b && l.b == a))
    }

    pub fn set_role(&mut self, node: NodeId, role: Role) {
        self.nodes[node.0].role = role;
    }

    pub fn with_role(&self, role: Role) -> impl Iterator<Item = NodeId> + '_ {
        self.nodes
            .iter()
            .enumerate()
            .filter(move |(_, n)| n.role == role)
            .map(|(i, _)| NodeId(i))
    }

    /// Per-node face lists. Face `f` of node `n` is `faces()[n][f]`.
    pub fn faces(&self) -> Vec<Vec<FaceSpec>> {
        let mut faces: Vec<Vec<FaceSpec>> = vec![Vec::new(); self.nodes.len()];
        for (i, l) in self.links.iter().enumerate() {
            let fa = faces[l.a.0].len();
            let fb = faces[l.b.0].len();
            faces[l.a.0].push(FaceSpec {
                link: i,
                peer: l.b,
                peer_face: fb,
                bandwidth_bps: l.bandwidth_bps,
                delay: l.delay,
            });
            faces[l.b.0].push(FaceSpec {
                link: i,
                peer: l.a,
                peer_face: fa,
                bandwidth_bps: l.bandwidth_bps,
                delay: l.delay,
            });
        }
        faces
    }

    /// Hop distance from the nearest of `sources`; `None` when unreachable.
    pub fn hop_distances(&self, sources: &[NodeId]) -> Vec<Option<usize>> {
        let faces = self.faces();
        let mut dist = vec![None; self.nodes.len()];
        let mut queue = VecDeque::new();
        for &s in sources {
            if dist[s.0].is_none() {
                dist[s.0] = Some(0);
                queue.push_back(s);
            }
        }
        while let Some(n) = queue.pop_front() {
            let d = dist[n.0].unwrap();
            for f in &faces[n.0] {
                if dist[f.peer.0].is_none() {
                    dist[f.peer.0] = Some(d + 1);
                    queue.push_back(f.peer);
                }
            }
        }
        dist
    }

    pub fn is_connected(&self) -> bool {
        self.nodes.is_empty() || self.hop_distances(&[NodeId(0)]).iter().all(Option::is_some)
    }
}

fn fmt_num(x: f64) -> String {
    if x.fract() == 0.0 && x.abs() < 1e15 {
        format!("{}", x as i64)
    } else {
        format!("{x}")
    }
}

impl fmt::Display for Topology {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for n in &self.nodes {
            writeln!(f, "node {} {}", n.id, n.role.label())?;
        }
        for l in &self.links {
            writeln!(
                f,
                "link {} {} {} {}",
                self.nodes[l.a.0].id,
                self.nodes[l.b.0].id,
                fmt_num(l.bandwidth_bps),
                fmt_num(l.delay * 1000.0)
            )?;
        }
        Ok(())
    }
}

/// Parses topology text. Any error aborts the whole parse.
pub fn load_topology(text: &str) -> Result<Topology> {
    let mut topo = Topology::new();
    let mut pending_links = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let stmt = raw.split('#').next().unwrap_or("").trim();
        if stmt.is_empty() {
            continue;
        }
        let words: Vec<&str> = stmt.split_whitespace().collect();
        match words[0] {
            "node" => {
                let role = match words.len() {
                    2 => Role::Router,
                    3 => words[2].parse().map_err(|e: Error| Error::parse(line, e.to_string()))?,
                    _ => return Err(Error::parse(line, "expected `node <id> [consumer|producer|router]`")),
                };
                topo.add_node(words[1], role)
                    .map_err(|_| Error::parse(line, format!("duplicate node {:?}", words[1])))?;
            }
            "link" => {
                if words.len() != 5 {
                    return Err(Error::parse(
                        line,
                        "expected `link <a> <b> <bandwidth_bps> <delay_ms>`",
                    ));
                }
                let num = |w: &str, what: &str| -> Result<f64> {
                    w.parse::<f64>()
                        .ok()
                        .filter(|x| x.is_finite())
                        .ok_or_else(|| Error::parse(line, format!("invalid {what} {w:?}")))
                };
                let bw = num(words[3], "bandwidth")?;
                let delay_ms = num(words[4], "delay")?;
                pending_links.push((line, words[1].to_owned(), words[2].to_owned(), bw, delay_ms));
            }
            other => return Err(Error::parse(line, format!("unknown statement {other:?}"))),
        }
    }
    for (line, a, b, bw, delay_ms) in pending_links {
        let end = |id: &str| {
            topo.index_of(id)
                .ok_or_else(|| Error::parse(line, format!("link endpoint {id:?} is not a declared node")))
        };
        let (a, b) = (end(&a)?, end(&b)?);
        topo.add_link(a, b, bw, delay_ms / 1000.0)
            .map_err(|e| match e {
                Error::Usage(m) => Error::parse(line, m),
                other => other,
            })?;
    }
    Ok(topo)
}

fn named(n: usize) -> Vec<String> {
    (0..n).map(|i| format!("n{i}")).collect()
}

fn build(ids: &[String], roles: &[Role], edges: &[(usize, usize)], link: LinkParams) -> Result<Topology> {
    let mut t = Topology::new();
    for (id, &role) in ids.iter().zip(roles) {
        t.add_node(id, role)?;
    }
    for &(a, b) in edges {
        t.add_link(NodeId(a), NodeId(b), link.bandwidth_bps, link.delay)?;
    }
    Ok(t)
}

/// `n0 - n1 - ... - n{n-1}` with a consumer at `n0` and a producer at the far end.
pub fn line_topology(n: usize, link: LinkParams) -> Result<Topology> {
    if n < 2 {
        return Err(Error::usage("a line needs at least 2 nodes"));
    }
    let mut roles = vec![Role::Router; n];
    roles[0] = Role::Consumer;
    roles[n - 1] = Role::Producer;
    let edges: Vec<_> = (1..n).map(|i| (i - 1, i)).collect();
    build(&named(n), &roles, &edges, link)
}

/// `rows × cols` lattice of routers, numbered row by row.
pub fn grid_topology(rows: usize, cols: usize, link: LinkParams) -> Result<Topology> {
    if rows == 0 || cols == 0 || rows * cols < 2 {
        return Err(Error::usage("a grid needs at least 2 nodes"));
    }
    let mut edges = Vec::new();
    for r in 0..rows {
        for c in 0..cols {
            let i = r * cols + c;
            if c + 1 < cols {
                edges.push((i, i + 1));
            }
            if r + 1 < rows {
                edges.push((i, i + cols));
            }
        }
    }
    build(&named(rows * cols), &vec![Role::Router; rows * cols], &edges, link)
}

/// Complete binary tree of the given depth: the root produces, the leaves consume.
pub fn tree_topology(depth: u32, link: LinkParams) -> Result<Topology> {
    if depth == 0 || depth > 16 {
        return Err(Error::usage("tree depth must be in 1..=16"));
    }
    let n = (1usize << (depth + 1)) - 1;
    let first_leaf = (1usize << depth) - 1;
    let roles: Vec<Role> = (0..n)
        .map(|i| match i {
            0 => Role::Producer,
            i if i >= first_leaf => Role::Consumer,
            _ => Role::Router,
        })
        .collect();
    let edges: Vec<_> = (1..n).map(|i| ((i - 1) / 2, i)).collect();
    build(&named(n), &roles, &edges, link)
}

/// Connected random graph with exactly `nodes` nodes and `links` links.
///
/// A random spanning tree is laid first, then distinct extra links are added uniformly.
/// `n0` produces and the last node consumes.
pub fn random_topology(nodes: usize, links: usize, seed: u64, link: LinkParams) -> Result<Topology> {
    if nodes < 2 {
        return Err(Error::usage("a random topology needs at least 2 nodes"));
    }
    let max_links = nodes * (nodes - 1) / 2;
    if links < nodes - 1 || links > max_links {
        return Err(Error::usage(format!(
            "{links} links cannot connect {nodes} nodes (need {}..={max_links})",
            nodes - 1
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut order: Vec<usize> = (0..nodes).collect();
    order.shuffle(&mut rng);
    let mut edges = Vec::with_capacity(links);
    let mut seen = HashSet::new();
    let key = |a: usize, b: usize| (a.min(b), a.max(b));
    for i in 1..nodes {
        let a = order[rng.random_range(0..i)];
        let b = order[i];
        seen.insert(key(a, b));
        edges.push((a, b));
    }
    if links - edges.len() > max_links / 2 {
        // Dense: pick from the explicit complement instead of rejection sampling.
        let mut rest: Vec<_> = (0..nodes)
            .flat_map(|a| (a + 1..nodes).map(move |b| (a, b)))
            .filter(|e| !seen.contains(e))
            .collect();
        rest.shuffle(&mut rng);
        edges.extend(rest.into_iter().take(links - (nodes - 1)));
    } else {
        while edges.len() < links {
            let a = rng.random_range(0..nodes);
            let b = rng.random_range(0..nodes);
            if a != b && seen.insert(key(a, b)) {
                edges.push((a, b));
            }
        }
    }
    let mut roles = vec![Role::Router; nodes];
    roles[0] = Role::Producer;
    roles[nodes - 1] = Role::Consumer;
    build(&named(nodes), &roles, &edges, link)
}

/// A generator reference such as `grid:3x3`, usable wherever a topology file is expected.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BuiltinTopology {
    Line(usize),
    Grid(usize, usize),
    Tree(u32),
    Random { nodes: usize, links: usize },
}

impl BuiltinTopology {
    pub fn generate(self, seed: u64, link: LinkParams) -> Result<Topology> {
        match self {
            BuiltinTopology::Line(n) => line_topology(n, link),
            BuiltinTopology::Grid(r, c) => grid_topology(r, c, link),
            BuiltinTopology::Tree(d) => tree_topology(d, link),
            BuiltinTopology::Random { nodes, links } => random_topology(nodes, links, seed, link),
        }
    }
}

impl fmt::Display for BuiltinTopology {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BuiltinTopology::Line(n) => write!(f, "line:{n}"),
            BuiltinTopology::Grid(r, c) => write!(f, "grid:{r}x{c}"),
            BuiltinTopology::Tree(d) => write!(f, "tree:{d}"),
            BuiltinTopology::Random { nodes, links } => write!(f, "random:{nodes}:{links}"),
        }
    }
}

impl FromStr for BuiltinTopology {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::usage(format!("invalid builtin topology {s:?}"));
        let (kind, args) = s.split_once(':').ok_or_else(bad)?;
        let int = |x: &str| x.parse::<usize>().map_err(|_| bad());
        match kind {
            "line" => Ok(BuiltinTopology::Line(int(args)?)),
            "grid" => {
                let (r, c) = args.split_once('x').ok_or_else(bad)?;
                Ok(BuiltinTopology::Grid(int(r)?, int(c)?))
            }
            "tree" => Ok(BuiltinTopology::Tree(args.parse().map_err(|_| bad())?)),
            "random" => {
                let (n, l) = args.split_once(':').ok_or_else(bad)?;
                Ok(BuiltinTopology::Random {
                    nodes: int(n)?,
                    links: int(l)?,
                })
            }
            _ => Err(bad()),
        }
    }
}

/// Reassigns roles so exactly the listed nodes consume / produce; everything else routes.
pub fn assign_roles(topo: &mut Topology, consumers: &[String], producers: &[String]) -> Result<()> {
    let mut roles: HashMap<NodeId, Role> = HashMap::new();
    for (ids, role) in [(consumers, Role::Consumer), (producers, Role::Producer)] {
        for id in ids {
            let n = topo
                .index_of(id)
                .ok_or_else(|| Error::Config(format!("unknown node {id:?} in role list")))?;
            if roles.insert(n, role).is_some_and(|r| r != role) {
                return Err(Error::Config(format!("node {id:?} is both consumer and producer")));
            }
        }
    }
    for i in 0..topo.node_count() {
        let n = NodeId(i);
        let current = topo.nodes[i].role;
        let role = match roles.get(&n) {
            Some(&r) => r,
            None if current == Role::Consumer && !consumers.is_empty() => Role::Router,
            None if current == Role::Producer && !producers.is_empty() => Role::Router,
            None => current,
        };
        topo.set_role(n, role);
    }
    Ok(())
}
