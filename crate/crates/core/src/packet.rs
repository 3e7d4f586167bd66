use std::borrow::Borrow;
use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};

/// Hierarchical content name such as `/c3/o1742`.
///
/// Stored as its canonical URI. Prefixes are slices of that URI ending at a component boundary,
/// which keeps longest-prefix lookups allocation free.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Name(Arc<str>);

impl Name {
    /// Parses `/a/b/c`. Empty components (`//`) and missing leading slash are rejected;
    /// `/` alone is the root prefix.
    pub fn parse(uri: &str) -> Result<Self> {
        if !uri.starts_with('/') {
            return Err(Error::usage(format!("name {uri:?} must start with '/'")));
        }
        if uri == "/" {
            return Ok(Self::root());
        }
        if uri[1..].split('/').any(|c| c.is_empty() || c.chars().any(char::is_whitespace)) {
            return Err(Error::usage(format!("name {uri:?} has an empty or blank component")));
        }
        Ok(Name(Arc::from(uri)))
    }

    /// The empty prefix, matching every name.
    pub fn root() -> Self {
        Name(Arc::from(""))
    }

    pub fn from_components<S: AsRef<str>>(components: &[S]) -> Result<Self> {
        let mut uri = String::new();
        for c in components {
            uri.push('/');
            uri.push_str(c.as_ref());
        }
        if uri.is_empty() {
            return Ok(Self::root());
        }
        Self::parse(&uri)
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn components(&self) -> impl Iterator<Item = &str> {
        self.0.split('/').skip(1)
    }

    pub fn len(&self) -> usize {
        self.components().count()
    }

    pub fn first_component(&self) -> Option<&str> {
        self.components().next()
    }

    /// URI of every prefix from longest (the name itself) to the root (`""`).
    pub fn prefixes_longest_first(&self) -> impl Iterator<Item = &str> {
        let s: &str = &self.0;
        std::iter::once(s).chain(s.rmatch_indices('/').map(move |(i, _)| &s[..i]))
    }
}

// Hash and Eq of `Name` are those of its URI string.
impl Borrow<str> for Name {
    fn borrow(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for Name {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            f.write_str("/")
        } else {
            f.write_str(&self.0)
        }
    }
}

impl fmt::Debug for Name {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Name({self})")
    }
}

/// Dense content class index `k`. Doubles as the DRR flow id.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ClassId(pub u32);

/// Interns first name components into dense [`ClassId`]s in order of first appearance.
#[derive(Debug, Default, Clone)]
pub struct ClassRegistry {
    ids: HashMap<String, ClassId>,
    labels: Vec<String>,
}

impl ClassRegistry {
    pub fn new() -> Self {
        Self::default()
    }

    /// Class of `name`, or `None` for the root name.
    pub fn class_of(&mut self, name: &Name) -> Option<ClassId> {
        let first = name.first_component()?;
        if let Some(&id) = self.ids.get(first) {
            return Some(id);
        }
        let id = ClassId(self.labels.len() as u32);
        self.ids.insert(first.to_owned(), id);
        self.labels.push(first.to_owned());
        Some(id)
    }

    pub fn label(&self, id: ClassId) -> Option<&str> {
        self.labels.get(id.0 as usize).map(String::as_str)
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PacketKind {
    Interest,
    Data,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Packet {
    pub name: Name,
    pub kind: PacketKind,
    /// Bytes on the wire.
    pub size: u32,
    pub class: ClassId,
    /// Simulation time the packet was created, in seconds.
    pub created_at: f64,
}

impl Packet {
    pub fn interest(name: Name, class: ClassId, size: u32, now: f64) -> Self {
        Self {
            name,
            kind: PacketKind::Interest,
            size,
            class,
            created_at: now,
        }
    }

    pub fn data(name: Name, class: ClassId, size: u32, now: f64) -> Self {
        Self {
            name,
            kind: PacketKind::Data,
            size,
            class,
            created_at: now,
        }
    }

    /// A packet is well formed when it has a non-root name and a positive size.
    pub fn is_well_formed(&self) -> bool {
        self.size > 0 && !self.name.is_empty()
    }
}
