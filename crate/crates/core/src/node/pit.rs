use std::collections::HashMap;

use crate::packet::{ClassId, Name};

/// Where a packet entered the node: a network face or the local application.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Face {
    Net(usize),
    App,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PitEntry {
    pub name: Name,
    /// Downstream faces awaiting the Data, in arrival order, without duplicates.
    pub in_faces: Vec<Face>,
    pub out_face: usize,
    pub class: ClassId,
    pub created_at: f64,
    pub expiry: f64,
}

impl PitEntry {
    pub(crate) fn add_in_face(&mut self, face: Face) -> bool {
        if self.in_faces.contains(&face) {
            return false;
        }
        self.in_faces.push(face);
        true
    }
}

#[derive(Debug, Default)]
pub struct Pit {
    entries: HashMap<Name, PitEntry>,
    created: u64,
    satisfied: u64,
    expired: u64,
}

impl Pit {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, name: &Name) -> Option<&PitEntry> {
        self.entries.get(name)
    }

    pub(crate) fn get_mut(&mut self, name: &Name) -> Option<&mut PitEntry> {
        self.entries.get_mut(name)
    }

    pub fn entries(&self) -> impl Iterator<Item = &PitEntry> {
        self.entries.values()
    }

    pub(crate) fn insert(&mut self, entry: PitEntry) {
        debug_assert!(entry.expiry > entry.created_at);
        debug_assert!(!entry.in_faces.is_empty());
        let prev = self.entries.insert(entry.name.clone(), entry);
        debug_assert!(prev.is_none(), "one PIT entry per name");
        self.created += 1;
    }

    pub(crate) fn take_satisfied(&mut self, name: &Name) -> Option<PitEntry> {
        let e = self.entries.remove(name)?;
        self.satisfied += 1;
        Some(e)
    }

    /// Removes the entry for `name` if it has expired by `now`. Stale timers return `None`.
    pub(crate) fn take_expired(&mut self, name: &Name, now: f64) -> Option<PitEntry> {
        if self.entries.get(name)?.expiry > now {
            return None;
        }
        self.expired += 1;
        self.entries.remove(name)
    }

    pub fn created(&self) -> u64 {
        self.created
    }

    pub fn satisfied(&self) -> u64 {
        self.satisfied
    }

    pub fn expired(&self) -> u64 {
        self.expired
    }
}
