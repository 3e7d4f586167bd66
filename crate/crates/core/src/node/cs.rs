use std::num::NonZeroUsize;

use lru::LruCache;

use crate::packet::{Name, Packet};

/// LRU cache of Data packets keyed by name. A zero capacity caches nothing.
#[derive(Debug)]
pub struct ContentStore {
    cache: Option<LruCache<Name, Packet>>,
    hits: u64,
    misses: u64,
}

impl ContentStore {
    pub fn new(capacity: usize) -> Self {
        Self {
            cache: NonZeroUsize::new(capacity).map(LruCache::new),
            hits: 0,
            misses: 0,
        }
    }

    pub fn capacity(&self) -> usize {
        self.cache.as_ref().map_or(0, |c| c.cap().get())
    }

    pub fn len(&self) -> usize {
        self.cache.as_ref().map_or(0, LruCache::len)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Looks up `name`, refreshing its recency on a hit.
    pub fn lookup(&mut self, name: &Name) -> Option<&Packet> {
        let hit = self.cache.as_mut().and_then(|c| c.get(name));
        if hit.is_some() {
            self.hits += 1;
        } else {
            self.misses += 1;
        }
        hit
    }

    pub fn contains(&self, name: &Name) -> bool {
        self.cache.as_ref().is_some_and(|c| c.contains(name))
    }

    /// Inserts `data`, returning the name evicted to make room, if any.
    pub fn insert(&mut self, data: Packet) -> Option<Name> {
        let cache = self.cache.as_mut()?;
        match cache.push(data.name.clone(), data) {
            Some((evicted, _)) if !cache.contains(&evicted) => Some(evicted),
            _ => None,
        }
    }

    pub fn hits(&self) -> u64 {
        self.hits
    }

    pub fn misses(&self) -> u64 {
        self.misses
    }
}
