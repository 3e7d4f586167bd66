use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::packet::Name;

#[derive(Debug, Clone, PartialEq)]
pub struct FibEntry {
    pub prefix: Name,
    /// Next hops in preference order.
    pub candidate_faces: Vec<usize>,
}

/// Longest-prefix-match table from name prefixes to candidate faces.
#[derive(Debug, Default, Clone)]
pub struct Fib {
    entries: HashMap<Name, FibEntry>,
    face_count: usize,
}

impl Fib {
    pub fn new(face_count: usize) -> Self {
        Self {
            entries: HashMap::new(),
            face_count,
        }
    }

    /// Adds or replaces the entry for `prefix`.
    pub fn insert(&mut self, prefix: Name, candidate_faces: Vec<usize>) -> Result<()> {
        if candidate_faces.is_empty() {
            return Err(Error::usage(format!("FIB entry {prefix} has no faces")));
        }
        for (i, &f) in candidate_faces.iter().enumerate() {
            if f >= self.face_count {
                return Err(Error::usage(format!("FIB entry {prefix}: face {f} does not exist")));
            }
            if candidate_faces[..i].contains(&f) {
                return Err(Error::usage(format!("FIB entry {prefix}: face {f} listed twice")));
            }
        }
        self.entries.insert(
            prefix.clone(),
            FibEntry {
                prefix,
                candidate_faces,
            },
        );
        Ok(())
    }

    pub fn lookup(&self, name: &Name) -> Option<&FibEntry> {
        name.prefixes_longest_first().find_map(|p| self.entries.get(p))
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}
