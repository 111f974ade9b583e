use std::collections::{HashMap, HashSet};
use std::fs::{File, OpenOptions};
use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::{Mutex, RwLock};

use serde::Serialize;

use crate::avm::FeatureRegistry;

use super::entry::{normalize_key, parse_entries, LexicalEntry};
use super::morph::SuffixTable;
use super::table::{write_table, SecondaryTable, TableStats};
use super::{lookup_senses, EntrySource, LexiconError, WordLookup};

pub const PRIMARY_FILE: &str = "primary.lex";
pub const SECONDARY_FILE: &str = "secondary.plex";

#[derive(Default)]
struct Primary {
    map: HashMap<String, LexicalEntry>,
    /// Keys cached from the secondary table rather than put.
    cached: HashSet<String>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct LexiconStats {
    pub primary_hits: u64,
    pub secondary_hits: u64,
    pub misses: u64,
    pub primary_entries: usize,
    pub secondary_entries: usize,
}

/// In-memory primary table over an optional on-disk secondary table.
///
/// Puts go to the primary map and are appended to the buffer file; the
/// secondary table is only ever read. Secondary hits are cached in memory.
pub struct LexiconStore {
    registry: FeatureRegistry,
    suffixes: SuffixTable,
    primary: RwLock<Primary>,
    secondary: Option<SecondaryTable>,
    buffer_path: Option<PathBuf>,
    buffer: Mutex<Option<File>>,
    primary_hits: AtomicU64,
    secondary_hits: AtomicU64,
    misses: AtomicU64,
}

impl std::fmt::Debug for LexiconStore {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("LexiconStore")
            .field("buffer_path", &self.buffer_path)
            .field("stats", &self.stats())
            .finish()
    }
}

impl LexiconStore {
    pub fn in_memory(registry: FeatureRegistry) -> Self {
        LexiconStore {
            registry,
            suffixes: SuffixTable::default(),
            primary: RwLock::new(Primary::default()),
            secondary: None,
            buffer_path: None,
            buffer: Mutex::new(None),
            primary_hits: AtomicU64::new(0),
            secondary_hits: AtomicU64::new(0),
            misses: AtomicU64::new(0),
        }
    }

    /// A memory-only store holding the entries of a text lexicon.
    pub fn from_text(text: &str, registry: FeatureRegistry) -> Result<Self, LexiconError> {
        let entries = parse_entries(text, &registry)?;
        let store = Self::in_memory(registry);
        {
            let mut p = store.primary.write().unwrap();
            for e in entries {
                p.map.insert(e.key.clone(), e);
            }
        }
        Ok(store)
    }

    /// The bundled toy lexicon, checked against `registry`.
    pub fn english(registry: FeatureRegistry) -> Result<Self, LexiconError> {
        Self::from_text(super::ENGLISH_LEXICON, registry)
    }

    /// Opens a lexicon directory: `primary.lex` is replayed into memory (and
    /// created on first put), `secondary.plex` is opened if present.
    pub fn open(dir: &Path, registry: FeatureRegistry) -> Result<Self, LexiconError> {
        let secondary = dir.join(SECONDARY_FILE);
        let secondary = if secondary.exists() {
            Some(SecondaryTable::open(&secondary)?)
        } else {
            None
        };
        Self::open_parts(&dir.join(PRIMARY_FILE), secondary, registry)
    }

    pub fn open_parts(
        buffer_path: &Path,
        secondary: Option<SecondaryTable>,
        registry: FeatureRegistry,
    ) -> Result<Self, LexiconError> {
        let mut store = Self::in_memory(registry);
        if buffer_path.exists() {
            let text = std::fs::read_to_string(buffer_path)?;
            let entries = parse_entries(&text, &store.registry)?;
            let p = store.primary.get_mut().unwrap();
            for e in entries {
                p.map.insert(e.key.clone(), e);
            }
        }
        store.secondary = secondary;
        store.buffer_path = Some(buffer_path.to_owned());
        Ok(store)
    }

    pub fn with_suffixes(mut self, suffixes: SuffixTable) -> Self {
        self.suffixes = suffixes;
        self
    }

    pub fn registry(&self) -> &FeatureRegistry {
        &self.registry
    }

    pub fn suffixes(&self) -> &SuffixTable {
        &self.suffixes
    }

    pub fn get(&self, key: &str) -> Result<Option<LexicalEntry>, LexiconError> {
        let key = normalize_key(key);
        if let Some(e) = self.primary.read().unwrap().map.get(&key) {
            self.primary_hits.fetch_add(1, Ordering::Relaxed);
            return Ok(Some(e.clone()));
        }
        let Some(sec) = &self.secondary else {
            self.misses.fetch_add(1, Ordering::Relaxed);
            return Ok(None);
        };
        let Some(text) = sec.get(&key)? else {
            self.misses.fetch_add(1, Ordering::Relaxed);
            return Ok(None);
        };
        let entry = LexicalEntry::parse(&text, &self.registry)?;
        self.secondary_hits.fetch_add(1, Ordering::Relaxed);
        let mut p = self.primary.write().unwrap();
        // a concurrent put wins over the cached copy
        if let Some(e) = p.map.get(&key) {
            return Ok(Some(e.clone()));
        }
        p.map.insert(key.clone(), entry.clone());
        p.cached.insert(key);
        Ok(Some(entry))
    }

    pub fn put(&self, entry: LexicalEntry) -> Result<(), LexiconError> {
        for f in &entry.functions {
            if let super::Function::Subcat { head, comps } = f {
                self.registry.validate(head)?;
                comps.iter().try_for_each(|c| self.registry.validate(c))?;
            }
        }
        if let Some(path) = &self.buffer_path {
            let mut buf = self.buffer.lock().unwrap();
            if buf.is_none() {
                *buf = Some(OpenOptions::new().create(true).append(true).open(path)?);
            }
            let f = buf.as_mut().unwrap();
            writeln!(f, "{entry}")?;
            f.flush()?;
        }
        let mut p = self.primary.write().unwrap();
        p.cached.remove(&entry.key);
        p.map.insert(entry.key.clone(), entry);
        Ok(())
    }

    /// Drops entries that were cached from the secondary table.
    pub fn clear_cache(&self) {
        let mut p = self.primary.write().unwrap();
        let cached = std::mem::take(&mut p.cached);
        for k in cached {
            p.map.remove(&k);
        }
    }

    pub fn reset_counters(&self) {
        self.primary_hits.store(0, Ordering::Relaxed);
        self.secondary_hits.store(0, Ordering::Relaxed);
        self.misses.store(0, Ordering::Relaxed);
    }

    pub fn stats(&self) -> LexiconStats {
        LexiconStats {
            primary_hits: self.primary_hits.load(Ordering::Relaxed),
            secondary_hits: self.secondary_hits.load(Ordering::Relaxed),
            misses: self.misses.load(Ordering::Relaxed),
            primary_entries: self.primary.read().unwrap().map.len(),
            secondary_entries: self.secondary.as_ref().map_or(0, SecondaryTable::len),
        }
    }

    /// Keys currently held in the primary map, sorted.
    pub fn primary_keys(&self) -> Vec<String> {
        let mut k: Vec<String> = self.primary.read().unwrap().map.keys().cloned().collect();
        k.sort();
        k
    }

    pub fn lookup(&self, sentence: &[String], pos: usize) -> Result<WordLookup, LexiconError> {
        lookup_senses(self, &self.suffixes, sentence, pos)
    }
}

impl EntrySource for LexiconStore {
    fn entry(&self, key: &str) -> Result<Option<LexicalEntry>, LexiconError> {
        self.get(key)
    }
}

/// Writes `entries` as a secondary table; later duplicates win.
pub fn compile_secondary(entries: Vec<LexicalEntry>, out: &Path) -> Result<TableStats, LexiconError> {
    let mut index: HashMap<String, usize> = HashMap::new();
    let mut rows: Vec<(String, String)> = Vec::with_capacity(entries.len());
    for e in entries {
        let row = (e.key.clone(), e.to_string());
        match index.get(&e.key) {
            Some(&i) => rows[i] = row,
            None => {
                index.insert(e.key.clone(), rows.len());
                rows.push(row);
            }
        }
    }
    write_table(out, &rows)
}

pub fn compile_text(text: &str, registry: &FeatureRegistry, out: &Path) -> Result<TableStats, LexiconError> {
    compile_secondary(parse_entries(text, registry)?, out)
}
