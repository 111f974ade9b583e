//! Lexical entries, the two-tier store, and sense retrieval.

use std::collections::HashMap;

use serde::Serialize;
use thiserror::Error;

use crate::avm::{AttributeVector, AvmError};
use crate::sexpr::SexprError;

mod entry;
mod morph;
mod store;
pub mod synth;
pub mod table;

pub use entry::{parse_entries, Function, LexicalEntry, Phrase};
pub use morph::{Candidate, SuffixRule, SuffixTable};
pub use store::{compile_secondary, compile_text, LexiconStats, LexiconStore};
pub use table::{SecondaryTable, TableStats};

/// Toy lexicon used with the bundled English grammar.
pub const ENGLISH_LEXICON: &str = include_str!("../../data/lex/english.lex");

/// Maximum number of `ref` hops followed before giving up.
pub const REF_DEPTH_LIMIT: usize = 4;

#[derive(Debug, Error)]
pub enum LexiconError {
    #[error("{msg}")]
    Entry { msg: String },
    #[error("entry {index} (line {line}): {source}")]
    AtEntry {
        index: usize,
        line: usize,
        source: Box<LexiconError>,
    },
    #[error(transparent)]
    Sexpr(#[from] SexprError),
    #[error(transparent)]
    Avm(#[from] AvmError),
    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),
    #[error("corrupt secondary table: {0}")]
    Corrupt(String),
    #[error("checksum mismatch for `{key}`")]
    Checksum { key: String },
    #[error("`{word}` refers to `{base}`, which has no entry")]
    MissingBase { word: String, base: String },
    #[error("ref chain from `{word}` is longer than {REF_DEPTH_LIMIT}")]
    RefCycle { word: String },
}

/// One reading of a word (or phrase) as the parser sees it.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct LexicalSense {
    pub word: String,
    pub span_width: usize,
    pub av_self: AttributeVector,
    pub av_comp: Vec<AttributeVector>,
}

/// A sense anchored in a sentence; `start` is the first covered token.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct PositionedSense {
    pub start: usize,
    pub sense: LexicalSense,
}

/// Anything entries can be fetched from.
pub trait EntrySource {
    fn entry(&self, key: &str) -> Result<Option<LexicalEntry>, LexiconError>;
}

impl EntrySource for HashMap<String, LexicalEntry> {
    fn entry(&self, key: &str) -> Result<Option<LexicalEntry>, LexiconError> {
        Ok(self.get(&key.to_lowercase()).cloned())
    }
}

/// Direct senses of an entry: its subcat frames plus resolved refs.
pub fn entry_senses(entry: &LexicalEntry, src: &dyn EntrySource) -> Result<Vec<LexicalSense>, LexiconError> {
    senses_at_depth(entry, src, 0)
}

fn senses_at_depth(
    entry: &LexicalEntry,
    src: &dyn EntrySource,
    depth: usize,
) -> Result<Vec<LexicalSense>, LexiconError> {
    let width = Phrase::parse_key(&entry.key).map_or(1, |p| p.len().max(1));
    let mut out = Vec::new();
    for f in &entry.functions {
        match f {
            Function::Subcat { head, comps } => out.push(LexicalSense {
                word: entry.key.clone(),
                span_width: width,
                av_self: head.clone(),
                av_comp: comps.clone(),
            }),
            Function::Ref { av, base, names } => {
                out.extend(ref_senses(&entry.key, av, base, names, src, depth)?);
            }
            Function::Phrases(_) => {}
        }
    }
    Ok(out)
}

fn ref_senses(
    word: &str,
    av: &AttributeVector,
    base: &str,
    names: &[String],
    src: &dyn EntrySource,
    depth: usize,
) -> Result<Vec<LexicalSense>, LexiconError> {
    if depth >= REF_DEPTH_LIMIT {
        return Err(LexiconError::RefCycle { word: word.to_owned() });
    }
    let base_entry = src.entry(base)?.ok_or_else(|| LexiconError::MissingBase {
        word: word.to_owned(),
        base: base.to_owned(),
    })?;
    let mut out = Vec::new();
    for s in senses_at_depth(&base_entry, src, depth + 1)? {
        if !names.iter().all(|n| av.get(n) == s.av_self.get(n)) {
            continue;
        }
        if let Some(u) = av.unify(&s.av_self) {
            out.push(LexicalSense {
                word: word.to_owned(),
                span_width: 1,
                av_self: u,
                av_comp: s.av_comp,
            });
        }
    }
    Ok(out)
}

/// Senses produced by the first `ref` function of `entry`.
pub fn resolve_ref(entry: &LexicalEntry, src: &dyn EntrySource) -> Result<Vec<LexicalSense>, LexiconError> {
    for f in &entry.functions {
        if let Function::Ref { av, base, names } = f {
            return ref_senses(&entry.key, av, base, names, src, 0);
        }
    }
    Ok(Vec::new())
}

/// Phrase senses of `entry` found around `head_pos`. Phrases that match the
/// sentence but have no entry of their own are returned as missing keys.
pub fn expand_phrases(
    entry: &LexicalEntry,
    sentence: &[String],
    head_pos: usize,
    src: &dyn EntrySource,
) -> Result<(Vec<PositionedSense>, Vec<String>), LexiconError> {
    let mut found = Vec::new();
    let mut missing = Vec::new();
    for p in entry.phrases() {
        let Some(start) = head_pos.checked_sub(p.before.len()) else {
            continue;
        };
        if head_pos + p.head.len() > sentence.len() {
            continue;
        }
        let eq = |a: &String, b: &String| a.eq_ignore_ascii_case(b);
        let before_ok = p.before.iter().zip(&sentence[start..head_pos]).all(|(a, b)| eq(a, b));
        // the first head word is the entry word itself, possibly inflected
        let head_ok = p.head[1..]
            .iter()
            .zip(&sentence[head_pos + 1..])
            .all(|(a, b)| eq(a, b));
        if !(before_ok && head_ok) {
            continue;
        }
        let key = p.key();
        match src.entry(&key)? {
            Some(pe) => {
                for mut s in entry_senses(&pe, src)? {
                    s.span_width = p.len();
                    found.push(PositionedSense { start, sense: s });
                }
            }
            None => missing.push(key),
        }
    }
    Ok((found, missing))
}

/// Result of looking up one sentence position.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct WordLookup {
    pub senses: Vec<PositionedSense>,
    /// Phrase keys matched in the sentence but absent from the lexicon.
    pub missing_phrases: Vec<String>,
    /// Bases that supplied senses through suffix stripping.
    pub stripped_from: Vec<String>,
}

/// All senses for the token at `pos`: direct entry senses, phrase senses,
/// and, when the word has no entry, senses of every stripped base that has
/// one, unified with the inflection.
pub fn lookup_senses(
    src: &dyn EntrySource,
    suffixes: &SuffixTable,
    sentence: &[String],
    pos: usize,
) -> Result<WordLookup, LexiconError> {
    let word = sentence[pos].to_lowercase();
    let mut out = WordLookup::default();
    let push = |out: &mut WordLookup, ps: PositionedSense| {
        if !out.senses.contains(&ps) {
            out.senses.push(ps);
        }
    };
    match src.entry(&word)? {
        Some(e) => {
            for s in entry_senses(&e, src)? {
                push(&mut out, PositionedSense { start: pos, sense: with_word(s, &word) });
            }
            let (ps, missing) = expand_phrases(&e, sentence, pos, src)?;
            ps.into_iter().for_each(|p| push(&mut out, p));
            out.missing_phrases = missing;
        }
        None => {
            for cand in suffixes.strip_candidates(&word) {
                let Some(e) = src.entry(&cand.base)? else {
                    continue;
                };
                let mut used = false;
                for s in entry_senses(&e, src)? {
                    for infl in &cand.inflections {
                        if let Some(u) = s.av_self.unify(infl) {
                            used = true;
                            let sense = LexicalSense {
                                word: word.clone(),
                                span_width: 1,
                                av_self: u,
                                av_comp: s.av_comp.clone(),
                            };
                            push(&mut out, PositionedSense { start: pos, sense });
                        }
                    }
                }
                let (ps, missing) = expand_phrases(&e, sentence, pos, src)?;
                used |= !ps.is_empty();
                ps.into_iter().for_each(|p| push(&mut out, p));
                out.missing_phrases.extend(missing);
                if used {
                    out.stripped_from.push(cand.base);
                }
            }
        }
    }
    Ok(out)
}

fn with_word(mut s: LexicalSense, word: &str) -> LexicalSense {
    if s.span_width == 1 {
        s.word = word.to_owned();
    }
    s
}
