//! Fixtures shared by the criterion benches.

use principar::cfg::Cfg;
use principar::lexicon::{compile_secondary, synth};
use principar::{GrammarNetwork, LexiconStore};
use std::path::Path;

/// Sentences of the bundled English grammar, shortest first.
pub const ENGLISH_SENTENCES: [&str; 5] = [
    "Kim left",
    "Kim will leave",
    "Who did Kim love",
    "John read the story about Kim",
    "Who did Kim read the story about the picture of",
];

pub fn english() -> (GrammarNetwork, LexiconStore) {
    let net = GrammarNetwork::english();
    let lex = LexiconStore::english(net.registry.clone()).expect("bundled lexicon");
    (net, lex)
}

/// `S -> S S | a` and a sentence of `n` a's.
pub fn ambiguous(n: usize) -> (Cfg, GrammarNetwork, Vec<String>) {
    let g = Cfg::binary_ambiguous();
    let net = g.network();
    (g, net, vec!["a".to_owned(); n])
}

/// Compiles `n` synthetic entries into `dir` and returns their keys.
pub fn synthetic_lexicon(dir: &Path, n: usize, seed: u64) -> Vec<String> {
    let entries = synth::synthetic_entries(n, seed);
    let keys = entries.iter().map(|e| e.key.clone()).collect();
    compile_secondary(entries, &dir.join("secondary.plex")).expect("table compiles");
    keys
}
