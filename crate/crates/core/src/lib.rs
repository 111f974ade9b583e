//! Principle-based parsing by message passing.
//!
//! A sentence is parsed by feeding one lexical item at a time into a
//! [`GrammarNetwork`](network::GrammarNetwork). Nodes of the network store
//! items, combine adjacent ones and pass complete items on as messages.
//! Grammatical principles are not checked on finished trees; they are local
//! constraints on nodes and percolation constraints on links, applied to the
//! attribute vectors that describe partial structures while they are being
//! built. The surviving items at the top node are traced into a packed,
//! weighted [`ParseForest`](forest::ParseForest) whose trees come out
//! lightest first.
//!
//! Words come from a two-tier [`LexiconStore`](lexicon::LexiconStore): an
//! in-memory table that overrides a read-optimized on-disk hash table.

pub mod avm;
pub mod cfg;
pub mod engine;
pub mod forest;
pub mod lexicon;
pub mod network;
pub mod sexpr;
pub mod weight;

pub use avm::{AttributeVector, FeatureRegistry, Literal, Value};
pub use engine::{tokenize, ParseConfig, ParseOutcome, Parser};
pub use forest::{ParseForest, ParseTree, TreeFormat};
pub use lexicon::{LexicalEntry, LexicalSense, LexiconStore};
pub use network::GrammarNetwork;
pub use weight::Weight;
