//! The message-passing parser.
//!
//! Lexical items are fed into the network one at a time, left to right;
//! after each one, messages are passed until none are left. Complete items
//! travel child to parent along dominance links and specific to general
//! along subsumption links.

mod chart;

use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::avm::{av, AttributeVector};
use crate::forest::{sense_weight, ParseForest};
use crate::lexicon::{LexicalSense, LexiconError, LexiconStore};
use crate::network::{GrammarNetwork, NodeId};
use crate::weight::Weight;

pub use chart::{
    acceptable_root, combine, Chart, ChartStats, CombineFailure, Completion, Deriv, Item, ItemId, Message,
    Origin, Span,
};

#[derive(Debug, Error)]
pub enum ParseError {
    #[error("lexicon: {0}")]
    Lexicon(#[from] LexiconError),
}

/// Open-class guesses for words missing from the lexicon.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Guess {
    Noun,
    Verb,
}

impl Guess {
    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "n" => Some(Guess::Noun),
            "v" => Some(Guess::Verb),
            _ => None,
        }
    }

    fn senses(self, word: &str) -> Vec<LexicalSense> {
        let sense = |head: &[&str], comps: Vec<AttributeVector>| LexicalSense {
            word: word.to_owned(),
            span_width: 1,
            av_self: av(head),
            av_comp: comps,
        };
        match self {
            Guess::Noun => vec![sense(&["(cat n)", "(nform norm)"], vec![])],
            Guess::Verb => vec![
                sense(&["(cat v)", "(tense present)"], vec![]),
                sense(&["(cat v)", "(tense present)"], vec![av(&["(cat n)", "(case acc)"])]),
            ],
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParseConfig {
    /// Stop message passing after this many distinct items.
    pub max_items: usize,
    /// Hypothesize wh-traces.
    pub traces: bool,
    pub guess_unknown: Vec<Guess>,
}

impl Default for ParseConfig {
    fn default() -> Self {
        ParseConfig {
            max_items: 2_000_000,
            traces: true,
            guess_unknown: Vec::new(),
        }
    }
}

/// An initial message: a word sense or a hypothesized trace.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Leaf {
    pub node: NodeId,
    pub span: Span,
    pub word: String,
    /// Attributes fed into the network (without `rare`).
    pub att: AttributeVector,
    pub weight: Weight,
    pub rare: Option<String>,
    pub trace: bool,
    /// Free-form label carried through to trees.
    pub tag: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum Diagnostic {
    UnknownWord { pos: usize, word: String },
    MissingPhrase { key: String },
    NoCategory { word: String, att: String },
    NoParse { longest: Vec<String>, blocked: Vec<(String, u64)> },
    ItemLimit { limit: usize },
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Diagnostic::UnknownWord { pos, word } => write!(f, "unknown word `{word}` at {}", pos + 1),
            Diagnostic::MissingPhrase { key } => write!(f, "phrase `{key}` matched but has no entry"),
            Diagnostic::NoCategory { word, att } => write!(f, "no category for `{word}` {att}"),
            Diagnostic::NoParse { longest, blocked } => {
                if longest.is_empty() {
                    write!(f, "no spanning parse; no items")?;
                } else {
                    write!(f, "no spanning parse; longest: {}", longest.join(" "))?;
                }
                if !blocked.is_empty() {
                    let b: Vec<String> = blocked.iter().map(|(l, n)| format!("{l}={n}")).collect();
                    write!(f, "; blocked: {}", b.join(" "))?;
                }
                Ok(())
            }
            Diagnostic::ItemLimit { limit } => write!(f, "item limit {limit} reached"),
        }
    }
}

/// Everything a parse leaves behind: the chart, the leaves that seeded it,
/// and the accepted root items per top node.
#[derive(Clone, Debug)]
pub struct ParseOutcome {
    pub tokens: Vec<String>,
    pub leaves: Vec<Leaf>,
    pub items: Vec<Item>,
    /// Accepted spanning items for each top node, in preference order.
    pub roots: Vec<(NodeId, Vec<ItemId>)>,
    pub diagnostics: Vec<Diagnostic>,
    pub stats: ChartStats,
}

impl ParseOutcome {
    pub fn item(&self, id: ItemId) -> &Item {
        &self.items[id.0 as usize]
    }

    /// Roots of the most preferred top node that has any.
    pub fn preferred_roots(&self) -> (Option<NodeId>, &[ItemId]) {
        self.roots
            .iter()
            .find(|(_, r)| !r.is_empty())
            .map_or((None, &[][..]), |(n, r)| (Some(*n), r.as_slice()))
    }

    pub fn roots_at(&self, node: NodeId) -> &[ItemId] {
        self.roots
            .iter()
            .find(|(n, _)| *n == node)
            .map_or(&[][..], |(_, r)| r.as_slice())
    }

    /// The forest of the preferred top node.
    pub fn forest(&self, net: &GrammarNetwork) -> ParseForest {
        ParseForest::build(net, self, self.preferred_roots().1)
    }

    /// The forest rooted at the named top node, ignoring preference.
    pub fn forest_at(&self, net: &GrammarNetwork, node: &str) -> ParseForest {
        let roots = net.node_id(node).map_or(&[][..], |n| self.roots_at(n));
        ParseForest::build(net, self, roots)
    }
}

/// Splits on whitespace and detaches `?`, `.`, `,`, `!` and `;` into their
/// own tokens.
pub fn tokenize(text: &str) -> Vec<String> {
    let mut out = Vec::new();
    for raw in text.split_whitespace() {
        let mut cur = String::new();
        for c in raw.chars() {
            if matches!(c, '?' | '.' | ',' | '!' | ';') {
                if !cur.is_empty() {
                    out.push(std::mem::take(&mut cur));
                }
                out.push(c.to_string());
            } else {
                cur.push(c);
            }
        }
        if !cur.is_empty() {
            out.push(cur);
        }
    }
    out
}

fn is_punct(t: &str) -> bool {
    t.chars().all(|c| matches!(c, '?' | '.' | ',' | '!' | ';'))
}

/// Tokens the parser sees: punctuation removed.
pub fn words(text: &str) -> Vec<String> {
    tokenize(text).into_iter().filter(|t| !is_punct(t)).collect()
}

pub struct Parser<'a> {
    net: &'a GrammarNetwork,
    lexicon: &'a LexiconStore,
    pub config: ParseConfig,
}

impl<'a> Parser<'a> {
    pub fn new(net: &'a GrammarNetwork, lexicon: &'a LexiconStore) -> Self {
        Parser {
            net,
            lexicon,
            config: ParseConfig::default(),
        }
    }

    pub fn with_config(mut self, config: ParseConfig) -> Self {
        self.config = config;
        self
    }

    pub fn network(&self) -> &GrammarNetwork {
        self.net
    }

    pub fn parse(&self, sentence: &str) -> Result<ParseOutcome, ParseError> {
        self.parse_tokens(&words(sentence))
    }

    pub fn parse_tokens(&self, tokens: &[String]) -> Result<ParseOutcome, ParseError> {
        let (mut leaves, mut diagnostics) = self.lexical_analysis(tokens)?;
        if self.config.traces {
            leaves.extend(hypothesize_gaps(self.net, tokens.len(), &leaves));
        }
        let mut out = parse_leaves(self.net, tokens.len(), leaves, &self.config);
        out.tokens = tokens.to_vec();
        diagnostics.append(&mut out.diagnostics);
        out.diagnostics = diagnostics;
        Ok(out)
    }

    /// One leaf per word sense that maps to a network node.
    pub fn lexical_analysis(&self, tokens: &[String]) -> Result<(Vec<Leaf>, Vec<Diagnostic>), ParseError> {
        let mut leaves = Vec::new();
        let mut diags = Vec::new();
        for pos in 0..tokens.len() {
            let found = self.lexicon.lookup(tokens, pos)?;
            for key in found.missing_phrases {
                diags.push(Diagnostic::MissingPhrase { key });
            }
            let mut senses: Vec<(usize, LexicalSense)> =
                found.senses.into_iter().map(|p| (p.start, p.sense)).collect();
            if senses.is_empty() {
                diags.push(Diagnostic::UnknownWord {
                    pos,
                    word: tokens[pos].clone(),
                });
                for g in &self.config.guess_unknown {
                    senses.extend(g.senses(&tokens[pos]).into_iter().map(|s| (pos, s)));
                }
            }
            for (start, s) in senses {
                let Some(node) = self.net.lexical_node(&s.av_self, &s.av_comp) else {
                    diags.push(Diagnostic::NoCategory {
                        word: s.word.clone(),
                        att: s.av_self.to_string(),
                    });
                    continue;
                };
                let span = Span::new(start as u32, (start + s.span_width) as u32);
                let word = tokens[start..start + s.span_width].join(" ");
                let leaf = Leaf {
                    node,
                    span,
                    word,
                    att: s.av_self.without("rare"),
                    weight: sense_weight(&s.av_self, self.net.big_weight),
                    rare: s.av_self.atom("rare").map(str::to_owned),
                    trace: false,
                    tag: s.av_self.to_string(),
                };
                if !leaves.contains(&leaf) {
                    leaves.push(leaf);
                }
            }
        }
        Ok((leaves, diags))
    }
}

/// One NP trace per position after the leftmost `+wh` word, up to and
/// including the end of the sentence.
pub fn hypothesize_gaps(net: &GrammarNetwork, n: usize, leaves: &[Leaf]) -> Vec<Leaf> {
    let wh = crate::avm::Literal::plus("wh");
    let Some(first) = leaves.iter().filter(|l| l.att.has(&wh)).map(|l| l.span.start).min() else {
        return Vec::new();
    };
    let Some(np) = net.node_id("NP") else {
        return Vec::new();
    };
    (first + 1..=n as u32)
        .map(|p| Leaf {
            node: np,
            span: Span::new(p, p),
            word: String::new(),
            att: av(&["(cat n)", "-whbarrier"]),
            weight: Weight::ZERO,
            rare: None,
            trace: true,
            tag: "trace".into(),
        })
        .collect()
}

/// Runs message passing over explicit initial messages. Leaves are fed in
/// order of start position, zero-width ones first.
pub fn parse_leaves(net: &GrammarNetwork, n: usize, leaves: Vec<Leaf>, config: &ParseConfig) -> ParseOutcome {
    let mut order: Vec<usize> = (0..leaves.len()).collect();
    order.sort_by_key(|&i| (leaves[i].span.start, leaves[i].span.width(), i));
    let mut chart = Chart::new(net, config.max_items);
    for i in order {
        let l = &leaves[i];
        chart.feed(l.node, l.span, &l.att, l.trace, i as u32);
        if chart.overflowed() {
            break;
        }
    }
    let mut diagnostics = Vec::new();
    if chart.overflowed() {
        diagnostics.push(Diagnostic::ItemLimit { limit: config.max_items });
    }
    let whole = Span::new(0, n as u32);
    let roots: Vec<(NodeId, Vec<ItemId>)> = net
        .top
        .iter()
        .map(|&t| {
            let ids = chart
                .items()
                .iter()
                .enumerate()
                .filter(|(_, it)| {
                    it.node == t && it.complete && it.msg.span == whole && acceptable_root(&it.msg.att)
                })
                .map(|(k, _)| ItemId(k as u32))
                .collect();
            (t, ids)
        })
        .collect();
    if roots.iter().all(|(_, r)| r.is_empty()) && n > 0 {
        diagnostics.push(no_parse(net, &chart));
    }
    let (items, stats) = chart.into_parts();
    ParseOutcome {
        tokens: Vec::new(),
        leaves,
        items,
        roots,
        diagnostics,
        stats,
    }
}

fn no_parse(net: &GrammarNetwork, chart: &Chart) -> Diagnostic {
    let best = chart
        .items()
        .iter()
        .filter(|it| it.complete)
        .map(|it| it.msg.span.width())
        .max()
        .unwrap_or(0);
    let mut longest: Vec<String> = chart
        .items()
        .iter()
        .filter(|it| it.complete && it.msg.span.width() == best && best > 0)
        .map(|it| format!("{}{}", net.node_name(it.node), it.msg.span))
        .collect();
    longest.sort();
    longest.dedup();
    longest.truncate(8);
    let mut blocked: Vec<(String, u64)> = chart
        .stats()
        .blocked_by_link
        .iter()
        .map(|(k, v)| (k.clone(), *v))
        .collect();
    blocked.sort_by(|a, b| b.1.cmp(&a.1).then(a.0.cmp(&b.0)));
    blocked.truncate(5);
    Diagnostic::NoParse { longest, blocked }
}
