//! Attribute-free context-free grammars run through the message-passing
//! engine, with a brute-force chart enumerator to check them against.
//!
//! A nonterminal `A` becomes a maximal node without dominance links. Each
//! rule `A -> X1 .. Xm` (numbered k) becomes a node `A/k` with obligatory
//! links of ids 1..m to the nodes `Xi`, the first one being the head, and
//! `A` subsumes `A/k`. Terminal rules `A -> w` seed `A` directly.

use std::collections::{BTreeSet, HashMap};
use std::fmt::{self, Write};

use rand::seq::SliceRandom;
use rand::Rng;

use crate::avm::AttributeVector;
use crate::engine::{parse_leaves, Leaf, ParseConfig, ParseOutcome, Span};
use crate::forest::ParseTree;
use crate::network::GrammarNetwork;
use crate::weight::Weight;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Rhs {
    Word(String),
    Symbols(Vec<usize>),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Rule {
    pub lhs: usize,
    pub rhs: Rhs,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Cfg {
    pub symbols: Vec<String>,
    pub start: usize,
    pub rules: Vec<Rule>,
}

/// A derivation tree; every node names the rule it was built with.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CfgTree {
    pub rule: usize,
    pub children: Vec<CfgTree>,
}

impl fmt::Display for Cfg {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for r in &self.rules {
            write!(f, "{} ->", self.symbols[r.lhs])?;
            match &r.rhs {
                Rhs::Word(w) => write!(f, " {w}")?,
                Rhs::Symbols(s) => {
                    for &x in s {
                        write!(f, " {}", self.symbols[x])?;
                    }
                }
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

pub const TERMINALS: [&str; 3] = ["a", "b", "c"];

impl Cfg {
    /// `S -> S S | a`: every bracketing of a string of `a`s.
    pub fn binary_ambiguous() -> Cfg {
        Cfg {
            symbols: vec!["S".into()],
            start: 0,
            rules: vec![
                Rule {
                    lhs: 0,
                    rhs: Rhs::Symbols(vec![0, 0]),
                },
                Rule {
                    lhs: 0,
                    rhs: Rhs::Word("a".into()),
                },
            ],
        }
    }

    /// At most `max_symbols` nonterminals and `max_rules` distinct rules,
    /// with right-hand sides of one terminal or two to three nonterminals.
    pub fn random(rng: &mut impl Rng, max_symbols: usize, max_rules: usize) -> Cfg {
        let n = rng.gen_range(1..=max_symbols);
        let symbols: Vec<String> = (0..n)
            .map(|i| if i == 0 { "S".to_owned() } else { format!("N{i}") })
            .collect();
        let target = rng.gen_range(n.min(max_rules)..=max_rules);
        let mut seen = BTreeSet::new();
        let mut rules = Vec::new();
        // one terminal rule per symbol keeps most of them productive
        for lhs in 0..n {
            if rules.len() >= target {
                break;
            }
            let w = TERMINALS.choose(rng).unwrap().to_string();
            let r = Rule { lhs, rhs: Rhs::Word(w) };
            if seen.insert(format!("{r:?}")) {
                rules.push(r);
            }
        }
        let mut attempts = 0;
        while rules.len() < target && attempts < 200 {
            attempts += 1;
            let lhs = rng.gen_range(0..n);
            let rhs = if rng.gen_bool(0.25) {
                Rhs::Word(TERMINALS.choose(rng).unwrap().to_string())
            } else {
                let m = if rng.gen_bool(0.8) { 2 } else { 3 };
                Rhs::Symbols((0..m).map(|_| rng.gen_range(0..n)).collect())
            };
            let r = Rule { lhs, rhs };
            if seen.insert(format!("{r:?}")) {
                rules.push(r);
            }
        }
        Cfg {
            symbols,
            start: 0,
            rules,
        }
    }

    fn rule_node(&self, k: usize) -> String {
        format!("{}/{k}", self.symbols[self.rules[k].lhs])
    }

    /// The grammar network text for this grammar.
    pub fn network_text(&self) -> String {
        let mut t = String::new();
        for s in &self.symbols {
            writeln!(t, "node {s} kind=maximal").unwrap();
        }
        for (k, r) in self.rules.iter().enumerate() {
            let Rhs::Symbols(rhs) = &r.rhs else { continue };
            let name = self.rule_node(k);
            writeln!(t, "node {name} kind=bar").unwrap();
            writeln!(t, "subsume {} -> {name}", self.symbols[r.lhs]).unwrap();
            for (i, &x) in rhs.iter().enumerate() {
                let role = if i == 0 { "head" } else { "complement" };
                writeln!(t, "dom {name} -> {} id={} obligatory role={role}", self.symbols[x], i + 1).unwrap();
            }
        }
        writeln!(t, "top {}", self.symbols[self.start]).unwrap();
        t
    }

    pub fn network(&self) -> GrammarNetwork {
        GrammarNetwork::load(&self.network_text()).expect("translated grammar is valid")
    }

    /// Initial messages for a sentence: one per matching terminal rule.
    pub fn leaves(&self, net: &GrammarNetwork, words: &[String]) -> Vec<Leaf> {
        let mut out = Vec::new();
        for (i, w) in words.iter().enumerate() {
            for (k, r) in self.rules.iter().enumerate() {
                if r.rhs == Rhs::Word(w.clone()) {
                    out.push(Leaf {
                        node: net.node_id(&self.symbols[r.lhs]).unwrap(),
                        span: Span::new(i as u32, i as u32 + 1),
                        word: w.clone(),
                        att: AttributeVector::new(),
                        weight: Weight::ZERO,
                        rare: None,
                        trace: false,
                        tag: k.to_string(),
                    });
                }
            }
        }
        out
    }

    pub fn parse(&self, net: &GrammarNetwork, words: &[String]) -> ParseOutcome {
        let config = ParseConfig {
            traces: false,
            ..ParseConfig::default()
        };
        let mut out = parse_leaves(net, words.len(), self.leaves(net, words), &config);
        out.tokens = words.to_vec();
        out
    }

    /// Reads a derivation back from an engine tree.
    pub fn tree_from_parse(&self, t: &ParseTree) -> Option<CfgTree> {
        if let Some(l) = &t.leaf {
            return Some(CfgTree {
                rule: l.tag.parse().ok()?,
                children: Vec::new(),
            });
        }
        let rule = t.owner().rsplit_once('/')?.1.parse().ok()?;
        let children = t
            .children
            .iter()
            .map(|c| self.tree_from_parse(c))
            .collect::<Option<Vec<_>>>()?;
        Some(CfgTree { rule, children })
    }

    /// A random sentence: derived from the start symbol when possible,
    /// otherwise random terminals.
    pub fn random_sentence(&self, rng: &mut impl Rng, max_len: usize) -> Vec<String> {
        if rng.gen_bool(0.6) {
            for _ in 0..20 {
                let mut out = Vec::new();
                if self.derive(rng, self.start, max_len, 0, &mut out) && !out.is_empty() {
                    return out;
                }
            }
        }
        let len = rng.gen_range(1..=max_len);
        (0..len).map(|_| TERMINALS.choose(rng).unwrap().to_string()).collect()
    }

    fn derive(&self, rng: &mut impl Rng, sym: usize, max_len: usize, depth: usize, out: &mut Vec<String>) -> bool {
        if depth > 12 || out.len() >= max_len {
            return false;
        }
        let choices: Vec<&Rule> = self.rules.iter().filter(|r| r.lhs == sym).collect();
        let Some(r) = choices.choose(rng) else {
            return false;
        };
        match &r.rhs {
            Rhs::Word(w) => {
                out.push(w.clone());
                true
            }
            Rhs::Symbols(xs) => xs.iter().all(|&x| self.derive(rng, x, max_len, depth + 1, out)),
        }
    }
}

/// Exhaustive chart enumeration, independent of the network machinery.
pub struct BruteForce<'g> {
    cfg: &'g Cfg,
    words: Vec<String>,
    counts: HashMap<(usize, usize, usize), u128>,
    trees: HashMap<(usize, usize, usize), Vec<CfgTree>>,
}

impl<'g> BruteForce<'g> {
    pub fn new(cfg: &'g Cfg, words: &[String]) -> Self {
        BruteForce {
            cfg,
            words: words.to_vec(),
            counts: HashMap::new(),
            trees: HashMap::new(),
        }
    }

    /// Ways to split `[i, j)` into `parts` nonempty consecutive pieces.
    fn splits(i: usize, j: usize, parts: usize) -> Vec<Vec<usize>> {
        if parts == 1 {
            return if j > i { vec![vec![i, j]] } else { vec![] };
        }
        let mut out = Vec::new();
        for k in i + 1..j {
            for mut rest in Self::splits(k, j, parts - 1) {
                rest.insert(0, i);
                out.push(rest);
            }
        }
        out
    }

    pub fn count(&mut self, sym: usize, i: usize, j: usize) -> u128 {
        if let Some(&c) = self.counts.get(&(sym, i, j)) {
            return c;
        }
        let mut total: u128 = 0;
        for r in self.cfg.rules.iter().filter(|r| r.lhs == sym) {
            match &r.rhs {
                Rhs::Word(w) => {
                    if j == i + 1 && &self.words[i] == w {
                        total = total.saturating_add(1);
                    }
                }
                Rhs::Symbols(xs) => {
                    for cuts in Self::splits(i, j, xs.len()) {
                        let mut c: u128 = 1;
                        for (p, &x) in xs.iter().enumerate() {
                            c = c.saturating_mul(self.count(x, cuts[p], cuts[p + 1]));
                            if c == 0 {
                                break;
                            }
                        }
                        total = total.saturating_add(c);
                    }
                }
            }
        }
        self.counts.insert((sym, i, j), total);
        total
    }

    pub fn total(&mut self) -> u128 {
        let n = self.words.len();
        self.count(self.cfg.start, 0, n)
    }

    pub fn trees(&mut self, sym: usize, i: usize, j: usize) -> Vec<CfgTree> {
        if let Some(t) = self.trees.get(&(sym, i, j)) {
            return t.clone();
        }
        let mut out = Vec::new();
        for (k, r) in self.cfg.rules.iter().enumerate() {
            if r.lhs != sym {
                continue;
            }
            match &r.rhs {
                Rhs::Word(w) => {
                    if j == i + 1 && &self.words[i] == w {
                        out.push(CfgTree {
                            rule: k,
                            children: Vec::new(),
                        });
                    }
                }
                Rhs::Symbols(xs) => {
                    for cuts in Self::splits(i, j, xs.len()) {
                        let mut partial: Vec<Vec<CfgTree>> = vec![Vec::new()];
                        for (p, &x) in xs.iter().enumerate() {
                            let sub = self.trees(x, cuts[p], cuts[p + 1]);
                            partial = partial
                                .into_iter()
                                .flat_map(|pre| {
                                    sub.iter().map(move |t| {
                                        let mut v = pre.clone();
                                        v.push(t.clone());
                                        v
                                    })
                                })
                                .collect();
                            if partial.is_empty() {
                                break;
                            }
                        }
                        out.extend(partial.into_iter().map(|children| CfgTree { rule: k, children }));
                    }
                }
            }
        }
        self.trees.insert((sym, i, j), out.clone());
        out
    }

    /// All trees of the sentence, sorted.
    pub fn all_trees(&mut self) -> Vec<CfgTree> {
        let n = self.words.len();
        let mut t = self.trees(self.cfg.start, 0, n);
        t.sort();
        t
    }
}

/// Result of comparing the engine with the enumerator on one sentence.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OracleCheck {
    pub expected: u128,
    pub found: u128,
    /// Whether full tree sets were compared (otherwise only counts).
    pub compared_sets: bool,
    pub agree: bool,
}

/// Compares the engine's forest with brute-force enumeration. Tree sets
/// are compared exactly when there are at most `set_limit` trees.
pub fn check_sentence(cfg: &Cfg, net: &GrammarNetwork, words: &[String], set_limit: u128) -> OracleCheck {
    let mut bf = BruteForce::new(cfg, words);
    let expected = bf.total();
    let outcome = cfg.parse(net, words);
    let forest = outcome.forest(net);
    let found = forest.tree_count();
    if expected != found || expected > set_limit {
        return OracleCheck {
            expected,
            found,
            compared_sets: false,
            agree: expected == found,
        };
    }
    let mut mine: Vec<CfgTree> = forest
        .enumerate()
        .map(|t| cfg.tree_from_parse(&t).expect("engine tree maps to rules"))
        .collect();
    mine.sort();
    let theirs = bf.all_trees();
    OracleCheck {
        expected,
        found,
        compared_sets: true,
        agree: mine == theirs,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::rngs::StdRng;
    use rand::SeedableRng;

    fn w(s: &str) -> Vec<String> {
        s.split_whitespace().map(str::to_owned).collect()
    }

    #[test]
    fn catalan_counts() {
        let g = Cfg::binary_ambiguous();
        // C(n-1): 1 1 2 5 14 42
        for (n, c) in [(1, 1), (2, 1), (3, 2), (4, 5), (5, 14), (6, 42)] {
            let s = vec!["a".to_owned(); n];
            assert_eq!(BruteForce::new(&g, &s).total(), c);
        }
    }

    #[test]
    fn splits_cover_all_cut_points() {
        assert_eq!(BruteForce::splits(0, 3, 2), vec![vec![0, 1, 3], vec![0, 2, 3]]);
        assert_eq!(BruteForce::splits(0, 4, 3).len(), 3);
        assert!(BruteForce::splits(0, 2, 3).is_empty());
    }

    #[test]
    fn engine_matches_enumerator_on_catalan_grammar() {
        let g = Cfg::binary_ambiguous();
        let net = g.network();
        for n in 1..=7 {
            let c = check_sentence(&g, &net, &vec!["a".to_owned(); n], 10_000);
            assert!(c.agree && c.compared_sets, "{n}: {c:?}");
        }
    }

    #[test]
    fn rejects_sentences_outside_the_language() {
        let g = Cfg::binary_ambiguous();
        let net = g.network();
        let c = check_sentence(&g, &net, &w("a b a"), 100);
        assert_eq!((c.expected, c.found), (0, 0));
    }

    #[test]
    fn random_grammars_respect_limits() {
        let mut rng = StdRng::seed_from_u64(3);
        for _ in 0..50 {
            let g = Cfg::random(&mut rng, 8, 20);
            assert!(g.symbols.len() <= 8 && g.rules.len() <= 20);
            let net = g.network();
            assert!(net.validate().is_empty());
        }
    }
}
