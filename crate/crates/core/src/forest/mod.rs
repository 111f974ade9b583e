//! Packed parse forests: one node per chart item reachable from the roots,
//! with every way of deriving it kept as an alternative.

mod kbest;
mod tree;

use std::collections::HashMap;

use serde::Serialize;

use crate::avm::AttributeVector;
use crate::engine::{Deriv, ItemId, ParseOutcome};
use crate::network::{GrammarNetwork, LinkIdx};
use crate::weight::Weight;

pub use kbest::TreeEnumerator;
pub use tree::{ParseTree, TreeFormat, TreeLeaf};

/// Weight of a word sense from its `rare` value.
pub fn rare_weight(rare: Option<&str>, big_weight: Weight) -> Weight {
    match rare {
        Some("very") => big_weight,
        Some("very-very") => big_weight.times(2),
        _ => Weight::ZERO,
    }
}

pub fn sense_weight(av_self: &AttributeVector, big_weight: Weight) -> Weight {
    rare_weight(av_self.atom("rare"), big_weight)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Alternative {
    Leaf(TreeLeaf, Weight),
    Arrive { link: LinkIdx, id: u32, weight: Weight, child: usize },
    Combine { left: usize, right: usize },
    Forward { child: usize },
}

impl Alternative {
    fn tails(&self) -> ([usize; 2], usize) {
        match *self {
            Alternative::Leaf(..) => ([0, 0], 0),
            Alternative::Arrive { child, .. } | Alternative::Forward { child } => ([child, 0], 1),
            Alternative::Combine { left, right } => ([left, right], 2),
        }
    }

    fn own_weight(&self) -> Weight {
        match self {
            Alternative::Leaf(_, w) => *w,
            Alternative::Arrive { weight, .. } => *weight,
            _ => Weight::ZERO,
        }
    }
}

#[derive(Clone, Debug)]
pub struct ForestNode {
    pub label: String,
    /// 1-based inclusive.
    pub span: (u32, u32),
    pub att: AttributeVector,
    pub alternatives: Vec<Alternative>,
    pub min_weight: Weight,
    pub trees: u128,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct ForestStats {
    pub nodes: usize,
    pub alternatives: usize,
    /// Nodes with more than one alternative.
    pub packed_nodes: usize,
    pub min_weight: Option<Weight>,
    /// Saturates at `u128::MAX`.
    pub trees: u128,
    /// Alternatives dropped because they closed a cycle.
    pub cycles_dropped: usize,
}

/// An immutable packed forest. Nodes are stored children first; the roots
/// are alternatives of a virtual top node.
#[derive(Clone, Debug)]
pub struct ParseForest {
    nodes: Vec<ForestNode>,
    roots: Vec<usize>,
    big_weight: Weight,
    cycles_dropped: usize,
}

impl ParseForest {
    pub fn empty(big_weight: Weight) -> Self {
        ParseForest {
            nodes: Vec::new(),
            roots: Vec::new(),
            big_weight,
            cycles_dropped: 0,
        }
    }

    /// Traces the origins of `roots` back through the chart.
    pub fn build(net: &GrammarNetwork, outcome: &ParseOutcome, roots: &[ItemId]) -> Self {
        let mut b = Builder {
            net,
            outcome,
            index: HashMap::new(),
            on_stack: Vec::new(),
            nodes: Vec::new(),
            cycles: 0,
        };
        let mut top = Vec::new();
        for &r in roots {
            if let Some(k) = b.visit(r) {
                if !top.contains(&k) {
                    top.push(k);
                }
            }
        }
        let mut f = ParseForest {
            nodes: b.nodes,
            roots: top,
            big_weight: net.big_weight,
            cycles_dropped: b.cycles,
        };
        f.annotate();
        f
    }

    fn annotate(&mut self) {
        for k in 0..self.nodes.len() {
            let mut best: Option<Weight> = None;
            let mut count: u128 = 0;
            for alt in &self.nodes[k].alternatives {
                let (tails, n) = alt.tails();
                let mut w = alt.own_weight();
                let mut c: u128 = 1;
                for &t in &tails[..n] {
                    w += self.nodes[t].min_weight;
                    c = c.saturating_mul(self.nodes[t].trees);
                }
                best = Some(best.map_or(w, |b| b.min(w)));
                count = count.saturating_add(c);
            }
            self.nodes[k].min_weight = best.unwrap_or(Weight::ZERO);
            self.nodes[k].trees = count;
        }
    }

    pub fn is_empty(&self) -> bool {
        self.roots.is_empty()
    }

    pub fn nodes(&self) -> &[ForestNode] {
        &self.nodes
    }

    pub fn roots(&self) -> &[usize] {
        &self.roots
    }

    pub fn big_weight(&self) -> Weight {
        self.big_weight
    }

    pub fn min_weight(&self) -> Option<Weight> {
        self.roots.iter().map(|&r| self.nodes[r].min_weight).min()
    }

    pub fn tree_count(&self) -> u128 {
        self.roots
            .iter()
            .fold(0u128, |c, &r| c.saturating_add(self.nodes[r].trees))
    }

    pub fn stats(&self) -> ForestStats {
        ForestStats {
            nodes: self.nodes.len(),
            alternatives: self.nodes.iter().map(|n| n.alternatives.len()).sum(),
            packed_nodes: self.nodes.iter().filter(|n| n.alternatives.len() > 1).count(),
            min_weight: self.min_weight(),
            trees: self.tree_count(),
            cycles_dropped: self.cycles_dropped,
        }
    }

    /// Trees in nondecreasing weight order.
    pub fn enumerate(&self) -> TreeEnumerator<'_> {
        TreeEnumerator::new(self)
    }

    /// Up to `limit` trees in nondecreasing weight order.
    pub fn enumerate_trees(&self, limit: usize) -> Vec<ParseTree> {
        self.enumerate().take(limit).collect()
    }

    /// The trees lighter than `min + BIGWEIGHT/2`, in enumeration order,
    /// stopping early at `limit`.
    pub fn prune(&self, limit: Option<usize>) -> Vec<ParseTree> {
        let Some(min) = self.min_weight() else {
            return Vec::new();
        };
        let bound = min + self.big_weight.half();
        self.enumerate()
            .take_while(|t| t.weight < bound)
            .take(limit.unwrap_or(usize::MAX))
            .collect()
    }
}

struct Builder<'a> {
    net: &'a GrammarNetwork,
    outcome: &'a ParseOutcome,
    index: HashMap<ItemId, Option<usize>>,
    on_stack: Vec<ItemId>,
    nodes: Vec<ForestNode>,
    cycles: usize,
}

impl Builder<'_> {
    /// Post-order visit; `None` while the item is on the stack (a cycle)
    /// or when every alternative was dropped.
    fn visit(&mut self, id: ItemId) -> Option<usize> {
        if let Some(&k) = self.index.get(&id) {
            return k;
        }
        if self.on_stack.contains(&id) {
            self.cycles += 1;
            return None;
        }
        self.on_stack.push(id);
        let item = self.outcome.item(id);
        let mut alts = Vec::with_capacity(item.derivs.len());
        for d in &item.derivs {
            let alt = match *d {
                Deriv::Leaf(i) => {
                    let l = &self.outcome.leaves[i as usize];
                    let leaf = TreeLeaf {
                        word: l.word.clone(),
                        trace: l.trace,
                        rare: l.rare.clone(),
                        tag: l.tag.clone(),
                    };
                    Some(Alternative::Leaf(leaf, l.weight))
                }
                Deriv::Arrive { link, child } => self.visit(child).map(|c| {
                    let dl = self.net.link(link);
                    Alternative::Arrive {
                        link,
                        id: dl.id,
                        weight: dl.weight,
                        child: c,
                    }
                }),
                Deriv::Combine { left, right } => match (self.visit(left), self.visit(right)) {
                    (Some(l), Some(r)) => Some(Alternative::Combine { left: l, right: r }),
                    _ => None,
                },
                Deriv::Forward { child } => self.visit(child).map(|c| Alternative::Forward { child: c }),
            };
            if let Some(a) = alt {
                alts.push(a);
            }
        }
        self.on_stack.pop();
        let k = (!alts.is_empty()).then(|| {
            self.nodes.push(ForestNode {
                label: self.net.node_name(item.node).to_owned(),
                span: (item.msg.span.i(), item.msg.span.j()),
                att: item.msg.att.clone(),
                alternatives: alts,
                min_weight: Weight::ZERO,
                trees: 0,
            });
            self.nodes.len() - 1
        });
        self.index.insert(id, k);
        k
    }
}
