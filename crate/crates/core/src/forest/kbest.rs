//! Lazy best-first tree extraction over a packed forest.
//!
//! Each forest node keeps the weights of its best derivations found so far
//! and a frontier of candidates; the k-th best of a node is computed only
//! when some parent asks for it.

use std::cmp::Reverse;
use std::collections::{BinaryHeap, HashSet};

use crate::weight::Weight;

use super::{Alternative, ParseForest, ParseTree};

/// (weight, alternative index, ranks of the tails)
type Cand = (Weight, usize, [u32; 2]);

#[derive(Default)]
struct NodeState {
    init: bool,
    best: Vec<Cand>,
    expanded: usize,
    heap: BinaryHeap<Reverse<Cand>>,
    seen: HashSet<(usize, [u32; 2])>,
}

/// Iterator over a forest's trees in nondecreasing weight order; ties go
/// to the earlier alternative, then to lower-ranked children, left first.
pub struct TreeEnumerator<'f> {
    forest: &'f ParseForest,
    state: Vec<NodeState>,
    /// Virtual top node over the roots.
    top: NodeState,
    emitted: usize,
}

impl<'f> TreeEnumerator<'f> {
    pub fn new(forest: &'f ParseForest) -> Self {
        TreeEnumerator {
            forest,
            state: (0..forest.nodes.len()).map(|_| NodeState::default()).collect(),
            top: NodeState::default(),
            emitted: 0,
        }
    }

    fn cand_weight(&mut self, v: usize, alt: usize, ranks: [u32; 2]) -> Option<Weight> {
        let a = &self.forest.nodes[v].alternatives[alt];
        let (tails, n) = a.tails();
        let mut w = a.own_weight();
        for i in 0..n {
            w += self.kth(tails[i], ranks[i] as usize)?;
        }
        Some(w)
    }

    /// Weight of the k-th best derivation of node `v`.
    pub fn kth(&mut self, v: usize, k: usize) -> Option<Weight> {
        if !self.state[v].init {
            self.state[v].init = true;
            for alt in 0..self.forest.nodes[v].alternatives.len() {
                if let Some(w) = self.cand_weight(v, alt, [0, 0]) {
                    let s = &mut self.state[v];
                    s.seen.insert((alt, [0, 0]));
                    s.heap.push(Reverse((w, alt, [0, 0])));
                }
            }
        }
        while self.state[v].best.len() <= k {
            let s = &self.state[v];
            if s.expanded < s.best.len() {
                let (_, alt, ranks) = s.best[s.expanded];
                self.state[v].expanded += 1;
                let (_, n) = self.forest.nodes[v].alternatives[alt].tails();
                for i in 0..n {
                    let mut r = ranks;
                    r[i] += 1;
                    if self.state[v].seen.contains(&(alt, r)) {
                        continue;
                    }
                    if let Some(w) = self.cand_weight(v, alt, r) {
                        let s = &mut self.state[v];
                        s.seen.insert((alt, r));
                        s.heap.push(Reverse((w, alt, r)));
                    }
                }
                continue;
            }
            let Reverse(c) = self.state[v].heap.pop()?;
            self.state[v].best.push(c);
        }
        Some(self.state[v].best[k].0)
    }

    fn top_kth(&mut self, k: usize) -> Option<Cand> {
        if !self.top.init {
            self.top.init = true;
            for (i, &r) in self.forest.roots.iter().enumerate() {
                if let Some(w) = self.kth(r, 0) {
                    self.top.seen.insert((i, [0, 0]));
                    self.top.heap.push(Reverse((w, i, [0, 0])));
                }
            }
        }
        while self.top.best.len() <= k {
            if self.top.expanded < self.top.best.len() {
                let (_, i, ranks) = self.top.best[self.top.expanded];
                self.top.expanded += 1;
                let r = [ranks[0] + 1, 0];
                if self.top.seen.insert((i, r)) {
                    if let Some(w) = self.kth(self.forest.roots[i], r[0] as usize) {
                        self.top.heap.push(Reverse((w, i, r)));
                    }
                }
                continue;
            }
            let Reverse(c) = self.top.heap.pop()?;
            self.top.best.push(c);
        }
        Some(self.top.best[k])
    }

    /// Tree for the k-th best derivation of `v` (which must already have
    /// been computed).
    fn tree(&mut self, v: usize, k: usize, link: Option<u32>) -> ParseTree {
        let (w, alt, ranks) = self.state[v].best[k];
        let node = &self.forest.nodes[v];
        match &node.alternatives[alt] {
            Alternative::Leaf(leaf, _) => ParseTree {
                label: node.label.clone(),
                via: Vec::new(),
                span: node.span,
                link,
                children: Vec::new(),
                leaf: Some(leaf.clone()),
                weight: w,
            },
            Alternative::Forward { child } => {
                let child = *child;
                let mut t = self.tree(child, ranks[0] as usize, link);
                let specific = std::mem::replace(&mut t.label, node.label.clone());
                t.via.insert(0, specific);
                t.weight = w;
                t
            }
            Alternative::Arrive { .. } | Alternative::Combine { .. } => {
                let mut children = Vec::new();
                self.collect_children(v, k, &mut children);
                ParseTree {
                    label: node.label.clone(),
                    via: Vec::new(),
                    span: node.span,
                    link,
                    children,
                    leaf: None,
                    weight: w,
                }
            }
        }
    }

    fn collect_children(&mut self, v: usize, k: usize, out: &mut Vec<ParseTree>) {
        let (_, alt, ranks) = self.state[v].best[k];
        match self.forest.nodes[v].alternatives[alt] {
            Alternative::Arrive { id, child, .. } => {
                let t = self.tree(child, ranks[0] as usize, Some(id));
                out.push(t);
            }
            Alternative::Combine { left, right } => {
                self.collect_children(left, ranks[0] as usize, out);
                self.collect_children(right, ranks[1] as usize, out);
            }
            _ => unreachable!("link items derive only by arrival or combination"),
        }
    }

    /// The k-th best tree overall.
    pub fn nth_tree(&mut self, k: usize) -> Option<ParseTree> {
        let (_, i, ranks) = self.top_kth(k)?;
        let root = self.forest.roots[i];
        Some(self.tree(root, ranks[0] as usize, None))
    }
}

impl Iterator for TreeEnumerator<'_> {
    type Item = ParseTree;

    fn next(&mut self) -> Option<ParseTree> {
        let t = self.nth_tree(self.emitted)?;
        self.emitted += 1;
        Some(t)
    }
}
