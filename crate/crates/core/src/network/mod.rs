//! The grammar network: category nodes joined by subsumption and dominance
//! links, with principles attached as local and percolation constraints.

mod constraint;
mod loader;

use std::collections::HashMap;
use std::fmt;

use thiserror::Error;

use crate::avm::{AttributeVector, AvmError, FeatureRegistry, Literal};
use crate::weight::Weight;

pub use constraint::{all_hold, Condition, Constraint, Refusal};
pub use loader::render_network;

/// Index of a node in its network.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct NodeId(pub u32);

/// Index of a dominance link in its network (not the declared `id=`).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LinkIdx(pub u32);

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NodeKind {
    Lexical,
    Subcategory,
    Bar,
    Maximal,
}

impl NodeKind {
    fn parse(s: &str) -> Option<Self> {
        Some(match s {
            "lexical" => NodeKind::Lexical,
            "subcategory" => NodeKind::Subcategory,
            "bar" => NodeKind::Bar,
            "maximal" => NodeKind::Maximal,
            _ => return None,
        })
    }

    fn as_str(self) -> &'static str {
        match self {
            NodeKind::Lexical => "lexical",
            NodeKind::Subcategory => "subcategory",
            NodeKind::Bar => "bar",
            NodeKind::Maximal => "maximal",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Role {
    Head,
    Complement,
    Adjunct,
    Specifier,
}

impl Role {
    fn parse(s: &str) -> Option<Self> {
        Some(match s {
            "head" => Role::Head,
            "complement" => Role::Complement,
            "adjunct" => Role::Adjunct,
            "specifier" => Role::Specifier,
            _ => return None,
        })
    }

    fn as_str(self) -> &'static str {
        match self {
            Role::Head => "head",
            Role::Complement => "complement",
            Role::Adjunct => "adjunct",
            Role::Specifier => "specifier",
        }
    }
}

/// An explicit completion requirement: when `when` holds for an item, every
/// link id in `require` must be among its sources.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CompletionRule {
    pub require: Vec<u32>,
    pub when: Vec<Condition>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GrammarNode {
    pub name: String,
    pub kind: NodeKind,
    pub local: Vec<Constraint>,
    /// Empty means the default predicate (head and obligatory links).
    pub completion: Vec<CompletionRule>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DominanceLink {
    pub parent: NodeId,
    pub child: NodeId,
    pub id: u32,
    pub obligatory: bool,
    pub role: Role,
    pub barrier: bool,
    pub percolation: Vec<Constraint>,
    pub weight: Weight,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SubsumptionLink {
    pub general: NodeId,
    pub specific: NodeId,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CompPattern {
    /// The sense must have no complements.
    Empty,
    /// Any complement list.
    Any,
    /// One pattern per complement, in order.
    Exactly(Vec<Vec<Condition>>),
}

/// Maps a word sense to the node its initial message enters.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LexCategory {
    pub node: NodeId,
    pub when: Vec<Condition>,
    pub comps: CompPattern,
}

impl LexCategory {
    pub fn matches(&self, av_self: &AttributeVector, av_comp: &[AttributeVector]) -> bool {
        if !all_hold(&self.when, av_self) {
            return false;
        }
        match &self.comps {
            CompPattern::Empty => av_comp.is_empty(),
            CompPattern::Any => true,
            CompPattern::Exactly(pats) => {
                pats.len() == av_comp.len()
                    && pats.iter().zip(av_comp).all(|(p, c)| all_hold(p, c))
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DiagnosticKind {
    DuplicateLinkId { parent: String, id: u32 },
    SubsumptionCycle { nodes: Vec<String> },
    HeadMultiplicity { node: String, heads: usize },
    OrphanSubcategory { node: String },
    NoTopNodes,
    TooManyLinks { node: String, links: usize },
    UnknownCompletionLink { node: String, id: u32 },
}

/// One validation finding.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Diagnostic {
    pub kind: DiagnosticKind,
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            DiagnosticKind::DuplicateLinkId { parent, id } => {
                write!(f, "dominance id {id} used twice under `{parent}`")
            }
            DiagnosticKind::SubsumptionCycle { nodes } => {
                write!(f, "subsumption cycle through {}", nodes.join(" -> "))
            }
            DiagnosticKind::HeadMultiplicity { node, heads } => {
                write!(f, "`{node}` has {heads} head links, expected exactly 1")
            }
            DiagnosticKind::OrphanSubcategory { node } => {
                write!(f, "subcategory `{node}` is not subsumed by any node")
            }
            DiagnosticKind::NoTopNodes => f.write_str("no top nodes declared"),
            DiagnosticKind::TooManyLinks { node, links } => {
                write!(f, "`{node}` has {links} dominance links; at most 64 are supported")
            }
            DiagnosticKind::UnknownCompletionLink { node, id } => {
                write!(f, "completion rule of `{node}` names undeclared link id {id}")
            }
        }
    }
}

#[derive(Debug, Error)]
pub enum NetworkError {
    #[error("line {line}, column {col}: {msg}")]
    Syntax { line: usize, col: usize, msg: String },
    #[error("line {line}: reference to undeclared node `{name}`")]
    UndeclaredNode { line: usize, name: String },
    #[error("line {line}: node `{name}` declared twice")]
    DuplicateNode { line: usize, name: String },
    #[error("line {line}: {source}")]
    Feature {
        line: usize,
        #[source]
        source: AvmError,
    },
    #[error("invalid grammar network: {}", .0.iter().map(|d| d.to_string()).collect::<Vec<_>>().join("; "))]
    Invalid(Vec<Diagnostic>),
}

impl NetworkError {
    pub fn diagnostics(&self) -> &[Diagnostic] {
        match self {
            NetworkError::Invalid(d) => d,
            _ => &[],
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GrammarNetwork {
    pub registry: FeatureRegistry,
    pub big_weight: Weight,
    pub nodes: Vec<GrammarNode>,
    pub dominance: Vec<DominanceLink>,
    pub subsumption: Vec<SubsumptionLink>,
    pub lexcats: Vec<LexCategory>,
    pub top: Vec<NodeId>,
    by_name: HashMap<String, NodeId>,
    /// Per node: its dominance links as parent, sorted by declared id.
    children: Vec<Vec<LinkIdx>>,
    /// Per node: dominance links in which it is the child.
    parents: Vec<Vec<LinkIdx>>,
    /// Per node: the nodes that subsume it.
    generals: Vec<Vec<NodeId>>,
    /// Per link: its rank among the parent's links (bit position in a LinkSet).
    slot: Vec<u8>,
}

pub const DEFAULT_BIG_WEIGHT: Weight = Weight::from_tenths(200);

impl GrammarNetwork {
    /// Parses and validates a grammar file.
    pub fn load(text: &str) -> Result<Self, NetworkError> {
        let net = loader::parse(text)?;
        let diags = net.validate();
        if diags.is_empty() {
            Ok(net)
        } else {
            Err(NetworkError::Invalid(diags))
        }
    }

    /// Parses a grammar file without running [`validate`](Self::validate).
    pub fn parse_unchecked(text: &str) -> Result<Self, NetworkError> {
        loader::parse(text)
    }

    pub fn english() -> Self {
        Self::load(ENGLISH_GRAMMAR).expect("bundled grammar is valid")
    }

    pub fn node(&self, id: NodeId) -> &GrammarNode {
        &self.nodes[id.0 as usize]
    }

    pub fn link(&self, id: LinkIdx) -> &DominanceLink {
        &self.dominance[id.0 as usize]
    }

    pub fn node_id(&self, name: &str) -> Option<NodeId> {
        self.by_name.get(name).copied()
    }

    pub fn node_name(&self, id: NodeId) -> &str {
        &self.node(id).name
    }

    pub fn node_ids(&self) -> impl Iterator<Item = NodeId> {
        (0..self.nodes.len() as u32).map(NodeId)
    }

    pub fn child_links(&self, parent: NodeId) -> &[LinkIdx] {
        &self.children[parent.0 as usize]
    }

    pub fn parent_links(&self, child: NodeId) -> &[LinkIdx] {
        &self.parents[child.0 as usize]
    }

    pub fn generals(&self, specific: NodeId) -> &[NodeId] {
        &self.generals[specific.0 as usize]
    }

    pub fn slot(&self, link: LinkIdx) -> u8 {
        self.slot[link.0 as usize]
    }

    /// Finds the dominance link `parent -> child` with declared id `id`.
    pub fn find_link(&self, parent: &str, child: &str, id: u32) -> Option<LinkIdx> {
        let p = self.node_id(parent)?;
        let c = self.node_id(child)?;
        self.child_links(p)
            .iter()
            .copied()
            .find(|&l| self.link(l).child == c && self.link(l).id == id)
    }

    /// Node for a word sense, from the first matching `lexcat` rule.
    pub fn lexical_node(&self, av_self: &AttributeVector, av_comp: &[AttributeVector]) -> Option<NodeId> {
        self.lexcats
            .iter()
            .find(|r| r.matches(av_self, av_comp))
            .map(|r| r.node)
    }

    /// Applies a node's local constraints: assignments first, then clears,
    /// then co-occurrence rejections.
    pub fn apply_local(&self, node: NodeId, att: &AttributeVector) -> Result<AttributeVector, Refusal> {
        let local = &self.node(node).local;
        let mut att = att.clone();
        let phases: [fn(&Constraint) -> bool; 3] = [
            |c| matches!(c, Constraint::Assign { .. }),
            |c| matches!(c, Constraint::Clear { .. }),
            |c| matches!(c, Constraint::Reject(_)),
        ];
        for phase in phases {
            for c in local.iter().filter(|c| phase(c)) {
                att = c.apply(att).ok_or_else(|| Refusal { primitive: c.clone() })?;
            }
        }
        Ok(att)
    }

    /// Applies a link's percolation constraints to a message crossing it
    /// from child to parent. Barrier links first block `+whbarrier`, then
    /// flip `-whbarrier` to `+whbarrier`, then block `-cm`.
    pub fn apply_percolation(&self, link: LinkIdx, att: &AttributeVector) -> Result<AttributeVector, Refusal> {
        let l = self.link(link);
        let mut att = att.clone();
        if l.barrier {
            for c in barrier_primitives() {
                att = c.apply(att).ok_or_else(|| Refusal { primitive: c.clone() })?;
            }
        }
        for c in &l.percolation {
            att = c.apply(att).ok_or_else(|| Refusal { primitive: c.clone() })?;
        }
        Ok(att)
    }

    /// Checks every structural invariant; an empty list means valid.
    pub fn validate(&self) -> Vec<Diagnostic> {
        let mut out = Vec::new();
        let diag = |kind| Diagnostic { kind };

        for (n, links) in self.children.iter().enumerate() {
            let name = &self.nodes[n].name;
            for w in links.windows(2) {
                let (a, b) = (self.link(w[0]), self.link(w[1]));
                if a.id == b.id {
                    out.push(diag(DiagnosticKind::DuplicateLinkId {
                        parent: name.clone(),
                        id: a.id,
                    }));
                }
            }
            if links.len() > 64 {
                out.push(diag(DiagnosticKind::TooManyLinks {
                    node: name.clone(),
                    links: links.len(),
                }));
            }
            let kind = self.nodes[n].kind;
            if matches!(kind, NodeKind::Bar | NodeKind::Maximal) && !links.is_empty() {
                let heads = links
                    .iter()
                    .filter(|&&l| self.link(l).role == Role::Head)
                    .count();
                if heads != 1 {
                    out.push(diag(DiagnosticKind::HeadMultiplicity {
                        node: name.clone(),
                        heads,
                    }));
                }
            }
            if kind == NodeKind::Subcategory
                && !self.subsumption.iter().any(|s| s.specific.0 as usize == n)
            {
                out.push(diag(DiagnosticKind::OrphanSubcategory { node: name.clone() }));
            }
            for rule in &self.nodes[n].completion {
                for id in &rule.require {
                    if !links.iter().any(|&l| self.link(l).id == *id) {
                        out.push(diag(DiagnosticKind::UnknownCompletionLink {
                            node: name.clone(),
                            id: *id,
                        }));
                    }
                }
            }
        }
        if let Some(cycle) = self.subsumption_cycle() {
            out.push(diag(DiagnosticKind::SubsumptionCycle {
                nodes: cycle.iter().map(|&n| self.node_name(n).to_owned()).collect(),
            }));
        }
        if self.top.is_empty() {
            out.push(diag(DiagnosticKind::NoTopNodes));
        }
        out
    }

    fn subsumption_cycle(&self) -> Option<Vec<NodeId>> {
        // general -> specific edges; colour-marking DFS.
        let n = self.nodes.len();
        let mut succ = vec![Vec::new(); n];
        for s in &self.subsumption {
            succ[s.general.0 as usize].push(s.specific.0 as usize);
        }
        let mut colour = vec![0u8; n];
        let mut stack_path = Vec::new();
        fn dfs(
            v: usize,
            succ: &[Vec<usize>],
            colour: &mut [u8],
            path: &mut Vec<usize>,
        ) -> Option<Vec<usize>> {
            colour[v] = 1;
            path.push(v);
            for &w in &succ[v] {
                if colour[w] == 1 {
                    let start = path.iter().position(|&p| p == w).unwrap();
                    let mut cyc = path[start..].to_vec();
                    cyc.push(w);
                    return Some(cyc);
                }
                if colour[w] == 0 {
                    if let Some(c) = dfs(w, succ, colour, path) {
                        return Some(c);
                    }
                }
            }
            path.pop();
            colour[v] = 2;
            None
        }
        for v in 0..n {
            if colour[v] == 0 {
                if let Some(c) = dfs(v, &succ, &mut colour, &mut stack_path) {
                    return Some(c.into_iter().map(|i| NodeId(i as u32)).collect());
                }
            }
        }
        None
    }

    /// Rebuilds lookup tables and link weights after construction.
    fn index(&mut self) {
        let n = self.nodes.len();
        self.by_name = self
            .nodes
            .iter()
            .enumerate()
            .map(|(i, node)| (node.name.clone(), NodeId(i as u32)))
            .collect();
        self.children = vec![Vec::new(); n];
        self.parents = vec![Vec::new(); n];
        self.generals = vec![Vec::new(); n];
        for (i, l) in self.dominance.iter_mut().enumerate() {
            l.weight = if l.role == Role::Adjunct {
                self.big_weight
            } else {
                Weight::ONE
            };
            self.children[l.parent.0 as usize].push(LinkIdx(i as u32));
            self.parents[l.child.0 as usize].push(LinkIdx(i as u32));
        }
        let dominance = &self.dominance;
        for links in &mut self.children {
            links.sort_by_key(|l| (dominance[l.0 as usize].id, l.0));
        }
        self.slot = vec![0; self.dominance.len()];
        for links in &self.children {
            for (rank, l) in links.iter().enumerate() {
                self.slot[l.0 as usize] = rank.min(63) as u8;
            }
        }
        for s in &self.subsumption {
            self.generals[s.specific.0 as usize].push(s.general);
        }
    }
}

fn barrier_primitives() -> &'static [Constraint] {
    use std::sync::OnceLock;
    static PRIMS: OnceLock<Vec<Constraint>> = OnceLock::new();
    PRIMS.get_or_init(|| {
        vec![
            Constraint::Block(Condition::Is(Literal::plus("whbarrier"))),
            Constraint::Flip {
                from: Literal::minus("whbarrier"),
                to: Literal::plus("whbarrier"),
            },
            Constraint::Block(Condition::Is(Literal::minus("cm"))),
        ]
    })
}

/// The bundled English grammar network.
pub const ENGLISH_GRAMMAR: &str = include_str!("../../data/english.gn");

#[cfg(test)]
mod tests;
