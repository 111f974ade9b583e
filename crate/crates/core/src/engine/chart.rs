//! Item storage and message passing over a grammar network.

use std::collections::{BTreeMap, HashMap, VecDeque};
use std::fmt;

use serde::Serialize;

use crate::avm::{AttributeVector, Literal};
use crate::network::{all_hold, Condition, GrammarNetwork, LinkIdx, NodeId, Refusal, Role};

/// Half-open token interval `[start, end)`; traces have `start == end`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Span {
    pub start: u32,
    pub end: u32,
}

impl Span {
    pub fn new(start: u32, end: u32) -> Self {
        debug_assert!(start <= end);
        Span { start, end }
    }

    /// 1-based index of the first word.
    pub fn i(&self) -> u32 {
        self.start + 1
    }

    /// 1-based index of the last word (`i - 1` when empty).
    pub fn j(&self) -> u32 {
        self.end
    }

    pub fn width(&self) -> u32 {
        self.end - self.start
    }
}

impl fmt::Display for Span {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{},{}]", self.i(), self.j())
    }
}

/// Where an item's sources came from: a set of the node's dominance links
/// (bit = link slot), or nothing at all for lexical and forwarded items.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Origin {
    Atomic,
    Links(u64),
}

impl Origin {
    pub fn mask(self) -> u64 {
        match self {
            Origin::Atomic => 0,
            Origin::Links(m) => m,
        }
    }
}

/// The content of an item, independent of where it is stored.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Message {
    pub span: Span,
    pub att: AttributeVector,
    pub origin: Origin,
    /// Position of the trace inside this constituent, if any.
    pub trace: Option<u32>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct ItemId(pub u32);

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Deriv {
    /// An initial message; indexes the parse's leaf table.
    Leaf(u32),
    /// A complete child item sent up `link`.
    Arrive { link: LinkIdx, child: ItemId },
    /// `right` is always a single-link item.
    Combine { left: ItemId, right: ItemId },
    /// A complete item of a subsumed node, forwarded unchanged.
    Forward { child: ItemId },
}

#[derive(Clone, Debug)]
pub struct Item {
    pub node: NodeId,
    pub msg: Message,
    pub complete: bool,
    pub derivs: Vec<Deriv>,
}

/// Why two items failed to combine, in checking order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CombineFailure {
    /// Condition 1: the right item does not start where the left ends.
    Adjacency,
    /// Condition 2: the attribute vectors clash.
    Unification,
    /// Condition 3: both items use some dominance link.
    SharedLink,
    /// Condition 4: some link of the left item does not precede every
    /// link of the right item.
    Order,
    /// Both items already contain a trace.
    SecondTrace,
    /// The combined item violates the node's local constraints.
    Local(Refusal),
}

impl CombineFailure {
    /// 1-4 for the combination conditions, 5 for traces, 6 for local
    /// constraints.
    pub fn condition(&self) -> u8 {
        match self {
            CombineFailure::Adjacency => 1,
            CombineFailure::Unification => 2,
            CombineFailure::SharedLink => 3,
            CombineFailure::Order => 4,
            CombineFailure::SecondTrace => 5,
            CombineFailure::Local(_) => 6,
        }
    }
}

impl fmt::Display for CombineFailure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CombineFailure::Adjacency => f.write_str("not adjacent"),
            CombineFailure::Unification => f.write_str("attributes do not unify"),
            CombineFailure::SharedLink => f.write_str("sources share a link"),
            CombineFailure::Order => f.write_str("link order violated"),
            CombineFailure::SecondTrace => f.write_str("two traces"),
            CombineFailure::Local(r) => write!(f, "local constraint {}", r.primitive),
        }
    }
}

/// Combines `a` (left) and `b` (right) at `node`.
pub fn combine(
    net: &GrammarNetwork,
    node: NodeId,
    a: &Message,
    b: &Message,
) -> Result<Message, CombineFailure> {
    if b.span.start != a.span.end {
        return Err(CombineFailure::Adjacency);
    }
    let att = a.att.unify(&b.att).ok_or(CombineFailure::Unification)?;
    let (ma, mb) = (a.origin.mask(), b.origin.mask());
    if ma & mb != 0 {
        return Err(CombineFailure::SharedLink);
    }
    if ma != 0 && mb != 0 && (63 - ma.leading_zeros()) >= mb.trailing_zeros() {
        return Err(CombineFailure::Order);
    }
    if a.trace.is_some() && b.trace.is_some() {
        return Err(CombineFailure::SecondTrace);
    }
    let att = net.apply_local(node, &att).map_err(CombineFailure::Local)?;
    Ok(Message {
        span: Span::new(a.span.start, b.span.end),
        att,
        origin: Origin::Links(ma | mb),
        trace: a.trace.or(b.trace),
    })
}

/// Per-node completion test compiled to link-slot masks.
#[derive(Clone, Debug)]
pub struct Completion {
    default: u64,
    rules: Vec<(u64, Vec<Condition>)>,
}

impl Completion {
    pub fn for_network(net: &GrammarNetwork) -> Vec<Completion> {
        net.node_ids()
            .map(|n| {
                let links = net.child_links(n);
                let bit = |l: LinkIdx| 1u64 << net.slot(l);
                let default = links
                    .iter()
                    .filter(|&&l| net.link(l).obligatory || net.link(l).role == Role::Head)
                    .fold(0, |m, &l| m | bit(l));
                let rules = net
                    .node(n)
                    .completion
                    .iter()
                    .map(|r| {
                        let mask = r
                            .require
                            .iter()
                            .filter_map(|id| links.iter().find(|&&l| net.link(l).id == *id))
                            .fold(0, |m, &l| m | bit(l));
                        (mask, r.when.clone())
                    })
                    .collect();
                Completion { default, rules }
            })
            .collect()
    }

    pub fn holds(&self, msg: &Message) -> bool {
        let Origin::Links(m) = msg.origin else {
            return true;
        };
        if self.rules.is_empty() {
            return m & self.default == self.default;
        }
        self.rules
            .iter()
            .filter(|(_, when)| all_hold(when, &msg.att))
            .all(|(req, _)| m & req == *req)
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct ChartStats {
    pub items: u64,
    pub derivations: u64,
    pub messages_sent: u64,
    pub messages_blocked: u64,
    /// Blocked messages keyed by `parent->child#id` (or `node` for
    /// rejections by an initial or forwarding node's local constraints).
    pub blocked_by_link: BTreeMap<String, u64>,
    /// Failed combinations by condition number.
    pub combine_failures: BTreeMap<u8, u64>,
    pub rounds: u64,
}

type Key = (NodeId, Span, AttributeVector, Origin, Option<u32>);

pub struct Chart<'n> {
    net: &'n GrammarNetwork,
    completion: Vec<Completion>,
    items: Vec<Item>,
    index: HashMap<Key, ItemId>,
    by_end: HashMap<(NodeId, u32), Vec<ItemId>>,
    arrivals_by_start: HashMap<(NodeId, u32), Vec<ItemId>>,
    agenda: VecDeque<ItemId>,
    stats: ChartStats,
    max_items: usize,
    overflow: bool,
}

impl<'n> Chart<'n> {
    pub fn new(net: &'n GrammarNetwork, max_items: usize) -> Self {
        Chart {
            net,
            completion: Completion::for_network(net),
            items: Vec::new(),
            index: HashMap::new(),
            by_end: HashMap::new(),
            arrivals_by_start: HashMap::new(),
            agenda: VecDeque::new(),
            stats: ChartStats::default(),
            max_items,
            overflow: false,
        }
    }

    pub fn items(&self) -> &[Item] {
        &self.items
    }

    pub fn item(&self, id: ItemId) -> &Item {
        &self.items[id.0 as usize]
    }

    pub fn stats(&self) -> &ChartStats {
        &self.stats
    }

    /// True once the item limit stopped message passing.
    pub fn overflowed(&self) -> bool {
        self.overflow
    }

    pub fn into_parts(self) -> (Vec<Item>, ChartStats) {
        (self.items, self.stats)
    }

    fn block(&mut self, what: String) {
        self.stats.messages_blocked += 1;
        *self.stats.blocked_by_link.entry(what).or_default() += 1;
    }

    /// Feeds an initial message at `node` and runs to quiescence.
    pub fn feed(&mut self, node: NodeId, span: Span, att: &AttributeVector, trace: bool, leaf: u32) {
        self.stats.messages_sent += 1;
        self.stats.rounds += 1;
        match self.net.apply_local(node, att) {
            Ok(att) => {
                let msg = Message {
                    span,
                    att,
                    origin: Origin::Atomic,
                    trace: trace.then_some(span.start),
                };
                self.add(node, msg, Deriv::Leaf(leaf));
                self.run();
            }
            Err(_) => {
                let name = self.net.node_name(node).to_owned();
                self.block(name);
            }
        }
    }

    fn add(&mut self, node: NodeId, msg: Message, deriv: Deriv) {
        let key = (node, msg.span, msg.att.clone(), msg.origin, msg.trace);
        self.stats.derivations += 1;
        if let Some(&id) = self.index.get(&key) {
            self.items[id.0 as usize].derivs.push(deriv);
            return;
        }
        if self.items.len() >= self.max_items {
            self.overflow = true;
            return;
        }
        let id = ItemId(self.items.len() as u32);
        let complete = self.completion[node.0 as usize].holds(&msg);
        self.items.push(Item {
            node,
            msg,
            complete,
            derivs: vec![deriv],
        });
        self.index.insert(key, id);
        self.agenda.push_back(id);
        self.stats.items += 1;
    }

    fn run(&mut self) {
        while let Some(id) = self.agenda.pop_front() {
            self.process(id);
        }
    }

    fn try_combine(&mut self, node: NodeId, left: ItemId, right: ItemId) {
        let res = combine(
            self.net,
            node,
            &self.items[left.0 as usize].msg,
            &self.items[right.0 as usize].msg,
        );
        match res {
            Ok(msg) => self.add(node, msg, Deriv::Combine { left, right }),
            Err(e) => *self.stats.combine_failures.entry(e.condition()).or_default() += 1,
        }
    }

    fn process(&mut self, id: ItemId) {
        let item = &self.items[id.0 as usize];
        let node = item.node;
        let Message { span, origin, .. } = item.msg;
        if let Origin::Links(mask) = origin {
            self.by_end.entry((node, span.end)).or_default().push(id);
            if mask.count_ones() == 1 {
                self.arrivals_by_start.entry((node, span.start)).or_default().push(id);
                let lefts = self.by_end.get(&(node, span.start)).cloned().unwrap_or_default();
                for a in lefts {
                    if a != id {
                        self.try_combine(node, a, id);
                    }
                }
            }
            let rights = self
                .arrivals_by_start
                .get(&(node, span.end))
                .cloned()
                .unwrap_or_default();
            for b in rights {
                if b != id {
                    self.try_combine(node, id, b);
                }
            }
        }
        if self.items[id.0 as usize].complete {
            self.send(id);
        }
    }

    fn send(&mut self, id: ItemId) {
        let net = self.net;
        let item = &self.items[id.0 as usize];
        let (node, msg) = (item.node, item.msg.clone());
        for &l in net.parent_links(node) {
            self.stats.messages_sent += 1;
            let link = net.link(l);
            let passed = net
                .apply_percolation(l, &msg.att)
                .and_then(|a| net.apply_local(link.parent, &a));
            match passed {
                Ok(att) => {
                    let m = Message {
                        span: msg.span,
                        att,
                        origin: Origin::Links(1 << net.slot(l)),
                        trace: msg.trace,
                    };
                    self.add(link.parent, m, Deriv::Arrive { link: l, child: id });
                }
                Err(_) => {
                    let what = format!(
                        "{}->{}#{}",
                        net.node_name(link.parent),
                        net.node_name(link.child),
                        link.id
                    );
                    self.block(what);
                }
            }
        }
        for &g in net.generals(node) {
            self.stats.messages_sent += 1;
            match net.apply_local(g, &msg.att) {
                Ok(att) => {
                    let m = Message {
                        att,
                        origin: Origin::Atomic,
                        ..msg.clone()
                    };
                    self.add(g, m, Deriv::Forward { child: id });
                }
                Err(_) => {
                    let what = format!("{}<{}", net.node_name(g), net.node_name(node));
                    self.block(what);
                }
            }
        }
    }
}

/// Top-level acceptance: no unchecked case requirement, no pending
/// movement chain.
pub fn acceptable_root(att: &AttributeVector) -> bool {
    !att.has(&Literal::minus("cm")) && !att.is_bound("whbarrier")
}
