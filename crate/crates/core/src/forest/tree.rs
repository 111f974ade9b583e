use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::network::GrammarNetwork;
use crate::weight::Weight;

use super::rare_weight;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TreeLeaf {
    /// Surface words; empty for traces.
    pub word: String,
    pub trace: bool,
    pub rare: Option<String>,
    pub tag: String,
}

/// One parse tree. Subsumption steps are collapsed: a node reached from a
/// subcategory is labelled with the general category, and `via` lists the
/// more specific nodes down to the one the item was built at.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ParseTree {
    pub label: String,
    pub via: Vec<String>,
    /// 1-based inclusive word interval.
    pub span: (u32, u32),
    /// Declared id of the dominance link from the parent, if any.
    pub link: Option<u32>,
    pub children: Vec<ParseTree>,
    pub leaf: Option<TreeLeaf>,
    /// Total weight of links and senses in this subtree.
    pub weight: Weight,
}

impl ParseTree {
    /// The node whose dominance links connect this tree to its children.
    pub fn owner(&self) -> &str {
        self.via.last().unwrap_or(&self.label)
    }

    pub fn to_bracketed(&self) -> String {
        let mut s = String::new();
        self.write_bracketed(&mut s);
        s
    }

    fn write_bracketed(&self, out: &mut String) {
        out.push('(');
        out.push_str(&self.label);
        if let Some(l) = &self.leaf {
            out.push(' ');
            out.push_str(if l.trace { "*t*" } else { &l.word });
        }
        for c in &self.children {
            out.push(' ');
            c.write_bracketed(out);
        }
        out.push(')');
    }

    /// Graphviz DOT.
    pub fn to_dot(&self) -> String {
        let mut out = String::from("digraph parse {\n  node [shape=plaintext];\n");
        let mut next = 0usize;
        self.write_dot(&mut out, &mut next);
        out.push_str("}\n");
        out
    }

    fn write_dot(&self, out: &mut String, next: &mut usize) -> usize {
        let me = *next;
        *next += 1;
        out.push_str(&format!("  n{me} [label=\"{}\"];\n", escape(&self.label)));
        if let Some(l) = &self.leaf {
            let w = *next;
            *next += 1;
            let text = if l.trace { "*t*" } else { &l.word };
            out.push_str(&format!("  n{w} [label=\"{}\", fontcolor=blue];\n", escape(text)));
            out.push_str(&format!("  n{me} -> n{w};\n"));
        }
        for c in &self.children {
            let k = c.write_dot(out, next);
            match c.link {
                Some(id) => out.push_str(&format!("  n{me} -> n{k} [label=\"{id}\"];\n")),
                None => out.push_str(&format!("  n{me} -> n{k};\n")),
            }
        }
        me
    }

    pub fn render(&self, format: TreeFormat) -> String {
        match format {
            TreeFormat::Bracketed => self.to_bracketed(),
            TreeFormat::Graph => self.to_dot(),
        }
    }

    /// Words and traces at the leaves, left to right.
    pub fn yield_words(&self) -> Vec<String> {
        let mut out = Vec::new();
        self.visit(&mut |t| {
            if let Some(l) = &t.leaf {
                out.push(if l.trace { "*t*".to_owned() } else { l.word.clone() });
            }
        });
        out
    }

    /// Pre-order traversal.
    pub fn visit<'a>(&'a self, f: &mut impl FnMut(&'a ParseTree)) {
        f(self);
        for c in &self.children {
            c.visit(f);
        }
    }

    /// Recomputes the weight from the network's link weights and the
    /// leaves' rarity, ignoring the stored weights. `None` if some link
    /// does not exist in `net`.
    pub fn audit_weight(&self, net: &GrammarNetwork) -> Option<Weight> {
        let mut w = Weight::ZERO;
        if let Some(l) = &self.leaf {
            w += rare_weight(l.rare.as_deref(), net.big_weight);
        }
        for c in &self.children {
            let link = net.find_link(self.owner(), &c.label, c.link?)?;
            w += net.link(link).weight + c.audit_weight(net)?;
        }
        Some(w)
    }
}

fn escape(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"")
}

impl fmt::Display for ParseTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_bracketed())
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub enum TreeFormat {
    #[default]
    Bracketed,
    Graph,
}

impl FromStr for TreeFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "bracketed" => Ok(TreeFormat::Bracketed),
            "graph" | "dot" => Ok(TreeFormat::Graph),
            _ => Err(format!("unknown tree format `{s}` (bracketed, graph)")),
        }
    }
}
