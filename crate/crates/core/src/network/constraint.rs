//! Declarative constraint primitives attached to nodes (local) and to
//! dominance links (percolation).

use std::fmt;

use crate::avm::{AttributeVector, Literal};

/// A test on one feature of an attribute vector.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Condition {
    /// Feature bound to exactly this value: `+f`, `-f`, `(f v)`.
    Is(Literal),
    /// Feature bound to anything: `f`.
    Bound(String),
    /// Feature not bound: `!f`.
    Unbound(String),
}

impl Condition {
    pub fn holds(&self, att: &AttributeVector) -> bool {
        match self {
            Condition::Is(l) => att.has(l),
            Condition::Bound(f) => att.is_bound(f),
            Condition::Unbound(f) => !att.is_bound(f),
        }
    }

    pub fn feature(&self) -> &str {
        match self {
            Condition::Is(l) => &l.feature,
            Condition::Bound(f) | Condition::Unbound(f) => f,
        }
    }
}

impl fmt::Display for Condition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Condition::Is(l) => write!(f, "{l}"),
            Condition::Bound(n) => f.write_str(n),
            Condition::Unbound(n) => write!(f, "!{n}"),
        }
    }
}

pub fn all_hold(conds: &[Condition], att: &AttributeVector) -> bool {
    conds.iter().all(|c| c.holds(att))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Constraint {
    /// Unify `features` in when every guard condition holds; a failed
    /// unification rejects the item.
    Assign {
        features: AttributeVector,
        guard: Vec<Condition>,
    },
    /// Reject when all conditions hold together.
    Reject(Vec<Condition>),
    /// Unbind `names` when all trigger conditions hold.
    Clear {
        names: Vec<String>,
        when: Vec<Condition>,
    },
    /// Percolation only: refuse passage when the condition holds.
    Block(Condition),
    /// Percolation only: rewrite one literal to another.
    Flip { from: Literal, to: Literal },
    /// Percolation only: drop every feature not listed.
    Keep(Vec<String>),
}

impl Constraint {
    /// Features the primitive mentions, for registry checks.
    pub fn features(&self) -> Vec<String> {
        match self {
            Constraint::Assign { features, guard } => features
                .literals()
                .map(|l| l.feature)
                .chain(guard.iter().map(|c| c.feature().to_owned()))
                .collect(),
            Constraint::Reject(conds) => conds.iter().map(|c| c.feature().to_owned()).collect(),
            Constraint::Clear { names, when } => names
                .iter()
                .cloned()
                .chain(when.iter().map(|c| c.feature().to_owned()))
                .collect(),
            Constraint::Block(c) => vec![c.feature().to_owned()],
            Constraint::Flip { from, to } => vec![from.feature.clone(), to.feature.clone()],
            Constraint::Keep(names) => names.clone(),
        }
    }

    pub fn is_local_form(&self) -> bool {
        matches!(
            self,
            Constraint::Assign { .. } | Constraint::Reject(_) | Constraint::Clear { .. }
        )
    }

    /// Applies one primitive, returning the rewritten vector or `None` when
    /// it rejects/blocks.
    pub fn apply(&self, att: AttributeVector) -> Option<AttributeVector> {
        match self {
            Constraint::Assign { features, guard } => {
                if all_hold(guard, &att) {
                    att.unify(features)
                } else {
                    Some(att)
                }
            }
            Constraint::Reject(conds) => {
                if all_hold(conds, &att) {
                    None
                } else {
                    Some(att)
                }
            }
            Constraint::Clear { names, when } => {
                if all_hold(when, &att) {
                    let mut att = att;
                    for n in names {
                        att.remove(n);
                    }
                    Some(att)
                } else {
                    Some(att)
                }
            }
            Constraint::Block(c) => {
                if c.holds(&att) {
                    None
                } else {
                    Some(att)
                }
            }
            Constraint::Flip { from, to } => {
                if att.has(from) {
                    let mut att = att;
                    att.remove(&from.feature);
                    att.set(to.clone());
                    Some(att)
                } else {
                    Some(att)
                }
            }
            Constraint::Keep(names) => Some(att.keep(names.iter().map(String::as_str))),
        }
    }
}

fn braces<T: fmt::Display>(items: &[T]) -> String {
    let parts: Vec<String> = items.iter().map(|i| i.to_string()).collect();
    format!("{{{}}}", parts.join(" "))
}

pub(crate) fn vector_braces(av: &AttributeVector) -> String {
    let lits: Vec<Literal> = av.literals().collect();
    braces(&lits)
}

impl fmt::Display for Constraint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Constraint::Assign { features, guard } => {
                write!(f, "assign {}", vector_braces(features))?;
                if !guard.is_empty() {
                    write!(f, " when {}", braces(guard))?;
                }
                Ok(())
            }
            Constraint::Reject(conds) => write!(f, "reject {}", braces(conds)),
            Constraint::Clear { names, when } => {
                write!(f, "clear {} when {}", braces(names), braces(when))
            }
            Constraint::Block(c) => write!(f, "block {c}"),
            Constraint::Flip { from, to } => write!(f, "flip {from} -> {to}"),
            Constraint::Keep(names) => write!(f, "keep {}", braces(names)),
        }
    }
}

/// Which primitive refused an item or message.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Refusal {
    pub primitive: Constraint,
}

impl fmt::Display for Refusal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "refused by `{}`", self.primitive)
    }
}
