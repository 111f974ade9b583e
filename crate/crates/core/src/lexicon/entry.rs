use std::fmt;

use crate::avm::{AttributeVector, FeatureRegistry};
use crate::sexpr::{self, Sexpr};

use super::LexiconError;

/// A multi-word entry, stored head-first: "down payment" is
/// `head = [payment]`, `before = [down]`, keyed as `"payment, down"`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Phrase {
    pub head: Vec<String>,
    pub before: Vec<String>,
}

impl Phrase {
    pub fn key(&self) -> String {
        let mut k = self.head.join(" ");
        if !self.before.is_empty() {
            k.push_str(", ");
            k.push_str(&self.before.join(" "));
        }
        k
    }

    pub fn len(&self) -> usize {
        self.head.len() + self.before.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    fn from_words(words: &[&str]) -> Option<Phrase> {
        let mut head = Vec::new();
        let mut before = Vec::new();
        let mut seen_comma = false;
        for w in words {
            let (w, comma) = match w.strip_suffix(',') {
                Some(w) => (w, true),
                None => (*w, false),
            };
            if !w.is_empty() {
                if seen_comma {
                    before.push(w.to_lowercase());
                } else {
                    head.push(w.to_lowercase());
                }
            }
            if comma {
                if seen_comma {
                    return None;
                }
                seen_comma = true;
            }
        }
        (!head.is_empty()).then_some(Phrase { head, before })
    }

    /// Parses the stored string form `"w_h ... w_n, w_1 ... w_h-1"`.
    pub fn parse_key(key: &str) -> Option<Phrase> {
        let spaced = key.replace(',', ", ");
        let words: Vec<&str> = spaced.split_whitespace().collect();
        Phrase::from_words(&words)
    }

    fn to_sexpr(&self) -> Sexpr {
        let mut words: Vec<Sexpr> = self.head.iter().map(|w| Sexpr::Atom(w.clone())).collect();
        if !self.before.is_empty() {
            if let Some(Sexpr::Atom(last)) = words.last_mut() {
                last.push(',');
            }
            words.extend(self.before.iter().map(|w| Sexpr::Atom(w.clone())));
        }
        Sexpr::List(words)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Function {
    /// Subcategorization frame: the word's own attributes and one vector
    /// per complement.
    Subcat {
        head: AttributeVector,
        comps: Vec<AttributeVector>,
    },
    /// Irregular form: the word's attributes, unified with the senses of
    /// `base` that agree on `names`.
    Ref {
        av: AttributeVector,
        base: String,
        names: Vec<String>,
    },
    /// Phrases headed by this word.
    Phrases(Vec<Phrase>),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LexicalEntry {
    pub key: String,
    pub functions: Vec<Function>,
}

pub(crate) fn normalize_key(key: &str) -> String {
    match Phrase::parse_key(key) {
        Some(p) if p.len() > 1 => p.key(),
        _ => key.trim().to_lowercase(),
    }
}

impl LexicalEntry {
    pub fn parse(text: &str, registry: &FeatureRegistry) -> Result<Self, LexiconError> {
        let s = sexpr::parse_one(text)?;
        Self::from_sexpr(&s, registry)
    }

    pub fn from_sexpr(s: &Sexpr, registry: &FeatureRegistry) -> Result<Self, LexiconError> {
        let bad = |msg: String| LexiconError::Entry { msg };
        let items = s
            .as_list()
            .ok_or_else(|| bad(format!("entry must be a list, got `{s}`")))?;
        let (key, funcs) = items
            .split_first()
            .ok_or_else(|| bad("empty entry".into()))?;
        let key = key
            .as_text()
            .ok_or_else(|| bad("entry key must be a word or a quoted phrase".into()))?;
        let key = normalize_key(key);
        if funcs.is_empty() {
            return Err(bad(format!("entry `{key}` has no functions")));
        }
        let vector = |s: &Sexpr| registry.parse_vector(s).map_err(LexiconError::from);
        let mut functions = Vec::with_capacity(funcs.len());
        for f in funcs {
            let parts = f
                .as_list()
                .ok_or_else(|| bad(format!("`{key}`: function must be a list, got `{f}`")))?;
            let (name, args) = parts
                .split_first()
                .ok_or_else(|| bad(format!("`{key}`: empty function")))?;
            let name = name.as_atom().unwrap_or("");
            let func = match (name, args) {
                ("subcat", [head]) => Function::Subcat {
                    head: vector(head)?,
                    comps: Vec::new(),
                },
                ("subcat", [head, comps]) => Function::Subcat {
                    head: vector(head)?,
                    comps: comps
                        .as_list()
                        .ok_or_else(|| bad(format!("`{key}`: complements must be a list")))?
                        .iter()
                        .map(vector)
                        .collect::<Result<_, _>>()?,
                },
                ("ref", [av, target]) => {
                    let target = target.as_list().unwrap_or(&[]);
                    let (base, names) = match target {
                        [base, names] => (base, names.as_list()),
                        [base] => (base, Some(&[][..])),
                        _ => (&Sexpr::List(vec![]), None),
                    };
                    let base = base
                        .as_text()
                        .ok_or_else(|| bad(format!("`{key}`: ref needs (<base> (<names>))")))?;
                    let names = names
                        .ok_or_else(|| bad(format!("`{key}`: ref needs (<base> (<names>))")))?
                        .iter()
                        .map(|n| {
                            let n = n
                                .as_atom()
                                .ok_or_else(|| bad(format!("`{key}`: bad attribute name")))?;
                            registry.check_name(n)?;
                            Ok(n.to_owned())
                        })
                        .collect::<Result<_, LexiconError>>()?;
                    Function::Ref {
                        av: vector(av)?,
                        base: base.to_lowercase(),
                        names,
                    }
                }
                ("phrase" | "phrases", phrases) if !phrases.is_empty() => Function::Phrases(
                    phrases
                        .iter()
                        .map(|p| {
                            let words: Option<Vec<&str>> =
                                p.as_list().and_then(|ws| ws.iter().map(Sexpr::as_text).collect());
                            words
                                .and_then(|w| Phrase::from_words(&w))
                                .ok_or_else(|| bad(format!("`{key}`: malformed phrase `{p}`")))
                        })
                        .collect::<Result<_, _>>()?,
                ),
                ("subcat" | "ref" | "phrase" | "phrases", _) => {
                    return Err(bad(format!("`{key}`: wrong arguments to `{name}`")))
                }
                _ => return Err(bad(format!("`{key}`: unknown function `{f}`"))),
            };
            functions.push(func);
        }
        Ok(LexicalEntry { key, functions })
    }

    pub fn to_sexpr(&self) -> Sexpr {
        let key = if self.key.chars().all(|c| !c.is_whitespace() && !"();\",".contains(c)) {
            Sexpr::Atom(self.key.clone())
        } else {
            Sexpr::Str(self.key.clone())
        };
        let mut items = vec![key];
        for f in &self.functions {
            items.push(match f {
                Function::Subcat { head, comps } => {
                    let mut v = vec![Sexpr::Atom("subcat".into()), head.to_sexpr()];
                    if !comps.is_empty() {
                        v.push(Sexpr::List(comps.iter().map(|c| c.to_sexpr()).collect()));
                    }
                    Sexpr::List(v)
                }
                Function::Ref { av, base, names } => Sexpr::List(vec![
                    Sexpr::Atom("ref".into()),
                    av.to_sexpr(),
                    Sexpr::List(vec![
                        Sexpr::Atom(base.clone()),
                        Sexpr::List(names.iter().map(|n| Sexpr::Atom(n.clone())).collect()),
                    ]),
                ]),
                Function::Phrases(ps) => {
                    let mut v = vec![Sexpr::Atom("phrases".into())];
                    v.extend(ps.iter().map(Phrase::to_sexpr));
                    Sexpr::List(v)
                }
            });
        }
        Sexpr::List(items)
    }

    pub fn subcats(&self) -> impl Iterator<Item = (&AttributeVector, &[AttributeVector])> {
        self.functions.iter().filter_map(|f| match f {
            Function::Subcat { head, comps } => Some((head, comps.as_slice())),
            _ => None,
        })
    }

    pub fn phrases(&self) -> impl Iterator<Item = &Phrase> {
        self.functions.iter().flat_map(|f| match f {
            Function::Phrases(ps) => ps.as_slice(),
            _ => &[],
        })
    }
}

impl fmt::Display for LexicalEntry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_sexpr())
    }
}

/// Reads every entry of a text lexicon; errors name the entry index.
pub fn parse_entries(text: &str, registry: &FeatureRegistry) -> Result<Vec<LexicalEntry>, LexiconError> {
    sexpr::parse_all(text)?
        .iter()
        .enumerate()
        .map(|(i, (s, pos))| {
            LexicalEntry::from_sexpr(s, registry).map_err(|e| LexiconError::AtEntry {
                index: i,
                line: pos.line,
                source: Box::new(e),
            })
        })
        .collect()
}
