//! Suffix stripping for regular inflections.

use crate::avm::{AttributeVector, Literal};
use crate::sexpr;

use super::LexiconError;

const DEFAULT_TABLE: &str = include_str!("../../data/suffixes.txt");

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SuffixRule {
    pub suffix: String,
    pub replacement: String,
    /// Also try the stem with a final doubled consonant undoubled
    /// ("stopp" -> "stop").
    pub undouble: bool,
    /// Alternative readings of the inflection; the base sense decides which
    /// one unifies.
    pub inflections: Vec<AttributeVector>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Candidate {
    pub base: String,
    pub inflections: Vec<AttributeVector>,
}

#[derive(Clone, Debug)]
pub struct SuffixTable {
    rules: Vec<SuffixRule>,
}

impl Default for SuffixTable {
    fn default() -> Self {
        SuffixTable::parse(DEFAULT_TABLE).expect("bundled suffix table parses")
    }
}

const MIN_STEM: usize = 2;

/// Splits off three whitespace-separated fields and returns the remainder.
fn leading_fields(line: &str) -> Option<([&str; 3], &str)> {
    let mut rest = line;
    let mut fields = [""; 3];
    for f in &mut fields {
        rest = rest.trim_start();
        let end = rest.find(char::is_whitespace)?;
        *f = &rest[..end];
        rest = &rest[end..];
    }
    let rest = rest.trim();
    (!rest.is_empty()).then_some((fields, rest))
}

fn is_vowel(c: char) -> bool {
    matches!(c, 'a' | 'e' | 'i' | 'o' | 'u')
}

impl SuffixTable {
    pub fn parse(text: &str) -> Result<Self, LexiconError> {
        let mut rules = Vec::new();
        for (k, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let bad = |msg: &str| LexiconError::Entry {
                msg: format!("suffix table line {}: {msg}", k + 1),
            };
            let Some(([suffix, repl, undouble], rest)) = leading_fields(line) else {
                return Err(bad("expected suffix, replacement, undouble, inflections"));
            };
            let inflections = rest
                .split('|')
                .map(|alt| {
                    let s = sexpr::parse_one(alt.trim()).map_err(|e| bad(&e.msg))?;
                    let lits = s
                        .as_list()
                        .ok_or_else(|| bad("inflection must be a list"))?
                        .iter()
                        .map(Literal::from_sexpr)
                        .collect::<Result<Vec<_>, _>>()?;
                    Ok(AttributeVector::from_literals(lits)?)
                })
                .collect::<Result<Vec<_>, LexiconError>>()?;
            rules.push(SuffixRule {
                suffix: suffix.to_owned(),
                replacement: if repl == "-" { String::new() } else { repl.to_owned() },
                undouble: match undouble {
                    "yes" => true,
                    "no" => false,
                    _ => return Err(bad("undouble must be yes or no")),
                },
                inflections,
            });
        }
        Ok(SuffixTable { rules })
    }

    pub fn rules(&self) -> &[SuffixRule] {
        &self.rules
    }

    /// Possible base forms of `word`, in rule order, without duplicates and
    /// never including `word` itself.
    pub fn strip_candidates(&self, word: &str) -> Vec<Candidate> {
        let mut out: Vec<Candidate> = Vec::new();
        let mut push = |base: String, infl: &[AttributeVector]| {
            if base == word {
                return;
            }
            match out.iter_mut().find(|c| c.base == base) {
                Some(c) => {
                    for i in infl {
                        if !c.inflections.contains(i) {
                            c.inflections.push(i.clone());
                        }
                    }
                }
                None => out.push(Candidate {
                    base,
                    inflections: infl.to_vec(),
                }),
            }
        };
        for rule in &self.rules {
            let Some(stem) = word.strip_suffix(rule.suffix.as_str()) else {
                continue;
            };
            if stem.chars().count() < MIN_STEM {
                continue;
            }
            push(format!("{stem}{}", rule.replacement), &rule.inflections);
            if rule.undouble {
                let mut rev = stem.chars().rev();
                if let (Some(a), Some(b)) = (rev.next(), rev.next()) {
                    if a == b && !is_vowel(a) && a.is_alphabetic() && stem.chars().count() > MIN_STEM {
                        let undoubled: String = stem.chars().take(stem.chars().count() - 1).collect();
                        push(format!("{undoubled}{}", rule.replacement), &rule.inflections);
                    }
                }
            }
        }
        out
    }
}
