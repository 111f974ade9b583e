//! Flat attribute-value vectors and their unification.
//!
//! A vector binds each feature at most once, either to a sign (`+f` / `-f`)
//! or to an atom from the feature's declared domain (`(f v)`). An unbound
//! feature is unconstrained: `{}` unifies with both `+f` and `-f`.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

use crate::sexpr::Sexpr;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AvmError {
    #[error("unknown feature `{0}`")]
    UnknownFeature(String),
    #[error("feature `{0}` declared twice")]
    DuplicateFeature(String),
    #[error("`{feature}` is a flag and takes a sign, not an atom")]
    NotValued { feature: String },
    #[error("`{feature}` is valued and takes an atom, not a sign")]
    NotFlag { feature: String },
    #[error("atom `{atom}` is not in the domain of `{feature}`")]
    BadAtom { feature: String, atom: String },
    #[error("feature `{0}` bound twice with different values")]
    Conflict(String),
    #[error("malformed feature literal `{0}`")]
    Malformed(String),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Value {
    Plus,
    Minus,
    Atom(String),
}

/// A single feature binding such as `+ca`, `-cm` or `(cat v)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Literal {
    pub feature: String,
    pub value: Value,
}

impl Literal {
    pub fn plus(feature: &str) -> Self {
        Literal {
            feature: feature.to_owned(),
            value: Value::Plus,
        }
    }

    pub fn minus(feature: &str) -> Self {
        Literal {
            feature: feature.to_owned(),
            value: Value::Minus,
        }
    }

    pub fn atom(feature: &str, atom: &str) -> Self {
        Literal {
            feature: feature.to_owned(),
            value: Value::Atom(atom.to_owned()),
        }
    }

    /// Reads `+f`, `-f` (an ASCII hyphen or U+2212 minus) or `(f v)`.
    pub fn from_sexpr(s: &Sexpr) -> Result<Self, AvmError> {
        match s {
            Sexpr::Atom(a) => {
                if let Some(name) = a.strip_prefix('+') {
                    if !name.is_empty() {
                        return Ok(Literal::plus(name));
                    }
                } else if let Some(name) = a.strip_prefix('-').or_else(|| a.strip_prefix('\u{2212}')) {
                    if !name.is_empty() {
                        return Ok(Literal::minus(name));
                    }
                }
                Err(AvmError::Malformed(a.clone()))
            }
            Sexpr::List(items) => match items.as_slice() {
                [Sexpr::Atom(f), Sexpr::Atom(v)] => Ok(Literal::atom(f, v)),
                _ => Err(AvmError::Malformed(s.to_string())),
            },
            Sexpr::Str(_) => Err(AvmError::Malformed(s.to_string())),
        }
    }

    pub fn to_sexpr(&self) -> Sexpr {
        match &self.value {
            Value::Plus => Sexpr::Atom(format!("+{}", self.feature)),
            Value::Minus => Sexpr::Atom(format!("-{}", self.feature)),
            Value::Atom(a) => Sexpr::List(vec![
                Sexpr::Atom(self.feature.clone()),
                Sexpr::Atom(a.clone()),
            ]),
        }
    }
}

impl fmt::Display for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.value {
            Value::Plus => write!(f, "+{}", self.feature),
            Value::Minus => write!(f, "-{}", self.feature),
            Value::Atom(a) => write!(f, "({} {})", self.feature, a),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FeatureKind {
    Flag,
    Valued(BTreeSet<String>),
}

/// The feature inventory a grammar declares. Flag and valued names share
/// one namespace, so they are disjoint by construction.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct FeatureRegistry {
    features: BTreeMap<String, FeatureKind>,
}

impl FeatureRegistry {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn declare_flag(&mut self, name: &str) -> Result<(), AvmError> {
        self.declare(name, FeatureKind::Flag)
    }

    pub fn declare_valued<I, S>(&mut self, name: &str, atoms: I) -> Result<(), AvmError>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let atoms = atoms.into_iter().map(Into::into).collect();
        self.declare(name, FeatureKind::Valued(atoms))
    }

    fn declare(&mut self, name: &str, kind: FeatureKind) -> Result<(), AvmError> {
        if self.features.contains_key(name) {
            return Err(AvmError::DuplicateFeature(name.to_owned()));
        }
        self.features.insert(name.to_owned(), kind);
        Ok(())
    }

    pub fn kind(&self, name: &str) -> Option<&FeatureKind> {
        self.features.get(name)
    }

    pub fn features(&self) -> impl Iterator<Item = (&str, &FeatureKind)> {
        self.features.iter().map(|(k, v)| (k.as_str(), v))
    }

    pub fn check_name(&self, name: &str) -> Result<(), AvmError> {
        if self.features.contains_key(name) {
            Ok(())
        } else {
            Err(AvmError::UnknownFeature(name.to_owned()))
        }
    }

    pub fn check_literal(&self, lit: &Literal) -> Result<(), AvmError> {
        match (self.kind(&lit.feature), &lit.value) {
            (None, _) => Err(AvmError::UnknownFeature(lit.feature.clone())),
            (Some(FeatureKind::Flag), Value::Plus | Value::Minus) => Ok(()),
            (Some(FeatureKind::Flag), Value::Atom(_)) => Err(AvmError::NotValued {
                feature: lit.feature.clone(),
            }),
            (Some(FeatureKind::Valued(_)), Value::Plus | Value::Minus) => Err(AvmError::NotFlag {
                feature: lit.feature.clone(),
            }),
            (Some(FeatureKind::Valued(domain)), Value::Atom(a)) => {
                if domain.contains(a) {
                    Ok(())
                } else {
                    Err(AvmError::BadAtom {
                        feature: lit.feature.clone(),
                        atom: a.clone(),
                    })
                }
            }
        }
    }

    pub fn validate(&self, av: &AttributeVector) -> Result<(), AvmError> {
        av.literals().try_for_each(|l| self.check_literal(&l))
    }

    /// Registry-checked [`AttributeVector::has`].
    pub fn has(&self, av: &AttributeVector, lit: &Literal) -> Result<bool, AvmError> {
        self.check_literal(lit)?;
        Ok(av.has(lit))
    }

    /// Registry-checked [`AttributeVector::without`].
    pub fn without(&self, av: &AttributeVector, name: &str) -> Result<AttributeVector, AvmError> {
        self.check_name(name)?;
        Ok(av.without(name))
    }

    /// Parses a vector written as a list of literals, e.g. `((cat v) -passive)`.
    pub fn parse_vector(&self, s: &Sexpr) -> Result<AttributeVector, AvmError> {
        let items = s
            .as_list()
            .ok_or_else(|| AvmError::Malformed(s.to_string()))?;
        let lits = items
            .iter()
            .map(Literal::from_sexpr)
            .collect::<Result<Vec<_>, _>>()?;
        for l in &lits {
            self.check_literal(l)?;
        }
        AttributeVector::from_literals(lits)
    }
}

/// Partial map from feature name to value.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct AttributeVector {
    entries: BTreeMap<String, Value>,
}

impl AttributeVector {
    pub fn new() -> Self {
        Self::default()
    }

    /// Builds a vector; repeating a literal is allowed, rebinding to a
    /// different value is not.
    pub fn from_literals<I: IntoIterator<Item = Literal>>(lits: I) -> Result<Self, AvmError> {
        let mut entries = BTreeMap::new();
        for l in lits {
            if let Some(old) = entries.insert(l.feature.clone(), l.value.clone()) {
                if old != l.value {
                    return Err(AvmError::Conflict(l.feature));
                }
            }
        }
        Ok(AttributeVector { entries })
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn get(&self, name: &str) -> Option<&Value> {
        self.entries.get(name)
    }

    pub fn atom(&self, name: &str) -> Option<&str> {
        match self.entries.get(name) {
            Some(Value::Atom(a)) => Some(a),
            _ => None,
        }
    }

    pub fn is_bound(&self, name: &str) -> bool {
        self.entries.contains_key(name)
    }

    pub fn literals(&self) -> impl Iterator<Item = Literal> + '_ {
        self.entries.iter().map(|(f, v)| Literal {
            feature: f.clone(),
            value: v.clone(),
        })
    }

    /// Most general vector subsumed by both, or `None` on a value clash.
    pub fn unify(&self, other: &AttributeVector) -> Option<AttributeVector> {
        let (big, small) = if self.len() >= other.len() {
            (self, other)
        } else {
            (other, self)
        };
        let mut entries = big.entries.clone();
        for (f, v) in &small.entries {
            match entries.get(f) {
                Some(existing) if existing != v => return None,
                Some(_) => {}
                None => {
                    entries.insert(f.clone(), v.clone());
                }
            }
        }
        Some(AttributeVector { entries })
    }

    pub fn unifiable(&self, other: &AttributeVector) -> bool {
        self.entries
            .iter()
            .all(|(f, v)| other.entries.get(f).is_none_or(|w| w == v))
    }

    /// True iff the vector binds the literal's feature to exactly its value.
    pub fn has(&self, lit: &Literal) -> bool {
        self.entries.get(&lit.feature) == Some(&lit.value)
    }

    pub fn without(&self, name: &str) -> AttributeVector {
        let mut out = self.clone();
        out.entries.remove(name);
        out
    }

    /// Restriction to the named features.
    pub fn keep<'a, I: IntoIterator<Item = &'a str>>(&self, names: I) -> AttributeVector {
        let mut entries = BTreeMap::new();
        for n in names {
            if let Some(v) = self.entries.get(n) {
                entries.insert(n.to_owned(), v.clone());
            }
        }
        AttributeVector { entries }
    }

    pub(crate) fn set(&mut self, lit: Literal) {
        self.entries.insert(lit.feature, lit.value);
    }

    pub(crate) fn remove(&mut self, name: &str) {
        self.entries.remove(name);
    }

    pub fn to_sexpr(&self) -> Sexpr {
        Sexpr::List(self.literals().map(|l| l.to_sexpr()).collect())
    }
}

impl serde::Serialize for AttributeVector {
    fn serialize<S: serde::Serializer>(&self, ser: S) -> Result<S::Ok, S::Error> {
        ser.collect_str(self)
    }
}

impl fmt::Display for AttributeVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_sexpr())
    }
}

/// Shorthand for tests and fixtures: `av(&["+ca", "(cat v)"])`.
pub fn av(lits: &[&str]) -> AttributeVector {
    AttributeVector::from_literals(lits.iter().map(|t| {
        let s = crate::sexpr::parse_one(t).expect("literal syntax");
        Literal::from_sexpr(&s).expect("literal syntax")
    }))
    .expect("consistent literals")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn registry() -> FeatureRegistry {
        let mut r = FeatureRegistry::new();
        for f in ["ca", "cm", "govern", "passive", "whbarrier"] {
            r.declare_flag(f).unwrap();
        }
        r.declare_valued("cat", ["v", "n"]).unwrap();
        r.declare_valued("tense", ["present", "past"]).unwrap();
        r
    }

    #[test]
    fn unify_identity_case() {
        let b = av(&["(cat v)", "-passive"]);
        assert_eq!(AttributeVector::new().unify(&b), Some(b));
    }

    #[test]
    fn unify_sign_clash_fails() {
        assert_eq!(av(&["+ca"]).unify(&av(&["-ca"])), None);
    }

    #[test]
    fn unify_disjoint_union() {
        let got = av(&["(cat v)", "-passive"]).unify(&av(&["(tense present)", "+ca"]));
        assert_eq!(
            got,
            Some(av(&["(cat v)", "-passive", "(tense present)", "+ca"]))
        );
    }

    #[test]
    fn has_distinguishes_absent_from_negative() {
        assert!(av(&["+govern", "-cm"]).has(&Literal::minus("cm")));
        assert!(!av(&["+govern"]).has(&Literal::minus("cm")));
        assert!(!av(&["(tense past)"]).has(&Literal::atom("tense", "present")));
    }

    #[test]
    fn without_clears_one_feature() {
        assert_eq!(
            av(&["+ca", "-cm", "+govern"]).without("cm"),
            av(&["+ca", "+govern"])
        );
        assert_eq!(AttributeVector::new().without("cm"), AttributeVector::new());
        assert_eq!(av(&["-whbarrier"]).without("whbarrier"), AttributeVector::new());
    }

    #[test]
    fn registry_rejects_unknown_and_ill_typed_literals() {
        let mut r = registry();
        assert_eq!(
            r.has(&av(&["+ca"]), &Literal::minus("bogus")),
            Err(AvmError::UnknownFeature("bogus".into()))
        );
        assert!(r.without(&av(&["+ca"]), "bogus").is_err());
        assert!(matches!(
            r.check_literal(&Literal::atom("ca", "v")),
            Err(AvmError::NotValued { .. })
        ));
        assert!(matches!(
            r.check_literal(&Literal::plus("cat")),
            Err(AvmError::NotFlag { .. })
        ));
        assert!(matches!(
            r.check_literal(&Literal::atom("cat", "q")),
            Err(AvmError::BadAtom { .. })
        ));
        assert!(r.declare_flag("cat").is_err());
    }

    #[test]
    fn parses_and_renders_lexicon_syntax() {
        let r = registry();
        let s = crate::sexpr::parse_one("((cat v) \u{2212}passive (tense past) +ca)").unwrap();
        let v = r.parse_vector(&s).unwrap();
        assert_eq!(v.to_string(), "(+ca (cat v) -passive (tense past))");
        let again = r
            .parse_vector(&crate::sexpr::parse_one(&v.to_string()).unwrap())
            .unwrap();
        assert_eq!(again, v);
    }

    #[test]
    fn conflicting_literals_in_one_vector_are_rejected() {
        let r = registry();
        let s = crate::sexpr::parse_one("(+ca -ca)").unwrap();
        assert_eq!(r.parse_vector(&s), Err(AvmError::Conflict("ca".into())));
    }
}
