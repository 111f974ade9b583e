//! Line-oriented grammar file reader and the matching debug emitter.

use std::fmt::Write as _;

use super::*;
use crate::avm::FeatureKind;
use crate::sexpr::{self, Sexpr};

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Word(String),
    Group(String),
    Arrow,
    Colon,
}

#[derive(Debug, Clone)]
struct Token {
    tok: Tok,
    col: usize,
}

fn strip_comment(line: &str) -> &str {
    let mut prev_ws = true;
    for (i, c) in line.char_indices() {
        if c == '#' && prev_ws {
            return &line[..i];
        }
        prev_ws = c.is_whitespace();
    }
    line
}

fn tokenize(line: &str, lineno: usize) -> Result<Vec<Token>, NetworkError> {
    let chars: Vec<(usize, char)> = line.chars().enumerate().collect();
    let mut out = Vec::new();
    let mut k = 0;
    while k < chars.len() {
        let (col, c) = chars[k];
        let col = col + 1;
        if c.is_whitespace() {
            k += 1;
        } else if c == '{' {
            let mut depth = 1;
            let mut content = String::new();
            k += 1;
            while k < chars.len() {
                let ch = chars[k].1;
                if ch == '{' {
                    depth += 1;
                } else if ch == '}' {
                    depth -= 1;
                    if depth == 0 {
                        break;
                    }
                }
                content.push(ch);
                k += 1;
            }
            if k >= chars.len() {
                return Err(NetworkError::Syntax {
                    line: lineno,
                    col,
                    msg: "unclosed '{'".into(),
                });
            }
            k += 1;
            out.push(Token {
                tok: Tok::Group(content),
                col,
            });
        } else {
            let mut word = String::new();
            while k < chars.len() && !chars[k].1.is_whitespace() && chars[k].1 != '{' {
                word.push(chars[k].1);
                k += 1;
            }
            if word == "->" {
                out.push(Token { tok: Tok::Arrow, col });
            } else if word == ":" {
                out.push(Token { tok: Tok::Colon, col });
            } else if let Some(w) = word.strip_suffix(':') {
                out.push(Token {
                    tok: Tok::Word(w.to_owned()),
                    col,
                });
                out.push(Token {
                    tok: Tok::Colon,
                    col: col + w.chars().count(),
                });
            } else {
                out.push(Token {
                    tok: Tok::Word(word),
                    col,
                });
            }
        }
    }
    Ok(out)
}

struct Cursor<'a> {
    toks: &'a [Token],
    pos: usize,
    line: usize,
    line_len: usize,
}

impl<'a> Cursor<'a> {
    fn col(&self) -> usize {
        self.toks
            .get(self.pos)
            .map(|t| t.col)
            .unwrap_or(self.line_len + 1)
    }

    fn err(&self, msg: impl Into<String>) -> NetworkError {
        NetworkError::Syntax {
            line: self.line,
            col: self.col(),
            msg: msg.into(),
        }
    }

    fn peek(&self) -> Option<&'a Tok> {
        self.toks.get(self.pos).map(|t| &t.tok)
    }

    fn next(&mut self) -> Option<&'a Tok> {
        let t = self.toks.get(self.pos).map(|t| &t.tok);
        self.pos += 1;
        t
    }

    fn word(&mut self, what: &str) -> Result<&'a str, NetworkError> {
        match self.peek() {
            Some(Tok::Word(w)) => {
                self.pos += 1;
                Ok(w)
            }
            _ => Err(self.err(format!("expected {what}"))),
        }
    }

    fn group(&mut self, what: &str) -> Result<&'a str, NetworkError> {
        match self.peek() {
            Some(Tok::Group(g)) => {
                self.pos += 1;
                Ok(g)
            }
            _ => Err(self.err(format!("expected {{{what}}}"))),
        }
    }

    fn expect(&mut self, tok: Tok, what: &str) -> Result<(), NetworkError> {
        if self.peek() == Some(&tok) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.err(format!("expected {what}")))
        }
    }

    fn keyword(&mut self, kw: &str) -> bool {
        if let Some(Tok::Word(w)) = self.peek() {
            if w == kw {
                self.pos += 1;
                return true;
            }
        }
        false
    }

    fn done(&self) -> Result<(), NetworkError> {
        if self.pos < self.toks.len() {
            Err(self.err("unexpected trailing input"))
        } else {
            Ok(())
        }
    }
}

struct Loader {
    net: GrammarNetwork,
}

impl Loader {
    fn node(&self, name: &str, line: usize) -> Result<NodeId, NetworkError> {
        self.net
            .by_name
            .get(name)
            .copied()
            .ok_or_else(|| NetworkError::UndeclaredNode {
                line,
                name: name.to_owned(),
            })
    }

    fn feature_err(line: usize) -> impl Fn(AvmError) -> NetworkError {
        move |source| NetworkError::Feature { line, source }
    }

    fn sexprs(&self, text: &str, cur: &Cursor) -> Result<Vec<Sexpr>, NetworkError> {
        sexpr::parse_all(text)
            .map(|v| v.into_iter().map(|(s, _)| s).collect())
            .map_err(|e| cur.err(e.msg))
    }

    fn conditions(&self, text: &str, cur: &Cursor) -> Result<Vec<Condition>, NetworkError> {
        let reg = &self.net.registry;
        let fe = Self::feature_err(cur.line);
        self.sexprs(text, cur)?
            .iter()
            .map(|s| {
                let cond = match s {
                    Sexpr::Atom(a) if a.starts_with('!') => Condition::Unbound(a[1..].to_owned()),
                    Sexpr::Atom(a)
                        if a.starts_with('+') || a.starts_with('-') || a.starts_with('\u{2212}') =>
                    {
                        Condition::Is(Literal::from_sexpr(s).map_err(&fe)?)
                    }
                    Sexpr::Atom(a) => Condition::Bound(a.clone()),
                    _ => Condition::Is(Literal::from_sexpr(s).map_err(&fe)?),
                };
                match &cond {
                    Condition::Is(l) => reg.check_literal(l).map_err(&fe)?,
                    Condition::Bound(n) | Condition::Unbound(n) => reg.check_name(n).map_err(&fe)?,
                }
                Ok(cond)
            })
            .collect()
    }

    fn vector(&self, text: &str, cur: &Cursor) -> Result<AttributeVector, NetworkError> {
        let list = Sexpr::List(self.sexprs(text, cur)?);
        self.net
            .registry
            .parse_vector(&list)
            .map_err(Self::feature_err(cur.line))
    }

    fn names(&self, text: &str, cur: &Cursor) -> Result<Vec<String>, NetworkError> {
        self.sexprs(text, cur)?
            .iter()
            .map(|s| {
                let name = s
                    .as_atom()
                    .ok_or_else(|| cur.err("expected a feature name"))?;
                self.net
                    .registry
                    .check_name(name)
                    .map_err(Self::feature_err(cur.line))?;
                Ok(name.to_owned())
            })
            .collect()
    }

    fn one_condition(&self, cur: &mut Cursor) -> Result<Condition, NetworkError> {
        let text = match cur.next() {
            Some(Tok::Word(w)) | Some(Tok::Group(w)) => w.clone(),
            _ => return Err(cur.err("expected a feature literal")),
        };
        let mut conds = self.conditions(&text, cur)?;
        if conds.len() != 1 {
            return Err(cur.err("expected exactly one feature literal"));
        }
        Ok(conds.pop().unwrap())
    }

    fn one_literal(&self, cur: &mut Cursor) -> Result<Literal, NetworkError> {
        match self.one_condition(cur)? {
            Condition::Is(l) => Ok(l),
            _ => Err(cur.err("expected a bound literal such as -whbarrier")),
        }
    }

    /// `assign {..} [when {..}]`, `reject {..}`, `clear {..} when {..}`,
    /// plus, when `perc` is set, `block`, `flip` and `keep`.
    fn constraint(&self, cur: &mut Cursor, perc: bool) -> Result<Constraint, NetworkError> {
        let head = cur.word("a constraint primitive")?;
        let c = match head {
            "assign" => {
                let features = self.vector(cur.group("features")?, cur)?;
                let guard = if cur.keyword("when") {
                    self.conditions(cur.group("guard")?, cur)?
                } else {
                    Vec::new()
                };
                Constraint::Assign { features, guard }
            }
            "reject" => Constraint::Reject(self.conditions(cur.group("literals")?, cur)?),
            "clear" => {
                let names = self.names(cur.group("feature names")?, cur)?;
                let when = if cur.keyword("when") {
                    self.conditions(cur.group("trigger")?, cur)?
                } else {
                    Vec::new()
                };
                Constraint::Clear { names, when }
            }
            "block" if perc => Constraint::Block(self.one_condition(cur)?),
            "flip" if perc => {
                let from = self.one_literal(cur)?;
                cur.expect(Tok::Arrow, "'->'")?;
                let to = self.one_literal(cur)?;
                Constraint::Flip { from, to }
            }
            "keep" if perc => Constraint::Keep(self.names(cur.group("feature names")?, cur)?),
            other => {
                cur.pos -= 1;
                return Err(cur.err(format!("unknown constraint primitive `{other}`")));
            }
        };
        Ok(c)
    }

    fn link_ref(&self, cur: &mut Cursor) -> Result<LinkIdx, NetworkError> {
        let parent = cur.word("parent node")?;
        let p = self.node(parent, cur.line)?;
        cur.expect(Tok::Arrow, "'->'")?;
        let child = cur.word("child node")?;
        let c = self.node(child, cur.line)?;
        let id = id_attr(cur)?;
        self.net
            .dominance
            .iter()
            .position(|l| l.parent == p && l.child == c && l.id == id)
            .map(|i| LinkIdx(i as u32))
            .ok_or_else(|| cur.err(format!("no dominance link {parent} -> {child} id={id}")))
    }

    fn line(&mut self, cur: &mut Cursor) -> Result<(), NetworkError> {
        let line = cur.line;
        let directive = cur.word("a directive")?;
        match directive {
            "feature" => {
                let kind = cur.word("`flag` or `valued`")?;
                match kind {
                    "flag" => {
                        let mut any = false;
                        while let Some(Tok::Word(name)) = cur.peek() {
                            cur.pos += 1;
                            any = true;
                            self.net
                                .registry
                                .declare_flag(name)
                                .map_err(Self::feature_err(line))?;
                        }
                        if !any {
                            return Err(cur.err("expected a feature name"));
                        }
                    }
                    "valued" => {
                        let name = cur.word("feature name")?;
                        let atoms: Vec<String> = cur
                            .group("atoms")?
                            .split(|c: char| c == ',' || c.is_whitespace())
                            .filter(|a| !a.is_empty())
                            .map(str::to_owned)
                            .collect();
                        if atoms.is_empty() {
                            return Err(cur.err("empty atom domain"));
                        }
                        self.net
                            .registry
                            .declare_valued(name, atoms)
                            .map_err(Self::feature_err(line))?;
                    }
                    _ => {
                        cur.pos -= 1;
                        return Err(cur.err("expected `flag` or `valued`"));
                    }
                }
            }
            "bigweight" => {
                let w = cur.word("a number")?;
                self.net.big_weight = Weight::parse(w).ok_or_else(|| {
                    cur.pos -= 1;
                    cur.err("bigweight must be a non-negative number with at most one decimal")
                })?;
            }
            "node" => {
                let name = cur.word("node name")?;
                let mut kind = NodeKind::Maximal;
                if let Some(Tok::Word(w)) = cur.peek() {
                    let k = w
                        .strip_prefix("kind=")
                        .and_then(NodeKind::parse)
                        .ok_or_else(|| cur.err("expected kind=lexical|subcategory|bar|maximal"))?;
                    kind = k;
                    cur.pos += 1;
                }
                if self.net.by_name.contains_key(name) {
                    return Err(NetworkError::DuplicateNode {
                        line,
                        name: name.to_owned(),
                    });
                }
                self.net
                    .by_name
                    .insert(name.to_owned(), NodeId(self.net.nodes.len() as u32));
                self.net.nodes.push(GrammarNode {
                    name: name.to_owned(),
                    kind,
                    local: Vec::new(),
                    completion: Vec::new(),
                });
            }
            "subsume" => {
                let general = self.node(cur.word("general node")?, line)?;
                cur.expect(Tok::Arrow, "'->'")?;
                let specific = self.node(cur.word("specific node")?, line)?;
                self.net.subsumption.push(SubsumptionLink { general, specific });
            }
            "dom" => {
                let parent = self.node(cur.word("parent node")?, line)?;
                cur.expect(Tok::Arrow, "'->'")?;
                let child = self.node(cur.word("child node")?, line)?;
                let id = id_attr(cur)?;
                let mut obligatory = true;
                let mut role = Role::Complement;
                let mut barrier = false;
                while let Some(Tok::Word(w)) = cur.peek() {
                    match w.as_str() {
                        "obligatory" => obligatory = true,
                        "optional" => obligatory = false,
                        "barrier" => barrier = true,
                        _ => {
                            role = w
                                .strip_prefix("role=")
                                .and_then(Role::parse)
                                .ok_or_else(|| cur.err(format!("unexpected `{w}`")))?;
                        }
                    }
                    cur.pos += 1;
                }
                self.net.dominance.push(DominanceLink {
                    parent,
                    child,
                    id,
                    obligatory,
                    role,
                    barrier,
                    percolation: Vec::new(),
                    weight: Weight::ONE,
                });
            }
            "local" => {
                let node = self.node(cur.word("node name")?, line)?;
                cur.expect(Tok::Colon, "':'")?;
                let c = self.constraint(cur, false)?;
                self.net.nodes[node.0 as usize].local.push(c);
            }
            "perc" => {
                let link = self.link_ref(cur)?;
                cur.expect(Tok::Colon, "':'")?;
                let c = self.constraint(cur, true)?;
                self.net.dominance[link.0 as usize].percolation.push(c);
            }
            "complete" => {
                let node = self.node(cur.word("node name")?, line)?;
                cur.expect(Tok::Colon, "':'")?;
                if !cur.keyword("require") {
                    return Err(cur.err("expected `require`"));
                }
                let ids = cur
                    .group("link ids")?
                    .split(|c: char| c == ',' || c.is_whitespace())
                    .filter(|s| !s.is_empty())
                    .map(|s| s.parse::<u32>())
                    .collect::<Result<Vec<_>, _>>()
                    .map_err(|_| cur.err("link ids must be integers"))?;
                let when = if cur.keyword("when") {
                    self.conditions(cur.group("conditions")?, cur)?
                } else {
                    Vec::new()
                };
                self.net.nodes[node.0 as usize]
                    .completion
                    .push(CompletionRule { require: ids, when });
            }
            "lexcat" => {
                let node = self.node(cur.word("node name")?, line)?;
                let when = if cur.keyword("when") {
                    self.conditions(cur.group("conditions")?, cur)?
                } else {
                    Vec::new()
                };
                let comps = if cur.keyword("comps") {
                    if cur.keyword("*") {
                        CompPattern::Any
                    } else {
                        let mut pats = Vec::new();
                        while let Some(Tok::Group(g)) = cur.peek() {
                            cur.pos += 1;
                            pats.push(self.conditions(g, cur)?);
                        }
                        if pats.is_empty() {
                            return Err(cur.err("expected `*` or complement patterns"));
                        }
                        CompPattern::Exactly(pats)
                    }
                } else {
                    CompPattern::Empty
                };
                self.net.lexcats.push(LexCategory { node, when, comps });
            }
            "top" => {
                while let Some(Tok::Word(w)) = cur.peek() {
                    let id = self.node(w, line)?;
                    self.net.top.push(id);
                    cur.pos += 1;
                }
                if self.net.top.is_empty() {
                    return Err(cur.err("expected at least one node"));
                }
            }
            other => {
                cur.pos -= 1;
                return Err(cur.err(format!("unknown directive `{other}`")));
            }
        }
        cur.done()
    }
}

fn id_attr(cur: &mut Cursor) -> Result<u32, NetworkError> {
    let w = cur.word("id=<n>")?;
    w.strip_prefix("id=")
        .and_then(|n| n.parse::<u32>().ok())
        .filter(|&n| n > 0)
        .ok_or_else(|| {
            cur.pos -= 1;
            cur.err("expected id=<positive integer>")
        })
}

pub(super) fn parse(text: &str) -> Result<GrammarNetwork, NetworkError> {
    let mut loader = Loader {
        net: GrammarNetwork {
            registry: FeatureRegistry::new(),
            big_weight: DEFAULT_BIG_WEIGHT,
            nodes: Vec::new(),
            dominance: Vec::new(),
            subsumption: Vec::new(),
            lexcats: Vec::new(),
            top: Vec::new(),
            by_name: HashMap::new(),
            children: Vec::new(),
            parents: Vec::new(),
            generals: Vec::new(),
            slot: Vec::new(),
        },
    };
    for (k, raw) in text.lines().enumerate() {
        let line = strip_comment(raw);
        let toks = tokenize(line, k + 1)?;
        if toks.is_empty() {
            continue;
        }
        let mut cur = Cursor {
            toks: &toks,
            pos: 0,
            line: k + 1,
            line_len: line.chars().count(),
        };
        loader.line(&mut cur)?;
    }
    let mut net = loader.net;
    net.index();
    Ok(net)
}

fn cond_list(conds: &[Condition]) -> String {
    let parts: Vec<String> = conds.iter().map(|c| c.to_string()).collect();
    format!("{{{}}}", parts.join(" "))
}

/// Emits a grammar file that loads back to an equal network.
pub fn render_network(net: &GrammarNetwork) -> String {
    let mut out = String::new();
    for (name, kind) in net.registry.features() {
        match kind {
            FeatureKind::Flag => writeln!(out, "feature flag {name}").unwrap(),
            FeatureKind::Valued(atoms) => {
                let atoms: Vec<&str> = atoms.iter().map(String::as_str).collect();
                writeln!(out, "feature valued {name} {{{}}}", atoms.join(", ")).unwrap()
            }
        }
    }
    writeln!(out, "bigweight {}", net.big_weight).unwrap();
    for node in &net.nodes {
        writeln!(out, "node {} kind={}", node.name, node.kind.as_str()).unwrap();
    }
    for s in &net.subsumption {
        writeln!(
            out,
            "subsume {} -> {}",
            net.node_name(s.general),
            net.node_name(s.specific)
        )
        .unwrap();
    }
    for l in &net.dominance {
        writeln!(
            out,
            "dom {} -> {} id={} {} role={}{}",
            net.node_name(l.parent),
            net.node_name(l.child),
            l.id,
            if l.obligatory { "obligatory" } else { "optional" },
            l.role.as_str(),
            if l.barrier { " barrier" } else { "" }
        )
        .unwrap();
    }
    for node in &net.nodes {
        for c in &node.local {
            writeln!(out, "local {}: {}", node.name, render_constraint(c)).unwrap();
        }
    }
    for l in &net.dominance {
        for c in &l.percolation {
            writeln!(
                out,
                "perc {} -> {} id={}: {}",
                net.node_name(l.parent),
                net.node_name(l.child),
                l.id,
                render_constraint(c)
            )
            .unwrap();
        }
    }
    for node in &net.nodes {
        for r in &node.completion {
            let ids: Vec<String> = r.require.iter().map(u32::to_string).collect();
            write!(out, "complete {}: require {{{}}}", node.name, ids.join(" ")).unwrap();
            if !r.when.is_empty() {
                write!(out, " when {}", cond_list(&r.when)).unwrap();
            }
            out.push('\n');
        }
    }
    for lc in &net.lexcats {
        write!(out, "lexcat {}", net.node_name(lc.node)).unwrap();
        if !lc.when.is_empty() {
            write!(out, " when {}", cond_list(&lc.when)).unwrap();
        }
        match &lc.comps {
            CompPattern::Empty => {}
            CompPattern::Any => out.push_str(" comps *"),
            CompPattern::Exactly(pats) => {
                out.push_str(" comps");
                for p in pats {
                    write!(out, " {}", cond_list(p)).unwrap();
                }
            }
        }
        out.push('\n');
    }
    let tops: Vec<&str> = net.top.iter().map(|&t| net.node_name(t)).collect();
    writeln!(out, "top {}", tops.join(" ")).unwrap();
    out
}

fn render_constraint(c: &Constraint) -> String {
    match c {
        Constraint::Block(cond) => format!("block {{{cond}}}"),
        Constraint::Flip { from, to } => format!("flip {{{from}}} -> {{{to}}}"),
        other => other.to_string(),
    }
}
