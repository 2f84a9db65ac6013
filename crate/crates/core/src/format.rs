//! Text model format.
//!
//! One statement per line, `#` starts a comment:
//!
//! ```text
//! var x1 in [2..7]
//! var x2 in {0, 1, 2}
//! con c1 domain lin_eq 1*x1 -3*x2 -5*x3 = 0
//! con c2 bounds-z lin_le 2*x1 1*x2 <= 9
//! con c3 bounds-z lin_ne 1*x1 -1*x2 != 0
//! con c4 bounds-d all_different x1 x2 x3
//! con c5 bounds-r product_le x1 x2 x3
//! con c6 bounds-r mono_bij x1 affine 2 1 x2
//! con c7 bounds-r mono_bij x1 pow 1 3 x2
//! con c8 bounds-r mono_bij x1 poly1234 x2
//! con c9 domain mod x1 x2 x3
//! con c10 domain reif_lin_le b 1*x1 1*x2 <= 3
//! con c11 domain table x1 x2 | 0 1 | 1 0
//! ```
//!
//! `product_le x1 x2 x3` is `x1*x2 <= x3`, `mono_bij x1 g x2` is `x1 = g(x2)`
//! and `mod x1 x2 x3` is `x1 = x2 mod x3`.

use std::fmt::Write as _;

use crate::checkers::Notion;
use crate::constraints::{Constraint, LinTerm, MonoFunc};
use crate::domains::{Domain, IntSet, VarId};
use crate::error::{Error, Result};
use crate::model::Model;

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Int(i64),
    Sym(&'static str),
}

#[derive(Debug, Clone)]
struct Token {
    tok: Tok,
    col: usize,
}

const SYMBOLS: [&str; 10] = ["..", "<=", "!=", "{", "}", "[", "]", ",", "*", "|"];

fn lex(line: &str, lineno: usize) -> Result<Vec<Token>> {
    let bytes = line.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    let err = |col: usize, msg: String| Error::Parse { line: lineno, col, msg };
    while i < bytes.len() {
        let ch = bytes[i] as char;
        let col = i + 1;
        if ch == '#' {
            break;
        }
        if ch.is_whitespace() {
            i += 1;
            continue;
        }
        if ch.is_ascii_digit() || (ch == '-' && bytes.get(i + 1).is_some_and(u8::is_ascii_digit)) {
            let start = i;
            i += 1;
            while i < bytes.len() && bytes[i].is_ascii_digit() {
                i += 1;
            }
            let text = &line[start..i];
            let v = text.parse::<i64>().map_err(|_| err(col, format!("integer out of range: {text}")))?;
            out.push(Token { tok: Tok::Int(v), col });
            continue;
        }
        if ch.is_ascii_alphabetic() || ch == '_' {
            let start = i;
            while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_' || bytes[i] == b'-') {
                i += 1;
            }
            out.push(Token { tok: Tok::Ident(line[start..i].to_string()), col });
            continue;
        }
        if let Some(s) = SYMBOLS.iter().find(|s| line[i..].starts_with(**s)) {
            out.push(Token { tok: Tok::Sym(s), col });
            i += s.len();
            continue;
        }
        if ch == '=' {
            out.push(Token { tok: Tok::Sym("="), col });
            i += 1;
            continue;
        }
        return Err(err(col, format!("unexpected character `{ch}`")));
    }
    Ok(out)
}

struct Cursor<'a> {
    toks: &'a [Token],
    pos: usize,
    line: usize,
    end_col: usize,
}

impl Cursor<'_> {
    fn err<T>(&self, msg: impl Into<String>) -> Result<T> {
        let col = self.toks.get(self.pos).map_or(self.end_col, |t| t.col);
        Err(Error::Parse { line: self.line, col, msg: msg.into() })
    }

    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|t| &t.tok)
    }

    fn ident(&mut self, what: &str) -> Result<String> {
        match self.peek() {
            Some(Tok::Ident(s)) => {
                let s = s.clone();
                self.pos += 1;
                Ok(s)
            }
            _ => self.err(format!("expected {what}")),
        }
    }

    fn int(&mut self) -> Result<i64> {
        match self.peek() {
            Some(Tok::Int(v)) => {
                let v = *v;
                self.pos += 1;
                Ok(v)
            }
            _ => self.err("expected integer"),
        }
    }

    fn sym(&mut self, s: &str) -> Result<()> {
        match self.peek() {
            Some(Tok::Sym(t)) if *t == s => {
                self.pos += 1;
                Ok(())
            }
            _ => self.err(format!("expected `{s}`")),
        }
    }

    fn eat(&mut self, s: &str) -> bool {
        self.sym(s).is_ok()
    }

    fn keyword(&mut self, k: &str) -> Result<()> {
        match self.peek() {
            Some(Tok::Ident(s)) if s == k => {
                self.pos += 1;
                Ok(())
            }
            _ => self.err(format!("expected `{k}`")),
        }
    }

    fn done(&self) -> Result<()> {
        if self.pos < self.toks.len() {
            return self.err("unexpected trailing input");
        }
        Ok(())
    }
}

fn parse_set(cur: &mut Cursor) -> Result<IntSet> {
    if cur.eat("[") {
        let lo = cur.int()?;
        cur.sym("..")?;
        let hi = cur.int()?;
        cur.sym("]")?;
        if lo > hi {
            return cur.err(format!("empty range [{lo}..{hi}]"));
        }
        if (hi as i128 - lo as i128) > 10_000_000 {
            return cur.err("range too large");
        }
        return Ok(IntSet::range(lo, hi));
    }
    cur.sym("{")?;
    let mut vals = Vec::new();
    if !cur.eat("}") {
        loop {
            vals.push(cur.int()?);
            if cur.eat("}") {
                break;
            }
            cur.sym(",")?;
        }
    }
    Ok(IntSet::from_values(vals))
}

fn var_ref(cur: &mut Cursor, m: &Model) -> Result<VarId> {
    let at = cur.pos;
    let name = cur.ident("variable name")?;
    match m.var_id(&name) {
        Some(v) => Ok(v),
        None => {
            cur.pos = at;
            cur.err(format!("unknown variable `{name}`"))
        }
    }
}

fn parse_terms(cur: &mut Cursor, m: &Model) -> Result<Vec<LinTerm>> {
    let mut terms = Vec::new();
    while let Some(Tok::Int(_)) = cur.peek() {
        let a = cur.int()?;
        cur.sym("*")?;
        terms.push(LinTerm::new(a, var_ref(cur, m)?));
    }
    if terms.is_empty() {
        return cur.err("expected at least one term `<coeff>*<var>`");
    }
    Ok(terms)
}

fn parse_constraint(cur: &mut Cursor, m: &Model) -> Result<Constraint> {
    let kind = cur.ident("constraint kind")?;
    let c = match kind.as_str() {
        "lin_eq" | "lin_le" | "lin_ne" => {
            let terms = parse_terms(cur, m)?;
            cur.sym(match kind.as_str() {
                "lin_eq" => "=",
                "lin_le" => "<=",
                _ => "!=",
            })?;
            let rhs = cur.int()?;
            match kind.as_str() {
                "lin_eq" => Constraint::LinEq { terms, rhs },
                "lin_le" => Constraint::LinLe { terms, rhs },
                _ => Constraint::LinNe { terms, rhs },
            }
        }
        "all_different" => {
            let mut vars = Vec::new();
            while cur.peek().is_some() {
                vars.push(var_ref(cur, m)?);
            }
            Constraint::AllDifferent { vars }
        }
        "product_le" | "mod" => {
            let (x1, x2, x3) = (var_ref(cur, m)?, var_ref(cur, m)?, var_ref(cur, m)?);
            if kind == "mod" {
                Constraint::Mod { x1, x2, x3 }
            } else {
                Constraint::ProductLe { x1, x2, x3 }
            }
        }
        "mono_bij" => {
            let x1 = var_ref(cur, m)?;
            let g = match cur.ident("function (affine, pow, poly1234)")?.as_str() {
                "affine" => MonoFunc::Affine { a: cur.int()?, b: cur.int()? },
                "pow" => {
                    let a = cur.int()?;
                    let k = cur.int()?;
                    let k = u32::try_from(k).or_else(|_| cur.err("exponent out of range"))?;
                    MonoFunc::PowK { a, k }
                }
                "poly1234" => MonoFunc::Poly1234,
                other => return cur.err(format!("unknown function `{other}`")),
            };
            Constraint::MonoBij { x1, g, x2: var_ref(cur, m)? }
        }
        "reif_lin_le" => {
            let b = var_ref(cur, m)?;
            let terms = parse_terms(cur, m)?;
            cur.sym("<=")?;
            Constraint::ReifLinLe { b, terms, rhs: cur.int()? }
        }
        "table" => {
            let mut vars = Vec::new();
            while let Some(Tok::Ident(_)) = cur.peek() {
                vars.push(var_ref(cur, m)?);
            }
            let mut rows = Vec::new();
            while cur.eat("|") {
                let mut row = Vec::new();
                while let Some(Tok::Int(_)) = cur.peek() {
                    row.push(cur.int()?);
                }
                if row.len() != vars.len() {
                    return cur.err(format!("row has {} values, expected {}", row.len(), vars.len()));
                }
                rows.push(row);
            }
            Constraint::Table { vars, rows }
        }
        other => {
            cur.pos -= 1;
            return cur.err(format!("unknown constraint kind `{other}`"));
        }
    };
    Ok(c)
}

/// Parses and validates a model.
pub fn parse_model(src: &str) -> Result<Model> {
    let mut m = Model::new();
    for (i, line) in src.lines().enumerate() {
        let lineno = i + 1;
        let toks = lex(line, lineno)?;
        if toks.is_empty() {
            continue;
        }
        let mut cur = Cursor { toks: &toks, pos: 0, line: lineno, end_col: line.len() + 1 };
        match cur.ident("`var` or `con`")?.as_str() {
            "var" => {
                let at = cur.pos;
                let name = cur.ident("variable name")?;
                if m.var_id(&name).is_some() {
                    cur.pos = at;
                    return cur.err(format!("duplicate variable `{name}`"));
                }
                cur.keyword("in")?;
                let set = parse_set(&mut cur)?;
                if set.is_empty() {
                    cur.pos -= 1;
                    return cur.err(format!("variable `{name}` has an empty domain"));
                }
                cur.done()?;
                m.add_var(name, set);
            }
            "con" => {
                let at = cur.pos;
                let id = cur.ident("constraint id")?;
                if m.constraint_index(&id).is_some() {
                    cur.pos = at;
                    return cur.err(format!("duplicate constraint id `{id}`"));
                }
                let at = cur.pos;
                let notion: Notion = match cur.ident("notion")?.parse() {
                    Ok(n) => n,
                    Err(_) => {
                        cur.pos = at;
                        return cur.err("expected notion (domain, bounds-d, bounds-z, bounds-r)");
                    }
                };
                let c = parse_constraint(&mut cur, &m)?;
                cur.done()?;
                m.post(id, c, notion);
            }
            other => {
                cur.pos = 0;
                return cur.err(format!("expected `var` or `con`, found `{other}`"));
            }
        }
    }
    m.validate()?;
    Ok(m)
}

pub fn format_set(s: &IntSet) -> String {
    match (s.min(), s.max()) {
        (Some(lo), Some(hi)) if s.is_range() => format!("[{lo}..{hi}]"),
        _ => {
            let vals: Vec<String> = s.values().iter().map(i64::to_string).collect();
            format!("{{{}}}", vals.join(", "))
        }
    }
}

fn format_terms(m: &Model, terms: &[LinTerm]) -> String {
    let parts: Vec<String> = terms.iter().map(|t| format!("{}*{}", t.coeff, m.name(t.var))).collect();
    parts.join(" ")
}

pub fn format_constraint(m: &Model, c: &Constraint) -> String {
    let n = |v: &VarId| m.name(*v).to_string();
    let body = match c {
        Constraint::LinEq { terms, rhs } => format!("{} = {rhs}", format_terms(m, terms)),
        Constraint::LinLe { terms, rhs } => format!("{} <= {rhs}", format_terms(m, terms)),
        Constraint::LinNe { terms, rhs } => format!("{} != {rhs}", format_terms(m, terms)),
        Constraint::AllDifferent { vars } => vars.iter().map(n).collect::<Vec<_>>().join(" "),
        Constraint::ProductLe { x1, x2, x3 } | Constraint::Mod { x1, x2, x3 } => {
            format!("{} {} {}", n(x1), n(x2), n(x3))
        }
        Constraint::MonoBij { x1, g, x2 } => {
            let g = match g {
                MonoFunc::Affine { a, b } => format!("affine {a} {b}"),
                MonoFunc::PowK { a, k } => format!("pow {a} {k}"),
                MonoFunc::Poly1234 => "poly1234".to_string(),
            };
            format!("{} {g} {}", n(x1), n(x2))
        }
        Constraint::ReifLinLe { b, terms, rhs } => format!("{} {} <= {rhs}", n(b), format_terms(m, terms)),
        Constraint::Table { vars, rows } => {
            let mut s = vars.iter().map(n).collect::<Vec<_>>().join(" ");
            for r in rows {
                s.push_str(" |");
                for x in r {
                    let _ = write!(s, " {x}");
                }
            }
            s
        }
    };
    format!("{} {body}", c.kind())
}

/// Canonical text of `m` with variables drawn from `d`.
pub fn format_model_with(m: &Model, d: &Domain) -> String {
    let mut out = String::new();
    for (i, v) in m.vars.iter().enumerate() {
        let _ = writeln!(out, "var {} in {}", v.name, format_set(d.get(VarId::from(i))));
    }
    for p in &m.constraints {
        let _ = writeln!(out, "con {} {} {}", p.id, p.notion, format_constraint(m, &p.constraint));
    }
    out
}

pub fn format_model(m: &Model) -> String {
    format_model_with(m, &m.initial_domain())
}

#[cfg(test)]
mod tests {
    use super::*;

    const ALL_KINDS: &str = "\
var x1 in [2..7]
var x2 in {0, 1, 5}
var x3 in [-1..2]
var b in [0..1]
var y in {1, 3, 8}
con c1 domain lin_eq 1*x1 -3*x2 -5*x3 = 0
con c2 bounds-z lin_le 2*x1 1*x2 <= 9
con c3 bounds-z lin_ne 1*x1 -1*x2 != 0
con c4 bounds-d all_different x1 x2 x3
con c5 bounds-r product_le x2 x3 x1
con c6 bounds-r mono_bij x1 affine 2 1 x2
con c7 bounds-r mono_bij x1 pow 1 3 x2
con c8 bounds-r mono_bij x1 poly1234 x2
con c9 domain mod x1 x2 y
con c10 domain reif_lin_le b 1*x1 1*x2 <= 3
con c11 domain table x1 x2 | 3 0 | 4 5
";

    #[test]
    fn round_trip_canonical() {
        let m = parse_model(ALL_KINDS).unwrap();
        assert_eq!(format_model(&m), ALL_KINDS);
        assert_eq!(parse_model(&format_model(&m)).unwrap(), m);
    }

    #[test]
    fn comments_and_blank_lines() {
        let m = parse_model("# header\n\nvar x in [0..3]   # trailing\ncon c bounds-z lin_le 1*x <= 2\n").unwrap();
        assert_eq!(format_model(&m), "var x in [0..3]\ncon c bounds-z lin_le 1*x <= 2\n");
    }

    #[test]
    fn errors_carry_positions() {
        let pos = |src: &str| match parse_model(src) {
            Err(Error::Parse { line, col, .. }) => (line, col),
            other => panic!("expected parse error, got {other:?}"),
        };
        assert_eq!(pos("var x in [0..3]\ncon c domain lin_eq 1*y = 0\n"), (2, 23));
        assert_eq!(pos("var x in [3..0]"), (1, 16));
        assert_eq!(pos("bogus"), (1, 1));
        assert_eq!(pos("var x in [0..3]\ncon c strong lin_eq 1*x = 0"), (2, 7));
        assert_eq!(pos("var x in [0..3]\ncon c domain lin_eq 1*x <= 0"), (2, 25));
        assert_eq!(pos("var x in [0..3] extra"), (1, 17));
        assert_eq!(pos("var x in [0..3] $"), (1, 17));
    }

    #[test]
    fn semantic_errors_are_invalid_model() {
        let r = parse_model("var x in [0..3]\nvar y in [0..3]\nvar z in [0..3]\ncon c bounds-r mod x y z\n");
        assert!(matches!(r, Err(Error::InvalidModel(_))));
    }
}
