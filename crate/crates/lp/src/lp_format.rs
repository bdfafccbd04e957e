//! CPLEX LP text format.
//!
//! The writer always emits `Minimize`, `Subject To` and `End`; `Bounds` and
//! `General` are emitted when the model has variables / integer variables.
//! Every variable gets an explicit bound line so that variables occurring in
//! no row survive a round trip. Numbers use the shortest representation that
//! parses back to the identical `f64` (never more than 17 significant digits).

use std::collections::HashSet;
use std::fmt::Write as _;
use std::path::Path;

use thiserror::Error;

use crate::model::{Bounds, LinearModel, ModelError, Sense, VarId};

#[derive(Debug, Error)]
pub enum LpFormatError {
    #[error("i/o error on {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("two names sanitize to the same LP identifier {0}")]
    NameCollision(String),
    #[error("constraint {0} has no terms and the model has no variables to anchor it")]
    EmptyRow(String),
}

/// Formats a finite number so that `str::parse::<f64>` recovers it bit for bit.
pub fn format_number(v: f64) -> String {
    let v = if v == 0.0 { 0.0 } else { v };
    let a = v.abs();
    if a != 0.0 && !(1e-5..1e16).contains(&a) {
        format!("{v:e}")
    } else {
        format!("{v}")
    }
}

fn format_bound(v: f64) -> String {
    if v == f64::INFINITY {
        "+inf".into()
    } else if v == f64::NEG_INFINITY {
        "-inf".into()
    } else {
        format_number(v)
    }
}

fn write_expr(out: &mut String, names: &[String], terms: &[(VarId, f64)]) {
    for (k, &(v, c)) in terms.iter().enumerate() {
        let mag = format_number(c.abs());
        let name = &names[v.0];
        match (k, c < 0.0) {
            (0, false) => write!(out, " {mag} {name}"),
            (0, true) => write!(out, " -{mag} {name}"),
            (_, false) => write!(out, " + {mag} {name}"),
            (_, true) => write!(out, " - {mag} {name}"),
        }
        .expect("write to string");
    }
}

/// Serializes `model` to LP text.
pub fn write_lp_string(model: &LinearModel) -> Result<String, LpFormatError> {
    let names: Vec<String> = (0..model.num_variables()).map(|i| model.var_name(VarId(i))).collect();
    let mut seen = HashSet::new();
    for n in &names {
        if !seen.insert(n.as_str()) {
            return Err(LpFormatError::NameCollision(n.clone()));
        }
    }
    let mut out = String::from("\\ written by plan-lp\nMinimize\n obj:");
    let obj_terms: Vec<(VarId, f64)> =
        model.objective().iter().enumerate().filter(|(_, c)| **c != 0.0).map(|(i, c)| (VarId(i), *c)).collect();
    write_expr(&mut out, &names, &obj_terms);
    out.push_str("\nSubject To\n");
    let mut row_names = HashSet::new();
    for (i, c) in model.constraints().iter().enumerate() {
        let name = model.constraint_name(crate::model::ConstrId(i));
        if !row_names.insert(name.clone()) {
            return Err(LpFormatError::NameCollision(name));
        }
        write!(out, " {name}:").expect("write to string");
        if c.terms.is_empty() {
            let Some(first) = names.first() else {
                return Err(LpFormatError::EmptyRow(name));
            };
            write!(out, " 0 {first}").expect("write to string");
        } else {
            write_expr(&mut out, &names, &c.terms);
        }
        writeln!(out, " {} {}", c.sense, format_number(c.rhs)).expect("write to string");
    }
    if model.num_variables() > 0 {
        out.push_str("Bounds\n");
        for (v, name) in model.variables().iter().zip(&names) {
            let Bounds { lower, upper } = v.bounds;
            let line = if lower == f64::NEG_INFINITY && upper == f64::INFINITY {
                format!(" {name} free")
            } else if upper == f64::INFINITY {
                format!(" {name} >= {}", format_bound(lower))
            } else if lower == upper {
                format!(" {name} = {}", format_number(lower))
            } else {
                format!(" {} <= {name} <= {}", format_bound(lower), format_bound(upper))
            };
            out.push_str(&line);
            out.push('\n');
        }
    }
    let integers: Vec<&String> = model.variables().iter().zip(&names).filter(|(v, _)| v.integer).map(|(_, n)| n).collect();
    if !integers.is_empty() {
        out.push_str("General\n");
        for chunk in integers.chunks(8) {
            out.push(' ');
            out.push_str(&chunk.iter().map(|s| s.as_str()).collect::<Vec<_>>().join(" "));
            out.push('\n');
        }
    }
    out.push_str("End\n");
    Ok(out)
}

/// Writes `model` as an LP file at `path`.
pub fn emit_lp(model: &LinearModel, path: impl AsRef<Path>) -> Result<(), LpFormatError> {
    let path = path.as_ref();
    let text = write_lp_string(model)?;
    std::fs::write(path, text).map_err(|source| LpFormatError::Io { path: path.display().to_string(), source })
}

/// Reads an LP file written in the dialect of [`emit_lp`].
pub fn parse_lp(path: impl AsRef<Path>) -> Result<LinearModel, LpFormatError> {
    let path = path.as_ref();
    let text =
        std::fs::read_to_string(path).map_err(|source| LpFormatError::Io { path: path.display().to_string(), source })?;
    parse_lp_str(&text)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Section {
    Objective,
    Constraints,
    Bounds,
    General,
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(f64),
    Ident(String),
    Colon,
    Plus,
    Minus,
    Cmp(Sense),
}

#[derive(Debug, Clone)]
struct Token {
    tok: Tok,
    line: usize,
}

fn section_header(line: &str) -> Option<Option<Section>> {
    let l = line.trim().to_ascii_lowercase();
    let l = l.split_whitespace().collect::<Vec<_>>().join(" ");
    match l.as_str() {
        "minimize" | "minimise" | "minimum" | "min" => Some(Some(Section::Objective)),
        "subject to" | "such that" | "st" | "s.t." | "st." => Some(Some(Section::Constraints)),
        "bounds" | "bound" => Some(Some(Section::Bounds)),
        "general" | "generals" | "gen" | "integer" | "integers" => Some(Some(Section::General)),
        "end" => Some(None),
        _ => None,
    }
}

fn perr(line: usize, message: impl Into<String>) -> LpFormatError {
    LpFormatError::Parse { line, message: message.into() }
}

fn tokenize(line: &str, lineno: usize, out: &mut Vec<Token>) -> Result<(), LpFormatError> {
    let chars: Vec<char> = line.chars().collect();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        if c.is_whitespace() {
            i += 1;
        } else if c == ':' {
            out.push(Token { tok: Tok::Colon, line: lineno });
            i += 1;
        } else if c == '+' {
            out.push(Token { tok: Tok::Plus, line: lineno });
            i += 1;
        } else if c == '-' {
            out.push(Token { tok: Tok::Minus, line: lineno });
            i += 1;
        } else if c == '<' || c == '>' || c == '=' {
            let mut j = i + 1;
            if j < chars.len() && matches!(chars[j], '=' | '<' | '>') {
                j += 1;
            }
            let op: String = chars[i..j].iter().collect();
            let sense = match op.as_str() {
                "<=" | "<" | "=<" => Sense::Le,
                ">=" | ">" | "=>" => Sense::Ge,
                "=" => Sense::Eq,
                _ => return Err(perr(lineno, format!("unknown operator {op}"))),
            };
            out.push(Token { tok: Tok::Cmp(sense), line: lineno });
            i = j;
        } else if c.is_ascii_digit() || c == '.' {
            let mut j = i;
            while j < chars.len() && (chars[j].is_ascii_digit() || chars[j] == '.') {
                j += 1;
            }
            if j < chars.len() && (chars[j] == 'e' || chars[j] == 'E') {
                let mut k = j + 1;
                if k < chars.len() && (chars[k] == '+' || chars[k] == '-') {
                    k += 1;
                }
                if k < chars.len() && chars[k].is_ascii_digit() {
                    while k < chars.len() && chars[k].is_ascii_digit() {
                        k += 1;
                    }
                    j = k;
                }
            }
            let s: String = chars[i..j].iter().collect();
            let v: f64 = s.parse().map_err(|_| perr(lineno, format!("bad number {s}")))?;
            out.push(Token { tok: Tok::Num(v), line: lineno });
            i = j;
        } else if c.is_alphabetic() || c == '_' {
            let mut j = i;
            while j < chars.len() && !chars[j].is_whitespace() && !matches!(chars[j], ':' | '+' | '-' | '<' | '>' | '=')
            {
                j += 1;
            }
            let s: String = chars[i..j].iter().collect();
            let lower = s.to_ascii_lowercase();
            if lower == "inf" || lower == "infinity" {
                out.push(Token { tok: Tok::Num(f64::INFINITY), line: lineno });
            } else {
                out.push(Token { tok: Tok::Ident(s), line: lineno });
            }
            i = j;
        } else {
            return Err(perr(lineno, format!("unexpected character {c:?}")));
        }
    }
    Ok(())
}

struct Cursor<'a> {
    toks: &'a [Token],
    pos: usize,
    last_line: usize,
}

impl<'a> Cursor<'a> {
    fn peek(&self) -> Option<&'a Tok> {
        self.toks.get(self.pos).map(|t| &t.tok)
    }

    fn peek2(&self) -> Option<&'a Tok> {
        self.toks.get(self.pos + 1).map(|t| &t.tok)
    }

    fn line(&self) -> usize {
        self.toks.get(self.pos).map_or(self.last_line, |t| t.line)
    }

    fn next(&mut self) -> Option<&'a Tok> {
        let t = self.toks.get(self.pos).map(|t| &t.tok);
        self.pos += 1;
        t
    }

    fn at_end(&self) -> bool {
        self.pos >= self.toks.len()
    }

    /// Optional `name:` label.
    fn label(&mut self) -> Option<String> {
        if let (Some(Tok::Ident(name)), Some(Tok::Colon)) = (self.peek(), self.peek2()) {
            self.pos += 2;
            return Some(name.clone());
        }
        None
    }

    /// Signed number (used for right-hand sides and bounds).
    fn signed_number(&mut self) -> Result<f64, LpFormatError> {
        let line = self.line();
        let mut sign = 1.0;
        loop {
            match self.next() {
                Some(Tok::Plus) => {}
                Some(Tok::Minus) => sign = -sign,
                Some(Tok::Num(v)) => return Ok(sign * v),
                other => return Err(perr(line, format!("expected number, found {other:?}"))),
            }
        }
    }

    /// Linear expression; stops before a comparison, a label, or the end.
    fn expression(&mut self) -> Result<Vec<(String, f64)>, LpFormatError> {
        let mut terms = Vec::new();
        loop {
            let line = self.line();
            let mut sign = 1.0;
            let mut saw_sign = false;
            while let Some(t @ (Tok::Plus | Tok::Minus)) = self.peek() {
                if *t == Tok::Minus {
                    sign = -sign;
                }
                saw_sign = true;
                self.pos += 1;
            }
            match (self.peek(), self.peek2()) {
                (Some(Tok::Num(v)), Some(Tok::Ident(name))) => {
                    if !v.is_finite() {
                        return Err(perr(line, "infinite coefficient"));
                    }
                    terms.push((name.clone(), sign * v));
                    self.pos += 2;
                }
                (Some(Tok::Ident(name)), next) if next != Some(&Tok::Colon) => {
                    terms.push((name.clone(), sign));
                    self.pos += 1;
                }
                (Some(Tok::Num(_)), _) => return Err(perr(line, "constant terms are not supported")),
                _ => {
                    if saw_sign {
                        return Err(perr(line, "dangling sign in expression"));
                    }
                    return Ok(terms);
                }
            }
        }
    }
}

struct Builder {
    model: LinearModel,
}

impl Builder {
    fn split(name: &str) -> (String, Vec<String>) {
        match name.split_once("__") {
            Some((g, rest)) => (g.to_string(), vec![rest.to_string()]),
            None => (name.to_string(), Vec::new()),
        }
    }

    fn var(&mut self, name: &str, line: usize) -> Result<VarId, LpFormatError> {
        let (group, index) = Self::split(name);
        if let Some(v) = self.model.find_variable(&group, &index) {
            return Ok(v);
        }
        self.model.add_variable(&group, index, Bounds::NON_NEGATIVE, false).map_err(|e| model_err(line, e))
    }
}

fn model_err(line: usize, e: ModelError) -> LpFormatError {
    perr(line, e.to_string())
}

/// Parses LP text (see [`parse_lp`]).
pub fn parse_lp_str(text: &str) -> Result<LinearModel, LpFormatError> {
    let mut sections: Vec<(Section, Vec<Token>, usize)> = Vec::new();
    let mut current: Option<(Section, Vec<Token>, usize)> = None;
    let mut ended = false;
    let mut last_line = 0;
    for (i, raw) in text.lines().enumerate() {
        let lineno = i + 1;
        last_line = lineno;
        let line = raw.split('\\').next().unwrap_or("");
        if line.trim().is_empty() {
            continue;
        }
        if ended {
            return Err(perr(lineno, "content after End"));
        }
        if let Some(header) = section_header(line) {
            if let Some(done) = current.take() {
                sections.push(done);
            }
            match header {
                Some(s) => current = Some((s, Vec::new(), lineno)),
                None => ended = true,
            }
            continue;
        }
        let lower = line.trim().to_ascii_lowercase();
        if lower.starts_with("maximize") || lower.starts_with("maximise") || lower == "max" {
            return Err(perr(lineno, "only Minimize objectives are supported"));
        }
        match current.as_mut() {
            Some((_, toks, _)) => tokenize(line, lineno, toks)?,
            None => return Err(perr(lineno, "content before the objective section")),
        }
    }
    if let Some(done) = current.take() {
        sections.push(done);
    }
    if !ended {
        return Err(perr(last_line.max(1), "missing End"));
    }
    if sections.first().map(|s| s.0) != Some(Section::Objective) {
        return Err(perr(1, "file must start with Minimize"));
    }

    let mut b = Builder { model: LinearModel::new() };
    let mut unnamed = 0usize;
    for (section, toks, header_line) in &sections {
        let mut cur = Cursor { toks, pos: 0, last_line: *header_line };
        match section {
            Section::Objective => {
                cur.label();
                let line = cur.line();
                for (name, coef) in cur.expression()? {
                    let v = b.var(&name, line)?;
                    b.model.add_objective_term(v, coef).map_err(|e| model_err(line, e))?;
                }
                if !cur.at_end() {
                    return Err(perr(cur.line(), "unexpected tokens in objective"));
                }
            }
            Section::Constraints => {
                while !cur.at_end() {
                    let line = cur.line();
                    let name = cur.label().unwrap_or_else(|| {
                        unnamed += 1;
                        format!("R{unnamed}")
                    });
                    let expr = cur.expression()?;
                    if expr.is_empty() {
                        return Err(perr(line, format!("constraint {name} has no terms")));
                    }
                    let sense = match cur.next() {
                        Some(Tok::Cmp(s)) => *s,
                        other => return Err(perr(cur.line(), format!("expected comparison, found {other:?}"))),
                    };
                    let rhs = cur.signed_number()?;
                    if !rhs.is_finite() {
                        return Err(perr(line, "infinite right-hand side"));
                    }
                    let mut terms = Vec::with_capacity(expr.len());
                    for (vn, coef) in expr {
                        terms.push((b.var(&vn, line)?, coef));
                    }
                    let (group, index) = Builder::split(&name);
                    b.model.add_constraint(&group, index, terms, sense, rhs).map_err(|e| model_err(line, e))?;
                }
            }
            Section::Bounds => {
                while !cur.at_end() {
                    parse_bound(&mut cur, &mut b)?;
                }
            }
            Section::General => {
                while let Some(t) = cur.next() {
                    let line = cur.toks[cur.pos - 1].line;
                    match t {
                        Tok::Ident(name) => {
                            let v = b.var(name, line)?;
                            b.model.set_integer(v, true).map_err(|e| model_err(line, e))?;
                        }
                        other => return Err(perr(line, format!("expected variable name, found {other:?}"))),
                    }
                }
            }
        }
    }
    Ok(b.model)
}

fn parse_bound(cur: &mut Cursor<'_>, b: &mut Builder) -> Result<(), LpFormatError> {
    let line = cur.line();
    match cur.peek() {
        Some(Tok::Ident(name)) => {
            cur.pos += 1;
            let v = b.var(name, line)?;
            let old = b.model.variable(v).bounds;
            let bounds = match cur.next() {
                Some(Tok::Ident(kw)) if kw.eq_ignore_ascii_case("free") => Bounds::FREE,
                Some(Tok::Cmp(Sense::Ge)) => Bounds::new(cur.signed_number()?, old.upper),
                Some(Tok::Cmp(Sense::Le)) => Bounds::new(old.lower, cur.signed_number()?),
                Some(Tok::Cmp(Sense::Eq)) => Bounds::fixed(cur.signed_number()?),
                other => return Err(perr(line, format!("malformed bound, found {other:?}"))),
            };
            b.model.set_bounds(v, bounds).map_err(|e| model_err(line, e))
        }
        Some(_) => {
            let lower = cur.signed_number()?;
            match cur.next() {
                Some(Tok::Cmp(Sense::Le)) => {}
                other => return Err(perr(line, format!("expected <= in bound, found {other:?}"))),
            }
            let name = match cur.next() {
                Some(Tok::Ident(n)) => n.clone(),
                other => return Err(perr(line, format!("expected variable in bound, found {other:?}"))),
            };
            let v = b.var(&name, line)?;
            let upper = if cur.peek() == Some(&Tok::Cmp(Sense::Le)) {
                cur.pos += 1;
                cur.signed_number()?
            } else {
                b.model.variable(v).bounds.upper
            };
            b.model.set_bounds(v, Bounds::new(lower, upper)).map_err(|e| model_err(line, e))
        }
        None => Ok(()),
    }
}
