//! Plain-text model format.
//!
//! ```text
//! ta running
//! clocks x
//! controllable a b ;
//! uncontrollable u
//! secret location l2
//! init l1
//! final lf
//! loc l1
//! loc l2 inv x <= 3
//! loc lf
//! edge l1 -> l2 when x >= 1 sync a
//! edge l2 -> lf sync u do x := 0
//! ```
//!
//! Tokens are whitespace-separated, `#` starts a comment, and `,` / `;` may be
//! glued to neighbouring tokens. An edge without `sync` carries the internal
//! action.

use std::collections::BTreeSet;
use std::fmt;

use itertools::Itertools;
use thiserror::Error;

use crate::model::{
    validate, CmpOp, DiscreteVar, Edge, Expr, Guard, GuardAtom, Location, Origin, Secret,
    TimedAutomaton, Update,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SourceSpan {
    pub line: usize,
    pub column: usize,
}

impl fmt::Display for SourceSpan {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.column)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Diagnostic {
    pub span: SourceSpan,
    pub message: String,
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.span, self.message)
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ParseError {
    #[error("syntax error at {0}")]
    Syntax(Diagnostic),
    #[error("invalid model: {}", .0.iter().join("; "))]
    Invalid(Vec<Diagnostic>),
}

impl ParseError {
    pub fn diagnostics(&self) -> Vec<&Diagnostic> {
        match self {
            ParseError::Syntax(d) => vec![d],
            ParseError::Invalid(ds) => ds.iter().collect(),
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("cannot render an invalid model: {}", .0.iter().join("; "))]
pub struct RenderError(pub Vec<String>);

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Word(String),
    Newline,
    Eof,
}

#[derive(Debug, Clone)]
struct Token {
    tok: Tok,
    span: SourceSpan,
}

fn tokenize(text: &str) -> Vec<Token> {
    let mut out = Vec::new();
    let mut line_no = 0;
    for (idx, line) in text.lines().enumerate() {
        line_no = idx + 1;
        let line = line.split('#').next().unwrap_or("");
        let mut chars = line.char_indices().peekable();
        let mut any = false;
        while let Some(&(start, c)) = chars.peek() {
            if c.is_whitespace() {
                chars.next();
                continue;
            }
            let span = SourceSpan {
                line: line_no,
                column: line[..start].chars().count() + 1,
            };
            if c == ',' || c == ';' {
                chars.next();
                out.push(Token { tok: Tok::Word(c.to_string()), span });
                any = true;
                continue;
            }
            let mut word = String::new();
            while let Some(&(_, c)) = chars.peek() {
                if c.is_whitespace() || c == ',' || c == ';' {
                    break;
                }
                word.push(c);
                chars.next();
            }
            out.push(Token { tok: Tok::Word(word), span });
            any = true;
        }
        if any {
            out.push(Token {
                tok: Tok::Newline,
                span: SourceSpan {
                    line: line_no,
                    column: line.chars().count() + 1,
                },
            });
        }
    }
    out.push(Token {
        tok: Tok::Eof,
        span: SourceSpan {
            line: line_no + 1,
            column: 1,
        },
    });
    out
}

const KEYWORDS: &[&str] = &[
    "ta", "clocks", "discrete", "controllable", "uncontrollable", "secret", "init", "final",
    "loc", "edge", "inv", "when", "sync", "do", "->", "&", ":=", ";", ",",
];

struct Parser {
    toks: Vec<Token>,
    pos: usize,
}

type PResult<T> = Result<T, Diagnostic>;

impl Parser {
    fn peek(&self) -> &Token {
        &self.toks[self.pos]
    }

    fn peek_word(&self) -> Option<&str> {
        match &self.peek().tok {
            Tok::Word(w) => Some(w),
            _ => None,
        }
    }

    fn err<T>(&self, message: impl Into<String>) -> PResult<T> {
        Err(Diagnostic {
            span: self.peek().span,
            message: message.into(),
        })
    }

    fn bump(&mut self) -> Token {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn skip_newlines(&mut self) {
        while self.peek().tok == Tok::Newline {
            self.bump();
        }
    }

    fn at(&self, kw: &str) -> bool {
        self.peek_word() == Some(kw)
    }

    fn eat(&mut self, kw: &str) -> bool {
        if self.at(kw) {
            self.bump();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, kw: &str, what: &str) -> PResult<SourceSpan> {
        if self.at(kw) {
            Ok(self.bump().span)
        } else {
            self.err(format!("expected {what}"))
        }
    }

    fn end_of_statement(&mut self) -> PResult<()> {
        match self.peek().tok {
            Tok::Newline => {
                self.bump();
                Ok(())
            }
            Tok::Eof => Ok(()),
            Tok::Word(ref w) => {
                let w = w.clone();
                self.err(format!("unexpected token {w}"))
            }
        }
    }

    fn name(&mut self, what: &str) -> PResult<String> {
        match self.peek_word() {
            Some(w) if !KEYWORDS.contains(&w) && is_name(w) => {
                let w = w.to_string();
                self.bump();
                Ok(w)
            }
            Some(w) => {
                let w = w.to_string();
                self.err(format!("expected {what}, found {w}"))
            }
            None => self.err(format!("expected {what}")),
        }
    }

    fn int(&mut self) -> PResult<i64> {
        match self.peek_word().map(|w| w.parse::<i64>()) {
            Some(Ok(v)) => {
                self.bump();
                Ok(v)
            }
            Some(Err(_)) => {
                let w = self.peek_word().unwrap_or_default().to_string();
                self.err(format!("expected integer, found {w}"))
            }
            None => self.err("expected integer"),
        }
    }

    fn names_until_line_end(&mut self, stop: Option<&str>) -> PResult<Vec<String>> {
        let mut out = Vec::new();
        loop {
            if matches!(self.peek().tok, Tok::Newline | Tok::Eof) {
                return Ok(out);
            }
            if stop.is_some_and(|s| self.at(s)) {
                return Ok(out);
            }
            out.push(self.name("name")?);
        }
    }

    fn guard(&mut self) -> PResult<Guard> {
        let mut atoms = vec![self.atom()?];
        while self.eat("&") {
            atoms.push(self.atom()?);
        }
        Ok(Guard::new(atoms))
    }

    fn atom(&mut self) -> PResult<GuardAtom> {
        let subject = self.name("clock or variable")?;
        let op = match self.peek_word().and_then(CmpOp::from_symbol) {
            Some(op) => {
                self.bump();
                op
            }
            None => return self.err("expected comparison operator"),
        };
        let constant = self.int()?;
        Ok(GuardAtom { subject, op, constant })
    }

    fn update(&mut self, clocks: &[String]) -> PResult<Update> {
        let target = self.name("clock or variable")?;
        self.expect(":=", "':='")?;
        if clocks.contains(&target) {
            let span = self.peek().span;
            let v = self.int()?;
            if v != 0 {
                return Err(Diagnostic {
                    span,
                    message: format!("clock {target} can only be reset to 0"),
                });
            }
            return Ok(Update::ClockReset(target));
        }
        if let Some(Ok(k)) = self.peek_word().map(|w| w.parse::<i64>()) {
            self.bump();
            return Ok(Update::DiscreteAssign {
                var: target,
                expr: Expr::Const(k),
            });
        }
        let src = self.name("integer or variable")?;
        let sign = if self.eat("+") {
            1
        } else if self.eat("-") {
            -1
        } else {
            return self.err("expected '+' or '-'");
        };
        let k = self.int()?;
        Ok(Update::DiscreteAssign {
            var: target,
            expr: Expr::Offset {
                var: src,
                delta: sign * k,
            },
        })
    }
}

fn is_name(w: &str) -> bool {
    let mut chars = w.chars();
    matches!(chars.next(), Some(c) if c.is_alphabetic() || c == '_')
        && chars.all(|c| c.is_alphanumeric() || c == '_' || c == '\'' || c == '.')
}

struct Spans {
    header: SourceSpan,
    clocks: SourceSpan,
    discretes: Vec<SourceSpan>,
    actions: SourceSpan,
    secret: SourceSpan,
    init: SourceSpan,
    final_: SourceSpan,
    locations: Vec<SourceSpan>,
    edges: Vec<SourceSpan>,
}

impl Spans {
    fn of(&self, origin: Origin) -> SourceSpan {
        match origin {
            Origin::Header => self.header,
            Origin::Clocks => self.clocks,
            Origin::Discrete(i) => self.discretes[i],
            Origin::Actions => self.actions,
            Origin::Secret => self.secret,
            Origin::Init => self.init,
            Origin::Final => self.final_,
            Origin::Location(i) => self.locations[i],
            Origin::Edge(i) => self.edges[i],
        }
    }
}

fn parse_raw(text: &str) -> PResult<(TimedAutomaton, Spans)> {
    let mut p = Parser {
        toks: tokenize(text),
        pos: 0,
    };
    p.skip_newlines();
    let header = p.expect("ta", "'ta' header")?;
    let name = p.name("model name")?;
    p.end_of_statement()?;
    p.skip_newlines();

    let clocks_span = p.expect("clocks", "clocks section")?;
    let clocks = p.names_until_line_end(None)?;
    p.end_of_statement()?;
    p.skip_newlines();

    let mut discretes = Vec::new();
    let mut discrete_spans = Vec::new();
    while p.at("discrete") {
        discrete_spans.push(p.bump().span);
        let name = p.name("variable name")?;
        p.expect(":", "':'")?;
        let lo = p.int()?;
        p.expect("..", "'..'")?;
        let hi = p.int()?;
        p.expect("=", "'='")?;
        let initial = p.int()?;
        p.end_of_statement()?;
        p.skip_newlines();
        discretes.push(DiscreteVar { name, lo, hi, initial });
    }

    if !p.at("controllable") {
        return p.err("expected actions section");
    }
    let actions_span = p.bump().span;
    let controllable = p.names_until_line_end(Some(";"))?;
    p.expect(";", "';' after controllable actions")?;
    p.skip_newlines();
    p.expect("uncontrollable", "uncontrollable actions")?;
    let uncontrollable = p.names_until_line_end(None)?;
    p.end_of_statement()?;
    p.skip_newlines();

    let secret_span = p.expect("secret", "secret declaration")?;
    let secret = if p.eat("location") {
        Secret::Location(p.name("location name")?)
    } else if p.eat("action") {
        Secret::Action(p.name("action name")?)
    } else {
        return p.err("expected 'location' or 'action'");
    };
    p.end_of_statement()?;
    p.skip_newlines();

    let init_span = p.expect("init", "init declaration")?;
    let init = p.name("location name")?;
    p.end_of_statement()?;
    p.skip_newlines();
    let final_span = p.expect("final", "final declaration")?;
    let final_location = p.name("location name")?;
    p.end_of_statement()?;
    p.skip_newlines();

    let mut locations = Vec::new();
    let mut location_spans = Vec::new();
    while p.at("loc") {
        location_spans.push(p.bump().span);
        let name = p.name("location name")?;
        let invariant = if p.eat("inv") { p.guard()? } else { Guard::default() };
        p.end_of_statement()?;
        p.skip_newlines();
        locations.push(Location { name, invariant });
    }
    if locations.is_empty() {
        return p.err("expected at least one location");
    }

    let mut edges = Vec::new();
    let mut edge_spans = Vec::new();
    while p.at("edge") {
        edge_spans.push(p.bump().span);
        let source = p.name("source location")?;
        p.expect("->", "'->'")?;
        let target = p.name("target location")?;
        let guard = if p.eat("when") { p.guard()? } else { Guard::default() };
        let action = if p.eat("sync") { Some(p.name("action name")?) } else { None };
        let mut updates = Vec::new();
        if p.eat("do") {
            updates.push(p.update(&clocks)?);
            while p.eat(",") {
                updates.push(p.update(&clocks)?);
            }
        }
        p.end_of_statement()?;
        p.skip_newlines();
        edges.push(Edge {
            source,
            guard,
            action,
            updates,
            target,
        });
    }
    if p.peek().tok != Tok::Eof {
        let w = p.peek_word().unwrap_or_default().to_string();
        return p.err(format!("unexpected token {w}"));
    }

    let ta = TimedAutomaton {
        name,
        clocks,
        discretes,
        controllable: controllable.into_iter().collect::<BTreeSet<_>>(),
        uncontrollable: uncontrollable.into_iter().collect::<BTreeSet<_>>(),
        secret,
        init,
        final_location,
        locations,
        edges,
    };
    let spans = Spans {
        header,
        clocks: clocks_span,
        discretes: discrete_spans,
        actions: actions_span,
        secret: secret_span,
        init: init_span,
        final_: final_span,
        locations: location_spans,
        edges: edge_spans,
    };
    Ok((ta, spans))
}

/// Parses and validates a model.
pub fn parse_model(text: &str) -> Result<TimedAutomaton, ParseError> {
    let (ta, spans) = parse_raw(text).map_err(ParseError::Syntax)?;
    let violations = validate(&ta);
    if !violations.is_empty() {
        return Err(ParseError::Invalid(
            violations
                .into_iter()
                .map(|v| Diagnostic {
                    span: spans.of(v.origin),
                    message: v.message,
                })
                .collect(),
        ));
    }
    Ok(ta)
}

/// Renders a valid model in the text format; `parse_model` inverts it.
pub fn render_model(ta: &TimedAutomaton) -> Result<String, RenderError> {
    let violations = validate(ta);
    if !violations.is_empty() {
        return Err(RenderError(violations.into_iter().map(|v| v.message).collect()));
    }
    let mut out = String::new();
    let mut line = |s: String| {
        out.push_str(s.trim_end());
        out.push('\n');
    };
    line(format!("ta {}", ta.name));
    line(format!("clocks {}", ta.clocks.join(" ")));
    for d in &ta.discretes {
        line(format!("discrete {} : {} .. {} = {}", d.name, d.lo, d.hi, d.initial));
    }
    if ta.controllable.is_empty() {
        line("controllable ;".to_string());
    } else {
        line(format!("controllable {} ;", ta.controllable.iter().join(" ")));
    }
    line(format!("uncontrollable {}", ta.uncontrollable.iter().join(" ")));
    line(match &ta.secret {
        Secret::Location(l) => format!("secret location {l}"),
        Secret::Action(a) => format!("secret action {a}"),
    });
    line(format!("init {}", ta.init));
    line(format!("final {}", ta.final_location));
    for l in &ta.locations {
        if l.invariant.is_true() {
            line(format!("loc {}", l.name));
        } else {
            line(format!("loc {} inv {}", l.name, l.invariant));
        }
    }
    for e in &ta.edges {
        let mut s = format!("edge {} -> {}", e.source, e.target);
        if !e.guard.is_true() {
            s += &format!(" when {}", e.guard);
        }
        if let Some(a) = &e.action {
            s += &format!(" sync {a}");
        }
        if !e.updates.is_empty() {
            s += &format!(" do {}", e.updates.iter().join(", "));
        }
        line(s);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bundled;

    #[test]
    fn bundled_running_example() {
        let ta = parse_model(bundled::RUNNING_TA).unwrap();
        assert_eq!(ta.locations.len(), 5);
        assert_eq!(ta.clocks.len(), 1);
        assert_eq!(ta.actions().len(), 7);
        assert_eq!(ta.controllable.len(), 6);
        assert_eq!(ta.edges.len(), 11);
    }

    #[test]
    fn missing_sections() {
        let err = parse_model("ta t\nclocks x\n").unwrap_err();
        match err {
            ParseError::Syntax(d) => {
                assert_eq!(d.message, "expected actions section");
                assert_eq!(d.span, SourceSpan { line: 3, column: 1 });
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn undeclared_target_location() {
        let text = bundled::RUNNING_TA.to_string() + "edge l1 -> l9 sync a\n";
        let err = parse_model(&text).unwrap_err();
        let ParseError::Invalid(ds) = err else { panic!() };
        assert_eq!(ds.len(), 1);
        assert_eq!(ds[0].message, "unknown location l9");
        let last_line = text.lines().count();
        assert_eq!(ds[0].span, SourceSpan { line: last_line, column: 1 });
    }

    #[test]
    fn syntax_errors_carry_positions() {
        let err = parse_model("ta t\nclocks x\ncontrollable a ;\nuncontrollable u\nsecret location l\ninit l\nfinal f\nloc l inv x <== 3\n")
            .unwrap_err();
        let ParseError::Syntax(d) = err else { panic!() };
        assert_eq!(d.span, SourceSpan { line: 8, column: 13 });
        assert_eq!(d.message, "expected comparison operator");
    }

    #[test]
    fn clock_assignment_must_be_zero() {
        let text = bundled::RUNNING_TA.to_string() + "edge l1 -> l3 do x := 2\n";
        let ParseError::Syntax(d) = parse_model(&text).unwrap_err() else { panic!() };
        assert_eq!(d.message, "clock x can only be reset to 0");
    }

    #[test]
    fn round_trips() {
        for ta in [bundled::running(), bundled::atm(), bundled::running_uaf()] {
            let text = render_model(&ta).unwrap();
            assert_eq!(parse_model(&text).unwrap(), ta);
        }
        let atm = parse_model(&render_model(&bundled::atm()).unwrap()).unwrap();
        assert_eq!(atm.locations.len(), 14);
        assert_eq!(atm.discretes.len(), 2);
    }

    #[test]
    fn empty_controllable_set() {
        let mut ta = bundled::running();
        ta.controllable.clear();
        ta.edges.retain(|e| e.action.as_deref() == Some("u"));
        let text = render_model(&ta).unwrap();
        assert!(text.contains("controllable ;"));
        assert_eq!(parse_model(&text).unwrap(), ta);
    }

    #[test]
    fn glued_punctuation_and_comments() {
        let text = "# header\nta t # name\nclocks x y\ndiscrete n : 0 .. 3 = 0\ncontrollable a;\nuncontrollable u\nsecret action a\ninit p\nfinal q\nloc p\nloc q\nedge p -> q when n < 3 sync a do x := 0,y := 0, n := n + 1\n";
        let ta = parse_model(text).unwrap();
        assert_eq!(ta.edges[0].updates.len(), 3);
        assert_eq!(
            ta.edges[0].updates[2],
            Update::DiscreteAssign { var: "n".into(), expr: Expr::Offset { var: "n".into(), delta: 1 } }
        );
    }

    #[test]
    fn render_rejects_invalid() {
        let mut ta = bundled::running();
        ta.init = "nowhere".into();
        assert!(render_model(&ta).is_err());
    }
}
