//! Hand-rolled lexer and recursive-descent parsers for the two surface
//! languages: `.flp` functional programs and `.fasp` many-sorted programs.
//!
//! Lexical conventions (fixed here, the formalism leaves them open):
//! variables start with an uppercase letter, everything else is a lowercase
//! or numeric symbol name, `%` starts a line comment, identifiers are ASCII.

use std::fmt;

use crate::ast::{
    is_reserved_name, Atom, FlpProgram, FlpRule, Head, Literal, Signature, Span, Term,
};
use crate::faspc::{FaspAtom, FaspLiteral, FaspProgram, FaspRule};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Severity {
    Error,
}

impl fmt::Display for Severity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Severity::Error => write!(f, "error"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Diagnostic {
    pub file: String,
    pub span: Span,
    pub severity: Severity,
    pub message: String,
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}: {}: {}", self.file, self.span, self.severity, self.message)
    }
}

// ---------------------------------------------------------------------------
// Lexer
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Name(String),
    Var(String),
    Directive(String),
    Dot,
    Comma,
    LParen,
    RParen,
    LBrace,
    RBrace,
    Pipe,
    If,     // :-
    Assign, // :=
    Colon,
    Eq,
    Neq,
    Hash,
    Arrow, // ->
    Eof,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Name(s) => write!(f, "'{s}'"),
            Tok::Var(s) => write!(f, "'{s}'"),
            Tok::Directive(s) => write!(f, "'#{s}'"),
            Tok::Dot => write!(f, "'.'"),
            Tok::Comma => write!(f, "','"),
            Tok::LParen => write!(f, "'('"),
            Tok::RParen => write!(f, "')'"),
            Tok::LBrace => write!(f, "'{{'"),
            Tok::RBrace => write!(f, "'}}'"),
            Tok::Pipe => write!(f, "'|'"),
            Tok::If => write!(f, "':-'"),
            Tok::Assign => write!(f, "':='"),
            Tok::Colon => write!(f, "':'"),
            Tok::Eq => write!(f, "'='"),
            Tok::Neq => write!(f, "'!='"),
            Tok::Hash => write!(f, "'#'"),
            Tok::Arrow => write!(f, "'->'"),
            Tok::Eof => write!(f, "end of input"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Mode {
    Flp,
    Fasp,
}

struct Lexer<'a> {
    src: &'a [u8],
    pos: usize,
    line: u32,
    col: u32,
    mode: Mode,
}

impl<'a> Lexer<'a> {
    fn new(src: &'a str, mode: Mode) -> Self {
        Lexer { src: src.as_bytes(), pos: 0, line: 1, col: 1, mode }
    }

    fn bump(&mut self) -> u8 {
        let c = self.src[self.pos];
        self.pos += 1;
        if c == b'\n' {
            self.line += 1;
            self.col = 1;
        } else {
            self.col += 1;
        }
        c
    }

    fn peek(&self) -> Option<u8> {
        self.src.get(self.pos).copied()
    }

    fn skip_trivia(&mut self) {
        loop {
            match self.peek() {
                Some(c) if c.is_ascii_whitespace() => {
                    self.bump();
                }
                Some(b'%') => {
                    while let Some(c) = self.peek() {
                        self.bump();
                        if c == b'\n' {
                            break;
                        }
                    }
                }
                _ => break,
            }
        }
    }

    fn ident(&mut self) -> String {
        let start = self.pos;
        while let Some(c) = self.peek() {
            if c.is_ascii_alphanumeric() || c == b'_' {
                self.bump();
            } else {
                break;
            }
        }
        String::from_utf8_lossy(&self.src[start..self.pos]).into_owned()
    }

    fn tokens(mut self) -> Result<Vec<(Tok, Span)>, (Span, String)> {
        let mut out = Vec::new();
        loop {
            self.skip_trivia();
            let span = Span { line: self.line, col: self.col };
            let Some(c) = self.peek() else {
                out.push((Tok::Eof, span));
                return Ok(out);
            };
            let tok = match c {
                b'a'..=b'z' | b'0'..=b'9' => Tok::Name(self.ident()),
                b'A'..=b'Z' => Tok::Var(self.ident()),
                b'_' => return Err((span, "identifiers may not start with '_'".into())),
                b'.' => {
                    self.bump();
                    Tok::Dot
                }
                b',' => {
                    self.bump();
                    Tok::Comma
                }
                b'(' => {
                    self.bump();
                    Tok::LParen
                }
                b')' => {
                    self.bump();
                    Tok::RParen
                }
                b'{' => {
                    self.bump();
                    Tok::LBrace
                }
                b'}' => {
                    self.bump();
                    Tok::RBrace
                }
                b'|' => {
                    self.bump();
                    Tok::Pipe
                }
                b':' => {
                    self.bump();
                    match self.peek() {
                        Some(b'-') => {
                            self.bump();
                            Tok::If
                        }
                        Some(b'=') => {
                            self.bump();
                            Tok::Assign
                        }
                        _ => Tok::Colon,
                    }
                }
                b'=' => {
                    self.bump();
                    Tok::Eq
                }
                b'!' => {
                    self.bump();
                    if self.peek() == Some(b'=') {
                        self.bump();
                        Tok::Neq
                    } else {
                        return Err((span, "expected '=' after '!'".into()));
                    }
                }
                b'-' => {
                    self.bump();
                    if self.peek() == Some(b'>') {
                        self.bump();
                        Tok::Arrow
                    } else {
                        return Err((span, "unexpected '-'".into()));
                    }
                }
                b'#' => {
                    self.bump();
                    let directive = match self.mode {
                        // in functional programs '#' doubles as the apartness
                        // operator; only the one known directive word binds
                        Mode::Flp => {
                            self.src[self.pos..].starts_with(b"evaluable")
                        }
                        Mode::Fasp => matches!(self.peek(), Some(c) if c.is_ascii_lowercase()),
                    };
                    if directive {
                        Tok::Directive(self.ident())
                    } else {
                        Tok::Hash
                    }
                }
                other => {
                    return Err((span, format!("unexpected character '{}'", other as char)));
                }
            };
            out.push((tok, span));
        }
    }
}

// ---------------------------------------------------------------------------
// Token cursor shared by both parsers
// ---------------------------------------------------------------------------

struct Cursor {
    toks: Vec<(Tok, Span)>,
    pos: usize,
    file: String,
    diags: Vec<Diagnostic>,
}

struct ParseAbort;

type PResult<T> = Result<T, ParseAbort>;

impl Cursor {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].0
    }

    fn peek2(&self) -> &Tok {
        let i = (self.pos + 1).min(self.toks.len() - 1);
        &self.toks[i].0
    }

    fn span(&self) -> Span {
        self.toks[self.pos].1
    }

    fn bump(&mut self) -> (Tok, Span) {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn error_at(&mut self, span: Span, message: impl Into<String>) {
        self.diags.push(Diagnostic {
            file: self.file.clone(),
            span,
            severity: Severity::Error,
            message: message.into(),
        });
    }

    fn fail<T>(&mut self, message: impl Into<String>) -> PResult<T> {
        let span = self.span();
        self.error_at(span, message);
        Err(ParseAbort)
    }

    fn expect(&mut self, tok: Tok) -> PResult<Span> {
        if *self.peek() == tok {
            Ok(self.bump().1)
        } else {
            let found = self.peek().clone();
            self.fail(format!("expected {tok}, found {found}"))
        }
    }

    /// Skip to just past the next '.' so parsing can resume at the next rule.
    fn recover(&mut self) {
        loop {
            match self.peek() {
                Tok::Dot => {
                    self.bump();
                    return;
                }
                Tok::Eof => return,
                _ => {
                    self.bump();
                }
            }
        }
    }

    fn at_eof(&self) -> bool {
        matches!(self.peek(), Tok::Eof)
    }
}

// ---------------------------------------------------------------------------
// FLP parser
// ---------------------------------------------------------------------------

struct FlpParser {
    c: Cursor,
    evaluable_consts: Vec<String>,
    sig: Signature,
}

impl FlpParser {
    fn check_name(&mut self, name: &str, span: Span) {
        if is_reserved_name(name) {
            self.c.error_at(span, format!("'{name}' uses a reserved name prefix"));
        }
    }

    fn parse_term(&mut self) -> PResult<Term> {
        let span = self.c.span();
        match self.c.bump().0 {
            Tok::Var(v) => {
                self.check_name(&v, span);
                Ok(Term::Var(v))
            }
            Tok::Name(n) => {
                self.check_name(&n, span);
                if *self.c.peek() == Tok::LParen {
                    self.c.bump();
                    let mut args = vec![self.parse_term()?];
                    while *self.c.peek() == Tok::Comma {
                        self.c.bump();
                        args.push(self.parse_term()?);
                    }
                    self.c.expect(Tok::RParen)?;
                    Ok(Term::App(n, args))
                } else if self.evaluable_consts.contains(&n) {
                    Ok(Term::App(n, Vec::new()))
                } else {
                    Ok(Term::Const(n))
                }
            }
            other => {
                self.c.error_at(span, format!("expected a term, found {other}"));
                Err(ParseAbort)
            }
        }
    }

    /// Terms standing alone in atom position become predicate atoms.
    fn term_to_pred(&mut self, t: Term, span: Span) -> PResult<Atom> {
        match t {
            Term::Const(name) => Ok(Atom::Pred(name, Vec::new())),
            Term::App(name, args) => Ok(Atom::Pred(name, args)),
            Term::Var(_) => {
                self.c.error_at(span, "a variable cannot stand alone as an atom".to_string());
                Err(ParseAbort)
            }
        }
    }

    fn parse_atom(&mut self) -> PResult<Literal> {
        let span = self.c.span();
        let left = self.parse_term()?;
        match self.c.peek() {
            Tok::Eq => {
                self.c.bump();
                let right = self.parse_term()?;
                Ok(Literal::pos(Atom::Eq(left, right)))
            }
            Tok::Neq => {
                self.c.bump();
                let right = self.parse_term()?;
                Ok(Literal::neg(Atom::Eq(left, right)))
            }
            Tok::Hash => {
                self.c.bump();
                let right = self.parse_term()?;
                Ok(Literal::pos(Atom::Apart(left, right)))
            }
            _ => {
                if self.evaluable_atom(&left) {
                    self.c.error_at(span, format!("evaluable term '{left}' cannot stand as an atom"));
                    return Err(ParseAbort);
                }
                Ok(Literal::pos(self.term_to_pred(left, span)?))
            }
        }
    }

    fn evaluable_atom(&mut self, t: &Term) -> bool {
        matches!(t, Term::App(_, args) if args.is_empty())
    }

    fn parse_literal(&mut self) -> PResult<Literal> {
        if matches!(self.c.peek(), Tok::Name(n) if n == "not") {
            self.c.bump();
            if *self.c.peek() == Tok::LParen {
                // allow parenthesised atoms under negation: not (a # b)
                self.c.bump();
                let lit = self.parse_atom()?;
                self.c.expect(Tok::RParen)?;
                return Ok(Literal { atom: lit.atom, negated: !lit.negated });
            }
            let lit = self.parse_atom()?;
            Ok(Literal { atom: lit.atom, negated: !lit.negated })
        } else {
            self.parse_atom()
        }
    }

    fn parse_body(&mut self) -> PResult<Vec<Literal>> {
        let mut out = vec![self.parse_literal()?];
        while *self.c.peek() == Tok::Comma {
            self.c.bump();
            out.push(self.parse_literal()?);
        }
        Ok(out)
    }

    fn head_func(&mut self, t: Term, span: Span) -> PResult<(String, Vec<Term>)> {
        match t {
            Term::App(name, args) => Ok((name, args)),
            Term::Const(name) => {
                self.c.error_at(
                    span,
                    format!("'{name}' heads an assignment or choice but is not evaluable (declare it with #evaluable)"),
                );
                Err(ParseAbort)
            }
            Term::Var(_) => {
                self.c.error_at(span, "a variable cannot head an assignment or choice".to_string());
                Err(ParseAbort)
            }
        }
    }

    fn parse_rule(&mut self) -> PResult<FlpRule> {
        let span = self.c.span();
        if *self.c.peek() == Tok::If {
            self.c.bump();
            let body = self.parse_body()?;
            self.c.expect(Tok::Dot)?;
            let mut rule = FlpRule::new(Head::Falsum, body);
            rule.span = Some(span);
            return Ok(rule);
        }
        let left = self.parse_term()?;
        let head = match self.c.peek() {
            Tok::Assign => {
                self.c.bump();
                let (func, args) = self.head_func(left, span)?;
                let value = self.parse_term()?;
                Head::Assign { func, args, value }
            }
            Tok::Name(n) if n == "in" => {
                self.c.bump();
                let (func, args) = self.head_func(left, span)?;
                self.c.expect(Tok::LBrace)?;
                if matches!(self.c.peek(), Tok::Var(_)) && *self.c.peek2() == Tok::Pipe {
                    let Tok::Var(var) = self.c.bump().0 else { unreachable!() };
                    self.check_name(&var, span);
                    self.c.expect(Tok::Pipe)?;
                    let cond = self.parse_body()?;
                    self.c.expect(Tok::RBrace)?;
                    Head::Choice { func, args, var, cond }
                } else {
                    let mut values = vec![self.parse_term()?];
                    while *self.c.peek() == Tok::Comma {
                        self.c.bump();
                        values.push(self.parse_term()?);
                    }
                    self.c.expect(Tok::RBrace)?;
                    Head::ChoiceEnum { func, args, values }
                }
            }
            _ => {
                if self.evaluable_atom(&left) {
                    self.c.error_at(span, format!("evaluable term '{left}' cannot stand as an atom"));
                    return Err(ParseAbort);
                }
                let Atom::Pred(name, args) = self.term_to_pred(left, span)? else { unreachable!() };
                Head::Pred(name, args)
            }
        };
        let body = if *self.c.peek() == Tok::If {
            self.c.bump();
            self.parse_body()?
        } else {
            Vec::new()
        };
        self.c.expect(Tok::Dot)?;
        let mut rule = FlpRule::new(head, body);
        rule.span = Some(span);
        Ok(rule)
    }

    // Symbol roles are read off the finished rule: applied symbols and
    // assignment/choice subjects are evaluable, atom symbols are predicates,
    // remaining bare names are Herbrand constants. Conflicts are rejected.

    fn reg(&mut self, r: Result<(), crate::ast::SignatureError>, span: Span) {
        if let Err(e) = r {
            self.c.error_at(span, e.to_string());
        }
    }

    fn register_term(&mut self, t: &Term, span: Span) {
        match t {
            Term::Var(_) => {}
            Term::Const(c) => {
                let r = self.sig.add_constructor(c);
                self.reg(r, span);
            }
            Term::App(f, args) => {
                let r = self.sig.add_evaluable(f, args.len());
                self.reg(r, span);
                for a in args {
                    self.register_term(a, span);
                }
            }
        }
    }

    fn register_atom(&mut self, a: &Atom, span: Span) {
        match a {
            Atom::Pred(p, args) => {
                let r = self.sig.add_predicate(p, args.len());
                self.reg(r, span);
                for t in args {
                    self.register_term(t, span);
                }
            }
            Atom::Eq(l, r) | Atom::Apart(l, r) => {
                self.register_term(l, span);
                self.register_term(r, span);
            }
        }
    }

    fn register_rule(&mut self, rule: &FlpRule) {
        let span = rule.span.unwrap_or_default();
        match &rule.head {
            Head::Pred(p, args) => {
                let r = self.sig.add_predicate(p, args.len());
                self.reg(r, span);
                for t in args {
                    self.register_term(t, span);
                }
            }
            Head::Falsum => {}
            Head::Assign { func, args, value } => {
                let r = self.sig.add_evaluable(func, args.len());
                self.reg(r, span);
                for t in args {
                    self.register_term(t, span);
                }
                self.register_term(value, span);
            }
            Head::Choice { func, args, cond, .. } => {
                let r = self.sig.add_evaluable(func, args.len());
                self.reg(r, span);
                for t in args {
                    self.register_term(t, span);
                }
                for lit in cond {
                    self.register_atom(&lit.atom, span);
                }
            }
            Head::ChoiceEnum { func, args, values } => {
                let r = self.sig.add_evaluable(func, args.len());
                self.reg(r, span);
                for t in args.iter().chain(values) {
                    self.register_term(t, span);
                }
            }
        }
        for lit in &rule.body {
            self.register_atom(&lit.atom, span);
        }
    }
}

/// Rename the choice variable when it also occurs outside the condition.
fn uncapture_choice(rule: &mut FlpRule) {
    let Head::Choice { args, var, cond, .. } = &rule.head else { return };
    let mut outside = std::collections::BTreeSet::new();
    for lit in &rule.body {
        lit.vars_into(&mut outside);
    }
    for a in args {
        a.vars_into(&mut outside);
    }
    if !outside.contains(var) {
        return;
    }
    let mut all = outside.clone();
    for lit in cond {
        lit.vars_into(&mut all);
    }
    let mut n = 1;
    let fresh = loop {
        let candidate = format!("{var}{n}");
        if !all.contains(&candidate) {
            break candidate;
        }
        n += 1;
    };
    let Head::Choice { var, cond, .. } = &mut rule.head else { unreachable!() };
    let old = std::mem::replace(var, fresh.clone());
    for lit in cond.iter_mut() {
        *lit = lit.subst(&old, &Term::Var(fresh.clone()));
    }
}

/// Parse an FLP source file into a program, or a list of diagnostics.
pub fn parse_flp(text: &str, file: &str) -> Result<FlpProgram, Vec<Diagnostic>> {
    let toks = match Lexer::new(text, Mode::Flp).tokens() {
        Ok(t) => t,
        Err((span, message)) => {
            return Err(vec![Diagnostic { file: file.into(), span, severity: Severity::Error, message }])
        }
    };
    // collect #evaluable declarations up front so they apply program-wide
    let mut evaluable_consts = Vec::new();
    let mut i = 0;
    let mut pre_diags = Vec::new();
    while i < toks.len() {
        if let Tok::Directive(d) = &toks[i].0 {
            if d == "evaluable" {
                match toks.get(i + 1) {
                    Some((Tok::Name(n), _)) if matches!(toks.get(i + 2), Some((Tok::Dot, _))) => {
                        evaluable_consts.push(n.clone());
                    }
                    _ => pre_diags.push(Diagnostic {
                        file: file.into(),
                        span: toks[i].1,
                        severity: Severity::Error,
                        message: "expected '#evaluable name.'".into(),
                    }),
                }
            } else {
                pre_diags.push(Diagnostic {
                    file: file.into(),
                    span: toks[i].1,
                    severity: Severity::Error,
                    message: format!("unknown directive '#{d}'"),
                });
            }
        }
        i += 1;
    }
    if !pre_diags.is_empty() {
        return Err(pre_diags);
    }

    let mut sig = Signature::new();
    for name in &evaluable_consts {
        if is_reserved_name(name) {
            return Err(vec![Diagnostic {
                file: file.into(),
                span: Span { line: 1, col: 1 },
                severity: Severity::Error,
                message: format!("'{name}' uses a reserved name prefix"),
            }]);
        }
        let _ = sig.add_evaluable(name, 0);
    }
    let mut p = FlpParser {
        c: Cursor { toks, pos: 0, file: file.into(), diags: Vec::new() },
        evaluable_consts,
        sig,
    };
    let mut rules = Vec::new();
    while !p.c.at_eof() {
        if matches!(p.c.peek(), Tok::Directive(_)) {
            p.c.recover();
            continue;
        }
        match p.parse_rule() {
            Ok(mut rule) => {
                uncapture_choice(&mut rule);
                p.register_rule(&rule);
                rules.push(rule);
            }
            Err(ParseAbort) => p.c.recover(),
        }
    }
    if let Err(e) = p.sig.validate() {
        p.c.error_at(Span { line: 1, col: 1 }, e.to_string());
    }
    if p.c.diags.is_empty() {
        Ok(FlpProgram { signature: p.sig, rules })
    } else {
        Err(p.c.diags)
    }
}

// ---------------------------------------------------------------------------
// FASP parser
// ---------------------------------------------------------------------------

struct FaspParser {
    c: Cursor,
    prog: FaspProgram,
}

impl FaspParser {
    fn parse_name(&mut self) -> PResult<String> {
        match self.c.peek().clone() {
            Tok::Name(n) => {
                self.c.bump();
                Ok(n)
            }
            other => self.c.fail(format!("expected a name, found {other}")),
        }
    }

    fn parse_directive(&mut self, d: String, span: Span) -> PResult<()> {
        match d.as_str() {
            "type" => {
                let name = self.parse_name()?;
                if name == "bool" {
                    self.c.error_at(span, "type 'bool' is reserved".to_string());
                }
                self.c.expect(Tok::Eq)?;
                self.c.expect(Tok::LBrace)?;
                let mut elems = Vec::new();
                if *self.c.peek() == Tok::RBrace {
                    self.c.error_at(span, format!("type '{name}' has an empty extension"));
                } else {
                    elems.push(self.parse_name()?);
                    while *self.c.peek() == Tok::Comma {
                        self.c.bump();
                        elems.push(self.parse_name()?);
                    }
                }
                self.c.expect(Tok::RBrace)?;
                self.c.expect(Tok::Dot)?;
                if self.prog.types.insert(name.clone(), elems).is_some() {
                    self.c.error_at(span, format!("type '{name}' declared twice"));
                }
                Ok(())
            }
            "pred" => {
                let name = self.parse_name()?;
                let mut domain = Vec::new();
                if *self.c.peek() == Tok::LParen {
                    self.c.bump();
                    if *self.c.peek() != Tok::RParen {
                        domain.push(self.parse_name()?);
                        while *self.c.peek() == Tok::Comma {
                            self.c.bump();
                            domain.push(self.parse_name()?);
                        }
                    }
                    self.c.expect(Tok::RParen)?;
                }
                self.c.expect(Tok::Dot)?;
                self.prog.preds.insert(name, domain);
                Ok(())
            }
            "func" => {
                let name = self.parse_name()?;
                self.c.expect(Tok::LParen)?;
                let mut domain = vec![self.parse_name()?];
                while *self.c.peek() == Tok::Comma {
                    self.c.bump();
                    domain.push(self.parse_name()?);
                }
                self.c.expect(Tok::RParen)?;
                self.c.expect(Tok::Arrow)?;
                let range = self.parse_name()?;
                self.c.expect(Tok::Dot)?;
                self.prog.funcs.insert(name, (domain, range));
                Ok(())
            }
            "var" => {
                let var = match self.c.peek().clone() {
                    Tok::Var(v) => {
                        self.c.bump();
                        v
                    }
                    other => return self.c.fail(format!("expected a variable name, found {other}")),
                };
                self.c.expect(Tok::Colon)?;
                let ty = self.parse_name()?;
                self.c.expect(Tok::Dot)?;
                self.prog.vars.insert(var, ty);
                Ok(())
            }
            other => self.c.fail(format!("unknown directive '#{other}'")),
        }
    }

    fn parse_term(&mut self) -> PResult<Term> {
        let span = self.c.span();
        match self.c.bump().0 {
            Tok::Var(v) => Ok(Term::Var(v)),
            Tok::Name(n) => {
                if *self.c.peek() == Tok::LParen {
                    self.c.bump();
                    let mut args = vec![self.parse_term()?];
                    while *self.c.peek() == Tok::Comma {
                        self.c.bump();
                        args.push(self.parse_term()?);
                    }
                    self.c.expect(Tok::RParen)?;
                    Ok(Term::App(n, args))
                } else if self.prog.funcs.contains_key(&n) {
                    self.c.error_at(span, format!("0-ary evaluable functions are not allowed ('{n}')"));
                    Err(ParseAbort)
                } else {
                    Ok(Term::Const(n))
                }
            }
            other => {
                self.c.error_at(span, format!("expected a term, found {other}"));
                Err(ParseAbort)
            }
        }
    }

    fn parse_fasp_atom(&mut self) -> PResult<FaspLiteral> {
        let span = self.c.span();
        let left = self.parse_term()?;
        match self.c.peek() {
            Tok::Eq => {
                self.c.bump();
                let right = self.parse_term()?;
                Ok(FaspLiteral { atom: FaspAtom::Eq(left, right), negated: false })
            }
            Tok::Neq => {
                self.c.bump();
                let right = self.parse_term()?;
                Ok(FaspLiteral { atom: FaspAtom::Eq(left, right), negated: true })
            }
            Tok::Assign | Tok::Hash => {
                let found = self.c.peek().clone();
                self.c.error_at(span, format!("{found} is not part of the many-sorted language"));
                Err(ParseAbort)
            }
            _ => match left {
                Term::Const(name) => Ok(FaspLiteral { atom: FaspAtom::Pred(name, Vec::new()), negated: false }),
                Term::App(name, args) if self.prog.preds.contains_key(&name) => {
                    Ok(FaspLiteral { atom: FaspAtom::Pred(name, args), negated: false })
                }
                Term::App(name, _) => {
                    self.c.error_at(span, format!("'{name}' is not a declared predicate"));
                    Err(ParseAbort)
                }
                Term::Var(_) => {
                    self.c.error_at(span, "a variable cannot stand alone as an atom".to_string());
                    Err(ParseAbort)
                }
            },
        }
    }

    fn parse_fasp_literal(&mut self) -> PResult<FaspLiteral> {
        if matches!(self.c.peek(), Tok::Name(n) if n == "not") {
            self.c.bump();
            let lit = self.parse_fasp_atom()?;
            Ok(FaspLiteral { atom: lit.atom, negated: !lit.negated })
        } else {
            self.parse_fasp_atom()
        }
    }

    fn parse_rule(&mut self) -> PResult<FaspRule> {
        let span = self.c.span();
        let head = if *self.c.peek() == Tok::If {
            None
        } else {
            let lit = self.parse_fasp_atom()?;
            match (lit.negated, lit.atom) {
                (false, FaspAtom::Pred(name, args)) => Some((name, args)),
                _ => {
                    self.c.error_at(span, "rule heads must be predicate atoms".to_string());
                    return Err(ParseAbort);
                }
            }
        };
        let body = if *self.c.peek() == Tok::If {
            self.c.bump();
            let mut out = vec![self.parse_fasp_literal()?];
            while *self.c.peek() == Tok::Comma {
                self.c.bump();
                out.push(self.parse_fasp_literal()?);
            }
            out
        } else {
            Vec::new()
        };
        self.c.expect(Tok::Dot)?;
        Ok(FaspRule { head, body, span: Some(span) })
    }
}

/// Parse a FASP source file and type-check it.
pub fn parse_fasp(text: &str, file: &str) -> Result<FaspProgram, Vec<Diagnostic>> {
    let toks = match Lexer::new(text, Mode::Fasp).tokens() {
        Ok(t) => t,
        Err((span, message)) => {
            return Err(vec![Diagnostic { file: file.into(), span, severity: Severity::Error, message }])
        }
    };
    let mut p = FaspParser {
        c: Cursor { toks, pos: 0, file: file.into(), diags: Vec::new() },
        prog: FaspProgram::default(),
    };
    while !p.c.at_eof() {
        let result = if let Tok::Directive(d) = p.c.peek().clone() {
            let span = p.c.span();
            p.c.bump();
            p.parse_directive(d, span)
        } else {
            p.parse_rule().map(|r| p.prog.rules.push(r))
        };
        if result.is_err() {
            p.c.recover();
        }
    }
    let mut diags = p.c.diags;
    let file = p.c.file;
    if diags.is_empty() {
        for (span, message) in p.prog.type_check() {
            diags.push(Diagnostic { file: file.clone(), span, severity: Severity::Error, message });
        }
    }
    if diags.is_empty() {
        Ok(p.prog)
    } else {
        Err(diags)
    }
}

#[cfg(test)]
pub(crate) fn parse_term_for_tests(s: &str) -> Term {
    let toks = Lexer::new(s, Mode::Flp).tokens().unwrap();
    let mut p = FlpParser {
        c: Cursor { toks, pos: 0, file: "<test>".into(), diags: Vec::new() },
        evaluable_consts: Vec::new(),
        sig: Signature::new(),
    };
    p.parse_term().ok().unwrap()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_meal_assignment() {
        let src = "#evaluable second. #evaluable first.\n\
                   second := fish :- first = pasta, not friday.";
        let prog = parse_flp(src, "meal.flp").unwrap();
        assert_eq!(prog.rules.len(), 1);
        let rule = &prog.rules[0];
        assert!(matches!(&rule.head, Head::Assign { func, .. } if func == "second"));
        assert_eq!(rule.body.len(), 2);
        assert!(rule.body[1].negated);
        assert!(prog.signature.is_predicate("friday", 0));
        assert!(prog.signature.is_evaluable("second", 0));
        assert!(prog.signature.is_constructor("fish"));
    }

    #[test]
    fn parses_choice_head() {
        let src = "node(0). next(X) in {Z | arc(X,Z)} :- node(X).";
        let prog = parse_flp(src, "ham.flp").unwrap();
        let rule = &prog.rules[1];
        match &rule.head {
            Head::Choice { func, var, cond, .. } => {
                assert_eq!(func, "next");
                assert_eq!(var, "Z");
                assert_eq!(cond.len(), 1);
            }
            other => panic!("unexpected head {other:?}"),
        }
        assert!(prog.signature.is_evaluable("next", 1));
    }

    #[test]
    fn choice_variable_renamed_on_capture() {
        let src = "node(0). f(X) in {Z | arc(X,Z)} :- node(X), p(Z).";
        let prog = parse_flp(src, "t.flp").unwrap();
        match &prog.rules[1].head {
            Head::Choice { var, .. } => assert_ne!(var, "Z"),
            other => panic!("unexpected head {other:?}"),
        }
    }

    #[test]
    fn syntax_error_has_position() {
        let err = parse_flp("p(X) :- q(X,", "bad.flp").unwrap_err();
        assert_eq!(err[0].file, "bad.flp");
        assert!(err[0].to_string().starts_with("bad.flp:1:"));
    }

    #[test]
    fn reserved_prefix_rejected() {
        assert!(parse_flp("holds_f(a).", "r.flp").is_err());
        assert!(parse_flp("p(V_1) :- q(V_1).", "r.flp").is_err());
        assert!(parse_flp("aux(a).", "r.flp").is_err());
    }

    #[test]
    fn assignment_head_requires_evaluable() {
        let err = parse_flp("second := fish :- friday.", "m.flp").unwrap_err();
        assert!(err[0].message.contains("#evaluable"));
    }

    #[test]
    fn negated_equality_is_distinct_from_apartness() {
        let prog = parse_flp("p(X) :- q(X), f(X) != 0, f(X) # 1.", "t.flp").unwrap();
        let body = &prog.rules[0].body;
        assert!(matches!(&body[1].atom, Atom::Eq(..)) && body[1].negated);
        assert!(matches!(&body[2].atom, Atom::Apart(..)) && !body[2].negated);
    }

    #[test]
    fn propositional_program_without_constants_is_rejected() {
        let err = parse_flp("p :- not q.", "p.flp").unwrap_err();
        assert!(err[0].message.contains("no Herbrand constants"));
    }

    #[test]
    fn parses_fasp_colouring() {
        let src = "#type node = {1,2,3}.\n\
                   #type colour = {r,g,b}.\n\
                   #pred arc(node,node).\n\
                   #func clr(node) -> colour.\n\
                   #var X : node.\n\
                   #var Y : node.\n\
                   arc(1,2). arc(2,3). arc(3,1).\n\
                   :- arc(X,Y), clr(X) = clr(Y).";
        let prog = parse_fasp(src, "col.fasp").unwrap();
        assert_eq!(prog.rules.len(), 4);
        assert_eq!(prog.types["colour"], vec!["r", "g", "b"]);
    }

    #[test]
    fn fasp_type_incoherent_equality_rejected() {
        let src = "#type node = {1,2}.\n#type colour = {r,g}.\n\
                   #func clr(node) -> colour.\n#var X : node.\n\
                   :- clr(X) = 3.";
        let err = parse_fasp(src, "bad.fasp").unwrap_err();
        assert!(err.iter().any(|d| d.message.contains("type")));
    }

    #[test]
    fn fasp_nested_function_ok() {
        let src = "#type node = {0,1}.\n#pred visited(node).\n\
                   #func next(node) -> node.\n\
                   visited(next(0)).";
        parse_fasp(src, "ok.fasp").unwrap();
    }
}
