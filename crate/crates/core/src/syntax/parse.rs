//! Concrete text syntax: lexer, recursive-descent parser and the printer.
//!
//! ```text
//! formula  := unary ( "/\" [ "{" pairs "}" ] unary )*
//! unary    := "~" unary | "E{" (n | ?var) "}" unary | primary
//! primary  := "Top" | "(" formula ")" | name "(" [ term ("," term)* ] ")"
//!           | term "=" term | name
//! term     := ?var | constant | in_past | in_present | in_future | @n
//!           | "<<" formula ">>" [ "_{" vars "}" ] [ "^{" vars "}" ]
//! ```
//!
//! A bare `name` is a definition when one is in scope, otherwise a nullary
//! predicate. `/\` without braces joins on every shared variable. When the
//! alpha list of an abstraction is omitted it defaults to the body's free
//! variables not listed in beta.

use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

use super::{AbstractedTerm, Definitions, Formula, Predicate, Signature, Tense, Term, Variable};
use crate::relalg::JoinSpec;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}, column {column}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Number(String),
    Var(String),
    Stamp(u64),
    LParen,
    RParen,
    LBrace,
    RBrace,
    Comma,
    Tilde,
    Equals,
    And,
    Open,
    Close,
    Sub,
    Sup,
    Eof,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Ident(s) | Tok::Number(s) => write!(f, "`{s}`"),
            Tok::Var(s) => write!(f, "`?{s}`"),
            Tok::Stamp(n) => write!(f, "`@{n}`"),
            Tok::LParen => f.write_str("`(`"),
            Tok::RParen => f.write_str("`)`"),
            Tok::LBrace => f.write_str("`{`"),
            Tok::RBrace => f.write_str("`}`"),
            Tok::Comma => f.write_str("`,`"),
            Tok::Tilde => f.write_str("`~`"),
            Tok::Equals => f.write_str("`=`"),
            Tok::And => f.write_str("`/\\`"),
            Tok::Open => f.write_str("`<<`"),
            Tok::Close => f.write_str("`>>`"),
            Tok::Sub => f.write_str("`_{`"),
            Tok::Sup => f.write_str("`^{`"),
            Tok::Eof => f.write_str("end of input"),
        }
    }
}

#[derive(Debug, Clone)]
struct Spanned {
    tok: Tok,
    line: usize,
    column: usize,
}

fn is_word(c: char) -> bool {
    c.is_alphanumeric() || c == '_'
}

fn lex(text: &str) -> Result<Vec<Spanned>, ParseError> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let (mut i, mut line, mut col) = (0, 1, 1);
    while i < chars.len() {
        let c = chars[i];
        let (l0, c0) = (line, col);
        let err = |m: String| ParseError { line: l0, column: c0, message: m };
        if c == '\n' {
            i += 1;
            line += 1;
            col = 1;
            continue;
        }
        if c.is_whitespace() {
            i += 1;
            col += 1;
            continue;
        }
        let next = chars.get(i + 1).copied();
        let (tok, len) = match c {
            '(' => (Tok::LParen, 1),
            ')' => (Tok::RParen, 1),
            '{' => (Tok::LBrace, 1),
            '}' => (Tok::RBrace, 1),
            ',' => (Tok::Comma, 1),
            '~' => (Tok::Tilde, 1),
            '=' => (Tok::Equals, 1),
            '/' if next == Some('\\') => (Tok::And, 2),
            '<' if next == Some('<') => (Tok::Open, 2),
            '>' if next == Some('>') => (Tok::Close, 2),
            '_' if next == Some('{') => (Tok::Sub, 2),
            '^' if next == Some('{') => (Tok::Sup, 2),
            '?' | '@' => {
                let len = chars[i + 1..].iter().take_while(|c| is_word(**c)).count();
                if len == 0 {
                    return Err(err(format!("expected a name after `{c}`")));
                }
                let word: String = chars[i + 1..i + 1 + len].iter().collect();
                let tok = if c == '?' {
                    Tok::Var(word)
                } else {
                    Tok::Stamp(word.parse().map_err(|_| err(format!("invalid timestamp `@{word}`")))?)
                };
                (tok, len + 1)
            }
            c if is_word(c) => {
                let len = chars[i..].iter().take_while(|c| is_word(**c)).count();
                let word: String = chars[i..i + len].iter().collect();
                if word.chars().all(|c| c.is_ascii_digit()) {
                    (Tok::Number(word), len)
                } else {
                    (Tok::Ident(word), len)
                }
            }
            other => return Err(err(format!("unexpected character `{other}`"))),
        };
        out.push(Spanned { tok, line, column: col });
        i += len;
        col += len;
    }
    out.push(Spanned { tok: Tok::Eof, line, column: col });
    Ok(out)
}

/// A parser configured with the predicates and definitions in scope.
#[derive(Debug, Clone, Copy, Default)]
pub struct Parser<'a> {
    signature: Option<&'a Signature>,
    definitions: Option<&'a Definitions>,
}

impl<'a> Parser<'a> {
    pub fn new() -> Self {
        Self::default()
    }

    /// Check every atom against declared predicates.
    pub fn with_signature(mut self, sig: &'a Signature) -> Self {
        self.signature = Some(sig);
        self
    }

    pub fn with_definitions(mut self, defs: &'a Definitions) -> Self {
        self.definitions = Some(defs);
        self
    }

    pub fn formula(&self, text: &str) -> Result<Formula, ParseError> {
        let mut st = State { toks: lex(text)?, pos: 0, cfg: *self };
        let f = st.formula()?;
        st.expect_eof()?;
        Ok(f)
    }

    pub fn term(&self, text: &str) -> Result<Term, ParseError> {
        let mut st = State { toks: lex(text)?, pos: 0, cfg: *self };
        let t = st.term()?;
        st.expect_eof()?;
        Ok(t)
    }
}

/// Parses without predicate or definition checks.
pub fn parse_formula(text: &str) -> Result<Formula, ParseError> {
    Parser::new().formula(text)
}

pub fn parse_term(text: &str) -> Result<Term, ParseError> {
    Parser::new().term(text)
}

struct State<'a> {
    toks: Vec<Spanned>,
    pos: usize,
    cfg: Parser<'a>,
}

impl State<'_> {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    fn peek2(&self) -> &Tok {
        &self.toks[(self.pos + 1).min(self.toks.len() - 1)].tok
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].tok.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn error_at(&self, pos: usize, message: impl Into<String>) -> ParseError {
        let s = &self.toks[pos];
        ParseError { line: s.line, column: s.column, message: message.into() }
    }

    fn error(&self, message: impl Into<String>) -> ParseError {
        self.error_at(self.pos, message)
    }

    fn expect(&mut self, tok: Tok) -> Result<(), ParseError> {
        if *self.peek() == tok {
            self.bump();
            Ok(())
        } else {
            Err(self.error(format!("expected {tok}, found {}", self.peek())))
        }
    }

    fn expect_eof(&self) -> Result<(), ParseError> {
        match self.peek() {
            Tok::Eof => Ok(()),
            t => Err(self.error(format!("unexpected {t} after end of formula"))),
        }
    }

    fn number(&mut self) -> Result<usize, ParseError> {
        match self.bump() {
            Tok::Number(n) => n.parse().map_err(|_| self.error_at(self.pos - 1, format!("number `{n}` is too large"))),
            t => Err(self.error_at(self.pos.saturating_sub(1), format!("expected a number, found {t}"))),
        }
    }

    fn formula(&mut self) -> Result<Formula, ParseError> {
        let mut lhs = self.unary()?;
        while *self.peek() == Tok::And {
            let at = self.pos;
            self.bump();
            let join = if *self.peek() == Tok::LBrace {
                self.bump();
                let mut pairs = Vec::new();
                while *self.peek() != Tok::RBrace {
                    if !pairs.is_empty() {
                        self.expect(Tok::Comma)?;
                    }
                    self.expect(Tok::LParen)?;
                    let a = self.number()?;
                    self.expect(Tok::Comma)?;
                    let b = self.number()?;
                    self.expect(Tok::RParen)?;
                    pairs.push((a, b));
                }
                self.bump();
                Some(JoinSpec::new(pairs))
            } else {
                None
            };
            let rhs = self.unary()?;
            lhs = match join {
                Some(join) => Formula::conj(lhs, rhs, join).map_err(|e| self.error_at(at, e.to_string()))?,
                None => Formula::and(lhs, rhs),
            };
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Formula, ParseError> {
        let at = self.pos;
        match self.peek().clone() {
            Tok::Tilde => {
                self.bump();
                Ok(Formula::not(self.unary()?))
            }
            Tok::Ident(ref e) if e == "E" && *self.peek2() == Tok::LBrace => {
                self.bump();
                self.bump();
                let target = match self.peek().clone() {
                    Tok::Var(v) => {
                        self.bump();
                        Err(Variable::new(v).map_err(|e| self.error(e.to_string()))?)
                    }
                    _ => Ok(self.number()?),
                };
                self.expect(Tok::RBrace)?;
                let body = self.unary()?;
                match target {
                    Ok(n) => Formula::exists(n, body),
                    Err(v) => Formula::exists_var(&v, body),
                }
                .map_err(|e| self.error_at(at, e.to_string()))
            }
            _ => self.primary(),
        }
    }

    fn primary(&mut self) -> Result<Formula, ParseError> {
        let at = self.pos;
        match self.peek().clone() {
            Tok::LParen => {
                self.bump();
                let f = self.formula()?;
                self.expect(Tok::RParen)?;
                Ok(f)
            }
            Tok::Ident(name) if Tense::from_keyword(&name).is_none() => match self.peek2() {
                Tok::LParen => {
                    self.bump();
                    self.bump();
                    let mut args = Vec::new();
                    while *self.peek() != Tok::RParen {
                        if !args.is_empty() {
                            self.expect(Tok::Comma)?;
                        }
                        args.push(self.term()?);
                    }
                    self.bump();
                    self.atom(at, &name, args)
                }
                Tok::Equals => self.identity(),
                _ if name == "Top" => {
                    self.bump();
                    Ok(Formula::Top)
                }
                _ => {
                    self.bump();
                    if let Some(f) = self.cfg.definitions.and_then(|d| d.get(&name)) {
                        return Ok(f.clone());
                    }
                    self.atom(at, &name, Vec::new())
                }
            },
            Tok::Ident(_) | Tok::Number(_) | Tok::Var(_) | Tok::Stamp(_) | Tok::Open => self.identity(),
            t => Err(self.error(format!("expected a formula, found {t}"))),
        }
    }

    fn atom(&self, at: usize, name: &str, args: Vec<Term>) -> Result<Formula, ParseError> {
        let pred = Predicate::new(name, args.len());
        if let Some(sig) = self.cfg.signature {
            sig.check(&pred).map_err(|e| self.error_at(at, e.to_string()))?;
        }
        Formula::atom(pred, args).map_err(|e| self.error_at(at, e.to_string()))
    }

    fn identity(&mut self) -> Result<Formula, ParseError> {
        let left = self.term()?;
        self.expect(Tok::Equals)?;
        let right = self.term()?;
        Ok(Formula::identity(left, right))
    }

    fn term(&mut self) -> Result<Term, ParseError> {
        let at = self.pos;
        match self.bump() {
            Tok::Var(v) => Ok(Term::Var(Variable::new(v).map_err(|e| self.error_at(at, e.to_string()))?)),
            Tok::Stamp(n) => Ok(Term::Stamp(n)),
            Tok::Number(n) => Ok(Term::Const(n.into())),
            Tok::Ident(name) => Ok(match Tense::from_keyword(&name) {
                Some(t) => Term::Time(t),
                None => Term::Const(name.into()),
            }),
            Tok::Open => {
                let body = self.formula()?;
                self.expect(Tok::Close)?;
                let alpha = if *self.peek() == Tok::Sub { Some(self.var_list()?) } else { None };
                let beta = if *self.peek() == Tok::Sup { self.var_list()? } else { Vec::new() };
                let alpha = alpha.unwrap_or_else(|| body.free_vars().into_iter().filter(|v| !beta.contains(v)).collect());
                AbstractedTerm::new(body, alpha, beta)
                    .map(|t| Term::Abs(Box::new(t)))
                    .map_err(|e| self.error_at(at, e.to_string()))
            }
            t => Err(self.error_at(at, format!("expected a term, found {t}"))),
        }
    }

    fn var_list(&mut self) -> Result<Vec<Variable>, ParseError> {
        self.bump();
        let mut out = Vec::new();
        loop {
            let at = self.pos;
            match self.bump() {
                Tok::RBrace => return Ok(out),
                Tok::Var(v) | Tok::Ident(v) => out.push(Variable::new(v).map_err(|e| self.error_at(at, e.to_string()))?),
                t => return Err(self.error_at(at, format!("expected a variable, found {t}"))),
            }
        }
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Var(v) => write!(f, "?{v}"),
            Term::Const(c) => f.write_str(c),
            Term::Time(t) => f.write_str(t.as_str()),
            Term::Stamp(n) => write!(f, "@{n}"),
            Term::Abs(a) => a.fmt(f),
        }
    }
}

fn write_vars(f: &mut fmt::Formatter<'_>, prefix: &str, vars: &[Variable]) -> fmt::Result {
    if vars.is_empty() {
        return Ok(());
    }
    f.write_str(prefix)?;
    for (i, v) in vars.iter().enumerate() {
        if i > 0 {
            f.write_str(" ")?;
        }
        write!(f, "?{v}")?;
    }
    f.write_str("}")
}

impl fmt::Display for AbstractedTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "<<{}>>", self.body)?;
        write_vars(f, "_{", &self.alpha)?;
        write_vars(f, "^{", &self.beta)
    }
}

fn write_operand(f: &mut fmt::Formatter<'_>, x: &Formula) -> fmt::Result {
    if matches!(x, Formula::Conj { .. }) {
        write!(f, "({x})")
    } else {
        write!(f, "{x}")
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Formula::Top => f.write_str("Top"),
            Formula::Atom { pred, args } => {
                write!(f, "{}(", pred.name())?;
                for (i, a) in args.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    write!(f, "{a}")?;
                }
                f.write_str(")")
            }
            Formula::Identity(a, b) => write!(f, "{a} = {b}"),
            Formula::Conj { lhs, rhs, join } => {
                write!(f, "{lhs} /\\{join} ")?;
                write_operand(f, rhs)
            }
            Formula::Neg(body) => {
                f.write_str("~ ")?;
                write_operand(f, body)
            }
            Formula::Exists { n, body } => {
                write!(f, "E{{{n}}} ")?;
                write_operand(f, body)
            }
        }
    }
}

/// Free-variable bindings parsed from `x=c` pairs.
pub(crate) fn parse_bindings<'s>(
    items: impl IntoIterator<Item = &'s str>,
) -> Result<BTreeMap<Variable, Term>, String> {
    let mut out = BTreeMap::new();
    for item in items {
        let (k, v) = item.split_once('=').ok_or_else(|| format!("expected var=value, found `{item}`"))?;
        let var = Variable::new(k.trim().trim_start_matches('?')).map_err(|e| e.to_string())?;
        let term = parse_term(v.trim()).map_err(|e| e.to_string())?;
        out.insert(var, term);
    }
    Ok(out)
}
