//! Abstract syntax of the extended first-order language.
//!
//! Conjunction carries the explicit set of joined column pairs and
//! existential quantification names the position it eliminates, both relative
//! to the canonical free-variable tuple of the operands (variables ordered by
//! first appearance, left to right).

mod parse;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::relalg::{JoinSpec, RelalgError};

pub use parse::{parse_formula, parse_term, ParseError, Parser};
pub(crate) use parse::parse_bindings;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SyntaxError {
    #[error("variable names must be nonempty")]
    EmptyVariable,
    #[error("{pred} expects {expected} arguments, got {got}")]
    Arity { pred: Predicate, expected: usize, got: usize },
    #[error("conjunction pair {pair:?}: {source}")]
    Join { pair: (usize, usize), source: RelalgError },
    #[error("conjunction pair ({0},{1}) joins different variables ?{2} and ?{3}")]
    JoinMismatch(usize, usize, Variable, Variable),
    #[error("variable ?{0} is free on both sides of a conjunction but not joined")]
    UnjoinedShared(Variable),
    #[error("quantifier position {n} is out of range for {arity} free variables")]
    ExistsOutOfRange { n: usize, arity: usize },
    #[error("abstraction must list every free variable of its body exactly once in alpha or beta")]
    AbstractionPartition,
    #[error("abstraction over an open formula needs a nonempty alpha")]
    EmptyAlpha,
    #[error("cannot substitute ?{0}: not a free variable of the formula")]
    NotFree(Variable),
    #[error("substitution value for ?{0} is not a ground term")]
    NotGround(Variable),
    #[error("predicate {0} is not declared")]
    Undeclared(String),
    #[error("predicate {name} is declared with arity {declared}, used with {used}")]
    DeclaredArity { name: String, declared: String, used: usize },
}

/// A variable, written `?name` in text.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Variable(Arc<str>);

impl Variable {
    pub fn new(name: impl AsRef<str>) -> Result<Self, SyntaxError> {
        let name = name.as_ref();
        if name.is_empty() {
            return Err(SyntaxError::EmptyVariable);
        }
        Ok(Variable(name.into()))
    }

    pub fn name(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for Variable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// The three values of a time argument.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Tense {
    Past,
    Present,
    Future,
}

impl Tense {
    pub const ALL: [Tense; 3] = [Tense::Past, Tense::Present, Tense::Future];

    pub fn as_str(self) -> &'static str {
        match self {
            Tense::Past => "in_past",
            Tense::Present => "in_present",
            Tense::Future => "in_future",
        }
    }

    pub fn from_keyword(s: &str) -> Option<Tense> {
        Tense::ALL.into_iter().find(|t| t.as_str() == s)
    }
}

impl fmt::Display for Tense {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// A predicate symbol; identity is name plus arity.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Predicate {
    name: Arc<str>,
    arity: usize,
}

impl Predicate {
    pub fn new(name: impl AsRef<str>, arity: usize) -> Self {
        Predicate { name: name.as_ref().into(), arity }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    /// The reified knowledge predicate `Know(time, subject, content)`.
    pub fn know() -> Self {
        Predicate::new(KNOW, 3)
    }

    pub fn is_know(&self) -> bool {
        &*self.name == KNOW && self.arity == 3
    }
}

impl fmt::Display for Predicate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.name, self.arity)
    }
}

pub const KNOW: &str = "Know";

/// Arguments of atoms and identities.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Term {
    Var(Variable),
    Const(Arc<str>),
    Time(Tense),
    /// A consolidation timestamp, written `@n`.
    Stamp(u64),
    Abs(Box<AbstractedTerm>),
}

impl Term {
    pub fn var(name: &str) -> Term {
        Term::Var(Variable::new(name).expect("nonempty variable name"))
    }

    pub fn constant(name: &str) -> Term {
        Term::Const(name.into())
    }

    /// No free variables: not a variable, and an abstraction with empty beta.
    pub fn is_ground(&self) -> bool {
        match self {
            Term::Var(_) => false,
            Term::Abs(a) => a.beta.is_empty(),
            _ => true,
        }
    }

    fn push_free(&self, out: &mut Vec<Variable>) {
        match self {
            Term::Var(v) => push_unique(out, v),
            Term::Abs(a) => a.beta.iter().for_each(|v| push_unique(out, v)),
            _ => {}
        }
    }

    fn substitute_inner(&self, map: &BTreeMap<Variable, Term>) -> Term {
        match self {
            Term::Var(v) => map.get(v).cloned().unwrap_or_else(|| self.clone()),
            Term::Abs(a) => Term::Abs(Box::new(a.substitute_inner(map))),
            other => other.clone(),
        }
    }
}

/// `<<body>>_alpha^beta`: a formula reified as a term. Alpha variables are
/// bound by the abstraction; beta variables stay free.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct AbstractedTerm {
    body: Formula,
    alpha: Vec<Variable>,
    beta: Vec<Variable>,
}

impl AbstractedTerm {
    pub fn new(body: Formula, alpha: Vec<Variable>, beta: Vec<Variable>) -> Result<Self, SyntaxError> {
        let free = body.free_vars();
        let mut seen = BTreeSet::new();
        for v in alpha.iter().chain(&beta) {
            if !seen.insert(v) || !free.contains(v) {
                return Err(SyntaxError::AbstractionPartition);
            }
        }
        if seen.len() != free.len() {
            return Err(SyntaxError::AbstractionPartition);
        }
        if !free.is_empty() && alpha.is_empty() {
            return Err(SyntaxError::EmptyAlpha);
        }
        Ok(AbstractedTerm { body, alpha, beta })
    }

    /// `<<body>>_{free vars}`, abstracting every free variable.
    pub fn closed(body: Formula) -> Self {
        let alpha = body.free_vars();
        AbstractedTerm { body, alpha, beta: Vec::new() }
    }

    pub fn body(&self) -> &Formula {
        &self.body
    }

    pub fn alpha(&self) -> &[Variable] {
        &self.alpha
    }

    pub fn beta(&self) -> &[Variable] {
        &self.beta
    }

    pub fn is_ground(&self) -> bool {
        self.beta.is_empty()
    }

    /// Only beta variables are reachable; alpha variables are binders.
    fn substitute_inner(&self, map: &BTreeMap<Variable, Term>) -> AbstractedTerm {
        let inner: BTreeMap<Variable, Term> =
            map.iter().filter(|(k, _)| self.beta.contains(k)).map(|(k, v)| (k.clone(), v.clone())).collect();
        AbstractedTerm {
            body: self.body.substitute_inner(&inner),
            alpha: self.alpha.clone(),
            beta: self.beta.iter().filter(|v| !inner.contains_key(*v)).cloned().collect(),
        }
    }
}

/// Formulas of the syntax algebra. Use the constructors (`atom`, `conj`,
/// `exists`, ...) to get validated values; matching on the variants is the
/// intended way to inspect them.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Formula {
    Top,
    Atom { pred: Predicate, args: Vec<Term> },
    Identity(Term, Term),
    Conj { lhs: Box<Formula>, rhs: Box<Formula>, join: JoinSpec },
    Neg(Box<Formula>),
    Exists { n: usize, body: Box<Formula> },
}

impl Formula {
    pub fn atom(pred: Predicate, args: Vec<Term>) -> Result<Formula, SyntaxError> {
        if args.len() != pred.arity() {
            return Err(SyntaxError::Arity { expected: pred.arity(), got: args.len(), pred });
        }
        Ok(Formula::Atom { pred, args })
    }

    pub fn identity(left: Term, right: Term) -> Formula {
        Formula::Identity(left, right)
    }

    /// `lhs ∧_S rhs`. The pairs must be in range, use each column at most
    /// once, and join exactly the variables the two operands share.
    pub fn conj(lhs: Formula, rhs: Formula, join: JoinSpec) -> Result<Formula, SyntaxError> {
        let lv = lhs.free_vars();
        let rv = rhs.free_vars();
        if let Err(source) = join.check(lv.len(), rv.len()) {
            let pair = match source {
                RelalgError::PairOutOfRange(a, b, ..) | RelalgError::DuplicateColumn(a, b) => (a, b),
                _ => (0, 0),
            };
            return Err(SyntaxError::Join { pair, source });
        }
        for &(a, b) in join.pairs() {
            if lv[a - 1] != rv[b - 1] {
                return Err(SyntaxError::JoinMismatch(a, b, lv[a - 1].clone(), rv[b - 1].clone()));
            }
        }
        if let Some(v) = rv.iter().find(|v| lv.contains(v) && !join.pairs().iter().any(|&(_, b)| &rv[b - 1] == *v)) {
            return Err(SyntaxError::UnjoinedShared(v.clone()));
        }
        Ok(Formula::Conj { lhs: Box::new(lhs), rhs: Box::new(rhs), join })
    }

    /// Conjunction joining on every shared free variable.
    pub fn and(lhs: Formula, rhs: Formula) -> Formula {
        let join = shared_join(&lhs.free_vars(), &rhs.free_vars());
        Formula::Conj { lhs: Box::new(lhs), rhs: Box::new(rhs), join }
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(body: Formula) -> Formula {
        Formula::Neg(Box::new(body))
    }

    /// `∃_n body`, eliminating the `n`-th free variable (1-based).
    pub fn exists(n: usize, body: Formula) -> Result<Formula, SyntaxError> {
        let arity = body.free_vars().len();
        if n == 0 || n > arity {
            return Err(SyntaxError::ExistsOutOfRange { n, arity });
        }
        Ok(Formula::Exists { n, body: Box::new(body) })
    }

    /// Quantifies the named variable, wherever it sits in the free tuple.
    pub fn exists_var(v: &Variable, body: Formula) -> Result<Formula, SyntaxError> {
        match body.free_vars().iter().position(|x| x == v) {
            Some(i) => Ok(Formula::Exists { n: i + 1, body: Box::new(body) }),
            None => Err(SyntaxError::NotFree(v.clone())),
        }
    }

    /// The canonical tuple of free variables.
    pub fn free_vars(&self) -> Vec<Variable> {
        let mut out = Vec::new();
        self.push_free(&mut out);
        out
    }

    pub fn free_arity(&self) -> usize {
        self.free_vars().len()
    }

    pub fn is_sentence(&self) -> bool {
        self.free_vars().is_empty()
    }

    fn push_free(&self, out: &mut Vec<Variable>) {
        match self {
            Formula::Top => {}
            Formula::Atom { args, .. } => args.iter().for_each(|t| t.push_free(out)),
            Formula::Identity(a, b) => {
                a.push_free(out);
                b.push_free(out);
            }
            Formula::Conj { lhs, rhs, .. } => {
                lhs.push_free(out);
                rhs.push_free(out);
            }
            Formula::Neg(body) => body.push_free(out),
            Formula::Exists { n, body } => {
                let mut inner = body.free_vars();
                if *n >= 1 && *n <= inner.len() {
                    inner.remove(n - 1);
                }
                inner.iter().for_each(|v| push_unique(out, v));
            }
        }
    }

    /// Replaces free variables by ground terms. Join pairs and quantifier
    /// positions are recomputed against the new free tuples.
    pub fn substitute(&self, map: &BTreeMap<Variable, Term>) -> Result<Formula, SyntaxError> {
        let free = self.free_vars();
        for (v, t) in map {
            if !free.contains(v) {
                return Err(SyntaxError::NotFree(v.clone()));
            }
            if !t.is_ground() {
                return Err(SyntaxError::NotGround(v.clone()));
            }
        }
        Ok(self.substitute_inner(map))
    }

    fn substitute_inner(&self, map: &BTreeMap<Variable, Term>) -> Formula {
        if map.is_empty() {
            return self.clone();
        }
        match self {
            Formula::Top => Formula::Top,
            Formula::Atom { pred, args } => Formula::Atom {
                pred: pred.clone(),
                args: args.iter().map(|t| t.substitute_inner(map)).collect(),
            },
            Formula::Identity(a, b) => Formula::Identity(a.substitute_inner(map), b.substitute_inner(map)),
            Formula::Conj { lhs, rhs, .. } => Formula::and(lhs.substitute_inner(map), rhs.substitute_inner(map)),
            Formula::Neg(body) => Formula::not(body.substitute_inner(map)),
            Formula::Exists { n, body } => {
                let inner = body.free_vars();
                let Some(bound) = inner.get(n - 1).cloned() else {
                    return Formula::Exists { n: *n, body: Box::new(body.substitute_inner(map)) };
                };
                let mut narrowed = map.clone();
                narrowed.remove(&bound);
                let body = body.substitute_inner(&narrowed);
                let n = body.free_vars().iter().position(|v| *v == bound).expect("bound variable survives") + 1;
                Formula::Exists { n, body: Box::new(body) }
            }
        }
    }

    /// Re-checks every invariant of a formula assembled from raw variants.
    pub fn validate(&self) -> Result<(), SyntaxError> {
        match self {
            Formula::Top | Formula::Identity(..) => Ok(()),
            Formula::Atom { pred, args } => {
                if args.len() != pred.arity() {
                    return Err(SyntaxError::Arity { pred: pred.clone(), expected: pred.arity(), got: args.len() });
                }
                for a in args {
                    if let Term::Abs(t) = a {
                        AbstractedTerm::new(t.body.clone(), t.alpha.clone(), t.beta.clone())?;
                        t.body.validate()?;
                    }
                }
                Ok(())
            }
            Formula::Conj { lhs, rhs, join } => {
                lhs.validate()?;
                rhs.validate()?;
                Formula::conj((**lhs).clone(), (**rhs).clone(), join.clone()).map(|_| ())
            }
            Formula::Neg(body) => body.validate(),
            Formula::Exists { n, body } => {
                body.validate()?;
                Formula::exists(*n, (**body).clone()).map(|_| ())
            }
        }
    }

    /// Every atom predicate, including those inside abstracted terms.
    pub fn predicates(&self) -> BTreeSet<Predicate> {
        let mut out = BTreeSet::new();
        self.collect_predicates(&mut out);
        out
    }

    fn collect_predicates(&self, out: &mut BTreeSet<Predicate>) {
        let terms = |ts: &[&Term], out: &mut BTreeSet<Predicate>| {
            for t in ts {
                if let Term::Abs(a) = t {
                    a.body.collect_predicates(out);
                }
            }
        };
        match self {
            Formula::Top => {}
            Formula::Atom { pred, args } => {
                out.insert(pred.clone());
                terms(&args.iter().collect::<Vec<_>>(), out);
            }
            Formula::Identity(a, b) => terms(&[a, b], out),
            Formula::Conj { lhs, rhs, .. } => {
                lhs.collect_predicates(out);
                rhs.collect_predicates(out);
            }
            Formula::Neg(b) | Formula::Exists { body: b, .. } => b.collect_predicates(out),
        }
    }

    /// Splits nested Cartesian conjunctions (empty join) into their operands.
    pub fn conjuncts(&self) -> Vec<&Formula> {
        match self {
            Formula::Conj { lhs, rhs, join } if join.is_empty() => {
                let mut out = lhs.conjuncts();
                out.extend(rhs.conjuncts());
                out
            }
            other => vec![other],
        }
    }
}

fn push_unique(out: &mut Vec<Variable>, v: &Variable) {
    if !out.contains(v) {
        out.push(v.clone());
    }
}

/// The join pairs equating shared variables of two free tuples.
pub fn shared_join(lhs: &[Variable], rhs: &[Variable]) -> JoinSpec {
    JoinSpec::new(
        lhs.iter()
            .enumerate()
            .filter_map(|(i, v)| rhs.iter().position(|w| w == v).map(|j| (i + 1, j + 1))),
    )
}

/// Declared predicate symbols. `Know/3` is always present.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Signature {
    preds: BTreeSet<Predicate>,
}

impl Default for Signature {
    fn default() -> Self {
        let mut preds = BTreeSet::new();
        preds.insert(Predicate::know());
        Signature { preds }
    }
}

impl Signature {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn declare(&mut self, pred: Predicate) -> Result<(), SyntaxError> {
        if pred.name() == KNOW && !pred.is_know() {
            return Err(SyntaxError::DeclaredArity { name: KNOW.into(), declared: "3".into(), used: pred.arity() });
        }
        self.preds.insert(pred);
        Ok(())
    }

    pub fn contains(&self, pred: &Predicate) -> bool {
        self.preds.contains(pred)
    }

    pub fn iter(&self) -> impl Iterator<Item = &Predicate> {
        self.preds.iter()
    }

    pub fn arities(&self, name: &str) -> Vec<usize> {
        self.preds.iter().filter(|p| p.name() == name).map(Predicate::arity).collect()
    }

    pub fn check(&self, pred: &Predicate) -> Result<(), SyntaxError> {
        if self.contains(pred) {
            return Ok(());
        }
        let arities = self.arities(pred.name());
        if arities.is_empty() {
            Err(SyntaxError::Undeclared(pred.to_string()))
        } else {
            let declared = arities.iter().map(usize::to_string).collect::<Vec<_>>().join(",");
            Err(SyntaxError::DeclaredArity { name: pred.name().into(), declared, used: pred.arity() })
        }
    }
}

/// Named formula abbreviations, usable wherever a formula may appear.
pub type Definitions = BTreeMap<String, Formula>;
