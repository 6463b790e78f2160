//! The intensional domain: interned particulars and concepts, the algebra
//! operators on concepts, and the intensional interpretation of formulas.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::relalg::JoinSpec;
use crate::syntax::{AbstractedTerm, Formula, Predicate, Signature, SyntaxError, Tense, Term, Variable};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PrpError {
    #[error("predicate {0} is not declared")]
    Undeclared(Predicate),
    #[error("union of an empty set of concepts")]
    EmptyUnion,
    #[error("union mixes concepts of arity {0} and {1}")]
    MixedArity(usize, usize),
    #[error("variable ?{0} is unbound")]
    Unbound(Variable),
    #[error("concept #{0} has no formula (built by algebra operators only)")]
    NotSyntactic(u32),
    #[error("the empty tuple has no term")]
    UnitTerm,
    #[error(transparent)]
    Syntax(#[from] SyntaxError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ParticularId(pub u32);

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ConceptId(pub u32);

impl fmt::Display for ConceptId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "#{}", self.0)
    }
}

/// A member of the domain: a particular or a concept.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Elem {
    Particular(ParticularId),
    Concept(ConceptId),
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Individual {
    /// The empty tuple `<>`.
    Unit,
    Named(Arc<str>),
    Time(Tense),
    Stamp(u64),
}

impl fmt::Display for Individual {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Individual::Unit => f.write_str("<>"),
            Individual::Named(n) => f.write_str(n),
            Individual::Time(t) => f.write_str(t.as_str()),
            Individual::Stamp(n) => write!(f, "@{n}"),
        }
    }
}

/// An atom argument as it enters the interning key.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum ArgKey {
    Var(Variable),
    Elem(Elem),
    /// An abstraction with unbound beta variables; `bound` holds the beta
    /// variables already fixed by an assignment.
    OpenAbs { term: Box<AbstractedTerm>, bound: Vec<(Variable, Elem)> },
}

impl ArgKey {
    fn push_free(&self, out: &mut Vec<Variable>) {
        let mut push = |v: &Variable| {
            if !out.contains(v) {
                out.push(v.clone());
            }
        };
        match self {
            ArgKey::Var(v) => push(v),
            ArgKey::Elem(_) => {}
            ArgKey::OpenAbs { term, bound } => {
                term.beta().iter().filter(|v| !bound.iter().any(|(b, _)| b == *v)).for_each(push)
            }
        }
    }
}

/// Structure of an interned concept.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum ConceptNode {
    Truth,
    Atom { pred: Predicate, args: Vec<ArgKey> },
    Identity { args: [ArgKey; 2] },
    Conj { lhs: ConceptId, rhs: ConceptId, join: JoinSpec },
    Neg(ConceptId),
    Exists { n: usize, body: ConceptId },
}

pub type Assignment = BTreeMap<Variable, Elem>;

/// Hash-consed tables of particulars and concepts.
#[derive(Debug, Clone)]
pub struct ConceptStore {
    particulars: Vec<Individual>,
    particular_ids: HashMap<Individual, ParticularId>,
    nodes: Vec<(ConceptNode, usize)>,
    node_ids: HashMap<ConceptNode, ConceptId>,
    signature: Signature,
}

impl Default for ConceptStore {
    fn default() -> Self {
        Self::new()
    }
}

pub const TRUTH: ConceptId = ConceptId(0);
pub const ID: ConceptId = ConceptId(1);
pub const UNIT: ParticularId = ParticularId(0);

impl ConceptStore {
    pub fn new() -> Self {
        let mut s = ConceptStore {
            particulars: Vec::new(),
            particular_ids: HashMap::new(),
            nodes: Vec::new(),
            node_ids: HashMap::new(),
            signature: Signature::new(),
        };
        s.intern_particular(Individual::Unit);
        s.intern_node(ConceptNode::Truth, 0);
        let x = ArgKey::Var(Variable::new("x").expect("nonempty"));
        let y = ArgKey::Var(Variable::new("y").expect("nonempty"));
        s.intern_node(ConceptNode::Identity { args: [x, y] }, 2);
        s
    }

    pub fn signature(&self) -> &Signature {
        &self.signature
    }

    pub fn declare(&mut self, pred: Predicate) -> Result<(), PrpError> {
        Ok(self.signature.declare(pred)?)
    }

    pub fn intern_particular(&mut self, ind: Individual) -> ParticularId {
        if let Some(id) = self.particular_ids.get(&ind) {
            return *id;
        }
        let id = ParticularId(self.particulars.len() as u32);
        self.particulars.push(ind.clone());
        self.particular_ids.insert(ind, id);
        id
    }

    pub fn named(&mut self, name: &str) -> ParticularId {
        self.intern_particular(Individual::Named(name.into()))
    }

    pub fn find_particular(&self, ind: &Individual) -> Option<ParticularId> {
        self.particular_ids.get(ind).copied()
    }

    pub fn individual(&self, id: ParticularId) -> &Individual {
        &self.particulars[id.0 as usize]
    }

    pub fn particulars(&self) -> impl Iterator<Item = (ParticularId, &Individual)> {
        self.particulars.iter().enumerate().map(|(i, p)| (ParticularId(i as u32), p))
    }

    pub fn concept_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn node(&self, id: ConceptId) -> &ConceptNode {
        &self.nodes[id.0 as usize].0
    }

    /// The `k` of `D_k` the concept belongs to.
    pub fn arity(&self, id: ConceptId) -> usize {
        self.nodes[id.0 as usize].1
    }

    pub fn concepts(&self) -> impl Iterator<Item = (ConceptId, &ConceptNode, usize)> {
        self.nodes.iter().enumerate().map(|(i, (n, a))| (ConceptId(i as u32), n, *a))
    }

    fn intern_node(&mut self, node: ConceptNode, arity: usize) -> ConceptId {
        if let Some(id) = self.node_ids.get(&node) {
            return *id;
        }
        let id = ConceptId(self.nodes.len() as u32);
        self.nodes.push((node.clone(), arity));
        self.node_ids.insert(node, id);
        id
    }

    /// Interns `pred(args)`; the concept's arity is the number of distinct
    /// free variables in the arguments.
    pub fn intern_atom(&mut self, pred: Predicate, args: Vec<ArgKey>) -> ConceptId {
        Intern(self).atom(pred, args).expect("interning never fails")
    }

    pub fn conj(&mut self, u: ConceptId, v: ConceptId, join: JoinSpec) -> ConceptId {
        Intern(self).conj(u, v, join).expect("interning never fails")
    }

    pub fn neg(&mut self, u: ConceptId) -> ConceptId {
        Intern(self).neg(u).expect("interning never fails")
    }

    /// Eliminates free position `n`; out of range leaves `u` unchanged.
    pub fn exists(&mut self, n: usize, u: ConceptId) -> ConceptId {
        Intern(self).exists(n, u).expect("interning never fails")
    }

    /// `neg(conj(neg u1, conj(neg u2, ... neg un)))` joined on the diagonal.
    pub fn union(&mut self, members: &[ConceptId]) -> Result<ConceptId, PrpError> {
        let mut set = members.to_vec();
        set.sort_unstable();
        set.dedup();
        let (&last, rest) = set.split_last().ok_or(PrpError::EmptyUnion)?;
        let arity = self.arity(last);
        if let Some(&u) = rest.iter().find(|u| self.arity(**u) != arity) {
            return Err(PrpError::MixedArity(self.arity(u), arity));
        }
        if rest.is_empty() {
            return Ok(last);
        }
        let diag = JoinSpec::diagonal(arity);
        let mut acc = self.neg(last);
        for &u in rest.iter().rev() {
            let nu = self.neg(u);
            acc = self.conj(nu, acc, diag.clone());
        }
        Ok(self.neg(acc))
    }

    fn check_declared(&self, f: &Formula) -> Result<(), PrpError> {
        match f.predicates().into_iter().find(|p| !self.signature.contains(p)) {
            Some(p) => Err(PrpError::Undeclared(p)),
            None => Ok(()),
        }
    }

    /// The intensional interpretation `I(f)`.
    pub fn interpret(&mut self, f: &Formula) -> Result<ConceptId, PrpError> {
        self.interpret_with(f, &Assignment::new())
    }

    /// `I(f[env])`: free variables in `env` are replaced by their elements.
    pub fn interpret_with(&mut self, f: &Formula, env: &Assignment) -> Result<ConceptId, PrpError> {
        self.check_declared(f)?;
        Ok(build(&mut Intern(self), f, env)?.expect("interning always yields a concept"))
    }

    /// Like `interpret_with` but never interns; `None` when some part of the
    /// concept does not exist yet.
    pub fn lookup_with(&self, f: &Formula, env: &Assignment) -> Result<Option<ConceptId>, PrpError> {
        build(&mut Lookup(self), f, env)
    }

    /// `g*(t)`.
    pub fn extend_assignment(&mut self, g: &Assignment, t: &Term) -> Result<Elem, PrpError> {
        if let Term::Abs(a) = t {
            self.check_declared(a.body())?;
        }
        Ok(term_elem(&mut Intern(self), t, g)?.expect("interning always yields an element"))
    }

    /// Recovers a formula whose interpretation is `id`.
    pub fn formula_of(&self, id: ConceptId) -> Result<Formula, PrpError> {
        Ok(match self.node(id) {
            ConceptNode::Truth => Formula::Top,
            ConceptNode::Atom { pred, args } => {
                Formula::atom(pred.clone(), args.iter().map(|a| self.key_term(a)).collect::<Result<_, _>>()?)?
            }
            ConceptNode::Identity { args } => Formula::identity(self.key_term(&args[0])?, self.key_term(&args[1])?),
            ConceptNode::Conj { lhs, rhs, join } => {
                Formula::conj(self.formula_of(*lhs)?, self.formula_of(*rhs)?, join.clone())
                    .map_err(|_| PrpError::NotSyntactic(id.0))?
            }
            ConceptNode::Neg(u) => Formula::not(self.formula_of(*u)?),
            ConceptNode::Exists { n, body } => {
                Formula::exists(*n, self.formula_of(*body)?).map_err(|_| PrpError::NotSyntactic(id.0))?
            }
        })
    }

    fn key_term(&self, key: &ArgKey) -> Result<Term, PrpError> {
        match key {
            ArgKey::Var(v) => Ok(Term::Var(v.clone())),
            ArgKey::Elem(e) => self.term_of(*e),
            ArgKey::OpenAbs { term, bound } => {
                if bound.is_empty() {
                    return Ok(Term::Abs(term.clone()));
                }
                let map = bound.iter().map(|(v, e)| Ok((v.clone(), self.term_of(*e)?))).collect::<Result<_, PrpError>>()?;
                let host = Formula::atom(Predicate::new("_", 1), vec![Term::Abs(term.clone())])?;
                match host.substitute(&map)? {
                    Formula::Atom { mut args, .. } => Ok(args.remove(0)),
                    _ => unreachable!("substitution keeps the atom"),
                }
            }
        }
    }

    /// A ground term denoting `e`: constants for particulars, closed
    /// abstractions for concepts.
    pub fn term_of(&self, e: Elem) -> Result<Term, PrpError> {
        match e {
            Elem::Particular(p) => match self.individual(p) {
                Individual::Unit => Err(PrpError::UnitTerm),
                Individual::Named(n) => Ok(Term::Const(n.clone())),
                Individual::Time(t) => Ok(Term::Time(*t)),
                Individual::Stamp(n) => Ok(Term::Stamp(*n)),
            },
            Elem::Concept(c) => Ok(Term::Abs(Box::new(AbstractedTerm::closed(self.formula_of(c)?)))),
        }
    }

    pub fn display_elem(&self, e: Elem) -> String {
        match e {
            Elem::Particular(p) => self.individual(p).to_string(),
            Elem::Concept(c) => self.term_of(e).map(|t| t.to_string()).unwrap_or_else(|_| c.to_string()),
        }
    }

    /// Canonical free variables of an atom argument list.
    pub fn key_free_vars(args: &[ArgKey]) -> Vec<Variable> {
        let mut out = Vec::new();
        args.iter().for_each(|a| a.push_free(&mut out));
        out
    }
}

/// Interning or lookup-only access to the store, so that the recursive
/// interpretation is written once.
trait Builder {
    fn store(&self) -> &ConceptStore;
    fn node(&mut self, node: ConceptNode, arity: usize) -> Option<ConceptId>;
    fn particular(&mut self, ind: Individual) -> Option<ParticularId>;

    fn atom(&mut self, pred: Predicate, args: Vec<ArgKey>) -> Option<ConceptId> {
        let arity = ConceptStore::key_free_vars(&args).len();
        self.node(ConceptNode::Atom { pred, args }, arity)
    }

    fn conj(&mut self, u: ConceptId, v: ConceptId, join: JoinSpec) -> Option<ConceptId> {
        let (k, j) = (self.store().arity(u), self.store().arity(v));
        let arity = if join.is_valid_for(k, j) { join.result_arity(k, j) } else { k + j };
        self.node(ConceptNode::Conj { lhs: u, rhs: v, join }, arity)
    }

    fn neg(&mut self, u: ConceptId) -> Option<ConceptId> {
        let arity = self.store().arity(u);
        self.node(ConceptNode::Neg(u), arity)
    }

    fn exists(&mut self, n: usize, u: ConceptId) -> Option<ConceptId> {
        let k = self.store().arity(u);
        if n == 0 || n > k {
            return Some(u);
        }
        self.node(ConceptNode::Exists { n, body: u }, k - 1)
    }
}

struct Intern<'a>(&'a mut ConceptStore);
struct Lookup<'a>(&'a ConceptStore);

impl Builder for Intern<'_> {
    fn store(&self) -> &ConceptStore {
        self.0
    }
    fn node(&mut self, node: ConceptNode, arity: usize) -> Option<ConceptId> {
        Some(self.0.intern_node(node, arity))
    }
    fn particular(&mut self, ind: Individual) -> Option<ParticularId> {
        Some(self.0.intern_particular(ind))
    }
}

impl Builder for Lookup<'_> {
    fn store(&self) -> &ConceptStore {
        self.0
    }
    fn node(&mut self, node: ConceptNode, _arity: usize) -> Option<ConceptId> {
        self.0.node_ids.get(&node).copied()
    }
    fn particular(&mut self, ind: Individual) -> Option<ParticularId> {
        self.0.find_particular(&ind)
    }
}

fn build<B: Builder>(b: &mut B, f: &Formula, env: &Assignment) -> Result<Option<ConceptId>, PrpError> {
    let free_after = |f: &Formula| -> Vec<Variable> { f.free_vars().into_iter().filter(|v| !env.contains_key(v)).collect() };
    Ok(match f {
        Formula::Top => Some(TRUTH),
        Formula::Atom { pred, args } => {
            let mut keys = Vec::with_capacity(args.len());
            for a in args {
                match arg_key(b, a, env)? {
                    Some(k) => keys.push(k),
                    None => return Ok(None),
                }
            }
            b.atom(pred.clone(), keys)
        }
        Formula::Identity(l, r) => {
            let (Some(l), Some(r)) = (arg_key(b, l, env)?, arg_key(b, r, env)?) else { return Ok(None) };
            let arity = ConceptStore::key_free_vars(&[l.clone(), r.clone()]).len();
            b.node(ConceptNode::Identity { args: [l, r] }, arity)
        }
        Formula::Conj { lhs, rhs, join } => {
            let join = if env.is_empty() { join.clone() } else { crate::syntax::shared_join(&free_after(lhs), &free_after(rhs)) };
            let (Some(u), Some(v)) = (build(b, lhs, env)?, build(b, rhs, env)?) else { return Ok(None) };
            b.conj(u, v, join)
        }
        Formula::Neg(body) => match build(b, body, env)? {
            Some(u) => b.neg(u),
            None => None,
        },
        Formula::Exists { n, body } => {
            let Some(bound) = n.checked_sub(1).and_then(|i| body.free_vars().get(i).cloned()) else {
                return build(b, body, env);
            };
            let mut inner = env.clone();
            inner.remove(&bound);
            let Some(u) = build(b, body, &inner)? else { return Ok(None) };
            let remaining: Vec<Variable> = body.free_vars().into_iter().filter(|v| !inner.contains_key(v)).collect();
            let n = remaining.iter().position(|v| *v == bound).expect("bound variable stays free in the body") + 1;
            b.exists(n, u)
        }
    })
}

fn arg_key<B: Builder>(b: &mut B, t: &Term, env: &Assignment) -> Result<Option<ArgKey>, PrpError> {
    Ok(match t {
        Term::Var(v) => Some(match env.get(v) {
            Some(e) => ArgKey::Elem(*e),
            None => ArgKey::Var(v.clone()),
        }),
        Term::Abs(a) => {
            let bound: Vec<(Variable, Elem)> =
                a.beta().iter().filter_map(|v| env.get(v).map(|e| (v.clone(), *e))).collect();
            if bound.len() == a.beta().len() {
                term_elem(b, t, env)?.map(ArgKey::Elem)
            } else {
                Some(ArgKey::OpenAbs { term: a.clone(), bound })
            }
        }
        other => term_elem(b, other, env)?.map(ArgKey::Elem),
    })
}

fn term_elem<B: Builder>(b: &mut B, t: &Term, g: &Assignment) -> Result<Option<Elem>, PrpError> {
    Ok(match t {
        Term::Var(v) => Some(*g.get(v).ok_or_else(|| PrpError::Unbound(v.clone()))?),
        Term::Const(c) => b.particular(Individual::Named(c.clone())).map(Elem::Particular),
        Term::Time(tense) => b.particular(Individual::Time(*tense)).map(Elem::Particular),
        Term::Stamp(n) => b.particular(Individual::Stamp(*n)).map(Elem::Particular),
        Term::Abs(a) => {
            let mut env = Assignment::new();
            for v in a.beta() {
                env.insert(v.clone(), *g.get(v).ok_or_else(|| PrpError::Unbound(v.clone()))?);
            }
            build(b, a.body(), &env)?.map(Elem::Concept)
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::parse_formula;

    fn store(preds: &[(&str, usize)]) -> ConceptStore {
        let mut s = ConceptStore::new();
        for (n, a) in preds {
            s.declare(Predicate::new(n, *a)).unwrap();
        }
        s
    }

    fn v(n: &str) -> Variable {
        Variable::new(n).unwrap()
    }

    #[test]
    fn atoms_by_arity_and_idempotence() {
        let mut s = store(&[("videoclips", 1), ("Walk", 5)]);
        let u2 = s.interpret(&parse_formula("videoclips(?y)").unwrap()).unwrap();
        assert_eq!(s.arity(u2), 1);
        assert_eq!(s.interpret(&parse_formula("videoclips(?y)").unwrap()).unwrap(), u2);
        let walk = parse_formula("Walk(in_past, person, from_the_couches_in_the_room, NULL, to_the_dining_room_table)").unwrap();
        let w = s.interpret(&walk).unwrap();
        assert_eq!(s.arity(w), 0);
    }

    #[test]
    fn variable_order_matters() {
        let mut s = store(&[("phi", 2)]);
        let a = s.interpret(&parse_formula("phi(?x2, ?x1)").unwrap()).unwrap();
        let b = s.interpret(&parse_formula("phi(?x1, ?x2)").unwrap()).unwrap();
        assert_ne!(a, b);
    }

    #[test]
    fn conj_arity_and_fallback() {
        let mut s = store(&[("p", 5), ("q", 4)]);
        let u = s.interpret(&parse_formula("p(?a, ?b, ?c, ?d, ?e)").unwrap()).unwrap();
        let w = s.interpret(&parse_formula("q(?f, ?g, ?h, ?i)").unwrap()).unwrap();
        let c = s.conj(u, w, JoinSpec::new([(4, 1), (2, 3)]));
        assert_eq!(s.arity(c), 7);
        let bad = s.conj(u, w, JoinSpec::new([(6, 1)]));
        assert_eq!(s.arity(bad), 9);
        assert_eq!(s.conj(u, w, JoinSpec::new([(4, 1), (2, 3)])), c);
    }

    #[test]
    fn neg_and_exists() {
        let mut s = store(&[("p", 5)]);
        let u = s.interpret(&parse_formula("p(?a, ?b, ?c, ?d, ?e)").unwrap()).unwrap();
        let nn = {
            let n = s.neg(u);
            s.neg(n)
        };
        assert_ne!(nn, u);
        assert_eq!(s.arity(nn), 5);
        let e = s.exists(3, u);
        assert_eq!(s.arity(e), 4);
        assert_eq!(s.exists(9, u), u);
    }

    #[test]
    fn union_expansion() {
        let mut s = store(&[("p", 1), ("q", 1), ("r", 2)]);
        let p = s.interpret(&parse_formula("p(?x)").unwrap()).unwrap();
        let q = s.interpret(&parse_formula("q(?x)").unwrap()).unwrap();
        let r = s.interpret(&parse_formula("r(?x, ?y)").unwrap()).unwrap();
        assert_eq!(s.union(&[p]).unwrap(), p);
        let u = s.union(&[q, p]).unwrap();
        let (np, nq) = (s.neg(p), s.neg(q));
        let inner = s.conj(np, nq, JoinSpec::diagonal(1));
        assert_eq!(s.neg(inner), u);
        assert_eq!(s.union(&[p, q]).unwrap(), u);
        assert!(matches!(s.union(&[p, r]), Err(PrpError::MixedArity(..))));
        assert_eq!(s.union(&[]), Err(PrpError::EmptyUnion));
    }

    #[test]
    fn interpretation_is_homomorphic() {
        let mut s = store(&[("Find", 4), ("videoclips", 1), ("phi", 0)]);
        let f = parse_formula("Find(in_present, me, ?y, <<phi()>>) /\\{(1,1)} videoclips(?y)").unwrap();
        let Formula::Conj { lhs, rhs, join } = &f else { panic!() };
        let u1 = s.interpret(lhs).unwrap();
        let u2 = s.interpret(rhs).unwrap();
        let u3 = s.interpret(&f).unwrap();
        assert_eq!(s.conj(u1, u2, join.clone()), u3);
        assert_eq!(s.interpret(&Formula::Top).unwrap(), TRUTH);
        assert_eq!(s.interpret(&parse_formula("?x = ?y").unwrap()).unwrap(), ID);
        let neg = s.interpret(&parse_formula("~ videoclips(?y)").unwrap()).unwrap();
        assert_eq!(s.node(neg), &ConceptNode::Neg(u2));
    }

    #[test]
    fn undeclared_predicate() {
        let mut s = store(&[]);
        let err = s.interpret(&parse_formula("lost(?x)").unwrap()).unwrap_err();
        assert_eq!(err, PrpError::Undeclared(Predicate::new("lost", 1)));
    }

    #[test]
    fn extended_assignment() {
        let mut s = store(&[("psi", 1), ("phi", 2)]);
        let psi = crate::syntax::parse_term("<<psi(?y)>>_{?y}").unwrap();
        let e = s.extend_assignment(&Assignment::new(), &psi).unwrap();
        let expected = s.interpret(&parse_formula("psi(?y)").unwrap()).unwrap();
        assert_eq!(e, Elem::Concept(expected));
        assert_eq!(s.arity(expected), 1);

        let b = s.named("b");
        let open = crate::syntax::parse_term("<<phi(?x, ?y)>>_{?x}^{?y}").unwrap();
        let g: Assignment = [(v("y"), Elem::Particular(b))].into();
        let e = s.extend_assignment(&g, &open).unwrap();
        let expected = s.interpret(&parse_formula("phi(?x, b)").unwrap()).unwrap();
        assert_eq!(e, Elem::Concept(expected));
        assert_eq!(s.arity(expected), 1);
        assert_eq!(s.extend_assignment(&Assignment::new(), &open), Err(PrpError::Unbound(v("y"))));

        let c = crate::syntax::Term::constant("c");
        assert_eq!(s.extend_assignment(&Assignment::new(), &c).unwrap(), Elem::Particular(s.named("c")));
    }

    #[test]
    fn interpret_with_matches_substitution() {
        let mut s = store(&[("p", 2), ("q", 2)]);
        let f = parse_formula("E{?y} (p(?x, ?y) /\\ q(?y, ?z))").unwrap();
        let a = s.named("a");
        let env: Assignment = [(v("x"), Elem::Particular(a))].into();
        let direct = s.interpret_with(&f, &env).unwrap();
        let subst = f.substitute(&[(v("x"), Term::constant("a"))].into()).unwrap();
        assert_eq!(s.interpret(&subst).unwrap(), direct);
        assert_eq!(s.lookup_with(&f, &env).unwrap(), Some(direct));
        assert_eq!(s.lookup_with(&parse_formula("p(?x, nobody)").unwrap(), &Assignment::new()).unwrap(), None);
    }

    #[test]
    fn formula_round_trip() {
        let mut s = store(&[("Know", 3), ("Find", 4), ("videoclips", 1), ("phi", 0), ("r", 2)]);
        for text in [
            "Know(in_present, me, <<Find(in_present, me, ?y, <<phi()>>) /\\{(1,1)} videoclips(?y)>>_{?y})",
            "E{1} ~ r(?x, ?y)",
            "r(?x, ?y) /\\{(1,2)} r(?z, ?x)",
            "thinks = @3",
        ] {
            let f = parse_formula(text).unwrap();
            let c = s.interpret(&f).unwrap();
            let back = s.formula_of(c).unwrap();
            assert_eq!(back, f, "{text}");
        }
        let p = s.interpret(&parse_formula("r(?x, ?y)").unwrap()).unwrap();
        let bad = s.conj(p, p, JoinSpec::new([(5, 5)]));
        assert_eq!(s.formula_of(bad), Err(PrpError::NotSyntactic(bad.0)));
    }
}
