//! Reified knowledge: `Know(time, subject, content)` atoms held in a
//! temporary and a permanent store, the axiom rules over them, consolidation
//! and query answering.

mod answer;
mod chain;
mod consolidate;

use std::fmt;

use thiserror::Error;

use crate::prp::{ArgKey, ConceptId, ConceptNode, ConceptStore, Elem, Individual, ParticularId, PrpError};
use crate::syntax::{Formula, Predicate, Tense, Term};
use crate::worlds::WorldError;

pub use answer::{answer, extracted, Answer};
pub use chain::{apply_4, apply_k, apply_t_ground, apply_t_open, forward_chain, Derivation, TraceStep};
pub use consolidate::{consolidate, consolidate_concept};

pub const ME: &str = "me";

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EpistemicError {
    #[error("knowledge content must be an abstracted term, got {0}")]
    NotAbstraction(String),
    #[error("query has free variables")]
    OpenQuery,
    #[error(transparent)]
    Prp(#[from] PrpError),
    #[error(transparent)]
    World(#[from] WorldError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct AtomId(pub u32);

impl fmt::Display for AtomId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "k{}", self.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Rule {
    Experience,
    Ta,
    Tb,
    Ax4,
    AxK,
}

impl Rule {
    pub fn name(self) -> &'static str {
        match self {
            Rule::Experience => "experience",
            Rule::Ta => "T_a",
            Rule::Tb => "T_b",
            Rule::Ax4 => "Ax4",
            Rule::AxK => "AxK",
        }
    }
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Provenance {
    Experience,
    /// Loaded from a `rule` line.
    Innate,
    Derived { rule: Rule, parents: Vec<AtomId> },
    Consolidated { tau: u64, prior: Box<Provenance> },
}

impl Provenance {
    pub fn rule(&self) -> Option<Rule> {
        match self {
            Provenance::Experience => Some(Rule::Experience),
            Provenance::Innate => None,
            Provenance::Derived { rule, .. } => Some(*rule),
            Provenance::Consolidated { prior, .. } => prior.rule(),
        }
    }
}

impl fmt::Display for Provenance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Provenance::Experience => f.write_str("experience"),
            Provenance::Innate => f.write_str("innate"),
            Provenance::Derived { rule, parents } => {
                write!(f, "{rule}(")?;
                for (i, p) in parents.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    write!(f, "{p}")?;
                }
                f.write_str(")")
            }
            Provenance::Consolidated { tau, prior } => write!(f, "consolidated@{tau} {prior}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KnowAtom {
    pub id: AtomId,
    pub time: Tense,
    pub subject: ParticularId,
    pub content: ConceptId,
    pub provenance: Provenance,
    /// Introspection depth: 0 for first-order knowledge, +1 per `Ax4` step.
    pub depth: usize,
    /// For conjunctions built by `T_b`: the instance concepts.
    pub conjuncts: Vec<ConceptId>,
}

impl KnowAtom {
    pub fn key(&self) -> (Tense, ParticularId, ConceptId) {
        (self.time, self.subject, self.content)
    }

    /// `Know(time, subject, <<content>>)`.
    pub fn formula(&self, store: &ConceptStore) -> Result<Formula, PrpError> {
        Ok(Formula::atom(
            Predicate::know(),
            vec![
                Term::Time(self.time),
                store.term_of(Elem::Particular(self.subject))?,
                store.term_of(Elem::Concept(self.content))?,
            ],
        )?)
    }

    /// The ground `Know` proposition for this atom, interned.
    pub fn proposition(&self, store: &mut ConceptStore) -> ConceptId {
        let time = store.intern_particular(Individual::Time(self.time));
        store.intern_atom(
            Predicate::know(),
            vec![
                ArgKey::Elem(Elem::Particular(time)),
                ArgKey::Elem(Elem::Particular(self.subject)),
                ArgKey::Elem(Elem::Concept(self.content)),
            ],
        )
    }
}

/// Number of nested `Know` layers inside a concept.
pub fn know_nesting(store: &ConceptStore, c: ConceptId) -> usize {
    match store.node(c) {
        ConceptNode::Atom { pred, args } => {
            let inner = args
                .iter()
                .filter_map(|a| match a {
                    ArgKey::Elem(Elem::Concept(x)) => Some(know_nesting(store, *x)),
                    _ => None,
                })
                .max()
                .unwrap_or(0);
            inner + usize::from(pred.is_know())
        }
        ConceptNode::Conj { lhs, rhs, .. } => know_nesting(store, *lhs).max(know_nesting(store, *rhs)),
        ConceptNode::Neg(x) | ConceptNode::Exists { body: x, .. } => know_nesting(store, *x),
        ConceptNode::Truth | ConceptNode::Identity { .. } => 0,
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Memory {
    temporary: Vec<KnowAtom>,
    permanent: Vec<KnowAtom>,
    next_id: u32,
}

impl Memory {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn temporary(&self) -> &[KnowAtom] {
        &self.temporary
    }

    pub fn permanent(&self) -> &[KnowAtom] {
        &self.permanent
    }

    /// Every atom, ordered by id.
    pub fn atoms(&self) -> Vec<&KnowAtom> {
        let mut all: Vec<&KnowAtom> = self.temporary.iter().chain(&self.permanent).collect();
        all.sort_by_key(|a| a.id);
        all
    }

    pub fn len(&self) -> usize {
        self.temporary.len() + self.permanent.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn get(&self, id: AtomId) -> Option<&KnowAtom> {
        self.temporary.iter().chain(&self.permanent).find(|a| a.id == id)
    }

    pub fn contains(&self, time: Tense, subject: ParticularId, content: ConceptId) -> bool {
        self.temporary.iter().chain(&self.permanent).any(|a| a.key() == (time, subject, content))
    }

    /// Adds an atom to temporary memory unless one with the same key is
    /// already held.
    pub fn insert(&mut self, d: Derivation) -> Option<AtomId> {
        if self.contains(d.time, d.subject, d.content) {
            return None;
        }
        let id = AtomId(self.next_id);
        self.next_id += 1;
        self.temporary.push(KnowAtom {
            id,
            time: d.time,
            subject: d.subject,
            content: d.content,
            provenance: d.provenance,
            depth: d.depth,
            conjuncts: d.conjuncts,
        });
        Some(id)
    }

    /// `Know(in_present, me, g*(t))` from direct experience.
    pub fn assert_experience(
        &mut self,
        store: &mut ConceptStore,
        t: &Term,
        g: &crate::prp::Assignment,
    ) -> Result<Option<AtomId>, EpistemicError> {
        if !matches!(t, Term::Abs(_)) {
            return Err(EpistemicError::NotAbstraction(t.to_string()));
        }
        let Elem::Concept(content) = store.extend_assignment(g, t)? else {
            return Err(EpistemicError::NotAbstraction(t.to_string()));
        };
        let me = store.named(ME);
        Ok(self.insert(Derivation {
            time: Tense::Present,
            subject: me,
            content,
            provenance: Provenance::Experience,
            depth: 0,
            conjuncts: Vec::new(),
        }))
    }

    /// Stores `antecedent => consequent` as the known sentence
    /// `~(antecedent /\ ~consequent)`.
    pub fn add_rule(
        &mut self,
        store: &mut ConceptStore,
        antecedent: &Formula,
        consequent: &Formula,
    ) -> Result<Option<AtomId>, EpistemicError> {
        let f = implication(antecedent, consequent);
        let content = store.interpret(&f)?;
        let me = store.named(ME);
        Ok(self.insert(Derivation {
            time: Tense::Present,
            subject: me,
            content,
            provenance: Provenance::Innate,
            depth: 0,
            conjuncts: Vec::new(),
        }))
    }

    /// `(time, subject, content)` rows for the `Know` table of a world.
    pub fn know_rows(&self, store: &mut ConceptStore) -> Vec<[Elem; 3]> {
        self.atoms()
            .into_iter()
            .map(|a| {
                let t = store.intern_particular(Individual::Time(a.time));
                [Elem::Particular(t), Elem::Particular(a.subject), Elem::Concept(a.content)]
            })
            .collect()
    }

    fn take_temporary(&mut self) -> Vec<KnowAtom> {
        std::mem::take(&mut self.temporary)
    }

    fn push_permanent(&mut self, atom: KnowAtom) -> bool {
        if self.permanent.iter().any(|a| a.key() == atom.key()) {
            return false;
        }
        self.permanent.push(atom);
        true
    }
}

/// `~(a /\ ~b)`, the encoding of `a => b`.
pub fn implication(a: &Formula, b: &Formula) -> Formula {
    Formula::not(Formula::and(a.clone(), Formula::not(b.clone())))
}

/// Splits the concept of `~(A /\ ~B)` into `(A, B)`.
pub fn implication_parts(store: &ConceptStore, c: ConceptId) -> Option<(ConceptId, ConceptId)> {
    let ConceptNode::Neg(inner) = store.node(c) else { return None };
    let ConceptNode::Conj { lhs, rhs, .. } = store.node(*inner) else { return None };
    let ConceptNode::Neg(b) = store.node(*rhs) else { return None };
    Some((*lhs, *b))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::prp::Assignment;
    use crate::syntax::{parse_formula, parse_term};

    fn store() -> ConceptStore {
        let mut s = ConceptStore::new();
        for (n, a) in [("psi", 1), ("phi", 0), ("p", 0), ("q", 0)] {
            s.declare(Predicate::new(n, a)).unwrap();
        }
        s
    }

    #[test]
    fn experience_atoms() {
        let mut s = store();
        let mut m = Memory::new();
        let t = parse_term("<<psi(?y)>>_{?y}").unwrap();
        let id = m.assert_experience(&mut s, &t, &Assignment::new()).unwrap().unwrap();
        let a = m.get(id).unwrap();
        assert_eq!(a.time, Tense::Present);
        assert_eq!(s.individual(a.subject), &Individual::Named(ME.into()));
        assert_eq!(s.arity(a.content), 1);
        assert_eq!(a.formula(&s).unwrap().to_string(), "Know(in_present, me, <<psi(?y)>>_{?y})");
        assert_eq!(m.assert_experience(&mut s, &t, &Assignment::new()).unwrap(), None);
        assert_eq!(m.len(), 1);

        let sentence = parse_term("<<phi>>").unwrap();
        let id = m.assert_experience(&mut s, &sentence, &Assignment::new()).unwrap().unwrap();
        assert_eq!(s.arity(m.get(id).unwrap().content), 0);
        assert!(m.assert_experience(&mut s, &Term::constant("a"), &Assignment::new()).is_err());
    }

    #[test]
    fn rules_decompose() {
        let mut s = store();
        let mut m = Memory::new();
        let (a, b) = (parse_formula("p").unwrap(), parse_formula("q").unwrap());
        let id = m.add_rule(&mut s, &a, &b).unwrap().unwrap();
        let content = m.get(id).unwrap().content;
        let (ia, ib) = (s.interpret(&a).unwrap(), s.interpret(&b).unwrap());
        assert_eq!(implication_parts(&s, content), Some((ia, ib)));
        assert_eq!(implication_parts(&s, ia), None);
    }

    #[test]
    fn nesting_counts_know_layers() {
        let mut s = store();
        let f = parse_formula("Know(in_present, me, <<Know(in_present, me, <<p>>)>>)").unwrap();
        let c = s.interpret(&f).unwrap();
        assert_eq!(know_nesting(&s, c), 2);
        let p = s.interpret(&parse_formula("p").unwrap()).unwrap();
        assert_eq!(know_nesting(&s, p), 0);
    }
}
