use std::collections::BTreeSet;
use std::fmt;

use super::{implication_parts, EpistemicError, Memory};
use crate::prp::{ConceptId, ConceptNode, ConceptStore};
use crate::relalg;
use crate::syntax::Formula;
use crate::worlds::World;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Answer {
    Yes,
    No,
    Unknown,
}

impl fmt::Display for Answer {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Answer::Yes => "yes",
            Answer::No => "no",
            Answer::Unknown => "unknown",
        })
    }
}

fn split(store: &ConceptStore, c: ConceptId, out: &mut BTreeSet<ConceptId>) {
    if !out.insert(c) {
        return;
    }
    if let ConceptNode::Conj { lhs, rhs, join } = store.node(c) {
        if join.is_empty() && store.arity(c) == 0 {
            split(store, *lhs, out);
            split(store, *rhs, out);
        }
    }
}

/// Propositions held as known: the D0 contents in memory, their
/// conjuncts, closed under modus ponens with known implications.
pub fn extracted(mem: &Memory, store: &ConceptStore) -> BTreeSet<ConceptId> {
    let mut out = BTreeSet::new();
    for a in mem.atoms() {
        if store.arity(a.content) == 0 {
            split(store, a.content, &mut out);
        }
        for c in &a.conjuncts {
            split(store, *c, &mut out);
        }
    }
    loop {
        let new: Vec<ConceptId> = out
            .iter()
            .filter_map(|c| implication_parts(store, *c))
            .filter(|(a, b)| out.contains(a) && !out.contains(b))
            .map(|(_, b)| b)
            .collect();
        if new.is_empty() {
            return out;
        }
        for b in new {
            split(store, b, &mut out);
        }
    }
}

/// Yes when `q` or its evaluation holds, no when its negation is known or
/// it evaluates false over the active domain, unknown when it cannot be
/// evaluated.
pub fn answer(mem: &Memory, store: &mut ConceptStore, world: &World, q: &Formula) -> Result<Answer, EpistemicError> {
    if !q.is_sentence() {
        return Err(EpistemicError::OpenQuery);
    }
    let u = store.interpret(q)?;
    let known = extracted(mem, store);
    if known.contains(&u) {
        return Ok(Answer::Yes);
    }
    let refuted = match store.node(u) {
        ConceptNode::Neg(x) => known.contains(x),
        _ => false,
    };
    if refuted || known.contains(&store.neg(u)) {
        return Ok(Answer::No);
    }
    let w = world.with_knowledge(mem.know_rows(store));
    Ok(match w.extension(store, u) {
        Ok(r) if relalg::truth_collapse(&r).is_true() => Answer::Yes,
        Ok(_) => Answer::No,
        Err(_) => Answer::Unknown,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::prp::{Assignment, Elem};
    use crate::syntax::{parse_formula, parse_term, Predicate};

    #[test]
    fn three_outcomes() {
        let mut store = ConceptStore::new();
        for (n, a) in [("p", 1), ("q", 1), ("r", 1)] {
            store.declare(Predicate::new(n, a)).unwrap();
        }
        let a = Elem::Particular(store.named("a"));
        let world = World::new(0).with_fact(Predicate::new("p", 1), vec![a]).unwrap();
        let mut mem = Memory::new();
        mem.assert_experience(&mut store, &parse_term("<<q(b)>>").unwrap(), &Assignment::new()).unwrap();
        let f = |s: &str| parse_formula(s).unwrap();
        assert_eq!(answer(&mem, &mut store, &world, &f("q(b)")).unwrap(), Answer::Yes);
        assert_eq!(answer(&mem, &mut store, &world, &f("p(a)")).unwrap(), Answer::Yes);
        assert_eq!(answer(&mem, &mut store, &world, &f("p(b)")).unwrap(), Answer::No);
        assert_eq!(answer(&mem, &mut store, &world, &f("~ q(b)")).unwrap(), Answer::No);
        assert_eq!(answer(&mem, &mut store, &world, &f("r(a)")).unwrap(), Answer::Unknown);
        assert!(answer(&mem, &mut store, &world, &f("p(?x)")).is_err());
    }
}
