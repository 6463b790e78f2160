use std::collections::HashMap;

use super::{KnowAtom, Memory, Provenance};
use crate::prp::{ArgKey, ConceptId, ConceptNode, ConceptStore, Elem, Individual, PrpError};
use crate::syntax::{Predicate, Tense};

/// Rewrites a concept for permanent storage: every non-`Know` atom whose
/// first argument is a time value gains the leading stamp `@tau`, with
/// `in_present` shifted to `in_past`. `Know` atoms keep their own
/// arguments; their content is rewritten recursively.
pub fn consolidate_concept(
    store: &mut ConceptStore,
    c: ConceptId,
    tau: u64,
    memo: &mut HashMap<ConceptId, ConceptId>,
) -> Result<ConceptId, PrpError> {
    if let Some(out) = memo.get(&c) {
        return Ok(*out);
    }
    let out = match store.node(c).clone() {
        ConceptNode::Truth | ConceptNode::Identity { .. } => c,
        ConceptNode::Atom { pred, args } if pred.is_know() => {
            let mut new_args = Vec::with_capacity(args.len());
            for a in args {
                new_args.push(match a {
                    ArgKey::Elem(Elem::Concept(x)) => ArgKey::Elem(Elem::Concept(consolidate_concept(store, x, tau, memo)?)),
                    other => other,
                });
            }
            store.intern_atom(pred, new_args)
        }
        ConceptNode::Atom { pred, args } => {
            let time = match args.first() {
                Some(ArgKey::Elem(Elem::Particular(p))) => match store.individual(*p) {
                    Individual::Time(t) => Some(*t),
                    _ => None,
                },
                _ => None,
            };
            match time {
                None => c,
                Some(t) => {
                    let shifted = if t == Tense::Present { Tense::Past } else { t };
                    let stamp = store.intern_particular(Individual::Stamp(tau));
                    let tense = store.intern_particular(Individual::Time(shifted));
                    let wide = Predicate::new(pred.name(), pred.arity() + 1);
                    store.declare(wide.clone())?;
                    let mut new_args = vec![ArgKey::Elem(Elem::Particular(stamp)), ArgKey::Elem(Elem::Particular(tense))];
                    new_args.extend(args.into_iter().skip(1));
                    store.intern_atom(wide, new_args)
                }
            }
        }
        ConceptNode::Conj { lhs, rhs, join } => {
            let l = consolidate_concept(store, lhs, tau, memo)?;
            let r = consolidate_concept(store, rhs, tau, memo)?;
            store.conj(l, r, join)
        }
        ConceptNode::Neg(x) => {
            let x = consolidate_concept(store, x, tau, memo)?;
            store.neg(x)
        }
        ConceptNode::Exists { n, body } => {
            let b = consolidate_concept(store, body, tau, memo)?;
            store.exists(n, b)
        }
    };
    memo.insert(c, out);
    Ok(out)
}

/// Moves every temporary atom into permanent memory with its content
/// consolidated at `tau`. Atom ids are kept.
pub fn consolidate(mem: &Memory, store: &mut ConceptStore, tau: u64) -> Result<Memory, PrpError> {
    let mut out = mem.clone();
    let mut memo = HashMap::new();
    for a in out.take_temporary() {
        let content = consolidate_concept(store, a.content, tau, &mut memo)?;
        let conjuncts =
            a.conjuncts.iter().map(|c| consolidate_concept(store, *c, tau, &mut memo)).collect::<Result<_, _>>()?;
        out.push_permanent(KnowAtom {
            id: a.id,
            time: a.time,
            subject: a.subject,
            content,
            provenance: Provenance::Consolidated { tau, prior: Box::new(a.provenance) },
            depth: a.depth,
            conjuncts,
        });
    }
    Ok(out)
}
