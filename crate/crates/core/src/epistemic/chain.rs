use std::collections::BTreeMap;

use super::{implication_parts, AtomId, EpistemicError, KnowAtom, Memory, Provenance, Rule};
use crate::prp::{ConceptId, ConceptStore, ParticularId};
use crate::syntax::{Formula, Tense};
use crate::worlds::World;

/// A candidate atom produced by a rule, before it gets an id.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Derivation {
    pub time: Tense,
    pub subject: ParticularId,
    pub content: ConceptId,
    pub provenance: Provenance,
    pub depth: usize,
    pub conjuncts: Vec<ConceptId>,
}

impl Derivation {
    fn derived(parent: &KnowAtom, rule: Rule, parents: Vec<AtomId>, content: ConceptId) -> Self {
        Derivation {
            time: parent.time,
            subject: parent.subject,
            content,
            provenance: Provenance::Derived { rule, parents },
            depth: 0,
            conjuncts: Vec::new(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TraceStep {
    pub rule: Rule,
    pub inputs: Vec<AtomId>,
    pub output: AtomId,
}

/// `T_a`: the sentence whose concept is the atom's content, when the
/// content is a proposition.
pub fn apply_t_ground(store: &ConceptStore, a: &KnowAtom) -> Option<Formula> {
    if store.arity(a.content) != 0 {
        return None;
    }
    store.formula_of(a.content).ok()
}

/// `T_b`: knowing an open formula yields knowing the conjunction of all its
/// instances true in `world`. Nothing is produced for an empty extension.
pub fn apply_t_open(store: &mut ConceptStore, world: &World, a: &KnowAtom) -> Result<Option<Derivation>, EpistemicError> {
    if store.arity(a.content) == 0 {
        return Ok(None);
    }
    let Ok(psi) = store.formula_of(a.content) else { return Ok(None) };
    let ext = world.extension(store, a.content)?;
    if ext.is_empty() {
        return Ok(None);
    }
    let free = psi.free_vars();
    let mut instances = Vec::with_capacity(ext.len());
    for row in ext.iter() {
        let mut map = BTreeMap::new();
        for (v, e) in free.iter().zip(row) {
            map.insert(v.clone(), store.term_of(*e)?);
        }
        instances.push(psi.substitute(&map).map_err(crate::prp::PrpError::from)?);
    }
    let conjuncts = instances.iter().map(|f| store.interpret(f)).collect::<Result<Vec<_>, _>>()?;
    let mut rev = instances.into_iter().rev();
    let last = rev.next().expect("nonempty extension");
    let sentence = rev.fold(last, |acc, f| Formula::and(f, acc));
    let content = store.interpret(&sentence)?;
    let mut d = Derivation::derived(a, Rule::Tb, vec![a.id], content);
    d.conjuncts = conjuncts;
    Ok(Some(d))
}

/// `Ax4`: from `Know(t, s, u)` to `Know(t, s, I(Know(t, s, u)))`.
pub fn apply_4(store: &mut ConceptStore, a: &KnowAtom) -> Derivation {
    let inner = a.proposition(store);
    let mut d = Derivation::derived(a, Rule::Ax4, vec![a.id], inner);
    d.depth = a.depth + 1;
    d
}

/// `AxK`: from `Know A` and `Know (A => B)` to `Know B`.
pub fn apply_k(store: &ConceptStore, a: &KnowAtom, imp: &KnowAtom) -> Option<Derivation> {
    if a.time != imp.time || a.subject != imp.subject {
        return None;
    }
    let (ante, cons) = implication_parts(store, imp.content)?;
    (ante == a.content).then(|| Derivation::derived(a, Rule::AxK, vec![a.id, imp.id], cons))
}

/// Applies `T_b`, `T_a` (conjunct materialization), `AxK` and `Ax4` (up to
/// `budget` introspection levels) until nothing new is derived. The world's
/// `Know` rows are refreshed from memory at the start of every round.
pub fn forward_chain(
    mem: &Memory,
    store: &mut ConceptStore,
    world: &World,
    budget: usize,
) -> Result<(Memory, Vec<TraceStep>), EpistemicError> {
    let mut mem = mem.clone();
    let mut trace = Vec::new();
    let add = |mem: &mut Memory, d: Derivation, trace: &mut Vec<TraceStep>| -> bool {
        let Provenance::Derived { rule, parents } = &d.provenance else { unreachable!("rules derive") };
        let (rule, inputs) = (*rule, parents.clone());
        match mem.insert(d) {
            Some(output) => {
                trace.push(TraceStep { rule, inputs, output });
                true
            }
            None => false,
        }
    };
    loop {
        let mut changed = false;
        let w = world.with_knowledge(mem.know_rows(store));

        let snapshot: Vec<KnowAtom> = mem.atoms().into_iter().cloned().collect();
        for a in snapshot.iter().filter(|a| a.provenance != Provenance::Innate) {
            if let Ok(Some(d)) = apply_t_open(store, &w, a) {
                changed |= add(&mut mem, d, &mut trace);
            }
        }

        let snapshot: Vec<KnowAtom> = mem.atoms().into_iter().cloned().collect();
        for a in snapshot.iter().filter(|a| a.provenance.rule() == Some(Rule::Tb)) {
            for c in &a.conjuncts {
                changed |= add(&mut mem, Derivation::derived(a, Rule::Ta, vec![a.id], *c), &mut trace);
            }
        }

        let snapshot: Vec<KnowAtom> = mem.atoms().into_iter().cloned().collect();
        for imp in snapshot.iter().filter(|r| implication_parts(store, r.content).is_some()) {
            for a in &snapshot {
                if let Some(d) = apply_k(store, a, imp) {
                    changed |= add(&mut mem, d, &mut trace);
                }
            }
        }

        let snapshot: Vec<KnowAtom> = mem.atoms().into_iter().cloned().collect();
        for a in snapshot.iter().filter(|a| a.depth < budget && a.provenance != Provenance::Innate) {
            let d = apply_4(store, a);
            changed |= add(&mut mem, d, &mut trace);
        }

        if !changed {
            return Ok((mem, trace));
        }
    }
}
