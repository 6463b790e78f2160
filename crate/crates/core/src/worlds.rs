//! Time-indexed worlds: the extensionalization of concepts into relations.
//!
//! A world stores one table per predicate (full rows, one column per
//! argument). The extension of an atomic concept is read off the table by
//! matching its argument pattern; composite concepts follow the algebra
//! structurally. `Know/3` has no table of its own: its rows come from the
//! knowledge attached with [`World::with_knowledge`].

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::sync::{Arc, Mutex};

use thiserror::Error;

use crate::prp::{ArgKey, Assignment, ConceptId, ConceptNode, ConceptStore, Elem, Individual, PrpError};
use crate::relalg::{self, ActiveDomain, JoinSpec, RelalgError, Relation};
use crate::syntax::{Formula, Predicate, Tense, Variable};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum WorldError {
    #[error("no extension for {0} in this world")]
    MissingExtension(Predicate),
    #[error("concept {0} is not a plain atom and cannot be given a base extension")]
    NotAtomic(ConceptId),
    #[error("Know has no base extension; it is backed by memory")]
    KnowBase,
    #[error("relation of arity {got} given for concept {concept} of arity {expected}")]
    ArityMismatch { concept: ConceptId, expected: usize, got: usize },
    #[error("row {row:?} does not fit {pred}")]
    BadRow { pred: Predicate, row: Vec<Elem> },
    #[error("formula has free variables: {0}")]
    NotSentence(String),
    #[error("assignment variables do not match the free variables of the formula")]
    AlphaMismatch,
    #[error(transparent)]
    Relalg(#[from] RelalgError),
    #[error(transparent)]
    Prp(#[from] PrpError),
}

pub type Table = Relation<Elem>;

/// A world snapshot `h` at a time instance.
#[derive(Debug)]
pub struct World {
    timestamp: u64,
    facts: BTreeMap<Predicate, Arc<Table>>,
    known: Arc<Table>,
    declared: BTreeSet<Elem>,
    ad: ActiveDomain<Elem>,
    memo: Mutex<HashMap<ConceptId, Arc<Table>>>,
}

impl Clone for World {
    fn clone(&self) -> Self {
        World {
            timestamp: self.timestamp,
            facts: self.facts.clone(),
            known: self.known.clone(),
            declared: self.declared.clone(),
            ad: self.ad.clone(),
            memo: Mutex::new(HashMap::new()),
        }
    }
}

impl PartialEq for World {
    fn eq(&self, other: &Self) -> bool {
        self.timestamp == other.timestamp
            && self.facts == other.facts
            && self.known == other.known
            && self.declared == other.declared
    }
}

impl World {
    pub fn new(timestamp: u64) -> Self {
        World {
            timestamp,
            facts: BTreeMap::new(),
            known: Arc::new(Relation::empty(3)),
            declared: BTreeSet::new(),
            ad: ActiveDomain::new([]),
            memo: Mutex::new(HashMap::new()),
        }
    }

    pub fn timestamp(&self) -> u64 {
        self.timestamp
    }

    pub fn at(&self, timestamp: u64) -> World {
        let mut w = self.clone();
        w.timestamp = timestamp;
        w
    }

    pub fn active_domain(&self) -> &ActiveDomain<Elem> {
        &self.ad
    }

    pub fn tables(&self) -> impl Iterator<Item = (&Predicate, &Table)> {
        self.facts.iter().map(|(p, t)| (p, &**t))
    }

    pub fn table(&self, pred: &Predicate) -> Option<&Table> {
        if pred.is_know() {
            return Some(&self.known);
        }
        self.facts.get(pred).map(|t| &**t)
    }

    pub fn known(&self) -> &Table {
        &self.known
    }

    fn rebuild(mut self) -> World {
        let mut elems: BTreeSet<Elem> = self.declared.clone();
        for t in self.facts.values() {
            elems.extend(t.elements().copied());
        }
        elems.extend(self.known.elements().copied());
        self.ad = ActiveDomain::new(elems);
        self.memo = Mutex::new(HashMap::new());
        self
    }

    /// Adds elements to the active domain without mentioning them in facts.
    pub fn with_particulars(&self, elems: impl IntoIterator<Item = Elem>) -> World {
        let mut w = self.clone();
        w.declared.extend(elems);
        w.rebuild()
    }

    /// Replaces the whole table of `pred`.
    pub fn with_table(&self, pred: Predicate, table: Table) -> Result<World, WorldError> {
        if pred.is_know() {
            return Err(WorldError::KnowBase);
        }
        if table.arity() != pred.arity() {
            return Err(WorldError::BadRow { pred, row: Vec::new() });
        }
        let mut w = self.clone();
        w.facts.insert(pred, Arc::new(table));
        Ok(w.rebuild())
    }

    /// Adds one row to the table of `pred`, creating the table if needed.
    pub fn with_fact(&self, pred: Predicate, row: Vec<Elem>) -> Result<World, WorldError> {
        if pred.is_know() {
            return Err(WorldError::KnowBase);
        }
        let mut table = self.facts.get(&pred).map(|t| (**t).clone()).unwrap_or_else(|| Relation::empty(pred.arity()));
        if table.insert(row.clone()).is_err() {
            return Err(WorldError::BadRow { pred, row });
        }
        let mut w = self.clone();
        w.facts.insert(pred, Arc::new(table));
        Ok(w.rebuild())
    }

    /// Replaces the memory-backed `Know` rows `(time, subject, content)`.
    pub fn with_knowledge(&self, rows: impl IntoIterator<Item = [Elem; 3]>) -> World {
        let mut w = self.clone();
        w.known = Arc::new(Relation::from_tuples(3, rows.into_iter().map(|r| r.to_vec())).expect("Know rows have three columns"));
        w.rebuild()
    }

    /// Fixes the extension of the atomic concept `u` to `r`: rows of the
    /// predicate table matching `u`'s pattern are replaced by `r`'s tuples.
    pub fn set_base_extension(&self, store: &ConceptStore, u: ConceptId, r: &Table) -> Result<World, WorldError> {
        let ConceptNode::Atom { pred, args } = store.node(u) else {
            return Err(WorldError::NotAtomic(u));
        };
        if pred.is_know() {
            return Err(WorldError::KnowBase);
        }
        if args.iter().any(|a| matches!(a, ArgKey::OpenAbs { .. })) {
            return Err(WorldError::NotAtomic(u));
        }
        let expected = store.arity(u);
        if r.arity() != expected {
            return Err(WorldError::ArityMismatch { concept: u, expected, got: r.arity() });
        }
        let vars = ConceptStore::key_free_vars(args);
        let mut table = self.facts.get(pred).map(|t| (**t).clone()).unwrap_or_else(|| Relation::empty(pred.arity()));
        table.retain(|row| match_row(store, &self.ad, args, &vars, row).is_empty());
        for tuple in r.iter() {
            let row = args
                .iter()
                .map(|a| match a {
                    ArgKey::Elem(e) => *e,
                    ArgKey::Var(v) => tuple[vars.iter().position(|w| w == v).expect("variable in pattern")],
                    ArgKey::OpenAbs { .. } => unreachable!("rejected above"),
                })
                .collect();
            table.insert(row).expect("row has the predicate arity");
        }
        let mut w = self.clone();
        w.facts.insert(pred.clone(), Arc::new(table));
        Ok(w.rebuild())
    }

    /// `h(u)`, memoized per world.
    pub fn extension(&self, store: &ConceptStore, u: ConceptId) -> Result<Arc<Table>, WorldError> {
        if let Some(r) = self.memo.lock().expect("memo lock").get(&u) {
            return Ok(r.clone());
        }
        let r = Arc::new(self.compute(store, u, true)?);
        self.memo.lock().expect("memo lock").insert(u, r.clone());
        Ok(r)
    }

    /// `h(u)` recomputed from scratch without touching the memo table.
    pub fn extension_uncached(&self, store: &ConceptStore, u: ConceptId) -> Result<Table, WorldError> {
        self.compute(store, u, false)
    }

    fn sub(&self, store: &ConceptStore, u: ConceptId, cached: bool) -> Result<Arc<Table>, WorldError> {
        if cached {
            self.extension(store, u)
        } else {
            Ok(Arc::new(self.compute(store, u, false)?))
        }
    }

    fn compute(&self, store: &ConceptStore, u: ConceptId, cached: bool) -> Result<Table, WorldError> {
        Ok(match store.node(u) {
            ConceptNode::Truth => Relation::truth(),
            ConceptNode::Atom { pred, args } => {
                let table = self.table(pred).ok_or_else(|| WorldError::MissingExtension(pred.clone()))?;
                let vars = ConceptStore::key_free_vars(args);
                let mut out = Relation::empty(vars.len());
                for row in table.iter() {
                    for tuple in match_row(store, &self.ad, args, &vars, row) {
                        out.insert(tuple)?;
                    }
                }
                out
            }
            ConceptNode::Identity { args } => {
                let vars = ConceptStore::key_free_vars(args);
                let mut out = Relation::empty(vars.len());
                for tuple in self.ad.power(vars.len()) {
                    let g: Assignment = vars.iter().cloned().zip(tuple.iter().copied()).collect();
                    let l = key_value(store, &self.ad, &args[0], &g);
                    let r = key_value(store, &self.ad, &args[1], &g);
                    if l.is_some() && l == r {
                        out.insert(tuple)?;
                    }
                }
                out
            }
            ConceptNode::Conj { lhs, rhs, join } => {
                let l = self.sub(store, *lhs, cached)?;
                let r = self.sub(store, *rhs, cached)?;
                if join.is_valid_for(l.arity(), r.arity()) {
                    relalg::natural_join(&l, &r, join)?
                } else {
                    relalg::natural_join(&l, &r, &JoinSpec::empty())?
                }
            }
            ConceptNode::Neg(body) => relalg::complement(&*self.sub(store, *body, cached)?, &self.ad)?,
            ConceptNode::Exists { n, body } => relalg::project_out(&*self.sub(store, *body, cached)?, *n),
        })
    }

    /// Truth value of a sentence: `h(I(f))` as `t` or `f`.
    pub fn eval_sentence(&self, store: &mut ConceptStore, f: &Formula) -> Result<bool, WorldError> {
        let free = f.free_vars();
        if !free.is_empty() {
            let names: Vec<String> = free.iter().map(|v| format!("?{v}")).collect();
            return Err(WorldError::NotSentence(names.join(" ")));
        }
        let u = store.interpret(f)?;
        Ok(relalg::truth_collapse(&*self.extension(store, u)?).is_true())
    }

    /// All assignments of `alpha` (the free variables of `f`, in any order)
    /// that make `f` true.
    pub fn satisfying_assignments(
        &self,
        store: &mut ConceptStore,
        f: &Formula,
        alpha: &[Variable],
    ) -> Result<Vec<Assignment>, WorldError> {
        let free = f.free_vars();
        let a: BTreeSet<_> = alpha.iter().collect();
        if a.len() != alpha.len() || a != free.iter().collect() {
            return Err(WorldError::AlphaMismatch);
        }
        let u = store.interpret(f)?;
        let ext = self.extension(store, u)?;
        Ok(ext.iter().map(|row| free.iter().cloned().zip(row.iter().copied()).collect()).collect())
    }

    /// The world at `tau` after consolidation: every table whose rows start
    /// with a time value gets a companion table one column wider, holding
    /// `(@tau, tense', rest...)` with the present shifted to the past.
    pub fn consolidated(&self, store: &mut ConceptStore, tau: u64) -> Result<World, WorldError> {
        let stamp = Elem::Particular(store.intern_particular(Individual::Stamp(tau)));
        let present = store.find_particular(&Individual::Time(Tense::Present)).map(Elem::Particular);
        let past = Elem::Particular(store.intern_particular(Individual::Time(Tense::Past)));
        let mut w = self.at(tau);
        for (pred, table) in &self.facts {
            let temporal = pred.arity() >= 1
                && !table.is_empty()
                && table.iter().all(|row| is_time(store, row[0]));
            if !temporal {
                continue;
            }
            let wide = Predicate::new(pred.name(), pred.arity() + 1);
            store.declare(wide.clone())?;
            let mut out = w.facts.get(&wide).map(|t| (**t).clone()).unwrap_or_else(|| Relation::empty(wide.arity()));
            for row in table.iter() {
                let mut r = Vec::with_capacity(row.len() + 1);
                r.push(stamp);
                r.push(if Some(row[0]) == present { past } else { row[0] });
                r.extend_from_slice(&row[1..]);
                out.insert(r)?;
            }
            w.facts.insert(wide, Arc::new(out));
        }
        Ok(w.rebuild())
    }
}

fn is_time(store: &ConceptStore, e: Elem) -> bool {
    matches!(e, Elem::Particular(p) if matches!(store.individual(p), Individual::Time(_)))
}

/// Value of an argument under a (total) assignment of its free variables.
fn key_value(store: &ConceptStore, _ad: &ActiveDomain<Elem>, key: &ArgKey, g: &Assignment) -> Option<Elem> {
    match key {
        ArgKey::Var(v) => g.get(v).copied(),
        ArgKey::Elem(e) => Some(*e),
        ArgKey::OpenAbs { term, bound } => {
            let mut env: Assignment = bound.iter().cloned().collect();
            for v in term.beta() {
                if !env.contains_key(v) {
                    env.insert(v.clone(), *g.get(v)?);
                }
            }
            store.lookup_with(term.body(), &env).ok().flatten().map(Elem::Concept)
        }
    }
}

/// Tuples of free-variable values under which `row` instantiates the
/// pattern `args`. Plain patterns give at most one tuple; open abstractions
/// are resolved by searching the active domain for their beta values.
fn match_row(
    store: &ConceptStore,
    ad: &ActiveDomain<Elem>,
    args: &[ArgKey],
    vars: &[Variable],
    row: &[Elem],
) -> Vec<Vec<Elem>> {
    let mut g = Assignment::new();
    let mut open = Vec::new();
    for (key, cell) in args.iter().zip(row) {
        match key {
            ArgKey::Elem(e) if e != cell => return Vec::new(),
            ArgKey::Elem(_) => {}
            ArgKey::Var(v) => match g.get(v) {
                Some(prev) if prev != cell => return Vec::new(),
                Some(_) => {}
                None => {
                    g.insert(v.clone(), *cell);
                }
            },
            ArgKey::OpenAbs { .. } => {
                if !matches!(cell, Elem::Concept(_)) {
                    return Vec::new();
                }
                open.push((key, *cell));
            }
        }
    }
    let pending: Vec<Variable> = vars.iter().filter(|v| !g.contains_key(*v)).cloned().collect();
    let mut out = Vec::new();
    for choice in ad.power(pending.len()) {
        let mut full = g.clone();
        full.extend(pending.iter().cloned().zip(choice));
        if open.iter().all(|(key, cell)| key_value(store, ad, key, &full) == Some(*cell)) {
            out.push(vars.iter().map(|v| full[v]).collect());
        }
    }
    out
}
