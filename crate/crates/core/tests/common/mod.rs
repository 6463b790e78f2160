//! Reference implementations used as oracles. Written from the definitions
//! with plain loops and sets; nothing here calls the relational operators
//! of the library.
#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};
use std::path::PathBuf;

use ifol::prp::{ConceptStore, Elem, Individual};
use ifol::syntax::{Formula, Term, Variable};
use ifol::worlds::World;

pub type Rows = BTreeSet<Vec<Elem>>;

pub fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(name)
}

pub fn fixture_text(name: &str) -> String {
    std::fs::read_to_string(fixture(name)).unwrap()
}

/// Every pair of rows agreeing on `pairs` (1-based), left row followed by
/// the right row's unpaired columns.
pub fn join<T: Ord + Clone>(a: &BTreeSet<Vec<T>>, b: &BTreeSet<Vec<T>>, pairs: &[(usize, usize)]) -> BTreeSet<Vec<T>> {
    let mut out = BTreeSet::new();
    for x in a {
        for y in b {
            if pairs.iter().all(|&(i, j)| x[i - 1] == y[j - 1]) {
                let mut row = x.clone();
                for (c, v) in y.iter().enumerate() {
                    if !pairs.iter().any(|&(_, j)| j == c + 1) {
                        row.push(v.clone());
                    }
                }
                out.insert(row);
            }
        }
    }
    out
}

/// All `k`-tuples over `domain` not in `r`.
pub fn complement(r: &Rows, k: usize, domain: &[Elem]) -> Rows {
    let mut all: Vec<Vec<Elem>> = vec![Vec::new()];
    for _ in 0..k {
        all = all
            .into_iter()
            .flat_map(|t| {
                domain.iter().map(move |d| {
                    let mut t = t.clone();
                    t.push(*d);
                    t
                })
            })
            .collect();
    }
    all.into_iter().filter(|t| !r.contains(t)).collect()
}

/// Drops column `n` of a relation of arity `k`; a unary relation becomes
/// a truth value.
pub fn project(r: &Rows, n: usize, k: usize) -> Rows {
    if k == 1 && n == 1 {
        return if r.is_empty() { Rows::new() } else { BTreeSet::from([Vec::new()]) };
    }
    if k < 2 || n == 0 || n > k {
        return r.clone();
    }
    r.iter()
        .map(|t| t.iter().enumerate().filter(|(i, _)| *i != n - 1).map(|(_, e)| *e).collect())
        .collect()
}

fn value(store: &ConceptStore, g: &BTreeMap<Variable, Elem>, t: &Term) -> Option<Elem> {
    match t {
        Term::Var(v) => g.get(v).copied(),
        Term::Const(c) => store.find_particular(&Individual::Named(c.clone())).map(Elem::Particular),
        Term::Time(t) => store.find_particular(&Individual::Time(*t)).map(Elem::Particular),
        Term::Stamp(n) => store.find_particular(&Individual::Stamp(*n)).map(Elem::Particular),
        Term::Abs(_) => None,
    }
}

/// Truth of `f` under `g` by recursive substitution over the active domain.
pub fn holds(store: &ConceptStore, w: &World, f: &Formula, g: &BTreeMap<Variable, Elem>) -> bool {
    match f {
        Formula::Top => true,
        Formula::Atom { pred, args } => {
            let Some(table) = w.table(pred) else { return false };
            let mut row = Vec::new();
            for a in args {
                match value(store, g, a) {
                    Some(e) => row.push(e),
                    None => return false,
                }
            }
            table.iter().any(|t| *t == row)
        }
        Formula::Identity(a, b) => match (value(store, g, a), value(store, g, b)) {
            (Some(x), Some(y)) => x == y,
            _ => a == b,
        },
        Formula::Conj { lhs, rhs, .. } => holds(store, w, lhs, g) && holds(store, w, rhs, g),
        Formula::Neg(x) => !holds(store, w, x, g),
        Formula::Exists { n, body } => {
            let v = &body.free_vars()[n - 1];
            let domain: Vec<Elem> = w.active_domain().iter().copied().collect();
            domain.into_iter().any(|d| {
                let mut h = g.clone();
                h.insert(v.clone(), d);
                holds(store, w, body, &h)
            })
        }
    }
}
