//! Finite relations and the extensional operators used to interpret concepts:
//! positional natural join, complement relative to an active domain, and
//! column elimination with collapse to truth values.
//!
//! Relations have set semantics. A relation of arity 0 is a truth value:
//! `f` is the empty relation and `t` is the relation holding the empty tuple.

use std::collections::{BTreeSet, HashMap};
use std::fmt;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RelalgError {
    #[error("join pair ({0},{1}) is out of range for arities {2} and {3}")]
    PairOutOfRange(usize, usize, usize, usize),
    #[error("join pair ({0},{1}) reuses an already joined column")]
    DuplicateColumn(usize, usize),
    #[error("tuple of length {got} does not fit a relation of arity {arity}")]
    ArityMismatch { arity: usize, got: usize },
    #[error("tuple at row {0} mentions an element outside the active domain")]
    OutsideDomain(usize),
    #[error("complement of a relation of arity {0} requested over an empty active domain")]
    EmptyDomain(usize),
}

/// Column pairs `(i, j)` (1-based) joined by a conjunction: column `i` of the
/// left operand is equated with column `j` of the right operand.
///
/// Pairs are kept sorted, so two specs with the same pairs compare equal.
#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct JoinSpec(Vec<(usize, usize)>);

impl JoinSpec {
    pub fn new(pairs: impl IntoIterator<Item = (usize, usize)>) -> Self {
        let mut pairs: Vec<_> = pairs.into_iter().collect();
        pairs.sort_unstable();
        pairs.dedup();
        JoinSpec(pairs)
    }

    pub fn empty() -> Self {
        JoinSpec(Vec::new())
    }

    /// The diagonal `{(l,l) | 1 <= l <= arity}` used by the derived union.
    pub fn diagonal(arity: usize) -> Self {
        JoinSpec((1..=arity).map(|l| (l, l)).collect())
    }

    pub fn pairs(&self) -> &[(usize, usize)] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Checks the pairs against operand arities `k` (left) and `j` (right):
    /// every index in range and no column joined twice on either side.
    pub fn check(&self, k: usize, j: usize) -> Result<(), RelalgError> {
        let mut left = BTreeSet::new();
        let mut right = BTreeSet::new();
        for &(a, b) in &self.0 {
            if a == 0 || a > k || b == 0 || b > j {
                return Err(RelalgError::PairOutOfRange(a, b, k, j));
            }
            if !left.insert(a) || !right.insert(b) {
                return Err(RelalgError::DuplicateColumn(a, b));
            }
        }
        Ok(())
    }

    pub fn is_valid_for(&self, k: usize, j: usize) -> bool {
        self.check(k, j).is_ok()
    }

    /// Arity of the joined result, `k + j - |S|`.
    pub fn result_arity(&self, k: usize, j: usize) -> usize {
        k + j - self.0.len()
    }
}

impl fmt::Display for JoinSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, (a, b)) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "({a},{b})")?;
        }
        f.write_str("}")
    }
}

/// A finite set of equal-length tuples.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Relation<T: Ord> {
    arity: usize,
    tuples: BTreeSet<Vec<T>>,
}

impl<T: Ord + Clone> Relation<T> {
    pub fn empty(arity: usize) -> Self {
        Relation { arity, tuples: BTreeSet::new() }
    }

    /// The truth value `t = {<>}`.
    pub fn truth() -> Self {
        let mut tuples = BTreeSet::new();
        tuples.insert(Vec::new());
        Relation { arity: 0, tuples }
    }

    /// The truth value `f = {}`.
    pub fn falsity() -> Self {
        Self::empty(0)
    }

    pub fn from_bool(b: bool) -> Self {
        if b {
            Self::truth()
        } else {
            Self::falsity()
        }
    }

    pub fn from_tuples<I>(arity: usize, tuples: I) -> Result<Self, RelalgError>
    where
        I: IntoIterator<Item = Vec<T>>,
    {
        let mut rel = Self::empty(arity);
        for t in tuples {
            rel.insert(t)?;
        }
        Ok(rel)
    }

    /// Unary relation holding one tuple per value.
    pub fn unary<I: IntoIterator<Item = T>>(values: I) -> Self {
        Relation { arity: 1, tuples: values.into_iter().map(|v| vec![v]).collect() }
    }

    pub fn insert(&mut self, tuple: Vec<T>) -> Result<bool, RelalgError> {
        if tuple.len() != self.arity {
            return Err(RelalgError::ArityMismatch { arity: self.arity, got: tuple.len() });
        }
        Ok(self.tuples.insert(tuple))
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn len(&self) -> usize {
        self.tuples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tuples.is_empty()
    }

    pub fn contains(&self, tuple: &[T]) -> bool {
        self.tuples.contains(tuple)
    }

    pub fn iter(&self) -> impl Iterator<Item = &Vec<T>> {
        self.tuples.iter()
    }

    /// For arity 0: whether this is `t`. For other arities: non-emptiness.
    pub fn is_true(&self) -> bool {
        !self.tuples.is_empty()
    }

    pub fn retain(&mut self, mut keep: impl FnMut(&Vec<T>) -> bool) {
        self.tuples.retain(|t| keep(t));
    }

    pub fn union(&self, other: &Self) -> Result<Self, RelalgError> {
        if self.arity != other.arity {
            return Err(RelalgError::ArityMismatch { arity: self.arity, got: other.arity });
        }
        Ok(Relation { arity: self.arity, tuples: self.tuples.union(&other.tuples).cloned().collect() })
    }

    /// Every element mentioned by some tuple.
    pub fn elements(&self) -> impl Iterator<Item = &T> {
        self.tuples.iter().flatten()
    }
}

impl<T: Ord + Clone> FromIterator<Vec<T>> for Relation<T> {
    /// Panics if the tuples do not all share one length; an empty iterator
    /// produces the empty relation of arity 0.
    fn from_iter<I: IntoIterator<Item = Vec<T>>>(iter: I) -> Self {
        let tuples: BTreeSet<Vec<T>> = iter.into_iter().collect();
        let arity = tuples.iter().next().map_or(0, Vec::len);
        assert!(tuples.iter().all(|t| t.len() == arity), "ragged tuples");
        Relation { arity, tuples }
    }
}

/// Finite stand-in for the domain of individuals: complements and
/// quantifiers range over it.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ActiveDomain<T: Ord> {
    elements: BTreeSet<T>,
}

impl<T: Ord + Clone> ActiveDomain<T> {
    pub fn new<I: IntoIterator<Item = T>>(elements: I) -> Self {
        ActiveDomain { elements: elements.into_iter().collect() }
    }

    pub fn contains(&self, e: &T) -> bool {
        self.elements.contains(e)
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &T> {
        self.elements.iter()
    }

    pub fn insert(&mut self, e: T) {
        self.elements.insert(e);
    }

    /// All tuples of length `k` over the domain, in lexicographic order.
    pub fn power(&self, k: usize) -> Vec<Vec<T>> {
        let mut out: Vec<Vec<T>> = vec![Vec::new()];
        for _ in 0..k {
            out = out
                .into_iter()
                .flat_map(|prefix| {
                    self.elements.iter().map(move |e| {
                        let mut t = prefix.clone();
                        t.push(e.clone());
                        t
                    })
                })
                .collect();
        }
        out
    }
}

/// `R1 ⋈_S R2`. With `S` empty this is the Cartesian product. Output columns
/// are all of `r1` followed by the columns of `r2` not named in `S`, in their
/// original order.
pub fn natural_join<T: Ord + Clone + std::hash::Hash>(
    r1: &Relation<T>,
    r2: &Relation<T>,
    spec: &JoinSpec,
) -> Result<Relation<T>, RelalgError> {
    spec.check(r1.arity, r2.arity)?;
    let left_cols: Vec<usize> = spec.pairs().iter().map(|&(a, _)| a - 1).collect();
    let right_cols: Vec<usize> = spec.pairs().iter().map(|&(_, b)| b - 1).collect();
    let kept: Vec<usize> = (0..r2.arity).filter(|c| !right_cols.contains(c)).collect();

    // hash join on the paired columns of the right operand
    let mut index: HashMap<Vec<&T>, Vec<&Vec<T>>> = HashMap::new();
    for t in &r2.tuples {
        let key: Vec<&T> = right_cols.iter().map(|&c| &t[c]).collect();
        index.entry(key).or_default().push(t);
    }

    let mut out = Relation::empty(spec.result_arity(r1.arity, r2.arity));
    for t1 in &r1.tuples {
        let key: Vec<&T> = left_cols.iter().map(|&c| &t1[c]).collect();
        if let Some(matches) = index.get(&key) {
            for t2 in matches {
                let mut row = t1.clone();
                row.extend(kept.iter().map(|&c| t2[c].clone()));
                out.tuples.insert(row);
            }
        }
    }
    Ok(out)
}

/// `ad^k \ R`; for arity 0 this swaps `t` and `f`.
pub fn complement<T: Ord + Clone>(r: &Relation<T>, ad: &ActiveDomain<T>) -> Result<Relation<T>, RelalgError> {
    if r.arity == 0 {
        return Ok(Relation::from_bool(r.is_empty()));
    }
    if ad.is_empty() {
        return Err(RelalgError::EmptyDomain(r.arity));
    }
    if let Some(row) = r.tuples.iter().position(|t| t.iter().any(|e| !ad.contains(e))) {
        return Err(RelalgError::OutsideDomain(row));
    }
    let tuples = ad.power(r.arity).into_iter().filter(|t| !r.tuples.contains(t)).collect();
    Ok(Relation { arity: r.arity, tuples })
}

/// `π_{-n}`: drops column `n` when `1 <= n <= k` and `k >= 2`, collapses a
/// unary relation to a truth value when `n = k = 1`, and is the identity
/// otherwise.
pub fn project_out<T: Ord + Clone>(r: &Relation<T>, n: usize) -> Relation<T> {
    let k = r.arity;
    if n == 1 && k == 1 {
        return truth_collapse(r);
    }
    if n == 0 || n > k || k < 2 {
        return r.clone();
    }
    let tuples = r
        .tuples
        .iter()
        .map(|t| t.iter().enumerate().filter(|&(i, _)| i != n - 1).map(|(_, e)| e.clone()).collect())
        .collect();
    Relation { arity: k - 1, tuples }
}

/// `t` when `r` is non-empty, `f` otherwise.
pub fn truth_collapse<T: Ord + Clone>(r: &Relation<T>) -> Relation<T> {
    Relation::from_bool(!r.is_empty())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rel(arity: usize, rows: &[&[char]]) -> Relation<char> {
        Relation::from_tuples(arity, rows.iter().map(|r| r.to_vec())).unwrap()
    }

    #[test]
    fn truth_values_join_like_conjunction() {
        let t = Relation::<char>::truth();
        let f = Relation::<char>::falsity();
        assert_eq!(natural_join(&t, &f, &JoinSpec::empty()).unwrap(), f);
        assert_eq!(natural_join(&t, &t, &JoinSpec::empty()).unwrap(), t);
        assert_eq!(natural_join(&f, &f, &JoinSpec::empty()).unwrap(), f);
    }

    #[test]
    fn five_by_four_join_keeps_left_then_unjoined_right() {
        let r1 = rel(5, &[&['a', 'b', 'c', 'd', 'e'], &['a', 'x', 'c', 'd', 'e']]);
        let r2 = rel(4, &[&['d', 'f', 'b', 'g'], &['q', 'f', 'b', 'g']]);
        let s = JoinSpec::new([(4, 1), (2, 3)]);
        let out = natural_join(&r1, &r2, &s).unwrap();
        assert_eq!(out.arity(), 7);
        assert_eq!(out, rel(7, &[&['a', 'b', 'c', 'd', 'e', 'f', 'g']]));
    }

    #[test]
    fn empty_spec_is_cartesian_product() {
        let out = natural_join(&rel(1, &[&['a']]), &rel(1, &[&['b']]), &JoinSpec::empty()).unwrap();
        assert_eq!(out, rel(2, &[&['a', 'b']]));
    }

    #[test]
    fn join_rejects_bad_pairs() {
        let r1 = rel(5, &[]);
        let r2 = rel(4, &[]);
        assert_eq!(
            natural_join(&r1, &r2, &JoinSpec::new([(6, 1)])),
            Err(RelalgError::PairOutOfRange(6, 1, 5, 4))
        );
        assert_eq!(
            natural_join(&r1, &r2, &JoinSpec::new([(1, 1), (1, 2)])),
            Err(RelalgError::DuplicateColumn(1, 2))
        );
    }

    #[test]
    fn complement_over_active_domain() {
        let ad = ActiveDomain::new(['a', 'b']);
        assert_eq!(complement(&rel(1, &[&['a']]), &ad).unwrap(), rel(1, &[&['b']]));
        let t = Relation::<char>::truth();
        assert_eq!(complement(&t, &ad).unwrap(), Relation::falsity());
        assert_eq!(complement(&Relation::falsity(), &ad).unwrap(), t);
        let r = rel(2, &[&['a', 'b'], &['b', 'b']]);
        assert_eq!(complement(&complement(&r, &ad).unwrap(), &ad).unwrap(), r);
    }

    #[test]
    fn complement_rejects_foreign_elements() {
        let ad = ActiveDomain::new(['a']);
        assert_eq!(complement(&rel(1, &[&['z']]), &ad), Err(RelalgError::OutsideDomain(0)));
        assert_eq!(complement(&rel(1, &[]), &ActiveDomain::default()), Err(RelalgError::EmptyDomain(1)));
    }

    #[test]
    fn projection_cases() {
        let r = rel(2, &[&['a', 'b'], &['c', 'b']]);
        assert_eq!(project_out(&r, 2), rel(1, &[&['a'], &['c']]));
        assert_eq!(project_out(&rel(1, &[&['a']]), 1), Relation::truth());
        assert_eq!(project_out(&rel(1, &[]), 1), Relation::falsity());
        assert_eq!(project_out(&r, 3), r);
        assert_eq!(project_out(&r, 0), r);
    }

    #[test]
    fn collapse() {
        assert_eq!(truth_collapse(&rel(2, &[&['a', 'b']])), Relation::truth());
        assert_eq!(truth_collapse(&rel(2, &[])), Relation::falsity());
        assert_eq!(truth_collapse(&Relation::<char>::truth()), Relation::truth());
    }

    #[test]
    fn insert_checks_arity() {
        let mut r = Relation::<char>::empty(2);
        assert!(r.insert(vec!['a']).is_err());
        assert!(r.insert(vec!['a', 'b']).unwrap());
        assert!(!r.insert(vec!['a', 'b']).unwrap());
    }
}
