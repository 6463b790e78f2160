//! Grounding of atomic concepts in (mock) perception and classification
//! processes, plus the natural-language side: template-driven parsing into
//! formulas, rendering back to sentences, and the emotion annotations.

mod emotion;
mod pars;
mod render;

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use thiserror::Error;

use crate::prp::{ArgKey, ConceptId, ConceptNode, ConceptStore, Elem, Individual, PrpError};
use crate::relalg::Relation;
use crate::worlds::{Table, World, WorldError};

pub use emotion::EmotionMap;
pub use pars::{pars, Openness, RenderTemplate, Sdc, Templates, VerbTemplate};
pub use render::{render_formula, render_sentence};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GroundingError {
    #[error("a process named `{0}` is already registered")]
    DuplicateProcess(String),
    #[error("no process named `{0}`")]
    UnknownProcess(String),
    #[error("only plain atoms can be grounded; concept {0} is composite")]
    Composite(ConceptId),
    #[error("concept {0} is not bound to a process")]
    NotBound(ConceptId),
    #[error("process `{process}` cannot produce a relation of arity {arity}")]
    Arity { process: String, arity: usize },
    #[error("not parseable: {0}")]
    NotParseable(String),
    #[error("line {line}: {message}")]
    Format { line: usize, message: String },
    #[error("no rendering template for {0}")]
    MissingTemplate(String),
    #[error("emotion value {0} is outside [0, 1]")]
    OutOfRange(f64),
    #[error(transparent)]
    World(#[from] WorldError),
    #[error(transparent)]
    Prp(#[from] PrpError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ProcessKind {
    /// Pattern recognition.
    Pr,
    /// Spatial description clause grounding.
    Sdc,
    /// Machine-learned classifier.
    Ml,
}

impl fmt::Display for ProcessKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ProcessKind::Pr => "PR",
            ProcessKind::Sdc => "SDC",
            ProcessKind::Ml => "ML",
        })
    }
}

impl FromStr for ProcessKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "PR" => Ok(ProcessKind::Pr),
            "SDC" => Ok(ProcessKind::Sdc),
            "ML" => Ok(ProcessKind::Ml),
            other => Err(format!("unknown process kind `{other}` (expected PR, SDC or ML)")),
        }
    }
}

/// The labelled clip list behind the mock classifiers.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Corpus {
    clips: Vec<(String, bool)>,
}

impl Corpus {
    /// Reads `clip <id> satisfies=<true|false>` lines; `#` starts a comment.
    pub fn parse(text: &str) -> Result<Corpus, GroundingError> {
        let mut clips: Vec<(String, bool)> = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let err = |message: String| GroundingError::Format { line: i + 1, message };
            let parts: Vec<&str> = line.split_whitespace().collect();
            let [kw, id, label] = parts[..] else {
                return Err(err(format!("expected `clip <id> satisfies=<true|false>`, found `{line}`")));
            };
            if kw != "clip" {
                return Err(err(format!("expected `clip`, found `{kw}`")));
            }
            let satisfies = match label.strip_prefix("satisfies=") {
                Some("true") => true,
                Some("false") => false,
                _ => return Err(err(format!("bad label `{label}`"))),
            };
            if clips.iter().any(|(c, _)| c == id) {
                return Err(err(format!("clip `{id}` listed twice")));
            }
            clips.push((id.to_owned(), satisfies));
        }
        Ok(Corpus { clips })
    }

    pub fn push(&mut self, id: &str, satisfies: bool) -> Result<(), GroundingError> {
        if self.clips.iter().any(|(c, _)| c == id) {
            return Err(GroundingError::Format { line: 0, message: format!("clip `{id}` listed twice") });
        }
        self.clips.push((id.to_owned(), satisfies));
        Ok(())
    }

    pub fn clips(&self) -> &[(String, bool)] {
        &self.clips
    }

    pub fn all(&self) -> impl Iterator<Item = &str> {
        self.clips.iter().map(|(c, _)| c.as_str())
    }

    pub fn positive(&self) -> impl Iterator<Item = &str> {
        self.clips.iter().filter(|(_, s)| *s).map(|(c, _)| c.as_str())
    }
}

impl fmt::Display for Corpus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (c, s) in &self.clips {
            writeln!(f, "clip {c} satisfies={s}")?;
        }
        Ok(())
    }
}

pub type Procedure = Arc<dyn Fn(usize) -> Option<Relation<Individual>> + Send + Sync>;

/// A named, deterministic producer of extensions.
#[derive(Clone)]
pub struct GroundingProcess {
    pub name: String,
    pub kind: ProcessKind,
    procedure: Procedure,
}

impl fmt::Debug for GroundingProcess {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("GroundingProcess").field("name", &self.name).field("kind", &self.kind).finish()
    }
}

impl GroundingProcess {
    /// `procedure(arity)` returns the extension, or `None` when it cannot
    /// produce one of that arity.
    pub fn new(name: impl Into<String>, kind: ProcessKind, procedure: Procedure) -> Self {
        GroundingProcess { name: name.into(), kind, procedure }
    }

    /// Unary relation over the clip ids (optionally only positives).
    pub fn from_corpus(name: impl Into<String>, kind: ProcessKind, corpus: &Corpus, positive_only: bool) -> Self {
        let ids: Vec<Individual> = if positive_only {
            corpus.positive().map(|c| Individual::Named(c.into())).collect()
        } else {
            corpus.all().map(|c| Individual::Named(c.into())).collect()
        };
        let proc: Procedure = Arc::new(move |arity| (arity == 1).then(|| Relation::unary(ids.iter().cloned())));
        GroundingProcess::new(name, kind, proc)
    }

    /// A proposition with a fixed truth value.
    pub fn constant(name: impl Into<String>, kind: ProcessKind, value: bool) -> Self {
        let proc: Procedure = Arc::new(move |arity| (arity == 0).then(|| Relation::from_bool(value)));
        GroundingProcess::new(name, kind, proc)
    }

    pub fn run(&self, arity: usize) -> Option<Relation<Individual>> {
        (self.procedure)(arity)
    }
}

#[derive(Debug, Clone, Default)]
pub struct Registry {
    processes: BTreeMap<String, GroundingProcess>,
    bindings: BTreeMap<ConceptId, String>,
}

impl Registry {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn register_process(&mut self, p: GroundingProcess) -> Result<(), GroundingError> {
        if self.processes.contains_key(&p.name) {
            return Err(GroundingError::DuplicateProcess(p.name));
        }
        self.processes.insert(p.name.clone(), p);
        Ok(())
    }

    pub fn process(&self, name: &str) -> Option<&GroundingProcess> {
        self.processes.get(name)
    }

    pub fn processes(&self) -> impl Iterator<Item = &GroundingProcess> {
        self.processes.values()
    }

    /// Binds an atomic concept to a registered process.
    pub fn bind_concept(&mut self, store: &ConceptStore, u: ConceptId, name: &str) -> Result<(), GroundingError> {
        match store.node(u) {
            ConceptNode::Atom { pred, args }
                if !pred.is_know() && !args.iter().any(|a| matches!(a, ArgKey::OpenAbs { .. })) => {}
            _ => return Err(GroundingError::Composite(u)),
        }
        if !self.processes.contains_key(name) {
            return Err(GroundingError::UnknownProcess(name.to_owned()));
        }
        self.bindings.insert(u, name.to_owned());
        Ok(())
    }

    pub fn bindings(&self) -> impl Iterator<Item = (ConceptId, &str)> {
        self.bindings.iter().map(|(c, n)| (*c, n.as_str()))
    }

    /// Runs the process bound to `u` and fixes `u`'s extension in the
    /// returned world.
    pub fn run_grounding(
        &self,
        store: &mut ConceptStore,
        world: &World,
        u: ConceptId,
    ) -> Result<(World, Table), GroundingError> {
        let name = self.bindings.get(&u).ok_or(GroundingError::NotBound(u))?;
        let process = &self.processes[name];
        let arity = store.arity(u);
        let raw = process.run(arity).ok_or_else(|| GroundingError::Arity { process: name.clone(), arity })?;
        let rows: Vec<Vec<Elem>> = raw
            .iter()
            .map(|row| row.iter().map(|ind| Elem::Particular(store.intern_particular(ind.clone()))).collect())
            .collect();
        let rel = Relation::from_tuples(arity, rows)
            .map_err(|_| GroundingError::Arity { process: name.clone(), arity })?;
        let w = world.set_base_extension(store, u, &rel)?;
        Ok((w, rel))
    }

    /// Applies every binding in concept order.
    pub fn ground_all(&self, store: &mut ConceptStore, world: &World) -> Result<World, GroundingError> {
        let mut w = world.clone();
        for u in self.bindings.keys().copied().collect::<Vec<_>>() {
            w = self.run_grounding(store, &w, u)?.0;
        }
        Ok(w)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::{parse_formula, Predicate};

    const CORPUS: &str = "# demo\nclip c1 satisfies=false\nclip c2 satisfies=true\nclip c3 satisfies=true\n";

    fn setup() -> (ConceptStore, Registry, Corpus) {
        let mut store = ConceptStore::new();
        for (n, a) in [("videoclips", 1), ("Find", 4), ("phi", 0)] {
            store.declare(Predicate::new(n, a)).unwrap();
        }
        let corpus = Corpus::parse(CORPUS).unwrap();
        let mut reg = Registry::new();
        reg.register_process(GroundingProcess::from_corpus("clips", ProcessKind::Ml, &corpus, false)).unwrap();
        reg.register_process(GroundingProcess::from_corpus("finder", ProcessKind::Sdc, &corpus, true)).unwrap();
        reg.register_process(GroundingProcess::constant("yes", ProcessKind::Sdc, true)).unwrap();
        (store, reg, corpus)
    }

    #[test]
    fn corpus_format() {
        let c = Corpus::parse(CORPUS).unwrap();
        assert_eq!(c.all().count(), 3);
        assert_eq!(c.positive().collect::<Vec<_>>(), ["c2", "c3"]);
        assert_eq!(Corpus::parse(&c.to_string()).unwrap(), c);
        let err = Corpus::parse("clip a satisfies=maybe").unwrap_err();
        assert!(matches!(err, GroundingError::Format { line: 1, .. }));
        assert!(Corpus::parse("clip a satisfies=true\nclip a satisfies=false").is_err());
    }

    #[test]
    fn grounding_subset_and_homomorphism() {
        let (mut store, mut reg, _) = setup();
        let u2 = store.interpret(&parse_formula("videoclips(?y)").unwrap()).unwrap();
        let u1 = store.interpret(&parse_formula("Find(in_present, me, ?y, <<phi>>)").unwrap()).unwrap();
        reg.bind_concept(&store, u2, "clips").unwrap();
        reg.bind_concept(&store, u1, "finder").unwrap();
        let w = reg.ground_all(&mut store, &World::new(0)).unwrap();
        let c = w.extension(&store, u2).unwrap();
        let e = w.extension(&store, u1).unwrap();
        assert_eq!(c.len(), 3);
        assert_eq!(e.len(), 2);
        assert!(e.iter().all(|t| c.contains(t)));
        let (w2, again) = reg.run_grounding(&mut store, &w, u1).unwrap();
        assert_eq!(again, *e);
        assert_eq!(*w2.extension(&store, u1).unwrap(), *e);
    }

    #[test]
    fn binding_rules() {
        let (mut store, mut reg, _) = setup();
        let conj = store.interpret(&parse_formula("videoclips(?y) /\\ videoclips(?y)").unwrap()).unwrap();
        assert_eq!(reg.bind_concept(&store, conj, "clips"), Err(GroundingError::Composite(conj)));
        let phi = store.interpret(&parse_formula("phi").unwrap()).unwrap();
        assert!(matches!(reg.bind_concept(&store, phi, "nope"), Err(GroundingError::UnknownProcess(_))));
        reg.bind_concept(&store, phi, "yes").unwrap();
        let w = reg.ground_all(&mut store, &World::new(0)).unwrap();
        assert!(w.eval_sentence(&mut store, &parse_formula("phi").unwrap()).unwrap());
        let u2 = store.interpret(&parse_formula("videoclips(?y)").unwrap()).unwrap();
        assert_eq!(reg.run_grounding(&mut store, &w, u2).unwrap_err(), GroundingError::NotBound(u2));
        reg.bind_concept(&store, u2, "yes").unwrap();
        assert!(matches!(reg.run_grounding(&mut store, &w, u2), Err(GroundingError::Arity { .. })));
        assert!(matches!(
            reg.register_process(GroundingProcess::constant("yes", ProcessKind::Pr, false)),
            Err(GroundingError::DuplicateProcess(_))
        ));
    }
}
