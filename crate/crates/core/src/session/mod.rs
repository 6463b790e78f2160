//! A knowledge-base session: the state behind the REPL, KB files and the
//! demo. Every mutation goes through [`Session::execute`], which also logs
//! the command in canonical form so that [`Session::dump_kb`] can replay it.
//!
//! KB lines (one command per line, `#` starts a comment line):
//!
//! ```text
//! predicate <name>/<arity>
//! particular <name>
//! define <name> = <formula>
//! clip <id> satisfies=<true|false>
//! corpus <path>
//! verb ... | noun ... | render ...
//! templates <path>
//! process <name> <PR|SDC|ML> <corpus.all|corpus.positive|true|false>
//! ground <name>/<arity> <process>
//! ground <atom> <process>
//! rule <formula> => <formula>
//! assert <formula>
//! know <abstracted-term> [where <var>=<term> ...]
//! emotion <kind> <value> <formula>
//! chain [--budget <n>]
//! consolidate --tau <n>
//! ```
//!
//! Queries, which do not change state: `eval <formula>`, `answer <formula>`,
//! `render <atom-id>`, `pars <sentence>`, `feel <kind> <formula>`,
//! `dump {concepts|world|memory|kb}`, `help`.

pub mod demo;
mod trace;

use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use thiserror::Error;

use crate::epistemic::{self, consolidate, forward_chain, AtomId, EpistemicError, Memory, Provenance};
use crate::grounding::{self, Corpus, EmotionMap, GroundingError, GroundingProcess, ProcessKind, Registry, Templates};
use crate::prp::{Assignment, ConceptStore, Elem, PrpError};
use crate::syntax::{parse_bindings, Definitions, Formula, ParseError, Parser, Predicate, SyntaxError, Term};
use crate::worlds::{World, WorldError};

pub use trace::TraceRecord;

pub const DEFAULT_BUDGET: usize = 3;

#[derive(Debug, Error)]
pub enum SessionError {
    #[error("line {line}: {source}")]
    At { line: usize, source: Box<SessionError> },
    #[error("{command}: {message}")]
    Command { command: String, message: String },
    #[error("unknown command `{0}` (try `help`)")]
    UnknownCommand(String),
    #[error("{path}: {message}")]
    Io { path: String, message: String },
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error(transparent)]
    Syntax(#[from] SyntaxError),
    #[error(transparent)]
    Prp(#[from] PrpError),
    #[error(transparent)]
    World(#[from] WorldError),
    #[error(transparent)]
    Epistemic(#[from] EpistemicError),
    #[error(transparent)]
    Grounding(#[from] GroundingError),
}

fn usage(command: &str, message: impl Into<String>) -> SessionError {
    SessionError::Command { command: command.to_owned(), message: message.into() }
}

#[derive(Debug)]
pub struct Session {
    store: ConceptStore,
    defs: Definitions,
    memory: Memory,
    registry: Registry,
    emotions: EmotionMap,
    templates: Templates,
    corpus: Corpus,
    particulars: Vec<Elem>,
    facts: Vec<(Predicate, Vec<Elem>)>,
    taus: Vec<u64>,
    log: Vec<String>,
    trace: Vec<TraceRecord>,
    budget: usize,
    base_dir: Option<PathBuf>,
    world: Option<World>,
}

impl Default for Session {
    fn default() -> Self {
        Self::new()
    }
}

impl Session {
    pub fn new() -> Self {
        Session {
            store: ConceptStore::new(),
            defs: Definitions::new(),
            memory: Memory::new(),
            registry: Registry::new(),
            emotions: EmotionMap::new(),
            templates: Templates::default(),
            corpus: Corpus::default(),
            particulars: Vec::new(),
            facts: Vec::new(),
            taus: Vec::new(),
            log: Vec::new(),
            trace: Vec::new(),
            budget: DEFAULT_BUDGET,
            base_dir: None,
            world: None,
        }
    }

    pub fn with_budget(mut self, budget: usize) -> Self {
        self.budget = budget;
        self
    }

    pub fn budget(&self) -> usize {
        self.budget
    }

    pub fn store(&self) -> &ConceptStore {
        &self.store
    }

    pub fn store_mut(&mut self) -> &mut ConceptStore {
        &mut self.store
    }

    pub fn definitions(&self) -> &Definitions {
        &self.defs
    }

    pub fn memory(&self) -> &Memory {
        &self.memory
    }

    pub fn registry(&self) -> &Registry {
        &self.registry
    }

    pub fn templates(&self) -> &Templates {
        &self.templates
    }

    pub fn corpus(&self) -> &Corpus {
        &self.corpus
    }

    pub fn emotions(&self) -> &EmotionMap {
        &self.emotions
    }

    pub fn trace(&self) -> &[TraceRecord] {
        &self.trace
    }

    /// Loads a KB file; relative `corpus`/`templates` paths resolve against
    /// its directory.
    pub fn load_kb(path: &Path) -> Result<Session, SessionError> {
        let mut s = Session::new();
        s.load_file(path)?;
        Ok(s)
    }

    pub fn load_file(&mut self, path: &Path) -> Result<Vec<String>, SessionError> {
        let text = read(path)?;
        let previous = self.base_dir.replace(path.parent().map(Path::to_path_buf).unwrap_or_default());
        let out = self.load_str(&text);
        self.base_dir = previous;
        out
    }

    /// Executes every line in order, returning the non-empty outputs.
    pub fn load_str(&mut self, text: &str) -> Result<Vec<String>, SessionError> {
        let mut out = Vec::new();
        for (i, line) in text.lines().enumerate() {
            match self.execute(line) {
                Ok(s) if !s.is_empty() => out.push(s),
                Ok(_) => {}
                Err(e) => return Err(SessionError::At { line: i + 1, source: Box::new(e) }),
            }
        }
        Ok(out)
    }

    fn parser(&self) -> Parser<'_> {
        Parser::new().with_signature(self.store.signature()).with_definitions(&self.defs)
    }

    pub fn parse_formula(&self, text: &str) -> Result<Formula, SessionError> {
        Ok(self.parser().formula(text)?)
    }

    pub fn parse_term(&self, text: &str) -> Result<Term, SessionError> {
        Ok(self.parser().term(text)?)
    }

    fn changed(&mut self, canonical: String) {
        self.log.push(canonical);
        self.world = None;
    }

    /// Runs one command line and returns its printable output.
    pub fn execute(&mut self, line: &str) -> Result<String, SessionError> {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            return Ok(String::new());
        }
        let (cmd, rest) = line.split_once(char::is_whitespace).unwrap_or((line, ""));
        let rest = rest.trim();
        match cmd {
            "predicate" => {
                let pred = parse_pred(rest).ok_or_else(|| usage(cmd, "expected <name>/<arity>"))?;
                self.store.declare(pred.clone())?;
                self.changed(format!("predicate {pred}"));
                Ok(String::new())
            }
            "particular" => {
                let t = self.parse_term(rest)?;
                let e = self.store.extend_assignment(&Assignment::new(), &t)?;
                if !self.particulars.contains(&e) {
                    self.particulars.push(e);
                }
                self.changed(format!("particular {t}"));
                Ok(String::new())
            }
            "define" => {
                let (name, body) = rest.split_once('=').ok_or_else(|| usage(cmd, "expected <name> = <formula>"))?;
                let name = name.trim();
                if name.is_empty() || !name.chars().all(|c| c.is_alphanumeric() || c == '_') {
                    return Err(usage(cmd, format!("bad definition name `{name}`")));
                }
                let f = self.parse_formula(body)?;
                self.defs.insert(name.to_owned(), f.clone());
                self.changed(format!("define {name} = {f}"));
                Ok(String::new())
            }
            "clip" => {
                let c = Corpus::parse(line)?;
                for (id, sat) in c.clips() {
                    self.add_clip(id, *sat)?;
                }
                Ok(String::new())
            }
            "corpus" => {
                let text = read(&self.resolve(rest))?;
                self.load_corpus_text(&text)?;
                Ok(String::new())
            }
            "verb" | "noun" | "render" if cmd != "render" || rest.contains('"') || rest.contains('/') => {
                self.template_line(line)?;
                Ok(String::new())
            }
            "templates" => {
                let text = read(&self.resolve(rest))?;
                self.load_templates_text(&text)?;
                Ok(String::new())
            }
            "process" => self.cmd_process(rest),
            "ground" => self.cmd_ground(rest),
            "rule" => {
                let (a, b) = rest.split_once("=>").ok_or_else(|| usage(cmd, "expected <formula> => <formula>"))?;
                let (a, b) = (self.parse_formula(a)?, self.parse_formula(b)?);
                if !a.is_sentence() || !b.is_sentence() {
                    return Err(usage(cmd, "rules relate sentences"));
                }
                let id = self.memory.add_rule(&mut self.store, &a, &b)?;
                self.changed(format!("rule {a} => {b}"));
                Ok(id.map(|id| format!("{id} innate")).unwrap_or_default())
            }
            "assert" => self.cmd_assert(rest),
            "know" => self.cmd_know(rest),
            "emotion" => {
                let mut parts = rest.splitn(3, char::is_whitespace);
                let (Some(kind), Some(v), Some(f)) = (parts.next(), parts.next(), parts.next()) else {
                    return Err(usage(cmd, "expected <kind> <value> <formula>"));
                };
                let v: f64 = v.parse().map_err(|_| usage(cmd, format!("bad value `{v}`")))?;
                let f = self.parse_formula(f)?;
                let u = self.store.interpret(&f)?;
                self.emotions.set(kind, u, v)?;
                self.changed(format!("emotion {kind} {v} {f}"));
                Ok(String::new())
            }
            "chain" => {
                let budget = match flag(rest, "--budget") {
                    Some(v) => v.parse().map_err(|_| usage(cmd, format!("bad budget `{v}`")))?,
                    None if rest.is_empty() => self.budget,
                    None => return Err(usage(cmd, "expected [--budget <n>]")),
                };
                self.chain(budget)
            }
            "consolidate" => {
                let tau = flag(rest, "--tau")
                    .and_then(|v| v.parse().ok())
                    .ok_or_else(|| usage(cmd, "expected --tau <n>"))?;
                self.consolidate(tau)
            }
            "eval" => self.cmd_eval(rest),
            "answer" => {
                let q = self.parse_formula(rest)?;
                Ok(self.answer(&q)?.to_string())
            }
            "render" => {
                let id = parse_atom_id(rest).ok_or_else(|| usage(cmd, format!("bad atom id `{rest}`")))?;
                self.render_atom(id)
            }
            "pars" => {
                let f = grounding::pars(&self.templates, &self.defs, rest)?;
                Ok(f.to_string())
            }
            "feel" => {
                let (kind, f) = rest.split_once(char::is_whitespace).ok_or_else(|| usage(cmd, "expected <kind> <formula>"))?;
                let f = self.parse_formula(f)?;
                let u = self.store.interpret(&f)?;
                Ok(self.emotions.get(kind, u).map_or_else(|| "undefined".to_owned(), |v| v.to_string()))
            }
            "dump" => match rest {
                "concepts" => Ok(self.dump_concepts()),
                "world" => self.dump_world(),
                "memory" => Ok(self.dump_memory()),
                "kb" => Ok(self.dump_kb()),
                other => Err(usage(cmd, format!("expected concepts, world, memory or kb, found `{other}`"))),
            },
            "help" => Ok(HELP.trim().to_owned()),
            other => Err(SessionError::UnknownCommand(other.to_owned())),
        }
    }

    fn resolve(&self, path: &str) -> PathBuf {
        let p = Path::new(path);
        match &self.base_dir {
            Some(dir) if p.is_relative() => dir.join(p),
            _ => p.to_path_buf(),
        }
    }

    fn add_clip(&mut self, id: &str, satisfies: bool) -> Result<(), SessionError> {
        self.corpus.push(id, satisfies)?;
        self.changed(format!("clip {id} satisfies={satisfies}"));
        Ok(())
    }

    pub fn load_corpus_text(&mut self, text: &str) -> Result<(), SessionError> {
        let c = Corpus::parse(text)?;
        for (id, sat) in c.clips() {
            self.add_clip(id, *sat)?;
        }
        Ok(())
    }

    fn template_line(&mut self, line: &str) -> Result<(), SessionError> {
        let t = Templates::parse(line)?;
        self.templates.verbs.extend(t.verbs);
        self.templates.nouns.extend(t.nouns);
        self.templates.renders.extend(t.renders);
        self.changed(line.to_owned());
        Ok(())
    }

    pub fn load_templates_text(&mut self, text: &str) -> Result<(), SessionError> {
        Templates::parse(text)?;
        for line in text.lines().map(str::trim).filter(|l| !l.is_empty() && !l.starts_with('#')) {
            self.template_line(line)?;
        }
        Ok(())
    }

    fn cmd_process(&mut self, rest: &str) -> Result<String, SessionError> {
        let parts: Vec<&str> = rest.split_whitespace().collect();
        let [name, kind, source] = parts[..] else {
            return Err(usage("process", "expected <name> <PR|SDC|ML> <source>"));
        };
        let k: ProcessKind = kind.parse().map_err(|e: String| usage("process", e))?;
        let p = match source {
            "corpus.all" => GroundingProcess::from_corpus(name, k, &self.corpus, false),
            "corpus.positive" => GroundingProcess::from_corpus(name, k, &self.corpus, true),
            "true" => GroundingProcess::constant(name, k, true),
            "false" => GroundingProcess::constant(name, k, false),
            other => return Err(usage("process", format!("unknown source `{other}`"))),
        };
        self.registry.register_process(p)?;
        self.changed(format!("process {name} {k} {source}"));
        Ok(String::new())
    }

    fn cmd_ground(&mut self, rest: &str) -> Result<String, SessionError> {
        let (target, process) = rest.rsplit_once(char::is_whitespace).ok_or_else(|| usage("ground", "expected <target> <process>"))?;
        let target = target.trim();
        let f = match parse_pred(target) {
            Some(pred) if !target.contains('(') => {
                let args = (1..=pred.arity()).map(|i| Term::var(&format!("x{i}"))).collect();
                self.store.signature().check(&pred)?;
                Formula::atom(pred, args)?
            }
            _ => self.parse_formula(target)?,
        };
        let u = self.store.interpret(&f)?;
        self.registry.bind_concept(&self.store, u, process)?;
        self.changed(format!("ground {f} {process}"));
        Ok(String::new())
    }

    fn cmd_assert(&mut self, rest: &str) -> Result<String, SessionError> {
        let f = self.parse_formula(rest)?;
        let mut rows = Vec::new();
        for c in f.conjuncts() {
            match c {
                Formula::Atom { pred, args } if !pred.is_know() && c.is_sentence() => {
                    let mut row = Vec::with_capacity(args.len());
                    for a in args {
                        row.push(self.store.extend_assignment(&Assignment::new(), a)?);
                    }
                    rows.push((pred.clone(), row));
                }
                _ => return Err(usage("assert", format!("`{c}` is not a ground atom"))),
            }
        }
        self.facts.extend(rows);
        self.changed(format!("assert {f}"));
        Ok(String::new())
    }

    fn cmd_know(&mut self, rest: &str) -> Result<String, SessionError> {
        let (term, bindings) = match rest.split_once(" where ") {
            Some((t, b)) => (t, b.split_whitespace().collect::<Vec<_>>()),
            None => (rest, Vec::new()),
        };
        let t = self.parse_term(term)?;
        let map = parse_bindings(bindings.iter().copied()).map_err(|m| usage("know", m))?;
        let mut g = Assignment::new();
        for (v, x) in &map {
            g.insert(v.clone(), self.store.extend_assignment(&Assignment::new(), x)?);
        }
        let id = self.memory.assert_experience(&mut self.store, &t, &g)?;
        let mut canonical = format!("know {t}");
        if !map.is_empty() {
            canonical.push_str(" where");
            for (v, x) in &map {
                let _ = write!(canonical, " {v}={x}");
            }
        }
        self.changed(canonical);
        match id {
            Some(id) => {
                self.record("experience", Vec::new(), id);
                self.atom_line(id)
            }
            None => Ok("already known".into()),
        }
    }

    fn cmd_eval(&mut self, rest: &str) -> Result<String, SessionError> {
        let f = self.parse_formula(rest)?;
        let w = self.world()?;
        if f.is_sentence() {
            return Ok(w.eval_sentence(&mut self.store, &f)?.to_string());
        }
        let free = f.free_vars();
        let rows = w.satisfying_assignments(&mut self.store, &f, &free)?;
        if rows.is_empty() {
            return Ok("(none)".into());
        }
        Ok(rows
            .iter()
            .map(|g| {
                let cells: Vec<String> = g.iter().map(|(v, e)| format!("?{v}={}", self.store.display_elem(*e))).collect();
                format!("{{{}}}", cells.join(", "))
            })
            .collect::<Vec<_>>()
            .join("\n"))
    }

    /// The current world: grounded tables, asserted facts, consolidation
    /// companions and the `Know` rows of memory.
    pub fn world(&mut self) -> Result<World, SessionError> {
        if let Some(w) = &self.world {
            return Ok(w.clone());
        }
        let mut w = World::new(0).with_particulars(self.particulars.iter().copied());
        w = self.registry.ground_all(&mut self.store, &w)?;
        for (pred, row) in &self.facts {
            w = w.with_fact(pred.clone(), row.clone())?;
        }
        for tau in &self.taus {
            w = w.consolidated(&mut self.store, *tau)?;
        }
        w = w.with_knowledge(self.memory.know_rows(&mut self.store));
        self.world = Some(w.clone());
        Ok(w)
    }

    /// Forward chaining at `budget`; returns one line per new atom.
    pub fn chain(&mut self, budget: usize) -> Result<String, SessionError> {
        let w = self.world()?;
        let (mem, steps) = forward_chain(&self.memory, &mut self.store, &w, budget)?;
        self.memory = mem;
        self.changed(format!("chain --budget {budget}"));
        let mut lines = Vec::with_capacity(steps.len());
        for s in &steps {
            self.record(s.rule.name(), s.inputs.clone(), s.output);
            lines.push(self.atom_line(s.output)?);
        }
        if lines.is_empty() {
            lines.push("nothing new".into());
        }
        Ok(lines.join("\n"))
    }

    pub fn consolidate(&mut self, tau: u64) -> Result<String, SessionError> {
        let moved: Vec<AtomId> = self.memory.temporary().iter().map(|a| a.id).collect();
        self.memory = consolidate(&self.memory, &mut self.store, tau)?;
        self.taus.push(tau);
        self.changed(format!("consolidate --tau {tau}"));
        for id in &moved {
            self.record("consolidate", vec![*id], *id);
        }
        Ok(format!("consolidated {} atoms at @{tau}", moved.len()))
    }

    pub fn answer(&mut self, q: &Formula) -> Result<epistemic::Answer, SessionError> {
        let w = self.world()?;
        Ok(epistemic::answer(&self.memory, &mut self.store, &w, q)?)
    }

    pub fn atom_formula(&self, id: AtomId) -> Result<Formula, SessionError> {
        let a = self.memory.get(id).ok_or_else(|| usage("render", format!("no atom {id}")))?;
        Ok(a.formula(&self.store)?)
    }

    pub fn render_atom(&self, id: AtomId) -> Result<String, SessionError> {
        let f = self.atom_formula(id)?;
        Ok(grounding::render_sentence(&self.templates, &self.defs, &f)?)
    }

    fn atom_line(&self, id: AtomId) -> Result<String, SessionError> {
        let a = self.memory.get(id).ok_or_else(|| usage("memory", format!("no atom {id}")))?;
        Ok(format!("{id} [{}] {}", a.provenance, a.formula(&self.store)?))
    }

    fn record(&mut self, rule: &str, inputs: Vec<AtomId>, output: AtomId) {
        let sentence = match self.render_atom(output) {
            Ok(s) => s,
            Err(_) => self.atom_formula(output).map(|f| f.to_string()).unwrap_or_default(),
        };
        self.trace.push(TraceRecord {
            rule: rule.to_owned(),
            inputs: inputs.iter().map(|i| i.0).collect(),
            output: output.0,
            sentence,
        });
    }

    pub fn write_trace(&self, path: &Path) -> Result<(), SessionError> {
        std::fs::write(path, trace::to_json_lines(&self.trace))
            .map_err(|e| SessionError::Io { path: path.display().to_string(), message: e.to_string() })
    }

    pub fn dump_concepts(&self) -> String {
        let mut out = String::new();
        for (id, node, arity) in self.store.concepts() {
            let text = match self.store.formula_of(id) {
                Ok(f) => f.to_string(),
                Err(_) => format!("{node:?}"),
            };
            let _ = writeln!(out, "{id} D{arity} {text}");
        }
        out.trim_end().to_owned()
    }

    pub fn dump_world(&mut self) -> Result<String, SessionError> {
        let w = self.world()?;
        let mut out = String::new();
        let _ = writeln!(out, "timestamp {}", w.timestamp());
        let domain: Vec<String> = w.active_domain().iter().map(|e| self.store.display_elem(*e)).collect();
        let _ = writeln!(out, "domain {{{}}}", domain.join(", "));
        let know = Predicate::know();
        let tables = w.tables().map(|(p, t)| (p.clone(), t.clone())).chain(std::iter::once((know, w.known().clone())));
        for (pred, table) in tables {
            for row in table.iter() {
                let cells: Vec<String> = row.iter().map(|e| self.store.display_elem(*e)).collect();
                let _ = writeln!(out, "{pred} ({})", cells.join(", "));
            }
        }
        Ok(out.trim_end().to_owned())
    }

    pub fn dump_memory(&self) -> String {
        let mut out = String::new();
        for (store, atoms) in [("temporary", self.memory.temporary()), ("permanent", self.memory.permanent())] {
            for a in atoms {
                let f = a.formula(&self.store).map(|f| f.to_string()).unwrap_or_else(|e| e.to_string());
                let _ = writeln!(out, "{} {store} [{}] {f}", a.id, a.provenance);
            }
        }
        out.trim_end().to_owned()
    }

    /// The canonical command log; loading it rebuilds this session.
    pub fn dump_kb(&self) -> String {
        let mut out = self.log.join("\n");
        if !out.is_empty() {
            out.push('\n');
        }
        out
    }

    /// Everything observable about the session, for equality checks.
    pub fn state(&mut self) -> Result<String, SessionError> {
        let mut out = String::new();
        for p in self.store.signature().iter() {
            let _ = writeln!(out, "predicate {p}");
        }
        let defs: Vec<String> = self.defs.iter().map(|(k, v)| format!("{k} = {v}")).collect();
        let bindings: Vec<String> = self.registry.bindings().map(|(u, n)| format!("{u} -> {n}")).collect();
        let emotions: Vec<String> = self.emotions.iter().map(|(k, u, v)| format!("{k} {u} {v}")).collect();
        let _ = writeln!(out, "defs {defs:?}\nbindings {bindings:?}\nemotions {emotions:?}\ntaus {:?}", self.taus);
        let _ = writeln!(out, "corpus {:?}\ntemplates {:?}", self.corpus.clips(), self.templates);
        let _ = writeln!(out, "{}\n{}\n{}", self.dump_concepts(), self.dump_memory(), self.dump_world()?);
        Ok(out)
    }

    /// Atoms produced by `rule` (looking through consolidation).
    pub fn atoms_by_rule(&self, rule: epistemic::Rule) -> Vec<AtomId> {
        fn base(p: &Provenance) -> &Provenance {
            match p {
                Provenance::Consolidated { prior, .. } => base(prior),
                other => other,
            }
        }
        self.memory.atoms().into_iter().filter(|a| base(&a.provenance).rule() == Some(rule)).map(|a| a.id).collect()
    }

    /// Single ground instances extracted from open knowledge: `T_a` atoms,
    /// plus a `T_b` atom whose extension had exactly one row (its content is
    /// then already the instance).
    pub fn extracted_facts(&self) -> Vec<AtomId> {
        let ta = self.atoms_by_rule(epistemic::Rule::Ta);
        let single_tb = self
            .atoms_by_rule(epistemic::Rule::Tb)
            .into_iter()
            .filter(|id| self.memory.get(*id).is_some_and(|a| a.conjuncts.len() == 1));
        let mut out: Vec<AtomId> = ta.into_iter().chain(single_tb).collect();
        out.sort();
        out
    }

    /// Predicates mentioned anywhere in the log, for diagnostics.
    pub fn predicates(&self) -> BTreeSet<Predicate> {
        self.store.signature().iter().cloned().collect()
    }
}

const HELP: &str = r#"
predicate <name>/<arity>            declare a predicate
particular <name>                   add a particular to the domain
define <name> = <formula>           name a formula
clip <id> satisfies=<bool>          add a corpus entry; corpus <path> loads a file
verb|noun|render ...                add a template line; templates <path> loads a file
process <name> <PR|SDC|ML> <src>    src: corpus.all corpus.positive true false
ground <name>/<k>|<atom> <process>  bind an atomic concept to a process
rule <A> => <B>                     innate knowledge of an implication
assert <formula>                    add ground atoms to the world
know <term> [where y=c ...]         experience: Know(in_present, me, <term>)
emotion <kind> <value> <formula>    set an emotion value; feel <kind> <formula> reads it
chain [--budget N]                  forward chaining
consolidate --tau T                 move temporary atoms to permanent memory
eval <formula>                      truth value or satisfying assignments
answer <formula>                    yes / no / unknown
render <atom-id>                    English rendering of a Know atom
pars <sentence>                     sentence to formula
dump concepts|world|memory|kb
"#;

fn read(path: &Path) -> Result<String, SessionError> {
    std::fs::read_to_string(path).map_err(|e| SessionError::Io { path: path.display().to_string(), message: e.to_string() })
}

fn parse_pred(s: &str) -> Option<Predicate> {
    let (name, arity) = s.trim().rsplit_once('/')?;
    let name = name.trim();
    if name.is_empty() || !name.chars().all(|c| c.is_alphanumeric() || c == '_') {
        return None;
    }
    Some(Predicate::new(name, arity.trim().parse().ok()?))
}

fn parse_atom_id(s: &str) -> Option<AtomId> {
    s.trim().trim_start_matches('k').parse().ok().map(AtomId)
}

fn flag<'a>(rest: &'a str, name: &str) -> Option<&'a str> {
    let mut it = rest.split_whitespace();
    let (Some(f), Some(v), None) = (it.next(), it.next(), it.next()) else { return None };
    (f == name).then_some(v)
}

#[cfg(test)]
mod tests {
    use super::*;

    const KB: &str = r#"
# tiny
predicate p/1
predicate q/1
particular a
define P = p(?x)
assert p(a) /\ q(b)
rule p(a) => q(a)
know <<p(a)>>
"#;

    #[test]
    fn load_and_query() {
        let mut s = Session::new();
        s.load_str(KB).unwrap();
        assert_eq!(s.execute("eval p(a)").unwrap(), "true");
        assert_eq!(s.execute("eval P").unwrap(), "{?x=a}");
        assert_eq!(s.execute("answer q(a)").unwrap(), "yes");
        assert_eq!(s.execute("answer q(c)").unwrap(), "no");
        assert_eq!(s.execute("render k1").unwrap_err().to_string(), "no rendering template for Know/3");
        assert!(s.execute("dump memory").unwrap().contains("k0 temporary [innate]"));
    }

    #[test]
    fn errors_carry_lines() {
        let mut s = Session::new();
        let e = s.load_str("predicate p/1\nassert r(a)").unwrap_err();
        assert!(matches!(e, SessionError::At { line: 2, .. }), "{e}");
        assert!(Session::new().load_str("").unwrap().is_empty());
        assert!(matches!(Session::new().execute("frobnicate"), Err(SessionError::UnknownCommand(_))));
        assert!(Session::new().execute("assert ~ Top").is_err());
    }

    #[test]
    fn dump_replays() {
        let mut s = Session::new();
        s.load_str(KB).unwrap();
        s.execute("chain").unwrap();
        s.execute("consolidate --tau 7").unwrap();
        let mut t = Session::new();
        t.load_str(&s.dump_kb()).unwrap();
        assert_eq!(t.dump_kb(), s.dump_kb());
        assert_eq!(t.state().unwrap(), s.state().unwrap());
    }

    #[test]
    fn emotions() {
        let mut s = Session::new();
        s.load_str("predicate p/0\nemotion love 0.8 p").unwrap();
        assert_eq!(s.execute("feel love p").unwrap(), "0.8");
        assert_eq!(s.execute("feel fear p").unwrap(), "undefined");
        assert!(s.execute("emotion love 1.3 p").is_err());
    }
}
