//! The video-retrieval walkthrough: parse the user command, assert the
//! experience, chain, consolidate and render, checking each stage.

use std::collections::BTreeSet;

use super::{Session, SessionError};
use crate::epistemic::{know_nesting, Rule};
use crate::relalg;
use crate::syntax::{AbstractedTerm, Formula, Term, Variable};

pub const DEMO_KB: &str = include_str!("../../fixtures/demo.kb");
pub const DEMO_CORPUS: &str = include_str!("../../fixtures/clips.corpus");
pub const DEMO_TEMPLATES: &str = include_str!("../../fixtures/templates.sdc");
pub const COMMAND: &str = "Find videoclip such that φ in the given set of videoclips";
pub const DEFAULT_TAU: u64 = 1_700_000_000;

#[derive(Debug, Clone)]
pub struct DemoOptions {
    pub corpus: String,
    pub tau: u64,
    pub budget: usize,
}

impl Default for DemoOptions {
    fn default() -> Self {
        DemoOptions { corpus: DEMO_CORPUS.to_owned(), tau: DEFAULT_TAU, budget: super::DEFAULT_BUDGET }
    }
}

#[derive(Debug)]
pub struct DemoReport {
    pub lines: Vec<String>,
    pub failures: Vec<String>,
    pub session: Session,
}

impl DemoReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

struct Checker {
    lines: Vec<String>,
    failures: Vec<String>,
}

impl Checker {
    fn say(&mut self, s: impl Into<String>) {
        self.lines.push(s.into());
    }

    fn expect<T: PartialEq + std::fmt::Debug>(&mut self, what: &str, expected: T, got: T) {
        if expected == got {
            self.say(format!("ok   {what}"));
        } else {
            self.say(format!("FAIL {what}"));
            self.failures.push(format!("{what}\n  - expected: {expected:?}\n  + got:      {got:?}"));
        }
    }
}

pub fn run(opts: &DemoOptions) -> Result<DemoReport, SessionError> {
    let mut s = Session::new().with_budget(opts.budget);
    s.load_corpus_text(&opts.corpus)?;
    s.load_templates_text(DEMO_TEMPLATES)?;
    s.load_str(DEMO_KB)?;
    let mut c = Checker { lines: Vec::new(), failures: Vec::new() };

    let positives: Vec<String> = s.corpus().positive().map(str::to_owned).collect();
    let clips = s.corpus().clips().len();
    c.say(format!("corpus: {clips} clips, {} labelled positive", positives.len()));

    // Command to formula.
    c.say(format!("> {COMMAND}"));
    let f = s.execute(&format!("pars {COMMAND}"))?;
    let f = s.parse_formula(&f)?;
    let expected = s.parse_formula("Find(in_present, me, ?y, <<φ>>) /\\{(1,1)} videoclips(?y)")?;
    c.say(format!("  {f}"));
    c.expect("pars gives the Find formula joined on y", &expected, &f);

    // Extensions by homomorphism.
    let Formula::Conj { lhs, rhs, join } = &f else { unreachable!("checked against a conjunction") };
    let w = s.world()?;
    let (u1, u2, u3) = {
        let st = s.store_mut();
        (st.interpret(lhs)?, st.interpret(rhs)?, st.interpret(&f)?)
    };
    let e = w.extension(s.store(), u1)?;
    let all = w.extension(s.store(), u2)?;
    let h3 = w.extension(s.store(), u3)?;
    c.expect("|C| = number of clips", clips, all.len());
    c.expect("|E| = number of positives", positives.len(), e.len());
    c.expect("E is a subset of C", true, e.iter().all(|r| all.contains(r)));
    c.expect("h(u3) = h(u1) join h(u2)", relalg::natural_join(&e, &all, join).ok(), Some((*h3).clone()));
    let phi = s.definitions()["φ"].clone();
    c.expect("φ holds by its SDC grounding", true, w.eval_sentence(s.store_mut(), &phi)?);

    // Experience.
    let psi = Term::Abs(Box::new(AbstractedTerm::new(f.clone(), vec![Variable::new("y")?], Vec::new())?));
    let out = s.execute(&format!("know {psi}"))?;
    c.say(out);
    let first = s.atoms_by_rule(Rule::Experience).first().copied();
    let rendered = first.map(|id| s.render_atom(id)).transpose()?;
    c.say(format!("  {}", rendered.clone().unwrap_or_default()));
    c.expect(
        "experience renders",
        Some("I (me) know that I am (me) finding videoclip such that φ.".to_owned()),
        rendered,
    );

    // Deduction.
    let out = s.chain(opts.budget)?;
    c.lines.extend(out.lines().map(|l| format!("  {l}")));
    let tb = s.atoms_by_rule(Rule::Tb);
    let ta = s.extracted_facts();
    if positives.is_empty() {
        c.say("no clip satisfies φ: the open knowledge has an empty extension, T_b derives nothing");
    }
    c.expect("T_b atoms", usize::from(!positives.is_empty()), tb.len());
    c.expect("extracted facts, one per positive clip", positives.len(), ta.len());
    let found = facts_found(&s, &ta)?;
    c.expect("extracted facts name the positive clips", positives.iter().cloned().collect::<BTreeSet<_>>(), found);
    let w = s.world()?;
    let mut sound = true;
    for id in tb.iter().chain(&ta) {
        let content = s.memory().get(*id).expect("listed atom").content;
        let g = s.store().formula_of(content)?;
        sound &= w.eval_sentence(s.store_mut(), &g)?;
    }
    c.expect("extracted sentences are true in the world", true, sound);
    let depth = s.memory().atoms().iter().map(|a| know_nesting(s.store(), a.content)).max().unwrap_or(0);
    c.expect("introspection depth equals the budget", opts.budget, depth);

    // Consolidation.
    c.say(s.consolidate(opts.tau)?);
    let w = s.world()?;
    let mut rendered = Vec::new();
    let mut consolidated_ok = true;
    for id in &ta {
        let content = s.memory().get(*id).expect("listed atom").content;
        let g = s.store().formula_of(content)?;
        let Some(clip) = clip_of(&g) else {
            consolidated_ok = false;
            continue;
        };
        let want = s.parse_formula(&format!("Find(@{}, in_past, me, {clip}, <<φ>>) /\\{{}} videoclips({clip})", opts.tau))?;
        consolidated_ok &= g == want && w.eval_sentence(s.store_mut(), &g)?;
        let line = s.render_atom(*id)?;
        let template = format!("I know that I have found at {} the videoclip {clip} which satisfied user requirement φ.", opts.tau);
        c.expect(&format!("{id} renders"), template, line.clone());
        rendered.push(line);
    }
    c.expect("consolidated facts carry the stamp and the past tense", true, consolidated_ok);
    c.expect("temporary memory is empty", 0, s.memory().temporary().len());
    for line in rendered {
        c.say(line);
    }

    Ok(DemoReport { lines: c.lines, failures: c.failures, session: s })
}

/// The clip constant in `Find(..., clip, ...) /\ videoclips(clip)`.
fn clip_of(f: &Formula) -> Option<String> {
    f.conjuncts().into_iter().find_map(|c| match c {
        Formula::Atom { pred, args } if pred.name() == "videoclips" => match &args[0] {
            Term::Const(n) => Some(n.to_string()),
            _ => None,
        },
        _ => None,
    })
}

fn facts_found(s: &Session, ids: &[crate::epistemic::AtomId]) -> Result<BTreeSet<String>, SessionError> {
    let mut out = BTreeSet::new();
    for id in ids {
        let content = s.memory().get(*id).expect("listed atom").content;
        if let Some(c) = clip_of(&s.store().formula_of(content)?) {
            out.insert(c);
        }
    }
    Ok(out)
}
