//! Acceptance run: one PASS/FAIL line per criterion.

mod common;

use std::collections::{BTreeMap, BTreeSet};
use std::time::{Duration, Instant};

use common::{fixture, fixture_text, Rows};
use ifol::check::{random_concept, random_fixture, random_sentence, rng};
use ifol::epistemic::{implication_parts, Answer, Rule};
use ifol::prp::{ConceptId, ConceptNode, ConceptStore, Elem, TRUTH};
use ifol::relalg::{natural_join, JoinSpec, Relation};
use ifol::session::demo::{self, DemoOptions};
use ifol::session::Session;
use ifol::syntax::{parse_formula, Formula, Predicate, Term};
use ifol::worlds::World;
use rand::Rng;

type Outcome = Result<String, String>;

fn rows(r: &Relation<Elem>) -> Rows {
    r.iter().cloned().collect()
}

fn ext(w: &World, s: &ConceptStore, u: ConceptId) -> Result<Rows, String> {
    w.extension(s, u).map(|r| rows(&r)).map_err(|e| e.to_string())
}

fn nodes(s: &ConceptStore, u: ConceptId, out: &mut BTreeSet<ConceptId>) {
    if out.insert(u) {
        match s.node(u) {
            ConceptNode::Conj { lhs, rhs, .. } => {
                nodes(s, *lhs, out);
                nodes(s, *rhs, out);
            }
            ConceptNode::Neg(x) | ConceptNode::Exists { body: x, .. } => nodes(s, *x, out),
            _ => {}
        }
    }
}

fn within(start: Instant, limit: Duration) -> Result<Duration, String> {
    let t = start.elapsed();
    if t < limit {
        Ok(t)
    } else {
        Err(format!("took {t:?}, limit {limit:?}"))
    }
}

fn homomorphism() -> Outcome {
    let start = Instant::now();
    let mut r = rng(2024);
    let (mut trees, mut checked) = (0, 0);
    for case in 0..1000 {
        let mut fx = random_fixture(&mut r);
        let u = random_concept(&mut r, &mut fx, 4);
        if fx.world.active_domain().len() > 5 || fx.world.tables().any(|(_, t)| t.len() > 16) {
            return Err(format!("case {case}: generator exceeded its bounds"));
        }
        let domain: Vec<Elem> = fx.world.active_domain().iter().copied().collect();
        let mut all = BTreeSet::from([TRUTH]);
        nodes(&fx.store, u, &mut all);
        for n in all {
            let (s, w) = (&fx.store, &fx.world);
            let want = match s.node(n) {
                ConceptNode::Truth => BTreeSet::from([Vec::new()]),
                ConceptNode::Conj { lhs, rhs, join } => common::join(&ext(w, s, *lhs)?, &ext(w, s, *rhs)?, join.pairs()),
                ConceptNode::Neg(x) => common::complement(&ext(w, s, *x)?, s.arity(*x), &domain),
                ConceptNode::Exists { n: k, body } => common::project(&ext(w, s, *body)?, *k, s.arity(*body)),
                _ => continue,
            };
            if ext(w, s, n)? != want {
                return Err(format!("case {case}: law fails at {n}"));
            }
            checked += 1;
        }
        trees += 1;
    }
    let t = within(start, Duration::from_secs(30))?;
    Ok(format!("{trees} trees, {checked} composite nodes, {t:.2?}"))
}

fn tarski() -> Outcome {
    let start = Instant::now();
    let mut r = rng(7);
    let mut trues = 0;
    for case in 0..1000 {
        let mut fx = random_fixture(&mut r);
        let f = random_sentence(&mut r, &fx, 3);
        let oracle = common::holds(&fx.store, &fx.world, &f, &BTreeMap::new());
        let engine = fx.world.eval_sentence(&mut fx.store, &f).map_err(|e| format!("case {case}: {f}: {e}"))?;
        if engine != oracle {
            return Err(format!("case {case}: {f}: engine {engine}, oracle {oracle}"));
        }
        trues += usize::from(oracle);
    }
    let t = within(start, Duration::from_secs(30))?;
    Ok(format!("1000 sentences agree ({trues} true), {t:.2?}"))
}

fn union() -> Outcome {
    let mut r = rng(99);
    let mut cases = 0;
    for round in 0..25 {
        let mut store = ConceptStore::new();
        let domain: Vec<Elem> = (0..r.gen_range(1..=4)).map(|i| Elem::Particular(store.named(&format!("e{i}")))).collect();
        let mut w = World::new(0).with_particulars(domain.iter().copied());
        for arity in 0..=3 {
            for size in 1..=3 {
                let mut members = Vec::new();
                let mut want = Rows::new();
                for i in 0..size {
                    let p = Predicate::new(format!("b{arity}_{size}_{i}"), arity);
                    store.declare(p.clone()).unwrap();
                    let mut t = Relation::empty(arity);
                    for _ in 0..r.gen_range(0..=5) {
                        let row: Vec<Elem> = (0..arity).map(|_| domain[r.gen_range(0..domain.len())]).collect();
                        want.insert(row.clone());
                        t.insert(row).unwrap();
                    }
                    w = w.with_table(p.clone(), t).unwrap();
                    let args = (0..arity).map(|v| Term::var(&format!("v{v}"))).collect();
                    members.push(store.interpret(&Formula::atom(p, args).unwrap()).unwrap());
                }
                let u = store.union(&members).map_err(|e| e.to_string())?;
                if ext(&w, &store, u)? != want {
                    return Err(format!("round {round}: arity {arity}, |B| = {size}"));
                }
                cases += 1;
            }
        }
        // {<>} joined with the empty proposition
        let f = store.neg(TRUTH);
        let c = store.conj(TRUTH, f, JoinSpec::empty());
        if !ext(&w, &store, c)?.is_empty() || !common::join(&BTreeSet::from([Vec::<Elem>::new()]), &Rows::new(), &[]).is_empty() {
            return Err("{<>} join {} is not empty".into());
        }
    }
    Ok(format!("{cases} unions over arities 0-3"))
}

fn join_bookkeeping() -> Outcome {
    let mut store = ConceptStore::new();
    store.declare(Predicate::new("p", 5)).unwrap();
    store.declare(Predicate::new("q", 4)).unwrap();
    let f = parse_formula("p(?xi, ?xj, ?xk, ?xl, ?xm) /\\{(4,1),(2,3)} q(?xl, ?yi, ?xj, ?yj)").map_err(|e| e.to_string())?;
    let names: Vec<String> = f.free_vars().iter().map(|v| v.name().to_owned()).collect();
    if names != ["xi", "xj", "xk", "xl", "xm", "yi", "yj"] {
        return Err(format!("free tuple {names:?}"));
    }
    let mut r = rng(5);
    let elems: Vec<Elem> = (0..3).map(|i| Elem::Particular(store.named(&format!("c{i}")))).collect();
    let spec = JoinSpec::new([(4, 1), (2, 3)]);
    for case in 0..200 {
        let mut gen = |k: usize| {
            let mut t = Relation::empty(k);
            for _ in 0..r.gen_range(0..=16) {
                t.insert((0..k).map(|_| elems[r.gen_range(0..3)]).collect()).unwrap();
            }
            t
        };
        let (a, b) = (gen(5), gen(4));
        let w = World::new(0)
            .with_particulars(elems.iter().copied())
            .with_table(Predicate::new("p", 5), a.clone())
            .unwrap()
            .with_table(Predicate::new("q", 4), b.clone())
            .unwrap();
        let oracle = common::join(&rows(&a), &rows(&b), &[(4, 1), (2, 3)]);
        let direct = natural_join(&a, &b, &spec).map_err(|e| e.to_string())?;
        let u = store.interpret(&f).map_err(|e| e.to_string())?;
        if direct.arity() != 7 || store.arity(u) != 7 || rows(&direct) != oracle || ext(&w, &store, u)? != oracle {
            return Err(format!("case {case}: join differs from the nested-loop oracle"));
        }
    }
    Ok("arity 7, columns (xi,xj,xk,xl,xm,yi,yj), 200 random pairs".into())
}

fn demo_reproduction() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let mut traces = Vec::new();
    let mut outputs = Vec::new();
    for run in 0..2 {
        let report = demo::run(&DemoOptions::default()).map_err(|e| e.to_string())?;
        if !report.passed() {
            return Err(report.failures.join("\n"));
        }
        let path = dir.path().join(format!("trace{run}.jsonl"));
        report.session.write_trace(&path).map_err(|e| e.to_string())?;
        traces.push(std::fs::read(&path).map_err(|e| e.to_string())?);
        outputs.push(report.lines.clone());
        let s = &report.session;
        let ta = s.atoms_by_rule(Rule::Ta);
        if ta.len() != 3 {
            return Err(format!("{} T_a atoms", ta.len()));
        }
        let phi = "<<Walk(in_past, person, from_the_couches_in_the_room, NULL, to_the_dining_room_table)>>";
        let tau = demo::DEFAULT_TAU;
        let mut clips = BTreeSet::new();
        for id in &ta {
            let got = s.atom_formula(*id).map_err(|e| e.to_string())?;
            let clip = report
                .lines
                .iter()
                .find_map(|l| l.trim().strip_prefix(&format!("{id} [T_a(")))
                .and_then(|l| l.split("videoclips(").nth(1))
                .and_then(|l| l.split(')').next())
                .ok_or(format!("no chain line for {id}"))?
                .to_owned();
            let before = parse_formula(&format!("Know(in_present, me, <<Find(in_present, me, {clip}, {phi}) /\\{{}} videoclips({clip})>>)")).unwrap();
            let line = report.lines.iter().find(|l| l.trim().starts_with(&format!("{id} [T_a("))).unwrap();
            let printed = parse_formula(line.trim().split_once("] ").unwrap().1).map_err(|e| e.to_string())?;
            if printed != before {
                return Err(format!("{id} before consolidation: {printed}"));
            }
            let after = parse_formula(&format!("Know(in_present, me, <<Find(@{tau}, in_past, me, {clip}, {phi}) /\\{{}} videoclips({clip})>>)")).unwrap();
            if got != after {
                return Err(format!("{id} after consolidation: {got}"));
            }
            let sentence = s.render_atom(*id).map_err(|e| e.to_string())?;
            let want = format!("I know that I have found at {tau} the videoclip {clip} which satisfied user requirement φ.");
            if sentence != want {
                return Err(format!("rendered `{sentence}`"));
            }
            clips.insert(clip);
        }
        let labelled: BTreeSet<String> = s.corpus().positive().map(str::to_owned).collect();
        if clips != labelled {
            return Err(format!("clips {clips:?}, labels {labelled:?}"));
        }
    }
    if traces[0] != traces[1] || outputs[0] != outputs[1] {
        return Err("runs differ".into());
    }
    Ok(format!("3 facts, consolidated at {}, rendered; identical traces ({} bytes)", demo::DEFAULT_TAU, traces[0].len()))
}

fn know_depth(f: &Formula) -> usize {
    match f {
        Formula::Atom { pred, args } if pred.is_know() => match &args[2] {
            Term::Abs(a) => 1 + know_depth(a.body()),
            _ => 1,
        },
        Formula::Atom { args, .. } => args
            .iter()
            .map(|a| match a {
                Term::Abs(x) => know_depth(x.body()),
                _ => 0,
            })
            .max()
            .unwrap_or(0),
        Formula::Conj { lhs, rhs, .. } => know_depth(lhs).max(know_depth(rhs)),
        Formula::Neg(x) | Formula::Exists { body: x, .. } => know_depth(x),
        _ => 0,
    }
}

fn t_sound(s: &mut Session) -> Result<usize, String> {
    let ids: Vec<_> = s.atoms_by_rule(Rule::Ta).into_iter().chain(s.atoms_by_rule(Rule::Tb)).collect();
    let w = s.world().map_err(|e| e.to_string())?;
    for id in &ids {
        let content = s.memory().get(*id).unwrap().content;
        let f = s.store().formula_of(content).map_err(|e| e.to_string())?;
        if !f.is_sentence() || !w.eval_sentence(s.store_mut(), &f).map_err(|e| e.to_string())? {
            return Err(format!("{id}: {f} is not true"));
        }
    }
    Ok(ids.len())
}

fn axioms() -> Outcome {
    let mut checked = 0;
    for budget in 0..=4 {
        let mut r = demo::run(&DemoOptions { budget, ..DemoOptions::default() }).map_err(|e| e.to_string())?;
        checked += t_sound(&mut r.session)?;
        let s = &r.session;
        let ax4 = s.atoms_by_rule(Rule::Ax4);
        if (budget == 0) != ax4.is_empty() {
            return Err(format!("budget {budget}: {} introspection atoms", ax4.len()));
        }
        let max = s
            .memory()
            .atoms()
            .iter()
            .map(|a| s.atom_formula(a.id).map(|f| know_depth(&f) - 1).unwrap_or(0))
            .max()
            .unwrap_or(0);
        if max != budget {
            return Err(format!("budget {budget}: max nesting {max}"));
        }
    }
    let mut full = Session::load_kb(&fixture("full.kb")).map_err(|e| e.to_string())?;
    checked += t_sound(&mut full)?;

    let chain = fixture_text("chain.kb");
    let k_count = |text: &str| -> Result<(usize, Session), String> {
        let mut s = Session::new();
        s.load_str(text).map_err(|e| e.to_string())?;
        s.chain(0).map_err(|e| e.to_string())?;
        Ok((s.atoms_by_rule(Rule::AxK).len(), s))
    };
    let (fired, s) = k_count(&chain)?;
    if fired != 3 {
        return Err(format!("3-rule chain: AxK fired {fired} times"));
    }
    let contents: BTreeSet<ConceptId> = s.memory().atoms().iter().map(|a| a.content).collect();
    for k in s.atoms_by_rule(Rule::AxK) {
        let a = s.memory().get(k).unwrap();
        let ifol::epistemic::Provenance::Derived { parents, .. } = &a.provenance else { unreachable!() };
        let (premise, imp) = (s.memory().get(parents[0]).unwrap(), s.memory().get(parents[1]).unwrap());
        let (ante, cons) = implication_parts(s.store(), imp.content).ok_or("AxK without an implication")?;
        if ante != premise.content || cons != a.content {
            return Err(format!("{k}: antecedent mismatch"));
        }
    }
    for imp in s.memory().atoms() {
        if let Some((ante, cons)) = implication_parts(s.store(), imp.content) {
            if contents.contains(&ante) != contents.contains(&cons) {
                return Err(format!("{}: antecedent known but consequent not derived", imp.id));
            }
        }
    }
    let (none, _) = k_count(&chain.replace("know <<a>>", ""))?;
    let (one, _) = k_count(&chain.replace("know <<a>>", "know <<c>>"))?;
    if none != 0 || one != 1 {
        return Err(format!("AxK fired {none} times without premise and {one} times from c"));
    }
    Ok(format!("{checked} extracted sentences true, budgets 0-4 exact, AxK 3/0/1 on the chain fixture"))
}

fn round_trips() -> Outcome {
    let mut formulas = 0;
    for line in fixture_text("formulas.txt").lines().map(str::trim).filter(|l| !l.is_empty() && !l.starts_with('#')) {
        let f = parse_formula(line).map_err(|e| format!("{line}: {e}"))?;
        let text = f.to_string();
        let g = parse_formula(&text).map_err(|e| format!("{text}: {e}"))?;
        if f != g || g.to_string() != text {
            return Err(format!("formula `{line}` does not round-trip"));
        }
        formulas += 1;
    }
    let mut kbs = 0;
    for name in ["demo.kb", "chain.kb", "answer.kb", "full.kb"] {
        let mut a = Session::load_kb(&fixture(name)).map_err(|e| format!("{name}: {e}"))?;
        let dump = a.dump_kb();
        let mut b = Session::new();
        b.load_str(&dump).map_err(|e| format!("{name} dump: {e}"))?;
        let (sa, sb) = (a.state().map_err(|e| e.to_string())?, b.state().map_err(|e| e.to_string())?);
        if sa != sb || b.dump_kb() != dump {
            return Err(format!("{name}: reloaded dump differs"));
        }
        kbs += 1;
    }
    Ok(format!("{formulas} formulas, {kbs} KB files"))
}

fn answers() -> Outcome {
    let mut s = Session::load_kb(&fixture("answer.kb")).map_err(|e| e.to_string())?;
    let mut seen: BTreeMap<String, usize> = BTreeMap::new();
    for line in fixture_text("answer.cases").lines().filter(|l| !l.trim().is_empty() && !l.starts_with('#')) {
        let (want, q) = line.split_once('|').ok_or(format!("bad case `{line}`"))?;
        let want = want.trim();
        let q = s.parse_formula(q.trim()).map_err(|e| e.to_string())?;
        let got = s.answer(&q).map_err(|e| e.to_string())?;
        if got.to_string() != want {
            return Err(format!("{q}: expected {want}, got {got}"));
        }
        *seen.entry(want.to_owned()).or_default() += 1;
    }
    let total: usize = seen.values().sum();
    if total != 9 || [Answer::Yes, Answer::No, Answer::Unknown].iter().any(|a| !seen.contains_key(&a.to_string())) {
        return Err(format!("fixture coverage {seen:?}"));
    }
    Ok(format!("9 cases: {seen:?}"))
}

type Criterion = (&'static str, fn() -> Outcome);

fn main() {
    let criteria: [Criterion; 8] = [
        ("homomorphism laws on random concept trees", homomorphism),
        ("Tarski oracle equivalence", tarski),
        ("union law", union),
        ("join bookkeeping", join_bookkeeping),
        ("worked example reproduction", demo_reproduction),
        ("axiom behavior", axioms),
        ("round-trips", round_trips),
        ("answer fixture", answers),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        match check() {
            Ok(detail) => println!("PASS [{}] {name}: {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL [{}] {name}: {why}", i + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
