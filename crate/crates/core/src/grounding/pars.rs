//! Template-driven mapping from natural-language commands to formulas.
//!
//! The template file has three kinds of lines (`#` starts a comment):
//!
//! ```text
//! verb <lemma> past=<form> [present=<form>] pred=<name>/<arity> slots=<slot>,<slot>,...
//! noun <plural> singular=<word>
//! render <name>/<arity> [in_past|in_present|in_future] [open|ground] "<text with {i}>"
//! ```
//!
//! Slots are `time`, `figure`, `object`, `requirement`, or a spatial
//! keyword such as `from`, whose value is the keyword joined with the
//! landmark words (`from_the_couches`), or `NULL` when absent.

use super::GroundingError;
use crate::syntax::{AbstractedTerm, Definitions, Formula, Predicate, Tense, Term};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VerbTemplate {
    pub lemma: String,
    pub past: String,
    /// Third-person present form, when it differs from the lemma.
    pub present: Option<String>,
    pub pred: Predicate,
    pub slots: Vec<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Openness {
    Open,
    Ground,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RenderTemplate {
    pub pred: Predicate,
    pub tense: Option<Tense>,
    pub openness: Option<Openness>,
    pub text: String,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Templates {
    pub verbs: Vec<VerbTemplate>,
    /// `(plural, singular)`; the plural is also the unary type predicate.
    pub nouns: Vec<(String, String)>,
    pub renders: Vec<RenderTemplate>,
}

/// A spatial description clause.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Sdc {
    pub figure: Option<String>,
    pub verb: Option<String>,
    pub spatial_relation: Option<String>,
    pub landmark: Option<String>,
}

impl VerbTemplate {
    fn forms(&self) -> impl Iterator<Item = &str> {
        [Some(self.lemma.as_str()), Some(self.past.as_str()), self.present.as_deref()].into_iter().flatten()
    }
}

fn parse_pred(s: &str) -> Option<Predicate> {
    let (name, arity) = s.rsplit_once('/')?;
    Some(Predicate::new(name, arity.parse().ok()?))
}

impl Templates {
    pub fn parse(text: &str) -> Result<Templates, GroundingError> {
        let mut t = Templates::default();
        for (i, raw) in text.lines().enumerate() {
            let err = |message: String| GroundingError::Format { line: i + 1, message };
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (kw, rest) = line.split_once(char::is_whitespace).unwrap_or((line, ""));
            match kw {
                "verb" => {
                    let mut words = rest.split_whitespace();
                    let lemma = words.next().ok_or_else(|| err("verb needs a lemma".into()))?.to_owned();
                    let (mut past, mut present, mut pred, mut slots) = (None, None, None, None);
                    for kv in words {
                        match kv.split_once('=') {
                            Some(("past", v)) => past = Some(v.to_owned()),
                            Some(("present", v)) => present = Some(v.to_owned()),
                            Some(("pred", v)) => pred = Some(parse_pred(v).ok_or_else(|| err(format!("bad predicate `{v}`")))?),
                            Some(("slots", v)) => slots = Some(v.split(',').map(str::to_owned).collect::<Vec<_>>()),
                            Some((_, _)) => {}
                            None => return Err(err(format!("expected key=value, found `{kv}`"))),
                        }
                    }
                    let (Some(past), Some(pred), Some(slots)) = (past, pred, slots) else {
                        return Err(err("verb needs past=, pred= and slots=".into()));
                    };
                    if slots.len() != pred.arity() {
                        return Err(err(format!("{} slots for {pred}", slots.len())));
                    }
                    t.verbs.push(VerbTemplate { lemma, past, present, pred, slots });
                }
                "noun" => {
                    let parts: Vec<&str> = rest.split_whitespace().collect();
                    let [plural, singular] = parts[..] else {
                        return Err(err("expected `noun <plural> singular=<word>`".into()));
                    };
                    let singular = singular.strip_prefix("singular=").ok_or_else(|| err("expected singular=".into()))?;
                    t.nouns.push((plural.to_owned(), singular.to_owned()));
                }
                "render" => {
                    let open = rest.find('"').ok_or_else(|| err("render text must be quoted".into()))?;
                    let text = rest[open..]
                        .strip_prefix('"')
                        .and_then(|s| s.strip_suffix('"'))
                        .ok_or_else(|| err("unterminated render text".into()))?;
                    let mut head = rest[..open].split_whitespace();
                    let pred = head
                        .next()
                        .and_then(parse_pred)
                        .ok_or_else(|| err("render needs <name>/<arity>".into()))?;
                    let (mut tense, mut openness) = (None, None);
                    for w in head {
                        match w {
                            "open" => openness = Some(Openness::Open),
                            "ground" => openness = Some(Openness::Ground),
                            other => {
                                tense = Some(Tense::from_keyword(other).ok_or_else(|| err(format!("unknown qualifier `{other}`")))?)
                            }
                        }
                    }
                    t.renders.push(RenderTemplate { pred, tense, openness, text: text.to_owned() });
                }
                other => return Err(err(format!("unknown template line `{other}`"))),
            }
        }
        Ok(t)
    }

    pub fn singular(&self, plural: &str) -> Option<&str> {
        self.nouns.iter().find(|(p, _)| p == plural).map(|(_, s)| s.as_str())
    }

    fn noun_plural(&self, word: &str) -> Option<&str> {
        self.nouns.iter().find(|(p, s)| p == word || s == word).map(|(p, _)| p.as_str())
    }

    /// Most specific template for the predicate, tense and openness.
    pub fn render_template(&self, pred: &Predicate, tense: Option<Tense>, openness: Openness) -> Option<&RenderTemplate> {
        let candidates = || self.renders.iter().filter(move |r| &r.pred == pred);
        candidates()
            .find(|r| r.tense == tense && r.openness == Some(openness))
            .or_else(|| candidates().find(|r| r.tense == tense && r.openness.is_none()))
            .or_else(|| candidates().find(|r| r.tense.is_none() && r.openness == Some(openness)))
            .or_else(|| candidates().find(|r| r.tense.is_none() && r.openness.is_none()))
    }
}

const DETERMINERS: [&str; 3] = ["the", "a", "an"];
const SET_MARKER: [&str; 4] = ["in", "the", "given", "set"];

fn find_seq(words: &[String], seq: &[&str]) -> Option<usize> {
    (0..words.len()).find(|&i| words[i..].iter().zip(seq).filter(|(a, b)| a == *b).count() == seq.len())
}

/// Chunks a command into its main clause and one clause per spatial
/// keyword of the matched verb template.
fn chunk<'t>(t: &'t Templates, words: &[String]) -> Result<(usize, &'t VerbTemplate, Vec<Sdc>), GroundingError> {
    let (vi, verb) = words
        .iter()
        .enumerate()
        .find_map(|(i, w)| t.verbs.iter().find(|v| v.forms().any(|f| f == w)).map(|v| (i, v)))
        .ok_or_else(|| GroundingError::NotParseable(format!("no known verb in `{}`", words.join(" "))))?;
    let figure: Vec<&str> = words[..vi].iter().map(String::as_str).filter(|w| !DETERMINERS.contains(w)).collect();
    let mut clauses = vec![Sdc {
        figure: (!figure.is_empty()).then(|| figure.join("_")),
        verb: Some(words[vi].clone()),
        ..Sdc::default()
    }];
    let keywords: Vec<&str> =
        verb.slots.iter().map(String::as_str).filter(|s| !["time", "figure", "object", "requirement"].contains(s)).collect();
    if !keywords.is_empty() {
        let rest = &words[vi + 1..];
        let starts: Vec<usize> = (0..rest.len()).filter(|&i| keywords.contains(&rest[i].as_str())).collect();
        if !rest.is_empty() && starts.first() != Some(&0) {
            return Err(GroundingError::NotParseable(format!("expected one of {keywords:?} after `{}`", words[vi])));
        }
        for (n, &s) in starts.iter().enumerate() {
            let end = starts.get(n + 1).copied().unwrap_or(rest.len());
            clauses.push(Sdc {
                spatial_relation: Some(rest[s].clone()),
                landmark: Some(rest[s + 1..end].join("_")),
                ..Sdc::default()
            });
        }
    }
    Ok((vi, verb, clauses))
}

fn normalize(text: &str) -> Vec<String> {
    text.split_whitespace()
        .map(|w| w.trim_end_matches(['.', ',', '!', '?']))
        .filter(|w| !w.is_empty())
        .map(str::to_owned)
        .collect()
}

/// Maps a command sentence to a formula. Partial: anything the templates do
/// not cover is an error.
pub fn pars(t: &Templates, defs: &Definitions, text: &str) -> Result<Formula, GroundingError> {
    let original = normalize(text);
    let words: Vec<String> = original.iter().map(|w| w.to_lowercase()).collect();
    let (vi, verb, clauses) = chunk(t, &words)?;
    let tense = if words[vi] == verb.past && verb.past != verb.lemma { Tense::Past } else { Tense::Present };
    let not_parseable = |m: &str| GroundingError::NotParseable(format!("{m} in `{}`", original.join(" ")));

    let mut rest = vi + 1;
    let mut typed: Option<String> = None;
    let mut args = Vec::with_capacity(verb.slots.len());
    for slot in &verb.slots {
        let arg = match slot.as_str() {
            "time" => Term::Time(tense),
            "figure" => Term::Const(clauses[0].figure.clone().unwrap_or_else(|| "me".into()).into()),
            "object" => {
                let noun = words.get(rest).ok_or_else(|| not_parseable("missing object"))?;
                let plural = t.noun_plural(noun).ok_or_else(|| not_parseable(&format!("unknown noun `{noun}`")))?;
                typed = Some(plural.to_owned());
                rest += 1;
                Term::var("y")
            }
            "requirement" => {
                if words.get(rest..rest + 2) != Some(&["such".to_owned(), "that".to_owned()][..]) {
                    return Err(not_parseable("expected `such that`"));
                }
                rest += 2;
                let end = find_seq(&words[rest..], &SET_MARKER).map_or(words.len(), |i| rest + i);
                let req = &original[rest..end];
                let body = match req {
                    [] => return Err(not_parseable("empty requirement")),
                    [one] if defs.contains_key(one.as_str()) => defs[one.as_str()].clone(),
                    more => pars(t, defs, &more.join(" "))?,
                };
                rest = end;
                if rest < words.len() {
                    // "in the given set of <plural>"
                    let tail = &words[rest + SET_MARKER.len()..];
                    let [of, set] = tail else { return Err(not_parseable("expected `of <plural>` after the set marker")) };
                    if of != "of" {
                        return Err(not_parseable("expected `of`"));
                    }
                    let plural = t.noun_plural(set).ok_or_else(|| not_parseable(&format!("unknown noun `{set}`")))?;
                    typed = Some(plural.to_owned());
                    rest = words.len();
                }
                Term::Abs(Box::new(AbstractedTerm::closed(body)))
            }
            keyword => {
                let found = clauses.iter().find(|c| c.spatial_relation.as_deref() == Some(keyword));
                Term::Const(match found {
                    Some(c) => format!("{keyword}_{}", c.landmark.as_deref().unwrap_or("")).trim_end_matches('_').into(),
                    None => "NULL".into(),
                })
            }
        };
        args.push(arg);
    }
    let has_keywords = clauses.len() > 1;
    if rest < words.len() && !has_keywords {
        return Err(not_parseable(&format!("unexpected `{}`", original[rest..].join(" "))));
    }
    let atom = Formula::atom(verb.pred.clone(), args).map_err(|e| not_parseable(&e.to_string()))?;
    Ok(match typed {
        Some(plural) => {
            let ty = Formula::atom(Predicate::new(plural, 1), vec![Term::var("y")]).expect("unary type predicate");
            Formula::and(atom, ty)
        }
        None => atom,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::parse_formula;

    pub(crate) const TEMPLATES: &str = r#"
verb walk past=walked pred=Walk/5 slots=time,figure,from,through,to
verb find past=found pred=Find/4 slots=time,figure,object,requirement
noun videoclips singular=videoclip
render Walk/5 in_past "{2} walked {3} {4} {5}"
render Know/3 in_present open "I (me) know that {3}"
render Know/3 in_present "I know that {3}"
"#;

    fn fx() -> (Templates, Definitions) {
        let t = Templates::parse(TEMPLATES).unwrap();
        let mut defs = Definitions::new();
        defs.insert(
            "φ".into(),
            parse_formula("Walk(in_past, person, from_the_couches_in_the_room, NULL, to_the_dining_room_table)").unwrap(),
        );
        (t, defs)
    }

    #[test]
    fn walk_sentence() {
        let (t, defs) = fx();
        let f = pars(&t, &defs, "The person walked from the couches in the room to the dining room table").unwrap();
        assert_eq!(f, defs["φ"]);
    }

    #[test]
    fn find_command() {
        let (t, defs) = fx();
        let f = pars(&t, &defs, "Find videoclip such that φ in the given set of videoclips").unwrap();
        let expected = parse_formula(
            "Find(in_present, me, ?y, <<Walk(in_past, person, from_the_couches_in_the_room, NULL, to_the_dining_room_table)>>) /\\{(1,1)} videoclips(?y)",
        )
        .unwrap();
        assert_eq!(f, expected);
        let nested = pars(
            &t,
            &defs,
            "Find videoclip such that the person walked from the couches in the room to the dining room table in the given set of videoclips",
        )
        .unwrap();
        assert_eq!(nested, expected);
    }

    #[test]
    fn partiality() {
        let (t, defs) = fx();
        assert!(matches!(pars(&t, &defs, "colorless green ideas sleep"), Err(GroundingError::NotParseable(_))));
        assert!(pars(&t, &defs, "Find unicorn such that φ").is_err());
        assert!(pars(&t, &defs, "the person walked quickly").is_err());
    }

    #[test]
    fn clauses() {
        let (t, _) = fx();
        let words = normalize("the person walked from the couch through the door to the table.");
        let (_, verb, sdcs) = chunk(&t, &words).unwrap();
        assert_eq!(verb.lemma, "walk");
        assert_eq!(sdcs.len(), 4);
        assert_eq!(sdcs[0].figure.as_deref(), Some("person"));
        assert_eq!(sdcs[2].spatial_relation.as_deref(), Some("through"));
        assert_eq!(sdcs[3].landmark.as_deref(), Some("the_table"));
    }

    #[test]
    fn template_file_errors() {
        assert!(matches!(Templates::parse("verb walk past=walked"), Err(GroundingError::Format { line: 1, .. })));
        assert!(Templates::parse("render Walk/5 \"oops").is_err());
        assert!(Templates::parse("verb walk past=walked pred=Walk/2 slots=time").is_err());
        assert!(Templates::parse("bogus").is_err());
    }
}
