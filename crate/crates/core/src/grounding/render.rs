use std::collections::BTreeMap;

use super::pars::{Openness, Templates};
use super::GroundingError;
use crate::syntax::{Definitions, Formula, Tense, Term};

fn flatten<'a>(f: &'a Formula, out: &mut Vec<&'a Formula>) {
    match f {
        Formula::Conj { lhs, rhs, .. } => {
            flatten(lhs, out);
            flatten(rhs, out);
        }
        other => out.push(other),
    }
}

struct Ctx<'a> {
    templates: &'a Templates,
    defs: &'a Definitions,
}

impl Ctx<'_> {
    fn term(&self, t: &Term, types: &BTreeMap<Term, String>) -> Result<String, GroundingError> {
        Ok(match t {
            Term::Var(_) => types.get(t).cloned().unwrap_or_else(|| "something".into()),
            Term::Const(c) => match &**c {
                "me" => "I".into(),
                "NULL" => String::new(),
                name => {
                    let words = name.replace('_', " ");
                    match types.get(t) {
                        Some(singular) => format!("the {singular} {words}"),
                        None => words,
                    }
                }
            },
            Term::Time(tense) => match tense {
                Tense::Past => "in the past".into(),
                Tense::Present => "now".into(),
                Tense::Future => "in the future".into(),
            },
            Term::Stamp(n) => n.to_string(),
            Term::Abs(a) => match self.defs.iter().find(|(_, d)| *d == a.body()) {
                Some((name, _)) => name.clone(),
                None => self.formula(a.body())?,
            },
        })
    }

    fn leaf(&self, f: &Formula, types: &BTreeMap<Term, String>) -> Result<String, GroundingError> {
        match f {
            Formula::Top => Ok("true".into()),
            Formula::Identity(a, b) => Ok(format!("{} is {}", self.term(a, types)?, self.term(b, types)?)),
            Formula::Neg(x) => Ok(format!("it is not the case that {}", self.formula(x)?)),
            Formula::Exists { body, .. } => Ok(format!("for some value {}", self.formula(body)?)),
            Formula::Conj { .. } => self.formula(f),
            Formula::Atom { pred, args } => {
                let tense = args.iter().find_map(|a| match a {
                    Term::Time(t) => Some(*t),
                    _ => None,
                });
                let open = args.iter().any(|a| match a {
                    Term::Var(_) => true,
                    Term::Abs(x) => !x.alpha().is_empty(),
                    _ => false,
                });
                let openness = if open { Openness::Open } else { Openness::Ground };
                let tpl = self
                    .templates
                    .render_template(pred, tense, openness)
                    .ok_or_else(|| GroundingError::MissingTemplate(pred.to_string()))?;
                let mut text = tpl.text.clone();
                for (i, a) in args.iter().enumerate().rev() {
                    text = text.replace(&format!("{{{}}}", i + 1), &self.term(a, types)?);
                }
                Ok(text)
            }
        }
    }

    fn formula(&self, f: &Formula) -> Result<String, GroundingError> {
        let mut leaves = Vec::new();
        flatten(f, &mut leaves);
        let mut types = BTreeMap::new();
        let mut typing = Vec::new();
        for (i, l) in leaves.iter().enumerate() {
            if let Formula::Atom { pred, args } = l {
                if let (1, Some(singular)) = (pred.arity(), self.templates.singular(pred.name())) {
                    types.insert(args[0].clone(), singular.to_owned());
                    typing.push(i);
                }
            }
        }
        let mut parts = Vec::new();
        for (i, l) in leaves.iter().enumerate() {
            if !typing.contains(&i) {
                parts.push(self.leaf(l, &types)?);
            }
        }
        if parts.is_empty() {
            for &i in &typing {
                let Formula::Atom { args, .. } = leaves[i] else { unreachable!() };
                let singular = &types[&args[0]];
                parts.push(format!("{} is a {singular}", self.term(&args[0], &BTreeMap::new())?));
            }
        }
        Ok(parts.join(" and "))
    }
}

/// Renders a formula as an English phrase using the render templates.
pub fn render_formula(templates: &Templates, defs: &Definitions, f: &Formula) -> Result<String, GroundingError> {
    let raw = Ctx { templates, defs }.formula(f)?;
    Ok(raw.split_whitespace().collect::<Vec<_>>().join(" "))
}

/// Like [`render_formula`], capitalized and terminated by a period.
pub fn render_sentence(templates: &Templates, defs: &Definitions, f: &Formula) -> Result<String, GroundingError> {
    let body = render_formula(templates, defs, f)?;
    let mut chars = body.chars();
    let mut out: String = match chars.next() {
        Some(c) => c.to_uppercase().chain(chars).collect(),
        None => String::new(),
    };
    out.push('.');
    Ok(out)
}
