//! Intensional first-order logic with an autoepistemic `Know` layer.
//!
//! Formulas ([`syntax`]) are interpreted into hash-consed concepts
//! ([`prp`]), whose extensions in a [`worlds::World`] are computed with the
//! relational operators of [`relalg`]. [`epistemic`] holds the knowledge
//! memory and its deduction rules, [`grounding`] ties atomic concepts to
//! mock classifiers and natural language, and [`session`] drives it all
//! from KB files or the REPL.

pub mod check;
pub mod epistemic;
pub mod grounding;
pub mod prp;
pub mod relalg;
pub mod session;
pub mod syntax;
pub mod worlds;
