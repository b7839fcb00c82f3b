//! A proof kernel, checker and cut-elimination engine for an intuitionistic
//! sequent calculus over simply typed λ-terms, with free equality and
//! inductive / co-inductive definitions.
//!
//! The crate is layered bottom-up:
//!
//! * [`term`] — simply typed λ-terms in β·η-long normal form, substitutions
//!   and higher-order pattern unification;
//! * [`logic`] — formulas, parameters, definition tables, levels and
//!   stratification;
//! * [`kernel`] — sequents, derivations and the rule checker;
//! * [`transform`] — eigenvariable and parameter substitution on whole
//!   derivations, `subst`-node elimination and canonical renaming;
//! * [`reduce`] — the cut-reduction relation, a deterministic single-step
//!   reducer and the iterated normalizer;
//! * [`search`] — bounded cut-free proof search;
//! * [`syntax`] — the surface language: parser, printer, elaborator;
//! * [`cli`] — command implementations behind the `linc` binary.

pub mod term;
pub mod logic;
#[doc(hidden)]
pub mod testutil;
pub mod kernel;
pub mod transform;
pub mod reduce;
pub mod search;
pub mod syntax;
pub mod cli;
