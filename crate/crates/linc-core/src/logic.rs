//! The logic layer: formulas as canonical terms of type `o`, signatures,
//! (co-)inductive definition tables, level assignment and stratification.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

use crate::term::{ParamRef, SimpleType, Term, TermError};

pub const AND: &str = "/\\";
pub const OR: &str = "\\/";
pub const IMP: &str = "=>";
pub const EQ: &str = "=";
pub const FORALL: &str = "forall";
pub const EXISTS: &str = "exists";
pub const TOP: &str = "true";
pub const BOT: &str = "false";

fn binop_ty() -> SimpleType {
    SimpleType::fun(&[SimpleType::o(), SimpleType::o()], SimpleType::o())
}

fn quant_ty(tau: &SimpleType) -> SimpleType {
    SimpleType::arrow(
        SimpleType::arrow(tau.clone(), SimpleType::o()),
        SimpleType::o(),
    )
}

fn eq_ty(tau: &SimpleType) -> SimpleType {
    SimpleType::fun(&[tau.clone(), tau.clone()], SimpleType::o())
}

pub fn top() -> Term {
    Term::cnst(TOP, SimpleType::o())
}

pub fn bot() -> Term {
    Term::cnst(BOT, SimpleType::o())
}

pub fn and(a: Term, b: Term) -> Term {
    Term::apps(Term::cnst(AND, binop_ty()), [a, b])
}

pub fn or(a: Term, b: Term) -> Term {
    Term::apps(Term::cnst(OR, binop_ty()), [a, b])
}

pub fn imp(a: Term, b: Term) -> Term {
    Term::apps(Term::cnst(IMP, binop_ty()), [a, b])
}

pub fn eq(tau: &SimpleType, s: Term, t: Term) -> Term {
    Term::apps(Term::cnst(EQ, eq_ty(tau)), [s, t])
}

/// `forall` applied to an abstraction of type `tau -> o`.
pub fn forall(tau: &SimpleType, abs: Term) -> Term {
    Term::app(Term::cnst(FORALL, quant_ty(tau)), abs)
}

pub fn exists(tau: &SimpleType, abs: Term) -> Term {
    Term::app(Term::cnst(EXISTS, quant_ty(tau)), abs)
}

/// λ-abstracts the eigenvariable `x` out of `body`.
pub fn close_var(body: &Term, x: &str, tau: &SimpleType) -> Term {
    fn go(t: &Term, x: &str, depth: u32) -> Term {
        match t {
            Term::Var(y, _) if y == x => Term::Bound(depth),
            Term::Var(..) | Term::Const(..) | Term::Param(..) | Term::Bound(_) => t.clone(),
            Term::Lam(ty, b) => Term::lam(ty.clone(), go(b, x, depth + 1)),
            Term::App(f, a) => Term::app(go(f, x, depth), go(a, x, depth)),
        }
    }
    Term::lam(tau.clone(), go(body, x, 0))
}

/// `forall x. body` with `x` a named eigenvariable occurring in `body`.
pub fn forall_named(x: &str, tau: &SimpleType, body: Term) -> Term {
    forall(tau, close_var(&body, x, tau))
}

pub fn exists_named(x: &str, tau: &SimpleType, body: Term) -> Term {
    exists(tau, close_var(&body, x, tau))
}

/// Structured view of a canonical formula.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FormulaView<'a> {
    Top,
    Bot,
    And(&'a Term, &'a Term),
    Or(&'a Term, &'a Term),
    Imp(&'a Term, &'a Term),
    /// `s =_tau t`
    Eq(&'a Term, &'a Term, SimpleType),
    /// `forall_tau` applied to an abstraction of type `tau -> o`
    All(SimpleType, &'a Term),
    Ex(SimpleType, &'a Term),
    /// `p t1 .. tn` for a declared (defined or undefined) predicate
    Pred(&'a str, Vec<&'a Term>),
    /// `X^p t1 .. tn`
    ParamAtom(&'a ParamRef, Vec<&'a Term>),
}

/// Destructures a formula; `None` when the term is not a well-formed
/// formula shape (wrong head or arity).
pub fn view(f: &Term) -> Option<FormulaView<'_>> {
    let (head, args) = f.spine();
    match head {
        Term::Const(name, ty) => match (name.as_str(), args.len()) {
            (TOP, 0) => Some(FormulaView::Top),
            (BOT, 0) => Some(FormulaView::Bot),
            (AND, 2) => Some(FormulaView::And(args[0], args[1])),
            (OR, 2) => Some(FormulaView::Or(args[0], args[1])),
            (IMP, 2) => Some(FormulaView::Imp(args[0], args[1])),
            (EQ, 2) => match ty.args().first() {
                Some(tau) => Some(FormulaView::Eq(args[0], args[1], (*tau).clone())),
                None => None,
            },
            (FORALL, 1) | (EXISTS, 1) => {
                let tau = match ty.args().first() {
                    Some(SimpleType::Arrow(a, _)) => a.as_ref().clone(),
                    _ => return None,
                };
                if name == FORALL {
                    Some(FormulaView::All(tau, args[0]))
                } else {
                    Some(FormulaView::Ex(tau, args[0]))
                }
            }
            _ if ty.target().is_o() => Some(FormulaView::Pred(name, args)),
            _ => None,
        },
        Term::Param(p, ty) if ty.target().is_o() => Some(FormulaView::ParamAtom(p, args)),
        _ => None,
    }
}

/// Opens a quantifier abstraction with an eigenvariable.
pub fn open_abs(abs: &Term, x: &str, tau: &SimpleType) -> Result<Term, TermError> {
    Term::app(abs.clone(), Term::var(x, tau.clone())).canonical(&SimpleType::o())
}

/// Instantiates a quantifier abstraction with a witness term.
pub fn instantiate_abs(abs: &Term, witness: &Term) -> Result<Term, TermError> {
    Term::app(abs.clone(), witness.clone()).canonical(&SimpleType::o())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Flavor {
    Mu,
    Nu,
}

impl fmt::Display for Flavor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Flavor::Mu => write!(f, "mu"),
            Flavor::Nu => write!(f, "nu"),
        }
    }
}

/// One definition clause `p x⃗ ≙ B p x⃗`. The body is stored as the closed
/// abstraction `B` of type `ty(p) -> ty(p)`; the first argument is the slot
/// for the recursive occurrences of `p`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DefClause {
    pub pred: String,
    pub flavor: Flavor,
    pub body: Term,
}

#[derive(Debug, Clone)]
pub struct Signature {
    base_types: BTreeSet<String>,
    consts: BTreeMap<String, SimpleType>,
}

impl Default for Signature {
    fn default() -> Self {
        Signature {
            base_types: BTreeSet::new(),
            consts: BTreeMap::new(),
        }
    }
}

impl Signature {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn declare_base(&mut self, name: impl Into<String>) {
        self.base_types.insert(name.into());
    }

    pub fn declare_const(&mut self, name: impl Into<String>, ty: SimpleType) {
        self.consts.insert(name.into(), ty);
    }

    pub fn const_type(&self, name: &str) -> Option<&SimpleType> {
        self.consts.get(name)
    }

    pub fn consts(&self) -> impl Iterator<Item = (&String, &SimpleType)> {
        self.consts.iter()
    }

    pub fn base_types(&self) -> impl Iterator<Item = &String> {
        self.base_types.iter()
    }

    pub fn has_base(&self, name: &str) -> bool {
        name == crate::term::FORMULA_TYPE || self.base_types.contains(name)
    }

    /// All declared names whose type targets `o`.
    pub fn predicates(&self) -> impl Iterator<Item = (&String, &SimpleType)> {
        self.consts.iter().filter(|(_, ty)| ty.target().is_o())
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DefError {
    #[error("clause for {pred}: body is not closed (free variables {vars:?})")]
    NotClosed { pred: String, vars: Vec<String> },
    #[error("clause for {pred}: body mentions parameter {param}")]
    ParameterInBody { pred: String, param: ParamRef },
    #[error("clause for {pred}: body mentions the head predicate directly; recursive occurrences must go through the abstraction slot")]
    HeadInBody { pred: String },
    #[error("clause for {pred}: body has type {got}, expected {want}")]
    BadBodyType {
        pred: String,
        got: String,
        want: String,
    },
    #[error("predicate {pred} is not declared with a type targeting o")]
    NotAPredicate { pred: String },
    #[error("predicate {pred}: argument types must be essentially first-order")]
    NonEfoArgs { pred: String },
    #[error("mutually recursive definitions: {cycle:?}")]
    MutualRecursion { cycle: Vec<String> },
    #[error("duplicate clause for predicate {pred}")]
    DuplicateClause { pred: String },
    #[error("unknown predicate {0}")]
    UnknownPredicate(String),
    #[error("level override violates the level inequality for {pred}")]
    BadLevelOverride { pred: String },
    #[error("term error: {0}")]
    Term(#[from] TermError),
}

/// A validated definition table: at most one clause per predicate, closed
/// parameter-free bodies, no mutual recursion, and a level map satisfying
/// `|p x⃗| > |B X^p x⃗|` for every clause.
#[derive(Debug, Clone)]
pub struct DefTable {
    sig: Signature,
    clauses: BTreeMap<String, DefClause>,
    levels: BTreeMap<String, u64>,
}

impl DefTable {
    /// Validates the clauses and computes the level assignment.
    pub fn new(sig: Signature, clauses: Vec<DefClause>) -> Result<DefTable, Vec<DefError>> {
        let mut map = BTreeMap::new();
        let mut errs = Vec::new();
        for c in clauses {
            if map.contains_key(&c.pred) {
                errs.push(DefError::DuplicateClause {
                    pred: c.pred.clone(),
                });
                continue;
            }
            map.insert(c.pred.clone(), c);
        }
        let mut table = DefTable {
            sig,
            clauses: map,
            levels: BTreeMap::new(),
        };
        errs.extend(table.validate());
        if !errs.is_empty() {
            return Err(errs);
        }
        table.levels = table.compute_levels().map_err(|e| vec![e])?;
        Ok(table)
    }

    pub fn signature(&self) -> &Signature {
        &self.sig
    }

    pub fn clause(&self, pred: &str) -> Option<&DefClause> {
        self.clauses.get(pred)
    }

    pub fn clauses(&self) -> impl Iterator<Item = &DefClause> {
        self.clauses.values()
    }

    pub fn levels(&self) -> &BTreeMap<String, u64> {
        &self.levels
    }

    pub fn pred_type(&self, pred: &str) -> Option<&SimpleType> {
        self.sig.const_type(pred).filter(|ty| ty.target().is_o())
    }

    /// Diagnostics for the well-formedness conditions on definitions.
    pub fn validate(&self) -> Vec<DefError> {
        let mut errs = Vec::new();
        for (pred, clause) in &self.clauses {
            let pty = match self.pred_type(pred) {
                Some(t) => t.clone(),
                None => {
                    errs.push(DefError::NotAPredicate { pred: pred.clone() });
                    continue;
                }
            };
            if !pty.args().iter().all(|t| t.is_efo()) {
                errs.push(DefError::NonEfoArgs { pred: pred.clone() });
            }
            let fv = clause.body.free_vars();
            if !fv.is_empty() {
                errs.push(DefError::NotClosed {
                    pred: pred.clone(),
                    vars: fv.into_keys().collect(),
                });
            }
            if let Some(p) = clause.body.params().into_iter().next() {
                errs.push(DefError::ParameterInBody {
                    pred: pred.clone(),
                    param: p,
                });
            }
            if clause.body.consts().contains(pred) {
                errs.push(DefError::HeadInBody { pred: pred.clone() });
            }
            let want = SimpleType::arrow(pty.clone(), pty.clone());
            match clause.body.infer_type(&mut Vec::new()) {
                Ok(got) if got == want => {}
                Ok(got) => errs.push(DefError::BadBodyType {
                    pred: pred.clone(),
                    got: got.to_string(),
                    want: want.to_string(),
                }),
                Err(e) => errs.push(e.into()),
            }
        }
        if let Some(cycle) = self.find_mutual_recursion() {
            errs.push(DefError::MutualRecursion { cycle });
        }
        errs
    }

    /// Defined predicates occurring in the body of `pred`'s clause.
    fn deps(&self, pred: &str) -> BTreeSet<String> {
        match self.clauses.get(pred) {
            Some(c) => c
                .body
                .consts()
                .into_iter()
                .filter(|q| q != pred && self.clauses.contains_key(q))
                .collect(),
            None => BTreeSet::new(),
        }
    }

    /// A dependency cycle through at least two distinct predicates, if any.
    /// Self-loops cannot occur here: recursion goes through the body's slot,
    /// never the head constant.
    fn find_mutual_recursion(&self) -> Option<Vec<String>> {
        fn dfs(
            table: &DefTable,
            node: &str,
            path: &mut Vec<String>,
            done: &mut BTreeSet<String>,
        ) -> Option<Vec<String>> {
            if done.contains(node) {
                return None;
            }
            if let Some(pos) = path.iter().position(|p| p == node) {
                let cycle: Vec<String> = path[pos..].to_vec();
                if cycle.len() >= 2 {
                    return Some(cycle);
                }
                return None;
            }
            path.push(node.to_string());
            for dep in table.deps(node) {
                if let Some(c) = dfs(table, &dep, path, done) {
                    return Some(c);
                }
            }
            path.pop();
            done.insert(node.to_string());
            None
        }
        let mut done = BTreeSet::new();
        for start in self.clauses.keys() {
            if let Some(c) = dfs(self, start, &mut Vec::new(), &mut done) {
                return Some(c);
            }
        }
        None
    }

    /// `B slot t⃗` normalized to a formula.
    pub fn unfold(&self, pred: &str, slot: &Term, args: &[Term]) -> Result<Term, DefError> {
        let clause = self
            .clauses
            .get(pred)
            .ok_or_else(|| DefError::UnknownPredicate(pred.to_string()))?;
        let t = Term::apps(
            Term::app(clause.body.clone(), slot.clone()),
            args.iter().cloned(),
        );
        Ok(t.canonical(&SimpleType::o())?)
    }

    /// Fresh argument variables `x⃗` matching `pred`'s argument types.
    pub fn fresh_args(&self, pred: &str, supply: &mut crate::term::NameSupply) -> Vec<Term> {
        match self.pred_type(pred) {
            Some(ty) => ty
                .args()
                .iter()
                .map(|t| Term::var(supply.fresh("x"), (*t).clone()))
                .collect(),
            None => Vec::new(),
        }
    }

    fn compute_levels(&self) -> Result<BTreeMap<String, u64>, DefError> {
        let mut levels: BTreeMap<String, u64> = BTreeMap::new();
        for (name, _) in self.sig.predicates() {
            if !self.clauses.contains_key(name) {
                levels.insert(name.clone(), 1);
            }
        }
        // process clauses in dependency order
        let mut pending: BTreeSet<String> = self.clauses.keys().cloned().collect();
        while !pending.is_empty() {
            let ready: Vec<String> = pending
                .iter()
                .filter(|p| self.deps(p).iter().all(|d| levels.contains_key(d)))
                .cloned()
                .collect();
            if ready.is_empty() {
                // cycle; validation rules this out
                return Err(DefError::MutualRecursion {
                    cycle: pending.into_iter().collect(),
                });
            }
            for pred in ready {
                let body = self.body_with_param_and_fresh_args(&pred)?;
                let size = size_with(&body, &levels)?;
                levels.insert(pred.clone(), size + 1);
                pending.remove(&pred);
            }
        }
        Ok(levels)
    }

    /// `B X^p x⃗` for a fresh parameter and fresh argument variables.
    fn body_with_param_and_fresh_args(&self, pred: &str) -> Result<Term, DefError> {
        let pty = self
            .pred_type(pred)
            .ok_or_else(|| DefError::UnknownPredicate(pred.to_string()))?
            .clone();
        let param = Term::param(ParamRef::new("#X", pred), pty.clone());
        let args: Vec<Term> = pty
            .args()
            .iter()
            .enumerate()
            .map(|(i, t)| Term::var(format!("#x{i}"), (*t).clone()))
            .collect();
        self.unfold(pred, &param, &args)
    }

    /// Replaces the computed level map by a user-supplied one, provided the
    /// level inequality still holds.
    pub fn with_levels(mut self, levels: BTreeMap<String, u64>) -> Result<DefTable, DefError> {
        for pred in self.clauses.keys() {
            let lvl = levels
                .get(pred)
                .ok_or_else(|| DefError::UnknownPredicate(pred.clone()))?;
            let body = self.body_with_param_and_fresh_args(pred)?;
            if *lvl <= size_with(&body, &levels)? {
                return Err(DefError::BadLevelOverride { pred: pred.clone() });
            }
        }
        self.levels = levels;
        Ok(self)
    }

    /// Size of a formula under this table's level assignment.
    pub fn size(&self, f: &Term) -> Result<u64, DefError> {
        size_with(f, &self.levels)
    }

    /// Strict positivity of `pred` together with everything it depends on:
    /// the recursion slot never occurs to the left of an implication.
    pub fn is_stratified(&self, pred: &str) -> bool {
        let mut seen = BTreeSet::new();
        let mut stack = vec![pred.to_string()];
        while let Some(p) = stack.pop() {
            if !seen.insert(p.clone()) {
                continue;
            }
            if let Some(clause) = self.clauses.get(&p) {
                if !slot_strictly_positive(&clause.body) {
                    return false;
                }
                stack.extend(self.deps(&p));
            }
        }
        true
    }

    /// Stratification verdict for every defined predicate.
    pub fn stratification(&self) -> BTreeMap<String, bool> {
        self.clauses
            .keys()
            .map(|p| (p.clone(), self.is_stratified(p)))
            .collect()
    }
}

/// Def-2.3-style size computation against an explicit level map.
pub fn size_with(f: &Term, levels: &BTreeMap<String, u64>) -> Result<u64, DefError> {
    match view(f) {
        Some(FormulaView::Top) | Some(FormulaView::Bot) | Some(FormulaView::Eq(..)) => Ok(1),
        Some(FormulaView::ParamAtom(..)) => Ok(1),
        Some(FormulaView::Pred(p, _)) => levels
            .get(p)
            .copied()
            .ok_or_else(|| DefError::UnknownPredicate(p.to_string())),
        Some(FormulaView::And(a, b))
        | Some(FormulaView::Or(a, b))
        | Some(FormulaView::Imp(a, b)) => Ok(size_with(a, levels)? + size_with(b, levels)? + 1),
        Some(FormulaView::All(_, abs)) | Some(FormulaView::Ex(_, abs)) => {
            let body = match abs {
                Term::Lam(_, b) => b.as_ref(),
                other => other,
            };
            Ok(size_with(body, levels)? + 1)
        }
        None => Err(DefError::UnknownPredicate(format!(
            "not a formula: {f:?}"
        ))),
    }
}

/// True when the outermost binder (the recursion slot) of a definition body
/// never occurs to the left of an implication.
fn slot_strictly_positive(body: &Term) -> bool {
    fn go(t: &Term, slot: u32, banned: bool) -> bool {
        match t {
            Term::Bound(i) => !(banned && *i == slot),
            Term::Var(..) | Term::Const(..) | Term::Param(..) => true,
            Term::Lam(_, b) => go(b, slot + 1, banned),
            Term::App(..) => {
                let (head, args) = t.spine();
                if let Term::Const(name, _) = head {
                    if name == IMP && args.len() == 2 {
                        return go(args[0], slot, true) && go(args[1], slot, banned);
                    }
                }
                if let Term::Bound(i) = head {
                    if banned && *i == slot {
                        return false;
                    }
                }
                args.iter().all(|a| go(a, slot, banned))
            }
        }
    }
    match body {
        Term::Lam(_, inner) => go(inner, 0, false),
        _ => true,
    }
}

/// Capture-free parameter substitution on a formula, re-canonicalized.
/// Each image must be a closed term of the parameter's type.
pub fn subst_params(f: &Term, map: &BTreeMap<ParamRef, Term>) -> Result<Term, DefError> {
    for (p, t) in map {
        if !t.is_closed() {
            return Err(DefError::Term(TermError::IllTyped(format!(
                "image of {p} is not closed"
            ))));
        }
    }
    Ok(f.apply_param_subst(map)?)
}

/// Well-formedness of a formula over a signature: canonical at type `o`,
/// every atom declared, quantifier and equality types essentially
/// first-order.
pub fn wf_formula(sig: &Signature, f: &Term) -> Result<(), String> {
    let ty = f
        .infer_type(&mut Vec::new())
        .map_err(|e| e.to_string())?;
    if !ty.is_o() {
        return Err(format!("formula has type {ty}, expected o"));
    }
    let canon = f
        .canonical(&SimpleType::o())
        .map_err(|e| e.to_string())?;
    if &canon != f {
        return Err("formula is not in canonical form".into());
    }
    wf_rec(sig, f)
}

fn wf_rec(sig: &Signature, f: &Term) -> Result<(), String> {
    match view(f) {
        Some(FormulaView::Top) | Some(FormulaView::Bot) => Ok(()),
        Some(FormulaView::Eq(s, t, tau)) => {
            if !tau.is_efo() {
                return Err(format!("equality at non-efo type {tau}"));
            }
            let _ = (s, t);
            Ok(())
        }
        Some(FormulaView::And(a, b))
        | Some(FormulaView::Or(a, b))
        | Some(FormulaView::Imp(a, b)) => {
            wf_rec(sig, a)?;
            wf_rec(sig, b)
        }
        Some(FormulaView::All(tau, abs)) | Some(FormulaView::Ex(tau, abs)) => {
            if !tau.is_efo() {
                return Err(format!("quantifier at non-efo type {tau}"));
            }
            match abs {
                Term::Lam(_, b) => wf_open(sig, b),
                _ => Err("quantifier body is not an abstraction".into()),
            }
        }
        Some(FormulaView::Pred(p, _)) => match sig.const_type(p) {
            Some(_) => Ok(()),
            None => Err(format!("undeclared predicate {p}")),
        },
        Some(FormulaView::ParamAtom(p, _)) => {
            let _ = p;
            Ok(())
        }
        None => Err(format!("not a formula: {f:?}")),
    }
}

// formula well-formedness under binders: only the o-typed skeleton matters
fn wf_open(sig: &Signature, f: &Term) -> Result<(), String> {
    wf_rec(sig, f)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn nt() -> SimpleType {
        SimpleType::base("nt")
    }

    fn z() -> Term {
        Term::cnst("z", nt())
    }

    fn s(t: Term) -> Term {
        Term::app(Term::cnst("s", SimpleType::arrow(nt(), nt())), t)
    }

    fn sig() -> Signature {
        let mut sig = Signature::new();
        sig.declare_base("nt");
        sig.declare_const("z", nt());
        sig.declare_const("s", SimpleType::arrow(nt(), nt()));
        sig.declare_const("ev", SimpleType::arrow(nt(), SimpleType::o()));
        sig
    }

    /// `B = \p w. (w = z) \/ (exists y, w = s (s y) /\ p y)`
    pub(crate) fn ev_body() -> Term {
        let pty = SimpleType::arrow(nt(), SimpleType::o());
        let w = Term::Bound(0);
        let p_of = |arg: Term| Term::app(Term::Bound(2), arg);
        let disj = or(
            eq(&nt(), w.clone(), z()),
            exists(
                &nt(),
                Term::lam(
                    nt(),
                    and(eq(&nt(), Term::Bound(1), s(s(Term::Bound(0)))), p_of(Term::Bound(0))),
                ),
            ),
        );
        Term::lam(pty, Term::lam(nt(), disj))
            .canonical(&SimpleType::arrow(
                SimpleType::arrow(nt(), SimpleType::o()),
                SimpleType::arrow(nt(), SimpleType::o()),
            ))
            .unwrap()
    }

    pub(crate) fn ev_table() -> DefTable {
        DefTable::new(
            sig(),
            vec![DefClause {
                pred: "ev".into(),
                flavor: Flavor::Mu,
                body: ev_body(),
            }],
        )
        .unwrap()
    }

    #[test]
    fn ev_definition_validates() {
        let table = ev_table();
        assert!(table.validate().is_empty());
    }

    #[test]
    fn ev_level_is_seven() {
        let table = ev_table();
        assert_eq!(table.levels().get("ev"), Some(&7));
    }

    #[test]
    fn undefined_predicate_gets_level_one() {
        let mut sg = sig();
        sg.declare_const("q", SimpleType::o());
        let table = DefTable::new(sg, vec![]).unwrap();
        assert_eq!(table.levels().get("q"), Some(&1));
    }

    #[test]
    fn trivial_body_gets_level_two() {
        let mut sg = sig();
        sg.declare_const("p", SimpleType::o());
        let body = Term::lam(SimpleType::o(), top());
        let table = DefTable::new(
            sg,
            vec![DefClause {
                pred: "p".into(),
                flavor: Flavor::Mu,
                body,
            }],
        )
        .unwrap();
        assert_eq!(table.levels().get("p"), Some(&2));
    }

    #[test]
    fn mutual_recursion_is_rejected() {
        let mut sg = sig();
        sg.declare_const("p", SimpleType::o());
        sg.declare_const("q", SimpleType::o());
        // p := q /\ true,  q := p
        let p_body = Term::lam(SimpleType::o(), and(Term::cnst("q", SimpleType::o()), top()));
        let q_body = Term::lam(SimpleType::o(), Term::cnst("p", SimpleType::o()));
        let err = DefTable::new(
            sg,
            vec![
                DefClause {
                    pred: "p".into(),
                    flavor: Flavor::Mu,
                    body: p_body,
                },
                DefClause {
                    pred: "q".into(),
                    flavor: Flavor::Mu,
                    body: q_body,
                },
            ],
        )
        .unwrap_err();
        assert!(err
            .iter()
            .any(|e| matches!(e, DefError::MutualRecursion { .. })));
    }

    #[test]
    fn parameter_in_body_is_rejected() {
        let mut sg = sig();
        sg.declare_const("p", SimpleType::o());
        let body = Term::lam(
            SimpleType::o(),
            Term::param(ParamRef::new("X", "p"), SimpleType::o()),
        );
        let err = DefTable::new(
            sg,
            vec![DefClause {
                pred: "p".into(),
                flavor: Flavor::Mu,
                body,
            }],
        )
        .unwrap_err();
        assert!(err
            .iter()
            .any(|e| matches!(e, DefError::ParameterInBody { .. })));
    }

    #[test]
    fn stratification_verdicts() {
        // ev is stratified
        assert!(ev_table().is_stratified("ev"));

        // p := p => false is not
        let mut sg = sig();
        sg.declare_const("p", SimpleType::o());
        let body = Term::lam(SimpleType::o(), imp(Term::Bound(0), bot()));
        let table = DefTable::new(
            sg,
            vec![DefClause {
                pred: "p".into(),
                flavor: Flavor::Mu,
                body,
            }],
        )
        .unwrap();
        assert!(!table.is_stratified("p"));
    }

    #[test]
    fn non_monotone_ev_is_not_stratified() {
        // ev x := (x = z) \/ (exists y, x = s y /\ (ev y => false))
        let pty = SimpleType::arrow(nt(), SimpleType::o());
        let body = Term::lam(
            pty.clone(),
            Term::lam(
                nt(),
                or(
                    eq(&nt(), Term::Bound(0), z()),
                    exists(
                        &nt(),
                        Term::lam(
                            nt(),
                            and(
                                eq(&nt(), Term::Bound(1), s(Term::Bound(0))),
                                imp(Term::app(Term::Bound(2), Term::Bound(0)), bot()),
                            ),
                        ),
                    ),
                ),
            ),
        );
        let table = DefTable::new(
            sig(),
            vec![DefClause {
                pred: "ev".into(),
                flavor: Flavor::Mu,
                body,
            }],
        )
        .unwrap();
        assert!(!table.is_stratified("ev"));
    }

    #[test]
    fn subst_params_beta_reduces() {
        // (X^p u)[X^p := S]  -->  S u
        let pty = SimpleType::arrow(nt(), SimpleType::o());
        let x = ParamRef::new("X", "ev");
        let f = Term::app(Term::param(x.clone(), pty.clone()), Term::var("u", nt()));
        let s_inv = Term::lam(nt(), eq(&nt(), Term::Bound(0), z()));
        let mut map = BTreeMap::new();
        map.insert(x, s_inv);
        let got = subst_params(&f, &map).unwrap();
        assert_eq!(got, eq(&nt(), Term::var("u", nt()), z()));

        // vacuous substitution is the identity
        let g = top();
        let got2 = subst_params(&g, &BTreeMap::new()).unwrap();
        assert_eq!(got2, g);
    }

    #[test]
    fn body_instantiation_matches_hand_normalization() {
        // B q u --> (u = z) \/ exists y, u = s (s y) /\ q y
        let table = ev_table();
        let q = Term::var("q", SimpleType::arrow(nt(), SimpleType::o()));
        let u = Term::var("u", nt());
        let got = table.unfold("ev", &q, &[u.clone()]).unwrap();
        let want = or(
            eq(&nt(), u.clone(), z()),
            exists(
                &nt(),
                Term::lam(
                    nt(),
                    and(
                        eq(&nt(), u.clone(), s(s(Term::Bound(0)))),
                        Term::app(q.clone(), Term::Bound(0)),
                    ),
                ),
            ),
        )
        .canonical(&SimpleType::o())
        .unwrap();
        assert_eq!(got, want);
    }
}
