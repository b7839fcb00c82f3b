//! Transformations on whole derivations: eigenvariable substitution,
//! parameter substitution, `subst`-node elimination and canonical renaming
//! of internal names.
//!
//! Internal eigenvariables and parameters (those not free in the end
//! sequent) are treated as arbitrary, so both substitution procedures start
//! by renaming them apart from the incoming substitution. Every rebuilt node
//! goes back through `Derivation::apply`, which re-validates it; a failure
//! there indicates a bug, not bad user input.

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use crate::kernel::{Derivation, KernelError, Rule};
use crate::logic::{DefError, DefTable, Flavor};
use crate::term::{
    fresh_name, ParamRef, SimpleType, Subst, Term, TermError, UnifyError,
};

#[derive(Debug, Error)]
pub enum TransformError {
    #[error("{0}")]
    Kernel(#[from] KernelError),
    #[error("{0}")]
    Unify(#[from] UnifyError),
    #[error("{0}")]
    Term(#[from] TermError),
    #[error("{0}")]
    Logic(#[from] DefError),
    #[error("{0}")]
    Internal(String),
}

fn internal(msg: impl Into<String>) -> TransformError {
    TransformError::Internal(msg.into())
}

// ---------------------------------------------------------------------------
// renaming walks

fn rename_term(t: &Term, vmap: &BTreeMap<String, String>, pmap: &BTreeMap<String, String>) -> Term {
    match t {
        Term::Var(x, ty) => match vmap.get(x) {
            Some(y) => Term::var(y.clone(), ty.clone()),
            None => t.clone(),
        },
        Term::Param(p, ty) => match pmap.get(&p.name) {
            Some(q) => Term::param(ParamRef::new(q.clone(), p.pred.clone()), ty.clone()),
            None => t.clone(),
        },
        Term::Bound(_) | Term::Const(..) => t.clone(),
        Term::Lam(ty, b) => Term::lam(ty.clone(), rename_term(b, vmap, pmap)),
        Term::App(f, a) => Term::app(rename_term(f, vmap, pmap), rename_term(a, vmap, pmap)),
    }
}

fn rename_subst(s: &Subst, vmap: &BTreeMap<String, String>, pmap: &BTreeMap<String, String>) -> Subst {
    Subst::from_pairs(s.iter().map(|(x, t)| {
        let x = vmap.get(x).cloned().unwrap_or_else(|| x.clone());
        (x, rename_term(t, vmap, pmap))
    }))
}

fn rename_name(n: &str, map: &BTreeMap<String, String>) -> String {
    map.get(n).cloned().unwrap_or_else(|| n.to_string())
}

/// Consistent whole-tree renaming of eigenvariables and parameters. The
/// target names must be fresh for the tree; under that assumption validity
/// is preserved, so the tree is rebuilt without re-checking.
pub(crate) fn rename_all(
    d: &Derivation,
    vmap: &BTreeMap<String, String>,
    pmap: &BTreeMap<String, String>,
) -> Derivation {
    let rt = |t: &Term| rename_term(t, vmap, pmap);
    let rule = match &d.rule {
        Rule::Init { formula } => Rule::Init { formula: rt(formula) },
        Rule::ContractL { keep, dup } => Rule::ContractL { keep: *keep, dup: *dup },
        Rule::WeakenL { pos, formula } => Rule::WeakenL { pos: *pos, formula: rt(formula) },
        Rule::Multicut { cuts } => Rule::Multicut { cuts: cuts.clone() },
        Rule::BotL { pos, left, right } => Rule::BotL {
            pos: *pos,
            left: left.iter().map(&rt).collect(),
            right: rt(right),
        },
        Rule::TopR { left } => Rule::TopR { left: left.iter().map(&rt).collect() },
        Rule::AndL { pos, conj, side } => Rule::AndL { pos: *pos, conj: rt(conj), side: *side },
        Rule::AndR => Rule::AndR,
        Rule::OrL { pos } => Rule::OrL { pos: *pos },
        Rule::OrR { disj, side } => Rule::OrR { disj: rt(disj), side: *side },
        Rule::ImpL { pos } => Rule::ImpL { pos: *pos },
        Rule::ImpR => Rule::ImpR,
        Rule::AllL { pos, quantified, witness } => Rule::AllL {
            pos: *pos,
            quantified: rt(quantified),
            witness: rt(witness),
        },
        Rule::AllR { eigen } => Rule::AllR {
            eigen: (rename_name(&eigen.0, vmap), eigen.1.clone()),
        },
        Rule::ExL { pos, eigen } => Rule::ExL {
            pos: *pos,
            eigen: (rename_name(&eigen.0, vmap), eigen.1.clone()),
        },
        Rule::ExR { quantified, witness } => Rule::ExR {
            quantified: rt(quantified),
            witness: rt(witness),
        },
        Rule::EqL { pos, left, right, mgu } => Rule::EqL {
            pos: *pos,
            left: left.iter().map(&rt).collect(),
            right: rt(right),
            mgu: mgu.as_ref().map(|s| rename_subst(s, vmap, pmap)),
        },
        Rule::EqR { left, formula } => Rule::EqR {
            left: left.iter().map(&rt).collect(),
            formula: rt(formula),
        },
        Rule::IndL { pos, principal, inv, inv_vars } => Rule::IndL {
            pos: *pos,
            principal: rt(principal),
            inv: rt(inv),
            inv_vars: inv_vars
                .iter()
                .map(|(n, ty)| (rename_name(n, vmap), ty.clone()))
                .collect(),
        },
        Rule::IndR { principal, param } => Rule::IndR {
            principal: rt(principal),
            param: rename_name(param, pmap),
        },
        Rule::IndRp { principal } => Rule::IndRp { principal: rt(principal) },
        Rule::CoindL { pos, principal, param } => Rule::CoindL {
            pos: *pos,
            principal: rt(principal),
            param: rename_name(param, pmap),
        },
        Rule::CoindLp { pos, principal } => Rule::CoindLp {
            pos: *pos,
            principal: rt(principal),
        },
        Rule::CoindR { principal, inv, inv_vars } => Rule::CoindR {
            principal: rt(principal),
            inv: rt(inv),
            inv_vars: inv_vars
                .iter()
                .map(|(n, ty)| (rename_name(n, vmap), ty.clone()))
                .collect(),
        },
        Rule::Subst => Rule::Subst,
    };
    Derivation {
        rule,
        concl: crate::kernel::Sequent::new(
            d.concl.left.iter().map(&rt).collect(),
            rt(&d.concl.right),
        ),
        children: d.children.iter().map(|c| rename_all(c, vmap, pmap)).collect(),
    }
}

fn all_var_names(d: &Derivation, out: &mut BTreeSet<String>) {
    let touch = |t: &Term, out: &mut BTreeSet<String>| out.extend(t.free_vars().into_keys());
    for f in &d.concl.left {
        touch(f, out);
    }
    touch(&d.concl.right, out);
    match &d.rule {
        Rule::AllR { eigen } | Rule::ExL { eigen, .. } => {
            out.insert(eigen.0.clone());
        }
        Rule::AllL { witness, .. } | Rule::ExR { witness, .. } => touch(witness, out),
        Rule::EqL { mgu: Some(s), .. } => {
            for (x, t) in s.iter() {
                out.insert(x.clone());
                touch(t, out);
            }
        }
        Rule::IndL { inv_vars, .. } | Rule::CoindR { inv_vars, .. } => {
            out.extend(inv_vars.iter().map(|(n, _)| n.clone()));
        }
        Rule::WeakenL { formula, .. } => touch(formula, out),
        _ => {}
    }
    for c in &d.children {
        all_var_names(c, out);
    }
}

fn all_param_names(d: &Derivation, out: &mut BTreeSet<String>) {
    let touch = |t: &Term, out: &mut BTreeSet<String>| {
        out.extend(t.params().into_iter().map(|p| p.name));
    };
    for f in &d.concl.left {
        touch(f, out);
    }
    touch(&d.concl.right, out);
    match &d.rule {
        Rule::IndR { param, .. } | Rule::CoindL { param, .. } => {
            out.insert(param.clone());
        }
        Rule::IndL { inv, .. } | Rule::CoindR { inv, .. } => touch(inv, out),
        Rule::AllL { witness, .. } | Rule::ExR { witness, .. } => touch(witness, out),
        _ => {}
    }
    for c in &d.children {
        all_param_names(c, out);
    }
}

/// Renames internal eigenvariables so none of them collides with `avoid`.
fn rename_internal_vars_apart(d: &Derivation, avoid: &BTreeSet<String>) -> Derivation {
    let pinned: BTreeSet<String> = d.concl.free_vars().into_keys().collect();
    let mut names = BTreeSet::new();
    all_var_names(d, &mut names);
    let colliding: Vec<String> = names
        .iter()
        .filter(|n| avoid.contains(*n) && !pinned.contains(*n))
        .cloned()
        .collect();
    if colliding.is_empty() {
        return d.clone();
    }
    let mut used: BTreeSet<String> = names.union(avoid).cloned().collect();
    let mut vmap = BTreeMap::new();
    for c in colliding {
        let fresh = fresh_name(&format!("{c}'"), &used);
        used.insert(fresh.clone());
        vmap.insert(c, fresh);
    }
    rename_all(d, &vmap, &BTreeMap::new())
}

fn rename_internal_params_apart(d: &Derivation, avoid: &BTreeSet<String>) -> Derivation {
    let pinned: BTreeSet<String> = d.concl.params().into_iter().map(|p| p.name).collect();
    let mut names = BTreeSet::new();
    all_param_names(d, &mut names);
    let colliding: Vec<String> = names
        .iter()
        .filter(|n| avoid.contains(*n) && !pinned.contains(*n))
        .cloned()
        .collect();
    if colliding.is_empty() {
        return d.clone();
    }
    let mut used: BTreeSet<String> = names.union(avoid).cloned().collect();
    let mut pmap = BTreeMap::new();
    for c in colliding {
        let fresh = fresh_name(&format!("{c}'"), &used);
        used.insert(fresh.clone());
        pmap.insert(c, fresh);
    }
    rename_all(d, &BTreeMap::new(), &pmap)
}

// ---------------------------------------------------------------------------
// eigenvariable substitution (Πθ)

/// Applies an eigenvariable substitution to a derivation. The result is a
/// checker-valid derivation of the instantiated end sequent; equality nodes
/// are re-derived by unifying the instantiated equation and instantiating
/// the stored premise along the connecting substitution.
pub fn subst_derivation(
    defs: &DefTable,
    d: &Derivation,
    theta: &Subst,
) -> Result<Derivation, TransformError> {
    if theta.is_empty() {
        return Ok(d.clone());
    }
    let mut avoid: BTreeSet<String> = theta.domain().cloned().collect();
    avoid.extend(theta.range_vars());
    let d = rename_internal_vars_apart(d, &avoid);
    subst_rec(defs, &d, theta)
}

fn subst_terms(ts: &[Term], theta: &Subst) -> Result<Vec<Term>, TermError> {
    ts.iter().map(|t| t.apply_subst(theta)).collect()
}

fn subst_rec(defs: &DefTable, d: &Derivation, theta: &Subst) -> Result<Derivation, TransformError> {
    let st = |t: &Term| t.apply_subst(theta);
    let rule = match &d.rule {
        Rule::Init { formula } => Rule::Init { formula: st(formula)? },
        Rule::ContractL { keep, dup } => Rule::ContractL { keep: *keep, dup: *dup },
        Rule::WeakenL { pos, formula } => Rule::WeakenL { pos: *pos, formula: st(formula)? },
        Rule::Multicut { cuts } => Rule::Multicut { cuts: cuts.clone() },
        Rule::BotL { pos, left, right } => Rule::BotL {
            pos: *pos,
            left: subst_terms(left, theta)?,
            right: st(right)?,
        },
        Rule::TopR { left } => Rule::TopR { left: subst_terms(left, theta)? },
        Rule::AndL { pos, conj, side } => Rule::AndL { pos: *pos, conj: st(conj)?, side: *side },
        Rule::AndR => Rule::AndR,
        Rule::OrL { pos } => Rule::OrL { pos: *pos },
        Rule::OrR { disj, side } => Rule::OrR { disj: st(disj)?, side: *side },
        Rule::ImpL { pos } => Rule::ImpL { pos: *pos },
        Rule::ImpR => Rule::ImpR,
        Rule::AllL { pos, quantified, witness } => Rule::AllL {
            pos: *pos,
            quantified: st(quantified)?,
            witness: st(witness)?,
        },
        Rule::AllR { eigen } => Rule::AllR { eigen: eigen.clone() },
        Rule::ExL { pos, eigen } => Rule::ExL { pos: *pos, eigen: eigen.clone() },
        Rule::ExR { quantified, witness } => Rule::ExR {
            quantified: st(quantified)?,
            witness: st(witness)?,
        },
        Rule::EqL { pos, left, right, mgu } => {
            return subst_eq_left(defs, d, theta, *pos, left, right, mgu.as_ref());
        }
        Rule::EqR { left, formula } => Rule::EqR {
            left: subst_terms(left, theta)?,
            formula: st(formula)?,
        },
        Rule::IndL { pos, principal, inv, inv_vars } => Rule::IndL {
            pos: *pos,
            principal: st(principal)?,
            inv: st(inv)?,
            inv_vars: inv_vars.clone(),
        },
        Rule::IndR { principal, param } => Rule::IndR {
            principal: st(principal)?,
            param: param.clone(),
        },
        Rule::IndRp { principal } => Rule::IndRp { principal: st(principal)? },
        Rule::CoindL { pos, principal, param } => Rule::CoindL {
            pos: *pos,
            principal: st(principal)?,
            param: param.clone(),
        },
        Rule::CoindLp { pos, principal } => Rule::CoindLp {
            pos: *pos,
            principal: st(principal)?,
        },
        Rule::CoindR { principal, inv, inv_vars } => Rule::CoindR {
            principal: st(principal)?,
            inv: st(inv)?,
            inv_vars: inv_vars.clone(),
        },
        Rule::Subst => Rule::Subst,
    };
    let children = d
        .children
        .iter()
        .map(|c| subst_rec(defs, c, theta))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(Derivation::apply(defs, rule, children)?)
}

fn subst_eq_left(
    defs: &DefTable,
    d: &Derivation,
    theta: &Subst,
    pos: usize,
    left: &[Term],
    right: &Term,
    mgu: Option<&Subst>,
) -> Result<Derivation, TransformError> {
    let new_left = subst_terms(left, theta)?;
    let new_right = right.apply_subst(theta)?;
    let (s, t) = match crate::logic::view(&new_left[pos]) {
        Some(crate::logic::FormulaView::Eq(s, t, _)) => (s.clone(), t.clone()),
        _ => return Err(internal("eqL principal is not an equality after substitution")),
    };
    let new_mgu = crate::term::unify(&s, &t)?;
    let children = match (&new_mgu, mgu) {
        (None, _) => Vec::new(),
        (Some(rho), Some(_)) => {
            // the old premise is the old MGU instance; θ∘ρ' factors through
            // an idempotent MGU pointwise, so instantiating the premise by
            // θ∘ρ' yields exactly the new MGU instance
            let conn = theta.compose(rho)?;
            vec![subst_rec(defs, &d.children[0], &conn)?]
        }
        (Some(_), None) => {
            return Err(internal(
                "instantiated equation became unifiable although the original was not",
            ))
        }
    };
    Ok(Derivation::apply(
        defs,
        Rule::EqL {
            pos,
            left: new_left,
            right: new_right,
            mgu: new_mgu,
        },
        children,
    )?)
}

// ---------------------------------------------------------------------------
// parameter substitution (ΠΘ)

/// One parameter-substitution entry: the invariant `S` together with the
/// derivation justifying it as a pre- (μ) or post- (ν) fixed point, stated
/// over the entry's own eigenvariables.
#[derive(Debug, Clone, PartialEq)]
pub struct ParamEntry {
    pub proof: Derivation,
    pub inv: Term,
    pub inv_vars: Vec<(String, SimpleType)>,
}

/// A partial map from parameters to `(Π_S, S)` pairs with finite support.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ParamSubst {
    entries: BTreeMap<ParamRef, ParamEntry>,
}

impl ParamSubst {
    pub fn new() -> Self {
        Self::default()
    }

    /// Validates and records `X^p ↦ (Π_S, S)`: `S` closed at `p`'s type and
    /// `Π_S` proving `B S x⃗ ⊢ S x⃗` (μ) or `S x⃗ ⊢ B S x⃗` (ν).
    pub fn insert(
        &mut self,
        defs: &DefTable,
        param: ParamRef,
        proof: Derivation,
        inv: Term,
        inv_vars: Vec<(String, SimpleType)>,
    ) -> Result<(), TransformError> {
        let clause = defs
            .clause(&param.pred)
            .ok_or_else(|| internal(format!("{} is not a defined predicate", param.pred)))?;
        let pty = defs
            .pred_type(&param.pred)
            .ok_or_else(|| internal(format!("{} has no predicate type", param.pred)))?
            .clone();
        if !inv.is_closed() {
            return Err(internal("parameter substitution image must be closed"));
        }
        let ity = inv.infer_type(&mut Vec::new())?;
        if ity != pty {
            return Err(internal(format!(
                "invariant has type {ity}, parameter expects {pty}"
            )));
        }
        let xs: Vec<Term> = inv_vars
            .iter()
            .map(|(n, ty)| Term::var(n.clone(), ty.clone()))
            .collect();
        let body = defs.unfold(&param.pred, &inv, &xs)?;
        let s_x = Term::apps(inv.clone(), xs.iter().cloned()).canonical(&SimpleType::o())?;
        let want = match clause.flavor {
            Flavor::Mu => crate::kernel::Sequent::new(vec![body], s_x),
            Flavor::Nu => crate::kernel::Sequent::new(vec![s_x], body),
        };
        if proof.concl != want {
            return Err(internal(format!(
                "parameter substitution proof concludes {:?}, expected {:?}",
                proof.concl, want
            )));
        }
        let report = proof.check(defs);
        if !report.ok() {
            return Err(internal(format!(
                "parameter substitution proof does not check:\n{report}"
            )));
        }
        self.entries.insert(
            param,
            ParamEntry {
                proof,
                inv,
                inv_vars,
            },
        );
        Ok(())
    }

    pub fn get(&self, p: &ParamRef) -> Option<&ParamEntry> {
        self.entries.get(p)
    }

    pub fn support(&self) -> impl Iterator<Item = &ParamRef> {
        self.entries.keys()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// The induced formula-level substitution `X^p ↦ S`.
    pub fn term_map(&self) -> BTreeMap<ParamRef, Term> {
        self.entries
            .iter()
            .map(|(p, e)| (p.clone(), e.inv.clone()))
            .collect()
    }
}

/// Applies a parameter substitution to a derivation: right-unfoldings of a
/// substituted inductive parameter become cuts against its invariant proof,
/// left-unfoldings of a substituted co-inductive parameter become the
/// double-cut form, and every other node maps structurally.
pub fn param_subst_derivation(
    defs: &DefTable,
    d: &Derivation,
    theta: &ParamSubst,
) -> Result<Derivation, TransformError> {
    if theta.is_empty() {
        return Ok(d.clone());
    }
    let mut avoid: BTreeSet<String> = theta.support().map(|p| p.name.clone()).collect();
    for e in theta.entries.values() {
        avoid.extend(e.inv.params().into_iter().map(|p| p.name));
    }
    let d = rename_internal_params_apart(d, &avoid);
    param_rec(defs, &d, theta, &theta.term_map())
}

fn param_rec(
    defs: &DefTable,
    d: &Derivation,
    theta: &ParamSubst,
    tmap: &BTreeMap<ParamRef, Term>,
) -> Result<Derivation, TransformError> {
    match &d.rule {
        Rule::IndRp { principal } => {
            if let Some(crate::logic::FormulaView::ParamAtom(p, args)) =
                crate::logic::view(principal)
            {
                let pref = p.clone();
                let args: Vec<Term> = args.into_iter().cloned().collect();
                if let Some(entry) = theta.get(&pref).cloned() {
                    let args = args
                        .iter()
                        .map(|a| a.apply_param_subst(tmap))
                        .collect::<Result<Vec<_>, _>>()?;
                    let unfolded = param_rec(defs, &d.children[0], theta, tmap)?;
                    let inst = Subst::from_pairs(
                        entry
                            .inv_vars
                            .iter()
                            .map(|(n, _)| n.clone())
                            .zip(args.iter().cloned()),
                    );
                    let inv_inst = subst_derivation(defs, &entry.proof, &inst)?;
                    return Ok(Derivation::apply(
                        defs,
                        Rule::Multicut { cuts: vec![0] },
                        vec![unfolded, inv_inst],
                    )?);
                }
            }
            param_structural(defs, d, theta, tmap)
        }
        Rule::CoindLp { pos, principal } => {
            if let Some(crate::logic::FormulaView::ParamAtom(p, args)) =
                crate::logic::view(principal)
            {
                let pref = p.clone();
                let args: Vec<Term> = args.into_iter().cloned().collect();
                if let Some(entry) = theta.get(&pref).cloned() {
                    let pos = *pos;
                    let args = args
                        .iter()
                        .map(|a| a.apply_param_subst(tmap))
                        .collect::<Result<Vec<_>, _>>()?;
                    let s_t = Term::apps(entry.inv.clone(), args.iter().cloned())
                        .canonical(&SimpleType::o())?;
                    let inst = Subst::from_pairs(
                        entry
                            .inv_vars
                            .iter()
                            .map(|(n, _)| n.clone())
                            .zip(args.iter().cloned()),
                    );
                    let inv_inst = subst_derivation(defs, &entry.proof, &inst)?;
                    let id = Derivation::apply(defs, Rule::Init { formula: s_t }, vec![])?;
                    let inner = Derivation::apply(
                        defs,
                        Rule::Multicut { cuts: vec![0] },
                        vec![id, inv_inst],
                    )?;
                    let cont = param_rec(defs, &d.children[0], theta, tmap)?;
                    return Ok(Derivation::apply(
                        defs,
                        Rule::Multicut { cuts: vec![pos] },
                        vec![inner, cont],
                    )?);
                }
            }
            param_structural(defs, d, theta, tmap)
        }
        _ => param_structural(defs, d, theta, tmap),
    }
}

fn param_structural(
    defs: &DefTable,
    d: &Derivation,
    theta: &ParamSubst,
    tmap: &BTreeMap<ParamRef, Term>,
) -> Result<Derivation, TransformError> {
    let pt = |t: &Term| t.apply_param_subst(tmap);
    let pts = |ts: &[Term]| -> Result<Vec<Term>, TermError> { ts.iter().map(&pt).collect() };
    let rule = match &d.rule {
        Rule::Init { formula } => Rule::Init { formula: pt(formula)? },
        Rule::ContractL { keep, dup } => Rule::ContractL { keep: *keep, dup: *dup },
        Rule::WeakenL { pos, formula } => Rule::WeakenL { pos: *pos, formula: pt(formula)? },
        Rule::Multicut { cuts } => Rule::Multicut { cuts: cuts.clone() },
        Rule::BotL { pos, left, right } => Rule::BotL {
            pos: *pos,
            left: pts(left)?,
            right: pt(right)?,
        },
        Rule::TopR { left } => Rule::TopR { left: pts(left)? },
        Rule::AndL { pos, conj, side } => Rule::AndL { pos: *pos, conj: pt(conj)?, side: *side },
        Rule::AndR => Rule::AndR,
        Rule::OrL { pos } => Rule::OrL { pos: *pos },
        Rule::OrR { disj, side } => Rule::OrR { disj: pt(disj)?, side: *side },
        Rule::ImpL { pos } => Rule::ImpL { pos: *pos },
        Rule::ImpR => Rule::ImpR,
        Rule::AllL { pos, quantified, witness } => Rule::AllL {
            pos: *pos,
            quantified: pt(quantified)?,
            witness: pt(witness)?,
        },
        Rule::AllR { eigen } => Rule::AllR { eigen: eigen.clone() },
        Rule::ExL { pos, eigen } => Rule::ExL { pos: *pos, eigen: eigen.clone() },
        Rule::ExR { quantified, witness } => Rule::ExR {
            quantified: pt(quantified)?,
            witness: pt(witness)?,
        },
        Rule::EqL { pos, left, right, .. } => {
            let new_left = pts(left)?;
            let new_right = pt(right)?;
            let (s, t) = match crate::logic::view(&new_left[*pos]) {
                Some(crate::logic::FormulaView::Eq(s, t, _)) => (s.clone(), t.clone()),
                _ => return Err(internal("eqL principal is not an equality")),
            };
            let mgu = crate::term::unify(&s, &t)?;
            let children = match &mgu {
                None => Vec::new(),
                Some(_) => vec![param_rec(defs, &d.children[0], theta, tmap)?],
            };
            return Ok(Derivation::apply(
                defs,
                Rule::EqL {
                    pos: *pos,
                    left: new_left,
                    right: new_right,
                    mgu,
                },
                children,
            )?);
        }
        Rule::EqR { left, formula } => Rule::EqR {
            left: pts(left)?,
            formula: pt(formula)?,
        },
        Rule::IndL { pos, principal, inv, inv_vars } => Rule::IndL {
            pos: *pos,
            principal: pt(principal)?,
            inv: pt(inv)?,
            inv_vars: inv_vars.clone(),
        },
        Rule::IndR { principal, param } => Rule::IndR {
            principal: pt(principal)?,
            param: param.clone(),
        },
        Rule::IndRp { principal } => Rule::IndRp { principal: pt(principal)? },
        Rule::CoindL { pos, principal, param } => Rule::CoindL {
            pos: *pos,
            principal: pt(principal)?,
            param: param.clone(),
        },
        Rule::CoindLp { pos, principal } => Rule::CoindLp {
            pos: *pos,
            principal: pt(principal)?,
        },
        Rule::CoindR { principal, inv, inv_vars } => Rule::CoindR {
            principal: pt(principal)?,
            inv: pt(inv)?,
            inv_vars: inv_vars.clone(),
        },
        Rule::Subst => Rule::Subst,
    };
    let children = d
        .children
        .iter()
        .map(|c| param_rec(defs, c, theta, tmap))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(Derivation::apply(defs, rule, children)?)
}

// ---------------------------------------------------------------------------
// subst elimination and canonical renaming

/// Deletes every `subst` node by splicing in its identity-substitution
/// premise; the end sequent is unchanged.
pub fn eliminate_subst(d: &Derivation) -> Derivation {
    if matches!(d.rule, Rule::Subst) {
        return eliminate_subst(&d.children[0]);
    }
    Derivation {
        rule: d.rule.clone(),
        concl: d.concl.clone(),
        children: d.children.iter().map(eliminate_subst).collect(),
    }
}

/// Canonical numbering of internal eigenvariables and parameters: two
/// derivations that differ only in the choice of internal names map to
/// structurally equal trees.
pub fn rename_internal(d: &Derivation) -> Derivation {
    let mut pinned: BTreeSet<String> = d.concl.free_vars().into_keys().collect();
    pinned.extend(d.concl.params().into_iter().map(|p| p.name));
    let venv: BTreeMap<String, String> = d
        .concl
        .free_vars()
        .into_keys()
        .map(|n| (n.clone(), n))
        .collect();
    let penv: BTreeMap<String, String> = d
        .concl
        .params()
        .into_iter()
        .map(|p| (p.name.clone(), p.name))
        .collect();
    canon_rec(d, venv, penv, 1, 1, &pinned)
}

fn canon_name(prefix: &str, counter: &mut u64, pinned: &BTreeSet<String>) -> String {
    loop {
        let cand = format!("{prefix}{counter}");
        *counter += 1;
        if !pinned.contains(&cand) {
            return cand;
        }
    }
}

/// First occurrences of unmapped names in a term, in traversal order.
fn scan_term(
    t: &Term,
    venv: &mut BTreeMap<String, String>,
    penv: &mut BTreeMap<String, String>,
    vc: &mut u64,
    pc: &mut u64,
    pinned: &BTreeSet<String>,
) {
    match t {
        Term::Var(x, _) => {
            if !venv.contains_key(x) {
                let n = canon_name("v", vc, pinned);
                venv.insert(x.clone(), n);
            }
        }
        Term::Param(p, _) => {
            if !penv.contains_key(&p.name) {
                let n = canon_name("P", pc, pinned);
                penv.insert(p.name.clone(), n);
            }
        }
        Term::Bound(_) | Term::Const(..) => {}
        Term::Lam(_, b) => scan_term(b, venv, penv, vc, pc, pinned),
        Term::App(f, a) => {
            scan_term(f, venv, penv, vc, pc, pinned);
            scan_term(a, venv, penv, vc, pc, pinned);
        }
    }
}

fn canon_rec(
    d: &Derivation,
    mut venv: BTreeMap<String, String>,
    mut penv: BTreeMap<String, String>,
    mut vc: u64,
    mut pc: u64,
    pinned: &BTreeSet<String>,
) -> Derivation {
    // assign canonical names to this node's new names in a fixed order:
    // payload first, then the premise sequents left to right
    match &d.rule {
        Rule::AllL { witness, .. } | Rule::ExR { witness, .. } => {
            scan_term(witness, &mut venv, &mut penv, &mut vc, &mut pc, pinned)
        }
        Rule::WeakenL { formula, .. } => {
            scan_term(formula, &mut venv, &mut penv, &mut vc, &mut pc, pinned)
        }
        Rule::AllR { eigen } | Rule::ExL { eigen, .. } => {
            if !venv.contains_key(&eigen.0) {
                let n = canon_name("v", &mut vc, pinned);
                venv.insert(eigen.0.clone(), n);
            }
        }
        Rule::IndL { inv, inv_vars, .. } | Rule::CoindR { inv, inv_vars, .. } => {
            scan_term(inv, &mut venv, &mut penv, &mut vc, &mut pc, pinned);
            for (n, _) in inv_vars {
                if !venv.contains_key(n) {
                    let nn = canon_name("v", &mut vc, pinned);
                    venv.insert(n.clone(), nn);
                }
            }
        }
        Rule::IndR { param, principal } | Rule::CoindL { param, principal, .. } => {
            scan_term(principal, &mut venv, &mut penv, &mut vc, &mut pc, pinned);
            if !penv.contains_key(param) {
                let n = canon_name("P", &mut pc, pinned);
                penv.insert(param.clone(), n);
            }
        }
        Rule::EqL { mgu: Some(s), .. } => {
            for (_, t) in s.iter() {
                scan_term(t, &mut venv, &mut penv, &mut vc, &mut pc, pinned);
            }
        }
        _ => {}
    }
    for c in &d.children {
        for f in &c.concl.left {
            scan_term(f, &mut venv, &mut penv, &mut vc, &mut pc, pinned);
        }
        scan_term(&c.concl.right, &mut venv, &mut penv, &mut vc, &mut pc, pinned);
    }
    let rt = |t: &Term| rename_term(t, &venv, &penv);
    let rule = rename_rule_shallow(&d.rule, &venv, &penv);
    let concl = crate::kernel::Sequent::new(
        d.concl.left.iter().map(&rt).collect(),
        rt(&d.concl.right),
    );
    let children = d
        .children
        .iter()
        .map(|c| canon_rec(c, venv.clone(), penv.clone(), vc, pc, pinned))
        .collect();
    Derivation { rule, concl, children }
}

fn rename_rule_shallow(
    rule: &Rule,
    vmap: &BTreeMap<String, String>,
    pmap: &BTreeMap<String, String>,
) -> Rule {
    // reuse rename_all's payload renaming for a single node
    let holder = Derivation {
        rule: rule.clone(),
        concl: crate::kernel::Sequent::new(Vec::new(), crate::logic::top()),
        children: Vec::new(),
    };
    rename_all(&holder, vmap, pmap).rule
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::Sequent;
    use crate::testutil as tu;

    #[test]
    fn identity_substitution_is_identity() {
        let defs = tu::table();
        let d = tu::freeness_injectivity(&defs);
        let got = subst_derivation(&defs, &d, &Subst::identity()).unwrap();
        assert_eq!(got, d);
    }

    #[test]
    fn instantiating_the_injectivity_proof() {
        let defs = tu::table();
        // |- forall y, (s x) = (s y) => x = y   with x free, then x := z
        let d = tu::freeness_injectivity(&defs);
        let inner = &d.children[0];
        let theta = Subst::singleton("x", tu::z());
        let got = subst_derivation(&defs, inner, &theta).unwrap();
        tu::must_check(&defs, &got);
        assert_eq!(got.concl, inner.concl.apply_subst(&theta).unwrap());
    }

    #[test]
    fn equality_premise_collapses_when_unifier_disappears() {
        let defs = tu::table();
        // [x = s y] |- true  via eqL with mgu x := s y, then x := z kills it
        let eq_f = tu::eqn(tu::v("x"), tu::s(tu::v("y")));
        let mgu = crate::term::unify(&tu::v("x"), &tu::s(tu::v("y"))).unwrap();
        let child = tu::top_r(&defs, vec![]);
        let d = Derivation::apply(
            &defs,
            Rule::EqL {
                pos: 0,
                left: vec![eq_f],
                right: crate::logic::top(),
                mgu,
            },
            vec![child],
        )
        .unwrap();
        tu::must_check(&defs, &d);
        let got = subst_derivation(&defs, &d, &Subst::singleton("x", tu::z())).unwrap();
        tu::must_check(&defs, &got);
        assert!(got.children.is_empty());
        assert!(d.height() >= got.height());
    }

    #[test]
    fn vacuous_param_subst_is_identity() {
        let defs = tu::table();
        let d = tu::ev_z_direct(&defs);
        let theta = ParamSubst::new();
        let got = param_subst_derivation(&defs, &d, &theta).unwrap();
        assert_eq!(got, d);
    }

    #[test]
    fn param_subst_replaces_right_unfolding_with_cut() {
        let defs = tu::table();
        // Π: |- X^ev z  by indRp, then substitute (Π_S, \x. true) for X^ev
        let inv = Term::lam(tu::nt(), crate::logic::top());
        let xref = ParamRef::new("X", "ev");
        let slot = Term::param(xref.clone(), tu::pred_ty1());
        let body = defs.unfold("ev", &slot, &[tu::z()]).unwrap();
        let refl = tu::eq_r(&defs, vec![], tu::z());
        let orr = Derivation::apply(
            &defs,
            Rule::OrR {
                disj: body,
                side: crate::kernel::Side::Left,
            },
            vec![refl],
        )
        .unwrap();
        let d = Derivation::apply(
            &defs,
            Rule::IndRp {
                principal: Term::app(slot.clone(), tu::z())
                    .canonical(&SimpleType::o())
                    .unwrap(),
            },
            vec![orr],
        )
        .unwrap();
        tu::must_check(&defs, &d);

        let mut theta = ParamSubst::new();
        let inv_prem = {
            let b = defs.unfold("ev", &inv, &[tu::v("y0")]).unwrap();
            tu::top_r(&defs, vec![b])
        };
        theta
            .insert(
                &defs,
                xref,
                inv_prem,
                inv.clone(),
                vec![("y0".into(), tu::nt())],
            )
            .unwrap();
        let got = param_subst_derivation(&defs, &d, &theta).unwrap();
        tu::must_check(&defs, &got);
        assert!(matches!(got.rule, Rule::Multicut { .. }));
        assert_eq!(got.concl, Sequent::entails(crate::logic::top()));
    }

    #[test]
    fn eliminate_subst_deletes_nodes() {
        let defs = tu::table();
        let top = tu::top_r(&defs, vec![]);
        let wrapped = Derivation::apply(&defs, Rule::Subst, vec![top.clone()]).unwrap();
        let wrapped2 = Derivation::apply(&defs, Rule::Subst, vec![wrapped]).unwrap();
        let got = eliminate_subst(&wrapped2);
        assert_eq!(got, top);
        // subst-free input is unchanged
        assert_eq!(eliminate_subst(&top), top);
    }

    #[test]
    fn canonical_renaming_identifies_alpha_variants() {
        let defs = tu::table();
        let with_name = |name: &str| {
            let x = Term::var(name, tu::nt());
            let eq_f = tu::eqn(tu::z(), tu::s(x.clone()));
            let leaf = Derivation::apply(
                &defs,
                Rule::EqL {
                    pos: 0,
                    left: vec![eq_f],
                    right: crate::logic::bot(),
                    mgu: None,
                },
                vec![],
            )
            .unwrap();
            let imp = Derivation::apply(&defs, Rule::ImpR, vec![leaf]).unwrap();
            Derivation::apply(
                &defs,
                Rule::AllR {
                    eigen: (name.to_string(), tu::nt()),
                },
                vec![imp],
            )
            .unwrap()
        };
        let a = with_name("w");
        let b = with_name("v");
        assert_ne!(a, b);
        assert_eq!(rename_internal(&a), rename_internal(&b));
        // canonicalization is a fixpoint
        let c = rename_internal(&a);
        assert_eq!(rename_internal(&c), c);
    }
}
