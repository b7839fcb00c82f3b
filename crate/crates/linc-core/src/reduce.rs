//! The cut-reduction relation, a deterministic single-step reducer, and the
//! iterated normalizer.
//!
//! A redex is a derivation ending in the multicut rule. The applicable case
//! is classified from the last rule of the rightmost premise `Π` and, when
//! that rule acts on a cut formula, the last rule of the corresponding left
//! premise `Πᵢ`. Every reduct is rebuilt through the kernel's validating
//! constructors and preserves the end sequent exactly (vector order
//! included), so rewriting a subtree in place keeps the enclosing tree
//! valid.

use std::collections::BTreeMap;
use std::collections::BTreeSet;

use serde::Serialize;
use thiserror::Error;

use crate::kernel::{Derivation, KernelError, Rule, Sequent, Side};
use crate::logic::{view, DefTable, FormulaView};
use crate::term::{fresh_name, ParamRef, Subst, Term};
use crate::transform::{
    eliminate_subst, param_subst_derivation, rename_all, subst_derivation, ParamSubst,
    TransformError,
};

pub const DEFAULT_FUEL: u64 = 100_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum CaseFamily {
    Essential,
    LeftCommutative,
    RightCommutative,
    Multicut,
    Structural,
    Axiom,
}

impl CaseFamily {
    pub fn name(&self) -> &'static str {
        match self {
            CaseFamily::Essential => "essential",
            CaseFamily::LeftCommutative => "left-commutative",
            CaseFamily::RightCommutative => "right-commutative",
            CaseFamily::Multicut => "multicut",
            CaseFamily::Structural => "structural",
            CaseFamily::Axiom => "axiom",
        }
    }
}

/// One firing of a reduction case.
#[derive(Debug, Clone, Serialize)]
pub struct ReductionStep {
    /// address of the multicut node (child indices from the root)
    pub path: Vec<usize>,
    #[serde(skip)]
    pub family: CaseFamily,
    /// the specific rule pair, e.g. `impR/impL` or `-/wL`
    pub case: String,
    /// index of the cut formula involved, when the case is driven by one
    #[serde(rename = "index")]
    pub cut_index: Option<usize>,
    /// total node count of the derivation after the step
    pub size_after: u64,
}

#[derive(Debug, Clone, Serialize)]
pub struct Trace {
    pub initial: String,
    pub steps: Vec<ReductionStep>,
    pub step_count: u64,
    pub final_size: u64,
}

#[derive(Debug, Error)]
pub enum ReduceError {
    #[error("not a redex: derivation does not end with mc")]
    NotARedex,
    #[error("{0}")]
    Transform(#[from] TransformError),
    #[error("{0}")]
    Kernel(#[from] KernelError),
    #[error("reduction internal error: {0}")]
    Internal(String),
}

#[derive(Debug, Error)]
pub enum NormalizeError {
    #[error("fuel exhausted after {} steps", .trace.step_count)]
    FuelExhausted { partial: Derivation, trace: Trace },
    #[error("{0}")]
    Reduce(#[from] ReduceError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Strategy {
    /// reduce the lowest cuts first: deepest multicut, leftmost among equals
    #[default]
    LowestFirst,
    /// reduce at the root first; no termination guarantee is claimed
    RootFirst,
}

pub fn is_cut_free(d: &Derivation) -> bool {
    !matches!(d.rule, Rule::Multicut { .. }) && d.children.iter().all(is_cut_free)
}

pub fn is_subst_free(d: &Derivation) -> bool {
    !matches!(d.rule, Rule::Subst) && d.children.iter().all(is_subst_free)
}

fn internal(msg: impl Into<String>) -> ReduceError {
    ReduceError::Internal(msg.into())
}

// ---------------------------------------------------------------------------
// redex decomposition helpers

struct Redex<'a> {
    cuts: &'a [usize],
    premises: &'a [Derivation],
    pi: &'a Derivation,
    concl: &'a Sequent,
}

impl<'a> Redex<'a> {
    fn of(d: &'a Derivation) -> Option<Redex<'a>> {
        match &d.rule {
            Rule::Multicut { cuts } => {
                let n = cuts.len();
                Some(Redex {
                    cuts,
                    premises: &d.children[..n],
                    pi: &d.children[n],
                    concl: &d.concl,
                })
            }
            _ => None,
        }
    }

    fn cut_index_of(&self, pos: usize) -> Option<usize> {
        self.cuts.iter().position(|&c| c == pos)
    }

    /// Offset of each position of `pi.left` within the spliced conclusion.
    fn offsets(&self) -> Vec<usize> {
        let mut out = Vec::with_capacity(self.pi.concl.left.len());
        let mut acc = 0usize;
        for q in 0..self.pi.concl.left.len() {
            out.push(acc);
            acc += match self.cut_index_of(q) {
                Some(i) => self.premises[i].concl.left.len(),
                None => 1,
            };
        }
        out
    }

    fn delta(&self, i: usize) -> &[Term] {
        &self.premises[i].concl.left
    }

    /// Cut positions after deleting position `removed` from `pi.left`
    /// (which must not itself be a cut), premises unchanged.
    fn cuts_after_removal(&self, removed: usize) -> Vec<usize> {
        self.cuts
            .iter()
            .map(|&q| if q > removed { q - 1 } else { q })
            .collect()
    }

    /// Cut positions after inserting one formula at `inserted` in `pi.left`.
    fn cuts_after_insertion(&self, inserted: usize) -> Vec<usize> {
        self.cuts
            .iter()
            .map(|&q| if q >= inserted { q + 1 } else { q })
            .collect()
    }

    /// Premises and adjusted positions with cut `i` dropped.
    fn without_cut(&self, i: usize) -> (Vec<Derivation>, Vec<usize>) {
        let removed = self.cuts[i];
        let premises = self
            .premises
            .iter()
            .enumerate()
            .filter(|(j, _)| *j != i)
            .map(|(_, p)| p.clone())
            .collect();
        let cuts = self
            .cuts
            .iter()
            .enumerate()
            .filter(|(j, _)| *j != i)
            .map(|(_, &q)| if q > removed { q - 1 } else { q })
            .collect();
        (premises, cuts)
    }

    fn premises_with(&self, i: usize, repl: Derivation) -> Vec<Derivation> {
        let mut out = self.premises.to_vec();
        out[i] = repl;
        out
    }
}

/// `mc` constructor that collapses the transient zero-cut form to its
/// rightmost premise.
fn mk_mc(
    defs: &DefTable,
    premises: Vec<Derivation>,
    cuts: Vec<usize>,
    pi: Derivation,
) -> Result<Derivation, ReduceError> {
    if cuts.is_empty() {
        if !premises.is_empty() {
            return Err(internal("zero cuts with leftover premises"));
        }
        return Ok(pi);
    }
    let mut children = premises;
    children.push(pi);
    Ok(Derivation::apply(defs, Rule::Multicut { cuts }, children)?)
}

/// Weakening chain inserting `block` at `at`, front formula outermost.
fn weaken_block(
    defs: &DefTable,
    mut d: Derivation,
    at: usize,
    block: &[Term],
) -> Result<Derivation, ReduceError> {
    for f in block.iter().rev() {
        d = Derivation::apply(
            defs,
            Rule::WeakenL {
                pos: at,
                formula: f.clone(),
            },
            vec![d],
        )?;
    }
    Ok(d)
}

/// Contraction chain dropping the duplicate block starting at `dup_start`,
/// keeping the block starting at `keep_start` (both of length `len`).
fn contract_block(
    defs: &DefTable,
    mut d: Derivation,
    keep_start: usize,
    dup_start: usize,
    len: usize,
) -> Result<Derivation, ReduceError> {
    for j in 0..len {
        let (keep, dup) = if keep_start < dup_start {
            (keep_start + j, dup_start)
        } else {
            // dropping at dup_start shifts the keep block down one per step
            (keep_start, dup_start)
        };
        d = Derivation::apply(defs, Rule::ContractL { keep, dup }, vec![d])?;
    }
    Ok(d)
}

fn used_names(d: &Derivation) -> BTreeSet<String> {
    d.all_names()
}

/// Renames the eigenvariable bound by a commuting `forallR`/`existsL` node
/// when it collides with names visible at the new, lower position.
fn freshen_var_in(
    child: &Derivation,
    name: &str,
    avoid: &BTreeSet<String>,
) -> (Derivation, String) {
    if !avoid.contains(name) {
        return (child.clone(), name.to_string());
    }
    let mut used = used_names(child);
    used.extend(avoid.iter().cloned());
    let fresh = fresh_name(&format!("{name}'"), &used);
    let mut vmap = BTreeMap::new();
    vmap.insert(name.to_string(), fresh.clone());
    (rename_all(child, &vmap, &BTreeMap::new()), fresh)
}

fn freshen_param_in(
    child: &Derivation,
    name: &str,
    avoid: &BTreeSet<String>,
) -> (Derivation, String) {
    if !avoid.contains(name) {
        return (child.clone(), name.to_string());
    }
    let mut used = used_names(child);
    used.extend(avoid.iter().cloned());
    let fresh = fresh_name(&format!("{name}'"), &used);
    let mut pmap = BTreeMap::new();
    pmap.insert(name.to_string(), fresh.clone());
    (rename_all(child, &BTreeMap::new(), &pmap), fresh)
}

fn names_in_sequent(s: &Sequent) -> BTreeSet<String> {
    let mut out: BTreeSet<String> = s.free_vars().into_keys().collect();
    out.extend(s.params().into_iter().map(|p| p.name));
    out
}

// ---------------------------------------------------------------------------
// the reduction relation

/// All reducts of a derivation ending with `mc`, paired with the case that
/// produced them. The list is non-empty for every valid redex; it has more
/// than one element only in the `mc/∘L` case, which inherits the choice
/// among the inner redex's reducts.
pub fn reducts(
    defs: &DefTable,
    d: &Derivation,
) -> Result<Vec<(ReductionStep, Derivation)>, ReduceError> {
    let rx = Redex::of(d).ok_or(ReduceError::NotARedex)?;
    let pi = rx.pi;

    let mk_step = |family: CaseFamily, case: String, cut_index: Option<usize>| ReductionStep {
        path: Vec::new(),
        family,
        case,
        cut_index,
        size_after: 0,
    };

    // rightmost premise classification
    match &pi.rule {
        Rule::Init { .. } => {
            // -/init: n = 1, Γ empty, C = B₁
            if rx.cuts.len() != 1 || pi.concl.left.len() != 1 {
                return Err(internal("init rightmost premise with more than one formula"));
            }
            let red = rx.premises[0].clone();
            return Ok(vec![(
                mk_step(CaseFamily::Axiom, "-/init".into(), None),
                red,
            )]);
        }
        Rule::Multicut { .. } => {
            let red = reduce_mc_right(defs, &rx)?;
            return Ok(vec![(
                mk_step(CaseFamily::Multicut, "-/mc".into(), None),
                red,
            )]);
        }
        Rule::Subst => {
            let inner = mk_mc(
                defs,
                rx.premises.to_vec(),
                rx.cuts.to_vec(),
                pi.children[0].clone(),
            )?;
            let red = Derivation::apply(defs, Rule::Subst, vec![inner])?;
            return Ok(vec![(
                mk_step(CaseFamily::RightCommutative, "-/subst".into(), None),
                red,
            )]);
        }
        _ => {}
    }

    if pi.rule.is_left_rule() {
        let pc = pi
            .rule
            .principal_pos()
            .ok_or_else(|| internal("left rule without principal position"))?;
        if let Some(i) = rx.cut_index_of(pc) {
            // structural cases: contraction / weakening on a cut formula
            match &pi.rule {
                Rule::ContractL { keep, dup } => {
                    let red = reduce_contraction_on_cut(defs, &rx, i, *keep, *dup)?;
                    return Ok(vec![(
                        mk_step(CaseFamily::Structural, "-/cL".into(), Some(i)),
                        red,
                    )]);
                }
                Rule::WeakenL { .. } => {
                    let red = reduce_weakening_on_cut(defs, &rx, i)?;
                    return Ok(vec![(
                        mk_step(CaseFamily::Structural, "-/wL".into(), Some(i)),
                        red,
                    )]);
                }
                _ => {}
            }
            // the left premise's last rule drives the case
            let pr = &rx.premises[i];
            if pr.rule.is_right_rule() {
                let (case, red) = reduce_essential(defs, &rx, i)?;
                return Ok(vec![(mk_step(CaseFamily::Essential, case, Some(i)), red)]);
            }
            match &pr.rule {
                Rule::Init { .. } => {
                    let red = reduce_axiom_left(defs, &rx, i)?;
                    let case = format!("init/{}", pi.rule.name());
                    return Ok(vec![(mk_step(CaseFamily::Axiom, case, Some(i)), red)]);
                }
                Rule::Multicut { .. } => {
                    let inner = reducts(defs, pr)?;
                    let case = format!("mc/{}", pi.rule.name());
                    return inner
                        .into_iter()
                        .map(|(_, pr_red)| {
                            let red = mk_mc(
                                defs,
                                rx.premises_with(i, pr_red),
                                rx.cuts.to_vec(),
                                pi.clone(),
                            )?;
                            Ok((
                                mk_step(CaseFamily::Multicut, case.clone(), Some(i)),
                                red,
                            ))
                        })
                        .collect();
                }
                _ => {
                    let (case, red) = reduce_left_commutative(defs, &rx, i)?;
                    return Ok(vec![(
                        mk_step(CaseFamily::LeftCommutative, case, Some(i)),
                        red,
                    )]);
                }
            }
        }
        // left rule on a non-cut formula: right-commutative
        let (case, red) = reduce_right_commutative_left_rule(defs, &rx)?;
        return Ok(vec![(
            mk_step(CaseFamily::RightCommutative, case, None),
            red,
        )]);
    }

    if pi.rule.is_right_rule() {
        let (case, red) = reduce_right_commutative_right_rule(defs, &rx)?;
        return Ok(vec![(
            mk_step(CaseFamily::RightCommutative, case, None),
            red,
        )]);
    }

    Err(internal(format!(
        "unclassified rightmost premise rule {}",
        pi.rule.name()
    )))
}

// -- essential cases --------------------------------------------------------

fn reduce_essential(
    defs: &DefTable,
    rx: &Redex,
    i: usize,
) -> Result<(String, Derivation), ReduceError> {
    let pi = rx.pi;
    let pr = &rx.premises[i];
    match (&pr.rule, &pi.rule) {
        (Rule::AndR, Rule::AndL { side, .. }) => {
            let chosen = match side {
                Side::Left => pr.children[0].clone(),
                Side::Right => pr.children[1].clone(),
            };
            let red = mk_mc(
                defs,
                rx.premises_with(i, chosen),
                rx.cuts.to_vec(),
                pi.children[0].clone(),
            )?;
            Ok(("andR/andL".into(), red))
        }
        (Rule::OrR { side, .. }, Rule::OrL { .. }) => {
            let branch = match side {
                Side::Left => pi.children[0].clone(),
                Side::Right => pi.children[1].clone(),
            };
            let red = mk_mc(
                defs,
                rx.premises_with(i, pr.children[0].clone()),
                rx.cuts.to_vec(),
                branch,
            )?;
            Ok(("orR/orL".into(), red))
        }
        (Rule::ImpR, Rule::ImpL { .. }) => {
            // Ξ₁ = mc(mc(other premises, Π'), Πᵢ'), then cut Ξ₁ and the
            // other premises against Π'', closing with contractions
            let (others, other_cuts) = rx.without_cut(i);
            let inner = mk_mc(defs, others, other_cuts, pi.children[0].clone())?;
            let inner_left_len = inner.concl.left.len();
            let xi1 = mk_mc(defs, vec![inner], vec![0], pr.children[0].clone())?;
            let offsets = rx.offsets();
            let final_mc = mk_mc(
                defs,
                rx.premises_with(i, xi1),
                rx.cuts.to_vec(),
                pi.children[1].clone(),
            )?;
            // final left: A ++ (A ++ B ++ Δᵢ) ++ B where A/B surround Δᵢ
            let a_len = offsets[rx.cuts[i]];
            let delta_len = rx.delta(i).len();
            let b_len = rx.concl.left.len() - a_len - delta_len;
            debug_assert_eq!(inner_left_len, a_len + b_len);
            // drop the inner copy of A, keeping the prefix
            let mut d = final_mc;
            for j in 0..a_len {
                d = Derivation::apply(
                    defs,
                    Rule::ContractL {
                        keep: j,
                        dup: a_len,
                    },
                    vec![d],
                )?;
            }
            // drop the inner copy of B, keeping the suffix copy
            for j in 0..b_len {
                let keep = a_len + (b_len - j) + delta_len + j;
                d = Derivation::apply(
                    defs,
                    Rule::ContractL {
                        keep,
                        dup: a_len,
                    },
                    vec![d],
                )?;
            }
            Ok(("impR/impL".into(), d))
        }
        (Rule::AllR { eigen }, Rule::AllL { witness, .. }) => {
            let theta = Subst::singleton(eigen.0.clone(), witness.clone());
            let inst = subst_derivation(defs, &pr.children[0], &theta)?;
            let red = mk_mc(
                defs,
                rx.premises_with(i, inst),
                rx.cuts.to_vec(),
                pi.children[0].clone(),
            )?;
            Ok(("forallR/forallL".into(), red))
        }
        (Rule::ExR { witness, .. }, Rule::ExL { eigen, .. }) => {
            let theta = Subst::singleton(eigen.0.clone(), witness.clone());
            let inst = subst_derivation(defs, &pi.children[0], &theta)?;
            let red = mk_mc(
                defs,
                rx.premises_with(i, pr.children[0].clone()),
                rx.cuts.to_vec(),
                inst,
            )?;
            Ok(("existsR/existsL".into(), red))
        }
        (
            Rule::IndR { param, principal },
            Rule::IndL {
                inv, inv_vars, ..
            },
        ) => {
            let args = atom_args(principal)?;
            let pref = ParamRef::new(param.clone(), pred_of(principal)?);
            let mut theta = ParamSubst::new();
            theta.insert(
                defs,
                pref,
                pi.children[0].clone(),
                inv.clone(),
                inv_vars.clone(),
            )?;
            let unfolded = param_subst_derivation(defs, &pr.children[0], &theta)?;
            let inst = Subst::from_pairs(
                inv_vars
                    .iter()
                    .map(|(n, _)| n.clone())
                    .zip(args.iter().cloned()),
            );
            let inv_inst = subst_derivation(defs, &pi.children[0], &inst)?;
            let inner = mk_mc(defs, vec![unfolded], vec![0], inv_inst)?;
            let red = mk_mc(
                defs,
                rx.premises_with(i, inner),
                rx.cuts.to_vec(),
                pi.children[1].clone(),
            )?;
            Ok(("indR/indL".into(), red))
        }
        (
            Rule::CoindR {
                inv, inv_vars, ..
            },
            Rule::CoindL {
                param, principal, ..
            },
        ) => {
            let args = atom_args(principal)?;
            let pref = ParamRef::new(param.clone(), pred_of(principal)?);
            let mut theta = ParamSubst::new();
            theta.insert(
                defs,
                pref,
                pr.children[1].clone(),
                inv.clone(),
                inv_vars.clone(),
            )?;
            let inst = Subst::from_pairs(
                inv_vars
                    .iter()
                    .map(|(n, _)| n.clone())
                    .zip(args.iter().cloned()),
            );
            let inv_inst = subst_derivation(defs, &pr.children[1], &inst)?;
            let inner = mk_mc(defs, vec![pr.children[0].clone()], vec![0], inv_inst)?;
            let cont = param_subst_derivation(defs, &pi.children[0], &theta)?;
            let red = mk_mc(defs, rx.premises_with(i, inner), rx.cuts.to_vec(), cont)?;
            Ok(("coindR/coindL".into(), red))
        }
        (Rule::EqR { .. }, Rule::EqL { mgu, .. }) => {
            // the equation is reflexive, so the MGU is the identity and the
            // premise family is represented by its identity instance
            if !matches!(mgu, Some(s) if s.is_empty()) {
                return Err(internal("eqR against eqL whose unifier is not the identity"));
            }
            let wrapped = Derivation::apply(defs, Rule::Subst, vec![pi.children[0].clone()])?;
            let (others, other_cuts) = rx.without_cut(i);
            let xi1 = mk_mc(defs, others, other_cuts, wrapped)?;
            let at = rx.offsets()[rx.cuts[i]];
            let red = weaken_block(defs, xi1, at, rx.delta(i))?;
            Ok(("eqR/eqL".into(), red))
        }
        (l, r) => Err(internal(format!(
            "no essential case for {}/{}",
            l.name(),
            r.name()
        ))),
    }
}

// -- axiom and structural cases ---------------------------------------------

fn reduce_axiom_left(defs: &DefTable, rx: &Redex, i: usize) -> Result<Derivation, ReduceError> {
    // Πᵢ = init, so Δᵢ = [Bᵢ]; the cut disappears and Bᵢ stays in place
    let (others, cuts) = {
        let premises = rx
            .premises
            .iter()
            .enumerate()
            .filter(|(j, _)| *j != i)
            .map(|(_, p)| p.clone())
            .collect::<Vec<_>>();
        let cuts = rx
            .cuts
            .iter()
            .enumerate()
            .filter(|(j, _)| *j != i)
            .map(|(_, &q)| q)
            .collect::<Vec<_>>();
        (premises, cuts)
    };
    mk_mc(defs, others, cuts, rx.pi.clone())
}

fn reduce_contraction_on_cut(
    defs: &DefTable,
    rx: &Redex,
    i: usize,
    keep: usize,
    dup: usize,
) -> Result<Derivation, ReduceError> {
    let pi = rx.pi;
    let inner = &pi.children[0];
    // duplicate the cut premise: both premise copies of Bᵢ become cuts
    let mut pairs: Vec<(usize, Derivation)> = Vec::new();
    for (j, &q) in rx.cuts.iter().enumerate() {
        if j == i {
            continue;
        }
        // conclusion position -> premise position of Π's contraction
        let q_prem = if q < dup { q } else { q + 1 };
        pairs.push((q_prem, rx.premises[j].clone()));
    }
    pairs.push((keep, rx.premises[i].clone()));
    pairs.push((dup, rx.premises[i].clone()));
    pairs.sort_by_key(|(q, _)| *q);
    let cuts: Vec<usize> = pairs.iter().map(|(q, _)| *q).collect();
    let premises: Vec<Derivation> = pairs.into_iter().map(|(_, p)| p).collect();
    let xi1 = mk_mc(defs, premises, cuts.clone(), inner.clone())?;

    // contract the duplicated Δᵢ block, keeping the copy at `keep`
    let xi_rx = Redex::of(&xi1).ok_or_else(|| internal("expected mc"))?;
    let offsets = xi_rx.offsets();
    let keep_start = offsets[keep];
    let dup_start = offsets[dup];
    let len = rx.delta(i).len();
    drop(xi_rx);
    contract_block(defs, xi1, keep_start, dup_start, len)
}

fn reduce_weakening_on_cut(
    defs: &DefTable,
    rx: &Redex,
    i: usize,
) -> Result<Derivation, ReduceError> {
    let pi = rx.pi;
    let inner = &pi.children[0];
    let (others, cuts) = rx.without_cut(i);
    let xi1 = mk_mc(defs, others, cuts, inner.clone())?;
    let at = rx.offsets()[rx.cuts[i]];
    weaken_block(defs, xi1, at, rx.delta(i))
}

// -- left-commutative cases ---------------------------------------------------

fn reduce_left_commutative(
    defs: &DefTable,
    rx: &Redex,
    i: usize,
) -> Result<(String, Derivation), ReduceError> {
    let pr = &rx.premises[i];
    let pi = rx.pi;
    let case = format!("{}/{}", pr.rule.name(), pi.rule.name());
    let off = rx.offsets()[rx.cuts[i]];
    let avoid = names_in_sequent(rx.concl);

    let commute1 = |defs: &DefTable, child: Derivation, rebuild: &dyn Fn(Derivation) -> Result<Derivation, KernelError>|
        -> Result<Derivation, ReduceError> {
        let xi = mk_mc(defs, rx.premises_with(i, child), rx.cuts.to_vec(), pi.clone())?;
        Ok(rebuild(xi)?)
    };

    let red = match &pr.rule {
        Rule::BotL { pos, .. } => Derivation::apply(
            defs,
            Rule::BotL {
                pos: off + pos,
                left: rx.concl.left.clone(),
                right: rx.concl.right.clone(),
            },
            vec![],
        )?,
        Rule::AndL { pos, conj, side } => {
            let (pos, conj, side) = (off + pos, conj.clone(), *side);
            commute1(defs, pr.children[0].clone(), &move |xi| {
                Derivation::apply(
                    defs,
                    Rule::AndL {
                        pos,
                        conj: conj.clone(),
                        side,
                    },
                    vec![xi],
                )
            })?
        }
        Rule::OrL { pos } => {
            let a = mk_mc(
                defs,
                rx.premises_with(i, pr.children[0].clone()),
                rx.cuts.to_vec(),
                pi.clone(),
            )?;
            let b = mk_mc(
                defs,
                rx.premises_with(i, pr.children[1].clone()),
                rx.cuts.to_vec(),
                pi.clone(),
            )?;
            Derivation::apply(defs, Rule::OrL { pos: off + pos }, vec![a, b])?
        }
        Rule::AllL { pos, quantified, witness } => {
            let (pos, q, w) = (off + pos, quantified.clone(), witness.clone());
            commute1(defs, pr.children[0].clone(), &move |xi| {
                Derivation::apply(
                    defs,
                    Rule::AllL {
                        pos,
                        quantified: q.clone(),
                        witness: w.clone(),
                    },
                    vec![xi],
                )
            })?
        }
        Rule::ExL { pos, eigen } => {
            let (child, name) = freshen_var_in(&pr.children[0], &eigen.0, &avoid);
            let (pos, eigen) = (off + pos, (name, eigen.1.clone()));
            commute1(defs, child, &move |xi| {
                Derivation::apply(defs, Rule::ExL { pos, eigen: eigen.clone() }, vec![xi])
            })?
        }
        Rule::CoindL { pos, principal, param } => {
            let (child, param) = freshen_param_in(&pr.children[0], param, &avoid);
            let (pos, principal) = (off + pos, principal.clone());
            commute1(defs, child, &move |xi| {
                Derivation::apply(
                    defs,
                    Rule::CoindL {
                        pos,
                        principal: principal.clone(),
                        param: param.clone(),
                    },
                    vec![xi],
                )
            })?
        }
        Rule::CoindLp { pos, principal } => {
            let (pos, principal) = (off + pos, principal.clone());
            commute1(defs, pr.children[0].clone(), &move |xi| {
                Derivation::apply(
                    defs,
                    Rule::CoindLp {
                        pos,
                        principal: principal.clone(),
                    },
                    vec![xi],
                )
            })?
        }
        Rule::ContractL { keep, dup } => {
            let (keep, dup) = (off + keep, off + dup);
            commute1(defs, pr.children[0].clone(), &move |xi| {
                Derivation::apply(defs, Rule::ContractL { keep, dup }, vec![xi])
            })?
        }
        Rule::WeakenL { pos, formula } => {
            let (pos, formula) = (off + pos, formula.clone());
            commute1(defs, pr.children[0].clone(), &move |xi| {
                Derivation::apply(
                    defs,
                    Rule::WeakenL {
                        pos,
                        formula: formula.clone(),
                    },
                    vec![xi],
                )
            })?
        }
        Rule::ImpL { pos } => {
            // the implication's left premise is weakened up to the full
            // context; the right premise absorbs the cuts
            let xi1 = mk_mc(
                defs,
                rx.premises_with(i, pr.children[1].clone()),
                rx.cuts.to_vec(),
                pi.clone(),
            )?;
            let delta_prime_len = rx.delta(i).len() - 1;
            let before = &rx.concl.left[..off];
            let after = &rx.concl.left[off + delta_prime_len + 1..];
            let mut left_prem = weaken_block(defs, pr.children[0].clone(), delta_prime_len, after)?;
            left_prem = weaken_block(defs, left_prem, 0, before)?;
            Derivation::apply(defs, Rule::ImpL { pos: off + pos }, vec![left_prem, xi1])?
        }
        Rule::IndL { pos, principal, inv, inv_vars } => {
            let xi1 = mk_mc(
                defs,
                rx.premises_with(i, pr.children[1].clone()),
                rx.cuts.to_vec(),
                pi.clone(),
            )?;
            Derivation::apply(
                defs,
                Rule::IndL {
                    pos: off + pos,
                    principal: principal.clone(),
                    inv: inv.clone(),
                    inv_vars: inv_vars.clone(),
                },
                vec![pr.children[0].clone(), xi1],
            )?
        }
        Rule::EqL { pos, mgu, .. } => match mgu {
            None => Derivation::apply(
                defs,
                Rule::EqL {
                    pos: off + pos,
                    left: rx.concl.left.clone(),
                    right: rx.concl.right.clone(),
                    mgu: None,
                },
                vec![],
            )?,
            Some(sigma) => {
                let mut premises = Vec::with_capacity(rx.premises.len());
                for (j, p) in rx.premises.iter().enumerate() {
                    premises.push(if j == i {
                        pr.children[0].clone()
                    } else {
                        subst_derivation(defs, p, sigma)?
                    });
                }
                let pi_inst = subst_derivation(defs, pi, sigma)?;
                let xi = mk_mc(defs, premises, rx.cuts.to_vec(), pi_inst)?;
                Derivation::apply(
                    defs,
                    Rule::EqL {
                        pos: off + pos,
                        left: rx.concl.left.clone(),
                        right: rx.concl.right.clone(),
                        mgu: Some(sigma.clone()),
                    },
                    vec![xi],
                )?
            }
        },
        Rule::Subst => {
            let xi = mk_mc(
                defs,
                rx.premises_with(i, pr.children[0].clone()),
                rx.cuts.to_vec(),
                pi.clone(),
            )?;
            Derivation::apply(defs, Rule::Subst, vec![xi])?
        }
        other => {
            return Err(internal(format!(
                "no left-commutative case for {}",
                other.name()
            )))
        }
    };
    Ok((case, red))
}

// -- right-commutative cases --------------------------------------------------

fn reduce_right_commutative_left_rule(
    defs: &DefTable,
    rx: &Redex,
) -> Result<(String, Derivation), ReduceError> {
    let pi = rx.pi;
    let case = format!("-/{}", pi.rule.name());
    let offsets = rx.offsets();
    let avoid = names_in_sequent(rx.concl);

    let red = match &pi.rule {
        Rule::BotL { pos, .. } => Derivation::apply(
            defs,
            Rule::BotL {
                pos: offsets[*pos],
                left: rx.concl.left.clone(),
                right: rx.concl.right.clone(),
            },
            vec![],
        )?,
        Rule::AndL { pos, conj, side } => {
            let xi = mk_mc(
                defs,
                rx.premises.to_vec(),
                rx.cuts.to_vec(),
                pi.children[0].clone(),
            )?;
            Derivation::apply(
                defs,
                Rule::AndL {
                    pos: offsets[*pos],
                    conj: conj.clone(),
                    side: *side,
                },
                vec![xi],
            )?
        }
        Rule::OrL { pos } => {
            let a = mk_mc(
                defs,
                rx.premises.to_vec(),
                rx.cuts.to_vec(),
                pi.children[0].clone(),
            )?;
            let b = mk_mc(
                defs,
                rx.premises.to_vec(),
                rx.cuts.to_vec(),
                pi.children[1].clone(),
            )?;
            Derivation::apply(defs, Rule::OrL { pos: offsets[*pos] }, vec![a, b])?
        }
        Rule::AllL { pos, quantified, witness } => {
            let xi = mk_mc(
                defs,
                rx.premises.to_vec(),
                rx.cuts.to_vec(),
                pi.children[0].clone(),
            )?;
            Derivation::apply(
                defs,
                Rule::AllL {
                    pos: offsets[*pos],
                    quantified: quantified.clone(),
                    witness: witness.clone(),
                },
                vec![xi],
            )?
        }
        Rule::ExL { pos, eigen } => {
            let (child, name) = freshen_var_in(&pi.children[0], &eigen.0, &avoid);
            let xi = mk_mc(defs, rx.premises.to_vec(), rx.cuts.to_vec(), child)?;
            Derivation::apply(
                defs,
                Rule::ExL {
                    pos: offsets[*pos],
                    eigen: (name, eigen.1.clone()),
                },
                vec![xi],
            )?
        }
        Rule::CoindL { pos, principal, param } => {
            let (child, param) = freshen_param_in(&pi.children[0], param, &avoid);
            let xi = mk_mc(defs, rx.premises.to_vec(), rx.cuts.to_vec(), child)?;
            Derivation::apply(
                defs,
                Rule::CoindL {
                    pos: offsets[*pos],
                    principal: principal.clone(),
                    param,
                },
                vec![xi],
            )?
        }
        Rule::CoindLp { pos, principal } => {
            let xi = mk_mc(
                defs,
                rx.premises.to_vec(),
                rx.cuts.to_vec(),
                pi.children[0].clone(),
            )?;
            Derivation::apply(
                defs,
                Rule::CoindLp {
                    pos: offsets[*pos],
                    principal: principal.clone(),
                },
                vec![xi],
            )?
        }
        Rule::ContractL { keep, dup } => {
            // the premise inserts a duplicate at `dup`; shift cuts past it
            let cuts = rx.cuts_after_insertion(*dup);
            let xi = mk_mc(defs, rx.premises.to_vec(), cuts, pi.children[0].clone())?;
            let xi_rx = Redex::of(&xi).ok_or_else(|| internal("expected mc"))?;
            let o = xi_rx.offsets();
            let (keep, dup) = (o[*keep], o[*dup]);
            drop(xi_rx);
            Derivation::apply(defs, Rule::ContractL { keep, dup }, vec![xi])?
        }
        Rule::WeakenL { pos, formula } => {
            let cuts = rx.cuts_after_removal(*pos);
            let xi = mk_mc(defs, rx.premises.to_vec(), cuts, pi.children[0].clone())?;
            Derivation::apply(
                defs,
                Rule::WeakenL {
                    pos: offsets[*pos],
                    formula: formula.clone(),
                },
                vec![xi],
            )?
        }
        Rule::ImpL { pos } => {
            let cuts_left = rx.cuts_after_removal(*pos);
            let xi1 = mk_mc(
                defs,
                rx.premises.to_vec(),
                cuts_left,
                pi.children[0].clone(),
            )?;
            let xi2 = mk_mc(
                defs,
                rx.premises.to_vec(),
                rx.cuts.to_vec(),
                pi.children[1].clone(),
            )?;
            Derivation::apply(defs, Rule::ImpL { pos: offsets[*pos] }, vec![xi1, xi2])?
        }
        Rule::IndL { pos, principal, inv, inv_vars } => {
            let xi1 = mk_mc(
                defs,
                rx.premises.to_vec(),
                rx.cuts.to_vec(),
                pi.children[1].clone(),
            )?;
            Derivation::apply(
                defs,
                Rule::IndL {
                    pos: offsets[*pos],
                    principal: principal.clone(),
                    inv: inv.clone(),
                    inv_vars: inv_vars.clone(),
                },
                vec![pi.children[0].clone(), xi1],
            )?
        }
        Rule::EqL { pos, mgu, .. } => match mgu {
            None => Derivation::apply(
                defs,
                Rule::EqL {
                    pos: offsets[*pos],
                    left: rx.concl.left.clone(),
                    right: rx.concl.right.clone(),
                    mgu: None,
                },
                vec![],
            )?,
            Some(sigma) => {
                let premises = rx
                    .premises
                    .iter()
                    .map(|p| subst_derivation(defs, p, sigma))
                    .collect::<Result<Vec<_>, _>>()?;
                let cuts = rx.cuts_after_removal(*pos);
                let xi = mk_mc(defs, premises, cuts, pi.children[0].clone())?;
                Derivation::apply(
                    defs,
                    Rule::EqL {
                        pos: offsets[*pos],
                        left: rx.concl.left.clone(),
                        right: rx.concl.right.clone(),
                        mgu: Some(sigma.clone()),
                    },
                    vec![xi],
                )?
            }
        },
        other => {
            return Err(internal(format!(
                "no right-commutative case for left rule {}",
                other.name()
            )))
        }
    };
    Ok((case, red))
}

fn reduce_right_commutative_right_rule(
    defs: &DefTable,
    rx: &Redex,
) -> Result<(String, Derivation), ReduceError> {
    let pi = rx.pi;
    let case = format!("-/{}", pi.rule.name());
    let avoid = names_in_sequent(rx.concl);

    let commute1 = |child: Derivation| -> Result<Derivation, ReduceError> {
        mk_mc(defs, rx.premises.to_vec(), rx.cuts.to_vec(), child)
    };

    let red = match &pi.rule {
        Rule::TopR { .. } => Derivation::apply(
            defs,
            Rule::TopR {
                left: rx.concl.left.clone(),
            },
            vec![],
        )?,
        Rule::EqR { formula, .. } => Derivation::apply(
            defs,
            Rule::EqR {
                left: rx.concl.left.clone(),
                formula: formula.clone(),
            },
            vec![],
        )?,
        Rule::AndR => {
            let a = commute1(pi.children[0].clone())?;
            let b = commute1(pi.children[1].clone())?;
            Derivation::apply(defs, Rule::AndR, vec![a, b])?
        }
        Rule::OrR { disj, side } => {
            let xi = commute1(pi.children[0].clone())?;
            Derivation::apply(
                defs,
                Rule::OrR {
                    disj: disj.clone(),
                    side: *side,
                },
                vec![xi],
            )?
        }
        Rule::ImpR => {
            // the antecedent joins the context at position 0 in the premise
            let cuts = rx.cuts.iter().map(|&q| q + 1).collect();
            let xi = mk_mc(defs, rx.premises.to_vec(), cuts, pi.children[0].clone())?;
            Derivation::apply(defs, Rule::ImpR, vec![xi])?
        }
        Rule::AllR { eigen } => {
            let (child, name) = freshen_var_in(&pi.children[0], &eigen.0, &avoid);
            let xi = commute1(child)?;
            Derivation::apply(
                defs,
                Rule::AllR {
                    eigen: (name, eigen.1.clone()),
                },
                vec![xi],
            )?
        }
        Rule::ExR { quantified, witness } => {
            let xi = commute1(pi.children[0].clone())?;
            Derivation::apply(
                defs,
                Rule::ExR {
                    quantified: quantified.clone(),
                    witness: witness.clone(),
                },
                vec![xi],
            )?
        }
        Rule::IndR { principal, param } => {
            let (child, param) = freshen_param_in(&pi.children[0], param, &avoid);
            let xi = commute1(child)?;
            Derivation::apply(
                defs,
                Rule::IndR {
                    principal: principal.clone(),
                    param,
                },
                vec![xi],
            )?
        }
        Rule::IndRp { principal } => {
            let xi = commute1(pi.children[0].clone())?;
            Derivation::apply(
                defs,
                Rule::IndRp {
                    principal: principal.clone(),
                },
                vec![xi],
            )?
        }
        Rule::CoindR { principal, inv, inv_vars } => {
            let xi = commute1(pi.children[0].clone())?;
            Derivation::apply(
                defs,
                Rule::CoindR {
                    principal: principal.clone(),
                    inv: inv.clone(),
                    inv_vars: inv_vars.clone(),
                },
                vec![xi, pi.children[1].clone()],
            )?
        }
        other => {
            return Err(internal(format!(
                "no right-commutative case for right rule {}",
                other.name()
            )))
        }
    };
    Ok((case, red))
}

// -- multicut case -------------------------------------------------------------

fn reduce_mc_right(defs: &DefTable, rx: &Redex) -> Result<Derivation, ReduceError> {
    let pi = rx.pi;
    let inner_rx = Redex::of(pi).ok_or_else(|| internal("expected mc"))?;
    let inner_offsets = inner_rx.offsets();
    let m = inner_rx.cuts.len();

    // map each outer cut position back through Π's splice: either inside the
    // block of inner premise j, or onto a kept formula of Π'
    enum Target {
        Inner(usize, usize), // (inner premise j, position within its context)
        Kept(usize),         // position in Π'.left
    }
    let locate = |p: usize| -> Result<Target, ReduceError> {
        for j in 0..m {
            let start = inner_offsets[inner_rx.cuts[j]];
            let len = inner_rx.premises[j].concl.left.len();
            if p >= start && p < start + len {
                return Ok(Target::Inner(j, p - start));
            }
        }
        // invert the splice for kept positions
        let mut acc = 0usize;
        for (q, _) in pi.concl.left.iter().enumerate() {
            let width = match inner_rx.cut_index_of(q) {
                Some(jj) => inner_rx.premises[jj].concl.left.len(),
                None => 1,
            };
            if inner_rx.cut_index_of(q).is_none() && acc == p {
                return Ok(Target::Kept(q));
            }
            acc += width;
            if acc > p {
                break;
            }
        }
        Err(internal("outer cut position does not map into the inner mc"))
    };

    let mut per_inner: Vec<Vec<(usize, Derivation)>> = vec![Vec::new(); m];
    let mut kept: Vec<(usize, Derivation)> = Vec::new();
    for (idx, &p) in rx.cuts.iter().enumerate() {
        match locate(p)? {
            Target::Inner(j, rel) => per_inner[j].push((rel, rx.premises[idx].clone())),
            Target::Kept(q) => kept.push((q, rx.premises[idx].clone())),
        }
    }

    let mut final_pairs: Vec<(usize, Derivation)> = Vec::new();
    for (j, group) in per_inner.into_iter().enumerate() {
        let mut group = group;
        group.sort_by_key(|(q, _)| *q);
        let cuts: Vec<usize> = group.iter().map(|(q, _)| *q).collect();
        let premises: Vec<Derivation> = group.into_iter().map(|(_, p)| p).collect();
        let xi_j = mk_mc(defs, premises, cuts, inner_rx.premises[j].clone())?;
        final_pairs.push((inner_rx.cuts[j], xi_j));
    }
    final_pairs.extend(kept);
    final_pairs.sort_by_key(|(q, _)| *q);
    let cuts: Vec<usize> = final_pairs.iter().map(|(q, _)| *q).collect();
    let premises: Vec<Derivation> = final_pairs.into_iter().map(|(_, p)| p).collect();
    mk_mc(defs, premises, cuts, inner_rx.pi.clone())
}

// ---------------------------------------------------------------------------
// strategy, single step, normalization

fn collect_mc_paths(d: &Derivation, path: &mut Vec<usize>, out: &mut Vec<(usize, Vec<usize>)>) {
    if matches!(d.rule, Rule::Multicut { .. }) {
        out.push((path.len(), path.clone()));
    }
    for (i, c) in d.children.iter().enumerate() {
        path.push(i);
        collect_mc_paths(c, path, out);
        path.pop();
    }
}

/// The redex the strategy selects, if any.
pub fn select_redex(d: &Derivation, strategy: Strategy) -> Option<Vec<usize>> {
    let mut all = Vec::new();
    collect_mc_paths(d, &mut Vec::new(), &mut all);
    match strategy {
        Strategy::LowestFirst => all
            .into_iter()
            .max_by(|(da, pa), (db, pb)| da.cmp(db).then_with(|| pb.cmp(pa)))
            .map(|(_, p)| p),
        Strategy::RootFirst => all
            .into_iter()
            .min_by(|(da, pa), (db, pb)| da.cmp(db).then_with(|| pa.cmp(pb)))
            .map(|(_, p)| p),
    }
}

fn replace_at(d: &Derivation, path: &[usize], new: Derivation) -> Derivation {
    match path.split_first() {
        None => new,
        Some((&i, rest)) => {
            let mut children = d.children.clone();
            children[i] = replace_at(&children[i], rest, new);
            Derivation {
                rule: d.rule.clone(),
                concl: d.concl.clone(),
                children,
            }
        }
    }
}

/// Applies one reduction at the redex the strategy selects. `None` when the
/// derivation is multicut-free.
pub fn step(
    defs: &DefTable,
    d: &Derivation,
    strategy: Strategy,
) -> Result<Option<(ReductionStep, Derivation)>, ReduceError> {
    let Some(path) = select_redex(d, strategy) else {
        return Ok(None);
    };
    let node = d
        .node_at(&path)
        .ok_or_else(|| internal("selected redex path is stale"))?;
    let mut options = reducts(defs, node)?;
    if options.is_empty() {
        return Err(internal("no reduct for a multicut redex"));
    }
    let (mut step, red) = options.remove(0);
    debug_assert!(red.concl == node.concl, "reduct changed the end sequent");
    let out = replace_at(d, &path, red);
    step.path = path;
    step.size_after = out.node_count();
    Ok(Some((step, out)))
}

/// Iterates `step` under the given strategy until no multicut remains, then
/// deletes `subst` nodes. The fuel bound is an engineering guard; exhausting
/// it returns the partial result and its trace.
pub fn normalize(
    defs: &DefTable,
    d: &Derivation,
    fuel: u64,
    strategy: Strategy,
) -> Result<(Derivation, Trace), NormalizeError> {
    let mut cur = d.clone();
    let mut steps: Vec<ReductionStep> = Vec::new();
    let initial = format!("{:?}", d.concl);
    loop {
        if steps.len() as u64 >= fuel {
            let step_count = steps.len() as u64;
            let final_size = cur.node_count();
            return Err(NormalizeError::FuelExhausted {
                partial: cur,
                trace: Trace {
                    initial,
                    steps,
                    step_count,
                    final_size,
                },
            });
        }
        match step(defs, &cur, strategy)? {
            Some((st, next)) => {
                steps.push(st);
                cur = next;
            }
            None => break,
        }
    }
    let result = eliminate_subst(&cur);
    let trace = Trace {
        initial,
        step_count: steps.len() as u64,
        final_size: result.node_count(),
        steps,
    };
    Ok((result, trace))
}

// ---------------------------------------------------------------------------

fn atom_args(f: &Term) -> Result<Vec<Term>, ReduceError> {
    match view(f) {
        Some(FormulaView::Pred(_, args)) | Some(FormulaView::ParamAtom(_, args)) => {
            Ok(args.into_iter().cloned().collect())
        }
        _ => Err(internal("expected a predicate or parameter atom")),
    }
}

fn pred_of(f: &Term) -> Result<String, ReduceError> {
    match view(f) {
        Some(FormulaView::Pred(p, _)) => Ok(p.to_string()),
        Some(FormulaView::ParamAtom(p, _)) => Ok(p.pred.clone()),
        _ => Err(internal("expected a predicate atom")),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testutil as tu;

    #[test]
    fn corpus_is_checker_valid() {
        let defs = tu::table();
        for (name, d) in tu::redex_corpus(&defs) {
            let report = d.check(&defs);
            assert!(report.ok(), "{name} does not check:\n{report}\n{d:?}");
        }
    }

    #[test]
    fn progress_and_subject_reduction() {
        let defs = tu::table();
        for (name, d) in tu::redex_corpus(&defs) {
            let rs = reducts(&defs, &d).unwrap_or_else(|e| panic!("{name}: {e}"));
            assert!(!rs.is_empty(), "{name}: no reducts");
            for (st, red) in rs {
                let report = red.check(&defs);
                assert!(
                    report.ok(),
                    "{name} [{}]: reduct does not check:\n{report}\n{red:?}",
                    st.case
                );
                assert_eq!(red.concl, d.concl, "{name}: end sequent changed");
            }
        }
    }

    #[test]
    fn every_case_family_is_exercised() {
        let defs = tu::table();
        let mut seen: std::collections::BTreeSet<&'static str> = Default::default();
        let mut cases: std::collections::BTreeSet<String> = Default::default();
        for (_, d) in tu::redex_corpus(&defs) {
            for (st, _) in reducts(&defs, &d).unwrap() {
                seen.insert(st.family.name());
                cases.insert(st.case.clone());
            }
        }
        for family in [
            "essential",
            "left-commutative",
            "right-commutative",
            "multicut",
            "structural",
            "axiom",
        ] {
            assert!(seen.contains(family), "family {family} not covered");
        }
        for case in [
            "andR/andL",
            "orR/orL",
            "impR/impL",
            "forallR/forallL",
            "existsR/existsL",
            "indR/indL",
            "coindR/coindL",
            "eqR/eqL",
            "-/init",
            "-/cL",
            "-/wL",
            "-/mc",
        ] {
            assert!(cases.contains(case), "case {case} not covered: {cases:?}");
        }
    }

    #[test]
    fn non_redex_is_rejected() {
        let defs = tu::table();
        let d = tu::top_r(&defs, vec![]);
        assert!(matches!(reducts(&defs, &d), Err(ReduceError::NotARedex)));
    }

    #[test]
    fn cut_free_input_steps_to_none() {
        let defs = tu::table();
        let d = tu::freeness_clash(&defs);
        assert!(step(&defs, &d, Strategy::LowestFirst).unwrap().is_none());
        let (res, trace) = normalize(&defs, &d, DEFAULT_FUEL, Strategy::LowestFirst).unwrap();
        assert_eq!(res, d);
        assert_eq!(trace.step_count, 0);
    }

    #[test]
    fn single_root_cut_over_init_steps_once() {
        let defs = tu::table();
        let pr = tu::eq_r(&defs, vec![], tu::z());
        let d = tu::mc(&defs, vec![pr.clone()], vec![0], tu::init(&defs, tu::eqn(tu::z(), tu::z())));
        let (st, next) = step(&defs, &d, Strategy::LowestFirst).unwrap().unwrap();
        assert_eq!(st.case, "-/init");
        assert_eq!(next, pr);
        assert!(step(&defs, &next, Strategy::LowestFirst).unwrap().is_none());
    }

    #[test]
    fn inner_cut_fires_before_outer() {
        let defs = tu::table();
        let zz = tu::eqn(tu::z(), tu::z());
        let inner = tu::mc(
            &defs,
            vec![tu::eq_r(&defs, vec![], tu::z())],
            vec![0],
            tu::init(&defs, zz.clone()),
        );
        let outer = tu::mc(&defs, vec![inner], vec![0], tu::init(&defs, zz));
        let (st, _) = step(&defs, &outer, Strategy::LowestFirst).unwrap().unwrap();
        assert_eq!(st.path, vec![0], "inner multicut fires first");
    }

    #[test]
    fn whole_corpus_normalizes_cut_and_subst_free() {
        let defs = tu::table();
        let mut all = tu::redex_corpus(&defs);
        all.extend(tu::unfold_cut_corpus(&defs));
        for (name, d) in all {
            let (res, trace) = normalize(&defs, &d, DEFAULT_FUEL, Strategy::LowestFirst)
                .unwrap_or_else(|e| panic!("{name}: {e}"));
            assert!(is_cut_free(&res), "{name}: result has cuts\n{res:?}");
            assert!(is_subst_free(&res), "{name}: result has subst nodes");
            assert!(
                res.concl.multiset_eq(&d.concl),
                "{name}: end sequent changed"
            );
            let report = res.check(&defs);
            assert!(report.ok(), "{name}: normal form fails check:\n{report}");
            assert!(trace.step_count < 1000, "{name}: suspiciously long trace");
        }
    }

    #[test]
    fn unfold_cuts_normalize_quickly() {
        let defs = tu::table();
        for (name, d) in tu::unfold_cut_corpus(&defs) {
            let (_, trace) = normalize(&defs, &d, 500, Strategy::LowestFirst)
                .unwrap_or_else(|e| panic!("{name}: {e}"));
            assert!(trace.step_count <= 500, "{name}");
        }
    }

    #[test]
    fn trace_records_essential_ind_step() {
        let defs = tu::table();
        let corpus = tu::redex_corpus(&defs);
        let (_, d) = corpus.iter().find(|(n, _)| *n == "indR_indL").unwrap();
        let (_, trace) = normalize(&defs, d, DEFAULT_FUEL, Strategy::LowestFirst).unwrap();
        assert!(
            trace.steps.iter().any(|s| s.case == "indR/indL"),
            "trace: {:?}",
            trace.steps.iter().map(|s| s.case.clone()).collect::<Vec<_>>()
        );
    }

    #[test]
    fn fuel_exhaustion_reports_partial_trace() {
        let defs = tu::table();
        let corpus = tu::redex_corpus(&defs);
        let (_, d) = corpus.iter().find(|(n, _)| *n == "impR_impL").unwrap();
        match normalize(&defs, d, 0, Strategy::LowestFirst) {
            Err(NormalizeError::FuelExhausted { partial, trace }) => {
                assert_eq!(trace.step_count, 0);
                assert_eq!(partial.concl, d.concl);
            }
            other => panic!("expected fuel exhaustion, got {other:?}"),
        }
    }
}
