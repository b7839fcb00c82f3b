//! Bounded, cut-free backward proof search over the primitive rules.
//!
//! This is a smoke-test oracle for small derivability and non-derivability
//! claims, intentionally incomplete: induction and co-induction invariants
//! are never synthesized (only user-registered ones are tried), witnesses
//! are enumerated from a small term universe, and `None` always means "not
//! found within budget", never "non-derivable".

use std::collections::BTreeMap;

use thiserror::Error;

use crate::kernel::{Derivation, KernelError, Rule, Sequent, Side};
use crate::logic::{view, DefTable, Flavor, FormulaView};
use crate::term::{NameSupply, ParamRef, SimpleType, Term, UnifyError};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SearchBudget {
    /// maximum derivation height explored
    pub depth: u32,
    /// per-predicate bound on fixed-point unfoldings along a branch
    pub unfold_per_pred: u32,
    /// overall node expansion budget
    pub nodes: u64,
}

impl Default for SearchBudget {
    fn default() -> Self {
        SearchBudget {
            depth: 8,
            unfold_per_pred: 4,
            nodes: 200_000,
        }
    }
}

/// A user-registered (co-)induction invariant, selectable by name.
#[derive(Debug, Clone, PartialEq)]
pub struct NamedInvariant {
    pub name: String,
    pub pred: String,
    pub inv: Term,
    pub inv_vars: Vec<(String, SimpleType)>,
}

#[derive(Debug, Error)]
pub enum SearchError {
    #[error("{0}")]
    Unify(#[from] UnifyError),
    #[error("{0}")]
    Kernel(#[from] KernelError),
}

/// Depth-first search with iterative deepening and a loop check on repeated
/// sequents modulo renaming. `Some` results are checker-valid and cut-free.
pub fn bounded_search(
    defs: &DefTable,
    goal: &Sequent,
    budget: &SearchBudget,
    invariants: &[NamedInvariant],
) -> Result<Option<Derivation>, SearchError> {
    let mut nodes = budget.nodes;
    for depth in 1..=budget.depth {
        let mut st = Searcher {
            defs,
            invariants,
            unfold_bound: budget.unfold_per_pred,
            nodes: &mut nodes,
            supply: supply_for(goal),
        };
        let mut path = Vec::new();
        if let Some(d) = st.prove(goal, depth, &BTreeMap::new(), &mut path)? {
            return Ok(Some(d));
        }
        if nodes == 0 {
            break;
        }
    }
    Ok(None)
}

fn supply_for(goal: &Sequent) -> NameSupply {
    let mut used: std::collections::BTreeSet<String> = goal.free_vars().into_keys().collect();
    used.extend(goal.params().into_iter().map(|p| p.name));
    NameSupply::new(used)
}

struct Searcher<'a> {
    defs: &'a DefTable,
    invariants: &'a [NamedInvariant],
    unfold_bound: u32,
    nodes: &'a mut u64,
    supply: NameSupply,
}

impl<'a> Searcher<'a> {
    fn prove(
        &mut self,
        goal: &Sequent,
        depth: u32,
        unfolds: &BTreeMap<String, u32>,
        path: &mut Vec<String>,
    ) -> Result<Option<Derivation>, SearchError> {
        if depth == 0 || *self.nodes == 0 {
            return Ok(None);
        }
        *self.nodes -= 1;
        let key = sequent_key(goal);
        if path.contains(&key) {
            return Ok(None);
        }

        if let Some(d) = self.try_close(goal)? {
            return Ok(Some(d));
        }

        path.push(key);
        let result = self.expand(goal, depth, unfolds, path)?;
        path.pop();
        Ok(result)
    }

    /// Zero-premise rules and the axiom, including the weakening chain that
    /// lets `init` close a sequent with surplus context.
    fn try_close(&mut self, goal: &Sequent) -> Result<Option<Derivation>, SearchError> {
        match view(&goal.right) {
            Some(FormulaView::Top) => {
                return Ok(Some(Derivation::apply(
                    self.defs,
                    Rule::TopR {
                        left: goal.left.clone(),
                    },
                    vec![],
                )?));
            }
            Some(FormulaView::Eq(s, t, _)) if s == t => {
                return Ok(Some(Derivation::apply(
                    self.defs,
                    Rule::EqR {
                        left: goal.left.clone(),
                        formula: goal.right.clone(),
                    },
                    vec![],
                )?));
            }
            _ => {}
        }
        for (pos, f) in goal.left.iter().enumerate() {
            if matches!(view(f), Some(FormulaView::Bot)) {
                return Ok(Some(Derivation::apply(
                    self.defs,
                    Rule::BotL {
                        pos,
                        left: goal.left.clone(),
                        right: goal.right.clone(),
                    },
                    vec![],
                )?));
            }
        }
        if let Some(pos) = goal.left.iter().position(|f| f == &goal.right) {
            // init plus weakening for the surplus context
            let mut d = Derivation::apply(
                self.defs,
                Rule::Init {
                    formula: goal.right.clone(),
                },
                vec![],
            )?;
            for (i, f) in goal.left.iter().enumerate() {
                if i == pos {
                    continue;
                }
                let at = if i < pos { i } else { i.min(d.concl.left.len()) };
                d = Derivation::apply(
                    self.defs,
                    Rule::WeakenL {
                        pos: at,
                        formula: f.clone(),
                    },
                    vec![d],
                )?;
            }
            if d.concl == *goal {
                return Ok(Some(d));
            }
        }
        // eqL with an unsolvable equation closes immediately
        for (pos, f) in goal.left.iter().enumerate() {
            if let Some(FormulaView::Eq(s, t, _)) = view(f) {
                if crate::term::unify(s, t)?.is_none() {
                    return Ok(Some(Derivation::apply(
                        self.defs,
                        Rule::EqL {
                            pos,
                            left: goal.left.clone(),
                            right: goal.right.clone(),
                            mgu: None,
                        },
                        vec![],
                    )?));
                }
            }
        }
        Ok(None)
    }

    fn expand(
        &mut self,
        goal: &Sequent,
        depth: u32,
        unfolds: &BTreeMap<String, u32>,
        path: &mut Vec<String>,
    ) -> Result<Option<Derivation>, SearchError> {
        // eqL on a solvable equation first: it is the only rule that can
        // instantiate eigenvariables elsewhere in the sequent
        for (pos, f) in goal.left.iter().enumerate() {
            let Some(FormulaView::Eq(s, t, _)) = view(f) else {
                continue;
            };
            let Some(sigma) = crate::term::unify(s, t)? else {
                continue;
            };
            let sub = Sequent::new(goal.without_pos(pos), goal.right.clone())
                .apply_subst(&sigma)
                .map_err(KernelError::from_message)?;
            if let Some(child) = self.prove(&sub, depth - 1, unfolds, path)? {
                return Ok(Some(Derivation::apply(
                    self.defs,
                    Rule::EqL {
                        pos,
                        left: goal.left.clone(),
                        right: goal.right.clone(),
                        mgu: Some(sigma),
                    },
                    vec![child],
                )?));
            }
        }

        if let Some(d) = self.right_rules(goal, depth, unfolds, path)? {
            return Ok(Some(d));
        }
        self.left_rules(goal, depth, unfolds, path)
    }

    fn right_rules(
        &mut self,
        goal: &Sequent,
        depth: u32,
        unfolds: &BTreeMap<String, u32>,
        path: &mut Vec<String>,
    ) -> Result<Option<Derivation>, SearchError> {
        let right = goal.right.clone();
        match view(&right) {
            Some(FormulaView::And(a, b)) => {
                let (a, b) = (a.clone(), b.clone());
                let ga = Sequent::new(goal.left.clone(), a);
                let Some(da) = self.prove(&ga, depth - 1, unfolds, path)? else {
                    return Ok(None);
                };
                let gb = Sequent::new(goal.left.clone(), b);
                let Some(db) = self.prove(&gb, depth - 1, unfolds, path)? else {
                    return Ok(None);
                };
                Ok(Some(Derivation::apply(self.defs, Rule::AndR, vec![da, db])?))
            }
            Some(FormulaView::Or(a, b)) => {
                for (side, f) in [(Side::Left, a.clone()), (Side::Right, b.clone())] {
                    let g = Sequent::new(goal.left.clone(), f);
                    if let Some(d) = self.prove(&g, depth - 1, unfolds, path)? {
                        return Ok(Some(Derivation::apply(
                            self.defs,
                            Rule::OrR {
                                disj: right.clone(),
                                side,
                            },
                            vec![d],
                        )?));
                    }
                }
                Ok(None)
            }
            Some(FormulaView::Imp(a, b)) => {
                let mut left = goal.left.clone();
                left.insert(0, a.clone());
                let g = Sequent::new(left, b.clone());
                match self.prove(&g, depth - 1, unfolds, path)? {
                    Some(d) => Ok(Some(Derivation::apply(self.defs, Rule::ImpR, vec![d])?)),
                    None => Ok(None),
                }
            }
            Some(FormulaView::All(tau, abs)) => {
                let y = self.supply.fresh("y");
                let opened =
                    crate::logic::open_abs(abs, &y, &tau).map_err(KernelError::from_message)?;
                let g = Sequent::new(goal.left.clone(), opened);
                match self.prove(&g, depth - 1, unfolds, path)? {
                    Some(d) => Ok(Some(Derivation::apply(
                        self.defs,
                        Rule::AllR { eigen: (y, tau) },
                        vec![d],
                    )?)),
                    None => Ok(None),
                }
            }
            Some(FormulaView::Ex(tau, abs)) => {
                let abs = abs.clone();
                for w in self.witnesses(goal, &tau) {
                    let inst = crate::logic::instantiate_abs(&abs, &w)
                        .map_err(KernelError::from_message)?;
                    let g = Sequent::new(goal.left.clone(), inst);
                    if let Some(d) = self.prove(&g, depth - 1, unfolds, path)? {
                        return Ok(Some(Derivation::apply(
                            self.defs,
                            Rule::ExR {
                                quantified: right.clone(),
                                witness: w,
                            },
                            vec![d],
                        )?));
                    }
                }
                Ok(None)
            }
            Some(FormulaView::Pred(p, args)) => {
                let p = p.to_string();
                let args: Vec<Term> = args.into_iter().cloned().collect();
                match self.defs.clause(&p).map(|c| c.flavor) {
                    Some(Flavor::Mu) => {
                        let Some(unfolds) = spend_unfold(unfolds, &p, self.unfold_bound) else {
                            return Ok(None);
                        };
                        let param = self.supply.fresh("X");
                        let pty = self.defs.pred_type(&p).unwrap().clone();
                        let slot = Term::param(ParamRef::new(param.clone(), p.clone()), pty);
                        let body = self
                            .defs
                            .unfold(&p, &slot, &args)
                            .map_err(KernelError::from_message)?;
                        let g = Sequent::new(goal.left.clone(), body);
                        match self.prove(&g, depth - 1, &unfolds, path)? {
                            Some(d) => Ok(Some(Derivation::apply(
                                self.defs,
                                Rule::IndR {
                                    principal: right.clone(),
                                    param,
                                },
                                vec![d],
                            )?)),
                            None => Ok(None),
                        }
                    }
                    Some(Flavor::Nu) => {
                        for ni in self.invariants.iter().filter(|i| i.pred == p).cloned() {
                            if let Some(d) =
                                self.coind_right(goal, &right, &ni, &args, depth, unfolds, path)?
                            {
                                return Ok(Some(d));
                            }
                        }
                        Ok(None)
                    }
                    None => Ok(None),
                }
            }
            Some(FormulaView::ParamAtom(pr, args)) => {
                let pr = pr.clone();
                let args: Vec<Term> = args.into_iter().cloned().collect();
                let Some(clause) = self.defs.clause(&pr.pred) else {
                    return Ok(None);
                };
                if clause.flavor != Flavor::Mu {
                    return Ok(None);
                }
                let Some(unfolds) = spend_unfold(unfolds, &pr.pred, self.unfold_bound) else {
                    return Ok(None);
                };
                let pty = self.defs.pred_type(&pr.pred).unwrap().clone();
                let pred = pr.pred.clone();
                let slot = Term::param(pr, pty);
                let body = self
                    .defs
                    .unfold(&pred, &slot, &args)
                    .map_err(KernelError::from_message)?;
                let g = Sequent::new(goal.left.clone(), body);
                match self.prove(&g, depth - 1, &unfolds, path)? {
                    Some(d) => Ok(Some(Derivation::apply(
                        self.defs,
                        Rule::IndRp {
                            principal: right.clone(),
                        },
                        vec![d],
                    )?)),
                    None => Ok(None),
                }
            }
            _ => Ok(None),
        }
    }

    #[allow(clippy::too_many_arguments)]
    fn coind_right(
        &mut self,
        goal: &Sequent,
        right: &Term,
        ni: &NamedInvariant,
        args: &[Term],
        depth: u32,
        unfolds: &BTreeMap<String, u32>,
        path: &mut Vec<String>,
    ) -> Result<Option<Derivation>, SearchError> {
        let s_t = Term::apps(ni.inv.clone(), args.iter().cloned())
            .canonical(&SimpleType::o())
            .map_err(KernelError::from_message)?;
        let g1 = Sequent::new(goal.left.clone(), s_t);
        let Some(cont) = self.prove(&g1, depth - 1, unfolds, path)? else {
            return Ok(None);
        };
        let ys: Vec<Term> = ni
            .inv_vars
            .iter()
            .map(|(n, ty)| Term::var(n.clone(), ty.clone()))
            .collect();
        let s_y = Term::apps(ni.inv.clone(), ys.iter().cloned())
            .canonical(&SimpleType::o())
            .map_err(KernelError::from_message)?;
        let body = self
            .defs
            .unfold(&ni.pred, &ni.inv, &ys)
            .map_err(KernelError::from_message)?;
        let g2 = Sequent::new(vec![s_y], body);
        let Some(inv_prem) = self.prove(&g2, depth - 1, unfolds, path)? else {
            return Ok(None);
        };
        Ok(Some(Derivation::apply(
            self.defs,
            Rule::CoindR {
                principal: right.clone(),
                inv: ni.inv.clone(),
                inv_vars: ni.inv_vars.clone(),
            },
            vec![cont, inv_prem],
        )?))
    }

    fn left_rules(
        &mut self,
        goal: &Sequent,
        depth: u32,
        unfolds: &BTreeMap<String, u32>,
        path: &mut Vec<String>,
    ) -> Result<Option<Derivation>, SearchError> {
        for pos in 0..goal.left.len() {
            let f = goal.left[pos].clone();
            match view(&f) {
                Some(FormulaView::And(a, b)) => {
                    for (side, part) in [(Side::Left, a.clone()), (Side::Right, b.clone())] {
                        let g = Sequent::new(goal.replaced_pos(pos, part), goal.right.clone());
                        if let Some(d) = self.prove(&g, depth - 1, unfolds, path)? {
                            return Ok(Some(Derivation::apply(
                                self.defs,
                                Rule::AndL {
                                    pos,
                                    conj: f.clone(),
                                    side,
                                },
                                vec![d],
                            )?));
                        }
                    }
                }
                Some(FormulaView::Or(a, b)) => {
                    let ga = Sequent::new(goal.replaced_pos(pos, a.clone()), goal.right.clone());
                    let Some(da) = self.prove(&ga, depth - 1, unfolds, path)? else {
                        continue;
                    };
                    let gb = Sequent::new(goal.replaced_pos(pos, b.clone()), goal.right.clone());
                    let Some(db) = self.prove(&gb, depth - 1, unfolds, path)? else {
                        continue;
                    };
                    return Ok(Some(Derivation::apply(
                        self.defs,
                        Rule::OrL { pos },
                        vec![da, db],
                    )?));
                }
                Some(FormulaView::Imp(a, b)) => {
                    let ga = Sequent::new(goal.without_pos(pos), a.clone());
                    let Some(da) = self.prove(&ga, depth - 1, unfolds, path)? else {
                        continue;
                    };
                    let gb = Sequent::new(goal.replaced_pos(pos, b.clone()), goal.right.clone());
                    let Some(db) = self.prove(&gb, depth - 1, unfolds, path)? else {
                        continue;
                    };
                    return Ok(Some(Derivation::apply(
                        self.defs,
                        Rule::ImpL { pos },
                        vec![da, db],
                    )?));
                }
                Some(FormulaView::All(tau, abs)) => {
                    let abs = abs.clone();
                    for w in self.witnesses(goal, &tau) {
                        let inst = crate::logic::instantiate_abs(&abs, &w)
                            .map_err(KernelError::from_message)?;
                        let g = Sequent::new(goal.replaced_pos(pos, inst), goal.right.clone());
                        if let Some(d) = self.prove(&g, depth - 1, unfolds, path)? {
                            return Ok(Some(Derivation::apply(
                                self.defs,
                                Rule::AllL {
                                    pos,
                                    quantified: f.clone(),
                                    witness: w,
                                },
                                vec![d],
                            )?));
                        }
                    }
                }
                Some(FormulaView::Ex(tau, abs)) => {
                    let y = self.supply.fresh("y");
                    let opened = crate::logic::open_abs(abs, &y, &tau)
                        .map_err(KernelError::from_message)?;
                    let g = Sequent::new(goal.replaced_pos(pos, opened), goal.right.clone());
                    if let Some(d) = self.prove(&g, depth - 1, unfolds, path)? {
                        return Ok(Some(Derivation::apply(
                            self.defs,
                            Rule::ExL {
                                pos,
                                eigen: (y, tau),
                            },
                            vec![d],
                        )?));
                    }
                }
                Some(FormulaView::Pred(p, args)) => {
                    let p = p.to_string();
                    let args: Vec<Term> = args.into_iter().cloned().collect();
                    match self.defs.clause(&p).map(|c| c.flavor) {
                        Some(Flavor::Nu) => {
                            let Some(unfolds) = spend_unfold(unfolds, &p, self.unfold_bound)
                            else {
                                continue;
                            };
                            let param = self.supply.fresh("X");
                            let pty = self.defs.pred_type(&p).unwrap().clone();
                            let slot = Term::param(ParamRef::new(param.clone(), p.clone()), pty);
                            let body = self
                                .defs
                                .unfold(&p, &slot, &args)
                                .map_err(KernelError::from_message)?;
                            let g = Sequent::new(goal.replaced_pos(pos, body), goal.right.clone());
                            if let Some(d) = self.prove(&g, depth - 1, &unfolds, path)? {
                                return Ok(Some(Derivation::apply(
                                    self.defs,
                                    Rule::CoindL {
                                        pos,
                                        principal: f.clone(),
                                        param,
                                    },
                                    vec![d],
                                )?));
                            }
                        }
                        Some(Flavor::Mu) => {
                            for ni in self.invariants.iter().filter(|i| i.pred == p).cloned() {
                                if let Some(d) =
                                    self.ind_left(goal, pos, &f, &ni, &args, depth, unfolds, path)?
                                {
                                    return Ok(Some(d));
                                }
                            }
                        }
                        None => {}
                    }
                }
                Some(FormulaView::ParamAtom(pr, args)) => {
                    let pr = pr.clone();
                    let args: Vec<Term> = args.into_iter().cloned().collect();
                    let Some(clause) = self.defs.clause(&pr.pred) else {
                        continue;
                    };
                    if clause.flavor != Flavor::Nu {
                        continue;
                    }
                    let Some(unfolds) = spend_unfold(unfolds, &pr.pred, self.unfold_bound) else {
                        continue;
                    };
                    let pty = self.defs.pred_type(&pr.pred).unwrap().clone();
                    let pred = pr.pred.clone();
                    let slot = Term::param(pr, pty);
                    let body = self
                        .defs
                        .unfold(&pred, &slot, &args)
                        .map_err(KernelError::from_message)?;
                    let g = Sequent::new(goal.replaced_pos(pos, body), goal.right.clone());
                    if let Some(d) = self.prove(&g, depth - 1, &unfolds, path)? {
                        return Ok(Some(Derivation::apply(
                            self.defs,
                            Rule::CoindLp {
                                pos,
                                principal: f.clone(),
                            },
                            vec![d],
                        )?));
                    }
                }
                _ => {}
            }
        }
        Ok(None)
    }

    #[allow(clippy::too_many_arguments)]
    fn ind_left(
        &mut self,
        goal: &Sequent,
        pos: usize,
        principal: &Term,
        ni: &NamedInvariant,
        args: &[Term],
        depth: u32,
        unfolds: &BTreeMap<String, u32>,
        path: &mut Vec<String>,
    ) -> Result<Option<Derivation>, SearchError> {
        let ys: Vec<Term> = ni
            .inv_vars
            .iter()
            .map(|(n, ty)| Term::var(n.clone(), ty.clone()))
            .collect();
        let body = self
            .defs
            .unfold(&ni.pred, &ni.inv, &ys)
            .map_err(KernelError::from_message)?;
        let s_y = Term::apps(ni.inv.clone(), ys.iter().cloned())
            .canonical(&SimpleType::o())
            .map_err(KernelError::from_message)?;
        let g1 = Sequent::new(vec![body], s_y);
        let Some(inv_prem) = self.prove(&g1, depth - 1, unfolds, path)? else {
            return Ok(None);
        };
        let s_t = Term::apps(ni.inv.clone(), args.iter().cloned())
            .canonical(&SimpleType::o())
            .map_err(KernelError::from_message)?;
        let g2 = Sequent::new(goal.replaced_pos(pos, s_t), goal.right.clone());
        let Some(cont) = self.prove(&g2, depth - 1, unfolds, path)? else {
            return Ok(None);
        };
        Ok(Some(Derivation::apply(
            self.defs,
            Rule::IndL {
                pos,
                principal: principal.clone(),
                inv: ni.inv.clone(),
                inv_vars: ni.inv_vars.clone(),
            },
            vec![inv_prem, cont],
        )?))
    }

    /// Small witness universe: in-scope eigenvariables plus ground terms
    /// over the signature, up to a fixed depth.
    fn witnesses(&self, goal: &Sequent, tau: &SimpleType) -> Vec<Term> {
        let mut out = Vec::new();
        for (name, ty) in goal.free_vars() {
            if &ty == tau {
                out.push(Term::var(name, ty));
            }
        }
        enumerate_ground(self.defs, tau, 3, &mut out);
        out.truncate(48);
        out
    }
}

fn spend_unfold(
    unfolds: &BTreeMap<String, u32>,
    pred: &str,
    bound: u32,
) -> Option<BTreeMap<String, u32>> {
    let used = unfolds.get(pred).copied().unwrap_or(0);
    if used >= bound {
        return None;
    }
    let mut next = unfolds.clone();
    next.insert(pred.to_string(), used + 1);
    Some(next)
}

fn enumerate_ground(defs: &DefTable, tau: &SimpleType, depth: u32, out: &mut Vec<Term>) {
    if depth == 0 {
        return;
    }
    for (name, ty) in defs.signature().consts() {
        if ty.target() != tau || !ty.target().is_efo() {
            continue;
        }
        let args = ty.args();
        if args.is_empty() {
            out.push(Term::cnst(name.clone(), ty.clone()));
            continue;
        }
        let mut arg_choices: Vec<Vec<Term>> = Vec::new();
        for a in &args {
            let mut choices = Vec::new();
            enumerate_ground(defs, a, depth - 1, &mut choices);
            arg_choices.push(choices);
        }
        if arg_choices.iter().any(|c| c.is_empty()) {
            continue;
        }
        let mut combos: Vec<Vec<Term>> = vec![Vec::new()];
        for choices in &arg_choices {
            let mut next = Vec::new();
            for combo in &combos {
                for c in choices {
                    let mut combo = combo.clone();
                    combo.push(c.clone());
                    next.push(combo);
                }
            }
            combos = next;
        }
        for combo in combos {
            out.push(Term::apps(Term::cnst(name.clone(), ty.clone()), combo));
        }
    }
}

/// Stable key for the loop check: sequents equal up to renaming of free
/// variables and parameters get the same key.
fn sequent_key(goal: &Sequent) -> String {
    let canon = canon_sequent(goal);
    let mut parts: Vec<String> = canon.left.iter().map(|f| format!("{f:?}")).collect();
    parts.sort();
    format!("{}#{:?}", parts.join("|"), canon.right)
}

fn canon_sequent(goal: &Sequent) -> Sequent {
    let mut venv: BTreeMap<String, String> = BTreeMap::new();
    let mut penv: BTreeMap<String, String> = BTreeMap::new();
    let mut rename = |t: &Term| canon_term(t, &mut venv, &mut penv);
    let left = goal.left.iter().map(&mut rename).collect();
    let right = rename(&goal.right);
    Sequent::new(left, right)
}

fn canon_term(
    t: &Term,
    venv: &mut BTreeMap<String, String>,
    penv: &mut BTreeMap<String, String>,
) -> Term {
    match t {
        Term::Var(x, ty) => {
            let n = venv.len();
            let name = venv.entry(x.clone()).or_insert_with(|| format!("c{n}"));
            Term::var(name.clone(), ty.clone())
        }
        Term::Param(p, ty) => {
            let n = penv.len();
            let name = penv.entry(p.name.clone()).or_insert_with(|| format!("C{n}"));
            Term::param(ParamRef::new(name.clone(), p.pred.clone()), ty.clone())
        }
        Term::Bound(_) | Term::Const(..) => t.clone(),
        Term::Lam(ty, b) => Term::lam(ty.clone(), canon_term(b, venv, penv)),
        Term::App(f, a) => Term::app(canon_term(f, venv, penv), canon_term(a, venv, penv)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::logic;
    use crate::testutil as tu;

    fn search(defs: &DefTable, goal: Sequent, budget: SearchBudget) -> Option<Derivation> {
        let got = bounded_search(defs, &goal, &budget, &[]).unwrap();
        if let Some(d) = &got {
            tu::must_check(defs, d);
            assert!(crate::reduce::is_cut_free(d));
            assert_eq!(d.concl, goal);
        }
        got
    }

    #[test]
    fn proves_top() {
        let defs = tu::table();
        let got = search(&defs, Sequent::entails(logic::top()), SearchBudget::default());
        assert!(got.is_some());
    }

    #[test]
    fn proves_freeness_goal() {
        let defs = tu::table();
        // |- forall x, z = s x => false
        let goal = Sequent::entails(logic::forall_named(
            "x",
            &tu::nt(),
            logic::imp(tu::eqn(tu::z(), tu::s(tu::v("x"))), logic::bot()),
        ));
        let budget = SearchBudget {
            depth: 4,
            ..Default::default()
        };
        assert!(search(&defs, goal, budget).is_some());
    }

    #[test]
    fn proves_ev_ssz_under_stratified_table() {
        let defs = tu::table();
        let goal = Sequent::entails(tu::ev(tu::num(2)));
        let got = search(&defs, goal, SearchBudget::default());
        assert!(got.is_some());
    }

    #[test]
    fn no_proof_of_ev_ssz_under_non_monotone_table() {
        let defs = tu::non_monotone_ev_table();
        let goal = Sequent::entails(tu::ev(tu::num(2)));
        let got = search(&defs, goal, SearchBudget::default());
        assert!(got.is_none());
    }

    #[test]
    fn no_proof_of_p_from_negative_self_reference() {
        let defs = tu::non_monotone_p_table();
        let goal = Sequent::entails(Term::cnst("p", SimpleType::o()));
        assert!(search(&defs, goal, SearchBudget::default()).is_none());
    }

    #[test]
    fn no_proof_of_false() {
        for defs in [
            tu::table(),
            tu::non_monotone_ev_table(),
            tu::non_monotone_p_table(),
        ] {
            let goal = Sequent::entails(logic::bot());
            assert!(search(&defs, goal, SearchBudget::default()).is_none());
        }
    }

    #[test]
    fn budget_monotonicity() {
        let defs = tu::table();
        let goal = Sequent::entails(tu::ev(tu::num(2)));
        let small = SearchBudget {
            depth: 8,
            unfold_per_pred: 4,
            nodes: 200_000,
        };
        assert!(search(&defs, goal.clone(), small).is_some());
        for extra in [1, 3, 7] {
            let bigger = SearchBudget {
                depth: small.depth + extra,
                unfold_per_pred: small.unfold_per_pred + extra,
                nodes: small.nodes * (extra as u64 + 1),
            };
            assert!(search(&defs, goal.clone(), bigger).is_some());
        }
    }

    #[test]
    fn coinduction_with_registered_invariant() {
        let defs = tu::table();
        // conat (s z) via the invariant \x. (x = s z) \/ (x = z)
        let inv = Term::lam(
            tu::nt(),
            logic::or(
                tu::eqn(Term::Bound(0), tu::s(tu::z())),
                tu::eqn(Term::Bound(0), tu::z()),
            ),
        );
        let reg = NamedInvariant {
            name: "conat_sz".into(),
            pred: "conat".into(),
            inv,
            inv_vars: vec![("y0".into(), tu::nt())],
        };
        let goal = Sequent::entails(tu::conat(tu::s(tu::z())));
        let got = bounded_search(&defs, &goal, &SearchBudget::default(), &[reg]).unwrap();
        let d = got.expect("coinductive proof found");
        tu::must_check(&defs, &d);
        assert!(crate::reduce::is_cut_free(&d));
    }
}
