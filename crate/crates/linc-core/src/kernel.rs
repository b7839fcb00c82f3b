//! Sequents, derivation trees and the rule checker.
//!
//! A derivation stores its conclusion at every node together with the rule
//! tag and per-rule payload. `Derivation::apply` builds nodes bottom-up and
//! validates them eagerly; `check` re-validates a whole tree and accumulates
//! every violation instead of stopping at the first, since it doubles as the
//! test oracle for the derivation transformations.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::logic::{
    self, instantiate_abs, view, DefTable, Flavor, FormulaView,
};
use crate::term::{NameSupply, ParamRef, SimpleType, Subst, Term};

/// One-sided sequent `Γ ⊢ C`. The left-hand side is a multiset; the vector
/// order is bookkeeping so rule payloads can address occurrences by
/// position.
#[derive(Clone, PartialEq, Eq)]
pub struct Sequent {
    pub left: Vec<Term>,
    pub right: Term,
}

impl Sequent {
    pub fn new(left: Vec<Term>, right: Term) -> Self {
        Sequent { left, right }
    }

    pub fn entails(right: Term) -> Self {
        Sequent { left: Vec::new(), right }
    }

    /// Multiset equality on the left, structural on the right.
    pub fn multiset_eq(&self, other: &Sequent) -> bool {
        if self.right != other.right || self.left.len() != other.left.len() {
            return false;
        }
        let mut a = self.left.clone();
        let mut b = other.left.clone();
        a.sort_by(term_order);
        b.sort_by(term_order);
        a == b
    }

    pub fn free_vars(&self) -> BTreeMap<String, SimpleType> {
        let mut out = self.right.free_vars();
        for f in &self.left {
            out.extend(f.free_vars());
        }
        out
    }

    pub fn params(&self) -> BTreeSet<ParamRef> {
        let mut out = self.right.params();
        for f in &self.left {
            out.extend(f.params());
        }
        out
    }

    pub fn apply_subst(&self, theta: &Subst) -> Result<Sequent, String> {
        let left = self
            .left
            .iter()
            .map(|f| f.apply_subst(theta))
            .collect::<Result<Vec<_>, _>>()
            .map_err(|e| e.to_string())?;
        let right = self.right.apply_subst(theta).map_err(|e| e.to_string())?;
        Ok(Sequent { left, right })
    }

    pub fn apply_param_subst(&self, map: &BTreeMap<ParamRef, Term>) -> Result<Sequent, String> {
        let left = self
            .left
            .iter()
            .map(|f| f.apply_param_subst(map))
            .collect::<Result<Vec<_>, _>>()
            .map_err(|e| e.to_string())?;
        let right = self
            .right
            .apply_param_subst(map)
            .map_err(|e| e.to_string())?;
        Ok(Sequent { left, right })
    }

    /// The left context with the formula at `pos` removed.
    pub fn without_pos(&self, pos: usize) -> Vec<Term> {
        let mut l = self.left.clone();
        l.remove(pos);
        l
    }

    /// The left context with the formula at `pos` replaced.
    pub fn replaced_pos(&self, pos: usize, f: Term) -> Vec<Term> {
        let mut l = self.left.clone();
        l[pos] = f;
        l
    }

    fn without(&self, pos: usize) -> Vec<Term> {
        self.without_pos(pos)
    }

    fn replaced(&self, pos: usize, f: Term) -> Vec<Term> {
        self.replaced_pos(pos, f)
    }
}

fn term_order(a: &Term, b: &Term) -> std::cmp::Ordering {
    format!("{a:?}").cmp(&format!("{b:?}"))
}

impl fmt::Debug for Sequent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, t) in self.left.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{t:?}")?;
        }
        write!(f, " |- {:?}", self.right)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Side {
    Left,
    Right,
}

/// Rule tag plus its instantiation payload. Leaf rules with unconstrained
/// contexts carry their conclusion data.
#[derive(Clone, Debug, PartialEq)]
pub enum Rule {
    /// `C ⊢ C`
    Init { formula: Term },
    /// contraction: `keep` and `dup` address equal formulas in the premise;
    /// the conclusion drops `dup`
    ContractL { keep: usize, dup: usize },
    /// weakening: the conclusion inserts `formula` at `pos`
    WeakenL { pos: usize, formula: Term },
    /// multicut: `cuts[i]` is the position of the i-th cut formula in the
    /// rightmost premise's context; children are `[Π₁, .., Πₙ, Π]`
    Multicut { cuts: Vec<usize> },
    BotL { pos: usize, left: Vec<Term>, right: Term },
    TopR { left: Vec<Term> },
    AndL { pos: usize, conj: Term, side: Side },
    AndR,
    OrL { pos: usize },
    OrR { disj: Term, side: Side },
    ImpL { pos: usize },
    ImpR,
    AllL { pos: usize, quantified: Term, witness: Term },
    AllR { eigen: (String, SimpleType) },
    ExL { pos: usize, eigen: (String, SimpleType) },
    ExR { quantified: Term, witness: Term },
    /// left equality; `mgu` is `None` exactly when the sides do not unify,
    /// in which case the rule has no premises
    EqL {
        pos: usize,
        left: Vec<Term>,
        right: Term,
        mgu: Option<Subst>,
    },
    EqR { left: Vec<Term>, formula: Term },
    /// induction left: children `[Π_S, Π']`
    IndL {
        pos: usize,
        principal: Term,
        inv: Term,
        inv_vars: Vec<(String, SimpleType)>,
    },
    IndR { principal: Term, param: String },
    IndRp { principal: Term },
    CoindL { pos: usize, principal: Term, param: String },
    CoindLp { pos: usize, principal: Term },
    /// co-induction right: children `[Π', Π_S]`
    CoindR {
        principal: Term,
        inv: Term,
        inv_vars: Vec<(String, SimpleType)>,
    },
    /// derived rule, represented by its identity-substitution instance
    Subst,
}

impl Rule {
    pub fn name(&self) -> &'static str {
        match self {
            Rule::Init { .. } => "init",
            Rule::ContractL { .. } => "cL",
            Rule::WeakenL { .. } => "wL",
            Rule::Multicut { .. } => "mc",
            Rule::BotL { .. } => "botL",
            Rule::TopR { .. } => "topR",
            Rule::AndL { .. } => "andL",
            Rule::AndR => "andR",
            Rule::OrL { .. } => "orL",
            Rule::OrR { .. } => "orR",
            Rule::ImpL { .. } => "impL",
            Rule::ImpR => "impR",
            Rule::AllL { .. } => "forallL",
            Rule::AllR { .. } => "forallR",
            Rule::ExL { .. } => "existsL",
            Rule::ExR { .. } => "existsR",
            Rule::EqL { .. } => "eqL",
            Rule::EqR { .. } => "eqR",
            Rule::IndL { .. } => "indL",
            Rule::IndR { .. } => "indR",
            Rule::IndRp { .. } => "indRp",
            Rule::CoindL { .. } => "coindL",
            Rule::CoindLp { .. } => "coindLp",
            Rule::CoindR { .. } => "coindR",
            Rule::Subst => "subst",
        }
    }

    /// Left rules act on a position in the conclusion's context.
    pub fn principal_pos(&self) -> Option<usize> {
        match self {
            Rule::BotL { pos, .. }
            | Rule::AndL { pos, .. }
            | Rule::OrL { pos }
            | Rule::ImpL { pos }
            | Rule::AllL { pos, .. }
            | Rule::ExL { pos, .. }
            | Rule::EqL { pos, .. }
            | Rule::IndL { pos, .. }
            | Rule::CoindL { pos, .. }
            | Rule::CoindLp { pos, .. } => Some(*pos),
            Rule::ContractL { keep, dup } => Some(if keep < dup { *keep } else { *keep - 1 }),
            Rule::WeakenL { pos, .. } => Some(*pos),
            _ => None,
        }
    }

    pub fn is_left_rule(&self) -> bool {
        matches!(
            self,
            Rule::BotL { .. }
                | Rule::AndL { .. }
                | Rule::OrL { .. }
                | Rule::ImpL { .. }
                | Rule::AllL { .. }
                | Rule::ExL { .. }
                | Rule::EqL { .. }
                | Rule::IndL { .. }
                | Rule::CoindL { .. }
                | Rule::CoindLp { .. }
                | Rule::ContractL { .. }
                | Rule::WeakenL { .. }
        )
    }

    pub fn is_right_rule(&self) -> bool {
        matches!(
            self,
            Rule::TopR { .. }
                | Rule::AndR
                | Rule::OrR { .. }
                | Rule::ImpR
                | Rule::AllR { .. }
                | Rule::ExR { .. }
                | Rule::EqR { .. }
                | Rule::IndR { .. }
                | Rule::IndRp { .. }
                | Rule::CoindR { .. }
        )
    }
}

#[derive(Clone, PartialEq)]
pub struct Derivation {
    pub rule: Rule,
    pub concl: Sequent,
    pub children: Vec<Derivation>,
}

#[derive(Debug, Error, Clone, PartialEq)]
#[error("{message}")]
pub struct KernelError {
    pub message: String,
}

impl KernelError {
    fn new(message: impl Into<String>) -> Self {
        KernelError {
            message: message.into(),
        }
    }

    pub fn from_message(message: impl ToString) -> Self {
        KernelError {
            message: message.to_string(),
        }
    }
}

#[derive(Debug, Clone, Serialize, PartialEq, Eq)]
pub struct Violation {
    pub path: Vec<usize>,
    pub message: String,
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct CheckReport {
    pub violations: Vec<Violation>,
}

impl CheckReport {
    pub fn ok(&self) -> bool {
        self.violations.is_empty()
    }
}

impl fmt::Display for CheckReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.ok() {
            writeln!(f, "ok")
        } else {
            for v in &self.violations {
                writeln!(f, "at {:?}: {}", v.path, v.message)?;
            }
            Ok(())
        }
    }
}

impl Derivation {
    /// Builds and locally validates one node; the conclusion is computed
    /// from the rule payload and the premises.
    pub fn apply(
        defs: &DefTable,
        rule: Rule,
        children: Vec<Derivation>,
    ) -> Result<Derivation, KernelError> {
        let premise_concls: Vec<&Sequent> = children.iter().map(|c| &c.concl).collect();
        let concl = conclusion_of(defs, &rule, &premise_concls).map_err(KernelError::new)?;
        Ok(Derivation {
            rule,
            concl,
            children,
        })
    }

    /// Total, accumulating checker: re-derives every node's conclusion from
    /// its children and reports every mismatch with the node path.
    pub fn check(&self, defs: &DefTable) -> CheckReport {
        let mut report = CheckReport::default();
        self.check_at(defs, &mut Vec::new(), &mut report);
        report
    }

    fn check_at(&self, defs: &DefTable, path: &mut Vec<usize>, report: &mut CheckReport) {
        let premise_concls: Vec<&Sequent> = self.children.iter().map(|c| &c.concl).collect();
        match conclusion_of(defs, &self.rule, &premise_concls) {
            Ok(expected) => {
                if expected != self.concl {
                    report.violations.push(Violation {
                        path: path.clone(),
                        message: format!(
                            "{}: conclusion mismatch: stored {:?}, derived {:?}",
                            self.rule.name(),
                            self.concl,
                            expected
                        ),
                    });
                }
            }
            Err(msg) => report.violations.push(Violation {
                path: path.clone(),
                message: format!("{}: {msg}", self.rule.name()),
            }),
        }
        for (i, c) in self.children.iter().enumerate() {
            path.push(i);
            c.check_at(defs, path, report);
            path.pop();
        }
    }

    /// Height measure: one more than the maximum over the premises; leaves
    /// have height one.
    pub fn height(&self) -> u64 {
        1 + self.children.iter().map(|c| c.height()).max().unwrap_or(0)
    }

    pub fn node_count(&self) -> u64 {
        1 + self.children.iter().map(|c| c.node_count()).sum::<u64>()
    }

    /// Indices of the major premises: the ones sharing the right-hand side
    /// with the conclusion (plus the left premise of coindR).
    pub fn major_premises(&self) -> Vec<usize> {
        if self.children.is_empty() {
            return Vec::new();
        }
        match self.rule {
            Rule::ImpL { .. } | Rule::Multicut { .. } | Rule::IndL { .. } => {
                vec![self.children.len() - 1]
            }
            Rule::CoindR { .. } => vec![0],
            _ => (0..self.children.len()).collect(),
        }
    }

    pub fn node_at(&self, path: &[usize]) -> Option<&Derivation> {
        let mut cur = self;
        for &i in path {
            cur = cur.children.get(i)?;
        }
        Some(cur)
    }

    /// All eigenvariable and parameter names mentioned anywhere in the
    /// tree, for fresh-name supplies.
    pub fn all_names(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_names(&mut out);
        out
    }

    fn collect_names(&self, out: &mut BTreeSet<String>) {
        let touch_term = |t: &Term, out: &mut BTreeSet<String>| {
            out.extend(t.free_vars().into_keys());
            out.extend(t.params().into_iter().map(|p| p.name));
        };
        for f in &self.concl.left {
            touch_term(f, out);
        }
        touch_term(&self.concl.right, out);
        match &self.rule {
            Rule::AllL { witness, .. } | Rule::ExR { witness, .. } => touch_term(witness, out),
            Rule::AllR { eigen } | Rule::ExL { eigen, .. } => {
                out.insert(eigen.0.clone());
            }
            Rule::EqL { mgu: Some(s), .. } => {
                for (x, t) in s.iter() {
                    out.insert(x.clone());
                    touch_term(t, out);
                }
            }
            Rule::IndL { inv, inv_vars, .. } | Rule::CoindR { inv, inv_vars, .. } => {
                touch_term(inv, out);
                out.extend(inv_vars.iter().map(|(n, _)| n.clone()));
            }
            Rule::IndR { param, .. } | Rule::CoindL { param, .. } => {
                out.insert(param.clone());
            }
            Rule::WeakenL { formula, .. } => touch_term(formula, out),
            _ => {}
        }
        for c in &self.children {
            c.collect_names(out);
        }
    }

    pub fn name_supply(&self) -> NameSupply {
        NameSupply::new(self.all_names())
    }
}

impl fmt::Debug for Derivation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fn go(d: &Derivation, depth: usize, f: &mut fmt::Formatter<'_>) -> fmt::Result {
            writeln!(
                f,
                "{:indent$}{} [{:?}]",
                "",
                d.rule.name(),
                d.concl,
                indent = depth * 2
            )?;
            for c in &d.children {
                go(c, depth + 1, f)?;
            }
            Ok(())
        }
        go(self, 0, f)
    }
}

/// Computes the conclusion a rule instance derives from its premises, or an
/// explanation of why the instance is invalid.
fn conclusion_of(
    defs: &DefTable,
    rule: &Rule,
    premises: &[&Sequent],
) -> Result<Sequent, String> {
    let arity_err = |want: &str| {
        Err(format!(
            "expected {want} premise(s), got {}",
            premises.len()
        ))
    };
    match rule {
        Rule::Init { formula } => {
            if !premises.is_empty() {
                return arity_err("0");
            }
            Ok(Sequent::new(vec![formula.clone()], formula.clone()))
        }
        Rule::TopR { left } => {
            if !premises.is_empty() {
                return arity_err("0");
            }
            Ok(Sequent::new(left.clone(), logic::top()))
        }
        Rule::BotL { pos, left, right } => {
            if !premises.is_empty() {
                return arity_err("0");
            }
            match left.get(*pos).and_then(view) {
                Some(FormulaView::Bot) => {}
                _ => return Err(format!("botL: no ⊥ at position {pos}")),
            }
            Ok(Sequent::new(left.clone(), right.clone()))
        }
        Rule::EqR { left, formula } => {
            if !premises.is_empty() {
                return arity_err("0");
            }
            match view(formula) {
                Some(FormulaView::Eq(s, t, _)) if s == t => {}
                Some(FormulaView::Eq(..)) => {
                    return Err("eqR: sides are not syntactically equal".into())
                }
                _ => return Err("eqR: conclusion is not an equality".into()),
            }
            Ok(Sequent::new(left.clone(), formula.clone()))
        }
        Rule::ContractL { keep, dup } => {
            let [p] = premises else { return arity_err("1") };
            if keep == dup || *keep >= p.left.len() || *dup >= p.left.len() {
                return Err("cL: positions out of range".into());
            }
            if p.left[*keep] != p.left[*dup] {
                return Err("cL: contracted formulas differ".into());
            }
            Ok(Sequent::new(p.without(*dup), p.right.clone()))
        }
        Rule::WeakenL { pos, formula } => {
            let [p] = premises else { return arity_err("1") };
            if *pos > p.left.len() {
                return Err("wL: insertion position out of range".into());
            }
            let mut left = p.left.clone();
            left.insert(*pos, formula.clone());
            Ok(Sequent::new(left, p.right.clone()))
        }
        Rule::Multicut { cuts } => {
            if cuts.is_empty() {
                return Err("mc requires at least one cut formula".into());
            }
            if premises.len() != cuts.len() + 1 {
                return arity_err(&format!("{}", cuts.len() + 1));
            }
            if cuts.windows(2).any(|w| w[0] >= w[1]) {
                return Err("mc: cut positions must be strictly increasing".into());
            }
            let last = premises[premises.len() - 1];
            if *cuts.last().unwrap() >= last.left.len() {
                return Err("mc: cut position out of range".into());
            }
            for (i, &pos) in cuts.iter().enumerate() {
                if premises[i].right != last.left[pos] {
                    return Err(format!(
                        "mc: cut formula {i} at position {pos} does not match premise conclusion"
                    ));
                }
            }
            // conclusion: splice each Δᵢ in place of its cut formula
            let mut left = Vec::new();
            for (pos, f) in last.left.iter().enumerate() {
                match cuts.iter().position(|&c| c == pos) {
                    Some(i) => left.extend(premises[i].left.iter().cloned()),
                    None => left.push(f.clone()),
                }
            }
            Ok(Sequent::new(left, last.right.clone()))
        }
        Rule::AndL { pos, conj, side } => {
            let [p] = premises else { return arity_err("1") };
            let (a, b) = match view(conj) {
                Some(FormulaView::And(a, b)) => (a.clone(), b.clone()),
                _ => return Err("andL: principal formula is not a conjunction".into()),
            };
            let want = match side {
                Side::Left => a,
                Side::Right => b,
            };
            if p.left.get(*pos) != Some(&want) {
                return Err("andL: premise does not hold the selected conjunct".into());
            }
            Ok(Sequent::new(p.replaced(*pos, conj.clone()), p.right.clone()))
        }
        Rule::AndR => {
            let [a, b] = premises else { return arity_err("2") };
            if a.left != b.left {
                return Err("andR: premises have different contexts".into());
            }
            Ok(Sequent::new(
                a.left.clone(),
                logic::and(a.right.clone(), b.right.clone()),
            ))
        }
        Rule::OrL { pos } => {
            let [a, b] = premises else { return arity_err("2") };
            if a.right != b.right {
                return Err("orL: premises have different right-hand sides".into());
            }
            if *pos >= a.left.len() || a.left.len() != b.left.len() {
                return Err("orL: position out of range".into());
            }
            for i in 0..a.left.len() {
                if i != *pos && a.left[i] != b.left[i] {
                    return Err("orL: premise contexts differ outside the principal".into());
                }
            }
            let disj = logic::or(a.left[*pos].clone(), b.left[*pos].clone());
            Ok(Sequent::new(a.replaced(*pos, disj), a.right.clone()))
        }
        Rule::OrR { disj, side } => {
            let [p] = premises else { return arity_err("1") };
            let (a, b) = match view(disj) {
                Some(FormulaView::Or(a, b)) => (a.clone(), b.clone()),
                _ => return Err("orR: principal formula is not a disjunction".into()),
            };
            let want = match side {
                Side::Left => a,
                Side::Right => b,
            };
            if p.right != want {
                return Err("orR: premise does not prove the selected disjunct".into());
            }
            Ok(Sequent::new(p.left.clone(), disj.clone()))
        }
        Rule::ImpL { pos } => {
            let [l, r] = premises else { return arity_err("2") };
            if *pos >= r.left.len() {
                return Err("impL: position out of range".into());
            }
            let imp = logic::imp(l.right.clone(), r.left[*pos].clone());
            let mut want_l = r.left.clone();
            want_l.remove(*pos);
            if l.left != want_l {
                return Err(
                    "impL: left premise context must drop exactly the principal formula".into(),
                );
            }
            Ok(Sequent::new(r.replaced(*pos, imp), r.right.clone()))
        }
        Rule::ImpR => {
            let [p] = premises else { return arity_err("1") };
            let Some(ant) = p.left.first().cloned() else {
                return Err("impR: premise context is empty".into());
            };
            let mut left = p.left.clone();
            left.remove(0);
            Ok(Sequent::new(left, logic::imp(ant, p.right.clone())))
        }
        Rule::AllL {
            pos,
            quantified,
            witness,
        } => {
            let [p] = premises else { return arity_err("1") };
            let (tau, abs) = match view(quantified) {
                Some(FormulaView::All(tau, abs)) => (tau, abs.clone()),
                _ => return Err("forallL: principal formula is not universal".into()),
            };
            check_witness(witness, &tau)?;
            let inst = instantiate_abs(&abs, witness).map_err(|e| e.to_string())?;
            if p.left.get(*pos) != Some(&inst) {
                return Err("forallL: premise does not hold the instantiated formula".into());
            }
            Ok(Sequent::new(
                p.replaced(*pos, quantified.clone()),
                p.right.clone(),
            ))
        }
        Rule::AllR { eigen } => {
            let [p] = premises else { return arity_err("1") };
            let (name, tau) = eigen;
            let abs = logic::close_var(&p.right, name, tau);
            let concl = Sequent::new(p.left.clone(), logic::forall(tau, abs));
            if concl.free_vars().contains_key(name) {
                return Err(format!(
                    "forallR: eigenvariable {name} is free in the conclusion"
                ));
            }
            Ok(concl)
        }
        Rule::ExL { pos, eigen } => {
            let [p] = premises else { return arity_err("1") };
            if *pos >= p.left.len() {
                return Err("existsL: position out of range".into());
            }
            let (name, tau) = eigen;
            let abs = logic::close_var(&p.left[*pos], name, tau);
            let concl = Sequent::new(
                p.replaced(*pos, logic::exists(tau, abs)),
                p.right.clone(),
            );
            if concl.free_vars().contains_key(name) {
                return Err(format!(
                    "existsL: eigenvariable {name} is free in the conclusion"
                ));
            }
            Ok(concl)
        }
        Rule::ExR { quantified, witness } => {
            let [p] = premises else { return arity_err("1") };
            let (tau, abs) = match view(quantified) {
                Some(FormulaView::Ex(tau, abs)) => (tau, abs.clone()),
                _ => return Err("existsR: principal formula is not existential".into()),
            };
            check_witness(witness, &tau)?;
            let inst = instantiate_abs(&abs, witness).map_err(|e| e.to_string())?;
            if p.right != inst {
                return Err("existsR: premise does not prove the instantiated formula".into());
            }
            Ok(Sequent::new(p.left.clone(), quantified.clone()))
        }
        Rule::EqL {
            pos,
            left,
            right,
            mgu,
        } => {
            let (s, t) = match left.get(*pos).and_then(view) {
                Some(FormulaView::Eq(s, t, _)) => (s.clone(), t.clone()),
                _ => return Err(format!("eqL: no equality at position {pos}")),
            };
            let computed = crate::term::unify(&s, &t).map_err(|e| e.to_string())?;
            if &computed != mgu {
                return Err(format!(
                    "eqL: stored unifier {mgu:?} differs from computed {computed:?}"
                ));
            }
            let concl = Sequent::new(left.clone(), right.clone());
            match computed {
                None => {
                    if !premises.is_empty() {
                        return Err("eqL: no unifier, so the rule takes no premises".into());
                    }
                }
                Some(sigma) => {
                    let [p] = premises else { return arity_err("1") };
                    let want = Sequent::new(concl.without(*pos), concl.right.clone())
                        .apply_subst(&sigma)?;
                    if *p != &want {
                        return Err(format!(
                            "eqL: premise {:?} is not the unifier instance {:?}",
                            p, want
                        ));
                    }
                }
            }
            Ok(concl)
        }
        Rule::IndL {
            pos,
            principal,
            inv,
            inv_vars,
        } => {
            let [inv_prem, cont] = premises else { return arity_err("2") };
            let (pred, args) = dissect_defined_atom(defs, principal, Flavor::Mu)?;
            check_invariant_shape(defs, &pred, inv, inv_vars)?;
            let ivars: Vec<Term> = inv_vars
                .iter()
                .map(|(n, ty)| Term::var(n.clone(), ty.clone()))
                .collect();
            let body_s = defs.unfold(&pred, inv, &ivars).map_err(|e| e.to_string())?;
            let s_y = apply_inv(inv, &ivars)?;
            let want_inv = Sequent::new(vec![body_s], s_y);
            if *inv_prem != &want_inv {
                return Err(format!(
                    "indL: invariant premise {:?} must be {:?}",
                    inv_prem, want_inv
                ));
            }
            let extra: Vec<String> = want_inv
                .free_vars()
                .into_keys()
                .filter(|v| !inv_vars.iter().any(|(n, _)| n == v))
                .collect();
            if !extra.is_empty() {
                return Err(format!(
                    "indL: invariant premise mentions variables {extra:?} outside its own eigenvariables"
                ));
            }
            let s_t = apply_inv(inv, &args)?;
            if cont.left.get(*pos) != Some(&s_t) {
                return Err("indL: continuation premise does not hold S t⃗ at the principal position".into());
            }
            Ok(Sequent::new(
                cont.replaced(*pos, principal.clone()),
                cont.right.clone(),
            ))
        }
        Rule::IndR { principal, param } => {
            let [p] = premises else { return arity_err("1") };
            let (pred, args) = dissect_defined_atom(defs, principal, Flavor::Mu)?;
            let pty = defs.pred_type(&pred).unwrap().clone();
            let slot = Term::param(ParamRef::new(param.clone(), pred.clone()), pty);
            let unfolded = defs.unfold(&pred, &slot, &args).map_err(|e| e.to_string())?;
            if p.right != unfolded {
                return Err("indR: premise must prove the body instance".into());
            }
            let concl = Sequent::new(p.left.clone(), principal.clone());
            if concl
                .params()
                .iter()
                .any(|q| q.name == *param && q.pred == pred)
            {
                return Err(format!(
                    "indR: parameter {param} already occurs in the conclusion"
                ));
            }
            Ok(concl)
        }
        Rule::IndRp { principal } => {
            let [p] = premises else { return arity_err("1") };
            let (pref, args) = dissect_param_atom(principal)?;
            let clause = defs
                .clause(&pref.pred)
                .ok_or_else(|| format!("indRp: {} is not defined", pref.pred))?;
            if clause.flavor != Flavor::Mu {
                return Err(format!("indRp: {} is not inductively defined", pref.pred));
            }
            let pty = defs.pred_type(&pref.pred).unwrap().clone();
            let slot = Term::param(pref.clone(), pty);
            let unfolded = defs
                .unfold(&pref.pred, &slot, &args)
                .map_err(|e| e.to_string())?;
            if p.right != unfolded {
                return Err("indRp: premise must prove the body instance".into());
            }
            Ok(Sequent::new(p.left.clone(), principal.clone()))
        }
        Rule::CoindL { pos, principal, param } => {
            let [p] = premises else { return arity_err("1") };
            let (pred, args) = dissect_defined_atom(defs, principal, Flavor::Nu)?;
            let pty = defs.pred_type(&pred).unwrap().clone();
            let slot = Term::param(ParamRef::new(param.clone(), pred.clone()), pty);
            let unfolded = defs.unfold(&pred, &slot, &args).map_err(|e| e.to_string())?;
            if p.left.get(*pos) != Some(&unfolded) {
                return Err("coindL: premise must hold the body instance".into());
            }
            let concl = Sequent::new(p.replaced(*pos, principal.clone()), p.right.clone());
            if concl
                .params()
                .iter()
                .any(|q| q.name == *param && q.pred == pred)
            {
                return Err(format!(
                    "coindL: parameter {param} already occurs in the conclusion"
                ));
            }
            Ok(concl)
        }
        Rule::CoindLp { pos, principal } => {
            let [p] = premises else { return arity_err("1") };
            let (pref, args) = dissect_param_atom(principal)?;
            let clause = defs
                .clause(&pref.pred)
                .ok_or_else(|| format!("coindLp: {} is not defined", pref.pred))?;
            if clause.flavor != Flavor::Nu {
                return Err(format!(
                    "coindLp: {} is not co-inductively defined",
                    pref.pred
                ));
            }
            let pty = defs.pred_type(&pref.pred).unwrap().clone();
            let slot = Term::param(pref.clone(), pty);
            let unfolded = defs
                .unfold(&pref.pred, &slot, &args)
                .map_err(|e| e.to_string())?;
            if p.left.get(*pos) != Some(&unfolded) {
                return Err("coindLp: premise must hold the body instance".into());
            }
            Ok(Sequent::new(p.replaced(*pos, principal.clone()), p.right.clone()))
        }
        Rule::CoindR {
            principal,
            inv,
            inv_vars,
        } => {
            let [cont, inv_prem] = premises else { return arity_err("2") };
            let (pred, args) = dissect_defined_atom(defs, principal, Flavor::Nu)?;
            check_invariant_shape(defs, &pred, inv, inv_vars)?;
            let ivars: Vec<Term> = inv_vars
                .iter()
                .map(|(n, ty)| Term::var(n.clone(), ty.clone()))
                .collect();
            let s_y = apply_inv(inv, &ivars)?;
            let body_s = defs.unfold(&pred, inv, &ivars).map_err(|e| e.to_string())?;
            let want_inv = Sequent::new(vec![s_y], body_s);
            if *inv_prem != &want_inv {
                return Err(format!(
                    "coindR: invariant premise {:?} must be {:?}",
                    inv_prem, want_inv
                ));
            }
            let extra: Vec<String> = want_inv
                .free_vars()
                .into_keys()
                .filter(|v| !inv_vars.iter().any(|(n, _)| n == v))
                .collect();
            if !extra.is_empty() {
                return Err(format!(
                    "coindR: invariant premise mentions variables {extra:?} outside its own eigenvariables"
                ));
            }
            let s_t = apply_inv(inv, &args)?;
            if cont.right != s_t {
                return Err("coindR: left premise must prove S t⃗".into());
            }
            Ok(Sequent::new(cont.left.clone(), principal.clone()))
        }
        Rule::Subst => {
            let [p] = premises else { return arity_err("1") };
            Ok((*p).clone())
        }
    }
}

fn check_witness(witness: &Term, tau: &SimpleType) -> Result<(), String> {
    let wty = witness
        .infer_type(&mut Vec::new())
        .map_err(|e| format!("ill-typed witness: {e}"))?;
    if &wty != tau {
        return Err(format!(
            "ill-typed witness: has type {wty}, quantifier expects {tau}"
        ));
    }
    Ok(())
}

fn dissect_defined_atom(
    defs: &DefTable,
    f: &Term,
    want: Flavor,
) -> Result<(String, Vec<Term>), String> {
    match view(f) {
        Some(FormulaView::Pred(p, args)) => {
            let clause = defs
                .clause(p)
                .ok_or_else(|| format!("{p} is not a defined predicate"))?;
            if clause.flavor != want {
                return Err(format!(
                    "{p} is {}-defined, rule expects {}",
                    clause.flavor, want
                ));
            }
            Ok((p.to_string(), args.into_iter().cloned().collect()))
        }
        _ => Err("principal formula is not a predicate atom".into()),
    }
}

fn dissect_param_atom(f: &Term) -> Result<(ParamRef, Vec<Term>), String> {
    match view(f) {
        Some(FormulaView::ParamAtom(p, args)) => {
            Ok((p.clone(), args.into_iter().cloned().collect()))
        }
        _ => Err("principal formula is not a parameter atom".into()),
    }
}

fn check_invariant_shape(
    defs: &DefTable,
    pred: &str,
    inv: &Term,
    inv_vars: &[(String, SimpleType)],
) -> Result<(), String> {
    let pty = defs
        .pred_type(pred)
        .ok_or_else(|| format!("{pred} has no predicate type"))?;
    let ity = inv
        .infer_type(&mut Vec::new())
        .map_err(|e| format!("ill-typed invariant: {e}"))?;
    if &ity != pty {
        return Err(format!(
            "invariant has type {ity}, predicate {pred} has type {pty}"
        ));
    }
    if !inv.is_closed() {
        return Err("invariant must be a closed term".into());
    }
    let want_tys = pty.args();
    if inv_vars.len() != want_tys.len() {
        return Err(format!(
            "invariant takes {} variables, got {}",
            want_tys.len(),
            inv_vars.len()
        ));
    }
    let mut seen = BTreeSet::new();
    for ((n, ty), want) in inv_vars.iter().zip(want_tys) {
        if ty != want {
            return Err(format!("invariant variable {n} has type {ty}, expected {want}"));
        }
        if !seen.insert(n.clone()) {
            return Err(format!("repeated invariant variable {n}"));
        }
    }
    Ok(())
}

fn apply_inv(inv: &Term, args: &[Term]) -> Result<Term, String> {
    Term::apps(inv.clone(), args.iter().cloned())
        .canonical(&SimpleType::o())
        .map_err(|e| e.to_string())
}

/// The derived right-unfolding for stratified inductive predicates: given a
/// proof of `Γ ⊢ B p t⃗`, produces a checker-valid proof of `Γ ⊢ p t⃗` by
/// cutting against a scaffold that walks the body's connectives and closes
/// each recursive leaf with the induction rule, using the parameter itself
/// as the invariant.
pub fn unfold_right(
    defs: &DefTable,
    premise: Derivation,
    pred: &str,
    args: &[Term],
) -> Result<Derivation, KernelError> {
    let clause = defs
        .clause(pred)
        .ok_or_else(|| KernelError::new(format!("{pred} is not defined")))?;
    if clause.flavor != Flavor::Mu {
        return Err(KernelError::new(format!(
            "{pred} is not inductively defined"
        )));
    }
    if !defs.is_stratified(pred) {
        return Err(KernelError::new(format!("{pred} is not stratified")));
    }
    let pty = defs
        .pred_type(pred)
        .ok_or_else(|| KernelError::new(format!("{pred} has no predicate type")))?
        .clone();
    let p_const = Term::cnst(pred, pty.clone());
    let unfolded = defs
        .unfold(pred, &p_const, args)
        .map_err(|e| KernelError::new(e.to_string()))?;
    if premise.concl.right != unfolded {
        return Err(KernelError::new(format!(
            "premise proves {:?}, expected the unfolded body {:?}",
            premise.concl.right, unfolded
        )));
    }

    let mut supply = premise.name_supply();
    for a in args {
        for v in a.free_vars().into_keys() {
            supply.reserve(&v);
        }
        for p in a.params() {
            supply.reserve(&p.name);
        }
    }
    let param_name = supply.fresh("#X");
    let param = ParamRef::new(param_name.clone(), pred);
    let slot = Term::param(param.clone(), pty.clone());
    let rhs = defs
        .unfold(pred, &slot, args)
        .map_err(|e| KernelError::new(e.to_string()))?;

    let principal = Term::apps(p_const.clone(), args.iter().cloned())
        .canonical(&SimpleType::o())
        .map_err(|e| KernelError::new(e.to_string()))?;

    let dots = mono(defs, &mut supply, &unfolded, &rhs, pred, &param, &pty)?;
    let ir = Derivation::apply(
        defs,
        Rule::IndR {
            principal: principal.clone(),
            param: param_name,
        },
        vec![dots],
    )?;
    Derivation::apply(defs, Rule::Multicut { cuts: vec![0] }, vec![premise, ir])
}

/// Derives `[L] ⊢ R` where `L` and `R` are instances of the same stratified
/// body differing only at the recursive-slot atoms (`p u⃗` on the left,
/// `X^p u⃗` on the right).
fn mono(
    defs: &DefTable,
    supply: &mut NameSupply,
    lhs: &Term,
    rhs: &Term,
    pred: &str,
    param: &ParamRef,
    pty: &SimpleType,
) -> Result<Derivation, KernelError> {
    if lhs == rhs {
        return Derivation::apply(defs, Rule::Init { formula: lhs.clone() }, vec![]);
    }
    let lv = view(lhs);
    let rv = view(rhs);
    match (lv, rv) {
        (Some(FormulaView::Pred(p, uargs)), Some(FormulaView::ParamAtom(x, _)))
            if p == pred && x == param =>
        {
            let uargs: Vec<Term> = uargs.into_iter().cloned().collect();
            let inv = Term::param(param.clone(), pty.clone());
            let inv_vars: Vec<(String, SimpleType)> = pty
                .args()
                .iter()
                .map(|ty| (supply.fresh("y"), (*ty).clone()))
                .collect();
            let yvars: Vec<Term> = inv_vars
                .iter()
                .map(|(n, ty)| Term::var(n.clone(), ty.clone()))
                .collect();
            let body_x = defs
                .unfold(pred, &inv, &yvars)
                .map_err(|e| KernelError::new(e.to_string()))?;
            let xp_y = apply_inv(&inv, &yvars).map_err(KernelError::new)?;
            let inv_prem = Derivation::apply(
                defs,
                Rule::IndRp {
                    principal: xp_y,
                },
                vec![Derivation::apply(
                    defs,
                    Rule::Init { formula: body_x },
                    vec![],
                )?],
            )?;
            let xp_u = apply_inv(&inv, &uargs).map_err(KernelError::new)?;
            let cont = Derivation::apply(defs, Rule::Init { formula: xp_u }, vec![])?;
            Derivation::apply(
                defs,
                Rule::IndL {
                    pos: 0,
                    principal: lhs.clone(),
                    inv,
                    inv_vars,
                },
                vec![inv_prem, cont],
            )
        }
        (Some(FormulaView::And(l1, l2)), Some(FormulaView::And(r1, r2))) => {
            let (l1, l2, r1, r2) = (l1.clone(), l2.clone(), r1.clone(), r2.clone());
            let left = Derivation::apply(
                defs,
                Rule::AndL {
                    pos: 0,
                    conj: lhs.clone(),
                    side: Side::Left,
                },
                vec![mono(defs, supply, &l1, &r1, pred, param, pty)?],
            )?;
            let right = Derivation::apply(
                defs,
                Rule::AndL {
                    pos: 0,
                    conj: lhs.clone(),
                    side: Side::Right,
                },
                vec![mono(defs, supply, &l2, &r2, pred, param, pty)?],
            )?;
            Derivation::apply(defs, Rule::AndR, vec![left, right])
        }
        (Some(FormulaView::Or(l1, l2)), Some(FormulaView::Or(r1, r2))) => {
            let (l1, l2, r1, r2) = (l1.clone(), l2.clone(), r1.clone(), r2.clone());
            let a = Derivation::apply(
                defs,
                Rule::OrR {
                    disj: rhs.clone(),
                    side: Side::Left,
                },
                vec![mono(defs, supply, &l1, &r1, pred, param, pty)?],
            )?;
            let b = Derivation::apply(
                defs,
                Rule::OrR {
                    disj: rhs.clone(),
                    side: Side::Right,
                },
                vec![mono(defs, supply, &l2, &r2, pred, param, pty)?],
            )?;
            Derivation::apply(defs, Rule::OrL { pos: 0 }, vec![a, b])
        }
        (Some(FormulaView::Imp(la, lb)), Some(FormulaView::Imp(ra, rb))) => {
            if la != ra {
                return Err(KernelError::new(
                    "unfolding scaffold: antecedents differ under an implication",
                ));
            }
            let (la, lb, rb) = (la.clone(), lb.clone(), rb.clone());
            let left_prem =
                Derivation::apply(defs, Rule::Init { formula: la.clone() }, vec![])?;
            let inner = mono(defs, supply, &lb, &rb, pred, param, pty)?;
            let weakened = Derivation::apply(
                defs,
                Rule::WeakenL {
                    pos: 0,
                    formula: la.clone(),
                },
                vec![inner],
            )?;
            let impl_left = Derivation::apply(
                defs,
                Rule::ImpL { pos: 1 },
                vec![left_prem, weakened],
            )?;
            Derivation::apply(defs, Rule::ImpR, vec![impl_left])
        }
        (Some(FormulaView::All(ltau, labs)), Some(FormulaView::All(_, rabs))) => {
            let (labs, rabs) = (labs.clone(), rabs.clone());
            let y = supply.fresh("y");
            let lopen = logic::open_abs(&labs, &y, &ltau)
                .map_err(|e| KernelError::new(e.to_string()))?;
            let ropen = logic::open_abs(&rabs, &y, &ltau)
                .map_err(|e| KernelError::new(e.to_string()))?;
            let inner = mono(defs, supply, &lopen, &ropen, pred, param, pty)?;
            let al = Derivation::apply(
                defs,
                Rule::AllL {
                    pos: 0,
                    quantified: lhs.clone(),
                    witness: Term::var(y.clone(), ltau.clone()),
                },
                vec![inner],
            )?;
            Derivation::apply(defs, Rule::AllR { eigen: (y, ltau) }, vec![al])
        }
        (Some(FormulaView::Ex(ltau, labs)), Some(FormulaView::Ex(_, rabs))) => {
            let (labs, rabs) = (labs.clone(), rabs.clone());
            let y = supply.fresh("y");
            let lopen = logic::open_abs(&labs, &y, &ltau)
                .map_err(|e| KernelError::new(e.to_string()))?;
            let ropen = logic::open_abs(&rabs, &y, &ltau)
                .map_err(|e| KernelError::new(e.to_string()))?;
            let inner = mono(defs, supply, &lopen, &ropen, pred, param, pty)?;
            let er = Derivation::apply(
                defs,
                Rule::ExR {
                    quantified: rhs.clone(),
                    witness: Term::var(y.clone(), ltau.clone()),
                },
                vec![inner],
            )?;
            Derivation::apply(defs, Rule::ExL { pos: 0, eigen: (y, ltau) }, vec![er])
        }
        _ => Err(KernelError::new(format!(
            "unfolding scaffold: mismatched body instances {lhs:?} vs {rhs:?}"
        ))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testutil as tu;

    #[test]
    fn freeness_corpus_checks() {
        let defs = tu::table();
        for d in [
            tu::freeness_clash(&defs),
            tu::freeness_occurs(&defs),
            tu::freeness_injectivity(&defs),
        ] {
            tu::must_check(&defs, &d);
        }
    }

    #[test]
    fn freeness_clash_height_is_three() {
        let defs = tu::table();
        assert_eq!(tu::freeness_clash(&defs).height(), 3);
    }

    #[test]
    fn init_leaf_height_is_one() {
        let defs = tu::table();
        let d = tu::init(&defs, logic::top());
        assert_eq!(d.height(), 1);
        assert!(d.check(&defs).ok());
    }

    #[test]
    fn ill_typed_witness_is_rejected() {
        let defs = tu::table();
        // exists x:nt, x = x  instantiated with a witness of the wrong type
        let quantified = logic::exists(
            &tu::nt(),
            Term::lam(tu::nt(), tu::eqn(Term::Bound(0), Term::Bound(0))),
        );
        let refl = tu::eq_r(&defs, vec![], tu::z());
        let bad = Derivation::apply(
            &defs,
            Rule::ExR {
                quantified,
                witness: Term::cnst("s", SimpleType::arrow(tu::nt(), tu::nt())),
            },
            vec![refl],
        );
        let msg = bad.unwrap_err().message;
        assert!(msg.contains("ill-typed witness"), "{msg}");
    }

    #[test]
    fn corrupted_witness_is_reported_by_check() {
        let defs = tu::table();
        let quantified = logic::exists(
            &tu::nt(),
            Term::lam(tu::nt(), tu::eqn(Term::Bound(0), Term::Bound(0))),
        );
        let refl = tu::eq_r(&defs, vec![], tu::z());
        let mut d = Derivation::apply(
            &defs,
            Rule::ExR {
                quantified,
                witness: tu::z(),
            },
            vec![refl],
        )
        .unwrap();
        // corrupt the payload after construction
        if let Rule::ExR { witness, .. } = &mut d.rule {
            *witness = tu::s(tu::z());
        }
        let report = d.check(&defs);
        assert!(!report.ok());
    }

    #[test]
    fn invariant_mismatch_is_rejected() {
        let defs = tu::table();
        // indL on ev z with invariant \x. true, but a wrong invariant premise
        let inv = Term::lam(tu::nt(), logic::top());
        let good_inv_prem = {
            let body = defs.unfold("ev", &inv, &[tu::v("y0")]).unwrap();
            tu::top_r(&defs, vec![body])
        };
        let cont = tu::top_r(&defs, vec![logic::top()]);
        let good = Derivation::apply(
            &defs,
            Rule::IndL {
                pos: 0,
                principal: tu::ev(tu::z()),
                inv: inv.clone(),
                inv_vars: vec![("y0".into(), tu::nt())],
            },
            vec![good_inv_prem.clone(), cont.clone()],
        )
        .unwrap();
        tu::must_check(&defs, &good);

        // wrong invariant premise: proves [true] |- true instead
        let bad_inv_prem = tu::top_r(&defs, vec![logic::top()]);
        let bad = Derivation::apply(
            &defs,
            Rule::IndL {
                pos: 0,
                principal: tu::ev(tu::z()),
                inv,
                inv_vars: vec![("y0".into(), tu::nt())],
            },
            vec![bad_inv_prem, cont],
        );
        let msg = bad.unwrap_err().message;
        assert!(msg.contains("invariant premise"), "{msg}");
    }

    #[test]
    fn zero_cut_multicut_is_rejected() {
        let defs = tu::table();
        let top = tu::top_r(&defs, vec![]);
        let err = Derivation::apply(&defs, Rule::Multicut { cuts: vec![] }, vec![top]);
        assert!(err.is_err());
    }

    #[test]
    fn eq_r_constructs_reflexive_conclusions_only() {
        let defs = tu::table();
        let err = Derivation::apply(
            &defs,
            Rule::EqR {
                left: vec![],
                formula: tu::eqn(tu::z(), tu::s(tu::z())),
            },
            vec![],
        );
        assert!(err.is_err());
        let ok = tu::eq_r(&defs, vec![], tu::z());
        assert_eq!(ok.concl, Sequent::entails(tu::eqn(tu::z(), tu::z())));
    }

    #[test]
    fn major_premise_classification() {
        let defs = tu::table();
        // impL: two premises, major is the rightmost
        let l = tu::top_r(&defs, vec![]);
        let r = tu::top_r(&defs, vec![logic::top()]);
        let imp = Derivation::apply(&defs, Rule::ImpL { pos: 0 }, vec![l, r]).unwrap();
        assert_eq!(imp.major_premises(), vec![1]);

        // andR: all premises are major
        let a = tu::top_r(&defs, vec![]);
        let b = tu::top_r(&defs, vec![]);
        let and = Derivation::apply(&defs, Rule::AndR, vec![a, b]).unwrap();
        assert_eq!(and.major_premises(), vec![0, 1]);

        // coindR: left premise only
        let inv = Term::lam(tu::nt(), tu::eqn(Term::Bound(0), tu::z()));
        let cont = tu::eq_r(&defs, vec![], tu::z());
        let inv_prem = {
            let s_y = tu::eqn(tu::v("y0"), tu::z());
            let body = defs.unfold("conat", &inv, &[tu::v("y0")]).unwrap();
            let refl = tu::eq_r(&defs, vec![], tu::z());
            let eql = Derivation::apply(
                &defs,
                Rule::EqL {
                    pos: 0,
                    left: vec![s_y.clone()],
                    right: body.clone(),
                    mgu: crate::term::unify(&tu::v("y0"), &tu::z()).unwrap(),
                },
                vec![Derivation::apply(
                    &defs,
                    Rule::OrR {
                        disj: body
                            .apply_subst(&Subst::singleton("y0", tu::z()))
                            .unwrap(),
                        side: Side::Left,
                    },
                    vec![refl],
                )
                .unwrap()],
            )
            .unwrap();
            eql
        };
        let cir = Derivation::apply(
            &defs,
            Rule::CoindR {
                principal: tu::conat(tu::z()),
                inv,
                inv_vars: vec![("y0".into(), tu::nt())],
            },
            vec![cont, inv_prem],
        )
        .unwrap();
        tu::must_check(&defs, &cir);
        assert_eq!(cir.major_premises(), vec![0]);
    }

    #[test]
    fn unfold_right_builds_ev_z() {
        let defs = tu::table();
        let body = tu::ev_body_proof_z(&defs);
        let d = unfold_right(&defs, body, "ev", &[tu::z()]).unwrap();
        assert_eq!(d.concl, Sequent::entails(tu::ev(tu::z())));
        tu::must_check(&defs, &d);
    }

    #[test]
    fn unfold_right_twice_builds_ev_ssz() {
        let defs = tu::table();
        let ev_z = unfold_right(&defs, tu::ev_body_proof_z(&defs), "ev", &[tu::z()]).unwrap();
        let ssz = tu::num(2);
        let body = defs
            .unfold("ev", &Term::cnst("ev", tu::pred_ty1()), &[ssz.clone()])
            .unwrap();
        let (fst, snd) = match view(&body) {
            Some(FormulaView::Or(a, b)) => (a.clone(), b.clone()),
            _ => panic!("body of ev is a disjunction"),
        };
        let _ = fst;
        let (tau, abs) = match view(&snd) {
            Some(FormulaView::Ex(tau, abs)) => (tau, abs.clone()),
            _ => panic!("second disjunct is existential"),
        };
        let inst = instantiate_abs(&abs, &tu::z()).unwrap();
        let refl = tu::eq_r(&defs, vec![], ssz.clone());
        let pair = Derivation::apply(&defs, Rule::AndR, vec![refl, ev_z]).unwrap();
        assert_eq!(pair.concl.right, inst);
        let exr = Derivation::apply(
            &defs,
            Rule::ExR {
                quantified: snd,
                witness: tu::z(),
            },
            vec![pair],
        )
        .unwrap();
        let _ = tau;
        let orr = Derivation::apply(
            &defs,
            Rule::OrR {
                disj: body,
                side: Side::Right,
            },
            vec![exr],
        )
        .unwrap();
        let d = unfold_right(&defs, orr, "ev", &[ssz.clone()]).unwrap();
        assert_eq!(d.concl, Sequent::entails(tu::ev(ssz)));
        tu::must_check(&defs, &d);
    }

    #[test]
    fn unfold_right_rejects_non_stratified() {
        let defs = tu::non_monotone_p_table();
        let top = tu::top_r(&defs, vec![]);
        let err = unfold_right(&defs, top, "p", &[]).unwrap_err();
        assert!(err.message.contains("not stratified"), "{}", err.message);
    }

    #[test]
    fn apply_then_check_roundtrip() {
        let defs = tu::table();
        let d = tu::ev_z_direct(&defs);
        tu::must_check(&defs, &d);
        assert_eq!(d.concl, Sequent::entails(tu::ev(tu::z())));
    }

    #[test]
    fn multiset_equality_ignores_order() {
        let a = Sequent::new(vec![logic::top(), logic::bot()], logic::top());
        let b = Sequent::new(vec![logic::bot(), logic::top()], logic::top());
        assert!(a.multiset_eq(&b));
        assert_ne!(a, b);
    }
}
