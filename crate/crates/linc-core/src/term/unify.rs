//! Unification for higher-order patterns.
//!
//! Free eigenvariables are the unification variables; constants, parameters
//! and λ-bound variables are rigid. Within the pattern fragment (every
//! occurrence of a unification variable is applied to distinct bound
//! variables) a most general unifier exists whenever any unifier does, so
//! the result is a single substitution rather than a set.

use std::collections::{BTreeMap, BTreeSet};

use super::{NameSupply, SimpleType, Subst, Term, TermError};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum UnifyError {
    #[error("unification outside the higher-order pattern fragment: {0}")]
    NotAPattern(String),
    #[error("ill-typed unification problem: {0}")]
    IllTyped(String),
}

const LOCAL_PREFIX: &str = "#l";
const META_PREFIX: &str = "#g";

/// Most general unifier of two canonical terms of the same type.
///
/// `Ok(Some(mgu))` gives the idempotent MGU, `Ok(None)` means no unifier
/// exists (clash or occurs-check). Fresh variables introduced by pruning or
/// flex-flex problems are named deterministically from the input terms.
pub fn unify(s: &Term, t: &Term) -> Result<Option<Subst>, UnifyError> {
    let sty = s
        .infer_type(&mut Vec::new())
        .map_err(|e| UnifyError::IllTyped(e.to_string()))?;
    let tty = t
        .infer_type(&mut Vec::new())
        .map_err(|e| UnifyError::IllTyped(e.to_string()))?;
    if sty != tty {
        return Err(UnifyError::IllTyped(format!(
            "cannot unify terms of types {sty} and {tty}"
        )));
    }
    let mut used: BTreeSet<String> = s.free_vars().into_keys().collect();
    used.extend(t.free_vars().into_keys());
    let mut st = Solver {
        sigma: Subst::identity(),
        locals: BTreeMap::new(),
        supply: NameSupply::new(used),
        work: vec![(s.clone(), t.clone())],
    };
    match st.run()? {
        true => Ok(Some(st.sigma)),
        false => Ok(None),
    }
}

struct Solver {
    sigma: Subst,
    /// universally scoped variables introduced when stripping binders
    locals: BTreeMap<String, SimpleType>,
    supply: NameSupply,
    work: Vec<(Term, Term)>,
}

enum Outcome {
    Solved,
    NoUnifier,
    /// a pruning binding was produced; retry the constraint afterwards
    Retry(Term, Term),
}

impl Solver {
    fn run(&mut self) -> Result<bool, UnifyError> {
        while let Some((s, t)) = self.work.pop() {
            match self.solve(s, t)? {
                Outcome::Solved => {}
                Outcome::NoUnifier => return Ok(false),
                Outcome::Retry(s, t) => self.work.push((s, t)),
            }
        }
        Ok(true)
    }

    fn is_flex(&self, name: &str) -> bool {
        !self.locals.contains_key(name)
    }

    fn solve(&mut self, s: Term, t: Term) -> Result<Outcome, UnifyError> {
        if s == t {
            return Ok(Outcome::Solved);
        }
        // strip common binders with fresh universally scoped variables
        let (mut s, mut t) = (s, t);
        while let (Term::Lam(ty, sb), Term::Lam(_, tb)) = (&s, &t) {
            let local = self.supply.fresh(LOCAL_PREFIX);
            self.locals.insert(local.clone(), ty.clone());
            let v = Term::var(local, ty.clone());
            let (ns, nt) = (sb.subst_bound(0, &v), tb.subst_bound(0, &v));
            s = ns;
            t = nt;
        }
        if s == t {
            return Ok(Outcome::Solved);
        }

        let (sh, sargs) = spine_owned(&s);
        let (th, targs) = spine_owned(&t);
        let s_flex = matches!(&sh, Term::Var(x, _) if self.is_flex(x));
        let t_flex = matches!(&th, Term::Var(x, _) if self.is_flex(x));

        match (s_flex, t_flex) {
            (false, false) => {
                if sh != th {
                    return Ok(Outcome::NoUnifier);
                }
                debug_assert_eq!(sargs.len(), targs.len());
                for (a, b) in sargs.into_iter().zip(targs) {
                    self.work.push((a, b));
                }
                Ok(Outcome::Solved)
            }
            (true, false) => self.flex_rigid(sh, sargs, t),
            (false, true) => self.flex_rigid(th, targs, s),
            (true, true) => self.flex_flex(sh, sargs, th, targs),
        }
    }

    /// `F ls = rhs` with `F` flex and `rhs` rigid-headed.
    fn flex_rigid(&mut self, head: Term, args: Vec<Term>, rhs: Term) -> Result<Outcome, UnifyError> {
        let (fname, fty) = match &head {
            Term::Var(x, ty) => (x.clone(), ty.clone()),
            _ => unreachable!(),
        };
        let allowed = self.pattern_args(&fname, &args)?;
        let k = allowed.len() as u32;
        let mut pruning: Option<(String, Term)> = None;
        let body = self.abstract_rhs(&rhs, &fname, &allowed, k, 0, &mut pruning)?;
        if let Some((g, gsol)) = pruning {
            // apply the pruning substitution and retry this pair
            let lhs = Term::apps(head, args);
            let (lhs, rhs) = (self.bind(&g, gsol, lhs)?, self.latest(rhs)?);
            return Ok(Outcome::Retry(lhs, rhs));
        }
        let body = match body {
            Some(b) => b,
            None => return Ok(Outcome::NoUnifier),
        };
        let sol = lambdas(&fty, k, body);
        let sol = sol
            .canonical(&fty)
            .map_err(|e| UnifyError::IllTyped(e.to_string()))?;
        self.add_binding(&fname, sol)?;
        Ok(Outcome::Solved)
    }

    fn flex_flex(
        &mut self,
        sh: Term,
        sargs: Vec<Term>,
        th: Term,
        targs: Vec<Term>,
    ) -> Result<Outcome, UnifyError> {
        let (f, fty) = match &sh {
            Term::Var(x, ty) => (x.clone(), ty.clone()),
            _ => unreachable!(),
        };
        let (g, gty) = match &th {
            Term::Var(x, ty) => (x.clone(), ty.clone()),
            _ => unreachable!(),
        };
        let largs = self.pattern_args(&f, &sargs)?;
        let rargs = self.pattern_args(&g, &targs)?;
        let k = largs.len() as u32;
        let target = fty.target().clone();
        if f == g {
            // F l1..lk = F r1..rk: keep the positions that agree
            let kept: Vec<usize> = (0..largs.len()).filter(|&i| largs[i] == rargs[i]).collect();
            if kept.len() == largs.len() {
                return Ok(Outcome::Solved);
            }
            let kept_tys: Vec<SimpleType> =
                kept.iter().map(|&i| largs[i].1.clone()).collect();
            let hname = self.supply.fresh(META_PREFIX);
            let hty = SimpleType::fun(&kept_tys, target);
            let happ = Term::apps(
                Term::var(hname, hty),
                kept.iter().map(|&i| Term::Bound(k - 1 - i as u32)),
            );
            let sol = lambdas(&fty, k, happ)
                .canonical(&fty)
                .map_err(|e| UnifyError::IllTyped(e.to_string()))?;
            self.add_binding(&f, sol)?;
            return Ok(Outcome::Solved);
        }
        // F l1..lk = G r1..rm: both collapse onto the common variables
        let m = rargs.len() as u32;
        let largs_set: BTreeSet<&String> = largs.iter().map(|(n, _)| n).collect();
        let rargs_set: BTreeSet<&String> = rargs.iter().map(|(n, _)| n).collect();
        if rargs_set.is_subset(&largs_set) {
            // G's arguments all pass through F: bind F := \l⃗. G r⃗ directly
            let lpos: BTreeMap<&String, u32> = largs
                .iter()
                .enumerate()
                .map(|(i, (n, _))| (n, i as u32))
                .collect();
            let body = Term::apps(
                Term::var(g.clone(), gty.clone()),
                rargs.iter().map(|(n, _)| Term::Bound(k - 1 - lpos[n])),
            );
            let sol = lambdas(&fty, k, body)
                .canonical(&fty)
                .map_err(|e| UnifyError::IllTyped(e.to_string()))?;
            self.add_binding(&f, sol)?;
            return Ok(Outcome::Solved);
        }
        if largs_set.is_subset(&rargs_set) {
            let rpos: BTreeMap<&String, u32> = rargs
                .iter()
                .enumerate()
                .map(|(i, (n, _))| (n, i as u32))
                .collect();
            let body = Term::apps(
                Term::var(f.clone(), fty.clone()),
                largs.iter().map(|(n, _)| Term::Bound(m - 1 - rpos[n])),
            );
            let sol = lambdas(&gty, m, body)
                .canonical(&gty)
                .map_err(|e| UnifyError::IllTyped(e.to_string()))?;
            self.add_binding(&g, sol)?;
            return Ok(Outcome::Solved);
        }
        let rpos: BTreeMap<&String, u32> = rargs
            .iter()
            .enumerate()
            .map(|(i, (n, _))| (n, i as u32))
            .collect();
        let mut common: Vec<(u32, u32, SimpleType)> = Vec::new();
        for (i, (n, ty)) in largs.iter().enumerate() {
            if let Some(&j) = rpos.get(n) {
                common.push((i as u32, j, ty.clone()));
            }
        }
        let hname = self.supply.fresh(META_PREFIX);
        let hty = SimpleType::fun(
            &common.iter().map(|(_, _, ty)| ty.clone()).collect::<Vec<_>>(),
            target,
        );
        let h = Term::var(hname, hty);
        let fsol = Term::apps(h.clone(), common.iter().map(|&(i, _, _)| Term::Bound(k - 1 - i)));
        let gsol = Term::apps(h, common.iter().map(|&(_, j, _)| Term::Bound(m - 1 - j)));
        let fsol = lambdas(&fty, k, fsol)
            .canonical(&fty)
            .map_err(|e| UnifyError::IllTyped(e.to_string()))?;
        let gsol = lambdas(&gty, m, gsol)
            .canonical(&gty)
            .map_err(|e| UnifyError::IllTyped(e.to_string()))?;
        self.add_binding(&f, fsol)?;
        self.add_binding(&g, gsol)?;
        Ok(Outcome::Solved)
    }

    /// Requires each argument to be a distinct universally scoped variable
    /// and returns them with their types.
    fn pattern_args(
        &self,
        head: &str,
        args: &[Term],
    ) -> Result<Vec<(String, SimpleType)>, UnifyError> {
        let mut seen = BTreeSet::new();
        let mut out = Vec::with_capacity(args.len());
        for a in args {
            match a.strip_eta() {
                Term::Var(x, ty) if !self.is_flex(&x) => {
                    if !seen.insert(x.clone()) {
                        return Err(UnifyError::NotAPattern(format!(
                            "variable {head} applied to repeated bound variable {x}"
                        )));
                    }
                    out.push((x, ty));
                }
                other => {
                    return Err(UnifyError::NotAPattern(format!(
                        "variable {head} applied to non-bound-variable argument {other:?}"
                    )))
                }
            }
        }
        Ok(out)
    }

    /// Turns `rhs` into the body of the solution for `F`, mapping the allowed
    /// locals to the new binders. Returns `None` on occurs-check failure or a
    /// rigid occurrence of a disallowed variable. When a flex subterm needs
    /// pruning, records the pruning binding instead and leaves the body
    /// unfinished.
    fn abstract_rhs(
        &mut self,
        t: &Term,
        fname: &str,
        allowed: &[(String, SimpleType)],
        k: u32,
        depth: u32,
        pruning: &mut Option<(String, Term)>,
    ) -> Result<Option<Term>, UnifyError> {
        if pruning.is_some() {
            return Ok(None);
        }
        match t {
            Term::Bound(_) | Term::Const(..) | Term::Param(..) => Ok(Some(t.clone())),
            Term::Var(x, ty) => {
                if x == fname {
                    return Ok(None); // occurs check
                }
                if self.is_flex(x) {
                    return Ok(Some(t.clone()));
                }
                match allowed.iter().position(|(n, _)| n == x) {
                    Some(i) => Ok(Some(Term::Bound(depth + k - 1 - i as u32))),
                    None => {
                        let _ = ty;
                        Ok(None) // rigid occurrence of an out-of-scope variable
                    }
                }
            }
            Term::Lam(ty, b) => {
                match self.abstract_rhs(b, fname, allowed, k, depth + 1, pruning)? {
                    Some(b) => Ok(Some(Term::lam(ty.clone(), b))),
                    None => Ok(None),
                }
            }
            Term::App(..) => {
                let (head, args) = spine_owned(t);
                if let Term::Var(g, gty) = &head {
                    if g == fname {
                        return Ok(None); // occurs check
                    }
                    if self.is_flex(g) {
                        return self.abstract_flex_spine(
                            g, gty, &args, fname, allowed, k, depth, pruning,
                        );
                    }
                }
                let head = match self.abstract_rhs(&head, fname, allowed, k, depth, pruning)? {
                    Some(h) => h,
                    None => return Ok(None),
                };
                let mut out = head;
                for a in &args {
                    match self.abstract_rhs(a, fname, allowed, k, depth, pruning)? {
                        Some(a) => out = Term::app(out, a),
                        None => return Ok(None),
                    }
                }
                Ok(Some(out))
            }
        }
    }

    /// A flex spine `G a1..am` inside the right-hand side: arguments outside
    /// the allowed set are pruned away through a fresh variable.
    #[allow(clippy::too_many_arguments)]
    fn abstract_flex_spine(
        &mut self,
        g: &str,
        gty: &SimpleType,
        gargs: &[Term],
        _fname: &str,
        allowed: &[(String, SimpleType)],
        k: u32,
        depth: u32,
        pruning: &mut Option<(String, Term)>,
    ) -> Result<Option<Term>, UnifyError> {
        // classify arguments: de Bruijn bound inside the rhs, allowed local,
        // or out-of-scope local (to be pruned)
        enum Arg {
            Keep(Term),
            Prune,
        }
        let mut seen = BTreeSet::new();
        let mut classes = Vec::with_capacity(gargs.len());
        for a in gargs {
            match a.strip_eta() {
                Term::Bound(b) => {
                    if !seen.insert(format!("#b{b}")) {
                        return Err(UnifyError::NotAPattern(format!(
                            "variable {g} applied to repeated bound variable"
                        )));
                    }
                    if b >= depth {
                        return Err(UnifyError::NotAPattern(
                            "stray de Bruijn index in unification problem".into(),
                        ));
                    }
                    classes.push(Arg::Keep(Term::Bound(b)));
                }
                Term::Var(x, _) if !self.is_flex(&x) => {
                    if !seen.insert(x.clone()) {
                        return Err(UnifyError::NotAPattern(format!(
                            "variable {g} applied to repeated bound variable {x}"
                        )));
                    }
                    match allowed.iter().position(|(n, _)| n == &x) {
                        Some(i) => classes.push(Arg::Keep(Term::Bound(depth + k - 1 - i as u32))),
                        None => classes.push(Arg::Prune),
                    }
                }
                other => {
                    return Err(UnifyError::NotAPattern(format!(
                        "variable {g} applied to non-bound-variable argument {other:?}"
                    )))
                }
            }
        }
        if classes.iter().all(|c| !matches!(c, Arg::Prune)) {
            let mut out = Term::var(g, gty.clone());
            for c in classes {
                if let Arg::Keep(t) = c {
                    out = Term::app(out, t);
                }
            }
            return Ok(Some(out));
        }
        // build G := \z1..zm. G' (kept zs) and retry
        let m = gargs.len() as u32;
        let gtys = gty.args();
        let kept: Vec<u32> = classes
            .iter()
            .enumerate()
            .filter(|(_, c)| !matches!(c, Arg::Prune))
            .map(|(i, _)| i as u32)
            .collect();
        let kept_tys: Vec<SimpleType> = kept.iter().map(|&i| gtys[i as usize].clone()).collect();
        let gpname = self.supply.fresh(META_PREFIX);
        let gpty = SimpleType::fun(&kept_tys, gty.target().clone());
        let gp = Term::apps(
            Term::var(gpname, gpty),
            kept.iter().map(|&i| Term::Bound(m - 1 - i)),
        );
        let sol = lambdas(gty, m, gp)
            .canonical(gty)
            .map_err(|e| UnifyError::IllTyped(e.to_string()))?;
        *pruning = Some((g.to_string(), sol));
        Ok(None)
    }

    /// Records `var := sol`, composing into the accumulated substitution and
    /// instantiating the remaining work list.
    fn add_binding(&mut self, var: &str, sol: Term) -> Result<(), UnifyError> {
        let binding = Subst::singleton(var, sol);
        self.sigma = self
            .sigma
            .compose(&binding)
            .map_err(|e| UnifyError::IllTyped(e.to_string()))?;
        for (s, t) in self.work.iter_mut() {
            *s = apply(s, &binding)?;
            *t = apply(t, &binding)?;
        }
        Ok(())
    }

    /// Applies a pruning binding to one term and records it.
    fn bind(&mut self, var: &str, sol: Term, t: Term) -> Result<Term, UnifyError> {
        self.add_binding(var, sol)?;
        self.latest(t)
    }

    /// Re-instantiates a term under the current substitution.
    fn latest(&self, t: Term) -> Result<Term, UnifyError> {
        apply(&t, &self.sigma)
    }
}

fn apply(t: &Term, s: &Subst) -> Result<Term, UnifyError> {
    t.apply_subst(s).map_err(|e| match e {
        TermError::IllTyped(m) => UnifyError::IllTyped(m),
        TermError::UnboundIndex(i) => UnifyError::IllTyped(format!("unbound index {i}")),
    })
}

fn spine_owned(t: &Term) -> (Term, Vec<Term>) {
    let (h, args) = t.spine();
    (h.clone(), args.into_iter().cloned().collect())
}

/// Wraps `body` in `k` binders with types taken from `fty`.
fn lambdas(fty: &SimpleType, k: u32, body: Term) -> Term {
    let args = fty.args();
    let mut out = body;
    for i in (0..k as usize).rev() {
        out = Term::lam(args[i].clone(), out);
    }
    out
}

impl Term {
    /// Strips an η-expansion `\x1..xn. t #n-1..#0` back to `t` when possible,
    /// so pattern arguments can be recognized under η-long form.
    pub(crate) fn strip_eta(&self) -> Term {
        let mut n = 0u32;
        let mut body = self;
        while let Term::Lam(_, b) = body {
            n += 1;
            body = b;
        }
        if n == 0 {
            return self.clone();
        }
        let (head, args) = body.spine();
        if args.len() == n as usize
            && args
                .iter()
                .enumerate()
                .all(|(i, a)| matches!(a, Term::Bound(b) if *b == n - 1 - i as u32))
        {
            // the spine head of a β-normal term is a leaf; it survives the
            // strip only if it does not capture the binders we drop
            match head {
                Term::Bound(b) if *b >= n => return Term::Bound(b - n),
                Term::Bound(_) => {}
                leaf => return leaf.clone(),
            }
        }
        self.clone()
    }
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

    fn v(x: &str) -> Term {
        Term::var(x, nt())
    }

    #[test]
    fn clash_of_distinct_constructors() {
        // z and (s y) are not unifiable
        assert_eq!(unify(&z(), &s(v("y"))).unwrap(), None);
    }

    #[test]
    fn occurs_check() {
        // x and (s x) are not unifiable
        assert_eq!(unify(&v("x"), &s(v("x"))).unwrap(), None);
    }

    #[test]
    fn unify_equal_terms_is_identity() {
        let t = s(s(z()));
        assert_eq!(unify(&t, &t).unwrap(), Some(Subst::identity()));
    }

    #[test]
    fn injectivity_of_constructors() {
        // (s x) = (s y) unifies with x := y
        let got = unify(&s(v("x")), &s(v("y"))).unwrap().unwrap();
        let x_to = got.get("x").cloned().or_else(|| got.get("y").cloned());
        assert!(x_to == Some(v("y")) || x_to == Some(v("x")));
        let l = s(v("x")).apply_subst(&got).unwrap();
        let r = s(v("y")).apply_subst(&got).unwrap();
        assert_eq!(l, r);
    }

    #[test]
    fn flex_rigid_with_binders() {
        // F = \x. s x  via   (\x. F x) vs (\x. s x) at nt -> nt
        let fty = SimpleType::arrow(nt(), nt());
        let f = Term::var("F", fty.clone());
        let lhs = Term::lam(nt(), Term::app(f.clone(), Term::Bound(0)));
        let rhs = Term::lam(
            nt(),
            Term::app(Term::cnst("s", fty.clone()), Term::Bound(0)),
        );
        let got = unify(&lhs, &rhs).unwrap().unwrap();
        assert_eq!(
            lhs.apply_subst(&got).unwrap(),
            rhs.apply_subst(&got).unwrap()
        );
        assert_eq!(got.get("F").unwrap(), &rhs);
    }

    #[test]
    fn flex_rigid_scope_violation_has_no_unifier() {
        // \x. F = \x. s x : F cannot depend on x
        let lhs = Term::lam(nt(), v("F"));
        let rhs = Term::lam(
            nt(),
            Term::app(Term::cnst("s", SimpleType::arrow(nt(), nt())), Term::Bound(0)),
        );
        assert_eq!(unify(&lhs, &rhs).unwrap(), None);
    }

    #[test]
    fn flex_flex_same_head_prunes_disagreeing_positions() {
        // \x y. F x y = \x y. F y x  forces F to ignore both arguments
        let fty = SimpleType::fun(&[nt(), nt()], nt());
        let f = Term::var("F", fty.clone());
        let lhs = Term::lam(
            nt(),
            Term::lam(nt(), Term::apps(f.clone(), [Term::Bound(1), Term::Bound(0)])),
        );
        let rhs = Term::lam(
            nt(),
            Term::lam(nt(), Term::apps(f.clone(), [Term::Bound(0), Term::Bound(1)])),
        );
        let got = unify(&lhs, &rhs).unwrap().unwrap();
        assert_eq!(
            lhs.apply_subst(&got).unwrap(),
            rhs.apply_subst(&got).unwrap()
        );
    }

    #[test]
    fn flex_flex_different_heads() {
        // F x = G y  collapses both to a shared fresh variable
        let lhs = Term::var("F", nt());
        let rhs = Term::var("G", nt());
        let got = unify(&lhs, &rhs).unwrap().unwrap();
        assert_eq!(
            lhs.apply_subst(&got).unwrap(),
            rhs.apply_subst(&got).unwrap()
        );
    }

    #[test]
    fn non_pattern_is_an_error() {
        // F z = z  applies F to a constant: outside the fragment
        let fty = SimpleType::arrow(nt(), nt());
        let lhs = Term::app(Term::var("F", fty), z());
        assert!(matches!(
            unify(&lhs, &z()),
            Err(UnifyError::NotAPattern(_))
        ));
    }

    #[test]
    fn first_order_occurs_deeper() {
        // x = s (s x)
        let lhs = v("x");
        let rhs = s(s(v("x")));
        assert_eq!(unify(&lhs, &rhs).unwrap(), None);
    }
}
