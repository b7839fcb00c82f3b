//! Simply typed λ-terms in β·η-long normal form.
//!
//! Binders are nameless (de Bruijn indices); eigenvariables, constants and
//! parameters are named leaves carrying their type. Structural equality on
//! `Term` is therefore α-equivalence. All public constructors and operations
//! keep terms canonical: β-normal and η-long with respect to their type.

mod unify;

pub use unify::{unify, UnifyError};

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

/// A simple type: a named base type or an arrow. The base type `o` is the
/// type of formulas and is excluded from essentially first-order types.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SimpleType {
    Base(String),
    Arrow(Box<SimpleType>, Box<SimpleType>),
}

pub const FORMULA_TYPE: &str = "o";

impl SimpleType {
    pub fn base(name: impl Into<String>) -> Self {
        SimpleType::Base(name.into())
    }

    pub fn o() -> Self {
        SimpleType::Base(FORMULA_TYPE.into())
    }

    pub fn arrow(from: SimpleType, to: SimpleType) -> Self {
        SimpleType::Arrow(Box::new(from), Box::new(to))
    }

    /// Curried function type `args -> target`.
    pub fn fun(args: &[SimpleType], target: SimpleType) -> Self {
        args.iter()
            .rev()
            .fold(target, |acc, a| SimpleType::arrow(a.clone(), acc))
    }

    pub fn is_o(&self) -> bool {
        matches!(self, SimpleType::Base(b) if b == FORMULA_TYPE)
    }

    /// Essentially first-order: no occurrence of `o` anywhere.
    pub fn is_efo(&self) -> bool {
        match self {
            SimpleType::Base(b) => b != FORMULA_TYPE,
            SimpleType::Arrow(a, b) => a.is_efo() && b.is_efo(),
        }
    }

    /// Argument types of a curried arrow, outermost first.
    pub fn args(&self) -> Vec<&SimpleType> {
        let mut out = Vec::new();
        let mut ty = self;
        while let SimpleType::Arrow(a, b) = ty {
            out.push(a.as_ref());
            ty = b;
        }
        out
    }

    /// Final target of a curried arrow.
    pub fn target(&self) -> &SimpleType {
        let mut ty = self;
        while let SimpleType::Arrow(_, b) = ty {
            ty = b;
        }
        ty
    }

    pub fn arity(&self) -> usize {
        self.args().len()
    }
}

impl fmt::Display for SimpleType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SimpleType::Base(b) => write!(f, "{b}"),
            SimpleType::Arrow(a, b) => match a.as_ref() {
                SimpleType::Arrow(..) => write!(f, "({a}) -> {b}"),
                _ => write!(f, "{a} -> {b}"),
            },
        }
    }
}

impl fmt::Debug for SimpleType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

/// A parameter `X^p`: a fresh atom standing for the recursive occurrences of
/// predicate `p` in the (co)induction rules. Parameters are rigid for
/// unification and untouched by eigenvariable substitution.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ParamRef {
    pub name: String,
    pub pred: String,
}

impl ParamRef {
    pub fn new(name: impl Into<String>, pred: impl Into<String>) -> Self {
        ParamRef {
            name: name.into(),
            pred: pred.into(),
        }
    }
}

impl fmt::Display for ParamRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}^{}", self.name, self.pred)
    }
}

impl fmt::Debug for ParamRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

#[derive(Clone, PartialEq, Eq, Hash)]
pub enum Term {
    /// de Bruijn index into enclosing `Lam` binders
    Bound(u32),
    /// free eigenvariable
    Var(String, SimpleType),
    /// signature or logical constant
    Const(String, SimpleType),
    /// parameter `X^p`, same type as `p`
    Param(ParamRef, SimpleType),
    Lam(SimpleType, Box<Term>),
    App(Box<Term>, Box<Term>),
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TermError {
    #[error("ill-typed term: {0}")]
    IllTyped(String),
    #[error("unbound de Bruijn index {0}")]
    UnboundIndex(u32),
}

impl Term {
    pub fn var(name: impl Into<String>, ty: SimpleType) -> Self {
        Term::Var(name.into(), ty)
    }

    pub fn cnst(name: impl Into<String>, ty: SimpleType) -> Self {
        Term::Const(name.into(), ty)
    }

    pub fn param(p: ParamRef, ty: SimpleType) -> Self {
        Term::Param(p, ty)
    }

    pub fn lam(ty: SimpleType, body: Term) -> Self {
        Term::Lam(ty, Box::new(body))
    }

    pub fn app(f: Term, a: Term) -> Self {
        Term::App(Box::new(f), Box::new(a))
    }

    pub fn apps(f: Term, args: impl IntoIterator<Item = Term>) -> Self {
        args.into_iter().fold(f, Term::app)
    }

    /// Splits an application spine into head and arguments.
    pub fn spine(&self) -> (&Term, Vec<&Term>) {
        let mut args = Vec::new();
        let mut head = self;
        while let Term::App(f, a) = head {
            args.push(a.as_ref());
            head = f;
        }
        args.reverse();
        (head, args)
    }

    /// Shifts free indices `>= cutoff` by `by`.
    pub fn shift_above(&self, cutoff: u32, by: u32) -> Term {
        match self {
            Term::Bound(i) => {
                if *i >= cutoff {
                    Term::Bound(i + by)
                } else {
                    Term::Bound(*i)
                }
            }
            Term::Var(..) | Term::Const(..) | Term::Param(..) => self.clone(),
            Term::Lam(ty, b) => Term::lam(ty.clone(), b.shift_above(cutoff + 1, by)),
            Term::App(f, a) => Term::app(f.shift_above(cutoff, by), a.shift_above(cutoff, by)),
        }
    }

    /// Replaces `Bound(depth)` by `arg`, adjusting indices above it.
    fn subst_bound(&self, depth: u32, arg: &Term) -> Term {
        match self {
            Term::Bound(i) => {
                if *i == depth {
                    arg.shift_above(0, depth)
                } else if *i > depth {
                    Term::Bound(i - 1)
                } else {
                    Term::Bound(*i)
                }
            }
            Term::Var(..) | Term::Const(..) | Term::Param(..) => self.clone(),
            Term::Lam(ty, b) => Term::lam(ty.clone(), b.subst_bound(depth + 1, arg)),
            Term::App(f, a) => Term::app(f.subst_bound(depth, arg), a.subst_bound(depth, arg)),
        }
    }

    /// Full β-normalization (simply typed, so this terminates).
    pub fn beta_normal(&self) -> Term {
        match self {
            Term::Bound(_) | Term::Var(..) | Term::Const(..) | Term::Param(..) => self.clone(),
            Term::Lam(ty, b) => Term::lam(ty.clone(), b.beta_normal()),
            Term::App(f, a) => {
                let f = f.beta_normal();
                if let Term::Lam(_, body) = f {
                    body.subst_bound(0, a).beta_normal()
                } else {
                    Term::app(f, a.beta_normal())
                }
            }
        }
    }

    /// η-expands a β-normal term to η-long form at type `ty`.
    /// `env` holds the types of the enclosing binders, innermost last.
    fn eta_long(&self, ty: &SimpleType, env: &mut Vec<SimpleType>) -> Result<Term, TermError> {
        match ty {
            SimpleType::Arrow(a, b) => match self {
                Term::Lam(la, body) => {
                    if la != a.as_ref() {
                        return Err(TermError::IllTyped(format!(
                            "binder type {la} does not match expected {a}"
                        )));
                    }
                    env.push(a.as_ref().clone());
                    let body = body.eta_long(b, env)?;
                    env.pop();
                    Ok(Term::lam(a.as_ref().clone(), body))
                }
                _ => {
                    let expanded = Term::app(self.shift_above(0, 1), Term::Bound(0));
                    env.push(a.as_ref().clone());
                    let body = expanded.eta_long(b, env)?;
                    env.pop();
                    Ok(Term::lam(a.as_ref().clone(), body))
                }
            },
            SimpleType::Base(_) => {
                let (head, args) = self.spine();
                let head_ty = match head {
                    Term::Bound(i) => {
                        let idx = env
                            .len()
                            .checked_sub(1 + *i as usize)
                            .ok_or(TermError::UnboundIndex(*i))?;
                        env[idx].clone()
                    }
                    Term::Var(_, t) | Term::Const(_, t) | Term::Param(_, t) => t.clone(),
                    Term::Lam(..) => {
                        return Err(TermError::IllTyped(
                            "redex head in β-normal term".into(),
                        ))
                    }
                    Term::App(..) => unreachable!("spine head is not an application"),
                };
                let arg_tys = head_ty.args();
                if arg_tys.len() != args.len() || head_ty.target() != ty {
                    return Err(TermError::IllTyped(format!(
                        "head of type {head_ty} applied to {} arguments at type {ty}",
                        args.len()
                    )));
                }
                let mut out = head.clone();
                for (arg, aty) in args.iter().zip(arg_tys) {
                    out = Term::app(out, arg.eta_long(aty, env)?);
                }
                Ok(out)
            }
        }
    }

    /// Canonical form: the unique β-normal η-long representative at `ty`.
    /// Errors if the term does not have type `ty`.
    pub fn canonical(&self, ty: &SimpleType) -> Result<Term, TermError> {
        let inferred = self.infer_type(&mut Vec::new())?;
        if &inferred != ty {
            return Err(TermError::IllTyped(format!(
                "term has type {inferred}, expected {ty}"
            )));
        }
        self.beta_normal().eta_long(ty, &mut Vec::new())
    }

    pub fn infer_type(&self, env: &mut Vec<SimpleType>) -> Result<SimpleType, TermError> {
        match self {
            Term::Bound(i) => env
                .len()
                .checked_sub(1 + *i as usize)
                .map(|idx| env[idx].clone())
                .ok_or(TermError::UnboundIndex(*i)),
            Term::Var(_, t) | Term::Const(_, t) | Term::Param(_, t) => Ok(t.clone()),
            Term::Lam(a, b) => {
                env.push(a.clone());
                let bt = b.infer_type(env)?;
                env.pop();
                Ok(SimpleType::arrow(a.clone(), bt))
            }
            Term::App(f, a) => {
                let ft = f.infer_type(env)?;
                let at = a.infer_type(env)?;
                match ft {
                    SimpleType::Arrow(p, r) if *p == at => Ok(*r),
                    SimpleType::Arrow(p, _) => Err(TermError::IllTyped(format!(
                        "argument of type {at} where {p} expected"
                    ))),
                    _ => Err(TermError::IllTyped(format!(
                        "application of non-function of type {ft}"
                    ))),
                }
            }
        }
    }

    /// Free eigenvariables with their types.
    pub fn free_vars(&self) -> BTreeMap<String, SimpleType> {
        let mut out = BTreeMap::new();
        self.collect_free_vars(&mut out);
        out
    }

    fn collect_free_vars(&self, out: &mut BTreeMap<String, SimpleType>) {
        match self {
            Term::Var(x, t) => {
                out.insert(x.clone(), t.clone());
            }
            Term::Lam(_, b) => b.collect_free_vars(out),
            Term::App(f, a) => {
                f.collect_free_vars(out);
                a.collect_free_vars(out);
            }
            _ => {}
        }
    }

    /// Parameters occurring anywhere in the term.
    pub fn params(&self) -> BTreeSet<ParamRef> {
        let mut out = BTreeSet::new();
        self.collect_params(&mut out);
        out
    }

    fn collect_params(&self, out: &mut BTreeSet<ParamRef>) {
        match self {
            Term::Param(p, _) => {
                out.insert(p.clone());
            }
            Term::Lam(_, b) => b.collect_params(out),
            Term::App(f, a) => {
                f.collect_params(out);
                a.collect_params(out);
            }
            _ => {}
        }
    }

    pub fn is_closed(&self) -> bool {
        self.free_vars().is_empty()
    }

    /// Constants occurring anywhere in the term.
    pub fn consts(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        fn go(t: &Term, out: &mut BTreeSet<String>) {
            match t {
                Term::Const(c, _) => {
                    out.insert(c.clone());
                }
                Term::Lam(_, b) => go(b, out),
                Term::App(f, a) => {
                    go(f, out);
                    go(a, out);
                }
                _ => {}
            }
        }
        go(self, &mut out);
        out
    }

    fn replace_vars(&self, map: &BTreeMap<String, Term>) -> Term {
        match self {
            Term::Var(x, _) => match map.get(x) {
                // ranges are locally closed, so no index shifting is needed
                Some(t) => t.clone(),
                None => self.clone(),
            },
            Term::Bound(_) | Term::Const(..) | Term::Param(..) => self.clone(),
            Term::Lam(ty, b) => Term::lam(ty.clone(), b.replace_vars(map)),
            Term::App(f, a) => Term::app(f.replace_vars(map), a.replace_vars(map)),
        }
    }

    fn replace_params(&self, map: &BTreeMap<ParamRef, Term>) -> Term {
        match self {
            Term::Param(p, _) => match map.get(p) {
                Some(t) => t.clone(),
                None => self.clone(),
            },
            Term::Bound(_) | Term::Const(..) | Term::Var(..) => self.clone(),
            Term::Lam(ty, b) => Term::lam(ty.clone(), b.replace_params(map)),
            Term::App(f, a) => Term::app(f.replace_params(map), a.replace_params(map)),
        }
    }

    /// Capture-avoiding substitution of eigenvariables, re-canonicalized.
    pub fn apply_subst(&self, theta: &Subst) -> Result<Term, TermError> {
        if theta.is_empty() {
            return Ok(self.clone());
        }
        let ty = self.infer_type(&mut Vec::new())?;
        self.replace_vars(&theta.map).canonical(&ty)
    }

    /// Substitution of parameters by closed terms, re-canonicalized.
    pub fn apply_param_subst(&self, map: &BTreeMap<ParamRef, Term>) -> Result<Term, TermError> {
        if map.is_empty() {
            return Ok(self.clone());
        }
        let ty = self.infer_type(&mut Vec::new())?;
        self.replace_params(map).canonical(&ty)
    }
}

impl fmt::Debug for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Bound(i) => write!(f, "#{i}"),
            Term::Var(x, _) => write!(f, "{x}"),
            Term::Const(c, _) => write!(f, "{c}"),
            Term::Param(p, _) => write!(f, "{p}"),
            Term::Lam(ty, b) => write!(f, "(\\:{ty}. {b:?})"),
            Term::App(g, a) => write!(f, "({g:?} {a:?})"),
        }
    }
}

/// A type-preserving finite map from eigenvariables to canonical terms.
/// The empty map is the identity substitution.
#[derive(Clone, Default, PartialEq, Eq)]
pub struct Subst {
    map: BTreeMap<String, Term>,
}

impl Subst {
    pub fn identity() -> Self {
        Subst::default()
    }

    pub fn singleton(var: impl Into<String>, term: Term) -> Self {
        let mut map = BTreeMap::new();
        map.insert(var.into(), term);
        Subst { map }
    }

    pub fn from_pairs(pairs: impl IntoIterator<Item = (String, Term)>) -> Self {
        Subst {
            map: pairs.into_iter().collect(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }

    pub fn get(&self, var: &str) -> Option<&Term> {
        self.map.get(var)
    }

    pub fn insert(&mut self, var: impl Into<String>, term: Term) {
        self.map.insert(var.into(), term);
    }

    pub fn domain(&self) -> impl Iterator<Item = &String> {
        self.map.keys()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&String, &Term)> {
        self.map.iter()
    }

    /// Free variables of the range terms.
    pub fn range_vars(&self) -> BTreeSet<String> {
        self.map
            .values()
            .flat_map(|t| t.free_vars().into_keys())
            .collect()
    }

    /// Checks every binding maps a variable to a term of the same type.
    pub fn is_type_preserving(&self) -> bool {
        self.map.values().all(|t| t.infer_type(&mut Vec::new()).is_ok())
    }

    /// Composition: `t.apply(compose(a, b)) == t.apply(a).apply(b)`.
    pub fn compose(&self, rho: &Subst) -> Result<Subst, TermError> {
        let mut map = BTreeMap::new();
        for (x, t) in &self.map {
            map.insert(x.clone(), t.apply_subst(rho)?);
        }
        for (x, t) in &rho.map {
            map.entry(x.clone()).or_insert_with(|| t.clone());
        }
        Ok(Subst { map })
    }
}

impl fmt::Debug for Subst {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, (x, t)) in self.map.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{x} := {t:?}")?;
        }
        write!(f, "]")
    }
}

/// Deterministic fresh-name generation: `base`, `base1`, `base2`, ... the
/// first candidate not in `used`.
pub fn fresh_name(base: &str, used: &BTreeSet<String>) -> String {
    if !used.contains(base) {
        return base.to_string();
    }
    let mut i = 1u64;
    loop {
        let cand = format!("{base}{i}");
        if !used.contains(&cand) {
            return cand;
        }
        i += 1;
    }
}

/// A counter-backed supply for contexts that need many fresh names.
#[derive(Clone, Debug, Default)]
pub struct NameSupply {
    used: BTreeSet<String>,
}

impl NameSupply {
    pub fn new(used: BTreeSet<String>) -> Self {
        NameSupply { used }
    }

    pub fn reserve(&mut self, name: &str) {
        self.used.insert(name.to_string());
    }

    pub fn fresh(&mut self, base: &str) -> String {
        let name = fresh_name(base, &self.used);
        self.used.insert(name.clone());
        name
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

    fn s_const() -> Term {
        Term::cnst("s", SimpleType::arrow(nt(), nt()))
    }

    fn s(t: Term) -> Term {
        Term::app(s_const(), t)
    }

    #[test]
    fn beta_identity() {
        // (\x. x) z --> z
        let id = Term::lam(nt(), Term::Bound(0));
        let t = Term::app(id, z());
        assert_eq!(t.canonical(&nt()).unwrap(), z());
    }

    #[test]
    fn eta_expansion_of_bare_constant() {
        // s : nt -> nt as a bare head --> \x. s x
        let got = s_const().canonical(&SimpleType::arrow(nt(), nt())).unwrap();
        let want = Term::lam(nt(), Term::app(s_const(), Term::Bound(0)));
        assert_eq!(got, want);
    }

    #[test]
    fn canonical_idempotent() {
        let ty = SimpleType::arrow(nt(), nt());
        let t = s_const().canonical(&ty).unwrap();
        assert_eq!(t.canonical(&ty).unwrap(), t);
    }

    #[test]
    fn subst_basic_and_identity() {
        let x = Term::var("x", nt());
        let theta = Subst::singleton("x", s(z()));
        assert_eq!(x.apply_subst(&theta).unwrap(), s(z()));
        assert_eq!(x.apply_subst(&Subst::identity()).unwrap(), x);
    }

    #[test]
    fn subst_avoids_capture() {
        // (\b. f b y)[y := x] --> \b. f b x  (the binder cannot capture x)
        let f = Term::cnst("f", SimpleType::fun(&[nt(), nt()], nt()));
        let t = Term::lam(nt(), Term::apps(f.clone(), [Term::Bound(0), Term::var("y", nt())]));
        let theta = Subst::singleton("y", Term::var("x", nt()));
        let want = Term::lam(nt(), Term::apps(f, [Term::Bound(0), Term::var("x", nt())]));
        assert_eq!(t.apply_subst(&theta).unwrap(), want);
    }

    #[test]
    fn compose_chains_bindings() {
        // [x:=y] o [y:=z']  maps x to z' and y to z'
        let theta = Subst::singleton("x", Term::var("y", nt()));
        let rho = Subst::singleton("y", Term::var("w", nt()));
        let comp = theta.compose(&rho).unwrap();
        assert_eq!(comp.get("x"), Some(&Term::var("w", nt())));
        assert_eq!(comp.get("y"), Some(&Term::var("w", nt())));
        // identity composes trivially
        let comp2 = Subst::identity().compose(&rho).unwrap();
        assert_eq!(comp2, rho);
    }

    #[test]
    fn ill_typed_is_reported() {
        let t = Term::app(z(), z());
        assert!(matches!(t.canonical(&nt()), Err(TermError::IllTyped(_))));
        assert!(matches!(
            z().canonical(&SimpleType::arrow(nt(), nt())),
            Err(TermError::IllTyped(_))
        ));
    }

    #[test]
    fn efo_excludes_formula_type() {
        assert!(nt().is_efo());
        assert!(SimpleType::arrow(nt(), nt()).is_efo());
        assert!(!SimpleType::o().is_efo());
        assert!(!SimpleType::arrow(nt(), SimpleType::o()).is_efo());
    }
}
