//! Shared fixtures for the test suites: a small natural-number signature
//! with an inductive `ev`, a co-inductive `conat` and a trivial `tri`.

use crate::kernel::{Derivation, Rule, Sequent, Side};
use crate::logic::{self, DefClause, DefTable, Flavor, Signature};
use crate::term::{SimpleType, Term};

pub fn nt() -> SimpleType {
    SimpleType::base("nt")
}

pub fn o() -> SimpleType {
    SimpleType::o()
}

pub fn z() -> Term {
    Term::cnst("z", nt())
}

pub fn s(t: Term) -> Term {
    Term::app(Term::cnst("s", SimpleType::arrow(nt(), nt())), t)
}

pub fn num(n: u32) -> Term {
    (0..n).fold(z(), |acc, _| s(acc))
}

pub fn v(x: &str) -> Term {
    Term::var(x, nt())
}

pub fn eqn(a: Term, b: Term) -> Term {
    logic::eq(&nt(), a, b)
}

pub fn pred_ty1() -> SimpleType {
    SimpleType::arrow(nt(), o())
}

pub fn ev(t: Term) -> Term {
    Term::app(Term::cnst("ev", pred_ty1()), t)
}

pub fn conat(t: Term) -> Term {
    Term::app(Term::cnst("conat", pred_ty1()), t)
}

pub fn tri() -> Term {
    Term::cnst("tri", o())
}

pub fn base_signature() -> Signature {
    let mut sig = Signature::new();
    sig.declare_base("nt");
    sig.declare_const("z", nt());
    sig.declare_const("s", SimpleType::arrow(nt(), nt()));
    sig.declare_const("ev", pred_ty1());
    sig.declare_const("conat", pred_ty1());
    sig.declare_const("tri", o());
    sig
}

/// `ev x := (x = z) \/ (exists y, x = s (s y) /\ ev y)`
pub fn ev_body() -> Term {
    let w_eq_z = eqn(Term::Bound(0), z());
    let ex = logic::exists(
        &nt(),
        Term::lam(
            nt(),
            logic::and(
                eqn(Term::Bound(1), s(s(Term::Bound(0)))),
                Term::app(Term::Bound(2), Term::Bound(0)),
            ),
        ),
    );
    Term::lam(pred_ty1(), Term::lam(nt(), logic::or(w_eq_z, ex)))
        .canonical(&SimpleType::arrow(pred_ty1(), pred_ty1()))
        .unwrap()
}

/// `conat x := (x = z) \/ (exists y, x = s y /\ conat y)` as a greatest
/// fixed point: the co-natural numbers.
pub fn conat_body() -> Term {
    let w_eq_z = eqn(Term::Bound(0), z());
    let ex = logic::exists(
        &nt(),
        Term::lam(
            nt(),
            logic::and(
                eqn(Term::Bound(1), s(Term::Bound(0))),
                Term::app(Term::Bound(2), Term::Bound(0)),
            ),
        ),
    );
    Term::lam(pred_ty1(), Term::lam(nt(), logic::or(w_eq_z, ex)))
        .canonical(&SimpleType::arrow(pred_ty1(), pred_ty1()))
        .unwrap()
}

pub fn tri_body() -> Term {
    Term::lam(o(), logic::top())
}

pub fn table() -> DefTable {
    DefTable::new(
        base_signature(),
        vec![
            DefClause {
                pred: "ev".into(),
                flavor: Flavor::Mu,
                body: ev_body(),
            },
            DefClause {
                pred: "conat".into(),
                flavor: Flavor::Nu,
                body: conat_body(),
            },
            DefClause {
                pred: "tri".into(),
                flavor: Flavor::Mu,
                body: tri_body(),
            },
        ],
    )
    .unwrap()
}

/// `p := p => false`, the classic non-monotone definition.
pub fn non_monotone_p_table() -> DefTable {
    let mut sig = base_signature();
    sig.declare_const("p", o());
    DefTable::new(
        sig,
        vec![DefClause {
            pred: "p".into(),
            flavor: Flavor::Mu,
            body: Term::lam(o(), logic::imp(Term::Bound(0), logic::bot())),
        }],
    )
    .unwrap()
}

/// The non-monotone `ev` variant:
/// `ev x := (x = z) \/ (exists y, x = s y /\ (ev y => false))`.
pub fn non_monotone_ev_table() -> DefTable {
    let body = Term::lam(
        pred_ty1(),
        Term::lam(
            nt(),
            logic::or(
                eqn(Term::Bound(0), z()),
                logic::exists(
                    &nt(),
                    Term::lam(
                        nt(),
                        logic::and(
                            eqn(Term::Bound(1), s(Term::Bound(0))),
                            logic::imp(
                                Term::app(Term::Bound(2), Term::Bound(0)),
                                logic::bot(),
                            ),
                        ),
                    ),
                ),
            ),
        ),
    );
    DefTable::new(
        base_signature(),
        vec![DefClause {
            pred: "ev".into(),
            flavor: Flavor::Mu,
            body,
        }],
    )
    .unwrap()
}

pub fn init(defs: &DefTable, f: Term) -> Derivation {
    Derivation::apply(defs, Rule::Init { formula: f }, vec![]).unwrap()
}

pub fn top_r(defs: &DefTable, left: Vec<Term>) -> Derivation {
    Derivation::apply(defs, Rule::TopR { left }, vec![]).unwrap()
}

pub fn eq_r(defs: &DefTable, left: Vec<Term>, t: Term) -> Derivation {
    Derivation::apply(
        defs,
        Rule::EqR {
            left,
            formula: eqn(t.clone(), t),
        },
        vec![],
    )
    .unwrap()
}

/// `⊢ forall x, z = s x => false` — clash of distinct constructors.
pub fn freeness_clash(defs: &DefTable) -> Derivation {
    let x = v("x");
    let eq_f = eqn(z(), s(x.clone()));
    let leaf = Derivation::apply(
        defs,
        Rule::EqL {
            pos: 0,
            left: vec![eq_f.clone()],
            right: logic::bot(),
            mgu: None,
        },
        vec![],
    )
    .unwrap();
    let imp = Derivation::apply(defs, Rule::ImpR, vec![leaf]).unwrap();
    Derivation::apply(
        defs,
        Rule::AllR {
            eigen: ("x".into(), nt()),
        },
        vec![imp],
    )
    .unwrap()
}

/// `⊢ forall x, x = s x => false` — occurs check.
pub fn freeness_occurs(defs: &DefTable) -> Derivation {
    let x = v("x");
    let eq_f = eqn(x.clone(), s(x.clone()));
    let leaf = Derivation::apply(
        defs,
        Rule::EqL {
            pos: 0,
            left: vec![eq_f.clone()],
            right: logic::bot(),
            mgu: None,
        },
        vec![],
    )
    .unwrap();
    let imp = Derivation::apply(defs, Rule::ImpR, vec![leaf]).unwrap();
    Derivation::apply(
        defs,
        Rule::AllR {
            eigen: ("x".into(), nt()),
        },
        vec![imp],
    )
    .unwrap()
}

/// `⊢ forall x forall y, s x = s y => x = y` — injectivity.
pub fn freeness_injectivity(defs: &DefTable) -> Derivation {
    let (x, y) = (v("x"), v("y"));
    let sx_sy = eqn(s(x.clone()), s(y.clone()));
    let x_y = eqn(x.clone(), y.clone());
    let mgu = crate::term::unify(&s(x.clone()), &s(y.clone())).unwrap();
    let refl = eq_r(defs, vec![], mgu.as_ref().unwrap().get("x").cloned().unwrap_or(y.clone()));
    let eql = Derivation::apply(
        defs,
        Rule::EqL {
            pos: 0,
            left: vec![sx_sy],
            right: x_y,
            mgu,
        },
        vec![refl],
    )
    .unwrap();
    let imp = Derivation::apply(defs, Rule::ImpR, vec![eql]).unwrap();
    let all_y = Derivation::apply(
        defs,
        Rule::AllR {
            eigen: ("y".into(), nt()),
        },
        vec![imp],
    )
    .unwrap();
    Derivation::apply(
        defs,
        Rule::AllR {
            eigen: ("x".into(), nt()),
        },
        vec![all_y],
    )
    .unwrap()
}

/// `⊢ B ev z` — the unfolded body instance for `ev z`.
pub fn ev_body_proof_z(defs: &DefTable) -> Derivation {
    let body = defs
        .unfold("ev", &Term::cnst("ev", pred_ty1()), &[z()])
        .unwrap();
    let refl = eq_r(defs, vec![], z());
    Derivation::apply(
        defs,
        Rule::OrR {
            disj: body,
            side: Side::Left,
        },
        vec![refl],
    )
    .unwrap()
}

/// Direct proof of `⊢ ev z` by unfolding through a fresh parameter.
pub fn ev_z_direct(defs: &DefTable) -> Derivation {
    let body = defs
        .unfold(
            "ev",
            &Term::param(crate::term::ParamRef::new("X", "ev"), pred_ty1()),
            &[z()],
        )
        .unwrap();
    let refl = eq_r(defs, vec![], z());
    let orr = Derivation::apply(
        defs,
        Rule::OrR {
            disj: body,
            side: Side::Left,
        },
        vec![refl],
    )
    .unwrap();
    Derivation::apply(
        defs,
        Rule::IndR {
            principal: ev(z()),
            param: "X".into(),
        },
        vec![orr],
    )
    .unwrap()
}

pub fn must_check(defs: &DefTable, d: &Derivation) {
    let report = d.check(defs);
    assert!(report.ok(), "checker rejected derivation:\n{report}\n{d:?}");
}

pub fn sequent(left: Vec<Term>, right: Term) -> Sequent {
    Sequent::new(left, right)
}

// ---------------------------------------------------------------------------
// redex corpus: multicut-rooted derivations covering every reduction family

pub fn bot_l(defs: &DefTable, left: Vec<Term>, pos: usize, right: Term) -> Derivation {
    Derivation::apply(defs, Rule::BotL { pos, left, right }, vec![]).unwrap()
}

pub fn mc(defs: &DefTable, premises: Vec<Derivation>, cuts: Vec<usize>, pi: Derivation) -> Derivation {
    let mut children = premises;
    children.push(pi);
    Derivation::apply(defs, Rule::Multicut { cuts }, children).unwrap()
}

pub fn subst_node(defs: &DefTable, child: Derivation) -> Derivation {
    Derivation::apply(defs, Rule::Subst, vec![child]).unwrap()
}

pub fn eq_l(defs: &DefTable, left: Vec<Term>, pos: usize, right: Term, children: Vec<Derivation>) -> Derivation {
    let (s, t) = match crate::logic::view(&left[pos]) {
        Some(crate::logic::FormulaView::Eq(s, t, _)) => (s.clone(), t.clone()),
        _ => panic!("eq_l: no equality at position {pos}"),
    };
    let mgu = crate::term::unify(&s, &t).unwrap();
    Derivation::apply(defs, Rule::EqL { pos, left, right, mgu }, children).unwrap()
}

/// IL with the trivial invariant `\x. true` at position `pos`.
pub fn ind_l_trivial(defs: &DefTable, pred: &str, principal: Term, pos: usize, cont: Derivation) -> Derivation {
    let inv = Term::lam(nt(), crate::logic::top());
    let body = defs.unfold(pred, &inv, &[v("y0")]).unwrap();
    let inv_prem = top_r(defs, vec![body]);
    Derivation::apply(
        defs,
        Rule::IndL {
            pos,
            principal,
            inv,
            inv_vars: vec![("y0".into(), nt())],
        },
        vec![inv_prem, cont],
    )
    .unwrap()
}

/// CIR proof of `|- conat (s z)` with invariant `\x. (x = s z) \/ (x = z)`.
pub fn conat_sz_proof(defs: &DefTable) -> Derivation {
    let inv = Term::lam(
        nt(),
        logic::or(eqn(Term::Bound(0), s(z())), eqn(Term::Bound(0), z())),
    );
    let s_sz = logic::or(eqn(s(z()), s(z())), eqn(s(z()), z()));
    let cont = Derivation::apply(
        defs,
        Rule::OrR {
            disj: s_sz,
            side: Side::Left,
        },
        vec![eq_r(defs, vec![], s(z()))],
    )
    .unwrap();
    // [S y0] |- B S y0, by case analysis on the invariant disjunction
    let y = v("y0");
    let s_y = logic::or(eqn(y.clone(), s(z())), eqn(y.clone(), z()));
    let body_y = defs.unfold("conat", &inv, &[y.clone()]).unwrap();
    // branch 1: [y0 = s z] |- B S y0; eqL instantiates y0 := s z
    let b1 = {
        let body_sz = defs.unfold("conat", &inv, &[s(z())]).unwrap();
        let (fst, snd) = match logic::view(&body_sz) {
            Some(logic::FormulaView::Or(a, b)) => (a.clone(), b.clone()),
            _ => panic!(),
        };
        let _ = fst;
        // |- exists y, s z = s y /\ S y  with witness z
        let (_tau, abs) = match logic::view(&snd) {
            Some(logic::FormulaView::Ex(t, a)) => (t, a.clone()),
            _ => panic!(),
        };
        let inst = logic::instantiate_abs(&abs, &z()).unwrap();
        let (conj_l, conj_r) = match logic::view(&inst) {
            Some(logic::FormulaView::And(a, b)) => (a.clone(), b.clone()),
            _ => panic!(),
        };
        let _ = conj_l;
        let s_z_inv = Derivation::apply(
            defs,
            Rule::OrR {
                disj: conj_r.clone(),
                side: Side::Right,
            },
            vec![eq_r(defs, vec![], z())],
        )
        .unwrap();
        let pair = Derivation::apply(defs, Rule::AndR, vec![eq_r(defs, vec![], s(z())), s_z_inv])
            .unwrap();
        let exr = Derivation::apply(
            defs,
            Rule::ExR {
                quantified: snd,
                witness: z(),
            },
            vec![pair],
        )
        .unwrap();
        let orr = Derivation::apply(
            defs,
            Rule::OrR {
                disj: body_sz,
                side: Side::Right,
            },
            vec![exr],
        )
        .unwrap();
        eq_l(defs, vec![eqn(y.clone(), s(z()))], 0, body_y.clone(), vec![orr])
    };
    // branch 2: [y0 = z] |- B S y0; eqL instantiates y0 := z
    let b2 = {
        let body_z = defs.unfold("conat", &inv, &[z()]).unwrap();
        let orr = Derivation::apply(
            defs,
            Rule::OrR {
                disj: body_z,
                side: Side::Left,
            },
            vec![eq_r(defs, vec![], z())],
        )
        .unwrap();
        eq_l(defs, vec![eqn(y.clone(), z())], 0, body_y.clone(), vec![orr])
    };
    let inv_prem = Derivation::apply(defs, Rule::OrL { pos: 0 }, vec![b1, b2]).unwrap();
    let _ = s_y;
    Derivation::apply(
        defs,
        Rule::CoindR {
            principal: conat(s(z())),
            inv,
            inv_vars: vec![("y0".into(), nt())],
        },
        vec![cont, inv_prem],
    )
    .unwrap()
}

/// Direct proof of `|- ev (s (s z))` going through the parameter unfolding.
pub fn ev_ssz_direct(defs: &DefTable) -> Derivation {
    let xref = crate::term::ParamRef::new("X", "ev");
    let slot = Term::param(xref.clone(), pred_ty1());
    let ssz = num(2);
    let body_ssz = defs.unfold("ev", &slot, &[ssz.clone()]).unwrap();
    let body_z = defs.unfold("ev", &slot, &[z()]).unwrap();
    // |- X^ev z
    let xp_z = Term::app(slot.clone(), z()).canonical(&o()).unwrap();
    let x_z = Derivation::apply(
        defs,
        Rule::IndRp { principal: xp_z },
        vec![Derivation::apply(
            defs,
            Rule::OrR {
                disj: body_z,
                side: Side::Left,
            },
            vec![eq_r(defs, vec![], z())],
        )
        .unwrap()],
    )
    .unwrap();
    // |- exists y, s (s z) = s (s y) /\ X^ev y  with witness z
    let (_, snd) = match logic::view(&body_ssz) {
        Some(logic::FormulaView::Or(a, b)) => (a.clone(), b.clone()),
        _ => panic!(),
    };
    let pair = Derivation::apply(defs, Rule::AndR, vec![eq_r(defs, vec![], ssz.clone()), x_z])
        .unwrap();
    let exr = Derivation::apply(
        defs,
        Rule::ExR {
            quantified: snd,
            witness: z(),
        },
        vec![pair],
    )
    .unwrap();
    let orr = Derivation::apply(
        defs,
        Rule::OrR {
            disj: body_ssz,
            side: Side::Right,
        },
        vec![exr],
    )
    .unwrap();
    Derivation::apply(
        defs,
        Rule::IndR {
            principal: ev(ssz),
            param: "X".into(),
        },
        vec![orr],
    )
    .unwrap()
}

/// Multicut-rooted derivations covering every reduction case family in the
/// complete rule set, each paired with a short name.
pub fn redex_corpus(defs: &DefTable) -> Vec<(&'static str, Derivation)> {
    let mut out: Vec<(&'static str, Derivation)> = Vec::new();
    let t = logic::top;
    let zz = || eqn(z(), z());

    // --- essential cases ---
    {
        // andR/andL
        let pr = Derivation::apply(
            defs,
            Rule::AndR,
            vec![top_r(defs, vec![]), eq_r(defs, vec![], z())],
        )
        .unwrap();
        let pi = Derivation::apply(
            defs,
            Rule::AndL {
                pos: 0,
                conj: logic::and(t(), zz()),
                side: Side::Left,
            },
            vec![top_r(defs, vec![t()])],
        )
        .unwrap();
        out.push(("andR_andL", mc(defs, vec![pr], vec![0], pi)));
    }
    {
        // orR/orL
        let disj = logic::or(t(), logic::bot());
        let pr = Derivation::apply(
            defs,
            Rule::OrR {
                disj: disj.clone(),
                side: Side::Left,
            },
            vec![top_r(defs, vec![])],
        )
        .unwrap();
        let pi = Derivation::apply(
            defs,
            Rule::OrL { pos: 0 },
            vec![
                top_r(defs, vec![t()]),
                bot_l(defs, vec![logic::bot()], 0, t()),
            ],
        )
        .unwrap();
        out.push(("orR_orL", mc(defs, vec![pr], vec![0], pi)));
    }
    {
        // impR/impL with a context formula, so the contraction closure fires
        let pr = Derivation::apply(
            defs,
            Rule::ImpR,
            vec![eq_r(defs, vec![t()], z())],
        )
        .unwrap(); // |- true => z = z
        let pi = Derivation::apply(
            defs,
            Rule::ImpL { pos: 0 },
            vec![
                top_r(defs, vec![zz()]),
                top_r(defs, vec![zz(), zz()]),
            ],
        )
        .unwrap(); // [true => z = z, z = z] |- true
        out.push(("impR_impL", mc(defs, vec![pr], vec![0], pi)));
    }
    {
        // forallR/forallL
        let all = logic::forall(&nt(), Term::lam(nt(), eqn(Term::Bound(0), Term::Bound(0))));
        let pr = Derivation::apply(
            defs,
            Rule::AllR {
                eigen: ("y".into(), nt()),
            },
            vec![eq_r(defs, vec![], v("y"))],
        )
        .unwrap();
        let pi = Derivation::apply(
            defs,
            Rule::AllL {
                pos: 0,
                quantified: all,
                witness: z(),
            },
            vec![top_r(defs, vec![zz()])],
        )
        .unwrap();
        out.push(("allR_allL", mc(defs, vec![pr], vec![0], pi)));
    }
    {
        // existsR/existsL
        let ex = logic::exists(&nt(), Term::lam(nt(), eqn(Term::Bound(0), Term::Bound(0))));
        let pr = Derivation::apply(
            defs,
            Rule::ExR {
                quantified: ex.clone(),
                witness: z(),
            },
            vec![eq_r(defs, vec![], z())],
        )
        .unwrap();
        let pi = Derivation::apply(
            defs,
            Rule::ExL {
                pos: 0,
                eigen: ("w".into(), nt()),
            },
            vec![top_r(defs, vec![eqn(v("w"), v("w"))])],
        )
        .unwrap();
        out.push(("exR_exL", mc(defs, vec![pr], vec![0], pi)));
    }
    {
        // eqR/eqL with a nonempty Δ so the weakening closure fires
        let pr = eq_r(defs, vec![t()], z());
        let pi = eq_l(defs, vec![zz()], 0, t(), vec![top_r(defs, vec![])]);
        out.push(("eqR_eqL", mc(defs, vec![pr], vec![0], pi)));
    }
    {
        // indR/indL on ev z
        let pr = ev_z_direct(defs);
        let pi = ind_l_trivial(defs, "ev", ev(z()), 0, top_r(defs, vec![t()]));
        out.push(("indR_indL", mc(defs, vec![pr], vec![0], pi)));
    }
    {
        // indR/indL where the left premise unfolds a parameter (indRp)
        let pr = ev_ssz_direct(defs);
        let pi = ind_l_trivial(defs, "ev", ev(num(2)), 0, top_r(defs, vec![t()]));
        out.push(("indR_indL_param", mc(defs, vec![pr], vec![0], pi)));
    }
    {
        // coindR/coindL on conat (s z)
        let pr = conat_sz_proof(defs);
        let xref = crate::term::ParamRef::new("X", "conat");
        let slot = Term::param(xref, pred_ty1());
        let body = defs.unfold("conat", &slot, &[s(z())]).unwrap();
        let pi = Derivation::apply(
            defs,
            Rule::CoindL {
                pos: 0,
                principal: conat(s(z())),
                param: "X".into(),
            },
            vec![top_r(defs, vec![body])],
        )
        .unwrap();
        out.push(("coindR_coindL", mc(defs, vec![pr], vec![0], pi)));
    }
    {
        // coindR/coindL whose continuation unfolds the parameter (coindLp)
        let pr = conat_sz_proof(defs);
        let xref = crate::term::ParamRef::new("X", "conat");
        let slot = Term::param(xref.clone(), pred_ty1());
        let body_sz = defs.unfold("conat", &slot, &[s(z())]).unwrap();
        let (fst, snd) = match logic::view(&body_sz) {
            Some(logic::FormulaView::Or(a, b)) => (a.clone(), b.clone()),
            _ => panic!(),
        };
        // branch 1: [s z = z] |- true  (no unifier)
        let b1 = eq_l(defs, vec![fst], 0, t(), vec![]);
        // branch 2: existsL w; andL2; coindLp; topR
        let b2 = {
            let (_tau, abs) = match logic::view(&snd) {
                Some(logic::FormulaView::Ex(t, a)) => (t, a.clone()),
                _ => panic!(),
            };
            let opened = logic::open_abs(&abs, "w", &nt()).unwrap();
            let (cl, cr) = match logic::view(&opened) {
                Some(logic::FormulaView::And(a, b)) => (a.clone(), b.clone()),
                _ => panic!(),
            };
            let _ = cl;
            let body_w = defs.unfold("conat", &slot, &[v("w")]).unwrap();
            let cilp = Derivation::apply(
                defs,
                Rule::CoindLp {
                    pos: 0,
                    principal: cr.clone(),
                },
                vec![top_r(defs, vec![body_w])],
            )
            .unwrap();
            let andl = Derivation::apply(
                defs,
                Rule::AndL {
                    pos: 0,
                    conj: opened,
                    side: Side::Right,
                },
                vec![cilp],
            )
            .unwrap();
            Derivation::apply(
                defs,
                Rule::ExL {
                    pos: 0,
                    eigen: ("w".into(), nt()),
                },
                vec![andl],
            )
            .unwrap()
        };
        let orl = Derivation::apply(defs, Rule::OrL { pos: 0 }, vec![b1, b2]).unwrap();
        let pi = Derivation::apply(
            defs,
            Rule::CoindL {
                pos: 0,
                principal: conat(s(z())),
                param: "X".into(),
            },
            vec![orl],
        )
        .unwrap();
        out.push(("coindR_coindL_param", mc(defs, vec![pr], vec![0], pi)));
    }

    // --- left-commutative cases ---
    {
        // orL/eqL
        let pr = Derivation::apply(
            defs,
            Rule::OrL { pos: 0 },
            vec![
                eq_r(defs, vec![t()], z()),
                bot_l(defs, vec![logic::bot()], 0, zz()),
            ],
        )
        .unwrap(); // [true \/ false] |- z = z
        let pi = eq_l(defs, vec![zz()], 0, t(), vec![top_r(defs, vec![])]);
        out.push(("orL_eqL", mc(defs, vec![pr], vec![0], pi)));
    }
    {
        // impL/eqL
        let imp_f = logic::imp(t(), zz());
        let pr = Derivation::apply(
            defs,
            Rule::ImpL { pos: 0 },
            vec![top_r(defs, vec![]), init(defs, zz())],
        )
        .unwrap(); // [true => z = z] |- z = z
        let _ = imp_f;
        let pi = eq_l(defs, vec![zz()], 0, t(), vec![top_r(defs, vec![])]);
        out.push(("impL_eqL", mc(defs, vec![pr], vec![0], pi)));
    }
    {
        // indL/eqL
        let pr = ind_l_trivial(defs, "ev", ev(z()), 0, eq_r(defs, vec![t()], z()));
        let pi = eq_l(defs, vec![zz()], 0, t(), vec![top_r(defs, vec![])]);
        out.push(("indL_eqL", mc(defs, vec![pr], vec![0], pi)));
    }
    {
        // eqL/eqL, with a free variable instantiated by the inner unifier
        let pr = eq_l(
            defs,
            vec![eqn(v("y"), z())],
            0,
            eqn(v("y"), v("y")),
            vec![eq_r(defs, vec![], z())],
        ); // [y = z] |- y = y
        let pi = eq_l(
            defs,
            vec![eqn(v("y"), v("y"))],
            0,
            t(),
            vec![top_r(defs, vec![])],
        );
        out.push(("eqL_eqL", mc(defs, vec![pr], vec![0], pi)));
    }
    {
        // subst/eqL
        let pr = subst_node(defs, init(defs, zz()));
        let pi = eq_l(defs, vec![zz()], 0, t(), vec![top_r(defs, vec![])]);
        out.push(("subst_eqL", mc(defs, vec![pr], vec![0], pi)));
    }
    {
        // existsL/eqL: the commuting binder must be freshened
        let pr = Derivation::apply(
            defs,
            Rule::ExL {
                pos: 0,
                eigen: ("w".into(), nt()),
            },
            vec![eq_r(defs, vec![eqn(v("w"), v("w"))], z())],
        )
        .unwrap(); // [exists x, x = x] |- z = z
        let pi = eq_l(defs, vec![zz()], 0, t(), vec![top_r(defs, vec![])]);
        out.push(("exL_eqL", mc(defs, vec![pr], vec![0], pi)));
    }

    // --- right-commutative cases ---
    {
        // -/orL on a non-cut formula
        let disj = logic::or(t(), logic::bot());
        let pi = Derivation::apply(
            defs,
            Rule::OrL { pos: 1 },
            vec![
                top_r(defs, vec![t(), t()]),
                bot_l(defs, vec![t(), logic::bot()], 1, t()),
            ],
        )
        .unwrap(); // [true(cut), true \/ false] |- true
        let _ = disj;
        out.push(("rc_orL", mc(defs, vec![top_r(defs, vec![])], vec![0], pi)));
    }
    {
        // -/impL
        let pi = Derivation::apply(
            defs,
            Rule::ImpL { pos: 1 },
            vec![top_r(defs, vec![t()]), top_r(defs, vec![t(), t()])],
        )
        .unwrap(); // [true(cut), true => true] |- true
        out.push(("rc_impL", mc(defs, vec![top_r(defs, vec![])], vec![0], pi)));
    }
    {
        // -/indL
        let pi = ind_l_trivial(defs, "ev", ev(z()), 1, top_r(defs, vec![t(), t()]));
        out.push(("rc_indL", mc(defs, vec![top_r(defs, vec![])], vec![0], pi)));
    }
    {
        // -/eqL: the other premises are instantiated by the unifier
        let pi = eq_l(
            defs,
            vec![t(), eqn(v("u"), z())],
            1,
            t(),
            vec![top_r(defs, vec![t()])],
        );
        out.push(("rc_eqL", mc(defs, vec![top_r(defs, vec![])], vec![0], pi)));
    }
    {
        // -/subst
        let pi = subst_node(defs, top_r(defs, vec![t()]));
        out.push(("rc_subst", mc(defs, vec![top_r(defs, vec![])], vec![0], pi)));
    }
    {
        // -/andR
        let pi = Derivation::apply(
            defs,
            Rule::AndR,
            vec![top_r(defs, vec![t()]), top_r(defs, vec![t()])],
        )
        .unwrap();
        out.push(("rc_andR", mc(defs, vec![top_r(defs, vec![])], vec![0], pi)));
    }
    {
        // -/impR: cut positions shift under the antecedent
        let pi = Derivation::apply(
            defs,
            Rule::ImpR,
            vec![bot_l(defs, vec![logic::bot(), t()], 0, logic::bot())],
        )
        .unwrap(); // [true] |- false => false
        out.push(("rc_impR", mc(defs, vec![top_r(defs, vec![])], vec![0], pi)));
    }
    {
        // -/forallR
        let pi = Derivation::apply(
            defs,
            Rule::AllR {
                eigen: ("y".into(), nt()),
            },
            vec![eq_r(defs, vec![t()], v("y"))],
        )
        .unwrap();
        out.push(("rc_forallR", mc(defs, vec![top_r(defs, vec![])], vec![0], pi)));
    }
    {
        // -/indR
        let xref = crate::term::ParamRef::new("X", "ev");
        let slot = Term::param(xref, pred_ty1());
        let body = defs.unfold("ev", &slot, &[z()]).unwrap();
        let orr = Derivation::apply(
            defs,
            Rule::OrR {
                disj: body,
                side: Side::Left,
            },
            vec![eq_r(defs, vec![t()], z())],
        )
        .unwrap();
        let pi = Derivation::apply(
            defs,
            Rule::IndR {
                principal: ev(z()),
                param: "X".into(),
            },
            vec![orr],
        )
        .unwrap();
        out.push(("rc_indR", mc(defs, vec![top_r(defs, vec![])], vec![0], pi)));
    }
    {
        // -/coindR
        let inv = Term::lam(nt(), eqn(Term::Bound(0), z()));
        let cont = eq_r(defs, vec![t()], z());
        let body_y = defs.unfold("conat", &inv, &[v("y0")]).unwrap();
        let orr = Derivation::apply(
            defs,
            Rule::OrR {
                disj: defs.unfold("conat", &inv, &[z()]).unwrap(),
                side: Side::Left,
            },
            vec![eq_r(defs, vec![], z())],
        )
        .unwrap();
        let inv_prem = eq_l(defs, vec![eqn(v("y0"), z())], 0, body_y, vec![orr]);
        let pi = Derivation::apply(
            defs,
            Rule::CoindR {
                principal: conat(z()),
                inv,
                inv_vars: vec![("y0".into(), nt())],
            },
            vec![cont, inv_prem],
        )
        .unwrap();
        out.push(("rc_coindR", mc(defs, vec![top_r(defs, vec![])], vec![0], pi)));
    }

    // --- multicut cases ---
    {
        // -/mc: the rightmost premise is itself a multicut
        let inner = mc(defs, vec![init(defs, t())], vec![0], init(defs, t()));
        out.push(("mc_right", mc(defs, vec![top_r(defs, vec![])], vec![0], inner)));
    }
    {
        // mc/eqL: a cut premise ending in a multicut under a left rule
        let pr = mc(defs, vec![eq_r(defs, vec![], z())], vec![0], init(defs, zz()));
        let pi = eq_l(defs, vec![zz()], 0, t(), vec![top_r(defs, vec![])]);
        out.push(("mc_eqL", mc(defs, vec![pr], vec![0], pi)));
    }

    // --- structural cases ---
    {
        // -/cL: contraction on a cut formula
        let pi = Derivation::apply(
            defs,
            Rule::ContractL { keep: 0, dup: 1 },
            vec![top_r(defs, vec![t(), t()])],
        )
        .unwrap();
        let pr = top_r(defs, vec![zz()]);
        out.push(("contract_cut", mc(defs, vec![pr], vec![0], pi)));
    }
    {
        // -/wL: weakening introduces the cut formula
        let pi = Derivation::apply(
            defs,
            Rule::WeakenL {
                pos: 0,
                formula: zz(),
            },
            vec![top_r(defs, vec![])],
        )
        .unwrap();
        let pr = eq_r(defs, vec![t()], z());
        out.push(("weaken_cut", mc(defs, vec![pr], vec![0], pi)));
    }

    // --- axiom cases ---
    {
        // init/eqL
        let pr = init(defs, zz());
        let pi = eq_l(defs, vec![zz()], 0, t(), vec![top_r(defs, vec![])]);
        out.push(("init_eqL", mc(defs, vec![pr], vec![0], pi)));
    }
    {
        // -/init
        let pr = eq_r(defs, vec![], z());
        out.push(("init_right", mc(defs, vec![pr], vec![0], init(defs, zz()))));
    }

    out
}

/// Cut compositions of the derived unfolding proofs, for normalization runs.
pub fn unfold_cut_corpus(defs: &DefTable) -> Vec<(&'static str, Derivation)> {
    let ev_z = crate::kernel::unfold_right(defs, ev_body_proof_z(defs), "ev", &[z()]).unwrap();
    let cut_z = mc(defs, vec![ev_z.clone()], vec![0], init(defs, ev(z())));

    let ssz = num(2);
    let body_ssz = defs
        .unfold("ev", &Term::cnst("ev", pred_ty1()), &[ssz.clone()])
        .unwrap();
    let (_, snd) = match logic::view(&body_ssz) {
        Some(logic::FormulaView::Or(a, b)) => (a.clone(), b.clone()),
        _ => panic!(),
    };
    let pair = Derivation::apply(defs, Rule::AndR, vec![eq_r(defs, vec![], ssz.clone()), ev_z])
        .unwrap();
    let exr = Derivation::apply(
        defs,
        Rule::ExR {
            quantified: snd,
            witness: z(),
        },
        vec![pair],
    )
    .unwrap();
    let orr = Derivation::apply(
        defs,
        Rule::OrR {
            disj: body_ssz,
            side: Side::Right,
        },
        vec![exr],
    )
    .unwrap();
    let ev_ssz = crate::kernel::unfold_right(defs, orr, "ev", &[ssz.clone()]).unwrap();
    let cut_ssz = mc(defs, vec![ev_ssz], vec![0], init(defs, ev(ssz)));

    vec![("unfold_cut_z", cut_z), ("unfold_cut_ssz", cut_ssz)]
}
