import random

from gens import rand_formula
from linkprover.parser import parse_formula
from linkprover.syntax import App, Polarity, Var, alpha_eq, const
from linkprover.unify import (
    Side,
    Subst,
    UnifyFailure,
    UnifySuccess,
    profile,
    unify,
)


def binder_summary(p):
    return [(b.name, b.kind, b.polarity, b.instantiable) for b in p]


def test_profile_hypothesis_exists_forall():
    item = parse_formula("exists y. forall x. R(x,y)")
    p = profile(item, (0, 0), Side.HYPOTHESIS)
    assert binder_summary(p) == [
        ("y", "exists", Polarity.NEGATIVE, False),
        ("x", "forall", Polarity.NEGATIVE, True),
    ]


def test_profile_conclusion_forall_exists():
    item = parse_formula("forall x'. exists y'. R(x',y')")
    p = profile(item, (0, 0), Side.CONCLUSION)
    assert binder_summary(p) == [
        ("x'", "forall", Polarity.POSITIVE, False),
        ("y'", "exists", Polarity.POSITIVE, True),
    ]


def test_profile_empty():
    assert profile(parse_formula("P(a)"), (), Side.HYPOTHESIS) == ()


def test_profile_flips_under_implication_premise():
    # a forall in the premise of a conclusion implication is instantiable
    item = parse_formula("(forall x. P(x)) => Q(a)")
    p = profile(item, (0, 0), Side.CONCLUSION)
    assert binder_summary(p) == [("x", "forall", Polarity.NEGATIVE, True)]


def test_unify_quantifier_swap():
    hyp = parse_formula("exists y. forall x. R(x,y)")
    concl = parse_formula("forall x'. exists y'. R(x',y')")
    ph = profile(hyp, (0, 0), Side.HYPOTHESIS)
    pc = profile(concl, (0, 0), Side.CONCLUSION)
    out = unify(hyp.body.body, concl.body.body, ph, pc)
    assert isinstance(out, UnifySuccess)
    assert out.sigma.bindings == {"x": Var("x'"), "y'": Var("y")}


def test_unify_cycle():
    hyp = parse_formula("forall x. exists y. R(x,y)")
    concl = parse_formula("exists y'. forall x'. R(x',y')")
    ph = profile(hyp, (0, 0), Side.HYPOTHESIS)
    pc = profile(concl, (0, 0), Side.CONCLUSION)
    out = unify(hyp.body.body, concl.body.body, ph, pc)
    assert isinstance(out, UnifyFailure)
    assert out.reason == "cycle"


def test_unify_simple_binding():
    hyp = parse_formula("forall x. forall y. P(y) => R(x,y)")
    ph = profile(hyp, (0, 0, 0), Side.HYPOTHESIS)
    fact = parse_formula("P(a)")
    out = unify(hyp.body.body.left, fact, ph, ())
    assert isinstance(out, UnifySuccess)
    assert out.sigma.bindings == {"y": const("a")}  # x stays quantified


def test_unify_clash():
    out = unify(App("f", (Var("x"),)), App("g", (Var("x"),)), (), ())
    assert isinstance(out, UnifyFailure)
    assert out.reason == "clash"


def test_unify_occurs_check():
    hyp = parse_formula("forall x. P(x)")
    ph = profile(hyp, (0,), Side.HYPOTHESIS)
    out = unify(Var("x"), App("f", (Var("x"),)), ph, ())
    assert isinstance(out, UnifyFailure)
    assert out.reason == "occurs_check"


def test_unify_rigid_mismatch():
    hyp = parse_formula("exists u. P(u)")
    concl = parse_formula("forall v. P(v)")
    ph = profile(hyp, (0,), Side.HYPOTHESIS)  # u rigid
    pc = profile(concl, (0,), Side.CONCLUSION)  # v rigid
    out = unify(Var("u"), Var("v"), ph, pc)
    assert isinstance(out, UnifyFailure)
    assert out.reason == "rigid_mismatch"


def test_unify_orientation_tie_break():
    # both sides instantiable: the hypothesis-side variable gets bound
    hyp = parse_formula("forall x. A(f(x))")
    concl = parse_formula("exists y. A(f(y))")
    ph = profile(hyp, (0, 0), Side.HYPOTHESIS)
    pc = profile(concl, (0, 0), Side.CONCLUSION)
    out = unify(App("f", (Var("x"),)), App("f", (Var("y"),)), ph, pc)
    assert isinstance(out, UnifySuccess)
    assert out.sigma.bindings == {"x": Var("y")}


def test_unify_formulas_with_binders():
    a = parse_formula("forall z. P(z)")
    b = parse_formula("forall w. P(w)")
    out = unify(a, b, (), ())
    assert isinstance(out, UnifySuccess)
    assert out.sigma.bindings == {}


def test_success_sigma_unifies():
    rng = random.Random(5)
    hits = 0
    for _ in range(500):
        f = rand_formula(rng, rng.randint(0, 3))
        g = f if rng.random() < 0.3 else rand_formula(rng, rng.randint(0, 3))
        out = unify(f, g, (), ())
        if isinstance(out, UnifySuccess):
            hits += 1
            assert alpha_eq(out.sigma.apply_formula(f), out.sigma.apply_formula(g))
    assert hits > 100


def test_subst_idempotent():
    s = Subst({"x": App("f", (const("a"),))})
    t = App("g", (Var("x"), Var("y")))
    assert s.apply_term(s.apply_term(t)) == s.apply_term(t)
