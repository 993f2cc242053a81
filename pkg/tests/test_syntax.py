import random

import pytest

from gens import free_vars_spelled_out, rand_formula
from linkprover.parser import parse_formula
from linkprover.syntax import (
    App,
    ClassMismatch,
    Context,
    PathOutOfRange,
    Polarity,
    Var,
    all_paths,
    alpha_eq,
    const,
    free_vars,
    inversions,
    node_at,
    polarity,
    replace_at,
    resolve,
    substitute,
)

PEANO = frozenset(["peano_numerals"])


def pf(text, flags=frozenset()):
    return parse_formula(text, flags=flags)


# -- resolve ---------------------------------------------------------------

def test_resolve_squared_subterm():
    from linkprover.syntax import Pred

    item = pf("forall x. Hum(x) => Mort(x)")
    ctx, selection = resolve(item, (0, 1))
    assert selection == Pred("Mort", (Var("x"),))
    assert ctx.fill(selection) == item


def test_resolve_empty_path_is_identity():
    item = pf("P(a)")
    ctx, selection = resolve(item, ())
    assert selection == item
    assert ctx.fill(selection) == item


def test_resolve_equality_side():
    item = parse_formula("1 + 1 = 2", flags=PEANO)
    _, selection = resolve(item, (0,))
    one = App("S", (const("0"),))
    assert selection == App("+", (one, one))


def test_resolve_out_of_range():
    with pytest.raises(PathOutOfRange):
        node_at(pf("P(a)"), (5,))


# -- inversions and polarity -------------------------------------------------

def test_inversion_counts():
    # D /\ [], (D /\ []) => E, ([] => C) => D
    assert inversions(pf("D /\\ A"), (1,)) == 0
    assert inversions(pf("(D /\\ A) => E"), (0, 1)) == 1
    assert inversions(pf("(A => C) => D"), (0, 0)) == 2


def test_polarity_parity():
    assert polarity(pf("A"), ()) is Polarity.POSITIVE
    assert polarity(pf("A => C"), (0,)) is Polarity.NEGATIVE
    assert polarity(pf("(A => C) => D"), (0, 0)) is Polarity.POSITIVE


def test_inversions_match_direct_recount():
    rng = random.Random(7)
    for _ in range(300):
        f = rand_formula(rng, rng.randint(0, 6))
        for path, _node in all_paths(f):
            count = 0
            node = f
            for step in path:
                from linkprover.syntax import Imp, children

                if isinstance(node, Imp) and step == 0:
                    count += 1
                node = children(node)[step]
            assert inversions(f, path) == count


# -- substitution -------------------------------------------------------------

def test_substitute_ground():
    g = parse_formula("forall x. Hum(x) => Mort(x)")
    assert substitute(g.body, "x", const("Socr")) == pf("Hum(Socr) => Mort(Socr)")


def test_substitute_leaves_bound_occurrences():
    f = pf("forall x. P(x)")
    assert substitute(f, "x", const("a")) == f


def test_substitute_capture_avoids():
    from linkprover.syntax import Exists, Pred

    # exists y. R(x,y) with x := f(y) must rename the binder
    opened = Exists("y", Pred("R", (Var("x"), Var("y"))))
    result = substitute(opened, "x", App("f", (Var("y"),)))
    expected = Exists("y1", Pred("R", (App("f", (Var("y"),)), Var("y1"))))
    assert result == expected
    assert free_vars_spelled_out(result) == {"y"}


def test_substitute_freeness():
    rng = random.Random(21)
    for _ in range(300):
        f = rand_formula(rng, rng.randint(0, 5))
        value = App("f", (Var("u"),))
        result = substitute(f, "x", value)
        assert free_vars(result) <= (free_vars(f) - {"x"}) | free_vars(value)
        assert free_vars(result) == free_vars_spelled_out(result)


# -- replace_at ----------------------------------------------------------------

def test_replace_at_rewrites_single_occurrence():
    item = parse_formula("S(1 + 0) = 2", flags=PEANO)
    one = App("S", (const("0"),))
    out = replace_at(item, (0, 0), one)
    assert out == parse_formula("S(1) = 2", flags=PEANO)


def test_replace_at_root():
    assert replace_at(pf("P(a)"), (), pf("Q(b)")) == pf("Q(b)")


def test_replace_at_touches_only_addressed_occurrence():
    f = pf("A /\\ A")
    out = replace_at(f, (1,), pf("B"))
    assert out == pf("A /\\ B")


def test_replace_at_class_mismatch():
    with pytest.raises(ClassMismatch):
        replace_at(pf("P(a)"), (0,), pf("Q(b)"))


def test_resolve_replace_round_trip():
    rng = random.Random(3)
    for _ in range(200):
        f = rand_formula(rng, rng.randint(0, 6), with_eq=True)
        for path, _ in all_paths(f):
            ctx, selection = resolve(f, path)
            assert replace_at(f, path, selection) == f
            assert ctx.fill(selection) == f


# -- alpha equivalence ------------------------------------------------------------

def test_alpha_eq_examples():
    assert alpha_eq(parse_formula("forall x. P(x)"), parse_formula("forall y. P(y)"))
    assert not alpha_eq(pf("P(a)"), pf("P(b)"))
    assert alpha_eq(parse_formula("exists x. x = x"), parse_formula("exists z. z = z"))


def test_alpha_eq_is_equivalence():
    rng = random.Random(11)
    fs = [rand_formula(rng, rng.randint(0, 5)) for _ in range(40)]
    for f in fs:
        assert alpha_eq(f, f)
    for f in fs:
        for g in fs:
            assert alpha_eq(f, g) == alpha_eq(g, f)


def test_substitution_stable_under_alpha():
    f = parse_formula("forall x. P(x) => Q(y)")
    g = parse_formula("forall z. P(z) => Q(y)")
    # both have the free constant y; substitute a term for it
    out_f = substitute(f, "y", const("a"))
    out_g = substitute(g, "y", const("a"))
    assert alpha_eq(out_f, out_g)


def test_context_binders():
    f = parse_formula("forall x. exists y. R(x,y)")
    assert Context(f, (0, 0)).binders() == ("x", "y")
