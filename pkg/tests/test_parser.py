import random

import pytest

from gens import print_full_parens, rand_formula
from linkprover.parser import (
    ArityMismatch,
    DuplicateGoal,
    MissingGoal,
    ParseError,
    PEANO_FLAG,
    SymbolTable,
    numeral_value,
    parse_formula,
    parse_problem,
    parse_term,
    print_annotated,
    print_formula,
)
from linkprover.syntax import (
    FALSE,
    And,
    App,
    Forall,
    Imp,
    Or,
    Pred,
    Var,
    alpha_eq,
    const,
    node_at,
)

PEANO = frozenset([PEANO_FLAG])


def test_parse_quantified_implication():
    f = parse_formula("forall x. Hum(x) => Mort(x)")
    assert f == Forall("x", Imp(Pred("Hum", (Var("x"),)), Pred("Mort", (Var("x"),))))


def test_parse_negated_disjunction():
    f = parse_formula("~Rich(h) \\/ ~Rich(Mother(Mother(h)))")
    h = const("h")
    mmh = App("Mother", (App("Mother", (h,)),))
    assert f == Or(Imp(Pred("Rich", (h,)), FALSE), Imp(Pred("Rich", (mmh,)), FALSE))


def test_parse_true():
    from linkprover.syntax import TRUE

    assert parse_formula("true") == TRUE


def test_unicode_aliases():
    assert parse_formula("∀x. P(x) ∧ Q(x) ⇒ ¬R(x,x)") == parse_formula(
        "forall x. P(x) /\\ Q(x) => ~R(x,x)"
    )


def test_precedence():
    assert parse_formula("A /\\ B \\/ C => D") == Imp(
        Or(And(Pred("A"), Pred("B")), Pred("C")), Pred("D")
    )
    assert parse_formula("~A /\\ B") == And(Imp(Pred("A"), FALSE), Pred("B"))


def test_imp_right_associative():
    assert print_formula(parse_formula("A => B => C")) == "A => B => C"
    assert print_formula(parse_formula("(A => B) => C")) == "(A => B) => C"


def test_and_or_left_associative():
    assert print_formula(parse_formula("A /\\ B /\\ C")) == "A /\\ B /\\ C"
    assert print_formula(parse_formula("A /\\ (B /\\ C)")) == "A /\\ (B /\\ C)"


def test_negation_sugar_printing():
    assert print_formula(Imp(Pred("P"), FALSE)) == "~P"
    assert print_formula(parse_formula("~(x = y)")) == "~(x = y)"
    assert print_formula(parse_formula("~~P")) == "~~P"


def test_quantifier_printing():
    assert print_formula(parse_formula("A => forall x. P(x)")) == "A => forall x. P(x)"
    assert print_formula(parse_formula("(forall x. P(x)) => A")) == "(forall x. P(x)) => A"
    assert print_formula(parse_formula("B /\\ (exists y. P(y))")) == "B /\\ (exists y. P(y))"


def test_peano_numerals():
    two = parse_term("2", flags=PEANO)
    assert two == App("S", (App("S", (const("0"),)),))
    assert numeral_value(two) == 2
    assert print_formula(parse_formula("2 = 2", flags=PEANO), PEANO) == "2 = 2"
    # open successor chains do not collapse to decimals
    assert (
        print_formula(parse_formula("S(1 + 0) = 2", flags=PEANO), PEANO)
        == "S(1 + 0) = 2"
    )
    with pytest.raises(ParseError):
        parse_formula("P(2)")  # no flag, no decimal literals


def test_plus_is_left_associative():
    t = parse_term("a + b + c")
    assert t == App("+", (App("+", (const("a"), const("b"))), const("c")))
    assert parse_term("a + (b + c)") != t


def test_syntax_error_position():
    with pytest.raises(ParseError) as err:
        parse_formula("forall x P(x)")
    assert err.value.line == 1
    assert err.value.col >= 10


def test_arity_mismatch():
    table = SymbolTable()
    parse_formula("P(a) => Q(a)", table)
    with pytest.raises(ArityMismatch):
        parse_formula("P(a,b)", table)
    table2 = SymbolTable()
    parse_formula("R(P(a))", table2)  # P is a unary function here
    with pytest.raises(ArityMismatch):
        parse_formula("P(b)", table2)  # and a unary predicate here
    with pytest.raises(ArityMismatch):
        parse_formula("Q(Q(a))", SymbolTable())  # head both predicate and function


def test_annotated_fragments_concatenate():
    f = parse_formula("forall x. Hum(x) => Mort(x) /\\ ~P")
    parts = print_annotated(f)
    assert "".join(text for text, _ in parts) == print_formula(f)
    for _text, path in parts:
        node_at(f, tuple(path))  # every fragment's path resolves


# -- problem files ---------------------------------------------------------

ARISTOTLE = """\
# the classic example
hyp forall x. Hum(x) => Mort(x)
hyp Hum(Socr)
goal Mort(Socr)
"""


def test_parse_problem():
    problem = parse_problem(ARISTOTLE)
    assert len(problem.hypotheses) == 2
    assert print_formula(problem.conclusion) == "Mort(Socr)"
    assert problem.objects == ()


def test_parse_problem_empty_hyps():
    problem = parse_problem("goal true\n")
    assert problem.hypotheses == ()


def test_parse_problem_duplicate_goal():
    with pytest.raises(DuplicateGoal):
        parse_problem("goal A\ngoal B\n")


def test_parse_problem_missing_goal():
    with pytest.raises(MissingGoal):
        parse_problem("hyp A\n")


def test_parse_problem_objects():
    problem = parse_problem("object h\nobject m := Mother(h)\ngoal Rich(h)\n")
    assert problem.objects[0] == ("h", None)
    assert problem.objects[1][0] == "m"


# -- round trips -------------------------------------------------------------

def test_round_trip_random():
    rng = random.Random(42)
    for _ in range(400):
        f = rand_formula(rng, rng.randint(0, 6), with_eq=True)
        printed = print_formula(f)
        again = parse_formula(printed)
        assert alpha_eq(again, f), f"{printed!r} reparsed as {print_formula(again)!r}"


def test_precedence_oracle():
    rng = random.Random(43)
    for _ in range(400):
        f = rand_formula(rng, rng.randint(0, 6), with_eq=True)
        minimal = parse_formula(print_formula(f))
        heavy = parse_formula(print_full_parens(f))
        assert alpha_eq(minimal, heavy)


def test_parser_never_crashes_on_noise():
    # malformed input raises ParseError (or ArityMismatch), never anything else
    rng = random.Random(99)
    alphabet = "ab(),.=+~/\\=> forallexists123"
    for _ in range(500):
        noise = "".join(rng.choice(alphabet) for _ in range(rng.randint(1, 30)))
        try:
            parse_formula(noise)
        except (ParseError, ArityMismatch):
            pass
