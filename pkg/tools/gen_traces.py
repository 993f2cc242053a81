"""Regenerate the shipped trace files in traces/.

Each trace is built by actually applying the actions, asserting the
intermediate states look as intended, and then freezing the resolved
goal/item ids into JSON. Run from the repository root:

    python tools/gen_traces.py
"""

from __future__ import annotations

import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "src"))

from linkprover.state import (  # noqa: E402
    AddExpr,
    AddHyp,
    Click,
    DnD,
    ProofState,
    Trace,
    initial_state,
)

ROOT = Path(__file__).resolve().parent.parent
TRACES = ROOT / "traces"


def find_item(state: ProofState, goal_id: int, text: str, color: str = "blue") -> int:
    goal = state.goal(goal_id)
    hits = [it.id for it in goal.items
            if it.color == color and it.text(state.flags) == text]
    assert hits, f"no {color} item {text!r} in goal {goal_id}: {state.render()}"
    return hits[0]


def build(name: str, problem: str, script, problem_file: str = None) -> None:
    state = initial_state(problem)
    actions = []
    for make in script:
        action = make(state)
        actions.append(action)
        state.apply(action)
    trace = Trace(problem, tuple(actions), expected_goals=len(state.goals))
    (TRACES / f"{name}.json").write_text(trace.to_json() + "\n")
    if problem_file:
        (TRACES / f"{problem_file}.fol").write_text(problem)
    print(f"{name}: {len(actions)} actions, {len(state.goals)} goals left")


ARISTOTLE = """\
hyp forall x. Hum(x) => Mort(x)
hyp Hum(Socr)
goal Mort(Socr)
"""

PEANO = """\
flag peano_numerals
hyp forall x. x = x + 0
hyp forall x. forall y. x + S(y) = S(x + y)
goal 1 + 1 = 2
"""

QUANTIFIER_SWAP = """\
hyp exists y. forall x. R(x,y)
goal forall x'. exists y'. R(x',y')
"""

CYCLIC = """\
hyp forall x. exists y. R(x,y)
goal exists y'. forall x'. R(x',y')
"""

EDUKERA = """\
# A population with at least one member h, a Mother function and a
# Rich predicate: the two assumptions below are incompatible.
object h
hyp forall x. ~Rich(x) \\/ ~Rich(Mother(Mother(x)))
hyp forall x. ~Rich(x) => Rich(Mother(x))
goal false
"""


def gen_aristotle_backward():
    build("aristotle_backward", ARISTOTLE, [
        lambda s: DnD(s.goals[0].id, 1, (0, 1), 3, ()),
        lambda s: DnD(s.goals[0].id, 2, (), s.goals[0].conclusion().id, ()),
    ], problem_file="aristotle")


def gen_aristotle_forward():
    build("aristotle_forward", ARISTOTLE, [
        lambda s: DnD(s.goals[0].id, 2, (), 1, (0, 0)),
        lambda s: DnD(s.goals[0].id,
                      find_item(s, s.goals[0].id, "Mort(Socr)"),
                      (), 3, ()),
    ])


def gen_peano():
    def click_final(s):
        goal = s.goals[0]
        assert goal.conclusion().text(s.flags) == "2 = 2"
        return Click(goal.id, goal.conclusion().id, ())

    build("peano", PEANO, [
        lambda s: DnD(s.goals[0].id, 2, (0, 0, 0), 3, (0,)),
        lambda s: DnD(s.goals[0].id, 1, (0, 1),
                      s.goals[0].conclusion().id, (0, 0)),
        click_final,
    ], problem_file="peano")


def gen_quantifier_swap():
    build("quantifier_swap", QUANTIFIER_SWAP, [
        lambda s: DnD(s.goals[0].id, 1, (0, 0), 2, (0, 0)),
    ], problem_file="quantifier_swap")


def gen_cyclic():
    # the single action is refused by the engine: `check` must fail on it
    state = initial_state(CYCLIC)
    trace = Trace(CYCLIC, (DnD(state.goals[0].id, 1, (0, 0), 2, (0, 0)),),
                  expected_goals=0)
    (TRACES / "cyclic_quantifier.json").write_text(trace.to_json() + "\n")
    (TRACES / "cyclic_quantifier.fol").write_text(CYCLIC)
    print("cyclic_quantifier: 1 action (expected to be refused)")


def gen_edukera():
    M, M2, M3, M4 = ("Mother(h)", "Mother(Mother(h))",
                     "Mother(Mother(Mother(h)))",
                     "Mother(Mother(Mother(Mother(h))))")

    def first(s):
        return s.goals[0].id

    def last(s):
        return s.goals[-1].id

    def forward(src_text, dst_item, dst_path):
        # drop a whole fact onto a selection inside a fixed initial item
        def make(s):
            gid = last(s)
            return DnD(gid, find_item(s, gid, src_text), (), dst_item, dst_path)
        return make

    def forward_to_fact(src_text, dst_text, dst_path):
        def make(s):
            gid = last(s)
            return DnD(gid, find_item(s, gid, src_text), (),
                       find_item(s, gid, dst_text), dst_path)
        return make

    def close_with_false(s):
        gid = last(s)
        return DnD(gid, find_item(s, gid, "false"), (),
                   s.goal(gid).conclusion().id, ())

    build("edukera", EDUKERA, [
        # name an object, then conjecture the instantiated disjunction
        lambda s: AddExpr(first(s), "m", "Mother(h)"),
        lambda s: AddHyp(first(s), f"~Rich(h) \\/ ~Rich({M2})"),
        # prove the conjecture from hypothesis (1)
        lambda s: DnD(last(s), 1, (0,), s.goal(last(s)).conclusion().id, ()),
        # case split on the new fact
        lambda s: Click(first(s), find_item(s, first(s), f"~Rich(h) \\/ ~Rich({M2})"), ()),
        # second case, ~Rich(Mother(Mother(h))): derive facts until absurdity
        forward(f"~Rich({M2})", 2, (0, 0)),
        forward(f"Rich({M3})", 1, (0, 1, 0)),
        forward(f"~Rich({M})", 2, (0, 0)),
        forward_to_fact(f"Rich({M2})", f"~Rich({M2})", (0,)),
        close_with_false,
        # first case, ~Rich(h): same scheme, two rounds up the Mother chain
        forward("~Rich(h)", 2, (0, 0)),
        forward(f"Rich({M})", 1, (0, 0, 0)),
        forward(f"~Rich({M3})", 2, (0, 0)),
        forward(f"Rich({M4})", 1, (0, 1, 0)),
        forward(f"~Rich({M2})", 2, (0, 0)),
        forward_to_fact(f"Rich({M3})", f"~Rich({M3})", (0,)),
        close_with_false,
    ], problem_file="edukera")


if __name__ == "__main__":
    TRACES.mkdir(exist_ok=True)
    gen_aristotle_backward()
    gen_aristotle_forward()
    gen_peano()
    gen_quantifier_swap()
    gen_cyclic()
    gen_edukera()
