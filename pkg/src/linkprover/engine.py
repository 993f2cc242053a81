"""The linking engine: classify a pair of selections, validate it, and
run the rewrite system that turns a drag-and-drop into a result formula.

A valid linkage is reduced step by step: each step strips one connective
or quantifier from one of the two linked operands, growing an outer
context, until the selections meet in an interaction redex (the identity
case or an equality-rewrite case). The redex is resolved, and redundant
units are then normalized away. The full rule trace is kept for audit
even though a UI only shows the final formula.

Strategy, pinned by the golden tests:
  1. invertible rules fire first (left operand before right);
  2. rewrite linkages are driven by the equality-carrying operand; the
     target side only moves when the equality side is blocked or done;
  3. the critical pair F⇒2 / F∨i resolves in favour of F⇒2;
  4. otherwise backward states decompose the conclusion side first,
     forward states the destination (left) operand first;
  5. quantifier rules take the instantiation variant exactly when the
     unifier binds the variable and every variable of the image is
     already in scope, the shift variant when the variable is unbound,
     and wait otherwise.
Forward rules apply to either operand; a swap is never materialized, so
the commutation rule never shows up in traces.
"""

from __future__ import annotations

from dataclasses import dataclass, replace as d_replace
from enum import Enum
from typing import Callable, Optional, Union

from .parser import print_formula
from .syntax import (
    FALSE,
    TRUE,
    And,
    Bot,
    Eq,
    Exists,
    Forall,
    Formula,
    Imp,
    Node,
    Or,
    Path,
    Pred,
    Term,
    Top,
    alpha_eq,
    all_paths,
    children,
    connective_count,
    free_vars,
    inversions,
    is_formula,
    node_at,
    replace_at,
    substitute,
)
from .unify import Side, Subst, UnifyFailure, profile, unify


class StuckState(Exception):
    """No rule applies and no redex matches: unreachable for valid linkages."""


INVERTIBLE = {"L∨1", "L∨2", "R⇒1", "R⇒2", "R∀s", "L∃s", "F∃s"}

RULES = (
    "id", "L=1", "L=2",
    "L∧1", "L∧2", "R∧1", "R∧2",
    "L∨1", "L∨2", "R∨1", "R∨2",
    "L⇒2", "R⇒1", "R⇒2",
    "L∀i", "L∀s", "R∀s", "L∃s", "R∃i", "R∃s",
    "F=1", "F=2", "F∧1", "F∧2", "F∨1", "F∨2",
    "F⇒1", "F⇒2", "F∀i", "F∀s", "F∃s", "Fcomm",
)
UNIT_RULES = ("neul", "neur", "absl", "absr", "absq", "efq")


class Direction(Enum):
    BACKWARD = "backward"
    FORWARD = "forward"


@dataclass(frozen=True)
class RewriteSpec:
    side: str  # "lhs" | "rhs": which side of the equality is selected
    eq_in: str  # "hypothesis" | "conclusion"


@dataclass(frozen=True)
class NotALinkage:
    reason: str  # "bad_shape" | "polarity_violation" | "unification_failure"
    detail: Optional[str] = None

    def describe(self) -> str:
        return f"{self.reason}({self.detail})" if self.detail else self.reason


@dataclass(frozen=True)
class Operand:
    formula: Formula
    path: Path

    def selection(self) -> Node:
        return node_at(self.formula, self.path)


@dataclass(frozen=True)
class Linkage:
    """A validated pair of selections plus everything needed to execute it.

    For backward linkages `left` is the hypothesis operand and `right`
    the conclusion; for forward linkages `left` is the drop destination
    and `right` the dragged source. For rewrite linkages `eq_operand`
    names the side carrying the equality.
    """

    direction: Direction
    rewrite: Optional[RewriteSpec]
    sigma: Subst
    order: tuple[str, ...]
    left: Operand
    right: Operand
    eq_operand: Optional[str] = None  # "left" | "right" for rewrite linkages

    def kind(self) -> dict:
        out = {"direction": self.direction.value}
        if self.rewrite is None:
            out["form"] = "logical"
        else:
            out["form"] = "rewrite"
            out["side"] = self.rewrite.side
            out["equality_in"] = self.rewrite.eq_in
        return out


# ---------------------------------------------------------------------------
# Classification (linkage forms and the polarity conditions)

BACKWARD_PAIRS = {(0, 0), (1, 1), (0, 2)}
FORWARD_PAIRS = {(0, 1), (1, 0)}


@dataclass(frozen=True)
class Selected:
    """One side of a drag: an item's formula, its role, and the selection."""

    formula: Formula
    role: str  # "hypothesis" | "conclusion"
    path: Path


def classify(src: Selected, dst: Selected) -> Union[Linkage, NotALinkage]:
    sel_src = node_at(src.formula, src.path)
    sel_dst = node_at(dst.formula, dst.path)

    if is_formula(sel_src) and is_formula(sel_dst):
        return _classify_logical(src, dst)

    failure: Optional[NotALinkage] = None
    for eq_side, target in ((src, dst), (dst, src)):
        out = _classify_rewrite(eq_side, target, src)
        if isinstance(out, Linkage):
            return out
        if out is not None and (failure is None or failure.reason == "bad_shape"):
            failure = out
    return failure or NotALinkage("bad_shape")


def _classify_logical(src: Selected, dst: Selected) -> Union[Linkage, NotALinkage]:
    if src.role == "conclusion" or dst.role == "conclusion":
        hyp, concl = (dst, src) if src.role == "conclusion" else (src, dst)
        pair = (inversions(hyp.formula, hyp.path), inversions(concl.formula, concl.path))
        if pair not in BACKWARD_PAIRS:
            return NotALinkage("polarity_violation", f"inversion pair {pair}")
        p_hyp = profile(hyp.formula, hyp.path, Side.HYPOTHESIS)
        p_concl = profile(concl.formula, concl.path, Side.CONCLUSION)
        outcome = unify(node_at(hyp.formula, hyp.path), node_at(concl.formula, concl.path),
                        p_hyp, p_concl)
        if isinstance(outcome, UnifyFailure):
            return NotALinkage("unification_failure", outcome.reason)
        return Linkage(Direction.BACKWARD, None, outcome.sigma, outcome.order,
                       Operand(hyp.formula, hyp.path), Operand(concl.formula, concl.path))

    pair = (inversions(src.formula, src.path), inversions(dst.formula, dst.path))
    if pair not in FORWARD_PAIRS:
        return NotALinkage("polarity_violation", f"inversion pair {pair}")
    p_src = profile(src.formula, src.path, Side.HYPOTHESIS)
    p_dst = profile(dst.formula, dst.path, Side.HYPOTHESIS)
    outcome = unify(node_at(src.formula, src.path), node_at(dst.formula, dst.path),
                    p_src, p_dst)
    if isinstance(outcome, UnifyFailure):
        return NotALinkage("unification_failure", outcome.reason)
    return Linkage(Direction.FORWARD, None, outcome.sigma, outcome.order,
                   Operand(dst.formula, dst.path), Operand(src.formula, src.path))


def _is_eq_side(item: Formula, path: Path) -> bool:
    if not path or path[-1] not in (0, 1):
        return False
    parent = node_at(item, path[:-1])
    return isinstance(parent, Eq)


def _binder_inversions(item: Formula, path: Path) -> dict[str, int]:
    """Inversion count of the context of each binder enclosing `path`."""
    out: dict[str, int] = {}
    node: Node = item
    inv = 0
    for step_index in path:
        if isinstance(node, (Forall, Exists)):
            out[node.var] = inv
        if isinstance(node, Imp) and step_index == 0:
            inv += 1
        node = children(node)[step_index]
    return out


def _classify_rewrite(eq_sel: Selected, target: Selected,
                      src: Selected) -> Union[Linkage, NotALinkage, None]:
    """Try to read the pair as `eq_sel` rewriting the term selected in
    `target`. Returns None when the shapes do not fit this form at all."""
    if not _is_eq_side(eq_sel.formula, eq_sel.path):
        return None
    if is_formula(node_at(target.formula, target.path)):
        return None

    eq_inv = inversions(eq_sel.formula, eq_sel.path[:-1])
    side = "lhs" if eq_sel.path[-1] == 0 else "rhs"

    if eq_sel.role == "conclusion":
        # a conclusion equality is usable exactly one implication deep,
        # where the flip rules expose it as a forward redex
        if eq_inv != 1:
            return NotALinkage("polarity_violation",
                               f"equality in conclusion at inversion count {eq_inv}")
        direction = Direction.BACKWARD
        spec = RewriteSpec(side, "conclusion")
        hyp, concl = target, eq_sel
    else:
        # a hypothesis equality must never sit under an implication premise,
        # otherwise no reduction can expose it
        if eq_inv != 0:
            return NotALinkage("polarity_violation",
                               f"equality in hypothesis at inversion count {eq_inv}")
        direction = Direction.BACKWARD if target.role == "conclusion" else Direction.FORWARD
        spec = RewriteSpec(side, "hypothesis")
        hyp, concl = eq_sel, target

    profiles = {
        id(sel): profile(
            sel.formula, sel.path,
            Side.CONCLUSION if sel.role == "conclusion" else Side.HYPOTHESIS,
        )
        for sel in (eq_sel, target)
    }

    if direction is Direction.BACKWARD:
        a, b = hyp, concl  # unifier orientation: hypothesis side to conclusion side
    else:
        a = src  # forward orientation follows the drag, source to destination
        b = target if src is eq_sel else eq_sel
    outcome = unify(node_at(a.formula, a.path), node_at(b.formula, b.path),
                    profiles[id(a)], profiles[id(b)])
    if isinstance(outcome, UnifyFailure):
        return NotALinkage("unification_failure", outcome.reason)

    # every target binder the unifier's images mention must be introducible
    # before the equality is consumed, which the reduction discipline only
    # guarantees outside implication premises
    target_inv = _binder_inversions(target.formula, target.path)
    for image in outcome.sigma.bindings.values():
        for name in free_vars(image):
            if target_inv.get(name, 0) != 0:
                return NotALinkage("unification_failure", "cycle")

    if direction is Direction.BACKWARD:
        left, right = hyp, concl
    else:
        dst = target if src is eq_sel else eq_sel
        left, right = dst, src
    eq_operand = "left" if left is eq_sel else "right"
    return Linkage(direction, spec, outcome.sigma, outcome.order,
                   Operand(left.formula, left.path), Operand(right.formula, right.path),
                   eq_operand)


def candidate_paths(src: Selected, dst_formula: Formula, dst_role: str):
    """All selections in a destination item that make a valid linkage."""
    out = []
    for path, _node in all_paths(dst_formula):
        linkage = classify(src, Selected(dst_formula, dst_role, path))
        if isinstance(linkage, Linkage):
            out.append((path, linkage.kind()))
    return out


# ---------------------------------------------------------------------------
# Interaction states and the linking rules


@dataclass(frozen=True)
class Frame:
    """One layer of the outer context; `kind` names the constructor and
    which side the hole is on."""

    kind: str  # and_l, and_r, or_l, or_r, imp_l, imp_r, forall, exists
    other: Optional[Formula] = None
    var: Optional[str] = None

    def fill(self, hole: Formula) -> Formula:
        if self.kind == "and_l":
            return And(hole, self.other)
        if self.kind == "and_r":
            return And(self.other, hole)
        if self.kind == "or_l":
            return Or(hole, self.other)
        if self.kind == "or_r":
            return Or(self.other, hole)
        if self.kind == "imp_l":
            return Imp(hole, self.other)
        if self.kind == "imp_r":
            return Imp(self.other, hole)
        if self.kind == "forall":
            return Forall(self.var, hole)
        assert self.kind == "exists"
        return Exists(self.var, hole)


@dataclass(frozen=True)
class InteractionState:
    op: str  # "turnstile" | "star"
    left: Operand
    right: Operand
    frames: tuple[Frame, ...]  # outermost first
    rewrite: Optional[RewriteSpec]
    sigma: Subst
    eq_side: Optional[str] = None  # operand carrying the equality, if any

    def fill(self, core: Formula) -> Formula:
        for frame in reversed(self.frames):
            core = frame.fill(core)
        return core

    def context_inversions(self) -> int:
        return sum(1 for f in self.frames if f.kind == "imp_l")

    def scope(self) -> set[str]:
        return {f.var for f in self.frames if f.kind in ("forall", "exists")}


_HOLE = Pred("□")


def render_state(state: InteractionState, flags: frozenset[str] = frozenset()) -> str:
    op = "|-" if state.op == "turnstile" else "*"
    inner = (
        f"[{print_formula(state.left.formula, flags)} {op} "
        f"{print_formula(state.right.formula, flags)}]"
    )
    return print_formula(state.fill(_HOLE), flags).replace("□", inner)


@dataclass(frozen=True)
class Candidate:
    rule: str
    apply: Callable[[], InteractionState]

    @property
    def invertible(self) -> bool:
        return self.rule in INVERTIBLE


def initial_state(linkage: Linkage) -> InteractionState:
    op = "turnstile" if linkage.direction is Direction.BACKWARD else "star"
    return InteractionState(op, linkage.left, linkage.right, (), linkage.rewrite,
                            linkage.sigma, linkage.eq_operand)


def _scope_ok(state: InteractionState, t: Term) -> bool:
    return free_vars(t) <= state.scope()


def _exposed_eq(operand: Operand) -> bool:
    return isinstance(operand.formula, Eq) and operand.path in ((0,), (1,))


def _eq_operands(state: InteractionState):
    """(equality operand, target operand), honouring the linkage's tag."""
    if state.eq_side == "left":
        return state.left, state.right
    if state.eq_side == "right":
        return state.right, state.left
    return None, None


def find_redex(state: InteractionState) -> Optional[str]:
    """The interaction rule that applies, if the state is a redex."""
    if state.rewrite is None:
        if state.op == "turnstile" and not state.left.path and not state.right.path:
            return "id"
        return None
    operand, other = _eq_operands(state)
    if operand is None or not _exposed_eq(operand):
        return None
    if state.op == "turnstile" and operand is not state.left:
        return None  # backward equality redexes keep the equality on the left
    eq = operand.formula
    selected = eq.lhs if operand.path == (0,) else eq.rhs
    occurrence = node_at(other.formula, other.path)
    if not is_formula(occurrence) and occurrence == selected:
        if state.op == "turnstile":
            return "L=1" if operand.path == (0,) else "L=2"
        return "F=1" if operand.path == (0,) else "F=2"
    return None


def interact(state: InteractionState) -> Formula:
    """Resolve a redex: identity turns into ⊤, equality rules rewrite the
    linked occurrence by the other side of the equality."""
    rule = find_redex(state)
    assert rule is not None, "interact on a non-redex state"
    if rule == "id":
        assert alpha_eq(state.left.formula, state.right.formula)
        return state.fill(TRUE)
    eq_operand, other = _eq_operands(state)
    eq = eq_operand.formula
    replacement = eq.rhs if eq_operand.path == (0,) else eq.lhs
    return state.fill(replace_at(other.formula, other.path, replacement))


def _head_rule(state: InteractionState, which: str) -> Optional[Candidate]:
    operand = state.left if which == "left" else state.right
    other = state.right if which == "left" else state.left
    f, path = operand.formula, operand.path
    if not path:
        return None
    step0 = path[0]
    rest = path[1:]
    backward = state.op == "turnstile"

    def update(new_op: str, frames_extra: tuple[Frame, ...], new_self: Operand,
               swap_roles: bool = False) -> Callable[[], InteractionState]:
        def go() -> InteractionState:
            left, right = (new_self, other) if which == "left" else (other, new_self)
            eq_side = state.eq_side
            if swap_roles:
                left, right = (other, new_self)
                if eq_side is not None:
                    eq_side = "right" if eq_side == "left" else "left"
            return d_replace(state, op=new_op, left=left, right=right,
                             frames=state.frames + frames_extra, eq_side=eq_side)
        return go

    if isinstance(f, (Forall, Exists)):
        is_forall = isinstance(f, Forall)
        image = state.sigma.get(f.var)
        prefix = ("L" if which == "left" else "R") if backward else "F"
        # Instantiation variants exist exactly where the binder can be
        # instantiable: ∀ on the hypothesis side of ⊢ or under ∗, ∃ on the
        # conclusion side of ⊢. Everywhere else the binder is rigid.
        can_instantiate = (
            (is_forall and (not backward or which == "left"))
            or (not is_forall and backward and which == "right")
        )
        if not can_instantiate:
            assert image is None, f"unifier bound the rigid binder {f.var!r}"
        if can_instantiate and image is not None:
            if not _scope_ok(state, image):
                return None  # wait until the variables of the image exist
            rule = f"{prefix}∀i" if is_forall else f"{prefix}∃i"
            body = substitute(f.body, f.var, image)
            return Candidate(rule, update(state.op, (), Operand(body, rest)))
        rule = f"{prefix}∀s" if is_forall else f"{prefix}∃s"
        assert f.var not in free_vars(other.formula), "shift rule freshness"
        if backward and which == "left":
            # hypothesis-side shifts dualize the quantifier
            frame_kind = "exists" if is_forall else "forall"
        else:
            frame_kind = "forall" if is_forall else "exists"
        frame = Frame(frame_kind, var=f.var)
        return Candidate(rule, update(state.op, (frame,), Operand(f.body, rest)))

    if isinstance(f, And):
        kept = f.left if step0 == 0 else f.right
        if backward and which == "left":
            rule = "L∧1" if step0 == 0 else "L∧2"
            return Candidate(rule, update(state.op, (), Operand(kept, rest)))
        if backward:
            rule = "R∧1" if step0 == 0 else "R∧2"
            frame = Frame("and_l" if step0 == 0 else "and_r",
                          other=f.right if step0 == 0 else f.left)
            return Candidate(rule, update(state.op, (frame,), Operand(kept, rest)))
        rule = "F∧1" if step0 == 0 else "F∧2"
        return Candidate(rule, update(state.op, (), Operand(kept, rest)))

    if isinstance(f, Or):
        kept = f.left if step0 == 0 else f.right
        if backward and which == "left":
            rule = "L∨1" if step0 == 0 else "L∨2"
            dead = Imp(f.right if step0 == 0 else f.left, other.formula)
            frame = Frame("and_l" if step0 == 0 else "and_r", other=dead)
            return Candidate(rule, update(state.op, (frame,), Operand(kept, rest)))
        rule_prefix = "R" if backward else "F"
        rule = f"{rule_prefix}∨1" if step0 == 0 else f"{rule_prefix}∨2"
        frame = Frame("or_l" if step0 == 0 else "or_r",
                      other=f.right if step0 == 0 else f.left)
        return Candidate(rule, update(state.op, (frame,), Operand(kept, rest)))

    if isinstance(f, Imp):
        if backward and which == "left":
            if step0 == 0:
                return None  # no rule enters a hypothesis premise directly
            frame = Frame("and_r", other=f.left)
            return Candidate("L⇒2", update(state.op, (frame,), Operand(f.right, rest)))
        if backward:  # conclusion side
            if step0 == 0:
                frame = Frame("imp_l", other=f.right)
                return Candidate("R⇒1", update("star", (frame,),
                                               Operand(f.left, rest)))
            frame = Frame("imp_r", other=f.left)
            return Candidate("R⇒2", update(state.op, (frame,), Operand(f.right, rest)))
        if step0 == 0:
            # F⇒1 flips to a backward state: the other operand becomes the
            # hypothesis, the premise the conclusion; applied to the left
            # operand this swaps the sides
            frame = Frame("imp_l", other=f.right)
            return Candidate("F⇒1", update("turnstile", (frame,),
                                           Operand(f.left, rest),
                                           swap_roles=(which == "left")))
        frame = Frame("imp_r", other=f.left)
        return Candidate("F⇒2", update(state.op, (frame,), Operand(f.right, rest)))

    return None


def step(state: InteractionState) -> tuple[str, InteractionState]:
    """Apply exactly one linking rule chosen by the strategy."""
    left_c = _head_rule(state, "left")
    right_c = _head_rule(state, "right")
    if left_c is None and right_c is None:
        raise StuckState(render_state(state))
    for cand in (left_c, right_c):
        if cand is not None and cand.invertible:
            return cand.rule, cand.apply()
    if state.eq_side is not None:
        # rewrite linkages are driven by the equality-carrying operand
        eq_c, other_c = (left_c, right_c) if state.eq_side == "left" else (right_c, left_c)
        pick = eq_c or other_c
        return pick.rule, pick.apply()
    if left_c is not None and right_c is not None:
        rules = {left_c.rule, right_c.rule}
        if "F⇒2" in rules and rules & {"F∨1", "F∨2"}:
            pick = left_c if left_c.rule == "F⇒2" else right_c
            return pick.rule, pick.apply()
    if state.op == "turnstile":
        pick = right_c or left_c
    else:
        pick = left_c or right_c
    return pick.rule, pick.apply()


# ---------------------------------------------------------------------------
# Unit elimination (terminating and confluent)


def _unit_redex(node: Formula) -> Optional[tuple[str, Formula]]:
    if isinstance(node, And):
        if isinstance(node.left, Top):
            return "neul", node.right
        if isinstance(node.right, Top):
            return "neur", node.left
        if isinstance(node.left, Bot):
            return "absl", FALSE
        if isinstance(node.right, Bot):
            return "absr", FALSE
    if isinstance(node, Or):
        if isinstance(node.left, Bot):
            return "neul", node.right
        if isinstance(node.right, Bot):
            return "neur", node.left
        if isinstance(node.left, Top):
            return "absl", TRUE
        if isinstance(node.right, Top):
            return "absr", TRUE
    if isinstance(node, Imp):
        if isinstance(node.left, Top):
            return "neul", node.right
        if isinstance(node.right, Top):
            return "absr", TRUE
        if isinstance(node.left, Bot):
            return "efq", TRUE
    if isinstance(node, Forall) and isinstance(node.body, Top):
        return "absq", TRUE
    if isinstance(node, Exists) and isinstance(node.body, Bot):
        return "absq", FALSE
    return None


def _find_unit_redex(node: Formula, prefix: Path = ()) -> Optional[tuple[Path, str, Formula]]:
    # innermost-leftmost first, so cascades resolve bottom-up
    for i, kid in enumerate(children(node)):
        if is_formula(kid):
            found = _find_unit_redex(kid, prefix + (i,))
            if found:
                return found
    hit = _unit_redex(node)
    if hit:
        return prefix, hit[0], hit[1]
    return None


def eliminate_units(f: Formula) -> tuple[Formula, list[tuple[str, Formula]]]:
    """Normalize away redundant ⊤/⊥; returns the normal form and each
    rewrite applied, with the whole formula after it."""
    steps: list[tuple[str, Formula]] = []
    while True:
        found = _find_unit_redex(f)
        if found is None:
            return f, steps
        path, rule, new = found
        f = replace_at(f, path, new)
        steps.append((rule, f))


# ---------------------------------------------------------------------------
# Execution


@dataclass(frozen=True)
class DnDResult:
    result: Formula
    trace: tuple[tuple[str, str], ...]  # (rule, canonical state rendering)

    @property
    def rules(self) -> tuple[str, ...]:
        return tuple(rule for rule, _ in self.trace)


def execute(linkage: Linkage, flags: frozenset[str] = frozenset()) -> DnDResult:
    """Run the full procedure: link until a redex, interact, eliminate
    units; returns the result formula and the audit trace."""
    state = initial_state(linkage)
    budget = (
        connective_count(state.left.formula)
        + connective_count(state.right.formula)
        + 2
    )
    trace: list[tuple[str, str]] = []
    while find_redex(state) is None:
        if budget <= 0:
            raise StuckState("step budget exhausted: " + render_state(state, flags))
        rule, state = step(state)
        trace.append((rule, render_state(state, flags)))
        budget -= 1
    rule = find_redex(state)
    formula = interact(state)
    trace.append((rule, print_formula(formula, flags)))
    formula, unit_steps = eliminate_units(formula)
    trace.extend((r, print_formula(g, flags)) for r, g in unit_steps)
    return DnDResult(formula, tuple(trace))
