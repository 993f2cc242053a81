"""Goals, items and user actions: the mutable proof session.

A goal is a set of colored items: blue hypotheses, one red conclusion,
green named objects. Actions (clicks, drag-and-drops, +hyp, +expr, undo,
redo) replace a goal by a new list of goals; the proof is complete when
no goal is left. Every action is serializable and replay-deterministic,
which is what trace files rely on.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Optional, Union

from . import engine
from .engine import Direction, NotALinkage, Selected
from .parser import (
    ParseError,
    ProblemFile,
    SymbolTable,
    parse_formula,
    parse_problem,
    parse_term,
    print_formula,
    print_term,
)
from .syntax import (
    And,
    Eq,
    Exists,
    Forall,
    Formula,
    Imp,
    Or,
    Path,
    PathOutOfRange,
    Term,
    Top,
    barendregt,
    binder_names,
    const,
    fresh_name,
    substitute,
)


class InvalidAction(Exception):
    def __init__(self, reason: str, detail: Optional[str] = None):
        super().__init__(f"{reason}: {detail}" if detail else reason)
        self.reason = reason
        self.detail = detail


class NoClickAction(InvalidAction):
    def __init__(self, detail: Optional[str] = None):
        super().__init__("no_click_action", detail)


class DuplicateName(InvalidAction):
    def __init__(self, name: str):
        super().__init__("duplicate_name", name)


class UnknownSymbol(InvalidAction):
    def __init__(self, detail: str):
        super().__init__("unknown_symbol", detail)


# ---------------------------------------------------------------------------
# Items and goals


@dataclass(frozen=True)
class Item:
    id: int
    color: str  # "red" | "blue" | "green"
    formula: Optional[Formula] = None  # red and blue items
    name: Optional[str] = None  # green items
    definition: Optional[Term] = None  # green items; None for primitive objects

    def text(self, flags: frozenset[str] = frozenset()) -> str:
        if self.color == "green":
            if self.definition is None:
                return self.name
            return f"{self.name} := {print_term(self.definition, flags)}"
        return print_formula(self.formula, flags)


@dataclass(frozen=True)
class Goal:
    id: int
    items: tuple[Item, ...]

    def item(self, item_id: int) -> Item:
        for it in self.items:
            if it.id == item_id:
                return it
        raise InvalidAction("unknown_item", str(item_id))

    def conclusion(self) -> Item:
        reds = [it for it in self.items if it.color == "red"]
        assert len(reds) == 1, "a goal has exactly one red item"
        return reds[0]

    def hypotheses(self) -> tuple[Item, ...]:
        return tuple(it for it in self.items if it.color == "blue")

    def objects(self) -> tuple[Item, ...]:
        return tuple(it for it in self.items if it.color == "green")

    def object_names(self) -> set[str]:
        return {it.name for it in self.objects()}

    def binder_pool(self) -> set[str]:
        out: set[str] = set()
        for it in self.items:
            if it.formula is not None:
                out |= binder_names(it.formula)
        return out


# ---------------------------------------------------------------------------
# Actions


@dataclass(frozen=True)
class Click:
    goal: int
    item: int
    path: Path


@dataclass(frozen=True)
class DnD:
    goal: int
    src_item: int
    src_path: Path
    dst_item: int
    dst_path: Path


@dataclass(frozen=True)
class AddHyp:
    goal: int
    formula: str


@dataclass(frozen=True)
class AddExpr:
    goal: int
    name: str
    term: str


@dataclass(frozen=True)
class Undo:
    pass


@dataclass(frozen=True)
class Redo:
    pass


Action = Union[Click, DnD, AddHyp, AddExpr, Undo, Redo]


def action_to_json(a: Action) -> dict:
    if isinstance(a, Click):
        return {"type": "click", "goal": a.goal, "item": a.item, "path": list(a.path)}
    if isinstance(a, DnD):
        return {
            "type": "dnd", "goal": a.goal,
            "src_item": a.src_item, "src_path": list(a.src_path),
            "dst_item": a.dst_item, "dst_path": list(a.dst_path),
        }
    if isinstance(a, AddHyp):
        return {"type": "add_hyp", "goal": a.goal, "formula": a.formula}
    if isinstance(a, AddExpr):
        return {"type": "add_expr", "goal": a.goal, "name": a.name, "term": a.term}
    if isinstance(a, Undo):
        return {"type": "undo"}
    return {"type": "redo"}


def action_from_json(data: dict) -> Action:
    kind = data.get("type")
    if kind == "click":
        return Click(data["goal"], data["item"], tuple(data["path"]))
    if kind == "dnd":
        return DnD(data["goal"], data["src_item"], tuple(data["src_path"]),
                   data["dst_item"], tuple(data["dst_path"]))
    if kind == "add_hyp":
        return AddHyp(data["goal"], data["formula"])
    if kind == "add_expr":
        return AddExpr(data["goal"], data["name"], data["term"])
    if kind == "undo":
        return Undo()
    if kind == "redo":
        return Redo()
    raise InvalidAction("unknown_action_type", str(kind))


# ---------------------------------------------------------------------------
# The proof state


@dataclass(frozen=True)
class Snapshot:
    goals: tuple[Goal, ...]
    next_item: int
    next_goal: int
    symbols: tuple[tuple[str, tuple[str, int]], ...]


class ProofState:
    """One live proof: open goals, fresh-id counters, undo history."""

    def __init__(self, problem: ProblemFile):
        self.flags = problem.flags
        self.table = problem.table.copy()
        self.next_item = 1
        self.next_goal = 1
        self.undo_stack: list[Snapshot] = []
        self.redo_stack: list[Snapshot] = []

        used = set(self.table.names())
        items: list[Item] = []
        for hyp in problem.hypotheses:
            items.append(Item(self._new_item_id(), "blue", barendregt(hyp, used)))
        items.append(Item(self._new_item_id(), "red", barendregt(problem.conclusion, used)))
        for name, definition in problem.objects:
            items.append(Item(self._new_item_id(), "green", name=name, definition=definition))
        self.goals: list[Goal] = [Goal(self._new_goal_id(), tuple(items))]

    # -- id and name plumbing -------------------------------------------------

    def _new_item_id(self) -> int:
        out = self.next_item
        self.next_item += 1
        return out

    def _new_goal_id(self) -> int:
        out = self.next_goal
        self.next_goal += 1
        return out

    def goal(self, goal_id: int) -> Goal:
        for g in self.goals:
            if g.id == goal_id:
                return g
        raise InvalidAction("unknown_goal", str(goal_id))

    @property
    def solved(self) -> bool:
        return not self.goals

    def _used_names(self, goal: Goal, *skip_items: int) -> set[str]:
        used = set(self.table.names()) | goal.object_names()
        for it in goal.items:
            if it.formula is not None and it.id not in skip_items:
                used |= binder_names(it.formula)
        return used

    def _normalized(self, goal: Goal, f: Formula) -> Formula:
        """Barendregt convention across the whole goal: binders of `f` are
        renamed apart from every other binder and symbol in scope."""
        return barendregt(f, self._used_names(goal))

    # -- actions ---------------------------------------------------------------

    def apply(self, action: Action) -> Optional[tuple[tuple[str, str], ...]]:
        """Apply one action; returns the hidden rule trace for DnD actions."""
        if isinstance(action, Undo):
            if not self.undo_stack:
                raise InvalidAction("nothing_to_undo")
            self.redo_stack.append(self._snapshot())
            self._restore(self.undo_stack.pop())
            return None
        if isinstance(action, Redo):
            if not self.redo_stack:
                raise InvalidAction("nothing_to_redo")
            self.undo_stack.append(self._snapshot())
            self._restore(self.redo_stack.pop())
            return None

        before = self._snapshot()
        try:
            trace: Optional[tuple[tuple[str, str], ...]] = None
            if isinstance(action, Click):
                new_goals = self.click(action.goal, action.item, action.path)
            elif isinstance(action, DnD):
                new_goals, trace = self.dnd(
                    action.goal,
                    (action.src_item, action.src_path),
                    (action.dst_item, action.dst_path),
                )
            elif isinstance(action, AddHyp):
                new_goals = self.add_hyp(action.goal, action.formula)
            elif isinstance(action, AddExpr):
                new_goals = self.add_expr(action.goal, action.name, action.term)
            else:
                raise InvalidAction("unknown_action_type", repr(action))
            self._replace_goal(action.goal, new_goals)
        except InvalidAction:
            self._restore(before)
            raise
        self.undo_stack.append(before)
        self.redo_stack.clear()
        return trace

    def _snapshot(self) -> Snapshot:
        return Snapshot(tuple(self.goals), self.next_item, self.next_goal,
                        tuple(sorted(self.table.entries.items())))

    def _restore(self, snap: Snapshot) -> None:
        self.goals = list(snap.goals)
        self.next_item = snap.next_item
        self.next_goal = snap.next_goal
        table = SymbolTable()
        table.entries = dict(snap.symbols)
        self.table = table

    def _replace_goal(self, goal_id: int, new_goals: list[Goal]) -> None:
        index = next(i for i, g in enumerate(self.goals) if g.id == goal_id)
        self.goals[index:index + 1] = new_goals

    # -- click semantics -------------------------------------------------------

    def click(self, goal_id: int, item_id: int, path: Path) -> list[Goal]:
        goal = self.goal(goal_id)
        item = goal.item(item_id)
        if item.color == "green":
            raise NoClickAction("objects have no click actions")
        f = item.formula

        if item.color == "blue" and path == ():
            if isinstance(f, And):
                halves = (Item(self._new_item_id(), "blue", f.left),
                          Item(self._new_item_id(), "blue", f.right))
                return [self._rebuild(goal, replace={item_id: halves})]
            if isinstance(f, Or):
                left = self._rebuild(goal, replace={
                    item_id: (Item(self._new_item_id(), "blue", f.left),)})
                right = self._rebuild(goal, replace={
                    item_id: (Item(self._new_item_id(), "blue", f.right),)})
                return [left, right]
            if isinstance(f, Exists):
                return [self._intro_object(goal, item, f)]
            raise NoClickAction()

        if item.color == "red":
            if path == ():
                if isinstance(f, And):
                    return [
                        self._rebuild(goal, replace={
                            item_id: (Item(self._new_item_id(), "red", side),)})
                        for side in (f.left, f.right)
                    ]
                if isinstance(f, Imp):
                    new_items = (Item(self._new_item_id(), "blue", f.left),
                                 Item(self._new_item_id(), "red", f.right))
                    return [self._rebuild(goal, replace={item_id: new_items})]
                if isinstance(f, Forall):
                    return [self._intro_object(goal, item, f)]
                if isinstance(f, Eq) and f.lhs == f.rhs:
                    return []  # the goal is solved outright
                raise NoClickAction()
            if isinstance(f, Or) and path in ((0,), (1,)):
                side = f.left if path == (0,) else f.right
                return [self._rebuild(goal, replace={
                    item_id: (Item(self._new_item_id(), "red", side),)})]
        raise NoClickAction()

    def _intro_object(self, goal: Goal, item: Item, f: Union[Forall, Exists]) -> Goal:
        # the opened binder itself is not in the way of its own name
        used = self._used_names(goal, item.id) | (binder_names(f) - {f.var})
        name = fresh_name(f.var, used)
        body = substitute(f.body, f.var, const(name))
        color = "red" if isinstance(f, Forall) else "blue"
        new_items = (
            Item(self._new_item_id(), "green", name=name),
            Item(self._new_item_id(), color, body),
        )
        return self._rebuild(goal, replace={item.id: new_items})

    def _rebuild(self, goal: Goal, replace: dict[int, tuple[Item, ...]]) -> Goal:
        items: list[Item] = []
        for it in goal.items:
            if it.id in replace:
                items.extend(replace[it.id])
            else:
                items.append(it)
        return Goal(self._new_goal_id(), tuple(items))

    # -- drag and drop ---------------------------------------------------------

    def _selected(self, goal: Goal, item_id: int, path: Path) -> Selected:
        item = goal.item(item_id)
        if item.color == "green":
            raise InvalidAction("bad_shape", "objects are not linkable")
        role = "conclusion" if item.color == "red" else "hypothesis"
        return Selected(item.formula, role, path)

    def dnd(self, goal_id: int, src: tuple[int, Path], dst: tuple[int, Path]):
        goal = self.goal(goal_id)
        src_id, src_path = src
        dst_id, dst_path = dst
        if src_id == dst_id:
            raise InvalidAction("bad_shape", "source and destination coincide")
        src_sel = self._selected(goal, src_id, src_path)
        dst_sel = self._selected(goal, dst_id, dst_path)
        try:
            linkage = engine.classify(src_sel, dst_sel)
        except PathOutOfRange as err:
            raise InvalidAction("bad_shape", str(err)) from None
        if isinstance(linkage, NotALinkage):
            raise InvalidAction(linkage.reason, linkage.detail)
        result = engine.execute(linkage, self.flags)

        if linkage.direction is Direction.BACKWARD:
            if isinstance(result.result, Top):
                return [], result.trace  # goal closed, no axiom step needed
            concl = goal.conclusion()
            new = self._normalized_against(goal, result.result, skip=concl.id)
            new_item = Item(self._new_item_id(), "red", new)
            return [self._rebuild(goal, replace={concl.id: (new_item,)})], result.trace

        new = self._normalized_against(goal, result.result)
        new_item = Item(self._new_item_id(), "blue", new)
        return [self._append(goal, new_item)], result.trace

    def _normalized_against(self, goal: Goal, f: Formula, skip: Optional[int] = None) -> Formula:
        used = self._used_names(goal, *( (skip,) if skip is not None else () ))
        return barendregt(f, used)

    def _append(self, goal: Goal, item: Item) -> Goal:
        return Goal(self._new_goal_id(), goal.items + (item,))

    def candidates(self, goal_id: int, src_item: int, src_path: Path,
                   dst_item: int) -> list[tuple[Path, dict]]:
        goal = self.goal(goal_id)
        if goal.item(src_item).color == "green" or goal.item(dst_item).color == "green":
            return []
        if src_item == dst_item:
            return []
        src = self._selected(goal, src_item, src_path)
        dst = goal.item(dst_item)
        role = "conclusion" if dst.color == "red" else "hypothesis"
        try:
            return engine.candidate_paths(src, dst.formula, role)
        except PathOutOfRange as err:
            raise InvalidAction("bad_shape", str(err)) from None

    # -- adding items ------------------------------------------------------------

    def _goal_table(self, goal: Goal) -> SymbolTable:
        table = self.table.copy()
        for name in goal.object_names():
            table.see(name, "fun", 0)
        return table

    def add_hyp(self, goal_id: int, formula_text: str) -> list[Goal]:
        goal = self.goal(goal_id)
        table = self._goal_table(goal)
        try:
            f = parse_formula(formula_text, table, self.flags, strict_funs=True)
        except ParseError as err:
            if "unknown" in err.message:
                raise UnknownSymbol(err.message) from None
            raise InvalidAction("parse_error", str(err)) from None
        # keep newly mentioned predicates, but goal-local objects stay local
        for name, entry in table.entries.items():
            if name not in self.table.entries and name not in goal.object_names():
                self.table.entries[name] = entry
        f = self._normalized(goal, f)
        with_hyp = self._append(goal, Item(self._new_item_id(), "blue", f))
        concl = goal.conclusion()
        subgoal = self._rebuild(goal, replace={
            concl.id: (Item(self._new_item_id(), "red", f),)})
        return [with_hyp, subgoal]

    def add_expr(self, goal_id: int, name: str, term_text: str) -> list[Goal]:
        goal = self.goal(goal_id)
        if name in goal.object_names() or self.table.known(name):
            raise DuplicateName(name)
        try:
            term = parse_term(term_text, self._goal_table(goal), self.flags,
                              strict_funs=True)
        except ParseError as err:
            raise UnknownSymbol(err.message) from None
        item = Item(self._new_item_id(), "green", name=name, definition=term)
        return [self._append(goal, item)]

    # -- rendering ---------------------------------------------------------------

    def render(self) -> str:
        """Canonical textual dump of the whole state, used for replay checks."""
        if self.solved:
            return "QED\n"
        lines = []
        for goal in self.goals:
            lines.append(f"goal {goal.id}:")
            for it in goal.items:
                lines.append(f"  {it.id} {it.color} {it.text(self.flags)}")
        return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# Traces


@dataclass(frozen=True)
class Trace:
    problem: str
    actions: tuple[Action, ...]
    expected_goals: Optional[int] = None

    def to_json(self) -> str:
        data = {
            "problem": self.problem,
            "actions": [action_to_json(a) for a in self.actions],
        }
        if self.expected_goals is not None:
            data["expected_goals"] = self.expected_goals
        return json.dumps(data, indent=2)

    @staticmethod
    def from_json(text: str) -> "Trace":
        data = json.loads(text)
        return Trace(
            data["problem"],
            tuple(action_from_json(a) for a in data.get("actions", ())),
            data.get("expected_goals"),
        )


def initial_state(problem_text: str) -> ProofState:
    return ProofState(parse_problem(problem_text))


def replay(trace: Trace) -> ProofState:
    state = initial_state(trace.problem)
    for action in trace.actions:
        state.apply(action)
    return state
