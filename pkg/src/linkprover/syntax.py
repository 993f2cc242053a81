"""Syntax trees for single-sorted first-order logic with equality.

Terms and formulas are immutable; every operation returns a new tree.
Subterm addressing uses paths (tuples of child indices), and contexts
carry the inversion count that drives polarity computations.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Iterator, Union


class PathOutOfRange(Exception):
    """A path step does not address a child of the node reached so far."""


class ClassMismatch(Exception):
    """A replacement does not have the syntactic class of the selection."""


# ---------------------------------------------------------------------------
# Terms


@dataclass(frozen=True)
class Var:
    name: str


@dataclass(frozen=True)
class App:
    fun: str
    args: tuple["Term", ...] = ()


Term = Union[Var, App]


def const(name: str) -> App:
    return App(name, ())


# ---------------------------------------------------------------------------
# Formulas


@dataclass(frozen=True)
class Pred:
    name: str
    args: tuple[Term, ...] = ()


@dataclass(frozen=True)
class Eq:
    lhs: Term
    rhs: Term


@dataclass(frozen=True)
class Top:
    pass


@dataclass(frozen=True)
class Bot:
    pass


@dataclass(frozen=True)
class And:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Or:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Imp:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Forall:
    var: str
    body: "Formula"


@dataclass(frozen=True)
class Exists:
    var: str
    body: "Formula"


Formula = Union[Pred, Eq, Top, Bot, And, Or, Imp, Forall, Exists]
Node = Union[Formula, Term]

TRUE = Top()
FALSE = Bot()

Path = tuple[int, ...]


def neg(f: Formula) -> Imp:
    """Negation is sugar: ~A is Imp(A, FALSE)."""
    return Imp(f, FALSE)


def is_formula(node: Node) -> bool:
    return not isinstance(node, (Var, App))


def children(node: Node) -> tuple[Node, ...]:
    """Addressable children, in path-index order."""
    if isinstance(node, (And, Or, Imp)):
        return (node.left, node.right)
    if isinstance(node, (Forall, Exists)):
        return (node.body,)
    if isinstance(node, Eq):
        return (node.lhs, node.rhs)
    if isinstance(node, (Pred, App)):
        return node.args
    return ()


def with_children(node: Node, kids: tuple[Node, ...]) -> Node:
    if isinstance(node, (And, Or, Imp)):
        return type(node)(kids[0], kids[1])
    if isinstance(node, (Forall, Exists)):
        return type(node)(node.var, kids[0])
    if isinstance(node, Eq):
        return Eq(kids[0], kids[1])
    if isinstance(node, (Pred, App)):
        return type(node)(node.name if isinstance(node, Pred) else node.fun, tuple(kids))
    if kids:
        raise PathOutOfRange(f"{node!r} has no children")
    return node


def node_at(item: Node, path: Path) -> Node:
    node = item
    for step in path:
        kids = children(node)
        if not 0 <= step < len(kids):
            raise PathOutOfRange(f"step {step} out of range at {node!r}")
        node = kids[step]
    return node


class Polarity(Enum):
    POSITIVE = "positive"
    NEGATIVE = "negative"

    def flip(self) -> "Polarity":
        return Polarity.NEGATIVE if self is Polarity.POSITIVE else Polarity.POSITIVE


@dataclass(frozen=True)
class Context:
    """A formula with one addressed hole: item == fill(selection)."""

    item: Formula
    path: Path

    def inversions(self) -> int:
        """How many times the hole sits on the left of an implication."""
        count = 0
        node: Node = self.item
        for step in self.path:
            if isinstance(node, Imp) and step == 0:
                count += 1
            node = children(node)[step]
        return count

    def polarity(self) -> Polarity:
        return Polarity.POSITIVE if self.inversions() % 2 == 0 else Polarity.NEGATIVE

    def fill(self, new: Node) -> Formula:
        return replace_at(self.item, self.path, new)

    def binders(self) -> tuple[str, ...]:
        """Names bound by quantifiers enclosing the hole, outermost first."""
        names = []
        node: Node = self.item
        for step in self.path:
            if isinstance(node, (Forall, Exists)):
                names.append(node.var)
            node = children(node)[step]
        return tuple(names)


def resolve(item: Formula, path: Path) -> tuple[Context, Node]:
    """Split an item into the context around `path` and the selection at it."""
    selection = node_at(item, path)
    return Context(item, path), selection


def inversions(item: Formula, path: Path) -> int:
    return Context(item, path).inversions()


def polarity(item: Formula, path: Path) -> Polarity:
    return Context(item, path).polarity()


def replace_at(item: Formula, path: Path, new: Node) -> Formula:
    """Replace exactly the addressed occurrence; all others are untouched."""

    def go(node: Node, todo: Path) -> Node:
        if not todo:
            if is_formula(node) != is_formula(new):
                raise ClassMismatch(
                    f"cannot replace {node!r} with {new!r}: formula/term class differs"
                )
            return new
        step = todo[0]
        kids = children(node)
        if not 0 <= step < len(kids):
            raise PathOutOfRange(f"step {step} out of range at {node!r}")
        kids = tuple(
            go(kid, todo[1:]) if i == step else kid for i, kid in enumerate(kids)
        )
        return with_children(node, kids)

    out = go(item, path)
    assert is_formula(out)
    return out


def all_paths(item: Node, prefix: Path = ()) -> Iterator[tuple[Path, Node]]:
    """Every addressable node of the item, root first, with its path."""
    yield prefix, item
    for i, kid in enumerate(children(item)):
        yield from all_paths(kid, prefix + (i,))


# ---------------------------------------------------------------------------
# Variables, substitution, alpha-equivalence


def free_vars(node: Node) -> set[str]:
    if isinstance(node, Var):
        return {node.name}
    if isinstance(node, (Forall, Exists)):
        return free_vars(node.body) - {node.var}
    out: set[str] = set()
    for kid in children(node):
        out |= free_vars(kid)
    return out


def binder_names(node: Node) -> set[str]:
    out: set[str] = set()
    if isinstance(node, (Forall, Exists)):
        out.add(node.var)
    for kid in children(node):
        out |= binder_names(kid)
    return out


def fresh_name(base: str, used: set[str]) -> str:
    """`base` if unused, else base with the smallest unused numeric suffix."""
    if base not in used:
        return base
    i = 1
    while f"{base}{i}" in used:
        i += 1
    return f"{base}{i}"


def subst_term(t: Term, var: str, value: Term) -> Term:
    if isinstance(t, Var):
        return value if t.name == var else t
    return App(t.fun, tuple(subst_term(a, var, value) for a in t.args))


def substitute(f: Formula, var: str, value: Term) -> Formula:
    """Capture-avoiding substitution of `value` for free occurrences of `var`.

    Binders that would capture a free variable of `value` are renamed with
    the smallest fresh numeric suffix.
    """
    value_free = free_vars(value)

    def go(node: Formula) -> Formula:
        if isinstance(node, (Forall, Exists)):
            if node.var == var:
                return node
            if node.var in value_free and var in free_vars(node.body):
                used = free_vars(node.body) | value_free | {var}
                new_var = fresh_name(node.var, used)
                body = rename_bound(node.body, node.var, new_var)
                return type(node)(new_var, go(body))
            return type(node)(node.var, go(node.body))
        if isinstance(node, (And, Or, Imp)):
            return type(node)(go(node.left), go(node.right))
        if isinstance(node, Pred):
            return Pred(node.name, tuple(subst_term(a, var, value) for a in node.args))
        if isinstance(node, Eq):
            return Eq(subst_term(node.lhs, var, value), subst_term(node.rhs, var, value))
        return node

    return go(f)


def rename_bound(f: Formula, old: str, new: str) -> Formula:
    """Rename free occurrences of `old` to `new` (used when re-binding)."""
    return substitute(f, old, Var(new))


def alpha_eq(f: Node, g: Node) -> bool:
    """Structural equality up to renaming of bound variables."""

    def go(a: Node, b: Node, env_a: dict[str, int], env_b: dict[str, int], depth: int) -> bool:
        if type(a) is not type(b):
            return False
        if isinstance(a, Var):
            assert isinstance(b, Var)
            da, db = env_a.get(a.name), env_b.get(b.name)
            if da is None and db is None:
                return a.name == b.name
            return da == db
        if isinstance(a, (Forall, Exists)):
            assert isinstance(b, (Forall, Exists))
            ea = dict(env_a)
            eb = dict(env_b)
            ea[a.var] = depth
            eb[b.var] = depth
            return go(a.body, b.body, ea, eb, depth + 1)
        if isinstance(a, (Pred, App)):
            assert isinstance(b, (Pred, App))
            name_a = a.name if isinstance(a, Pred) else a.fun
            name_b = b.name if isinstance(b, Pred) else b.fun
            if name_a != name_b or len(a.args) != len(b.args):
                return False
        kids_a, kids_b = children(a), children(b)
        if len(kids_a) != len(kids_b):
            return False
        return all(
            go(ka, kb, env_a, env_b, depth) for ka, kb in zip(kids_a, kids_b)
        )

    return go(f, g, {}, {}, 0)


def barendregt(f: Formula, used: set[str]) -> Formula:
    """Rename binders so each is distinct from `used` and from one another.

    Mutates `used` by adding every binder name finally chosen, so a caller
    can thread one set through several items of a goal.
    """

    def go(node: Formula, ren: dict[str, str]) -> Formula:
        if isinstance(node, (Forall, Exists)):
            new_var = fresh_name(node.var, used)
            used.add(new_var)
            inner = dict(ren)
            inner[node.var] = new_var
            return type(node)(new_var, go(node.body, inner))
        if isinstance(node, (And, Or, Imp)):
            return type(node)(go(node.left, ren), go(node.right, ren))
        if isinstance(node, Pred):
            return Pred(node.name, tuple(ren_term(a, ren) for a in node.args))
        if isinstance(node, Eq):
            return Eq(ren_term(node.lhs, ren), ren_term(node.rhs, ren))
        return node

    def ren_term(t: Term, ren: dict[str, str]) -> Term:
        if isinstance(t, Var):
            return Var(ren.get(t.name, t.name))
        return App(t.fun, tuple(ren_term(a, ren) for a in t.args))

    return go(f, {})


def connective_count(node: Node) -> int:
    """Connectives and quantifiers in the formula (atoms and terms count 0)."""
    if isinstance(node, (And, Or, Imp, Forall, Exists)):
        return 1 + sum(connective_count(k) for k in children(node))
    return 0


def symbols(node: Node) -> dict[str, tuple[str, int]]:
    """Function and predicate symbols with arities: name -> (kind, arity)."""
    out: dict[str, tuple[str, int]] = {}

    def go(n: Node) -> None:
        if isinstance(n, Pred):
            out[n.name] = ("pred", len(n.args))
        elif isinstance(n, App):
            out[n.fun] = ("fun", len(n.args))
        for kid in children(n):
            go(kid)

    go(node)
    return out
