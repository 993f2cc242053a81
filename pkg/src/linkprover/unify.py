"""First-order unification of linked selections under binder constraints.

Every quantifier crossed between an item's root and its selection is
profiled: its effective polarity decides whether unification may
instantiate it (forall at negative positions, exists at positive ones);
all other binders act as scoped eigenvariables. A successful unification
also produces a total order on the binders that is consistent both with
their nesting and with the dependencies introduced by the unifier; when
no such order exists the linkage is rejected as cyclic.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Optional, Union

from .syntax import (
    App,
    Eq,
    Exists,
    Forall,
    Formula,
    Imp,
    Node,
    Path,
    Polarity,
    Pred,
    Term,
    Var,
    children,
    free_vars,
    is_formula,
    node_at,
    substitute,
    subst_term,
)


class Side(Enum):
    HYPOTHESIS = "hypothesis"
    CONCLUSION = "conclusion"


@dataclass(frozen=True)
class Binder:
    name: str
    kind: str  # "forall" | "exists"
    polarity: Polarity
    instantiable: bool
    index: int  # nesting depth along the path, outermost first


QuantifierProfile = tuple[Binder, ...]


def profile(item: Formula, path: Path, side: Side) -> QuantifierProfile:
    """Binders enclosing the selection, outermost first.

    Effective polarity starts negative for hypothesis items and positive
    for conclusion items, and flips once per inversion accumulated along
    the context.
    """
    node_at(item, path)  # reject dangling paths before profiling
    start = Polarity.NEGATIVE if side is Side.HYPOTHESIS else Polarity.POSITIVE
    binders: list[Binder] = []
    node: Node = item
    eff = start
    for step in path:
        if isinstance(node, (Forall, Exists)):
            kind = "forall" if isinstance(node, Forall) else "exists"
            inst = (
                eff is Polarity.NEGATIVE
                if kind == "forall"
                else eff is Polarity.POSITIVE
            )
            binders.append(Binder(node.var, kind, eff, inst, len(binders)))
        if isinstance(node, Imp) and step == 0:
            eff = eff.flip()
        node = children(node)[step]
    return tuple(binders)


class Subst:
    """An idempotent substitution: no image mentions a domain variable."""

    def __init__(self, bindings: Optional[dict[str, Term]] = None):
        self.bindings: dict[str, Term] = dict(bindings or {})

    def get(self, name: str) -> Optional[Term]:
        return self.bindings.get(name)

    def domain(self) -> set[str]:
        return set(self.bindings)

    def apply_term(self, t: Term) -> Term:
        for name in sorted(self.bindings):
            t = subst_term(t, name, self.bindings[name])
        return t

    def apply_formula(self, f: Formula) -> Formula:
        for name in sorted(self.bindings):
            f = substitute(f, name, self.bindings[name])
        return f

    def apply(self, node: Node) -> Node:
        return self.apply_formula(node) if is_formula(node) else self.apply_term(node)

    def __repr__(self):
        inner = ", ".join(f"{k} -> {v!r}" for k, v in sorted(self.bindings.items()))
        return f"Subst({inner})"


@dataclass
class UnifySuccess:
    sigma: Subst
    order: tuple[str, ...]


@dataclass
class UnifyFailure:
    reason: str  # "clash" | "occurs_check" | "cycle" | "rigid_mismatch"


UnifyOutcome = Union[UnifySuccess, UnifyFailure]


class _Fail(Exception):
    def __init__(self, reason: str):
        self.reason = reason


class _Unifier:
    """Union-find unification: equated instantiable variables form classes,
    each possibly anchored to a non-variable term or rigid variable. Which
    member of an unanchored class stays quantified is decided afterwards,
    when searching for an acyclic instantiation order."""

    def __init__(self, pa: QuantifierProfile, pb: QuantifierProfile):
        self.pa = pa
        self.pb = pb
        self.instantiable = {b.name for b in pa + pb if b.instantiable}
        # rank: (side, depth); lower side = first argument (hypothesis/source)
        self.rank: dict[str, tuple[int, int]] = {}
        for side, prof in enumerate((pa, pb)):
            for b in prof:
                self.rank[b.name] = (side, b.index)
        self.parent: dict[str, str] = {}
        self.anchor: dict[str, Term] = {}  # class root -> non-variable image
        self.local_rigids: set[str] = set()
        self.fresh_counter = 0

    # -- union-find ----------------------------------------------------------

    def find(self, name: str) -> str:
        root = name
        while self.parent.get(root, root) != root:
            root = self.parent[root]
        while self.parent.get(name, name) != root:
            self.parent[name], name = root, self.parent[name]
        return root

    def deref(self, t: Term) -> Term:
        while isinstance(t, Var) and t.name in self.instantiable:
            root = self.find(t.name)
            anchored = self.anchor.get(root)
            if anchored is None:
                return Var(root)
            t = anchored
        return t

    def occurs(self, root: str, t: Term) -> bool:
        t = self.deref(t)
        if isinstance(t, Var):
            return t.name in self.instantiable and self.find(t.name) == root
        return any(self.occurs(root, a) for a in t.args)

    def set_anchor(self, root: str, t: Term) -> None:
        if self.occurs(root, t):
            raise _Fail("occurs_check")
        self.anchor[root] = t

    def union(self, x: str, y: str) -> None:
        rx, ry = self.find(x), self.find(y)
        if rx == ry:
            return
        ax, ay = self.anchor.pop(rx, None), self.anchor.pop(ry, None)
        self.parent[ry] = rx
        if ax is not None and ay is not None:
            self.set_anchor(rx, ax)
            self.unify_terms(ax, ay)
        elif ax is not None or ay is not None:
            self.set_anchor(rx, ax if ax is not None else ay)

    # -- core loop ----------------------------------------------------------

    def unify_terms(self, s: Term, t: Term) -> None:
        s, t = self.deref(s), self.deref(t)
        if isinstance(s, Var) and isinstance(t, Var) and s.name == t.name:
            return
        s_inst = isinstance(s, Var) and s.name in self.instantiable
        t_inst = isinstance(t, Var) and t.name in self.instantiable
        if s_inst and t_inst:
            self.union(s.name, t.name)
            return
        if s_inst:
            self.set_anchor(self.find(s.name), t)
            return
        if t_inst:
            self.set_anchor(self.find(t.name), s)
            return
        if isinstance(s, Var) or isinstance(t, Var):
            if isinstance(s, Var) and isinstance(t, Var):
                raise _Fail("rigid_mismatch")
            raise _Fail("clash")
        if s.fun != t.fun or len(s.args) != len(t.args):
            raise _Fail("clash")
        for sa, ta in zip(s.args, t.args):
            self.unify_terms(sa, ta)

    def unify_formulas(self, f: Formula, g: Formula) -> None:
        if type(f) is not type(g):
            raise _Fail("clash")
        if isinstance(f, Pred):
            if f.name != g.name or len(f.args) != len(g.args):
                raise _Fail("clash")
            for fa, ga in zip(f.args, g.args):
                self.unify_terms(fa, ga)
            return
        if isinstance(f, Eq):
            self.unify_terms(f.lhs, g.lhs)
            self.unify_terms(f.rhs, g.rhs)
            return
        if isinstance(f, (Forall, Exists)):
            # binders inside the selections are paired up as shared local
            # eigenvariables; they must not leak into the final unifier
            shared = f"'{self.fresh_counter}"
            self.fresh_counter += 1
            self.local_rigids.add(shared)
            self.unify_formulas(
                substitute(f.body, f.var, Var(shared)),
                substitute(g.body, g.var, Var(shared)),
            )
            return
        kids_f, kids_g = children(f), children(g)
        for kf, kg in zip(kids_f, kids_g):
            self.unify_formulas(kf, kg)

    # -- choosing representatives and the instantiation order -----------------

    def classes(self) -> list[tuple[str, list[str]]]:
        by_root: dict[str, list[str]] = {}
        for name in sorted(self.instantiable, key=lambda n: self.rank.get(n, (9, 0))):
            by_root.setdefault(self.find(name), []).append(name)
        return sorted(by_root.items(), key=lambda kv: kv[0])

    def resolve_with(self, t: Term, sink: dict[str, str]) -> Term:
        t = self.deref(t)
        if isinstance(t, Var):
            if t.name in self.instantiable:
                return Var(sink[self.find(t.name)])
            return t
        return App(t.fun, tuple(self.resolve_with(a, sink) for a in t.args))

    def outcome(self) -> UnifyOutcome:
        groups = self.classes()
        # anchored classes have no representative freedom; for free classes
        # prefer the conclusion-side (second argument) outermost binder, so
        # the hypothesis-side variable is the one that gets bound
        choice_lists = []
        for root, members in groups:
            if root in self.anchor:
                choice_lists.append([None])
            else:
                ordered = sorted(members, key=lambda n: (-self.rank[n][0], self.rank[n][1]))
                choice_lists.append(ordered)
        for picks in _product(choice_lists):
            sink = {}
            for (root, _members), pick in zip(groups, picks):
                sink[root] = pick if pick is not None else root
            bindings: dict[str, Term] = {}
            ok = True
            for root, members in groups:
                if root in self.anchor:
                    image = self.resolve_with(self.anchor[root], sink)
                    if free_vars(image) & self.local_rigids:
                        ok = False
                        break
                    for member in members:
                        bindings[member] = image
                else:
                    for member in members:
                        if member != sink[root]:
                            bindings[member] = Var(sink[root])
            if not ok:
                continue
            order = self.order_binders(bindings)
            if order is not None:
                return UnifySuccess(Subst(bindings), order)
        # unifiable, but every representative choice has circular dependencies
        return UnifyFailure("cycle")

    def order_binders(self, bindings: dict[str, Term]) -> Optional[tuple[str, ...]]:
        nodes = [b.name for b in self.pa] + [b.name for b in self.pb]
        edges: dict[str, set[str]] = {n: set() for n in nodes}
        for prof in (self.pa, self.pb):
            for outer, inner in zip(prof, prof[1:]):
                edges[inner.name].add(outer.name)
        for v, image in bindings.items():
            if v not in edges:
                continue
            for w in free_vars(image):
                if w in edges and w != v:
                    edges[v].add(w)
        order: list[str] = []
        placed: set[str] = set()
        while len(order) < len(nodes):
            ready = [n for n in nodes if n not in placed and edges[n] <= placed]
            if not ready:
                return None
            pick = min(ready, key=lambda n: self.rank[n])
            order.append(pick)
            placed.add(pick)
        return tuple(order)


def _product(choice_lists):
    if not choice_lists:
        yield ()
        return
    for head in choice_lists[0]:
        for rest in _product(choice_lists[1:]):
            yield (head,) + rest


def unify(a: Node, b: Node, pa: QuantifierProfile, pb: QuantifierProfile) -> UnifyOutcome:
    """Unify two selections; `a` and `b` are both formulas or both terms.

    Rigid binders act as scoped constants, instantiable ones from either
    side may be bound (full unification, not matching). On success the
    unifier is idempotent, binds only instantiable variables, and comes
    with a binder order witnessing acyclicity of the instantiations;
    when no orientation of the unifier admits such an order the outcome
    is a cycle failure.
    """
    u = _Unifier(pa, pb)
    try:
        if is_formula(a) != is_formula(b):
            raise _Fail("clash")
        if is_formula(a):
            u.unify_formulas(a, b)
        else:
            u.unify_terms(a, b)
    except _Fail as err:
        return UnifyFailure(err.reason)
    return u.outcome()
