"""Classical finite-model evaluation, used as an independent checker.

Formulas are evaluated over explicitly enumerated interpretations on
small domains; equality is identity on the domain. This is a classical
(not Kripke) semantics: it gives a necessary condition for the
intuitionistic claims the engine makes, so a failure here is a definite
bug while success is only evidence.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

from .syntax import (
    And,
    App,
    Bot,
    Eq,
    Exists,
    Forall,
    Formula,
    Imp,
    Node,
    Or,
    Pred,
    Term,
    Top,
    Var,
    children,
)


class UninterpretedSymbol(Exception):
    pass


class ResourceLimit(Exception):
    pass


@dataclass
class FiniteModel:
    size: int
    funcs: dict[str, dict[tuple[int, ...], int]] = field(default_factory=dict)
    preds: dict[str, set[tuple[int, ...]]] = field(default_factory=dict)
    env: dict[str, int] = field(default_factory=dict)


def eval_term(model: FiniteModel, t: Term) -> int:
    if isinstance(t, Var):
        if t.name not in model.env:
            raise UninterpretedSymbol(f"variable {t.name!r} has no value")
        return model.env[t.name]
    if t.fun not in model.funcs:
        raise UninterpretedSymbol(f"function {t.fun!r} not interpreted")
    args = tuple(eval_term(model, a) for a in t.args)
    return model.funcs[t.fun][args]


def evaluate(model: FiniteModel, f: Formula) -> bool:
    """Standard Tarskian satisfaction; quantifiers range over the domain."""
    if isinstance(f, Top):
        return True
    if isinstance(f, Bot):
        return False
    if isinstance(f, Pred):
        if f.name not in model.preds:
            raise UninterpretedSymbol(f"predicate {f.name!r} not interpreted")
        return tuple(eval_term(model, a) for a in f.args) in model.preds[f.name]
    if isinstance(f, Eq):
        return eval_term(model, f.lhs) == eval_term(model, f.rhs)
    if isinstance(f, And):
        return evaluate(model, f.left) and evaluate(model, f.right)
    if isinstance(f, Or):
        return evaluate(model, f.left) or evaluate(model, f.right)
    if isinstance(f, Imp):
        return (not evaluate(model, f.left)) or evaluate(model, f.right)
    assert isinstance(f, (Forall, Exists))
    saved = model.env.get(f.var)
    hits = []
    for value in range(model.size):
        model.env[f.var] = value
        hits.append(evaluate(model, f.body))
    if saved is None:
        model.env.pop(f.var, None)
    else:
        model.env[f.var] = saved
    return all(hits) if isinstance(f, Forall) else any(hits)


def _signature(formulas: list[Formula]) -> tuple[dict[str, int], dict[str, int]]:
    funcs: dict[str, int] = {}
    preds: dict[str, int] = {}

    def walk(node: Node) -> None:
        if isinstance(node, Pred):
            preds[node.name] = len(node.args)
        elif isinstance(node, App):
            funcs[node.fun] = len(node.args)
        for kid in children(node):
            walk(kid)

    for f in formulas:
        walk(f)
    return funcs, preds


def interpretation_count(formulas: list[Formula], size: int) -> int:
    funcs, preds = _signature(formulas)
    total = 1
    for arity in funcs.values():
        total *= size ** (size ** arity)
    for arity in preds.values():
        total *= 2 ** (size ** arity)
    return total


def models(formulas: list[Formula], size: int, budget: int = 10_000_000):
    """Every interpretation of the formulas' symbols on a domain of `size`."""
    if interpretation_count(formulas, size) > budget:
        raise ResourceLimit(
            f"more than {budget} interpretations at domain size {size}"
        )
    funcs, preds = _signature(formulas)
    fun_names = sorted(funcs)
    pred_names = sorted(preds)
    fun_inputs = {f: list(itertools.product(range(size), repeat=funcs[f])) for f in fun_names}
    pred_inputs = {p: list(itertools.product(range(size), repeat=preds[p])) for p in pred_names}

    fun_spaces = [
        itertools.product(range(size), repeat=len(fun_inputs[f])) for f in fun_names
    ]
    pred_spaces = [
        itertools.product((False, True), repeat=len(pred_inputs[p])) for p in pred_names
    ]
    for fun_choice in itertools.product(*fun_spaces):
        fun_tables = {
            f: dict(zip(fun_inputs[f], outputs))
            for f, outputs in zip(fun_names, fun_choice)
        }
        for pred_choice in itertools.product(*pred_spaces):
            pred_tables = {
                p: {args for args, hit in zip(pred_inputs[p], flags) if hit}
                for p, flags in zip(pred_names, pred_choice)
            }
            yield FiniteModel(size, dict(fun_tables), pred_tables)


def entails(hypotheses: list[Formula], conclusion: Formula, max_domain: int = 2,
            budget: int = 10_000_000) -> bool:
    """True iff every interpretation on domains up to `max_domain` that
    satisfies all hypotheses also satisfies the conclusion."""
    everything = list(hypotheses) + [conclusion]
    for size in range(1, max_domain + 1):
        for model in models(everything, size, budget):
            if all(evaluate(model, h) for h in hypotheses) and not evaluate(model, conclusion):
                return False
    return True
