"""Concrete syntax for terms, formulas, problem files and paths.

The grammar is ASCII-first (`/\\ \\/ => ~ forall exists`) with unicode
aliases accepted on input. Printing is canonical: `parse(print(f))` is
alpha-equal to `f`, and the annotated printer additionally tags every
fragment of the output with the path of the node that owns it, which is
what the UI uses for subterm selection.

Precedence: `~` > `/\\` > `\\/` > `=>`; `=>` is right-associative, the
lattice connectives left-associative; quantifier bodies extend maximally
to the right. `+` is the only infix function symbol. Under the
`peano_numerals` flag, decimal literals expand to `S(...S(0)...)` chains
on input and closed chains print back in decimal.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Optional

from .syntax import (
    TRUE,
    FALSE,
    And,
    App,
    Bot,
    Eq,
    Exists,
    Forall,
    Formula,
    Imp,
    Or,
    Path,
    Pred,
    Term,
    Top,
    Var,
    const,
    neg,
)


class ParseError(Exception):
    def __init__(self, message: str, line: int = 0, col: int = 0):
        super().__init__(f"{line}:{col}: {message}" if line else message)
        self.message = message
        self.line = line
        self.col = col


class ArityMismatch(Exception):
    pass


class MissingGoal(Exception):
    pass


class DuplicateGoal(Exception):
    pass


PEANO_FLAG = "peano_numerals"

_UNICODE_ALIASES = {
    "∧": "/\\",
    "∨": "\\/",
    "⇒": "=>",
    "¬": "~",
    "∀": "forall ",
    "∃": "exists ",
    "⊤": "true",
    "⊥": "false",
}

_TOKEN_RE = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<comment>\#[^\n]*)
  | (?P<and>/\\)
  | (?P<or>\\/)
  | (?P<imp>=>)
  | (?P<assign>:=)
  | (?P<ident>[A-Za-z_][A-Za-z0-9_']*)
  | (?P<number>[0-9]+)
  | (?P<punct>[()!,.=+~])
    """,
    re.VERBOSE,
)

KEYWORDS = {"forall", "exists", "true", "false"}


@dataclass
class Token:
    kind: str
    text: str
    line: int
    col: int


def _tokenize(text: str) -> list[Token]:
    for alias, repl in _UNICODE_ALIASES.items():
        text = text.replace(alias, repl)
    tokens = []
    line, col = 1, 1
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            raise ParseError(f"unexpected character {text[pos]!r}", line, col)
        kind = m.lastgroup
        tok = m.group()
        if kind not in ("ws", "comment"):
            if kind == "punct":
                kind = tok
            elif kind in ("and", "or", "imp", "assign"):
                kind = tok
            elif kind == "ident" and tok in KEYWORDS:
                kind = tok
            tokens.append(Token(kind, tok, line, col))
        for ch in tok:
            if ch == "\n":
                line += 1
                col = 1
            else:
                col += 1
        pos = m.end()
    tokens.append(Token("eof", "", line, col))
    return tokens


class SymbolTable:
    """Arity discipline: each symbol's kind and arity is fixed at first use."""

    def __init__(self):
        self.entries: dict[str, tuple[str, int]] = {"+": ("fun", 2)}

    def copy(self) -> "SymbolTable":
        out = SymbolTable()
        out.entries = dict(self.entries)
        return out

    def see(self, name: str, kind: str, arity: int) -> None:
        prior = self.entries.get(name)
        if prior is None:
            self.entries[name] = (kind, arity)
        elif prior != (kind, arity):
            raise ArityMismatch(
                f"symbol {name!r} used as {kind}/{arity} but previously {prior[0]}/{prior[1]}"
            )

    def known(self, name: str) -> bool:
        return name in self.entries

    def names(self) -> set[str]:
        return set(self.entries)


class _Parser:
    def __init__(self, tokens: list[Token], table: SymbolTable, flags: frozenset[str],
                 strict_funs: bool):
        self.tokens = tokens
        self.pos = 0
        self.table = table
        self.flags = flags
        self.strict_funs = strict_funs
        self.bound: list[str] = []

    def peek(self) -> Token:
        return self.tokens[self.pos]

    def next(self) -> Token:
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def expect(self, kind: str) -> Token:
        tok = self.peek()
        if tok.kind != kind:
            raise ParseError(f"expected {kind!r}, found {tok.text!r}", tok.line, tok.col)
        return self.next()

    def fail(self, message: str) -> ParseError:
        tok = self.peek()
        return ParseError(message, tok.line, tok.col)

    # formulas -------------------------------------------------------------

    def formula(self) -> Formula:
        left = self.or_level()
        if self.peek().kind == "=>":
            self.next()
            return Imp(left, self.formula())
        return left

    def or_level(self) -> Formula:
        out = self.and_level()
        while self.peek().kind == "\\/":
            self.next()
            out = Or(out, self.and_level())
        return out

    def and_level(self) -> Formula:
        out = self.unary()
        while self.peek().kind == "/\\":
            self.next()
            out = And(out, self.unary())
        return out

    def unary(self) -> Formula:
        tok = self.peek()
        if tok.kind == "~":
            self.next()
            return neg(self.unary())
        if tok.kind in ("forall", "exists"):
            self.next()
            var = self.expect("ident").text
            self.expect(".")
            self.bound.append(var)
            body = self.formula()
            self.bound.pop()
            return (Forall if tok.kind == "forall" else Exists)(var, body)
        return self.atom()

    def atom(self) -> Formula:
        tok = self.peek()
        if tok.kind == "true":
            self.next()
            return TRUE
        if tok.kind == "false":
            self.next()
            return FALSE
        if tok.kind == "(":
            self.next()
            out = self.formula()
            self.expect(")")
            return out
        # Parse a candidate term first; only once we know whether an `=`
        # follows can the head symbol be classified as predicate or function.
        term = self.term()
        if self.peek().kind == "=":
            self.next()
            rhs = self.term()
            self._register_term(term, tok)
            self._register_term(rhs, tok)
            return Eq(term, rhs)
        if isinstance(term, Var):
            raise ParseError(
                f"bound variable {term.name!r} cannot be used as a formula",
                tok.line, tok.col,
            )
        assert isinstance(term, App)
        if term.fun == "+" or term.fun.isdigit():
            raise ParseError("arithmetic term where a formula was expected",
                             tok.line, tok.col)
        for arg in term.args:
            self._register_term(arg, tok)
        self.table.see(term.fun, "pred", len(term.args))
        return Pred(term.fun, term.args)

    def _register_term(self, t: Term, tok: Token) -> None:
        if isinstance(t, Var):
            return
        if self.strict_funs and not self.table.known(t.fun):
            raise ParseError(f"unknown symbol {t.fun!r}", tok.line, tok.col)
        self.table.see(t.fun, "fun", len(t.args))
        for arg in t.args:
            self._register_term(arg, tok)

    # terms ----------------------------------------------------------------
    # Symbol registration is deferred to _register_term so that atom() can
    # reinterpret the head of an application as a predicate.

    def term(self) -> Term:
        out = self.term_atom()
        while self.peek().kind == "+":
            self.next()
            out = App("+", (out, self.term_atom()))
        return out

    def term_atom(self) -> Term:
        tok = self.peek()
        if tok.kind == "(":
            self.next()
            out = self.term()
            self.expect(")")
            return out
        if tok.kind == "number":
            self.next()
            if PEANO_FLAG not in self.flags:
                raise ParseError(
                    f"decimal literal {tok.text!r} requires the {PEANO_FLAG} flag",
                    tok.line, tok.col,
                )
            out: Term = const("0")
            for _ in range(int(tok.text)):
                out = App("S", (out,))
            return out
        if tok.kind != "ident":
            raise self.fail(f"expected a term, found {tok.text!r}")
        self.next()
        name = tok.text
        if self.peek().kind == "(":
            self.next()
            args = [self.term()]
            while self.peek().kind == ",":
                self.next()
                args.append(self.term())
            self.expect(")")
            return App(name, tuple(args))
        if name in self.bound:
            return Var(name)
        return const(name)


def parse_formula(text: str, table: Optional[SymbolTable] = None,
                  flags: frozenset[str] = frozenset(),
                  strict_funs: bool = False) -> Formula:
    table = table if table is not None else SymbolTable()
    parser = _Parser(_tokenize(text), table, flags, strict_funs)
    out = parser.formula()
    parser.expect("eof")
    return out


def parse_term(text: str, table: Optional[SymbolTable] = None,
               flags: frozenset[str] = frozenset(),
               strict_funs: bool = False) -> Term:
    table = table if table is not None else SymbolTable()
    parser = _Parser(_tokenize(text), table, flags, strict_funs)
    out = parser.term()
    start = parser.tokens[0]
    parser.expect("eof")
    parser._register_term(out, start)
    return out


# ---------------------------------------------------------------------------
# Printing

_LVL_IMP, _LVL_OR, _LVL_AND, _LVL_UNARY, _LVL_ATOM = 1, 2, 3, 4, 5


def numeral_value(t: Term) -> Optional[int]:
    """The decimal value of a closed S-chain, or None."""
    n = 0
    while isinstance(t, App) and t.fun == "S" and len(t.args) == 1:
        n += 1
        t = t.args[0]
    if isinstance(t, App) and t.fun == "0" and not t.args:
        return n
    return None


class _Printer:
    def __init__(self, flags: frozenset[str]):
        self.peano = PEANO_FLAG in flags
        self.parts: list[tuple[str, Path]] = []

    def emit(self, text: str, path: Path) -> None:
        self.parts.append((text, path))

    def formula(self, f: Formula, path: Path, level: int, tail: bool) -> None:
        if isinstance(f, Imp) and isinstance(f.right, Bot):
            self.emit("~", path)
            operand = f.left
            opath = path + (0,)
            if isinstance(operand, (Pred, Top, Bot)) or (
                isinstance(operand, Imp) and isinstance(operand.right, Bot)
            ):
                self.formula(operand, opath, _LVL_UNARY, False)
            else:
                self.emit("(", opath)
                self.formula(operand, opath, 0, True)
                self.emit(")", opath)
            return
        if isinstance(f, (Forall, Exists)):
            wrap = not tail
            if wrap:
                self.emit("(", path)
            self.emit("forall " if isinstance(f, Forall) else "exists ", path)
            self.emit(f.var, path)
            self.emit(". ", path)
            self.formula(f.body, path + (0,), 0, True)
            if wrap:
                self.emit(")", path)
            return
        if isinstance(f, Imp):
            self.binop(f, path, "=>", _LVL_IMP, level, tail, right_assoc=True)
            return
        if isinstance(f, Or):
            self.binop(f, path, "\\/", _LVL_OR, level, tail)
            return
        if isinstance(f, And):
            self.binop(f, path, "/\\", _LVL_AND, level, tail)
            return
        if isinstance(f, Top):
            self.emit("true", path)
            return
        if isinstance(f, Bot):
            self.emit("false", path)
            return
        if isinstance(f, Eq):
            self.term(f.lhs, path + (0,), 0)
            self.emit(" = ", path)
            self.term(f.rhs, path + (1,), 0)
            return
        assert isinstance(f, Pred)
        self.emit(f.name, path)
        if f.args:
            self.emit("(", path)
            for i, arg in enumerate(f.args):
                if i:
                    self.emit(",", path)
                self.term(arg, path + (i,), 0)
            self.emit(")", path)

    def binop(self, f, path: Path, op: str, mylevel: int, level: int, tail: bool,
              right_assoc: bool = False) -> None:
        wrap = mylevel < level
        if wrap:
            self.emit("(", path)
            tail = True
        left_level = mylevel + 1 if right_assoc else mylevel
        right_level = mylevel if right_assoc else mylevel + 1
        self.formula(f.left, path + (0,), left_level, False)
        self.emit(f" {op} ", path)
        self.formula(f.right, path + (1,), right_level, tail and right_assoc)
        if wrap:
            self.emit(")", path)

    def term(self, t: Term, path: Path, level: int) -> None:
        if self.peano:
            value = numeral_value(t)
            if value is not None:
                self.emit(str(value), path)
                return
        if isinstance(t, Var):
            self.emit(t.name, path)
            return
        if t.fun == "+" and len(t.args) == 2:
            wrap = level > 0
            if wrap:
                self.emit("(", path)
            self.term(t.args[0], path + (0,), 0)
            self.emit(" + ", path)
            self.term(t.args[1], path + (1,), 1)
            if wrap:
                self.emit(")", path)
            return
        self.emit(t.fun, path)
        if t.args:
            self.emit("(", path)
            for i, arg in enumerate(t.args):
                if i:
                    self.emit(",", path)
                self.term(arg, path + (i,), 0)
            self.emit(")", path)


def print_annotated(f: Formula, flags: frozenset[str] = frozenset()) -> list[tuple[str, Path]]:
    printer = _Printer(flags)
    printer.formula(f, (), 0, True)
    return printer.parts


def print_formula(f: Formula, flags: frozenset[str] = frozenset()) -> str:
    return "".join(text for text, _ in print_annotated(f, flags))


def print_term(t: Term, flags: frozenset[str] = frozenset()) -> str:
    printer = _Printer(flags)
    printer.term(t, (), 0)
    return "".join(text for text, _ in printer.parts)


# ---------------------------------------------------------------------------
# Problem files


@dataclass(frozen=True)
class ProblemFile:
    flags: frozenset[str]
    hypotheses: tuple[Formula, ...]
    conclusion: Formula
    objects: tuple[tuple[str, Optional[Term]], ...]
    table: SymbolTable = field(compare=False, default_factory=SymbolTable)


def parse_problem(text: str) -> ProblemFile:
    """Line format: `flag <name>`, `hyp <formula>`, `object <name> [:= <term>]`,
    one `goal <formula>` line; `#` starts a comment."""
    lines = text.splitlines()
    flags: set[str] = set()
    for raw in lines:
        line = raw.split("#", 1)[0].strip()
        if line.startswith("flag "):
            flags.add(line[5:].strip())
        elif line == "flag" or (line.startswith("flag") and not line.startswith("flag ")):
            raise ParseError("flag line needs a name", lines.index(raw) + 1, 1)

    table = SymbolTable()
    frozen = frozenset(flags)
    hyps: list[Formula] = []
    objects: list[tuple[str, Optional[Term]]] = []
    goal: Optional[Formula] = None

    for number, raw in enumerate(lines, start=1):
        line = raw.split("#", 1)[0].strip()
        if not line or line.startswith("flag "):
            continue
        if line.startswith("hyp "):
            try:
                hyps.append(parse_formula(line[4:], table, frozen))
            except ParseError as err:
                raise ParseError(err.message, number, err.col) from None
        elif line.startswith("object "):
            rest = line[7:].strip()
            if ":=" in rest:
                name, _, expr = rest.partition(":=")
                name = name.strip()
                term = parse_term(expr.strip(), table, frozen)
            else:
                name, term = rest, None
            if not re.fullmatch(r"[A-Za-z_][A-Za-z0-9_']*", name):
                raise ParseError(f"bad object name {name!r}", number, 1)
            table.see(name, "fun", 0)
            objects.append((name, term))
        elif line.startswith("goal "):
            if goal is not None:
                raise DuplicateGoal(f"line {number}: a goal was already given")
            try:
                goal = parse_formula(line[5:], table, frozen)
            except ParseError as err:
                raise ParseError(err.message, number, err.col) from None
        else:
            raise ParseError(f"unrecognized directive: {line.split()[0]!r}", number, 1)

    if goal is None:
        raise MissingGoal("problem file has no goal line")
    return ProblemFile(frozen, tuple(hyps), goal, tuple(objects), table)
