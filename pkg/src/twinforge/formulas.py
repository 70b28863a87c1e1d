"""A small quantifier-free formula language over ``<``, ``R`` and ``=``.

Formulas are written as prefix s-expressions, for example
``(and (< x0 x1) (not (R x0 x1)))``. Variable ``xI_J`` denotes coordinate
``J`` of the ``I``-th tuple argument; ``xI`` abbreviates ``xI_0``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Sequence, Union

from .structures import Structure

_VAR = re.compile(r"^x(\d+)(?:_(\d+))?$")
CONNECTIVES = {"and", "or", "not"}
CONSTANTS = {"true", "false"}


@dataclass(frozen=True)
class Var:
    tup: int
    pos: int = 0

    def __str__(self):
        return f"x{self.tup}" if self.pos == 0 else f"x{self.tup}_{self.pos}"


@dataclass(frozen=True)
class Atom:
    rel: str  # relation name or "="
    args: tuple[Var, ...]


@dataclass(frozen=True)
class Op:
    op: str  # and | or | not
    args: tuple["Formula", ...]


@dataclass(frozen=True)
class Const:
    value: bool


Formula = Union[Atom, Op, Const]


def _tokenize(text: str) -> list[str]:
    return re.findall(r"\(|\)|[^\s()]+", text)


def parse(text: str) -> Formula:
    toks = _tokenize(text)
    if not toks:
        raise ValueError("empty formula")
    pos = 0

    def expr() -> Formula:
        nonlocal pos
        if pos >= len(toks):
            raise ValueError("unexpected end of formula")
        tok = toks[pos]
        pos += 1
        if tok in CONSTANTS:
            return Const(tok == "true")
        if tok != "(":
            raise ValueError(f"unexpected token {tok!r}")
        if pos >= len(toks):
            raise ValueError("unexpected end of formula")
        head = toks[pos]
        pos += 1
        args: list = []
        while pos < len(toks) and toks[pos] != ")":
            if head in CONNECTIVES:
                args.append(expr())
            else:
                args.append(_var(toks[pos]))
                pos += 1
        if pos >= len(toks):
            raise ValueError("missing closing parenthesis")
        pos += 1
        if head in CONNECTIVES:
            if head == "not" and len(args) != 1:
                raise ValueError("not takes exactly one argument")
            return Op(head, tuple(args))
        if head in CONSTANTS or head == "(":
            raise ValueError(f"bad head {head!r}")
        return Atom(head, tuple(args))

    out = expr()
    if pos != len(toks):
        raise ValueError("trailing tokens after formula")
    return out


def _var(tok: str) -> Var:
    m = _VAR.match(tok)
    if not m:
        raise ValueError(f"bad variable {tok!r}")
    return Var(int(m.group(1)), int(m.group(2) or 0))


def dumps(phi: Formula) -> str:
    if isinstance(phi, Const):
        return "true" if phi.value else "false"
    if isinstance(phi, Atom):
        return "(" + " ".join([phi.rel, *map(str, phi.args)]) + ")"
    return "(" + " ".join([phi.op, *map(dumps, phi.args)]) + ")"


def as_formula(phi) -> Formula:
    return parse(phi) if isinstance(phi, str) else phi


def variables(phi: Formula) -> set[Var]:
    if isinstance(phi, Const):
        return set()
    if isinstance(phi, Atom):
        return set(phi.args)
    out: set[Var] = set()
    for a in phi.args:
        out |= variables(a)
    return out


def shape(phi: Formula) -> tuple[int, int]:
    """(number of tuple arguments, tuple length) needed to evaluate ``phi``."""
    vs = variables(phi)
    if not vs:
        return 0, 0
    return max(v.tup for v in vs) + 1, max(v.pos for v in vs) + 1


def evaluate(phi, M: Structure, tuples: Sequence[Sequence[int]]) -> bool:
    phi = as_formula(phi)
    if isinstance(phi, Const):
        return phi.value
    if isinstance(phi, Atom):
        vals = tuple(tuples[v.tup][v.pos] for v in phi.args)
        if phi.rel == "=":
            return len(set(vals)) <= 1
        if phi.rel not in M.relations:
            raise KeyError(f"structure has no relation {phi.rel!r}")
        return vals in M.relations[phi.rel]
    if phi.op == "not":
        return not evaluate(phi.args[0], M, tuples)
    if phi.op == "and":
        return all(evaluate(a, M, tuples) for a in phi.args)
    return any(evaluate(a, M, tuples) for a in phi.args)


class FormulaPair:
    """A positive/negative formula pair; holds when ``pos`` does and ``neg`` does not."""

    def __init__(self, pos, neg):
        self.pos = as_formula(pos)
        self.neg = as_formula(neg)

    def __repr__(self):
        return f"FormulaPair({dumps(self.pos)!r}, {dumps(self.neg)!r})"


def holds(phi, M: Structure, tuples) -> bool:
    """Evaluate a formula or a :class:`FormulaPair`."""
    if isinstance(phi, FormulaPair):
        return evaluate(phi.pos, M, tuples) and not evaluate(phi.neg, M, tuples)
    return evaluate(phi, M, tuples)


def arity_of(phi) -> tuple[int, int]:
    if isinstance(phi, FormulaPair):
        a, b = shape(phi.pos), shape(phi.neg)
        return max(a[0], b[0]), max(a[1], b[1])
    return shape(as_formula(phi))


EDGE = "(R x0 x1)"
LESS = "(< x0 x1)"
