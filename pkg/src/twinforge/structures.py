"""Finite relational structures, quantifier-free types and isomorphism search."""

from __future__ import annotations

import itertools
import os
from dataclasses import dataclass
from typing import Iterable, Iterator, Mapping

from .errors import SearchBudgetExceeded

DEFAULT_BUDGET = 2_000_000


def env_budget(default: int = DEFAULT_BUDGET) -> int:
    raw = os.environ.get("TWINFORGE_BUDGET")
    if not raw:
        return default
    try:
        return max(1, int(raw))
    except ValueError:
        return default


class Budget:
    """Counts search nodes and raises once the limit is passed."""

    def __init__(self, limit: int | None = None):
        self.limit = env_budget() if limit is None else limit
        self.used = 0

    def tick(self, k: int = 1) -> None:
        self.used += k
        if self.used > self.limit:
            raise SearchBudgetExceeded(f"search budget of {self.limit} nodes exhausted")


def as_budget(b) -> Budget:
    return b if isinstance(b, Budget) else Budget(b)


@dataclass(frozen=True)
class Structure:
    """Universe ``0..n-1`` with named relations given as sets of tuples."""

    n: int
    relations: Mapping[str, frozenset[tuple[int, ...]]]
    arities: Mapping[str, int]

    @classmethod
    def make(cls, n: int, relations: Mapping[str, Iterable[tuple]], arities: Mapping[str, int] | None = None):
        rels, ar = {}, dict(arities or {})
        for name, tuples in relations.items():
            ts = frozenset(tuple(int(x) for x in t) for t in tuples)
            for t in ts:
                if any(not 0 <= x < n for x in t):
                    raise ValueError(f"tuple {t} of {name} outside universe")
            if name not in ar:
                lens = {len(t) for t in ts}
                if len(lens) > 1:
                    raise ValueError(f"relation {name} has mixed arity")
                ar[name] = lens.pop() if lens else 2
            rels[name] = ts
        for name in ar:
            rels.setdefault(name, frozenset())
        return cls(n, rels, ar)

    def holds(self, name: str, tup: tuple) -> bool:
        return tuple(tup) in self.relations[name]

    @property
    def vocabulary(self) -> list[str]:
        return sorted(self.relations)

    def restrict(self, keep: Iterable[int]) -> "Structure":
        """Induced substructure, renumbered in increasing id order."""
        keep = sorted(set(keep))
        new = {x: i for i, x in enumerate(keep)}
        rels = {name: [tuple(new[x] for x in t) for t in ts if all(x in new for x in t)]
                for name, ts in self.relations.items()}
        return Structure.make(len(keep), rels, self.arities)


def graph(n: int, edges: Iterable[tuple[int, int]]) -> Structure:
    sym = set()
    for a, b in edges:
        if a == b:
            raise ValueError(f"loop at {a}: graphs are irreflexive")
        sym.add((a, b))
        sym.add((b, a))
    return Structure.make(n, {"R": sym}, {"R": 2})


def ordered_graph(n: int, edges: Iterable[tuple[int, int]] = (), order: Iterable[int] | None = None) -> Structure:
    """Graph plus a linear order; ``order`` lists the elements from the bottom."""
    order = list(range(n)) if order is None else list(order)
    less = {(order[i], order[j]) for i in range(n) for j in range(i + 1, n)}
    g = graph(n, edges)
    return Structure.make(n, {"<": less, "R": g.relations["R"]}, {"<": 2, "R": 2})


def linear_order(n: int) -> Structure:
    return Structure.make(n, {"<": {(i, j) for i in range(n) for j in range(i + 1, n)}}, {"<": 2})


def path(n: int) -> Structure:
    return graph(n, [(i, i + 1) for i in range(n - 1)])


def complete(n: int) -> Structure:
    return graph(n, itertools.combinations(range(n), 2))


def from_org(J) -> Structure:
    """The ordered-graph reduct of an org structure."""
    return ordered_graph(J.n, J.edges, J.order)


def qf_type(M: Structure, tup: tuple) -> tuple:
    """Canonical complete quantifier-free type of ``tup``.

    The descriptor lists the equality pattern and, for each relation, the
    position tuples at which it holds; everything absent is negated.
    """
    tup = tuple(tup)
    k = len(tup)
    eq = tuple((i, j) for i in range(k) for j in range(i + 1, k) if tup[i] == tup[j])
    atoms = []
    for name in M.vocabulary:
        ar = M.arities[name]
        hits = tuple(pos for pos in itertools.product(range(k), repeat=ar)
                     if tuple(tup[i] for i in pos) in M.relations[name])
        atoms.append((name, hits))
    return (k, eq, tuple(atoms))


def _consistent(M: Structure, N: Structure, f: dict, x: int, y: int) -> bool:
    """Would adding ``x -> y`` keep ``f`` a partial isomorphism?"""
    for name, ts in M.relations.items():
        ns = N.relations.get(name, frozenset())
        ar = M.arities[name]
        if ar == 1:
            if ((x,) in ts) != ((y,) in ns):
                return False
        elif ar == 2:
            if ((x, x) in ts) != ((y, y) in ns):
                return False
            for a, b in f.items():
                if ((x, a) in ts) != ((y, b) in ns) or ((a, x) in ts) != ((b, y) in ns):
                    return False
        else:
            dom = list(f) + [x]
            img = dict(f)
            img[x] = y
            for pos in itertools.product(dom, repeat=ar):
                if x not in pos:
                    continue
                if (pos in ts) != (tuple(img[p] for p in pos) in ns):
                    return False
    return True


def iter_isomorphisms(M: Structure, N: Structure, dom: Iterable[int] | None = None,
                      cod: Iterable[int] | None = None, base: Mapping[int, int] | None = None,
                      budget=None) -> Iterator[dict]:
    """All isomorphisms between induced substructures on ``dom`` and ``cod`` extending ``base``."""
    bud = as_budget(budget)
    dom = sorted(range(M.n) if dom is None else set(dom))
    cod = sorted(range(N.n) if cod is None else set(cod))
    if len(dom) != len(cod):
        return
    f = dict(base or {})
    if any(a not in dom for a in f) or any(b not in cod for b in f.values()):
        return
    if len(set(f.values())) != len(f):
        return
    # the base itself must be a partial isomorphism
    chk: dict = {}
    for a, b in f.items():
        if not _consistent(M, N, chk, a, b):
            return
        chk[a] = b
    todo = [a for a in dom if a not in f]
    free = [b for b in cod if b not in set(f.values())]

    def rec(i: int, used: set):
        if i == len(todo):
            yield dict(f)
            return
        x = todo[i]
        for y in free:
            if y in used:
                continue
            bud.tick()
            if _consistent(M, N, f, x, y):
                f[x] = y
                used.add(y)
                yield from rec(i + 1, used)
                used.discard(y)
                del f[x]

    yield from rec(0, set())


def search_isomorphism(M1: Structure, M2: Structure, budget=None) -> dict | None:
    """An isomorphism ``M1 -> M2`` or ``None`` when none exists."""
    if M1.n != M2.n or set(M1.relations) != set(M2.relations):
        return None
    if any(len(M1.relations[r]) != len(M2.relations[r]) for r in M1.relations):
        return None
    return next(iter_isomorphisms(M1, M2, budget=budget), None)


def is_isomorphism(M: Structure, N: Structure, f: Mapping[int, int]) -> bool:
    if sorted(f) != list(range(M.n)) or sorted(f.values()) != list(range(N.n)):
        return False
    for name, ts in M.relations.items():
        if {tuple(f[x] for x in t) for t in ts} != set(N.relations.get(name, ())):
            return False
    return True
