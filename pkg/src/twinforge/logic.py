"""Filtration games, quantifier-free indiscernibility and farness checks."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterable, Sequence

from .formulas import FormulaPair, arity_of, as_formula, evaluate
from .poset import FinPoset
from .structures import Budget, Structure, as_budget, iter_isomorphisms, qf_type

ISO = "ISO"
ANTI = "ANTI"


@dataclass(frozen=True)
class Filtration:
    """An increasing chain of subuniverses ``M_0 <= ... <= M_{L-1}`` covering ``M``."""

    M: Structure
    stages: tuple[frozenset[int], ...]

    def __post_init__(self):
        st = tuple(frozenset(s) for s in self.stages)
        object.__setattr__(self, "stages", st)
        for a, b in zip(st, st[1:]):
            if not a <= b:
                raise ValueError("stages must be increasing")
        if any(x not in range(self.M.n) for s in st for x in s):
            raise ValueError("stage element outside the universe")
        if not st or st[-1] != frozenset(range(self.M.n)):
            raise ValueError("stages must cover the universe")

    def __len__(self):
        return len(self.stages)


def count_filtration(M: Structure) -> Filtration:
    """Stage ``i`` holds the first ``i`` elements, for ``i = 0..n``."""
    return Filtration(M, tuple(frozenset(range(i)) for i in range(M.n + 1)))


def one_step_filtration(M: Structure) -> Filtration:
    return Filtration(M, (frozenset(), frozenset(range(M.n))))


@dataclass
class GameResult:
    winner: str
    # ISO replies keyed by (previous stage, previous map, moves left, stage chosen)
    strategy: dict = field(default_factory=dict)
    anti_line: list = field(default_factory=list)
    explored: int = 0

    def __bool__(self):
        return self.winner == ISO


def _extensions(Mf: Filtration, Nf: Filtration, alpha: int, f: frozenset, bud: Budget):
    dom, cod = Mf.stages[alpha], Nf.stages[alpha]
    base = dict(f)
    for g in iter_isomorphisms(Mf.M, Nf.M, dom, cod, base, budget=bud):
        yield frozenset(g.items())


def solve_iso_game(Mf: Filtration, Nf: Filtration, zeta: int, budget=None) -> GameResult:
    """Backward induction for the filtration game lasting ``zeta`` moves.

    Stages are indexed ``0..L-1``; each ANTI choice must be strictly larger
    than every earlier one (the first must exceed 0). A player without a
    legal move loses.
    """
    if len(Mf) != len(Nf):
        raise ValueError("filtrations must have the same number of stages")
    bud = as_budget(budget)
    L = len(Mf)
    res = GameResult(ISO)

    @lru_cache(maxsize=None)
    def iso_wins(last: int, f: frozenset, left: int) -> bool:
        if left == 0:
            return True
        for alpha in range(last + 1, L):
            reply = None
            for g in _extensions(Mf, Nf, alpha, f, bud):
                if iso_wins(alpha, g, left - 1):
                    reply = g
                    break
            if reply is None:
                return False
            res.strategy[(last, f, left, alpha)] = dict(reply)
        return True

    win = iso_wins(0, frozenset(), zeta)
    res.winner = ISO if win else ANTI
    if not win:
        res.anti_line = _anti_line(Mf, Nf, zeta, iso_wins, bud)
    res.explored = bud.used
    return res


def _anti_line(Mf, Nf, zeta, iso_wins, bud) -> list:
    """A refuting first move for ANTI."""
    L = len(Mf)
    for alpha in range(1, L):
        if all(not iso_wins(alpha, g, zeta - 1) for g in _extensions(Mf, Nf, alpha, frozenset(), bud)):
            return [alpha]
    return []


def _level(clock: FinPoset, t: int) -> int:
    return clock.height(t)


def solve_tree_clock_game(Mf: Filtration, Nf: Filtration, clock: FinPoset, budget=None) -> GameResult:
    """The filtration game where ANTI must also climb ``clock`` one level per move.

    ISO wins a play as soon as ANTI has no clock node or no stage left.
    """
    if len(Mf) != len(Nf):
        raise ValueError("filtrations must have the same number of stages")
    bud = as_budget(budget)
    L = len(Mf)
    res = GameResult(ISO)

    def next_nodes(t, eps):
        if t is None:
            return [x for x in range(clock.n) if _level(clock, x) == 0]
        return [x for x in range(clock.n) if _level(clock, x) == eps and clock.lt(t, x)]

    @lru_cache(maxsize=None)
    def iso_wins(t, eps: int, last: int, f: frozenset) -> bool:
        for t2 in next_nodes(t, eps):
            for alpha in range(last + 1, L):
                reply = None
                for g in _extensions(Mf, Nf, alpha, f, bud):
                    if iso_wins(t2, eps + 1, alpha, g):
                        reply = g
                        break
                if reply is None:
                    return False
                res.strategy[(t, last, f, t2, alpha)] = dict(reply)
        return True

    res.winner = ISO if iso_wins(None, 0, 0, frozenset()) else ANTI
    res.explored = bud.used
    return res


def chain_clock(zeta: int) -> FinPoset:
    return FinPoset.chain(zeta)


def is_qf_indiscernible(I: Structure, tuples: Sequence[Sequence[int]], bound: int = 3) -> bool:
    """Increasing concatenations of up to ``bound`` tuples all share one qf-type per length."""
    tuples = [tuple(t) for t in tuples]
    for r in range(1, min(bound, len(tuples)) + 1):
        seen = None
        for idx in itertools.combinations(range(len(tuples)), r):
            tp = qf_type(I, sum((tuples[i] for i in idx), ()))
            if seen is None:
                seen = tp
            elif tp != seen:
                return False
    return True


def _preserved(phi, M1: Structure, a: Sequence, M2: Structure, b: Sequence) -> bool:
    if isinstance(phi, FormulaPair):
        ok_pos = not evaluate(phi.pos, M1, a) or evaluate(phi.pos, M2, b)
        ok_neg = not evaluate(phi.neg, M1, a) or evaluate(phi.neg, M2, b)
        return ok_pos and ok_neg
    return evaluate(phi, M1, a) == evaluate(phi, M2, b)


def _norm_phi(phi):
    return phi if isinstance(phi, FormulaPair) else as_formula(phi)


def _as_tuples(witness) -> list[tuple[int, ...]]:
    return [tuple(w) if isinstance(w, (tuple, list)) else (int(w),) for w in witness]


@dataclass(frozen=True)
class FarResult:
    far: bool
    degenerate: bool = False
    counterexample: dict | None = None  # U -> b assignment preserving phi

    def __bool__(self):
        return self.far


def is_far(M1: Structure, M2: Structure, phi, witness, u_min: int | None = None, budget=None) -> FarResult:
    """Every large enough subset of the witness, mapped anywhere in ``M2``, flips ``phi`` somewhere.

    Only subsets of size exactly ``u_min`` are tried; a flip found inside a
    subset is also a flip for every superset.
    """
    phi = _norm_phi(phi)
    bud = as_budget(budget)
    wit = _as_tuples(witness)
    n, k = arity_of(phi)
    k = max(k, max((len(w) for w in wit), default=1))
    u = len(wit) if u_min is None else u_min
    if n > len(wit) or n > u or u > len(wit):
        return FarResult(False, degenerate=True)
    pool = list(itertools.product(range(M2.n), repeat=k))
    for U in itertools.combinations(range(len(wit)), u):
        b = _preserving_assignment(phi, M1, M2, [wit[i] for i in U], n, pool, bud)
        if b is not None:
            return FarResult(False, counterexample={U[i]: b[i] for i in range(u)})
    return FarResult(True)


def _preserving_assignment(phi, M1, M2, a, n, pool, bud):
    """Tuples ``b_i`` so that ``phi`` agrees on every increasing ``n``-subset, or ``None``."""
    m = len(a)
    b: list = []

    def rec(i):
        if i == m:
            return True
        for cand in pool:
            bud.tick()
            b.append(cand)
            ok = True
            if n >= 1 and i + 1 >= n:
                for rest in itertools.combinations(range(i), n - 1):
                    idx = rest + (i,)
                    if not _preserved(phi, M1, [a[j] for j in idx], M2, [b[j] for j in idx]):
                        ok = False
                        break
            if ok and rec(i + 1):
                return True
            b.pop()
        return False

    return list(b) if rec(0) else None


def is_sigma_far(M1: Structure, M2: Structure, phi, witnesses, u_min=None, budget=None) -> FarResult:
    """For every choice of subsets of the witness families, no map of the chosen elements into ``M2`` preserves ``phi``.

    ``u_min`` is an int or one size per family. Preservation is checked on all
    assignments of the formula's variables to chosen elements.
    """
    phi = _norm_phi(phi)
    bud = as_budget(budget)
    fams = [_as_tuples(w) for w in witnesses]
    if isinstance(u_min, Iterable):
        sizes = list(u_min)
    else:
        sizes = [len(f) if u_min is None else u_min for f in fams]
    if len(sizes) != len(fams) or any(s > len(f) for s, f in zip(sizes, fams)):
        return FarResult(False, degenerate=True)
    n, k = arity_of(phi)
    nvars = n * k
    for choice in itertools.product(*(itertools.combinations(range(len(f)), s) for f, s in zip(fams, sizes))):
        dom = sorted({x for f, U in zip(fams, choice) for i in U for x in f[i]})
        g = _preserving_map(phi, M1, M2, dom, n, k, nvars, bud)
        if g is not None:
            return FarResult(False, counterexample={"choice": [list(U) for U in choice], "map": g})
    return FarResult(True)


def _preserving_map(phi, M1, M2, dom, n, k, nvars, bud):
    f: dict = {}

    def split(flat):
        return [flat[i * k:(i + 1) * k] for i in range(n)]

    def ok_with(x):
        assigned = list(f)
        for flat in itertools.product(assigned, repeat=nvars):
            if x not in flat:
                continue
            img = tuple(f[y] for y in flat)
            if not _preserved(phi, M1, split(flat), M2, split(img)):
                return False
        return True

    def rec(i):
        if i == len(dom):
            return True
        x = dom[i]
        for y in range(M2.n):
            bud.tick()
            f[x] = y
            if ok_with(x) and rec(i + 1):
                return True
            del f[x]
        return False

    if nvars == 0:
        return {}
    return dict(f) if rec(0) else None


__all__ = [
    "Filtration", "count_filtration", "one_step_filtration", "GameResult", "solve_iso_game",
    "solve_tree_clock_game", "chain_clock", "is_qf_indiscernible", "is_far", "is_sigma_far",
    "FarResult", "ISO", "ANTI",
]
