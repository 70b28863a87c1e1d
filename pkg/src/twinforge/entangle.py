"""Entangled families, the pair-coloring property and the unembeddability oracle."""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

from .errors import FamilyViolatesUniformity, InvalidParameter
from .formulas import as_formula, evaluate
from .org import OrgStructure
from .structures import Structure, as_budget, qf_type
from .twinship import TwinshipParam
from .words import eval_word, is_formally_reduced, iter_words, word_compatible

SEPARATED_NOTE = "families are restricted to separated ones (each tuple lies wholly below the next)"

GAMMA_ORG = (
    ("(and (< x0 x1) (R x0 x1))", "(and (< x0 x1) (not (R x0 x1)))"),
)


@dataclass(frozen=True)
class TupleFamily:
    """Equal-length tuples without repetitions and with pairwise disjoint supports."""

    tuples: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        ts = tuple(tuple(int(x) for x in t) for t in self.tuples)
        object.__setattr__(self, "tuples", ts)
        if len({len(t) for t in ts}) > 1:
            raise InvalidParameter("tuples must share one length")
        used: set = set()
        for t in ts:
            if len(set(t)) != len(t):
                raise InvalidParameter(f"tuple {t} repeats an element")
            if used & set(t):
                raise InvalidParameter(f"tuple {t} overlaps an earlier tuple")
            used |= set(t)

    @property
    def eps(self) -> int:
        return len(self.tuples[0]) if self.tuples else 0

    def __len__(self):
        return len(self.tuples)

    @classmethod
    def singletons(cls, elements: Iterable[int]) -> "TupleFamily":
        return cls(tuple((x,) for x in elements))


@dataclass(frozen=True)
class EntangleResult:
    holds: bool
    failing: tuple | None = None  # the unrealized pattern, as sorted (zeta, xi) pairs
    admissible: int | None = None

    def __bool__(self):
        return self.holds


def _adjacency(G):
    if isinstance(G, OrgStructure):
        return G.adjacent
    rel = G.relations["R"]
    return lambda a, b: (a, b) in rel


def _pattern(adj, a, b, eps) -> frozenset:
    return frozenset((z, x) for z in range(eps) for x in range(eps) if adj(a[z], b[x]))


def _all_patterns(eps: int):
    cells = [(z, x) for z in range(eps) for x in range(eps)]
    for bits in itertools.product((0, 1), repeat=len(cells)):
        yield frozenset(c for c, b in zip(cells, bits) if b)


def graph_entangled(G, fam: TupleFamily) -> EntangleResult:
    """Every edge pattern between two tuples is realized by some earlier/later pair."""
    adj = _adjacency(G)
    seen = {_pattern(adj, a, b, fam.eps) for a, b in itertools.combinations(fam.tuples, 2)}
    for X in _all_patterns(fam.eps):
        if X not in seen:
            return EntangleResult(False, tuple(sorted(X)))
    return EntangleResult(True)


def _moves(I: OrgStructure, fam: TupleFamily, o, gamma: int) -> frozenset:
    a = fam.tuples[gamma]
    pos = {x: i for i, x in enumerate(a)}
    out = set()
    for z, x in enumerate(a):
        y = eval_word(I.maps, o, x)
        if y is not None and y in pos:
            out.add((z, pos[y]))
    return frozenset(out)


def org_entangled(I: OrgStructure, fam: TupleFamily, p: TwinshipParam, word_len: int = 3) -> EntangleResult:
    """Entanglement restricted to patterns closed under the word-transport proviso.

    Words are the formally reduced ones of length at most ``word_len``.
    Raises :class:`FamilyViolatesUniformity` when the family's word or order
    pattern varies between tuples.
    """
    eps = fam.eps
    nodes = I.active_nodes()
    words = [o for o in iter_words(nodes, word_len, reduced=True)]
    moving = {}
    for o in words:
        pats = {_moves(I, fam, o, g) for g in range(len(fam))}
        if len(pats) > 1:
            raise FamilyViolatesUniformity("(d)", f"word {list(o)} moves tuples differently")
        pat = pats.pop() if pats else frozenset()
        if pat:
            moving[o] = pat
    orders = set()
    for a, b in itertools.combinations(fam.tuples, 2):
        orders.add(frozenset((z, x) for z in range(eps) for x in range(eps) if I.less(a[z], b[x])))
    if len(orders) > 1:
        raise FamilyViolatesUniformity("(e)", "order pattern between tuples is not uniform")

    cells = [(z, x) for z in range(eps) for x in range(eps)]
    parent = {c: c for c in cells}

    def find(c):
        while parent[c] != c:
            parent[c] = parent[parent[c]]
            c = parent[c]
        return c

    items = list(moving.items())
    for (o1, m1), (o2, m2) in itertools.product(items, repeat=2):
        if not word_compatible(p.T, o1, o2):
            continue
        for z1, x1 in m1:
            for z2, x2 in m2:
                parent[find((z1, z2))] = find((x1, x2))
    classes: dict = {}
    for c in cells:
        classes.setdefault(find(c), []).append(c)
    groups = list(classes.values())
    adj = _adjacency(I)
    seen = {_pattern(adj, a, b, eps) for a, b in itertools.combinations(fam.tuples, 2)}
    for bits in itertools.product((0, 1), repeat=len(groups)):
        X = frozenset(c for g, b in zip(groups, bits) if b for c in g)
        if X not in seen:
            return EntangleResult(False, tuple(sorted(X)), admissible=2 ** len(groups))
    return EntangleResult(True, admissible=2 ** len(groups))


class Coloring:
    """A color for every unordered pair of ``0..lam-1``."""

    def __init__(self, lam: int, colors: Mapping):
        self.lam = lam
        self._c = {}
        for k, v in colors.items():
            a, b = tuple(k)
            if a == b or not (0 <= a < lam and 0 <= b < lam):
                raise InvalidParameter(f"bad pair {k!r}")
            self._c[(min(a, b), max(a, b))] = int(v)
        missing = [pr for pr in itertools.combinations(range(lam), 2) if pr not in self._c]
        if missing:
            raise InvalidParameter(f"coloring misses pair {missing[0]}")

    def __call__(self, a: int, b: int) -> int:
        return self._c[(min(a, b), max(a, b))]

    def items(self):
        return sorted(self._c.items())

    def __eq__(self, other):
        return isinstance(other, Coloring) and self.lam == other.lam and self._c == other._c

    @classmethod
    def constant(cls, lam: int, color: int = 1) -> "Coloring":
        return cls(lam, {pr: color for pr in itertools.combinations(range(lam), 2)})

    @classmethod
    def pentagon(cls) -> "Coloring":
        """Cycle edges of the 5-cycle get color 1, chords get 0."""
        return cls(5, {(a, b): int((b - a) % 5 in (1, 4)) for a, b in itertools.combinations(range(5), 2)})

    @classmethod
    def from_bits(cls, lam: int, bits: int) -> "Coloring":
        pairs = list(itertools.combinations(range(lam), 2))
        return cls(lam, {pr: bits >> i & 1 for i, pr in enumerate(pairs)})


@dataclass(frozen=True)
class Pr0Result:
    holds: bool
    family: tuple | None = None
    h: tuple | None = None
    note: str = SEPARATED_NOTE

    def __bool__(self):
        return self.holds


def pr0_check(c: Coloring, n: int, m: int, mu: int) -> Pr0Result:
    """Each separated family of ``m`` increasing ``n``-tuples realizes every ``h: n x n -> mu``.

    ``h`` is realized when some earlier tuple ``alpha`` and later ``beta`` have
    ``c(zeta^alpha_k, zeta^beta_l) = h(k, l)`` for all ``k, l``.
    """
    if n < 1 or m < 0 or mu < 1:
        raise InvalidParameter("need n >= 1, m >= 0, mu >= 1")
    targets = mu ** (n * n)
    for S in itertools.combinations(range(c.lam), m * n):
        fam = [S[i * n:(i + 1) * n] for i in range(m)]
        seen = set()
        for A, B in itertools.combinations(fam, 2):
            pat = tuple(c(a, b) for a in A for b in B)
            if all(v < mu for v in pat):
                seen.add(pat)
                if len(seen) == targets:
                    break
        if len(seen) < targets:
            h = next(h for h in itertools.product(range(mu), repeat=n * n) if h not in seen)
            return Pr0Result(False, tuple(fam), h)
    return Pr0Result(True)


@dataclass(frozen=True)
class UnembedResult:
    unembeddable: bool
    witness: dict | None = None  # an assignment F defeating clause (B), when one exists
    assignments: int = 0

    def __bool__(self):
        return self.unembeddable


def _increasing_tuples(J: Structure, k: int):
    if "<" not in J.relations:
        return list(itertools.product(range(J.n), repeat=k))
    less = J.relations["<"]
    return [t for t in itertools.product(range(J.n), repeat=k)
            if all((a, b) in less for a, b in zip(t, t[1:]))]


def unembeddable_oracle(I: Structure, J: Structure, Sigma: Sequence[tuple[str, int]],
                        Gamma: Sequence[tuple] = GAMMA_ORG, depth: int = 1, budget=None) -> UnembedResult:
    """Exhaustive check that every term assignment ``I -> M(J)`` meets one pair of ``Gamma``.

    ``Sigma`` lists term shapes ``(name, arity)``; parameter tuples are
    increasing whenever ``J`` carries an order.
    """
    if depth != 1:
        raise InvalidParameter("only term depth 1 is supported")
    bud = as_budget(budget)
    gamma = [(as_formula(a), as_formula(b)) for a, b in Gamma]
    sides = []
    for p1, p2 in gamma:
        eps = 1 + max((v.tup for v in _vars(p1) | _vars(p2)), default=-1)
        P1 = [s for s in itertools.product(range(I.n), repeat=eps) if evaluate(p1, I, [(x,) for x in s])]
        P2 = [s for s in itertools.product(range(I.n), repeat=eps) if evaluate(p2, I, [(x,) for x in s])]
        sides.append((P1, P2))
    options = [(name, t) for name, ar in Sigma for t in _increasing_tuples(J, ar)]
    count = 0
    for F in itertools.product(options, repeat=I.n):
        bud.tick()
        count += 1
        if not _clause_B(F, sides, J):
            wit = {s: {"term": F[s][0], "args": list(F[s][1])} for s in range(I.n)}
            return UnembedResult(False, wit, count)
    return UnembedResult(True, None, count)


def _vars(phi):
    from .formulas import variables
    return variables(phi)


def _clause_B(F, sides, J) -> bool:
    for P1, P2 in sides:
        for s1 in P1:
            shapes = tuple(F[x][0] for x in s1)
            cat1 = sum((F[x][1] for x in s1), ())
            tp1 = qf_type(J, cat1)
            for s2 in P2:
                if tuple(F[x][0] for x in s2) != shapes:
                    continue
                if qf_type(J, sum((F[x][1] for x in s2), ())) == tp1:
                    return True
    return False


__all__ = [
    "TupleFamily", "EntangleResult", "graph_entangled", "org_entangled", "Coloring", "Pr0Result",
    "pr0_check", "UnembedResult", "unembeddable_oracle", "GAMMA_ORG", "SEPARATED_NOTE",
]
