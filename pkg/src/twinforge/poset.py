"""Finite posets, trees of sequences, and the basic forcing predicates."""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Hashable, Iterable, Sequence

import networkx as nx
import numpy as np

from .errors import InvalidElement, NonUniqueMaximalLowerBound

MAX_SIZE = 64


def _bits(ids: Iterable[int]) -> int:
    m = 0
    for i in ids:
        m |= 1 << (i if type(i) is int else int(i))
    return m


def _members(mask: int) -> list[int]:
    out = []
    while mask:
        low = mask & -mask
        out.append(low.bit_length() - 1)
        mask ^= low
    return out


class FinPoset:
    """A finite quasiorder on ids ``0..n-1`` stored as a boolean matrix.

    ``le[a, b]`` is true when ``a <= b``. Up- and down-sets are cached as
    integer bitmasks, which is what most of the hot loops use.
    """

    def __init__(self, le, labels: Sequence[Hashable] | None = None, *, max_size: int = MAX_SIZE):
        mat = np.array(le, dtype=bool)
        if mat.ndim != 2 or mat.shape[0] != mat.shape[1]:
            raise ValueError("relation matrix must be square")
        n = mat.shape[0]
        if n > max_size:
            raise ValueError(f"poset has {n} elements, cap is {max_size}")
        closed = _transitive_closure(mat | np.eye(n, dtype=bool))
        self.closure_added = int(closed.sum() - mat.sum())
        closed.setflags(write=False)
        self.le = closed
        self.n = n
        if labels is None:
            labels = tuple(range(n))
        labels = tuple(labels)
        if len(labels) != n or len(set(labels)) != n:
            raise ValueError("labels must be distinct and one per element")
        self.labels = labels
        self._index = {lab: i for i, lab in enumerate(labels)}
        if n <= 62:
            weights = np.left_shift(1, np.arange(n, dtype=np.int64))
            as_int = closed.astype(np.int64)
            self.up_mask = tuple((as_int @ weights).tolist())
            self.down_mask = tuple((as_int.T @ weights).tolist())
        else:
            rows = closed.tolist()
            self.up_mask = tuple(sum(1 << j for j, v in enumerate(r) if v) for r in rows)
            self.down_mask = tuple(sum(1 << i for i, r in enumerate(rows) if r[j]) for j in range(n))
        self.strict_partial_order = not bool(((closed & closed.T) & ~np.eye(n, dtype=bool)).any())

    @classmethod
    def from_pairs(cls, n: int, pairs: Iterable[tuple[int, int]], labels=None, **kw) -> "FinPoset":
        mat = np.zeros((n, n), dtype=bool)
        for a, b in pairs:
            if not (0 <= a < n and 0 <= b < n):
                raise InvalidElement(f"pair ({a}, {b}) outside 0..{n - 1}")
            mat[a, b] = True
        return cls(mat, labels, **kw)

    @classmethod
    def chain(cls, n: int) -> "FinPoset":
        return cls(np.triu(np.ones((n, n), dtype=bool)))

    @classmethod
    def antichain(cls, n: int) -> "FinPoset":
        return cls(np.eye(n, dtype=bool))

    def __len__(self):
        return self.n

    def __repr__(self):
        return f"FinPoset(n={self.n})"

    def __eq__(self, other):
        return (isinstance(other, FinPoset) and self.labels == other.labels
                and np.array_equal(self.le, other.le))

    def __hash__(self):
        return hash((self.labels, self.le.tobytes()))

    @property
    def elements(self) -> range:
        return range(self.n)

    def index(self, label) -> int:
        """Translate a label (or an in-range integer id) to an id."""
        if label in self._index:
            return self._index[label]
        if isinstance(label, (int, np.integer)) and not isinstance(label, bool) and 0 <= label < self.n:
            return int(label)
        raise InvalidElement(f"unknown element {label!r}")

    def label(self, i: int):
        return self.labels[i]

    def check(self, ids: Iterable) -> list[int]:
        out = []
        n = self.n
        for i in ids:
            if type(i) is int and 0 <= i < n:
                out.append(i)
                continue
            if not isinstance(i, (int, np.integer)) or isinstance(i, bool) or not 0 <= i < n:
                raise InvalidElement(f"unknown element {i!r}")
            out.append(int(i))
        return out

    def leq(self, a: int, b: int) -> bool:
        return bool(self.up_mask[a] >> b & 1)

    def lt(self, a: int, b: int) -> bool:
        return a != b and self.leq(a, b) and not self.leq(b, a)

    def comparable(self, a: int, b: int) -> bool:
        return self.leq(a, b) or self.leq(b, a)

    def compatible(self, a: int, b: int) -> bool:
        """True when ``a`` and ``b`` have a common upper bound."""
        return bool(self.up_mask[a] & self.up_mask[b])

    def up(self, a: int) -> frozenset[int]:
        return frozenset(_members(self.up_mask[a]))

    def down(self, a: int) -> frozenset[int]:
        return frozenset(_members(self.down_mask[a]))

    def maximal(self) -> frozenset[int]:
        return frozenset(i for i in range(self.n) if self.up_mask[i] & ~self.down_mask[i] == 0)

    def minimal(self) -> frozenset[int]:
        return frozenset(i for i in range(self.n) if self.down_mask[i] & ~self.up_mask[i] == 0)

    def pairs(self) -> list[tuple[int, int]]:
        """All pairs ``a <= b`` with ``a != b``."""
        return [(int(a), int(b)) for a, b in zip(*np.nonzero(self.le)) if a != b]

    def restrict(self, ids: Iterable[int]) -> "FinPoset":
        keep = sorted(set(self.check(ids)))
        return FinPoset(self.le[np.ix_(keep, keep)], [self.labels[i] for i in keep])

    def is_tree(self) -> bool:
        """Every down-set is a chain (forests count)."""
        for a in range(self.n):
            below = _members(self.down_mask[a])
            for x, y in itertools.combinations(below, 2):
                if not self.comparable(x, y):
                    return False
        return True

    def height(self, a: int) -> int:
        """Number of elements strictly below ``a``."""
        return bin(self.down_mask[a]).count("1") - 1


def _transitive_closure(mat: np.ndarray) -> np.ndarray:
    # repeated squaring of a reflexive relation; paths double in length each round
    reach = mat.astype(np.uint8)
    while True:
        nxt = (reach @ reach > 0).astype(np.uint8)
        if np.array_equal(nxt, reach):
            return reach.astype(bool)
        reach = nxt


class SeqTree(FinPoset):
    """All sequences over ``[0, lam)`` of length ``< depth``, ordered by initial segment.

    A prefix-closed subset may be supplied through ``seqs`` instead.
    Labels are digit strings when ``lam <= 10`` (``""`` is the root).
    """

    def __init__(self, lam: int, depth: int, seqs: Iterable[tuple[int, ...]] | None = None):
        if lam < 1 or depth < 1:
            raise ValueError("alphabet size and depth must be positive")
        if seqs is None:
            seqs = [s for d in range(depth) for s in itertools.product(range(lam), repeat=d)]
        else:
            seqs = sorted({tuple(s) for s in seqs}, key=lambda s: (len(s), s))
            have = set(seqs)
            for s in seqs:
                if len(s) >= depth or any(not 0 <= x < lam for x in s):
                    raise ValueError(f"sequence {s} outside the tree shape")
                if s and s[:-1] not in have:
                    raise ValueError(f"sequence set is not prefix-closed at {s}")
        self.lam, self.depth = lam, depth
        self.seqs = tuple(seqs)
        pos = {s: i for i, s in enumerate(self.seqs)}
        n = len(self.seqs)
        mat = np.zeros((n, n), dtype=bool)
        for s, i in pos.items():
            for k in range(len(s) + 1):
                mat[pos[s[:k]], i] = True
        super().__init__(mat, [self._fmt(s) for s in self.seqs])

    def _fmt(self, s):
        return "".join(map(str, s)) if self.lam <= 10 else s

    def seq(self, i: int) -> tuple[int, ...]:
        return self.seqs[i]

    def level(self, i: int) -> int:
        return len(self.seqs[i])


def seq_tree(lam: int, depth: int) -> SeqTree:
    return SeqTree(lam, depth)


def is_dense(P: FinPoset, D: Iterable[int], exempt: Iterable[int] = ()) -> bool:
    """Every element (outside ``exempt``) has an extension in ``D``."""
    dm = _bits(P.check(D))
    skip = set(exempt)
    return all(P.up_mask[p] & dm for p in range(P.n) if p not in skip)


def is_directed(P: FinPoset, G: Iterable[int]) -> bool:
    g = P.check(G)
    gm = _bits(g)
    return all(P.up_mask[a] & P.up_mask[b] & gm for a, b in itertools.combinations(g, 2))


def meet(P: FinPoset, a: int, b: int):
    """Greatest lower bound of ``a`` and ``b``; ``None`` when there is no lower bound.

    Several maximal lower bounds raise :class:`NonUniqueMaximalLowerBound`.
    """
    a, b = P.check((a, b))
    common = P.down_mask[a] & P.down_mask[b]
    if not common:
        return None
    tops = [x for x in _members(common) if P.up_mask[x] & common == (1 << x)]
    if not tops:
        # quasiorder: a cycle of equivalent tops, pick the smallest id
        tops = [x for x in _members(common) if P.up_mask[x] & common & ~P.down_mask[x] == 0]
        return min(tops)
    if len(tops) > 1:
        raise NonUniqueMaximalLowerBound(a, b, tops)
    return tops[0]


@dataclass(frozen=True)
class AntichainList:
    antichains: tuple[frozenset[int], ...]
    truncated: bool

    def __iter__(self):
        return iter(self.antichains)

    def __len__(self):
        return len(self.antichains)


def incompatibility_graph(P: FinPoset) -> nx.Graph:
    g = nx.Graph()
    g.add_nodes_from(range(P.n))
    g.add_edges_from((a, b) for a, b in itertools.combinations(range(P.n), 2) if not P.compatible(a, b))
    return g


def maximal_antichains(P: FinPoset, cap: int = 10_000) -> AntichainList:
    """Maximal sets of pairwise incompatible elements, up to ``cap`` of them.

    These are the maximal cliques of the incompatibility graph.
    """
    found = []
    truncated = False
    for clique in nx.find_cliques(incompatibility_graph(P)):
        if len(found) == cap:
            truncated = True
            break
        found.append(frozenset(clique))
    found.sort(key=lambda s: (len(s), sorted(s)))
    return AntichainList(tuple(found), truncated)


def is_maximal_antichain(P: FinPoset, A: Iterable[int]) -> bool:
    a = P.check(A)
    if any(P.compatible(x, y) for x, y in itertools.combinations(a, 2)):
        return False
    return all(any(P.compatible(p, x) for x in a) for p in range(P.n))


@dataclass(frozen=True)
class AntichainCert:
    antichain: frozenset[int]
    classification: dict  # id -> "trivial" | "nontrivial"


def cone_directed(P: FinPoset, p: int) -> bool:
    return is_directed(P, P.up(p))


def directed_cone_antichain(P: FinPoset) -> AntichainCert:
    """Pick a maximal antichain whose members are each either directed above or nowhere directed above.

    Candidates are scanned lowest first, so chains yield their bottom.
    """
    directed = [cone_directed(P, p) for p in range(P.n)]
    cand = []
    for p in range(P.n):
        if directed[p]:
            cand.append(p)
        elif not any(directed[q] for q in _members(P.up_mask[p])):
            cand.append(p)
    cand.sort(key=lambda p: (P.height(p), p))
    chosen: list[int] = []
    for p in cand:
        if all(not P.compatible(p, q) for q in chosen):
            chosen.append(p)
    cls = {p: "trivial" if directed[p] else "nontrivial" for p in chosen}
    return AntichainCert(frozenset(chosen), cls)
