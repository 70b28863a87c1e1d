"""Words over ``T x {+1,-1}``, partial injections and their evaluation.

A word is a tuple of ``(node, sign)`` letters. Evaluation reads right to left:
the last letter is applied first.
"""

from __future__ import annotations

import itertools
from typing import Iterable, Iterator, Mapping

from .errors import Incomparable, InverseMismatch
from .poset import FinPoset, meet

Letter = tuple[int, int]
Word = tuple[Letter, ...]


def make_word(letters: Iterable) -> Word:
    out = []
    for node, sign in letters:
        if sign not in (1, -1):
            raise ValueError(f"sign must be +1 or -1, got {sign!r}")
        out.append((node, int(sign)))
    return tuple(out)


class PartialMap:
    """A finite partial injection, immutable and hashable."""

    __slots__ = ("_fwd", "_bwd", "_hash")

    def __init__(self, pairs: Mapping | Iterable = ()):
        items = pairs.items() if isinstance(pairs, Mapping) else pairs
        fwd, bwd = {}, {}
        for a, b in items:
            if a in fwd and fwd[a] != b:
                raise ValueError(f"not functional at {a!r}")
            if b in bwd and bwd[b] != a:
                raise ValueError(f"not injective at {b!r}")
            fwd[a] = b
            bwd[b] = a
        self._fwd, self._bwd = fwd, bwd
        self._hash = None

    def __call__(self, a):
        return self._fwd.get(a)

    def __contains__(self, a):
        return a in self._fwd

    def __len__(self):
        return len(self._fwd)

    def __iter__(self):
        return iter(self._fwd)

    def __eq__(self, other):
        return isinstance(other, PartialMap) and self._fwd == other._fwd

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(frozenset(self._fwd.items()))
        return self._hash

    def __repr__(self):
        body = ", ".join(f"{a!r}->{b!r}" for a, b in sorted(self._fwd.items(), key=repr))
        return f"PartialMap({{{body}}})"

    def items(self):
        return self._fwd.items()

    @property
    def domain(self) -> frozenset:
        return frozenset(self._fwd)

    @property
    def range(self) -> frozenset:
        return frozenset(self._bwd)

    def inverse(self) -> "PartialMap":
        return PartialMap(self._bwd)

    def compose(self, inner: "PartialMap") -> "PartialMap":
        """``self`` after ``inner``."""
        return PartialMap((a, self._fwd[b]) for a, b in inner.items() if b in self._fwd)

    def issubmap(self, other: "PartialMap") -> bool:
        return all(other(a) == b and a in other for a, b in self._fwd.items())

    def restrict(self, dom: Iterable) -> "PartialMap":
        keep = set(dom)
        return PartialMap((a, b) for a, b in self._fwd.items() if a in keep)


class MapFamily:
    """Partial injections ``F_{eta,+1}`` indexed by nodes; negative letters are inverses."""

    def __init__(self, maps: Mapping[int, PartialMap | Mapping | Iterable] | None = None):
        self._pos: dict = {}
        self._neg: dict = {}
        for node, m in (maps or {}).items():
            pm = m if isinstance(m, PartialMap) else PartialMap(m)
            self._pos[node] = pm
            self._neg[node] = pm.inverse()

    @classmethod
    def from_signed(cls, signed: Mapping[Letter, PartialMap | Mapping | Iterable]) -> "MapFamily":
        """Build from maps given for both signs, checking that they are mutually inverse."""
        pos, neg = {}, {}
        for (node, sign), m in signed.items():
            pm = m if isinstance(m, PartialMap) else PartialMap(m)
            (pos if sign == 1 else neg)[node] = pm
        for node in set(pos) | set(neg):
            p = pos.get(node)
            n = neg.get(node)
            if p is not None and n is not None and p.inverse() != n:
                raise InverseMismatch(f"maps for node {node!r} are not mutually inverse")
        merged = dict(pos)
        for node, n in neg.items():
            merged.setdefault(node, n.inverse())
        return cls(merged)

    def letter(self, node, sign: int) -> PartialMap:
        table = self._pos if sign == 1 else self._neg
        return table.get(node, _EMPTY)

    def nodes(self) -> list:
        return list(self._pos)

    def items(self):
        return self._pos.items()

    def __getitem__(self, node) -> PartialMap:
        return self._pos.get(node, _EMPTY)

    def __eq__(self, other):
        if not isinstance(other, MapFamily):
            return NotImplemented
        a = {k: v for k, v in self._pos.items() if len(v)}
        b = {k: v for k, v in other._pos.items() if len(v)}
        return a == b

    def __repr__(self):
        return f"MapFamily({self._pos!r})"


_EMPTY = PartialMap()


def _family(maps) -> MapFamily:
    if isinstance(maps, MapFamily):
        return maps
    if maps and all(isinstance(k, tuple) and len(k) == 2 for k in maps):
        return MapFamily.from_signed(maps)
    return MapFamily(maps)


def eval_word(maps, o: Word, a):
    """``F_o(a)``, or ``None`` when some step leaves a domain."""
    fam = _family(maps)
    x = a
    for node, sign in reversed(o):
        x = fam.letter(node, sign)(x)
        if x is None:
            return None
    return x


def orbit(maps, o: Word, a):
    """The sequence ``a_0 .. a_k`` with ``a_k = a`` and ``a_l = F_{letter l}(a_{l+1})``."""
    fam = _family(maps)
    seq = [a]
    x = a
    for node, sign in reversed(o):
        x = fam.letter(node, sign)(x)
        if x is None:
            return None
        seq.append(x)
    return tuple(reversed(seq))


def is_reduced_orbit(orb) -> bool:
    return orb is not None and len(set(orb)) == len(orb)


def is_formally_reduced(o: Word) -> bool:
    return all(not (a[0] == b[0] and a[1] != b[1]) for a, b in zip(o, o[1:]))


def word_le(T: FinPoset, o1: Word, o2: Word) -> bool:
    if len(o1) != len(o2):
        return False
    up = T.up_mask
    for (e1, s1), (e2, s2) in zip(o1, o2):
        if s1 != s2 or not up[e1] >> e2 & 1:
            return False
    return True


def word_compatible(T: FinPoset, o1: Word, o2: Word) -> bool:
    """Same length, same signs, and nodes pairwise compatible in ``T``."""
    if len(o1) != len(o2):
        return False
    up = T.up_mask
    for (e1, s1), (e2, s2) in zip(o1, o2):
        if s1 != s2 or not up[e1] & up[e2]:
            return False
    return True


def word_meet(T: FinPoset, o1: Word, o2: Word) -> Word:
    """Componentwise meet; needs equal length and sign pattern."""
    if len(o1) != len(o2) or any(s1 != s2 for (_, s1), (_, s2) in zip(o1, o2)):
        raise Incomparable("words differ in length or signs")
    out = []
    for (e1, s), (e2, _) in zip(o1, o2):
        m = meet(T, e1, e2)
        if m is None:
            raise Incomparable(f"nodes {e1} and {e2} have no common lower bound")
        out.append((m, s))
    return tuple(out)


def letters(nodes: Iterable) -> list[Letter]:
    return [(e, s) for e in nodes for s in (1, -1)]


def iter_words(nodes: Iterable, max_len: int, *, reduced: bool = False) -> Iterator[Word]:
    """All words (optionally only formally reduced ones) of length ``<= max_len``."""
    alpha = letters(nodes)
    for k in range(max_len + 1):
        for w in itertools.product(alpha, repeat=k):
            if not reduced or is_formally_reduced(w):
                yield w


def word_to_labels(T: FinPoset, o: Word) -> list:
    return [[T.label(e), s] for e, s in o]


def word_from_labels(T: FinPoset, data) -> Word:
    return make_word((T.index(e), s) for e, s in data)


__all__ = [
    "Word", "Letter", "PartialMap", "MapFamily", "make_word", "eval_word", "orbit",
    "is_reduced_orbit", "is_formally_reduced", "word_le", "word_compatible", "word_meet",
    "iter_words", "letters",
]
