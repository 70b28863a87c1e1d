"""Twinship parameters: validation, solutions, strongness, derived and transformed parameters."""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterable

from .errors import InvalidElement, InvalidParameter, NonUniqueMaximalLowerBound
from .poset import FinPoset, SeqTree, _bits, _members, is_dense, is_directed, maximal_antichains, meet
from .report import PASS, SKIP, ClauseReport

THETA_TAGS = ("omega", "uncountable")


@dataclass(frozen=True)
class TwinshipParam:
    """A finite truncation ``(T, B, theta)`` plus the set of boundary elements."""

    T: FinPoset
    B: tuple[frozenset[int], ...]
    theta: str = "omega"
    frontier: frozenset[int] = frozenset()

    def __post_init__(self):
        if self.theta not in THETA_TAGS:
            raise InvalidParameter(f"theta tag must be one of {THETA_TAGS}")
        B = tuple(frozenset(self.T.check(D)) for D in self.B)
        object.__setattr__(self, "B", B)
        object.__setattr__(self, "frontier", frozenset(self.T.check(self.frontier)))

    @property
    def masks(self) -> tuple[int, ...]:
        return tuple(_bits(D) for D in self.B)

    @property
    def interior(self) -> list[int]:
        return [x for x in range(self.T.n) if x not in self.frontier]

    def with_B(self, B) -> "TwinshipParam":
        return TwinshipParam(self.T, tuple(B), self.theta, self.frontier)


def intersection_closure(B: Iterable[frozenset]) -> tuple[frozenset, ...]:
    """Close a family under pairwise intersection, keeping first-seen order."""
    out = list(dict.fromkeys(frozenset(D) for D in B))
    seen = set(out)
    i = 0
    while i < len(out):
        for j in range(i + 1):
            x = out[i] & out[j]
            if x not in seen:
                seen.add(x)
                out.append(x)
        i += 1
    return tuple(out)


def validate_param(p: TwinshipParam, *, verbatim: bool = False, demand_levels: bool = False) -> ClauseReport:
    """Check the weak-parameter clauses one by one.

    Density and the avoidance clause are checked away from the frontier unless
    ``verbatim`` is set. ``demand_levels`` adds the optional level demand for
    tree parameters.
    """
    T = p.T
    rep = ClauseReport("parameter")
    exempt = () if verbatim else p.frontier

    bad = None
    for a, b in itertools.combinations(range(T.n), 2):
        try:
            meet(T, a, b)
        except NonUniqueMaximalLowerBound as e:
            bad = [T.label(a), T.label(b), [T.label(x) for x in e.bounds]]
            break
    rep.add("(A) meets", bad is None,
            "every pair has at most one maximal lower bound" if bad is None
            else "pair with several maximal lower bounds", bad)

    rep.add("(B) theta regular", PASS, f"symbolic tag {p.theta!r}")

    Bset = set(p.B)
    missing = next(((sorted(D1), sorted(D2)) for D1, D2 in itertools.combinations(p.B, 2)
                    if D1 & D2 not in Bset), None)
    rep.add("(C)(a) closure", missing is None,
            "closed under pairwise intersection" if missing is None else "intersection not in B",
            missing)
    sparse = next((i for i, D in enumerate(p.B) if not is_dense(T, D, exempt)), None)
    rep.add("(C)(a) density", sparse is None,
            "every member is dense" + ("" if verbatim else " off the frontier"),
            None if sparse is None else {"index": sparse, "set": sorted(T.label(x) for x in p.B[sparse])})

    masks = p.masks
    fails = []
    for eta in range(T.n):
        if eta in exempt:
            continue
        allowed = ~T.down_mask[eta]  # strictly above or incomparable
        if not any(m & ~allowed == 0 for m in masks):
            fails.append(T.label(eta))
    rep.add("(C)(b) avoidance", not fails,
            "each checked node has a member of B strictly above or beside it" if not fails
            else "nodes with no avoiding member", fails or None)

    if p.theta == "uncountable":
        if p.B:
            inter = frozenset.intersection(*p.B)
            ok = any(D <= inter for D in p.B)
        else:
            ok = True
        rep.add("(C)(c) full intersection", ok,
                "intersection of all members contains a member" if ok else "no member inside the intersection")
    else:
        rep.add("(C)(c) full intersection", SKIP, "only enforced for the uncountable tag")

    if demand_levels:
        levels = [T.height(x) for x in range(T.n)]
        top = max(levels, default=0)
        need = [eps for eps in range(top + 1)
                if not any(all(levels[x] >= eps for x in D) for D in p.B)]
        rep.add("(D) levels", not need, "every level bound is met by some member",
                need or None)
    if verbatim:
        rep.notes.append("verbatim mode: frontier exemptions disabled")
    return rep


def solves(p: TwinshipParam, G: Iterable[int]) -> bool:
    g = p.T.check(G)
    gm = _bits(g)
    return is_directed(p.T, g) and all(m & gm for m in p.masks)


@dataclass(frozen=True)
class StrongResult:
    strong: bool
    witness: frozenset[int] | None = None
    top: int | None = None

    def __bool__(self):
        return self.strong


def is_strong(p: TwinshipParam) -> StrongResult:
    """No directed subset meets every member of B.

    Every directed subset of a finite poset sits inside the down-set of its
    top, so only the sets ``down(m)`` need to be tried.
    """
    masks = p.masks
    order = sorted(range(p.T.n), key=lambda m: (-p.T.height(m), m))
    for m in order:
        dm = p.T.down_mask[m]
        if all(x & dm for x in masks):
            return StrongResult(False, frozenset(_members(dm)), m)
    return StrongResult(True)


@dataclass(frozen=True)
class ForcingExample:
    """A forcing poset whose conditions name prefixes of a branch through a tree."""

    lam: int
    theta: str
    tree: SeqTree
    P: FinPoset
    name: tuple[int, ...]  # condition id -> tree node id

    def __post_init__(self):
        if self.lam < 2:
            raise InvalidParameter("lam must be at least 2")
        if self.theta not in THETA_TAGS:
            raise InvalidParameter("bad theta tag")
        if len(self.name) != self.P.n:
            raise InvalidParameter("name must assign a node to every condition")
        self.tree.check(self.name)
        for a, b in self.P.pairs():
            if not self.tree.leq(self.name[a], self.name[b]):
                raise InvalidParameter(f"name is not monotone on {a} <= {b}")
        named = _bits(self.name)
        for v in range(self.tree.n):
            if not self.tree.up_mask[v] & named:
                raise InvalidParameter(f"tree node {self.tree.label(v)!r} is never forced")


@dataclass(frozen=True)
class DerivedParam:
    param: TwinshipParam
    truncated: bool
    pairs: int


def derive_from_forcing(m: ForcingExample, antichain_cap: int = 1000, pair_cap: int = 100_000) -> DerivedParam:
    """Collect ``D_{I,f}`` over maximal antichains ``I`` and prefix choices ``f``."""
    T = m.tree
    acs = maximal_antichains(m.P, antichain_cap)
    truncated = acs.truncated
    found: dict[frozenset, None] = {}
    count = 0
    for I in acs:
        conds = sorted(I)
        choices = [_members(T.down_mask[m.name[c]]) for c in conds]
        for f in itertools.product(*choices):
            if count >= pair_cap:
                truncated = True
                break
            count += 1
            mask = 0
            for v in f:
                mask |= T.up_mask[v]
            found.setdefault(frozenset(_members(mask)), None)
    B = intersection_closure(found)
    p = TwinshipParam(T, B, m.theta, T.maximal())
    return DerivedParam(p, truncated, count)


def wellfound_transform(p: TwinshipParam, r) -> TwinshipParam:
    """Tree of strictly increasing sequences starting at or above ``r``."""
    T = p.T
    if not isinstance(r, int) or not 0 <= r < T.n:
        raise InvalidElement(f"unknown element {r!r}")
    seqs: list[tuple[int, ...]] = []
    stack = [(x,) for x in sorted(T.up(r), reverse=True)]
    while stack:
        s = stack.pop()
        seqs.append(s)
        last = s[-1]
        nxt = [y for y in range(T.n) if T.lt(last, y)]
        stack.extend(s + (y,) for y in reversed(nxt))
    seqs.sort(key=lambda s: (len(s), s))
    pos = {s: i for i, s in enumerate(seqs)}
    pairs = [(pos[s[:k]], i) for s, i in pos.items() for k in range(1, len(s))]
    Tr = FinPoset.from_pairs(len(seqs), pairs, labels=seqs, max_size=max(64, len(seqs)))
    B = tuple(dict.fromkeys(frozenset(i for s, i in pos.items() if D.intersection(s)) for D in p.B))
    frontier = frozenset(i for s, i in pos.items() if s[-1] in p.frontier)
    return TwinshipParam(Tr, B, p.theta, frontier)


def is_tree_like(p: TwinshipParam) -> bool:
    """Tree order plus upward-closed members of B."""
    if not p.T.is_tree():
        return False
    return all(all(p.T.up(x) <= D for x in D) for D in p.B)


__all__ = [
    "TwinshipParam", "validate_param", "solves", "is_strong", "StrongResult", "ForcingExample",
    "derive_from_forcing", "DerivedParam", "wellfound_transform", "intersection_closure",
    "is_tree_like", "THETA_TAGS",
]
