"""Ordered graphs carrying node-indexed partial automorphisms.

Covers membership in the three strictness levels, the equivalence generated
by the maps, the reachable-map atlas, the generic map induced by a directed
set, and the canonical single-orbit blocks.
"""

from __future__ import annotations

import functools
import itertools
from collections import deque
from dataclasses import dataclass, field
from typing import Callable, Iterable

from networkx.utils import UnionFind

from .errors import AtlasCapExceeded, Inconsistent
from .poset import FinPoset
from .report import FAIL, INFO, PASS, ClauseReport
from .twinship import TwinshipParam, solves
from .words import MapFamily, PartialMap, Word, eval_word, is_formally_reduced

DEFAULT_CAP = 200_000


@dataclass(frozen=True)
class OrgStructure:
    """Universe ``0..n-1`` with a linear order, a graph and maps ``F_{eta,+1}``.

    ``order`` lists the elements from smallest to largest.
    """

    n: int
    order: tuple[int, ...]
    edges: frozenset[tuple[int, int]]
    maps: MapFamily
    frontier: frozenset[int] = frozenset()
    labels: tuple | None = None
    rank: tuple[int, ...] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        order = tuple(int(x) for x in self.order)
        if sorted(order) != list(range(self.n)):
            raise ValueError("order must list every element exactly once")
        edges = set()
        for a, b in self.edges:
            a, b = int(a), int(b)
            if a == b:
                raise ValueError(f"loop at {a}")
            if not (0 <= a < self.n and 0 <= b < self.n):
                raise ValueError(f"edge ({a}, {b}) outside universe")
            edges.add((min(a, b), max(a, b)))
        maps = self.maps if isinstance(self.maps, MapFamily) else MapFamily(self.maps)
        for node, m in maps.items():
            for a, b in m.items():
                if not (0 <= a < self.n and 0 <= b < self.n):
                    raise ValueError(f"map for {node!r} leaves the universe at {a}->{b}")
        rank = [0] * self.n
        for i, x in enumerate(order):
            rank[x] = i
        object.__setattr__(self, "order", order)
        object.__setattr__(self, "edges", frozenset(edges))
        object.__setattr__(self, "maps", maps)
        object.__setattr__(self, "frontier", frozenset(int(x) for x in self.frontier))
        object.__setattr__(self, "rank", tuple(rank))

    def less(self, a: int, b: int) -> bool:
        return self.rank[a] < self.rank[b]

    def adjacent(self, a: int, b: int) -> bool:
        return (min(a, b), max(a, b)) in self.edges

    @property
    def interior(self) -> list[int]:
        return [x for x in range(self.n) if x not in self.frontier]

    def letter(self, node, sign) -> PartialMap:
        return self.maps.letter(node, sign)

    def active_nodes(self) -> list:
        return sorted(k for k, m in self.maps.items() if len(m))

    def label(self, x: int):
        return x if self.labels is None else self.labels[x]


def is_partial_automorphism(J: OrgStructure, f: PartialMap) -> tuple[bool, tuple | None]:
    """Injective map preserving order and edges both ways on its domain."""
    dom = sorted(f.domain)
    for a, b in itertools.combinations(dom, 2):
        fa, fb = f(a), f(b)
        if J.less(a, b) != J.less(fa, fb) or J.adjacent(a, b) != J.adjacent(fa, fb):
            return False, (a, b)
    return True, None


# ---------------------------------------------------------------- E-closure

@dataclass(frozen=True)
class EClosure:
    classes: tuple[frozenset[int], ...]

    def class_of(self, x: int) -> frozenset[int]:
        for c in self.classes:
            if x in c:
                return c
        raise KeyError(x)

    def same(self, a: int, b: int) -> bool:
        return b in self.class_of(a)

    def __len__(self):
        return len(self.classes)


def e_closure(J: OrgStructure) -> EClosure:
    uf = UnionFind(range(J.n))
    for _, m in J.maps.items():
        for a, b in m.items():
            uf.union(a, b)
    classes = sorted((frozenset(s) for s in uf.to_sets()), key=min)
    return EClosure(tuple(classes))


# -------------------------------------------------------------------- atlas

def _letter_tables(J: OrgStructure, nodes=None) -> list[tuple[tuple[int, int], tuple[int, ...]]]:
    """Each letter as a tuple of images with ``-1`` for undefined and a trailing ``-1`` sink."""
    out = []
    for node in (J.active_nodes() if nodes is None else nodes):
        for sign in (1, -1):
            m = J.letter(node, sign)
            if not len(m):
                continue
            tab = [-1] * (J.n + 1)
            for a, b in m.items():
                tab[a] = b
            out.append(((node, sign), tuple(tab)))
    return out


@dataclass
class GroupoidAtlas:
    """Distinct maps ``F_o`` over formally reduced words, keyed by (map, first-applied letter)."""

    n: int
    states: dict  # (map tuple, tag) -> word
    complete: bool = True

    @property
    def maps(self) -> dict:
        out = {}
        for (m, _), w in self.states.items():
            out.setdefault(m, w)
        return out

    def partial_maps(self) -> list[PartialMap]:
        return [PartialMap((a, b) for a, b in enumerate(m) if b >= 0) for m in self.maps]

    def __len__(self):
        return len(self.states)


@dataclass(frozen=True)
class K1Result:
    holds: bool
    witness: tuple | None  # (word, element)
    atlas: GroupoidAtlas

    def __bool__(self):
        return self.holds


def build_atlas(J: OrgStructure, cap: int = DEFAULT_CAP, stop_on_fixed_point: bool = False):
    """Breadth-first closure of reachable maps; new letters are prepended.

    Returns the atlas and the first fixed point found as ``(word, a)`` or ``None``.
    """
    tables = _letter_tables(J)
    states: dict = {}
    queue = deque()
    fixed = None
    for tag, tab in tables:
        m = tab[:-1]
        key = (m, tag)
        states[key] = (tag,)
        queue.append(key)
        for a, b in enumerate(m):
            if a == b:
                fixed = fixed or ((tag,), a)
    if fixed and stop_on_fixed_point:
        return GroupoidAtlas(J.n, states, False), fixed
    while queue:
        m, tag = queue.popleft()
        word = states[(m, tag)]
        for ltag, tab in tables:
            if ltag[0] == tag[0] and ltag[1] != tag[1]:
                continue
            new = tuple(tab[x] for x in m)
            if all(x < 0 for x in new):
                continue
            key = (new, ltag)
            if key in states:
                continue
            if len(states) >= cap:
                raise AtlasCapExceeded(f"atlas exceeded {cap} states")
            w = (ltag,) + word
            states[key] = w
            queue.append(key)
            if fixed is None:
                for a, b in enumerate(new):
                    if a == b:
                        fixed = (w, a)
                        break
                if fixed and stop_on_fixed_point:
                    return GroupoidAtlas(J.n, states, False), fixed
    return GroupoidAtlas(J.n, states, True), fixed


def check_K1(J: OrgStructure, p: TwinshipParam | None = None, atlas_cap: int = DEFAULT_CAP) -> K1Result:
    """No formally reduced nonempty word has a fixed point."""
    atlas, fixed = build_atlas(J, atlas_cap, stop_on_fixed_point=True)
    return K1Result(fixed is None, fixed, atlas)


def naive_fixed_point(J: OrgStructure, max_len: int = 4):
    """Reference search over all formally reduced words up to ``max_len``."""
    alpha = [t for t, _ in _letter_tables(J)]
    for k in range(1, max_len + 1):
        for w in itertools.product(alpha, repeat=k):
            if not is_formally_reduced(w):
                continue
            for a in range(J.n):
                if eval_word(J.maps, w, a) == a:
                    return w, a
    return None


# ---------------------------------------------------------------------- K0

def check_K0(J: OrgStructure, p: TwinshipParam, comp_len: int = 2) -> ClauseReport:
    rep = ClauseReport("K0 membership")
    T = p.T
    rep.add("(A) linear order", PASS, "order is a permutation of the universe")
    rep.add("(C) graph", PASS, "edges are irreflexive and symmetric")
    unknown = [k for k in J.maps.nodes() if not (isinstance(k, int) and 0 <= k < T.n)]
    if unknown:
        rep.add("(B) indexing", FAIL, "maps indexed by unknown nodes", unknown)
        return rep

    bad = None
    for node, m in J.maps.items():
        ok, pair = is_partial_automorphism(J, m)
        if not ok:
            bad = {"node": T.label(node), "pair": list(pair)}
            break
    rep.add("(B) partial automorphisms", bad is None,
            "each map preserves order and edges" if bad is None else "map breaks order or edges", bad)
    rep.add("(B)(a) inverses", PASS, "negative letters are stored as inverses")

    Bset = {frozenset(D) for D in p.B}
    missing = []
    for a in J.interior:
        for sign in (1, -1):
            dset = frozenset(node for node in range(T.n) if a in J.letter(node, sign))
            if dset not in Bset:
                missing.append({"element": a, "sign": sign, "set": sorted(T.label(x) for x in dset)})
    rep.add("(B)(b) domain sets", not missing,
            "domain sets of non-frontier elements lie in B" if not missing else "domain set outside B",
            missing[:5] or None)

    mono = None
    for eta, nu in T.pairs():
        if not J.maps[eta].issubmap(J.maps[nu]):
            mono = [T.label(eta), T.label(nu)]
            break
    rep.add("(B)(d) monotone", mono is None,
            "maps grow along the order" if mono is None else "map not contained in a larger node's map", mono)

    comp = None
    tables = [t for t, _ in _letter_tables(J)]
    for k in range(2, comp_len + 1):
        for w in itertools.product(tables, repeat=k):
            f = PartialMap((a, eval_word(J.maps, w, a)) for a in range(J.n)
                           if eval_word(J.maps, w, a) is not None)
            ok, pair = is_partial_automorphism(J, f)
            if not ok:
                comp = {"word": [[T.label(e), s] for e, s in w], "pair": list(pair)}
                break
        if comp:
            break
    rep.add("(B)(c) compositions", comp is None,
            f"words up to length {comp_len} act as partial automorphisms", comp)

    cross = None
    for (eta, nu) in itertools.combinations_with_replacement(range(T.n), 2):
        if not T.compatible(eta, nu):
            continue
        for sign in (1, -1):
            f1, f2 = J.letter(eta, sign), J.letter(nu, sign)
            for s1, t1 in f1.items():
                for s2, t2 in f2.items():
                    if s1 != s2 and J.adjacent(s1, s2) != J.adjacent(t1, t2):
                        cross = [T.label(eta), T.label(nu), sign, s1, s2]
                        break
                if cross:
                    break
            if cross:
                break
        if cross:
            break
    rep.add("(B)(e) compatible pairs", cross is None,
            "derived check: edges transported consistently by compatible nodes", cross)
    rep.notes.append("(B)(c) and (B)(e) follow from the other clauses for partial automorphisms; "
                     "they are verified here as sanity checks")
    return rep


# ---------------------------------------------------------- Omega_s and K2

class OmegaS:
    """The set of formally reduced words defined at ``s``, via reachable (element, tag) states."""

    def __init__(self, J: OrgStructure, s: int, cap: int = DEFAULT_CAP):
        self.J, self.s = J, s
        alpha = [t for t, _ in _letter_tables(J)]
        self.alphabet = alpha
        start = (s, None)
        seen = {start}
        queue = deque([start])
        while queue:
            x, tag = queue.popleft()
            for lt in alpha:
                if tag is not None and lt[0] == tag[0] and lt[1] != tag[1]:
                    continue
                y = J.letter(*lt)(x)
                if y is None:
                    continue
                st = (y, lt)
                if st not in seen:
                    if len(seen) >= cap:
                        raise AtlasCapExceeded(f"state space exceeded {cap}")
                    seen.add(st)
                    queue.append(st)
        self.states = frozenset(seen)

    def __contains__(self, o: Word) -> bool:
        return is_formally_reduced(o) and eval_word(self.J.maps, o, self.s) is not None

    @property
    def reach(self) -> frozenset[int]:
        return frozenset(x for x, _ in self.states)

    def letters_used(self) -> frozenset:
        return frozenset(t for _, t in self.states if t is not None)

    def equals_omega(self, D: Iterable[int]) -> tuple[bool, str]:
        """Truncation-relative test of equality with the words over ``D``."""
        D = frozenset(D)
        for x, tag in self.states:
            for node in D:
                for sign in (1, -1):
                    if tag is not None and node == tag[0] and sign != tag[1]:
                        continue
                    if x not in self.J.frontier and self.J.letter(node, sign)(x) is None:
                        return False, f"letter ({node},{sign}) undefined at reachable {x}"
        for _, tag in self.states:
            if tag is not None and tag[0] not in D:
                return False, f"letter {tag} outside D applies"
        return True, ""


def omega_s(J: OrgStructure, p: TwinshipParam | None, s: int, cap: int = DEFAULT_CAP) -> OmegaS:
    return OmegaS(J, s, cap)


def check_K2(J: OrgStructure, p: TwinshipParam, atlas_cap: int = DEFAULT_CAP) -> ClauseReport:
    rep = ClauseReport("K2 membership")
    unmatched = []
    chosen = {}
    for s in J.interior:
        om = OmegaS(J, s, atlas_cap)
        hit = next((i for i, D in enumerate(p.B) if om.equals_omega(D)[0]), None)
        if hit is None:
            unmatched.append(s)
        else:
            chosen[s] = hit
    rep.add("(A) word sets", not unmatched,
            "each non-frontier element's word set equals that of some member of B"
            if not unmatched else "elements with no matching member", unmatched or None)
    rep.add("(B) minimal lower words", PASS, "automatic: a finite T is well-founded")
    rep.notes.append(f"matching members: {dict(sorted(chosen.items()))}")
    return rep


# ------------------------------------------------------------- generic map

@dataclass
class GenericMap:
    F: PartialMap
    report: ClauseReport
    solves: bool


def generic_map(J: OrgStructure, p: TwinshipParam, G: Iterable[int], strict: bool = True) -> GenericMap:
    """Union of ``F_{eta,+1}`` over ``eta`` in ``G`` with one assertion per property of the induced map."""
    G = sorted(set(p.T.check(G)))
    rep = ClauseReport("generic map")
    ok_solve = solves(p, G)
    if not ok_solve:
        rep.notes.append("G does not solve p: assertions are informational only")
    pairs: dict = {}
    clash = None
    for eta in G:
        for a, b in J.maps[eta].items():
            if a in pairs and pairs[a] != b:
                clash = clash or {"element": a, "images": [pairs[a], b], "node": p.T.label(eta)}
            pairs.setdefault(a, b)
    if clash and strict:
        raise Inconsistent(f"maps disagree at {clash['element']}: {clash['images']}")
    back: dict = {}
    injective = True
    for a, b in pairs.items():
        if b in back:
            injective = False
        back[b] = a
    rep.add("well-defined", clash is None, "the maps agree wherever they overlap", clash)
    F = PartialMap({a: b for a, b in pairs.items()}) if injective and clash is None else None
    if F is None:
        rep.add("partial automorphism", FAIL, "union is not a partial injection")
        F = PartialMap({a: b for a, b in pairs.items() if list(pairs.values()).count(b) == 1})
    else:
        ok, pair = is_partial_automorphism(J, F)
        rep.add("partial automorphism", ok,
                "order and edges preserved both ways" if ok else "order or edge broken",
                None if ok else list(pair))
    inner = set(J.interior)
    miss_dom = sorted(inner - set(pairs))
    miss_rng = sorted(inner - set(pairs.values()))
    rep.add("domain", not miss_dom, "every non-frontier element is in the domain", miss_dom or None)
    rep.add("range", not miss_rng, "every non-frontier element is in the range", miss_rng or None)
    if not ok_solve:
        for c in rep.clauses:
            if c.status == FAIL:
                c.status = INFO
    return GenericMap(F, rep, ok_solve)


# ------------------------------------------------------------------ blocks

def _series_mul(P: dict, gen: int, sign: int, N: int) -> dict:
    out: dict = {}
    if sign == 1:
        series = [(0, 1), (1, 1)]
    else:
        series = [(k, (-1) ** k) for k in range(N + 1)]
    for mono, c in P.items():
        for k, d in series:
            if len(mono) + k > N:
                break
            key = mono + (gen,) * k
            out[key] = out.get(key, 0) + c * d
    return {k: v for k, v in out.items() if v}


def magnus_series(word: Word, N: int) -> dict:
    P = {(): 1}
    for g, s in word:
        P = _series_mul(P, g, s, N)
    return P


def magnus_compare(a: Word, b: Word, N: int) -> int:
    """Left-invariant total order on reduced words via truncated Magnus expansion."""
    if a == b:
        return 0
    A, B = magnus_series(a, N), magnus_series(b, N)
    diff = {k: B.get(k, 0) - A.get(k, 0) for k in set(A) | set(B)}
    nz = [k for k, v in diff.items() if v]
    if not nz:
        raise AssertionError(f"truncation {N} cannot separate {a} and {b}")
    k = min(nz, key=lambda m: (len(m), m))
    return -1 if diff[k] > 0 else 1


def shortlex_key(w: Word):
    return (len(w), w)


def _reduced_words(gens: list[int], L: int) -> list[Word]:
    out = [()]
    frontier = [()]
    for _ in range(L):
        nxt = []
        for w in frontier:
            for g in gens:
                for s in (1, -1):
                    if w and w[0] == (g, -s):
                        continue
                    nxt.append(((g, s),) + w)
        nxt.sort(key=shortlex_key)
        out.extend(nxt)
        frontier = nxt
    return out


def block_generators(T: FinPoset, D: frozenset[int]) -> dict[int, int]:
    """Send each node of ``D`` to the least member of ``D`` below it.

    For antichains this is the identity. When several minimal members sit
    below one node the smallest id is used and monotonicity can fail.
    """
    mu = {}
    for eta in sorted(D):
        below = [g for g in D if T.leq(g, eta)]
        mins = [g for g in below if not any(h != g and T.leq(h, g) for h in below)]
        mu[eta] = min(mins)
    return mu


def build_block(p: TwinshipParam, D_index: int, L: int, order_rule: str | Callable = "magnus",
                edge_rule: Callable[[Word, Word], bool] | None = None) -> OrgStructure:
    """Truncated orbit of a seed under the maps indexed by one member of B.

    Elements are reduced words over the generators of ``D`` of length at most
    ``L``; a node acts by left multiplication with its generator.
    """
    D = p.B[D_index]
    mu = block_generators(p.T, D)
    gens = sorted(set(mu.values()))
    words = _reduced_words(gens, L)
    pos = {w: i for i, w in enumerate(words)}
    gen_maps: dict[int, PartialMap] = {}
    for g in gens:
        pairs = []
        for w, i in pos.items():
            if w and w[0] == (g, -1):
                pairs.append((i, pos[w[1:]]))
            elif len(w) < L:
                pairs.append((i, pos[((g, 1),) + w]))
        gen_maps[g] = PartialMap(pairs)
    maps = MapFamily({eta: gen_maps[mu[eta]] for eta in D})
    if order_rule == "magnus":
        N = max(2 * L, 1)
        ranked = sorted(words, key=functools.cmp_to_key(lambda a, b: magnus_compare(a, b, N)))
    elif order_rule == "shortlex":
        ranked = sorted(words, key=shortlex_key)
    elif callable(order_rule):
        ranked = sorted(words, key=functools.cmp_to_key(order_rule))
    else:
        raise ValueError(f"unknown order rule {order_rule!r}")
    order = [pos[w] for w in ranked]
    edges = set()
    if edge_rule is not None:
        for a, b in itertools.combinations(words, 2):
            if edge_rule(a, b):
                edges.add((pos[a], pos[b]))
    frontier = [i for w, i in pos.items() if len(w) == L]
    return OrgStructure(len(words), tuple(order), frozenset(edges), maps, frozenset(frontier), tuple(words))


def is_orbit_generated(J: OrgStructure, p: TwinshipParam | None = None) -> bool:
    """Every element reaches the whole universe (all words, so the maps' equivalence is one class)."""
    return J.n == 0 or len(e_closure(J)) == 1


def restrict(J: OrgStructure, keep: Iterable[int]) -> OrgStructure:
    """Substructure on a subset closed under every map, renumbered in id order."""
    keep = sorted(set(keep))
    ks = set(keep)
    for node, m in J.maps.items():
        for sign in (1, -1):
            for a, b in J.letter(node, sign).items():
                if a in ks and b not in ks:
                    raise ValueError(f"subset not closed under ({node},{sign}) at {a}")
    new = {x: i for i, x in enumerate(keep)}
    order = [new[x] for x in J.order if x in ks]
    edges = {(new[a], new[b]) for a, b in J.edges if a in ks and b in ks}
    maps = MapFamily({node: PartialMap((new[a], new[b]) for a, b in m.items() if a in ks)
                      for node, m in J.maps.items()})
    labels = None if J.labels is None else tuple(J.labels[x] for x in keep)
    return OrgStructure(len(keep), tuple(order), frozenset(edges), maps,
                        frozenset(new[x] for x in J.frontier if x in ks), labels)


def closure_under_maps(J: OrgStructure, seeds: Iterable[int]) -> frozenset[int]:
    return frozenset().union(*(e_closure(J).class_of(s) for s in seeds)) if seeds else frozenset()


def disjoint_union(parts: list[OrgStructure]) -> OrgStructure:
    """Concatenate structures; order puts earlier parts first."""
    offset = 0
    order, edges, frontier = [], set(), set()
    maps: dict = {}
    for J in parts:
        order.extend(x + offset for x in J.order)
        edges.update((a + offset, b + offset) for a, b in J.edges)
        frontier.update(x + offset for x in J.frontier)
        for node, m in J.maps.items():
            maps.setdefault(node, []).extend((a + offset, b + offset) for a, b in m.items())
        offset += J.n
    return OrgStructure(offset, tuple(order), frozenset(edges), MapFamily(maps), frozenset(frontier))


__all__ = [
    "OrgStructure", "EClosure", "e_closure", "GroupoidAtlas", "build_atlas", "check_K1", "K1Result",
    "naive_fixed_point", "check_K0", "OmegaS", "omega_s", "check_K2", "GenericMap", "generic_map",
    "build_block", "block_generators", "magnus_compare", "is_orbit_generated", "restrict",
    "is_partial_automorphism", "disjoint_union", "closure_under_maps",
]
