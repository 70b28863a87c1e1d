"""Assembling twin structures from orbit blocks and verifying them.

The assembled structure ``J`` is a disjoint union of truncated orbit blocks,
one per index ``alpha < lam``; block ``alpha`` comes before block ``beta``
when ``alpha < beta``. Elements are labelled ``(alpha, word)``.
"""

from __future__ import annotations

import dataclasses
import itertools
import random
from collections import deque
from dataclasses import dataclass, field
from typing import Callable, Iterable, Sequence

from .entangle import GAMMA_ORG, Coloring, TupleFamily, graph_entangled
from .errors import InvalidDSequence, NotASolution
from .gem import Blueprint, GemFragment, gem_realize
from .org import (OmegaS, OrgStructure, _letter_tables, build_block, check_K0, check_K1, check_K2,
                  disjoint_union, e_closure, generic_map, is_partial_automorphism)
from .report import FAIL, INFO, PASS, ClauseReport
from .structures import from_org, is_isomorphism, search_isomorphism
from .twinship import TwinshipParam, solves
from .words import MapFamily, PartialMap


@dataclass
class TwinAssembly:
    p: TwinshipParam
    lam: int
    D_seq: tuple[int, ...]
    c: Coloring
    L: int
    blocks: list[OrgStructure]
    offsets: tuple[int, ...]
    J: OrgStructure
    X: frozenset[int]
    X1: frozenset[int]
    X2: frozenset[int]
    Y: frozenset[int]
    Z: frozenset[int]
    M1: GemFragment | None = None
    M2: GemFragment | None = None
    blueprint: Blueprint | None = None
    notes: list = field(default_factory=list)

    def block_of(self, x: int) -> int:
        for alpha in range(self.lam - 1, -1, -1):
            if x >= self.offsets[alpha]:
                return alpha
        raise KeyError(x)

    def label(self, x: int):
        return self.J.label(x)


def _pair_closure(J: OrgStructure, start: Iterable[tuple[int, int]], nodes=None) -> set[tuple[int, int]]:
    """All pairs ``(F_o(s), F_o(t))`` for words over ``nodes`` defined at both ends."""
    tables = _letter_tables(J, nodes)
    seen = set(start)
    queue = deque(seen)
    while queue:
        x, y = queue.popleft()
        for _, tab in tables:
            a, b = tab[x], tab[y]
            if a >= 0 and b >= 0 and (a, b) not in seen:
                seen.add((a, b))
                queue.append((a, b))
    return seen


def parity_translates(J: OrgStructure, seeds: Iterable[int]) -> tuple[frozenset, frozenset]:
    """Elements reached from ``seeds`` by formally reduced words of odd and of even length."""
    tables = _letter_tables(J)
    start = [(s, None, 0) for s in seeds]
    seen = set(start)
    queue = deque(start)
    while queue:
        x, tag, par = queue.popleft()
        for lt, tab in tables:
            if tag is not None and lt[0] == tag[0] and lt[1] != tag[1]:
                continue
            y = tab[x]
            if y < 0:
                continue
            st = (y, lt, par ^ 1)
            if st not in seen:
                seen.add(st)
                queue.append(st)
    odd = frozenset(x for x, _, par in seen if par)
    even = frozenset(x for x, _, par in seen if not par)
    return odd, even


def assemble(p: TwinshipParam, lam: int, D_seq: Sequence[int], c: Coloring | None = None, L: int = 2,
             blueprint: Blueprint | None = None, Y: Iterable[int] | None = None,
             order_rule="magnus", edge_rule: Callable | None = None, realize: bool = True) -> TwinAssembly:
    """Build ``J``, the seed set ``X`` and the parity classes ``X1`` (odd) and ``X2`` (even).

    ``D_seq[alpha]`` indexes the member of ``B`` used by block ``alpha``.
    Edges join ``F_o(alpha, seed)`` and ``F_o(beta, seed)`` for ``alpha != beta``
    of color 1 and words over nodes common to both members. ``edge_rule``,
    taking two labels, replaces that rule. ``Y`` is given as block indices.
    """
    D_seq = tuple(int(d) for d in D_seq)
    if len(D_seq) != lam:
        raise InvalidDSequence(f"need {lam} entries, got {len(D_seq)}")
    if any(not 0 <= d < len(p.B) for d in D_seq):
        raise InvalidDSequence("entry outside the range of B")
    missing = sorted(set(range(len(p.B))) - set(D_seq))
    if missing:
        raise InvalidDSequence(f"members of B never used: {missing}")
    c = Coloring.constant(lam, 1) if c is None else c
    if c.lam != lam:
        raise InvalidDSequence("coloring size does not match lam")
    cache: dict[int, OrgStructure] = {}
    blocks = []
    for d in D_seq:
        if d not in cache:
            cache[d] = build_block(p, d, L, order_rule)
        blocks.append(cache[d])
    offsets = tuple(itertools.accumulate([0] + [b.n for b in blocks[:-1]]))
    base = disjoint_union(blocks)
    labels = tuple((alpha, w) for alpha, b in enumerate(blocks) for w in b.labels)
    seeds = [offsets[alpha] + blocks[alpha].labels.index(()) for alpha in range(lam)]

    if edge_rule is None:
        edges = set()
        for a, b in itertools.combinations(range(lam), 2):
            if c(a, b) != 1:
                continue
            common = sorted(p.B[D_seq[a]] & p.B[D_seq[b]])
            for x, y in _pair_closure(base, [(seeds[a], seeds[b])], common):
                edges.add((x, y))
    else:
        edges = {(x, y) for x, y in itertools.combinations(range(base.n), 2)
                 if edge_rule(labels[x], labels[y])}
    J = OrgStructure(base.n, base.order, frozenset(edges), base.maps, base.frontier, labels)

    X = frozenset(seeds)
    X1, X2 = parity_translates(J, X)
    Yset = X if Y is None else frozenset(seeds[i] for i in Y)
    oddY, _ = parity_translates(J, Yset)
    restY = set()
    for s in X - Yset:
        restY |= OmegaS(J, s).reach
    Z = frozenset(oddY | restY)
    a = TwinAssembly(p, lam, D_seq, c, L, blocks, offsets, J, X, X1, X2, Yset, Z,
                     blueprint=blueprint or Blueprint.identity())
    if realize:
        realize_twins(a)
    return a


def realize_twins(a: TwinAssembly) -> None:
    S = from_org(a.J)
    a.M1 = gem_realize(S.restrict(a.X1), a.blueprint)
    a.M2 = gem_realize(S.restrict(a.X2), a.blueprint)


def verify_solution_isomorphism(a: TwinAssembly, G: Iterable[int]) -> ClauseReport:
    """Check that the map induced by a solving set moves ``X1`` isomorphically into ``X2``."""
    G = sorted(set(G))
    if not solves(a.p, G):
        raise NotASolution(f"{G} is not a directed set meeting every member of B")
    gm = generic_map(a.J, a.p, G, strict=False)
    F = gm.F
    J = a.J
    rep = ClauseReport("solution induces isomorphism")
    ok, pair = is_partial_automorphism(J, F)
    detail = None if ok else {"pair": list(pair), "labels": [J.label(x) for x in pair]}
    rep.add("(i) order and edges", ok and gm.report["well-defined"].status == PASS,
            "induced map preserves order and edges where defined" if ok else "offending pair", detail)

    inner = sorted(x for x in a.X1 if x not in J.frontier)
    bad = [x for x in inner if F(x) is None or F(x) not in a.X2]
    images = [F(x) for x in inner if F(x) is not None]
    inj = len(set(images)) == len(images)
    rep.add("(ii) X1 into X2", not bad and inj,
            "non-frontier elements of X1 land in X2 injectively" if not bad and inj
            else "elements missing or landing outside X2", [J.label(x) for x in bad[:5]] or None)

    dom = [x for x in inner if F(x) is not None]
    S = from_org(J)
    A = S.restrict(dom)
    img = sorted(F(x) for x in dom)
    if len(set(img)) == len(img):
        B_ = S.restrict(img)
        pos = {x: i for i, x in enumerate(img)}
        f = {i: pos[F(x)] for i, x in enumerate(dom)}
        iso = is_isomorphism(A, B_, f)
    else:
        iso = False
    rep.add("(iii) isomorphism onto image", iso,
            "restriction to non-frontier X1 is an isomorphism onto its image" if iso
            else "restriction is not an isomorphism")
    rep.merge(gm.report, prefix="generic map ")
    return rep


def _translate_edges(J: OrgStructure, X: frozenset) -> set:
    start = [(x, y) for x, y in itertools.permutations(sorted(X), 2) if J.adjacent(x, y)]
    out = set()
    for x, y in _pair_closure(J, start):
        if x != y:
            out.add((min(x, y), max(x, y)))
    return out


def _same_words(J: OrgStructure, t: int, v: int):
    """Correspondence ``F_o(t) -> F_o(v)`` when both points admit the same words, else ``None``."""
    tables = _letter_tables(J)
    corr = {t: v}
    queue = deque([(t, v)])
    while queue:
        x, y = queue.popleft()
        for _, tab in tables:
            a, b = tab[x], tab[y]
            if (a >= 0) != (b >= 0):
                return None
            if a < 0:
                continue
            if a in corr:
                if corr[a] != b:
                    return {}
                continue
            corr[a] = b
            queue.append((a, b))
    return corr


def verify_twin_hypotheses(a: TwinAssembly) -> ClauseReport:
    """Structural hypotheses of the twin construction, checked one clause at a time."""
    J, p = a.J, a.p
    rep = ClauseReport("twin hypotheses")
    rep.merge(check_K0(J, p), prefix="(a) K0 ")
    k1 = check_K1(J, p)
    rep.add("(a) K1 no fixed points", k1.holds,
            "no formally reduced word fixes a point" if k1.holds else "fixed point found",
            None if k1.holds else {"word": list(k1.witness[0]), "element": k1.witness[1]})
    rep.merge(check_K2(J, p), prefix="(a) K2 ")
    rep.add("(b) type pair", INFO, "edge pair versus non-edge pair", [list(g) for g in GAMMA_ORG])

    E = e_closure(J)
    counts = [len(cls & a.X) for cls in E.classes]
    ok_c = all(k == 1 for k in counts)
    rep.add("(c) one seed per class", ok_c,
            "X meets every class of the map equivalence exactly once" if ok_c
            else "class met zero or several times",
            None if ok_c else [sorted(J.label(x) for x in cls) for cls, k in zip(E.classes, counts) if k != 1][:3])

    S = from_org(J)
    idx = {x: i for i, x in enumerate(sorted(a.X))}
    fam = TupleFamily.singletons(idx[x] for x in sorted(a.X, key=lambda x: J.rank[x]))
    ent = graph_entangled(S.restrict(a.X), fam)
    missing = None if ent.holds else {"missing": list(ent.failing)}
    if len(a.X) < 3:
        # one pair of seeds realizes one pattern at most, so the test cannot be met
        rep.add("(d) entangled", INFO, "degenerate: fewer than three seeds, both patterns cannot occur", missing)
    else:
        rep.add("(d) entangled", ent.holds,
                "seed pairs realize both the edge and the non-edge pattern" if ent.holds
                else "some pattern is never realized by a pair of seeds", missing)

    odd, even = parity_translates(J, a.X)
    ok_e = a.X1 == odd and a.X2 == even and not (odd & even) and a.X <= a.X2
    rep.add("(e) parity classes", ok_e,
            "X1 holds the odd translates, X2 the even ones, and they are disjoint" if ok_e
            else "stored parity classes disagree with the translates")

    hits: dict[int, list] = {i: [] for i in range(len(p.B))}
    unmatched = []
    for s in sorted(a.X):
        om = OmegaS(J, s)
        match = [i for i, D in enumerate(p.B) if om.equals_omega(D)[0]]
        if len(match) != 1:
            unmatched.append(J.label(s))
        for i in match:
            hits[i].append(s)
    empty = [i for i, v in hits.items() if not v]
    ok_f = not empty and not unmatched
    if not ok_f:
        detail_f = "member without seed or seed without unique member"
    elif a.lam == 1:
        detail_f = "degenerate pass: a single block, so each word class holds one seed"
    else:
        detail_f = "every member of B has a seed with its word set, and seeds split uniquely"
    rep.add("(f) seeds per member", ok_f, detail_f,
            None if ok_f else {"empty": empty, "unmatched": unmatched})

    expect = _translate_edges(J, a.X)
    ok_h = expect == set(J.edges)
    diff = sorted((set(J.edges) - expect) | (expect - set(J.edges)))
    rep.add("(h) edges are translates", ok_h,
            "edge set equals the word translates of the seed edges" if ok_h else "edge set differs",
            None if ok_h else [[J.label(x), J.label(y)] for x, y in diff[:5]])

    orbit = {s: OmegaS(J, s).reach for s in a.X}
    bad_i = None
    for s1, s2 in itertools.permutations(sorted(a.X), 2):
        ranks1 = [J.rank[x] for x in orbit[s1]]
        ranks2 = [J.rank[x] for x in orbit[s2]]
        if J.less(s1, s2) and not max(ranks1) < min(ranks2):
            bad_i = [J.label(s1), J.label(s2)]
            break
        if not J.less(s1, s2) and not min(ranks1) > max(ranks2):
            bad_i = [J.label(s1), J.label(s2)]
            break
    rep.add("(i) orbits ordered like seeds", bad_i is None,
            "translates of distinct seeds compare as the seeds do", bad_i)

    bad_j = None
    for t, v in itertools.combinations(sorted(a.X), 2):
        corr = _same_words(J, t, v)
        if corr is None:
            continue
        if not corr:
            bad_j = [J.label(t), J.label(v)]
            break
        for x, y in itertools.combinations(corr, 2):
            if J.less(x, y) != J.less(corr[x], corr[y]):
                bad_j = [J.label(t), J.label(v)]
                break
        if bad_j:
            break
    rep.add("(j) uniform block orders", bad_j is None,
            "seeds with equal word sets order their translates alike", bad_j)
    rep.notes.append("Z computed from Y with odd words on Y; with Y = X it is the odd class X1")
    return rep


def search_isomorphism_twins(a: TwinAssembly, budget=None):
    """Search for an isomorphism between the two realized twins."""
    return search_isomorphism(a.M1.model, a.M2.model, budget)


# ---------------------------------------------------------------- mutations

MUTATIONS = (
    "edge-within-block", "drop-edge", "swap-within-block", "swap-across-blocks", "extra-seed",
    "drop-map-pair", "extra-member", "swap-parity", "drop-seed", "corrupt-map-target",
)


def _with_J(a: TwinAssembly, **kw) -> TwinAssembly:
    J = a.J
    fields = dict(n=J.n, order=J.order, edges=J.edges, maps=J.maps, frontier=J.frontier, labels=J.labels)
    fields.update(kw)
    return dataclasses.replace(a, J=OrgStructure(**fields))


def _block_members(a: TwinAssembly, alpha: int) -> list[int]:
    return list(range(a.offsets[alpha], a.offsets[alpha] + a.blocks[alpha].n))


def mutate(a: TwinAssembly, kind: str, seed: int = 0) -> TwinAssembly:
    """A copy of ``a`` with one seeded defect; the structure is not rebuilt."""
    rng = random.Random(seed)
    J = a.J
    inner = [x for x in range(J.n) if x not in J.frontier]
    if kind == "edge-within-block":
        cand = []
        for alpha in range(a.lam):
            pts = [x for x in _block_members(a, alpha) if x in a.X1 and x not in J.frontier]
            cand += [e for e in itertools.combinations(pts, 2) if not J.adjacent(*e)]
        if not cand:
            cand = [e for alpha in range(a.lam)
                    for e in itertools.combinations(_block_members(a, alpha), 2) if not J.adjacent(*e)]
        return _with_J(a, edges=J.edges | {rng.choice(cand)})
    if kind == "drop-edge":
        if not J.edges:
            raise ValueError("no edge to drop")
        seed_edges = sorted(e for e in J.edges if set(e) <= a.X)
        e = rng.choice(seed_edges or sorted(J.edges))
        return _with_J(a, edges=J.edges - {e})
    if kind in ("swap-within-block", "swap-across-blocks"):
        if kind == "swap-within-block":
            same = [al for al in range(a.lam)
                    if any(a.D_seq[be] == a.D_seq[al] for be in range(a.lam) if be != al)]
            alpha = rng.choice(same or list(range(a.lam)))
            pts = _block_members(a, alpha)
            x, y = rng.sample(pts, 2)
        else:
            if a.lam < 2:
                raise ValueError("need two blocks")
            al, be = rng.sample(range(a.lam), 2)
            x, y = rng.choice(_block_members(a, al)), rng.choice(_block_members(a, be))
        order = list(J.order)
        i, j = order.index(x), order.index(y)
        order[i], order[j] = order[j], order[i]
        return _with_J(a, order=tuple(order))
    if kind == "extra-seed":
        extra = rng.choice(sorted(set(range(J.n)) - a.X))
        return dataclasses.replace(a, X=a.X | {extra})
    if kind == "drop-seed":
        gone = rng.choice(sorted(a.X))
        return dataclasses.replace(a, X=a.X - {gone})
    if kind == "swap-parity":
        return dataclasses.replace(a, X1=a.X2, X2=a.X1)
    if kind == "extra-member":
        T = a.p.T
        full = frozenset(range(T.n))
        new = full if full not in a.p.B else frozenset(T.maximal())
        if new in a.p.B:
            new = frozenset(sorted(T.maximal())[:1]) | frozenset(T.minimal())
        return dataclasses.replace(a, p=a.p.with_B(a.p.B + (new,)))
    if kind in ("drop-map-pair", "corrupt-map-target"):
        nodes = [k for k, m in J.maps.items() if len(m)]
        node = rng.choice(nodes)
        pairs = dict(J.maps[node].items())
        src = rng.choice([s for s in sorted(pairs) if s in inner] or sorted(pairs))
        if kind == "drop-map-pair":
            # drop it from every node sharing that pair so monotonicity is not the only casualty
            new = {}
            for k, m in J.maps.items():
                new[k] = PartialMap((s, t) for s, t in m.items() if not (s == src and t == pairs[src]))
        else:
            used = set(pairs.values())
            free = [t for t in range(J.n) if t not in used]
            if free:
                pairs[src] = rng.choice(free)
            else:
                other = rng.choice([s for s in pairs if s != src])
                pairs[src], pairs[other] = pairs[other], pairs[src]
            new = {k: (PartialMap(pairs) if k == node else m) for k, m in J.maps.items()}
        return _with_J(a, maps=MapFamily(new))
    raise ValueError(f"unknown mutation {kind!r}")


__all__ = [
    "TwinAssembly", "assemble", "verify_solution_isomorphism", "verify_twin_hypotheses", "mutate",
    "MUTATIONS", "parity_translates", "realize_twins", "search_isomorphism", "search_isomorphism_twins",
]
