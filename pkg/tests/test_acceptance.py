"""Acceptance suite: one test per criterion, each under its own time limit.

Run with ``pytest tests/test_acceptance.py -v``; a summary block with one
line per criterion is printed at the end of the session.
"""
import collections
import dataclasses
import itertools
import random
import time

import pytest

from twinforge.entangle import Coloring, TupleFamily, graph_entangled, org_entangled, pr0_check
from twinforge.logic import ANTI, ISO, Filtration, chain_clock, count_filtration, solve_iso_game, solve_tree_clock_game
from twinforge.org import OrgStructure, build_block, check_K1, generic_map, naive_fixed_point
from twinforge.pipeline import MUTATIONS, assemble, mutate, verify_twin_hypotheses, verify_solution_isomorphism
from twinforge.poset import FinPoset, is_dense, is_directed, seq_tree
from twinforge.posetdb import load_posets, to_finposet
from twinforge.report import FAIL
from twinforge.structures import complete, graph, path
from twinforge.twinship import (TwinshipParam, intersection_closure, is_strong, is_tree_like, solves,
                                validate_param, wellfound_transform)
from twinforge.words import MapFamily, PartialMap, eval_word, is_formally_reduced, iter_words, word_compatible, word_le

from conftest import single_param, vshape_param
from test_pipeline import checker_verdicts, mixed_coloring, solving_downsets


class Clock:
    def __init__(self, limit):
        self.limit = limit
        self.start = time.perf_counter()

    def check(self):
        spent = time.perf_counter() - self.start
        assert spent < self.limit, f"took {spent:.1f} s, limit {self.limit} s"


# ---------------------------------------------------------------- helpers

def random_tree_param(rng, nmax=6, members=2):
    """A valid tree-like parameter whose frontier is the set of leaves."""
    while True:
        n = rng.randint(1, nmax)
        T = FinPoset.from_pairs(n, [(rng.randrange(x), x) for x in range(1, n) if rng.random() < 0.8])
        leaves = T.maximal()
        B = []
        for _ in range(rng.randint(1, members)):
            D = frozenset(x for x in range(n) if rng.random() < 0.5) | leaves
            B.append(frozenset(y for x in D for y in T.up(x)))
        p = TwinshipParam(T, intersection_closure(B), "omega", leaves)
        if validate_param(p).ok and is_tree_like(p):
            return p


def random_param(rng, nmax=6):
    """A valid parameter on a random poset; B is built from up-sets holding every maximal element."""
    while True:
        n = rng.randint(1, nmax)
        T = FinPoset.from_pairs(n, [e for e in itertools.combinations(range(n), 2) if rng.random() < 0.4])
        top = T.maximal()
        B = []
        for _ in range(rng.randint(1, 3)):
            D = frozenset(x for x in range(n) if rng.random() < 0.5) | top
            B.append(frozenset(y for x in D for y in T.up(x)))
        p = TwinshipParam(T, intersection_closure(B), "omega", top)
        if validate_param(p).ok:
            return p


def reduced(w):
    out = []
    for g, s in w:
        if out and out[-1] == (g, -s):
            out.pop()
        else:
            out.append((g, s))
    return out


def left_invariant_rule(lengths):
    """Join two words when the reduced quotient ``a^-1 b`` has a length in ``lengths``."""
    def rule(a, b):
        inv = [(g, -s) for g, s in reversed(a)]
        return len(reduced(inv + list(b))) in lengths
    return rule


def with_maps(J, G, edit):
    old = dict(J.maps.items())
    new = {k: PartialMap(edit(k, dict(old[k].items()) if k in old else {})) if k in G else old[k]
           for k in set(old) | set(G)}
    return dataclasses.replace(J, maps=MapFamily(new))


def break_well_defined(J, G, F, rng):
    eta = rng.choice([g for g in G if len(J.maps[g])])
    a = rng.choice(sorted(x for x in J.maps[eta].domain if x not in J.frontier))
    other = rng.choice([g for g in G if g != eta])
    c = rng.choice([x for x in range(J.n) if x != F(a)])

    def edit(k, pairs):
        if k != other:
            return pairs
        pairs = {s: t for s, t in pairs.items() if s != a and t != c}
        pairs[a] = c
        return pairs
    return with_maps(J, G, edit)


def break_automorphism(J, F, rng):
    dom = sorted(F.domain)
    cand = [(x, y) for x, y in itertools.combinations(dom, 2) if {x, y} != {F(x), F(y)}]
    x, y = rng.choice(cand)
    return dataclasses.replace(J, edges=J.edges ^ {(min(x, y), max(x, y))})


def break_domain(J, G, rng):
    a = rng.choice(J.interior)
    return with_maps(J, G, lambda k, pairs: {s: t for s, t in pairs.items() if s != a})


def break_range(J, G, rng):
    b = rng.choice(J.interior)
    return with_maps(J, G, lambda k, pairs: {s: t for s, t in pairs.items() if t != b})


def generic_map_triples(rng, want):
    """(parameter, structure, solving down-set) with a non-identity generic map and |G| >= 2."""
    out = []
    while len(out) < want:
        p = random_tree_param(rng)
        if rng.random() < 0.5:
            L = rng.randint(1, 3)
            lengths = frozenset(k for k in range(1, 2 * L + 1) if rng.random() < 0.5)
            J = build_block(p, rng.randrange(len(p.B)), L, edge_rule=left_invariant_rule(lengths))
        else:
            lam = max(2, len(p.B))
            D = list(range(len(p.B))) + [rng.randrange(len(p.B)) for _ in range(lam - len(p.B))]
            J = assemble(p, lam, D, L=rng.randint(1, 2), realize=False).J
        if J.n > 30:
            continue
        for m in range(p.T.n):
            G = sorted(p.T.down(m))
            if len(G) < 2 or not solves(p, G):
                continue
            F = generic_map(J, p, G).F
            moved = [x for x in F.domain if F(x) != x]
            swaps_only = all({x, y} == {F(x), F(y)} for x, y in itertools.combinations(sorted(F.domain), 2))
            if moved and not swaps_only:
                out.append((p, J, G))
    return out[:want]


# --------------------------------------------------------------- criteria

@pytest.mark.criterion(1, "generic map assertions and their mutations", 60)
def test_generic_map_assertions():
    clock = Clock(60)
    rng = random.Random(101)
    triples = generic_map_triples(rng, 120)
    assert len(triples) >= 100
    names = ["well-defined", "partial automorphism", "domain", "range"]
    for p, J, G in triples:
        assert p.T.n <= 6 and J.n <= 30
        gm = generic_map(J, p, G)
        assert gm.solves
        assert [c.name for c in gm.report.clauses] == names
        assert gm.report.ok, gm.report.failed()
        broken = {
            names[0]: break_well_defined(J, G, gm.F, rng),
            names[1]: break_automorphism(J, gm.F, rng),
            names[2]: break_domain(J, G, rng),
            names[3]: break_range(J, G, rng),
        }
        for name, K in broken.items():
            assert generic_map(K, p, G, strict=False).report[name].status == FAIL, name
    clock.check()


@pytest.mark.criterion(2, "finite parameters with dense members are not strong", 10)
def test_finite_parameters_are_never_strong():
    clock = Clock(10)
    checked = 0
    for n in range(1, 9):
        for down in load_posets(n):
            T = to_finposet(down)
            top = T.maximal()
            families = [(top,), intersection_closure(top | {x} for x in range(n))]
            for B in families:
                assert all(is_dense(T, D) for D in B)
                p = TwinshipParam(T, B)
                r = is_strong(p)
                assert not r.strong
                assert r.witness == T.down(r.top)
                assert is_directed(T, r.witness) and solves(p, r.witness)
                checked += 1
    assert checked == 2 * sum(len(load_posets(n)) for n in range(1, 9))
    clock.check()


def partial_injections(n):
    out = []
    for k in range(n + 1):
        for dom in itertools.combinations(range(n), k):
            for img in itertools.permutations(range(n), k):
                out.append(dict(zip(dom, img)))
    return out


@pytest.mark.criterion(3, "atlas search agrees with naive word enumeration", 120)
def test_atlas_matches_naive_enumeration():
    clock = Clock(120)
    cases = 0
    for n in range(1, 5):
        inj = partial_injections(n)
        families = [{0: f} for f in inj] + [{0: f, 1: g} for f in inj for g in inj]
        for maps in families:
            J = OrgStructure(n, tuple(range(n)), frozenset(), MapFamily(maps))
            r = check_K1(J)
            assert r.holds == (naive_fixed_point(J, 4) is None)
            if not r.holds:
                w, a = r.witness
                assert is_formally_reduced(w) and eval_word(J.maps, w, a) == a
            cases += 1
    assert cases == sum(len(partial_injections(n)) * (1 + len(partial_injections(n))) for n in range(1, 5))
    clock.check()


def has_mono_triangle(c):
    return any(c(a, b) == c(a, d) == c(b, d) for a, b, d in itertools.combinations(range(c.lam), 3))


@pytest.mark.criterion(4, "pentagon coloring holds, every 6-point coloring fails", 300)
def test_pentagon_and_six_point_sweep():
    clock = Clock(300)
    assert pr0_check(Coloring.pentagon(), 1, 3, 2).holds
    for bits in range(2 ** 15):
        c = Coloring.from_bits(6, bits)
        r = pr0_check(c, 1, 3, 2)
        assert not r.holds
        # the reported triple sees a single color on all three pairs
        fam = [t[0] for t in r.family]
        assert len({c(a, b) for a, b in itertools.combinations(fam, 2)}) == 1
        assert has_mono_triangle(c)
    clock.check()


@pytest.mark.criterion(5, "well-founded transform validates and is tree-like", 30)
def test_wellfound_transform():
    clock = Clock(30)
    rng = random.Random(5)
    for _ in range(200):
        p = random_param(rng)
        assert p.T.n <= 6
        q = wellfound_transform(p, rng.randrange(p.T.n))
        rep = validate_param(q)
        assert rep.ok, rep.failed()
        assert is_tree_like(q)
        assert len(q.B) <= len(p.B)
    clock.check()


@pytest.mark.criterion(6, "word order laws and compatibility", 30)
def test_word_order_laws():
    clock = Clock(30)
    T = seq_tree(2, 3)
    W = list(iter_words(range(T.n), 3))
    index = {w: i for i, w in enumerate(W)}
    up = []
    for a in W:
        m = 0
        for j, b in enumerate(W):
            if word_le(T, a, b):
                m |= 1 << j
        up.append(m)
    for i, a in enumerate(W):
        assert up[i] >> i & 1
        m = up[i]
        while m:
            j = (m & -m).bit_length() - 1
            m &= m - 1
            if j != i:
                assert not up[j] >> i & 1, (a, W[j])
            assert up[j] & ~up[i] == 0, (a, W[j])
    # compatible exactly when a common upper bound exists
    for i, a in enumerate(W):
        ui = up[i]
        for j, b in enumerate(W):
            assert word_compatible(T, a, b) == bool(ui & up[j]), (a, b)
    assert len(index) == len(W) == 1 + 14 + 14 ** 2 + 14 ** 3
    clock.check()


PIPELINE_PARAMS = (single_param, vshape_param)


def entangled_colorings(lam):
    if lam < 3:
        return [None]
    return [c for c in (Coloring.from_bits(lam, b) for b in range(2 ** (lam * (lam - 1) // 2)))
            if len({v for _, v in c.items()}) == 2]


@pytest.mark.criterion(7, "pipeline end to end with mutation coverage", 120)
def test_pipeline_end_to_end():
    clock = Clock(120)
    cover = collections.defaultdict(set)
    keys = set()
    runs = 0
    for make in PIPELINE_PARAMS:
        p = make()
        assert len(p.B) <= 2
        Gs = solving_downsets(p)
        assert Gs
        for lam in (2, 3):
            for D in itertools.product(range(len(p.B)), repeat=lam):
                if set(D) != set(range(len(p.B))):
                    continue
                for L in (1, 2, 3):
                    for c in entangled_colorings(lam):
                        a = assemble(p, lam, D, c=c, L=L)
                        rep = verify_twin_hypotheses(a)
                        assert rep.ok, rep.failed()
                        for G in Gs:
                            sol = verify_solution_isomorphism(a, G)
                            assert sol.ok, sol.failed()
                        runs += 1
                    a = assemble(p, lam, D, c=mixed_coloring(lam), L=L)
                    base = checker_verdicts(a, Gs)
                    assert all(base.values()), base
                    keys |= set(base)
                    for i, kind in enumerate(MUTATIONS):
                        try:
                            b = mutate(a, kind, seed=i)
                        except ValueError:
                            continue
                        for k, ok in checker_verdicts(b, Gs).items():
                            if not ok:
                                cover[k].add(kind)
    assert runs > 0 and len(MUTATIONS) == 10
    # (b) records the fixed pair of types and decides nothing
    missing = sorted(k for k in keys - {"(b)"} if not cover[k])
    assert not missing, missing
    clock.check()


def all_graphs(n):
    pairs = list(itertools.combinations(range(n), 2))
    for bits in range(2 ** len(pairs)):
        yield graph(n, [e for i, e in enumerate(pairs) if bits >> i & 1])


def pair_scan(G, elems):
    """Both an adjacent and a non-adjacent pair among the listed points."""
    seen = {(a, b) in G.relations["R"] for a, b in itertools.combinations(elems, 2)}
    return seen == {True, False}


ONE_NODE = TwinshipParam(FinPoset.chain(1), (frozenset({0}),), "omega", frozenset({0}))


def bare_org(G):
    edges = frozenset((a, b) for a, b in G.relations["R"] if a < b)
    return OrgStructure(G.n, tuple(range(G.n)), edges, MapFamily({}))


@pytest.mark.criterion(8, "entanglement agrees with the pair scan and the graph case", 60)
def test_entanglement_oracles():
    clock = Clock(60)
    for n in range(7):
        for G in all_graphs(n):
            fam = TupleFamily.singletons(range(n))
            r = graph_entangled(G, fam)
            assert r.holds == pair_scan(G, range(n))
            assert org_entangled(bare_org(G), fam, ONE_NODE).holds == r.holds
            if n == 6:
                pairs = TupleFamily(((0, 1), (2, 3), (4, 5)))
                assert org_entangled(bare_org(G), pairs, ONE_NODE).holds == graph_entangled(G, pairs).holds
    assert graph_entangled(path(4), TupleFamily.singletons(range(4))).holds
    assert not graph_entangled(complete(4), TupleFamily.singletons(range(4))).holds
    clock.check()


def random_filtration(rng, M):
    cuts = sorted(rng.sample(range(M.n + 1), rng.randint(1, M.n + 1)))
    if cuts[-1] != M.n:
        cuts.append(M.n)
    perm = list(range(M.n))
    rng.shuffle(perm)
    return Filtration(M, tuple(frozenset(perm[:k]) for k in cuts))


@pytest.mark.criterion(9, "game engine on self games, P3 against K3 and chain clocks", 30)
def test_game_engine():
    clock = Clock(30)
    rng = random.Random(9)
    tested = []
    for _ in range(50):
        n = rng.randint(1, 5)
        M = graph(n, [e for e in itertools.combinations(range(n), 2) if rng.random() < 0.5])
        F = random_filtration(rng, M)
        assert solve_iso_game(F, F, 3).winner == ISO
        tested.append((F, F))
        N = graph(n, [e for e in itertools.combinations(range(n), 2) if rng.random() < 0.5])
        tested.append((F, Filtration(N, F.stages)))
    P, K = count_filtration(path(3)), count_filtration(complete(3))
    assert solve_iso_game(P, K, 1).winner == ANTI
    assert solve_iso_game(P, K, 3).winner == ANTI
    tested.append((P, K))
    for F, G in tested:
        for z in range(4):
            assert solve_tree_clock_game(F, G, chain_clock(z)).winner == solve_iso_game(F, G, z).winner
    clock.check()
