import collections
import itertools

import pytest

from twinforge.entangle import Coloring
from twinforge.errors import InvalidDSequence, NotASolution
from twinforge.org import e_closure
from twinforge.pipeline import (MUTATIONS, assemble, mutate, parity_translates, search_isomorphism_twins,
                                verify_twin_hypotheses, verify_solution_isomorphism)
from twinforge.report import FAIL, INFO, PASS
from twinforge.structures import from_org, is_isomorphism
from twinforge.twinship import solves

from conftest import single_param, vshape_param

INSTANCES = [
    (single_param, 2, (0, 0), 2),
    (vshape_param, 2, (0, 1), 2),
    (vshape_param, 3, (0, 1, 0), 2),
    (vshape_param, 3, (1, 0, 1), 3),
]


def mixed_coloring(lam):
    """Both colors among the seed pairs once there are three seeds."""
    if lam < 3:
        return None
    return Coloring(lam, {pr: int(pr == (0, 1)) for pr in itertools.combinations(range(lam), 2)})


def solving_downsets(p):
    return [p.T.down(m) for m in range(p.T.n) if solves(p, p.T.down(m))]


def checker_verdicts(a, Gs):
    """Pass/fail per clause checker, keyed by clause letter."""
    out = {}
    for c in verify_twin_hypotheses(a).clauses:
        key = "(a)" if c.name.startswith("(a)") else c.name.split(" ")[0]
        out[key] = out.get(key, True) and c.status != FAIL
    for G in Gs:
        try:
            rep = verify_solution_isomorphism(a, G)
        except NotASolution:
            out["sol(i)"] = False
            continue
        for c in rep.clauses:
            if not c.name.startswith("generic"):
                key = "sol" + c.name.split(" ")[0]
                out[key] = out.get(key, True) and c.status != FAIL
    return out


def test_single_node_assembly():
    a = assemble(single_param(), 2, (0, 0), L=2)
    assert a.J.n == 10
    assert len(a.X) == 2 and a.X <= a.X1 | a.X2
    assert all(len(a.label(x)[1]) % 2 == 1 for x in a.X1)
    assert all(len(a.label(x)[1]) % 2 == 0 for x in a.X2)
    assert a.Z == a.X1
    assert len(a.J.edges) == 5
    assert verify_twin_hypotheses(a).ok
    rep = verify_solution_isomorphism(a, [0])
    assert rep.ok
    assert is_isomorphism(from_org(a.J).restrict(a.X1), a.M1.model, {i: i for i in range(len(a.X1))})


def test_zero_coloring_gives_no_edges():
    a = assemble(single_param(), 2, (0, 0), c=Coloring.constant(2, 0))
    assert not a.J.edges


def test_d_sequence_must_cover_b():
    with pytest.raises(InvalidDSequence):
        assemble(vshape_param(), 2, (1, 1))
    with pytest.raises(InvalidDSequence):
        assemble(vshape_param(), 3, (0, 1))


def test_empty_g_is_not_a_solution():
    a = assemble(single_param(), 2, (0, 0))
    with pytest.raises(NotASolution):
        verify_solution_isomorphism(a, [])


def test_one_sided_edge_rule_breaks_order_and_edges():
    # edges from every seed-block element to the next block's odd words only
    def rule(x, y):
        return x[0] != y[0] and len(x[1]) == 0 and len(y[1]) % 2 == 1
    a = assemble(single_param(), 2, (0, 0), edge_rule=rule)
    rep = verify_solution_isomorphism(a, [0])
    assert rep["(i) order and edges"].status == FAIL
    assert rep["(i) order and edges"].witness is not None


def test_single_block_flags_degenerate_seed_count():
    a = assemble(single_param(), 1, (0,))
    rep = verify_twin_hypotheses(a)
    assert rep.ok
    assert "degenerate" in rep["(f) seeds per member"].detail
    assert rep["(b) type pair"].status == INFO


@pytest.mark.parametrize("make, lam, D, L", INSTANCES)
def test_structural_invariants(make, lam, D, L):
    p = make()
    a = assemble(p, lam, D, c=mixed_coloring(lam), L=L)
    E = e_closure(a.J)
    for x, y in a.J.edges:
        assert not E.same(x, y)
    for cls in E.classes:
        assert len(cls & a.X) == 1
    odd, even = parity_translates(a.J, a.X)
    assert (odd, even) == (a.X1, a.X2)
    for G in solving_downsets(p):
        assert verify_solution_isomorphism(a, G).ok


def test_mutations_are_detected_by_every_checker():
    cover = collections.defaultdict(set)
    keys = None
    for make, lam, D, L in INSTANCES:
        p = make()
        a = assemble(p, lam, D, c=mixed_coloring(lam), L=L)
        Gs = solving_downsets(p)
        base = checker_verdicts(a, Gs)
        assert all(base.values()), base
        keys = set(base) if keys is None else keys | set(base)
        for i, kind in enumerate(MUTATIONS):
            try:
                b = mutate(a, kind, seed=i)
            except ValueError:
                continue
            for k, ok in checker_verdicts(b, Gs).items():
                if not ok:
                    cover[k].add(kind)
    # (b) only records the type pair, so every other checker must fail somewhere
    decidable = keys - {"(b)"}
    missing = sorted(k for k in decidable if not cover[k])
    assert not missing, missing
    assert cover["(j)"] >= {"swap-within-block"}
    assert "drop-edge" in cover["(d)"]


def test_entangled_check_needs_both_patterns():
    p = vshape_param()
    assert verify_twin_hypotheses(assemble(p, 2, (0, 1)))["(d) entangled"].status == INFO
    rep = verify_twin_hypotheses(assemble(p, 3, (0, 1, 0)))
    assert rep["(d) entangled"].status == FAIL and rep["(d) entangled"].witness == {"missing": []}
    assert verify_twin_hypotheses(assemble(p, 3, (0, 1, 0), c=mixed_coloring(3)))["(d) entangled"].status == PASS


def test_unknown_mutation():
    a = assemble(single_param(), 2, (0, 0))
    with pytest.raises(ValueError):
        mutate(a, "teleport")
    with pytest.raises(ValueError):
        mutate(assemble(single_param(), 2, (0, 0), c=Coloring.constant(2, 0)), "drop-edge")


@pytest.mark.parametrize("L", [1, 2])
def test_twin_isomorphism_search_matches_permutations(L):
    a = assemble(single_param(), 2, (0, 0), L=L)
    M1, M2 = a.M1.model, a.M2.model
    f = search_isomorphism_twins(a)
    brute = M1.n == M2.n and any(is_isomorphism(M1, M2, dict(enumerate(q)))
                                 for q in itertools.permutations(range(M2.n)))
    assert (f is not None) == brute
