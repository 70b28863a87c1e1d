import itertools

import pytest

from twinforge.errors import InvalidElement, InvalidParameter
from twinforge.poset import FinPoset, is_dense, seq_tree
from twinforge.report import FAIL, PASS, SKIP
from twinforge.twinship import (ForcingExample, TwinshipParam, derive_from_forcing, intersection_closure,
                                is_strong, is_tree_like, solves, validate_param, wellfound_transform)

from conftest import level_param, vshape_param


def test_level_parameter_passes():
    rep = validate_param(level_param(levels=(1, 2, 3)))
    assert rep.ok, rep.failed()
    assert rep["(C)(c) full intersection"].status == SKIP


def test_two_level_sets_leave_length_two_nodes_unavoided():
    # with only levels >= 1 and >= 2, nothing lies wholly above or beside a length-2 node
    p = level_param(levels=(1, 2))
    rep = validate_param(p)
    assert rep["(C)(b) avoidance"].status == FAIL
    assert sorted(rep["(C)(b) avoidance"].witness) == ["00", "01", "10", "11"]


def test_verbatim_mode_fails_at_leaves():
    p = level_param(levels=(1, 2, 3))
    rep = validate_param(p, verbatim=True)
    leaves = {p.T.label(x) for x in p.T.maximal()}
    assert set(rep["(C)(b) avoidance"].witness) == leaves
    p0 = TwinshipParam(p.T, p.B, "omega", frozenset())
    assert validate_param(p0)["(C)(b) avoidance"].status == FAIL


def test_intersection_closure_clause():
    T = seq_tree(2, 2)
    B = (frozenset({0, 1}), frozenset({0, 2}))
    rep = validate_param(TwinshipParam(T, B))
    assert rep["(C)(a) closure"].status == FAIL
    assert validate_param(TwinshipParam(T, intersection_closure(B)))["(C)(a) closure"].status == PASS


def test_meet_clause_reports_n_shape():
    N = FinPoset.from_pairs(4, [(0, 2), (0, 3), (1, 2), (1, 3)])
    rep = validate_param(TwinshipParam(N, (frozenset({2, 3}),), "omega", frozenset({2, 3})))
    assert rep["(A) meets"].status == FAIL


def test_uncountable_tag_enforces_full_intersection():
    T = seq_tree(2, 3)
    B = (frozenset({1, 3, 4}), frozenset({2, 5, 6}))
    rep = validate_param(TwinshipParam(T, B, "uncountable", T.maximal()))
    assert rep["(C)(c) full intersection"].status == FAIL
    with pytest.raises(InvalidParameter):
        TwinshipParam(T, B, "aleph")


def test_level_demand_flag():
    rep = validate_param(level_param(levels=(1, 2, 3)), demand_levels=True)
    assert rep["(D) levels"].status == PASS
    rep = validate_param(level_param(levels=(1,)), demand_levels=True)
    assert rep["(D) levels"].status == FAIL


def test_solves_examples():
    p = level_param(levels=(1, 2, 3))
    T = p.T
    branch = [T.index(s) for s in ("", "0", "01", "010")]
    assert solves(p, branch)
    assert not solves(p, [T.index("")])
    assert not solves(p, [T.index("0"), T.index("1")])


def test_strongness_examples():
    p = level_param(levels=(1, 2, 3))
    r = is_strong(p)
    assert not r.strong
    assert r.top in p.T.maximal() and r.witness == p.T.down(r.top)
    # two chains 0<1 and 2<3 plus an isolated point; targets in different chains
    P = FinPoset.from_pairs(5, [(0, 1), (2, 3)])
    assert is_strong(TwinshipParam(P, (frozenset({1}), frozenset({3})))).strong
    assert not is_strong(TwinshipParam(P, (frozenset(range(5)),))).strong


def test_strong_check_agrees_with_all_directed_subsets(rng):
    from conftest import random_poset
    for _ in range(80):
        P = random_poset(rng, rng.randint(1, 6))
        B = tuple(frozenset(x for x in range(P.n) if rng.random() < 0.4) for _ in range(rng.randint(1, 3)))
        p = TwinshipParam(P, B)
        has_solution = any(solves(p, G) for r in range(P.n + 1) for G in itertools.combinations(range(P.n), r))
        assert is_strong(p).strong == (not has_solution)


def tree_forcing(depth=3):
    T = seq_tree(2, depth)
    return ForcingExample(2, "omega", T, T, tuple(range(T.n)))


def test_forcing_example_validation():
    T = seq_tree(2, 2)
    with pytest.raises(InvalidParameter):
        ForcingExample(1, "omega", T, T, tuple(range(T.n)))
    P = FinPoset.chain(1)
    with pytest.raises(InvalidParameter):
        ForcingExample(2, "omega", T, P, (0,))  # leaves never forced


def test_derive_from_tree_forcing():
    m = tree_forcing()
    d = derive_from_forcing(m)
    T = m.tree
    assert not d.truncated
    from twinforge.poset import maximal_antichains
    for I in maximal_antichains(T):
        up = frozenset(y for x in I for y in T.up(x))
        assert up in d.param.B
    rep = validate_param(d.param)
    assert rep["(A) meets"].status == PASS and rep["(C)(a) closure"].status == PASS
    for D in d.param.B:
        assert all(T.up(x) <= D for x in D)
        assert is_dense(T, D)


def test_trivial_forcing_gives_whole_tree():
    T = seq_tree(2, 2)
    P = FinPoset.chain(1)
    # one condition naming the root cannot force the leaves, so name leaves via a 3-chain
    P3 = FinPoset.from_pairs(3, [(0, 1), (0, 2)])
    m = ForcingExample(2, "omega", T, P3, (0, 1, 2))
    d = derive_from_forcing(m)
    assert frozenset(range(T.n)) in d.param.B
    m1 = ForcingExample(2, "omega", seq_tree(2, 1), P, (0,))
    assert derive_from_forcing(m1).param.B == (frozenset({0}),)


def test_derive_truncation_flag():
    d = derive_from_forcing(tree_forcing(4), antichain_cap=2)
    assert d.truncated


def test_wellfound_on_chain():
    C = FinPoset.from_pairs(3, [(0, 1), (1, 2)], labels=("a", "b", "c"))
    p = TwinshipParam(C, (frozenset({0, 1, 2}),), "omega", frozenset({2}))
    q = wellfound_transform(p, 0)
    names = {tuple(C.label(x) for x in s) for s in q.T.labels}
    assert names == {("a",), ("a", "b"), ("a", "b", "c"), ("a", "c"), ("b",), ("b", "c"), ("c",)}
    assert q.B == (frozenset(range(q.T.n)),)
    assert is_tree_like(q) and q.T.is_tree()
    with pytest.raises(InvalidElement):
        wellfound_transform(p, 7)


def test_wellfound_start_restricts_to_upper_cone():
    p = vshape_param()
    q = wellfound_transform(p, 1)
    assert {s for s in q.T.labels} == {(1,)}
    assert validate_param(q).ok and len(q.B) <= len(p.B)
