import itertools
import random
from pathlib import Path

import pytest

from twinforge.poset import FinPoset, seq_tree
from twinforge.twinship import TwinshipParam

EXAMPLES = Path(__file__).resolve().parent.parent / "examples_data"


def level_param(depth=4, levels=(1, 2, 3), frontier_level=None):
    T = seq_tree(2, depth)
    top = depth - 1 if frontier_level is None else frontier_level
    B = tuple(frozenset(x for x in range(T.n) if T.level(x) >= e) for e in levels)
    frontier = frozenset(x for x in range(T.n) if T.level(x) == top)
    return TwinshipParam(T, B, "omega", frontier)


def vshape_param():
    T = FinPoset.from_pairs(3, [(0, 1), (0, 2)], labels=("r", "a", "b"))
    return TwinshipParam(T, (frozenset({1}), frozenset({1, 2})), "omega", frozenset({1, 2}))


def single_param():
    T = FinPoset.chain(1)
    return TwinshipParam(T, (frozenset({0}),), "omega", frozenset({0}))


def random_poset(rng, n, density=0.4):
    pairs = [(a, b) for a, b in itertools.combinations(range(n), 2) if rng.random() < density]
    return FinPoset.from_pairs(n, pairs)


@pytest.fixture
def rng():
    return random.Random(20261019)


@pytest.fixture
def examples():
    return EXAMPLES


# ------------------------------------------------ acceptance summary lines

_criteria: list = []


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title, limit): acceptance criterion with a time limit in seconds")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is None or rep.when != "call":
        return
    number, title, limit = mark.args
    _criteria.append((number, title, limit, "PASS" if rep.passed else "FAIL", rep.duration))


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for number, title, limit, verdict, secs in sorted(_criteria):
        terminalreporter.write_line(f"criterion {number}: {verdict}  {title}  ({secs:.1f} s, limit {limit} s)")
