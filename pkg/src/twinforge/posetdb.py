"""Unlabeled finite posets: enumeration up to isomorphism and a bundled table.

A poset on ``0..n-1`` is stored naturally labelled as a tuple of down-set
bitmasks (each including the element itself), with ``i < j`` only when
``i`` precedes ``j`` in id order.
"""

from __future__ import annotations

import gzip
import json
from functools import lru_cache
from importlib import resources
from typing import Iterator

import networkx as nx
from networkx.algorithms.isomorphism import DiGraphMatcher

from .poset import FinPoset, _members

# number of posets on n unlabeled points, n = 0..8
KNOWN_COUNTS = (1, 1, 2, 5, 16, 63, 318, 2045, 16999)
DATA_FILE = "posets_upto8.json.gz"


def _digraph(down: tuple[int, ...]) -> nx.DiGraph:
    g = nx.DiGraph()
    g.add_nodes_from(range(len(down)))
    for j, m in enumerate(down):
        for i in _members(m):
            if i != j:
                g.add_edge(i, j)
    return g


def _extensions(down: tuple[int, ...]) -> Iterator[tuple[int, ...]]:
    """Add a new maximal element above each down-closed subset."""
    n = len(down)
    for S in range(1 << n):
        if all(down[i] & ~S == 0 for i in _members(S)):
            yield down + (S | (1 << n),)


def enumerate_posets(nmax: int) -> list[list[tuple[int, ...]]]:
    """Representatives of every isomorphism class, for sizes ``0..nmax``."""
    levels: list[list[tuple[int, ...]]] = [[()]]
    for n in range(1, nmax + 1):
        buckets: dict[str, list[tuple[tuple[int, ...], nx.DiGraph]]] = {}
        reps = []
        for down in levels[-1]:
            for ext in _extensions(down):
                g = _digraph(ext)
                key = nx.weisfeiler_lehman_graph_hash(g, iterations=3)
                bucket = buckets.setdefault(key, [])
                if any(DiGraphMatcher(h, g).is_isomorphic() for _, h in bucket):
                    continue
                bucket.append((ext, g))
                reps.append(ext)
        levels.append(reps)
    return levels


def to_finposet(down: tuple[int, ...]) -> FinPoset:
    n = len(down)
    pairs = [(i, j) for j, m in enumerate(down) for i in _members(m) if i != j]
    return FinPoset.from_pairs(n, pairs)


@lru_cache(maxsize=1)
def _bundled() -> dict[int, list[tuple[int, ...]]]:
    raw = resources.files("twinforge").joinpath("data", DATA_FILE).read_bytes()
    obj = json.loads(gzip.decompress(raw))
    return {int(k): [tuple(d) for d in v] for k, v in obj.items()}


def load_posets(n: int) -> list[tuple[int, ...]]:
    """Bundled representatives of size ``n`` (``n <= 8``)."""
    table = _bundled()
    if n not in table:
        raise ValueError(f"no bundled posets of size {n}")
    return table[n]


def write_table(path, nmax: int = 8) -> None:
    levels = enumerate_posets(nmax)
    obj = {str(n): [list(d) for d in lv] for n, lv in enumerate(levels)}
    with gzip.open(path, "wt") as fh:
        json.dump(obj, fh, separators=(",", ":"))


def isomorphic(a: tuple[int, ...], b: tuple[int, ...]) -> bool:
    return len(a) == len(b) and DiGraphMatcher(_digraph(a), _digraph(b)).is_isomorphic()
