"""Finite fragments of generalized Ehrenfeucht-Mostowski models.

A blueprint here is an explicit table from quantifier-free types of index
pairs to output types, so only skeleton-level relations are materialized.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Callable, Iterable, Mapping

from .errors import BlueprintInconsistent
from .formulas import arity_of, as_formula, evaluate
from .structures import Structure, graph, qf_type

Term = object  # a generator, or (symbol, (arg, ...))


@dataclass(frozen=True)
class FreeTermAlgebra:
    generators: tuple
    signature: Mapping[str, int]
    depth: int

    def __post_init__(self):
        object.__setattr__(self, "generators", tuple(self.generators))
        object.__setattr__(self, "signature", dict(self.signature))
        if self.depth < 0:
            raise ValueError("depth must be non-negative")
        if any(a < 0 for a in self.signature.values()):
            raise ValueError("arities must be non-negative")


def enumerate_terms(alg: FreeTermAlgebra) -> list:
    """All terms of depth at most ``alg.depth``, shallowest first."""
    terms = list(alg.generators)
    seen = {t: i for i, t in enumerate(terms)}
    layer_start = 0
    for _ in range(alg.depth):
        fresh = []
        for sym in sorted(alg.signature):
            ar = alg.signature[sym]
            for args in itertools.product(terms, repeat=ar):
                # require a newest-layer argument so each term appears once
                if ar and not any(seen[a] >= layer_start for a in args):
                    continue
                t = (sym, tuple(args))
                if t not in seen:
                    fresh.append(t)
        layer_start = len(terms)
        for t in fresh:
            seen[t] = len(terms)
            terms.append(t)
    return terms


def term_str(t) -> str:
    if isinstance(t, tuple) and len(t) == 2 and isinstance(t[1], tuple):
        return f"{t[0]}(" + ",".join(term_str(a) for a in t[1]) + ")"
    return str(t)


def _project(tp: tuple, vocab: Iterable[str]) -> tuple:
    k, eq, atoms = tp
    keep = set(vocab)
    return (k, eq, tuple(a for a in atoms if a[0] in keep))


class Blueprint:
    """Maps qf-types of index pairs to output types over ``vocabulary``.

    ``rule`` is a dict keyed by index type or a function of the index type;
    a missing key means the blueprint is undefined there.
    """

    arity = 2

    def __init__(self, rule: Mapping | Callable, vocabulary: Iterable[str] = ("<", "R"),
                 arities: Mapping[str, int] | None = None, name: str = "table", skeleton_arity: int = 1):
        if skeleton_arity != 1:
            raise ValueError("only skeleton arity 1 is supported")
        self.rule = rule
        self.vocabulary = tuple(sorted(vocabulary))
        self.arities = dict(arities or {r: 2 for r in self.vocabulary})
        self.name = name
        self.skeleton_arity = skeleton_arity

    def __call__(self, index_type: tuple):
        if callable(self.rule):
            return self.rule(index_type)
        return self.rule.get(index_type)

    @classmethod
    def identity(cls, vocabulary=("<", "R")) -> "Blueprint":
        voc = tuple(sorted(vocabulary))
        return cls(lambda tp: _project(tp, voc), voc, name="identity")

    @classmethod
    def constant_edges(cls) -> "Blueprint":
        """Every pair of distinct skeleton points becomes an edge."""
        def rule(tp):
            k, eq, _ = tp
            return (k, eq, (("R", () if eq else ((0, 1), (1, 0))),))
        return cls(rule, ("R",), name="complete")

    @classmethod
    def negate_edges(cls) -> "Blueprint":
        def rule(tp):
            k, eq, atoms = tp
            out = []
            for name, hits in atoms:
                if name == "R" and not eq:
                    flip = {(0, 1), (1, 0)} - set(hits)
                    out.append((name, tuple(sorted(flip))))
                else:
                    out.append((name, hits))
            return (k, eq, tuple(out))
        return cls(rule, ("<", "R"), name="negate-edges")

    @classmethod
    def from_pairs(cls, pairs: Iterable[tuple], vocabulary=("<", "R")) -> "Blueprint":
        return cls({_freeze(a): _freeze(b) for a, b in pairs}, vocabulary, name="table")

    def table_for(self, samples: Iterable[Structure]) -> list[tuple]:
        """The (index type, output type) pairs realized in ``samples``."""
        out = {}
        for I in samples:
            for t in itertools.product(range(I.n), repeat=self.arity):
                tp = qf_type(I, t)
                out[tp] = self(tp)
        return sorted(out.items(), key=repr)


def _freeze(x):
    if isinstance(x, list):
        return tuple(_freeze(y) for y in x)
    return x


@dataclass
class GemFragment:
    index: Structure
    blueprint: Blueprint
    model: Structure
    skeleton: tuple[int, ...] = field(default=())

    @property
    def n(self):
        return self.model.n


def gem_realize(I: Structure, phi: Blueprint) -> GemFragment:
    """Skeleton point ``s`` is model element ``s``; atomic facts come from the blueprint."""
    demanded: dict[tuple[str, tuple], bool] = {}
    undefined = []
    for t in itertools.product(range(I.n), repeat=phi.arity):
        tp = qf_type(I, t)
        out = phi(tp)
        if out is None:
            undefined.append(t)
            continue
        k, eq, atoms = out
        if k != phi.arity or tuple(eq) != tp[1]:
            raise BlueprintInconsistent(f"output type for {t} changes the equality pattern")
        hits = dict(atoms)
        for rel in phi.vocabulary:
            ar = phi.arities[rel]
            holds = set(map(tuple, hits.get(rel, ())))
            for pos in itertools.product(range(k), repeat=ar):
                key = (rel, tuple(t[i] for i in pos))
                val = pos in holds
                if demanded.setdefault(key, val) != val:
                    raise BlueprintInconsistent(
                        f"conflicting demands for {rel}{key[1]} (from index tuple {t})")
    if undefined:
        raise BlueprintInconsistent(f"blueprint undefined on the type of {undefined[0]}"
                                    f" ({len(undefined)} tuples)")
    rels = {r: [tup for (rr, tup), v in demanded.items() if rr == r and v] for r in phi.vocabulary}
    M = Structure.make(I.n, rels, phi.arities)
    return GemFragment(I, phi, M, tuple(range(I.n)))


def check_qf_indiscernible_fragment(frag: GemFragment, max_arity: int = 3) -> tuple | None:
    """First pair of index tuples with equal type but different skeleton types, or ``None``."""
    for r in range(max_arity + 1):
        seen: dict = {}
        for t in itertools.product(range(frag.index.n), repeat=r):
            it, ot = qf_type(frag.index, t), qf_type(frag.model, t)
            if seen.setdefault(it, (t, ot))[1] != ot:
                return (seen[it][0], t)
    return None


@dataclass(frozen=True)
class RepresentsResult:
    holds: bool
    counterexample: tuple | None = None
    vacuous: bool = False

    def __bool__(self):
        return self.holds


def check_represents(phi_bp: Blueprint, formula, relation: str, samples: Iterable[Structure]) -> RepresentsResult:
    """``M |= formula[a_t...]`` exactly when ``t... in relation`` on every sample."""
    formula = as_formula(formula)
    n, _ = arity_of(formula)
    samples = list(samples)
    if not samples:
        return RepresentsResult(True, vacuous=True)
    for idx, I in enumerate(samples):
        M = gem_realize(I, phi_bp).model
        for t in itertools.product(range(I.n), repeat=n):
            lhs = evaluate(formula, M, [(x,) for x in t])
            rhs = t in I.relations.get(relation, ())
            if lhs != rhs:
                return RepresentsResult(False, (idx, t))
    return RepresentsResult(True)


NotFound = None


def _target(G, mu):
    if isinstance(G, Structure):
        return G
    return graph(mu, G)


def independence_witness(M: Structure, formula, G, mu: int | None = None):
    """Distinct tuples ``a_0..a_{mu-1}`` with ``phi[a_i, a_j]`` iff ``i R j`` for ``i < j``.

    ``G`` is a graph structure or an edge list (then ``mu`` is required).
    Returns the list of tuples or ``None``.
    """
    G = _target(G, mu)
    want = lambda i, j: (i, j) in G.relations["R"]
    return _search_sequence(M, formula, G.n, want)


def order_witness(M: Structure, formula, n: int):
    """Distinct tuples ``a_0..a_{n-1}`` with ``phi[a_i, a_j]`` iff ``i < j``."""
    return _search_sequence(M, formula, n, lambda i, j: i < j, both_ways=True)


def _search_sequence(M, formula, length, want, both_ways=False):
    formula = as_formula(formula)
    _, k = arity_of(formula)
    k = max(k, 1)
    pool = list(itertools.product(range(M.n), repeat=k))
    seq: list = []

    def ok(j):
        b = seq[j]
        for i in range(j):
            if evaluate(formula, M, [seq[i], b]) != want(i, j):
                return False
            if both_ways and evaluate(formula, M, [b, seq[i]]) != want(j, i):
                return False
        return True

    def rec(j):
        if j == length:
            return True
        for cand in pool:
            if cand in seq:
                continue
            seq.append(cand)
            if ok(j) and rec(j + 1):
                return True
            seq.pop()
        return False

    return list(seq) if rec(0) else NotFound


def half_graph(n: int) -> Structure:
    """Vertices ``a_i = 2i`` and ``b_j = 2j+1`` with ``a_i R b_j`` iff ``i < j``."""
    return graph(2 * n, [(2 * i, 2 * j + 1) for i in range(n) for j in range(n) if i < j])


__all__ = [
    "FreeTermAlgebra", "enumerate_terms", "term_str", "Blueprint", "GemFragment", "gem_realize",
    "check_qf_indiscernible_fragment", "check_represents", "RepresentsResult",
    "independence_witness", "order_witness", "half_graph",
]
