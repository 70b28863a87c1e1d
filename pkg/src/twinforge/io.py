"""JSON file formats and their canonical serialization.

Every ``dump_*`` returns plain JSON data; :func:`canonical` renders it with
sorted keys so that parsing and re-emitting a file is byte-stable.
"""

from __future__ import annotations

import json
from pathlib import Path
from typing import Any

from .entangle import Coloring
from .gem import Blueprint
from .logic import Filtration, count_filtration
from .org import OrgStructure
from .poset import FinPoset, SeqTree
from .structures import Structure, graph, linear_order, ordered_graph
from .twinship import ForcingExample, TwinshipParam
from .words import MapFamily, PartialMap


class FormatError(ValueError):
    pass


def canonical(obj: Any) -> str:
    return json.dumps(obj, sort_keys=True, indent=2, ensure_ascii=False) + "\n"


def read_json(path) -> Any:
    try:
        return json.loads(Path(path).read_text())
    except json.JSONDecodeError as e:
        raise FormatError(f"{path}: invalid JSON ({e})") from e


def write_json(path, obj) -> None:
    Path(path).write_text(canonical(obj))


def _tup(x):
    """Lists become tuples, recursively, so labels stay hashable."""
    if isinstance(x, list):
        return tuple(_tup(y) for y in x)
    return x


def _jsonable(x):
    if isinstance(x, tuple):
        return [_jsonable(y) for y in x]
    return x


def _need(obj: dict, key: str):
    if not isinstance(obj, dict) or key not in obj:
        raise FormatError(f"missing field {key!r}")
    return obj[key]


# ------------------------------------------------------------------ posets

def load_poset(obj) -> FinPoset:
    if "tree" in obj:
        t = obj["tree"]
        return SeqTree(int(_need(t, "lam")), int(_need(t, "depth")))
    if "chain" in obj:
        return FinPoset.chain(int(obj["chain"]))
    if "antichain" in obj:
        return FinPoset.antichain(int(obj["antichain"]))
    labels = [_tup(x) for x in _need(obj, "elements")]
    index = {lab: i for i, lab in enumerate(labels)}
    try:
        pairs = [(index[_tup(a)], index[_tup(b)]) for a, b in obj.get("le", obj.get("less", []))]
    except KeyError as e:
        raise FormatError(f"unknown element {e.args[0]!r} in order pairs") from e
    return FinPoset.from_pairs(len(labels), pairs, labels, max_size=max(64, len(labels)))


def dump_poset(T: FinPoset) -> dict:
    if isinstance(T, SeqTree) and len(T.seqs) == sum(T.lam ** d for d in range(T.depth)):
        return {"tree": {"lam": T.lam, "depth": T.depth}}
    return {"elements": [_jsonable(x) for x in T.labels],
            "le": [[_jsonable(T.label(a)), _jsonable(T.label(b))] for a, b in sorted(T.pairs())]}


def _ids(T: FinPoset, labels) -> list[int]:
    try:
        return [T.index(_tup(x)) for x in labels]
    except Exception as e:
        raise FormatError(str(e)) from e


# --------------------------------------------------------------- parameters

def load_param(obj) -> TwinshipParam:
    T = load_poset(obj["poset"] if "poset" in obj else _need(obj, "T"))
    B = tuple(frozenset(_ids(T, D)) for D in _need(obj, "B"))
    fr = obj.get("frontier", [])
    frontier = T.maximal() if fr == "maximal" else frozenset(_ids(T, fr))
    return TwinshipParam(T, B, obj.get("theta", "omega"), frontier)


def dump_param(p: TwinshipParam) -> dict:
    lab = lambda ids: sorted((_jsonable(p.T.label(x)) for x in ids), key=json.dumps)
    return {"T": dump_poset(p.T), "B": [lab(D) for D in p.B], "theta": p.theta,
            "frontier": lab(p.frontier)}


def load_forcing(obj) -> ForcingExample:
    t = _need(obj, "tree")
    tree = SeqTree(int(_need(t, "lam")), int(_need(t, "depth")))
    P = load_poset(_need(obj, "P"))
    name = tuple(_ids(tree, _need(obj, "name")))
    return ForcingExample(int(obj.get("lam", tree.lam)), obj.get("theta", "omega"), tree, P, name)


def dump_forcing(m: ForcingExample) -> dict:
    return {"lam": m.lam, "theta": m.theta, "tree": {"lam": m.tree.lam, "depth": m.tree.depth},
            "P": dump_poset(m.P), "name": [m.tree.label(v) for v in m.name]}


# ------------------------------------------------------------ org structures

def load_org(obj, T: FinPoset | None = None) -> OrgStructure:
    n = int(_need(obj, "n"))
    maps = {}
    raw = obj.get("maps", [])
    for node, pairs in (raw.items() if isinstance(raw, dict) else raw):
        key = T.index(_tup(node)) if T is not None else int(node)
        maps[key] = PartialMap((int(a), int(b)) for a, b in pairs)
    labels = obj.get("labels")
    return OrgStructure(n, tuple(obj.get("order", range(n))), frozenset(tuple(e) for e in obj.get("edges", [])),
                        MapFamily(maps), frozenset(obj.get("frontier", [])),
                        None if labels is None else tuple(_tup(x) for x in labels))


def dump_org(J: OrgStructure, T: FinPoset | None = None) -> dict:
    maps = []
    for node, m in sorted(J.maps.items(), key=lambda kv: kv[0]):
        if len(m):
            key = _jsonable(T.label(node)) if T is not None else node
            maps.append([key, sorted([a, b] for a, b in m.items())])
    out = {"n": J.n, "order": list(J.order), "edges": sorted([a, b] for a, b in J.edges),
           "maps": maps, "frontier": sorted(J.frontier)}
    if J.labels is not None:
        out["labels"] = [_jsonable(x) for x in J.labels]
    return out


# ---------------------------------------------------------------- structures

def load_structure(obj) -> Structure:
    if "graph" in obj:
        g = obj["graph"]
        return graph(int(_need(g, "n")), [tuple(e) for e in g.get("edges", [])])
    if "ordered_graph" in obj:
        g = obj["ordered_graph"]
        return ordered_graph(int(_need(g, "n")), [tuple(e) for e in g.get("edges", [])], g.get("order"))
    if "linear_order" in obj:
        return linear_order(int(obj["linear_order"]))
    n = int(_need(obj, "n"))
    rels = {k: [tuple(t) for t in v] for k, v in _need(obj, "relations").items()}
    return Structure.make(n, rels, obj.get("arities"))


def dump_structure(M: Structure) -> dict:
    return {"n": M.n, "relations": {k: sorted(list(t) for t in v) for k, v in M.relations.items()},
            "arities": dict(M.arities)}


def load_filtration(obj) -> Filtration:
    M = load_structure(_need(obj, "structure"))
    stages = obj.get("stages", "count")
    if stages == "count":
        return count_filtration(M)
    return Filtration(M, tuple(frozenset(s) for s in stages))


def dump_filtration(F: Filtration) -> dict:
    return {"structure": dump_structure(F.M), "stages": [sorted(s) for s in F.stages]}


# ------------------------------------------------------------------ colorings

def load_coloring(obj) -> Coloring:
    lam = int(_need(obj, "lambda"))
    pairs = {}
    for k, v in _need(obj, "pairs").items():
        a, b = (int(x) for x in k.split(","))
        pairs[(a, b)] = int(v)
    return Coloring(lam, pairs)


def dump_coloring(c: Coloring) -> dict:
    return {"lambda": c.lam, "pairs": {f"{a},{b}": v for (a, b), v in c.items()}}


# ----------------------------------------------------------------- blueprints

def load_blueprint(obj) -> Blueprint:
    kind = obj.get("kind", "table")
    if kind == "identity":
        return Blueprint.identity()
    if kind == "complete":
        return Blueprint.constant_edges()
    if kind == "negate-edges":
        return Blueprint.negate_edges()
    if kind == "table":
        return Blueprint.from_pairs(_need(obj, "pairs"), obj.get("vocabulary", ("<", "R")))
    raise FormatError(f"unknown blueprint kind {kind!r}")


def dump_blueprint(bp: Blueprint, samples=()) -> dict:
    if bp.name in ("identity", "complete", "negate-edges"):
        return {"kind": bp.name}
    if not callable(bp.rule):
        pairs = sorted(bp.rule.items(), key=repr)
    else:
        pairs = bp.table_for(samples)
    return {"kind": "table", "vocabulary": list(bp.vocabulary),
            "pairs": [[_jsonable(a), _jsonable(b)] for a, b in pairs]}


# ------------------------------------------------------------------ assembly

def load_assembly_inputs(obj) -> dict:
    p = load_param(_need(obj, "param"))
    lam = int(_need(obj, "lambda"))
    col = obj.get("coloring")
    return {
        "p": p, "lam": lam, "D_seq": [int(x) for x in _need(obj, "D_seq")],
        "c": None if col is None else load_coloring(col), "L": int(obj.get("L", 2)),
        "blueprint": load_blueprint(obj["blueprint"]) if "blueprint" in obj else None,
        "Y": obj.get("Y"),
    }


def dump_assembly(a) -> dict:
    return {
        "param": dump_param(a.p), "lambda": a.lam, "D_seq": list(a.D_seq),
        "coloring": dump_coloring(a.c), "L": a.L, "blueprint": dump_blueprint(a.blueprint),
        "Y": sorted(a.J.label(x)[0] for x in a.Y),
        "J": dump_org(a.J, a.p.T),
        "X": sorted(a.X), "X1": sorted(a.X1), "X2": sorted(a.X2), "Z": sorted(a.Z),
    }


def roundtrip(text: str, kind: str) -> str:
    """Parse ``text`` as ``kind`` and emit it canonically."""
    obj = json.loads(text)
    load, dump = FORMATS[kind]
    return canonical(dump(load(obj)))


FORMATS = {
    "poset": (load_poset, dump_poset),
    "param": (load_param, dump_param),
    "forcing": (load_forcing, dump_forcing),
    "org": (load_org, dump_org),
    "structure": (load_structure, dump_structure),
    "filtration": (load_filtration, dump_filtration),
    "coloring": (load_coloring, dump_coloring),
    "blueprint": (load_blueprint, dump_blueprint),
}
