"""Command-line interface.

Exit codes: 0 when the property holds or all checks pass, 1 when it fails
(a witness is printed), 2 for usage or input errors, 3 when a search budget
or state cap is exhausted.
"""

from __future__ import annotations

import argparse
import json
import logging
import random
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

from . import io
from .entangle import GAMMA_ORG, Coloring, TupleFamily, graph_entangled, org_entangled, pr0_check, unembeddable_oracle
from .errors import AtlasCapExceeded, FamilyViolatesUniformity, SearchBudgetExceeded, TwinforgeError
from .logic import chain_clock, is_far, solve_iso_game, solve_tree_clock_game
from .org import build_block, check_K0, check_K1, check_K2, generic_map
from .pipeline import assemble, verify_twin_hypotheses, verify_solution_isomorphism
from .report import ClauseReport
from .structures import Budget, env_budget, search_isomorphism
from .twinship import derive_from_forcing, is_strong, solves, validate_param, wellfound_transform
from .words import orbit, word_from_labels

log = logging.getLogger("twinforge")

OK, FAILED, USAGE, BUDGET = 0, 1, 2, 3


class UsageError(Exception):
    pass


# ------------------------------------------------------------------ output

class Output:
    def __init__(self, args):
        self.fmt = args.format
        self.figure = getattr(args, "figure", None)
        self.payload: dict = {}

    def report(self, rep: ClauseReport) -> None:
        self.payload.setdefault("reports", []).append(rep.as_dict())
        if self.fmt == "text":
            print(rep.render())

    def result(self, holds: bool, **info) -> None:
        self.payload.update({"holds": holds, **info})
        if self.fmt == "text":
            print(f"result: {'holds' if holds else 'fails'}")
            for k, v in info.items():
                print(f"  {k}: {json.dumps(v, default=str) if not isinstance(v, str) else v}")

    def data(self, key: str, value) -> None:
        self.payload[key] = value
        if self.fmt == "text":
            print(f"{key}:")
            print(io.canonical(value).rstrip() if not isinstance(value, str) else value)

    def finish(self) -> None:
        if self.fmt == "json":
            print(io.canonical(self.payload).rstrip())


def _labels(T, raw) -> list[int]:
    if raw is None:
        return []
    try:
        items = json.loads(raw)
    except json.JSONDecodeError:
        items = [x for x in raw.split(",") if x != ""]
    if not isinstance(items, list):
        items = [items]
    return [T.index(io._tup(x)) for x in items]


def _G(p, args) -> list[int]:
    if getattr(args, "down", None) is not None:
        m = p.T.index(io._tup(json.loads(args.down)) if args.down.startswith(("[", '"')) else args.down)
        return sorted(p.T.down(m))
    return _labels(p.T, args.G)


# --------------------------------------------------------------- commands

def cmd_validate_param(args, out):
    p = io.load_param(io.read_json(args.param))
    rep = validate_param(p, verbatim=args.verbatim, demand_levels=args.demand_levels)
    out.report(rep)
    if out.figure:
        from .figures import plot_report
        plot_report(rep, out.figure)
    return OK if rep.ok else FAILED


def cmd_derive_forcing(args, out):
    m = io.load_forcing(io.read_json(args.forcing))
    d = derive_from_forcing(m, antichain_cap=args.antichain_cap)
    data = io.dump_param(d.param)
    if args.out:
        io.write_json(args.out, data)
    out.data("param", data)
    out.result(True, truncated=d.truncated, pairs=d.pairs, members=len(d.param.B))
    return OK


def cmd_solve_check(args, out):
    p = io.load_param(io.read_json(args.param))
    G = _G(p, args)
    ok = solves(p, G)
    missed = [i for i, m in enumerate(p.masks) if not any(m >> g & 1 for g in G)]
    out.result(ok, G=[p.T.label(g) for g in G], missed_members=missed)
    return OK if ok else FAILED


def cmd_strong_check(args, out):
    p = io.load_param(io.read_json(args.param))
    r = is_strong(p)
    info = {} if r.strong else {"solution": sorted(p.T.label(x) for x in r.witness), "top": p.T.label(r.top)}
    out.result(r.strong, **info)
    return OK if r.strong else FAILED


def cmd_wellfound(args, out):
    p = io.load_param(io.read_json(args.param))
    r = p.T.index(io._tup(json.loads(args.r)) if args.r.startswith(("[", '"')) else args.r)
    q = wellfound_transform(p, r)
    data = io.dump_param(q)
    if args.out:
        io.write_json(args.out, data)
    out.data("param", data)
    out.result(True, elements=q.T.n, members=len(q.B))
    if out.figure:
        from .figures import plot_poset
        plot_poset(q.T, out.figure)
    return OK


def _org_and_param(args):
    p = io.load_param(io.read_json(args.param))
    J = io.load_org(io.read_json(args.org), p.T)
    return J, p


def cmd_check_k(args, out):
    J, p = _org_and_param(args)
    level = args.command[-1]
    if level == "0":
        rep = check_K0(J, p)
    elif level == "1":
        rep = check_K0(J, p)
        r = check_K1(J, p, atlas_cap=args.cap)
        rep.add("K1 no fixed points", r.holds, f"atlas states explored: {len(r.atlas)}",
                None if r.holds else {"word": [[p.T.label(e), s] for e, s in r.witness[0]],
                                      "element": r.witness[1]})
    else:
        rep = check_K0(J, p)
        r = check_K1(J, p, atlas_cap=args.cap)
        rep.add("K1 no fixed points", r.holds, "", None if r.holds else list(map(str, r.witness)))
        rep.merge(check_K2(J, p, atlas_cap=args.cap), prefix="K2 ")
    out.report(rep)
    if out.figure:
        from .figures import plot_org
        plot_org(J, out.figure)
    return OK if rep.ok else FAILED


def cmd_build_block(args, out):
    p = io.load_param(io.read_json(args.param))
    J = build_block(p, args.D, args.L, args.order)
    data = io.dump_org(J, p.T)
    if args.out:
        io.write_json(args.out, data)
    out.data("block", data)
    out.result(True, elements=J.n, frontier=len(J.frontier))
    if out.figure:
        from .figures import plot_org
        plot_org(J, out.figure)
    return OK


def cmd_generic_map(args, out):
    J, p = _org_and_param(args)
    gm = generic_map(J, p, _G(p, args), strict=False)
    out.report(gm.report)
    out.data("map", sorted([a, b] for a, b in gm.F.items()))
    return OK if gm.report.ok and gm.solves else FAILED


def cmd_orbit(args, out):
    J, p = _org_and_param(args)
    w = word_from_labels(p.T, json.loads(args.word))
    orb = orbit(J.maps, w, args.start)
    out.result(orb is not None, orbit=None if orb is None else list(orb))
    return OK if orb is not None else FAILED


def cmd_entangled(args, out):
    tuples = json.loads(args.tuples)
    fam = TupleFamily(tuple(tuple(t) if isinstance(t, list) else (t,) for t in tuples))
    if args.param:
        p = io.load_param(io.read_json(args.param))
        I = io.load_org(io.read_json(args.structure), p.T)
        try:
            r = org_entangled(I, fam, p, word_len=args.word_len)
        except FamilyViolatesUniformity as e:
            out.result(False, violated=e.clause, detail=e.detail)
            return FAILED
    else:
        r = graph_entangled(io.load_structure(io.read_json(args.structure)), fam)
    out.result(r.holds, failing_pattern=None if r.failing is None else [list(c) for c in r.failing])
    return OK if r.holds else FAILED


def cmd_pr0(args, out):
    c = io.load_coloring(io.read_json(args.coloring))
    r = pr0_check(c, args.n, args.m, args.mu)
    info = {"note": r.note}
    if not r.holds:
        info.update(family=[list(t) for t in r.family], h=list(r.h))
    out.result(r.holds, **info)
    return OK if r.holds else FAILED


def cmd_unembed(args, out):
    I = io.load_structure(io.read_json(args.I))
    J = io.load_structure(io.read_json(args.J))
    sigma = []
    for s in args.sigma:
        name, _, ar = s.partition(":")
        sigma.append((name, int(ar or 1)))
    gamma = GAMMA_ORG if args.gamma is None else [tuple(g) for g in json.loads(args.gamma)]
    r = unembeddable_oracle(I, J, sigma, gamma, budget=Budget(args.budget))
    out.result(r.unembeddable, assignments=r.assignments,
               **({} if r.witness is None else {"assignment": {str(k): v for k, v in r.witness.items()}}))
    return OK if r.unembeddable else FAILED


def cmd_ef_game(args, out):
    M = io.load_filtration(io.read_json(args.M))
    N = io.load_filtration(io.read_json(args.N))
    bud = Budget(args.budget)
    if args.clock_chain is not None:
        r = solve_tree_clock_game(M, N, chain_clock(args.clock_chain), budget=bud)
    else:
        r = solve_iso_game(M, N, args.moves, budget=bud)
    out.result(r.winner == "ISO", winner=r.winner, explored=r.explored, anti_line=r.anti_line)
    if out.figure and args.clock_chain is None:
        from .figures import plot_game_values
        vals = {k: solve_iso_game(M, N, k, budget=Budget(args.budget)).winner == "ISO"
                for k in range(args.moves + 1)}
        plot_game_values(vals, out.figure)
    return OK if r.winner == "ISO" else FAILED


def cmd_far(args, out):
    M1 = io.load_structure(io.read_json(args.M1))
    M2 = io.load_structure(io.read_json(args.M2))
    wit = json.loads(args.witness)
    r = is_far(M1, M2, args.phi, wit, args.u_min, budget=Budget(args.budget))
    out.result(r.far, degenerate=r.degenerate,
               **({} if r.counterexample is None else {"preserving": {str(k): list(v) for k, v in r.counterexample.items()}}))
    return OK if r.far else FAILED


def _assembly_from_args(args):
    inputs = io.load_assembly_inputs(io.read_json(args.inputs))
    if getattr(args, "random_coloring", False):
        rng = random.Random(args.seed)
        lam = inputs["lam"]
        inputs["c"] = Coloring.from_bits(lam, rng.getrandbits(max(1, lam * (lam - 1) // 2)))
    return assemble(**inputs)


def cmd_assemble(args, out):
    a = _assembly_from_args(args)
    data = io.dump_assembly(a)
    if args.out:
        io.write_json(args.out, data)
    out.result(True, elements=a.J.n, edges=len(a.J.edges), X=len(a.X), X1=len(a.X1), X2=len(a.X2))
    if out.figure:
        from .figures import plot_assembly
        plot_assembly(a, out.figure)
    return OK


def cmd_verify_twin(args, out):
    a = _assembly_from_args(args)
    p = a.p
    rep = verify_twin_hypotheses(a)
    out.report(rep)
    if args.G is not None or args.down is not None:
        Gs = [_G(p, args)]
    else:
        Gs = [sorted(p.T.down(m)) for m in range(p.T.n) if solves(p, p.T.down(m))]
    with ThreadPoolExecutor(max_workers=max(1, args.jobs)) as ex:
        reps = list(ex.map(lambda G: verify_solution_isomorphism(a, G), Gs))
    ok = rep.ok
    for G, r in zip(Gs, reps):
        r.title += f" for G = {[p.T.label(g) for g in G]}"
        out.report(r)
        ok = ok and r.ok
    if out.figure:
        from .figures import plot_assembly, plot_report
        plot_assembly(a, out.figure)
        plot_report(rep, Path(out.figure).with_name(Path(out.figure).stem + "_report.png"))
    return OK if ok else FAILED


def cmd_iso_search(args, out):
    M1 = io.load_structure(io.read_json(args.M1))
    M2 = io.load_structure(io.read_json(args.M2))
    f = search_isomorphism(M1, M2, Budget(args.budget))
    if f is None:
        out.result(False, isomorphism="NotFound")
        return FAILED
    out.result(True, isomorphism={str(k): v for k, v in sorted(f.items())})
    return OK


# ------------------------------------------------------------------ parser

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("text", "json"), default="text")
    common.add_argument("--seed", type=int, default=0, help="seed for randomized choices")
    common.add_argument("--jobs", type=int, default=1, help="worker threads where supported")
    common.add_argument("--figure", help="write a matplotlib figure to this path")
    common.add_argument("--budget", type=int, default=None,
                        help="search node budget (default from TWINFORGE_BUDGET)")
    common.add_argument("-v", "--verbose", action="store_true")

    ap = argparse.ArgumentParser(prog="twinforge", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)

    def add(name, fn, help_):
        sp = sub.add_parser(name, parents=[common], help=help_)
        sp.set_defaults(fn=fn)
        return sp

    sp = add("validate-param", cmd_validate_param, "check the parameter clauses")
    sp.add_argument("param")
    sp.add_argument("--verbatim", action="store_true", help="no frontier exemptions")
    sp.add_argument("--demand-levels", action="store_true")

    sp = add("derive-forcing", cmd_derive_forcing, "derive a parameter from a forcing example")
    sp.add_argument("forcing")
    sp.add_argument("--antichain-cap", type=int, default=1000)
    sp.add_argument("--out")

    for name, fn, help_ in (("solve-check", cmd_solve_check, "does a directed set solve the parameter"),
                            ("generic-map", cmd_generic_map, "map induced by a directed set")):
        sp = add(name, fn, help_)
        if name == "generic-map":
            sp.add_argument("org")
            sp.add_argument("--param", required=True)
        else:
            sp.add_argument("param")
        sp.add_argument("--G", help="JSON list or comma-separated labels")
        sp.add_argument("--down", help="use the down-set of this label")

    sp = add("strong-check", cmd_strong_check, "is no directed set a solution")
    sp.add_argument("param")

    sp = add("wellfound-transform", cmd_wellfound, "tree of increasing sequences above a node")
    sp.add_argument("param")
    sp.add_argument("--r", required=True, help="label of the base node")
    sp.add_argument("--out")

    for k in ("0", "1", "2"):
        sp = add(f"check-k{k}", cmd_check_k, f"membership at strictness level {k}")
        sp.add_argument("org")
        sp.add_argument("--param", required=True)
        sp.add_argument("--cap", type=int, default=200_000)

    sp = add("build-block", cmd_build_block, "canonical single-orbit block for a member of B")
    sp.add_argument("param")
    sp.add_argument("--D", type=int, default=0, help="index of the member of B")
    sp.add_argument("--L", type=int, default=2, help="word length bound")
    sp.add_argument("--order", choices=("magnus", "shortlex"), default="magnus")
    sp.add_argument("--out")

    sp = add("orbit", cmd_orbit, "evaluate a word along its orbit")
    sp.add_argument("org")
    sp.add_argument("--param", required=True)
    sp.add_argument("--word", required=True, help='JSON list of [label, sign]')
    sp.add_argument("--start", type=int, required=True)

    sp = add("entangled", cmd_entangled, "entanglement of a tuple family")
    sp.add_argument("structure")
    sp.add_argument("--tuples", required=True, help="JSON list of tuples (or elements)")
    sp.add_argument("--param", help="treat the structure as an org structure over this parameter")
    sp.add_argument("--word-len", type=int, default=3)

    sp = add("pr0", cmd_pr0, "pair-coloring property on separated families")
    sp.add_argument("coloring")
    sp.add_argument("--n", type=int, default=1)
    sp.add_argument("--m", type=int, default=3)
    sp.add_argument("--mu", type=int, default=2)

    sp = add("unembed", cmd_unembed, "exhaustive strict unembeddability")
    sp.add_argument("I")
    sp.add_argument("J")
    sp.add_argument("--sigma", nargs="+", default=["id:1"], help="term shapes name:arity")
    sp.add_argument("--gamma", help="JSON list of [p1, p2] formula pairs")

    sp = add("ef-game", cmd_ef_game, "solve the filtration game")
    sp.add_argument("M")
    sp.add_argument("N")
    sp.add_argument("--moves", type=int, default=1)
    sp.add_argument("--clock-chain", type=int, default=None, help="use a chain clock of this length")

    sp = add("far", cmd_far, "farness of a witness sequence")
    sp.add_argument("M1")
    sp.add_argument("M2")
    sp.add_argument("--phi", required=True)
    sp.add_argument("--witness", required=True, help="JSON list of elements or tuples")
    sp.add_argument("--u-min", type=int, default=None)

    for name, fn, help_ in (("assemble", cmd_assemble, "build the twin assembly"),
                            ("verify-twin", cmd_verify_twin, "check hypotheses and solution maps")):
        sp = add(name, fn, help_)
        sp.add_argument("inputs", help="assembly inputs JSON")
        sp.add_argument("--random-coloring", action="store_true", help="draw the coloring from --seed")
        if name == "assemble":
            sp.add_argument("--out")
        else:
            sp.add_argument("--G", help="check only this directed set (JSON list or comma-separated labels)")
            sp.add_argument("--down", help="check only the down-set of this label")

    sp = add("iso-search", cmd_iso_search, "exhaustive isomorphism search")
    sp.add_argument("M1")
    sp.add_argument("M2")
    return ap


def run(argv=None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as e:
        return USAGE if e.code not in (0, None) else OK
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    if args.budget is None:
        args.budget = env_budget()
    out = Output(args)
    try:
        code = args.fn(args, out)
    except (SearchBudgetExceeded, AtlasCapExceeded) as e:
        out.result(False, error=str(e))
        code = BUDGET
    except (io.FormatError, TwinforgeError, ValueError, KeyError, OSError) as e:
        print(f"twinforge: error: {e}", file=sys.stderr)
        return USAGE
    out.finish()
    return code


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
