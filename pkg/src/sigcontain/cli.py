"""Command-line front end: ``sigcontain <subcommand> ...``.

Exit codes: 0 success, 1 usage, 2 data/format error, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

import numpy as np

from . import __version__
from .condense import analyze, classic_condensation, condensation_to_dict, condensation_to_dot
from .errors import (BudgetExceedsRoots, GeneratorSpecError, GraphError, InvariantError,
                     NoLeaders, NotConverged, NumericalError)
from .generator import GeneratorSpec, generate, reference_spec
from .graph import SignedGraph, build_adjacency, emit_edge_list, parse_graph
from .placement import export_ilp, follower_reduction, guaranteed_set, solve_placement
from .simulate import (DEFAULT_CONTAIN_TOL, DEFAULT_CONV_TOL, DEFAULT_MAX_ITERS,
                       empirical_contained, initial_state, realize_control, run)
from .steady import TOLERANCES, contained_set, steady_state

EXIT_OK, EXIT_USAGE, EXIT_DATA, EXIT_NUMERIC = 0, 1, 2, 3


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _dumps(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def _emit(text: str, path: str | None):
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)


def _read(path: str) -> str:
    with open(path, encoding="utf-8") as fh:
        return fh.read()


def _load_graph(path: str) -> SignedGraph:
    return parse_graph(_read(path))


def _floats(text: str) -> list[float]:
    text = text.strip()
    if text.startswith("["):
        return [float(v) for v in json.loads(text)]
    return [float(v) for v in text.replace(",", " ").split()]


def _x0(g: SignedGraph, args) -> tuple[np.ndarray, dict]:
    """Initial state from a file, or drawn from ``--x0 SEED`` / ``--seed``."""
    leader_states = _floats(args.leader_states) if args.leader_states else None
    src = args.x0
    if src is not None and os.path.exists(src):
        x0 = np.array(_floats(_read(src)))
        if x0.shape != (g.n,):
            raise GraphError(f"x0 file has {x0.size} values, graph has {g.n} nodes")
        if leader_states is not None:
            x0[list(g.leaders)] = leader_states
        return x0, {"x0_file": src}
    if src is None:
        seed = args.seed
    else:
        try:
            seed = int(src)
        except ValueError:
            raise FileNotFoundError(f"--x0: no such file and not an integer seed: {src!r}") from None
    lo, hi = args.range
    return initial_state(g, seed, lo, hi, leader_states), {"x0_seed": seed, "x0_range": [lo, hi]}


def _add_x0(p):
    p.add_argument("--x0", help="file with n initial values, or an integer seed; "
                                "falls back to --seed")
    p.add_argument("--range", nargs=2, type=float, default=(-10.0, 10.0), metavar=("LO", "HI"),
                   help="uniform range for random initial states")
    p.add_argument("--leader-states", metavar="V,V,...",
                   help="fixed leader states, e.g. --leader-states=-1,0.5,1")


def _add_sim(p):
    p.add_argument("--max-iters", type=int, default=DEFAULT_MAX_ITERS,
                   help="iteration cap")
    p.add_argument("--conv-tol", type=float, default=DEFAULT_CONV_TOL,
                   help="stop when max|x(k+1)-x(k)| <= tol")
    p.add_argument("--contain-tol", type=float, default=DEFAULT_CONTAIN_TOL,
                   help="slack on the containment bound")


def cmd_analyze(args) -> int:
    an = analyze(_load_graph(args.graph))
    g = an.graph
    doc = {
        "n": g.n,
        "leaders": list(g.leaders),
        "classic": condensation_to_dict(an.classic, an.classes),
        "signed": condensation_to_dict(an.signed),
        "enlarged": condensation_to_dict(an.enlarged),
        "sccs": [
            {"id": k, "type": c.type, "parts": [list(p) for p in c.parts],
             "signed": list(a.signed), "enlarged": list(a.enlarged), "level": a.level}
            for k, (c, a) in enumerate(zip(an.classes, an.associations))
        ],
    }
    _emit(_dumps(doc), args.json)
    if args.dot:
        _emit(condensation_to_dot(an.classic, an.classes), args.dot)
    return EXIT_OK


def cmd_steady(args) -> int:
    g = _load_graph(args.graph)
    x0, meta = _x0(g, args)
    sol = steady_state(g, x0, residual_tol=args.residual_tol)
    K = contained_set(sol, tol=args.contain_tol)
    if args.csv:
        _emit(sol.to_csv(K), args.csv)
    doc = sol.to_dict(K)
    doc.update(meta)
    _emit(_dumps(doc), args.json)
    return EXIT_OK


def cmd_place(args) -> int:
    g = _load_graph(args.graph)
    inst = follower_reduction(g, args.d)
    sol = solve_placement(inst)
    if args.export_lp:
        _emit(export_ilp(inst), args.export_lp)
    _emit(sol.to_json() + "\n", args.json)
    return EXIT_OK


def cmd_simulate(args) -> int:
    g = _load_graph(args.graph)
    x0, meta = _x0(g, args)
    trace = run(build_adjacency(g), x0, g.leaders, args.max_iters, args.conv_tol, args.stride)
    if args.trace:
        _emit(trace.to_csv(), args.trace)
    phi = sorted(guaranteed_set(g))
    doc = {
        "iterations": trace.iterations,
        "converged": trace.converged,
        "bound": trace.bound,
        "bound_lines": [-trace.bound, trace.bound] if trace.bound is not None else None,
        "phi": phi,
        "final": [float(v) for v in trace.final],
        **meta,
    }
    if trace.converged:
        K = empirical_contained(trace, g.leaders, args.contain_tol)
        doc.update(contained=sorted(K), n_contained=len(K),
                   other=sorted(set(g.followers) - K), phi_subset_of_K=set(phi) <= K)
    _emit(_dumps(doc), args.json)
    return EXIT_OK if trace.converged else EXIT_NUMERIC


def _spec_from(arg: str) -> GeneratorSpec:
    if arg == "reference":
        return reference_spec()
    return GeneratorSpec.from_json(_read(arg))


def cmd_generate(args) -> int:
    spec = _spec_from(args.spec)
    g = generate(spec, seed=args.seed)
    _emit(emit_edge_list(g), args.output)
    return EXIT_OK


def cmd_pipeline(args) -> int:
    if args.input == "reference":
        g = generate(reference_spec(), seed=args.seed)
        source = "reference"
    else:
        text = _read(args.input)
        doc = json.loads(text) if text.lstrip().startswith("{") else None
        if doc is not None and "levels" in doc:
            g = generate(GeneratorSpec.from_dict(doc), seed=args.seed)
            source = "spec"
        else:
            g = parse_graph(text)
            source = "graph"
    seeds = np.random.SeedSequence(args.seed).spawn(args.trials + 1)
    an = analyze(g)
    inst = follower_reduction(g, args.d)
    sol = solve_placement(inst)
    realized = realize_control(g, sol.control_targets(), seeds[0])
    phi = guaranteed_set(realized)
    A = build_adjacency(realized)
    leader_states = _floats(args.leader_states) if args.leader_states else None
    trials, ok = [], True
    for t in range(args.trials):
        x0 = initial_state(realized, seeds[t + 1], *args.range, leader_states)
        trace = run(A, x0, realized.leaders, args.max_iters, args.conv_tol)
        if not trace.converged:
            raise NotConverged(f"trial {t} did not converge in {trace.iterations} iterations")
        K = empirical_contained(trace, realized.leaders, args.contain_tol)
        xbar = steady_state(realized, x0).xbar
        check = phi <= K and len(K) >= len(phi)
        ok &= check
        trials.append({
            "trial": t,
            "iterations": trace.iterations,
            "n_contained": len(K),
            "phi_subset_of_K": phi <= K,
            "max_abs_sim_vs_steady": float(np.abs(trace.final - xbar).max()),
        })
    added = sorted(set(realized.edges) - set(g.edges))
    doc = {
        "source": source,
        "seed": args.seed,
        "n": g.n,
        "leaders": list(g.leaders),
        "follower_level_counts": follower_levels(g),
        "classic_level_counts": an.classic.level_counts(),
        "placement": sol.to_dict(),
        "control_edges": [list(e) for e in added],
        "phi_size": len(phi),
        "trials": trials,
        "ok": ok,
    }
    _emit(_dumps(doc), args.json)
    return EXIT_OK if ok else EXIT_NUMERIC


def follower_levels(g: SignedGraph) -> list[int]:
    return classic_condensation(g, g.followers).level_counts()


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="sigcontain", description=__doc__.splitlines()[0],
                formatter_class=argparse.ArgumentDefaultsHelpFormatter)
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)
    fmt = argparse.ArgumentDefaultsHelpFormatter

    a = sub.add_parser("analyze", help="condensations, levels and SCC types", formatter_class=fmt)
    a.add_argument("graph")
    a.add_argument("--json", help="write JSON here instead of stdout")
    a.add_argument("--dot", help="write the classic condensation as dot text")
    a.set_defaults(func=cmd_analyze)

    s = sub.add_parser("steady", help="exact asymptotic states and contained set",
                       formatter_class=fmt)
    s.add_argument("graph")
    _add_x0(s)
    s.add_argument("--seed", type=int, default=0, help="seed when --x0 is not given")
    s.add_argument("--csv", help="per-node CSV (node, scc, type, xbar, contained)")
    s.add_argument("--json", help="write JSON here instead of stdout")
    s.add_argument("--residual-tol", type=float, default=TOLERANCES["fixed_point_residual"],
                   help="maximum allowed fixed-point residual")
    s.add_argument("--contain-tol", type=float, default=TOLERANCES["containment"],
                   help="slack on the containment bound")
    s.set_defaults(func=cmd_steady)

    pl = sub.add_parser("place", help="optimal root selection for d control edges",
                        formatter_class=fmt)
    pl.add_argument("graph")
    pl.add_argument("-d", type=int, required=True, help="number of control edges")
    pl.add_argument("--export-lp", help="also write the program in LP format")
    pl.add_argument("--json", help="write JSON here instead of stdout")
    pl.set_defaults(func=cmd_place)

    sm = sub.add_parser("simulate", help="iterate the dynamics and measure containment",
                        formatter_class=fmt)
    sm.add_argument("graph")
    _add_x0(sm)
    sm.add_argument("--seed", type=int, default=0, help="seed when --x0 is not given")
    sm.add_argument("--trace", help="CSV trace (k, x_0..x_n-1)")
    sm.add_argument("--stride", type=int, default=None,
                    help="trace sampling stride; None means 1 if n <= 100 else 10")
    sm.add_argument("--json", help="write summary JSON here instead of stdout")
    _add_sim(sm)
    sm.set_defaults(func=cmd_simulate)

    gn = sub.add_parser("generate", help="random layered signed graph", formatter_class=fmt)
    gn.add_argument("--spec", required=True, help="generator spec JSON, or 'reference'")
    gn.add_argument("--seed", type=int, default=None, help="overrides the spec's seed")
    gn.add_argument("-o", "--output", help="edge-list output path; stdout when omitted")
    gn.set_defaults(func=cmd_generate)

    pp = sub.add_parser("pipeline", help="place, realize control, simulate trials",
                        formatter_class=fmt)
    pp.add_argument("input", help="graph file, generator spec JSON, or 'reference'")
    pp.add_argument("-d", type=int, required=True, help="number of control edges")
    pp.add_argument("--trials", type=int, default=2, help="number of random initial states")
    pp.add_argument("--seed", type=int, default=0, help="master seed")
    pp.add_argument("--range", nargs=2, type=float, default=(-10.0, 10.0), metavar=("LO", "HI"),
                    help="uniform range for follower initial states")
    pp.add_argument("--leader-states", metavar="V,V,...",
                    help="fixed leader states, e.g. --leader-states=-1,0.5,1")
    pp.add_argument("--json", help="write report JSON here instead of stdout")
    _add_sim(pp)
    pp.set_defaults(func=cmd_pipeline)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (NumericalError, NotConverged, InvariantError) as exc:
        print(f"sigcontain: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (GraphError, GeneratorSpecError, BudgetExceedsRoots, NoLeaders, OSError,
            json.JSONDecodeError, ValueError) as exc:
        print(f"sigcontain: {exc}", file=sys.stderr)
        return EXIT_DATA


run_cli = main


if __name__ == "__main__":
    sys.exit(main())
