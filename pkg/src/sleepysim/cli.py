"""Command-line front door: generation, runs, sweeps, and verification.

Configuration comes from an optional key-value file plus flags (flags win).
Exit codes: 0 success, 2 bad config or missing input, 3 verification
failure, 4 round-limit timeout.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from math import inf

from .acceptance import run_acceptance
from .apsp_sched import apsp_random_delay
from .congest_cssp import cssp
from .energy_bfs import full_bfs, thresholded_bfs
from .energy_cssp import cssp_energy
from .engine import SimConfig, SimError
from .graph import GraphError, GraphSpec, gen_graph, load_graph, save_graph
from .netdecomp import bits_for, build_cover_sync, build_decomposition
from .oracle import (
    check_cover, check_decomposition, check_layered, dijkstra, hop_distances,
)
from .structures import load_layered_cover, save_layered_cover

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_VERIFY = 3
EXIT_TIMEOUT = 4

ALGOS = ("bfs-energy", "cssp-congest", "cssp-energy", "apsp", "decomp", "cover")

CONFIG_KEYS = {
    "algo", "graph", "gen", "n", "m", "weights", "maxw", "seed", "sources",
    "threshold", "k", "d", "delta", "base", "mode", "round-limit", "out",
    "cover-cache", "save-cover",
}


class CliError(Exception):
    def __init__(self, message, code=EXIT_CONFIG):
        super().__init__(message)
        self.code = code


def log(*parts):
    if os.environ.get("SLEEPY_LOG"):
        print("[sleepysim]", *parts, file=sys.stderr)


def read_config_file(path) -> dict:
    out = {}
    try:
        text = open(path).read()
    except OSError as e:
        raise CliError(f"cannot read config {path}: {e}")
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        key, _, value = line.partition(" ")
        key = key.strip()
        if key not in CONFIG_KEYS:
            raise CliError(f"config line {lineno}: unknown key {key!r}")
        out[key] = value.strip()
    return out


_CONFIG_ATTR = {"gen": "family", "round-limit": "round_limit",
                "cover-cache": "cover_cache", "save-cover": "save_cover"}
_CONFIG_INT = {"n", "m", "maxw", "seed", "threshold", "k", "d", "delta",
               "base", "round-limit"}
_CONFIG_DEFAULTS = {
    "algo": None, "graph": None, "family": None, "n": None, "m": None,
    "weights": "unit", "maxw": 1, "seed": 0, "sources": "0",
    "threshold": None, "k": None, "d": None, "delta": None, "base": None,
    "mode": "scaled", "round_limit": None, "out": None, "cover_cache": None,
    "save_cover": None,
}


def apply_config(args, merged):
    """Config fills every option still at its default; explicit flags win."""
    for key, value in merged.items():
        attr = _CONFIG_ATTR.get(key, key)
        if getattr(args, attr, None) != _CONFIG_DEFAULTS.get(attr):
            continue
        setattr(args, attr, int(value) if key in _CONFIG_INT else value)


def build_parser():
    ap = argparse.ArgumentParser(prog="sleepysim")
    sub = ap.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("gen", help="generate a graph file")
    _graph_flags(gen)
    gen.add_argument("--out", default="-")

    run = sub.add_parser("run", help="run one algorithm")
    run.add_argument("--config", help="key-value config file; flags override")
    _graph_flags(run)
    run.add_argument("--algo", choices=ALGOS)
    run.add_argument("--sources", default="0", help="comma list of node ids")
    run.add_argument("--threshold", type=int, help="distance threshold")
    run.add_argument("--k", type=int, help="decomposition separation")
    run.add_argument("--d", type=int, help="cover scale")
    run.add_argument("--delta", type=int, help="apsp delay range")
    run.add_argument("--base", type=int, help="layered cover base override")
    run.add_argument("--mode", choices=("scaled", "worst"), default="scaled")
    run.add_argument("--round-limit", type=int)
    run.add_argument("--verify", action="store_true")
    run.add_argument("--out", help="output directory")
    run.add_argument("--json", action="store_true", help="print report JSON")
    run.add_argument("--csv", action="store_true", help="print distances CSV")
    run.add_argument("--cover-cache", help="layered cover file to reuse")
    run.add_argument("--save-cover", help="write the built layered cover here")

    sweep = sub.add_parser("sweep", help="run a template across an axis")
    sweep.add_argument("--config")
    _graph_flags(sweep)
    sweep.add_argument("--algo", choices=ALGOS)
    sweep.add_argument("--axis", choices=("n", "D", "density"), required=True)
    sweep.add_argument("--values", required=True, help="comma list of points")
    sweep.add_argument("--sources", default="0")
    sweep.add_argument("--mode", choices=("scaled", "worst"), default="scaled")
    sweep.add_argument("--out", help="CSV output path (default stdout)")

    ver = sub.add_parser("verify", help="run the acceptance suite")
    ver.add_argument("--fixtures", help="directory with graph.txt/cover.slpycov")
    ver.add_argument("--quick", action="store_true")
    return ap


def _graph_flags(p):
    p.add_argument("--graph", help="edge-list file")
    p.add_argument("--gen", dest="family", help="graph family to generate")
    p.add_argument("--n", type=int)
    p.add_argument("--m", type=int)
    p.add_argument("--weights", default="unit",
                   choices=("unit", "uniform", "zero-heavy"))
    p.add_argument("--maxw", type=int, default=1)
    p.add_argument("--seed", type=int, default=0)


def resolve_graph(args):
    if getattr(args, "graph", None):
        try:
            return load_graph(open(args.graph).read())
        except (OSError, GraphError) as e:
            raise CliError(f"graph file: {e}")
    if getattr(args, "family", None):
        if not args.n:
            raise CliError("--gen needs --n")
        try:
            return gen_graph(GraphSpec(args.family, args.n, seed=args.seed,
                                       m=args.m, weight_mode=args.weights,
                                       max_w=args.maxw))
        except GraphError as e:
            raise CliError(str(e))
    raise CliError("need --graph FILE or --gen FAMILY")


def parse_sources(text, n):
    try:
        out = {int(x) for x in text.split(",") if x.strip() != ""}
    except ValueError:
        raise CliError(f"bad sources {text!r}")
    if not out or any(not 0 <= v < n for v in out):
        raise CliError(f"sources out of range for n={n}")
    return out


def _emit(args, name, text):
    if args.out:
        os.makedirs(args.out, exist_ok=True)
        path = os.path.join(args.out, name)
        with open(path, "w") as f:
            f.write(text)
        log("wrote", path)
    else:
        print(text)


def _dist_doc(outputs):
    return json.dumps(
        {str(v): (None if outputs[v] is inf else outputs[v])
         for v in sorted(outputs)},
        sort_keys=True)


def cmd_run(args) -> int:
    if args.config:
        apply_config(args, read_config_file(args.config))
    if not args.algo:
        raise CliError("need --algo")
    g = resolve_graph(args)
    sources = parse_sources(args.sources, g.n)
    cfg = None
    if args.round_limit:
        cfg = SimConfig(round_limit=args.round_limit)
    log("running", args.algo, f"n={g.n} m={g.m}")

    verify_fail = ""
    if args.algo == "cssp-congest":
        outputs, report, _ = cssp(g, sources, config=cfg)
        if args.verify and outputs != dijkstra(g, sources):
            verify_fail = "distance mismatch vs oracle"
        dist_text = _dist_doc(outputs)
    elif args.algo == "cssp-energy":
        outputs, report, _ = cssp_energy(g, sources, config=cfg)
        if args.verify and outputs != dijkstra(g, sources):
            verify_fail = "distance mismatch vs oracle"
        dist_text = _dist_doc(outputs)
    elif args.algo == "bfs-energy":
        layered = None
        if args.cover_cache:
            try:
                layered = load_layered_cover(open(args.cover_cache).read())
            except (OSError, ValueError) as e:
                raise CliError(f"cover cache: {e}")
        if args.threshold is not None:
            outputs, report, _, layered, _, _ = thresholded_bfs(
                g, sources, args.threshold, base=args.base, layered=layered)
            ref = {v: (d if d <= args.threshold else inf)
                   for v, d in hop_distances(g, sources).items()}
        else:
            outputs, report, _, layered, _, _ = full_bfs(
                g, sources, base=args.base, layered=layered)
            ref = hop_distances(g, sources)
        if args.save_cover:
            with open(args.save_cover, "w") as f:
                f.write(save_layered_cover(layered))
        if args.verify and outputs != ref:
            verify_fail = "hop distance mismatch vs oracle"
        dist_text = _dist_doc(outputs)
    elif args.algo == "apsp":
        matrix, report, _, _ = apsp_random_delay(
            g, delta=args.delta, seed=args.seed, config=cfg)
        if args.verify:
            for s in range(g.n):
                ref = dijkstra(g, [s])
                if any(matrix[(s, v)] != ref[v] for v in range(g.n)):
                    verify_fail = f"matrix mismatch from source {s}"
                    break
        rows = []
        for s in range(g.n):
            rows.append(",".join(
                "" if matrix[(s, v)] is inf else str(matrix[(s, v)])
                for v in range(g.n)))
        dist_text = "\n".join(rows) + "\n"
    elif args.algo == "decomp":
        k = args.k or 2
        decomp, _, report, _ = build_decomposition(g, k)
        b = max(1, bits_for(g.n))
        if args.verify:
            bad = check_decomposition(g, decomp, k, 6 * k * b**3, 2 * b)
            if bad:
                verify_fail = f"decomposition violations: {bad[:2]}"
        dist_text = json.dumps({
            "colors": len(decomp.colors),
            "clusters": [
                {"id": cl.id, "color": c, "members": sorted(cl.members)}
                for c, cls in enumerate(decomp.colors) for cl in cls
            ],
        }, sort_keys=True)
    else:  # cover
        d = args.d or 1
        cover, decomp, report, _ = build_cover_sync(g, d)
        b = max(1, bits_for(g.n))
        if args.verify:
            bad = check_cover(g, cover, d, 6 * b**3, 2 * b, 6 * b**4)
            if bad:
                verify_fail = f"cover violations: {bad[:2]}"
        dist_text = json.dumps({
            "scale": d,
            "clusters": [
                {"id": cl.id, "members": sorted(cl.members)}
                for cl in cover.clusters
            ],
        }, sort_keys=True)

    name = "matrix.csv" if args.algo == "apsp" else "distances.json"
    _emit(args, name, dist_text)
    _emit(args, "report.json", report.to_json())
    if args.json and args.out:
        print(report.to_json())
    if report.status == "timeout":
        print("timeout: round limit exceeded", file=sys.stderr)
        return EXIT_TIMEOUT
    if verify_fail:
        print(f"verification failed: {verify_fail}", file=sys.stderr)
        return EXIT_VERIFY
    if args.verify:
        print("verification passed")
    return EXIT_OK


def cmd_sweep(args) -> int:
    try:
        points = [int(x) for x in args.values.split(",") if x.strip()]
    except ValueError:
        raise CliError(f"bad sweep values {args.values!r}")
    if not points:
        raise CliError("empty sweep axis")
    if not args.algo:
        raise CliError("need --algo")
    rows = ["point,rounds,max_energy,max_congestion"]
    for point in points:
        if args.axis == "n":
            spec = GraphSpec(args.family or "random-gnm", point, seed=args.seed,
                             m=(args.m or 3 * point), weight_mode=args.weights,
                             max_w=args.maxw)
        elif args.axis == "D":
            spec = GraphSpec("path", point + 1, seed=args.seed)
        else:  # density: m = point * n
            if not args.n:
                raise CliError("density sweep needs --n")
            spec = GraphSpec("random-gnm", args.n, seed=args.seed,
                             m=point * args.n, weight_mode=args.weights,
                             max_w=args.maxw)
        g = gen_graph(spec)
        sources = parse_sources(args.sources, g.n)
        if args.algo == "cssp-congest":
            _, report, _ = cssp(g, sources, trace=False)
        elif args.algo == "cssp-energy":
            _, report, _ = cssp_energy(g, sources, trace=False)
        elif args.algo == "bfs-energy":
            _, report, _, _, _, _ = full_bfs(g, sources, trace=False)
        elif args.algo == "apsp":
            _, report, _, _ = apsp_random_delay(g, seed=args.seed)
        else:
            raise CliError(f"sweep does not support --algo {args.algo}")
        rows.append(f"{point},{report.rounds},{report.max_energy()},"
                    f"{report.max_congestion()}")
        log("sweep point", point, "done")
    text = "\n".join(rows) + "\n"
    if args.out:
        os.makedirs(os.path.dirname(args.out) or ".", exist_ok=True)
        with open(args.out, "w") as f:
            f.write(text)
    else:
        print(text, end="")
    return EXIT_OK


def cmd_verify(args) -> int:
    failures = 0
    if args.fixtures:
        gpath = os.path.join(args.fixtures, "graph.txt")
        cpath = os.path.join(args.fixtures, "cover.slpycov")
        if not (os.path.exists(gpath) and os.path.exists(cpath)):
            raise CliError(f"missing fixtures in {args.fixtures}")
        try:
            g = load_graph(open(gpath).read())
            layered = load_layered_cover(open(cpath).read())
        except (GraphError, ValueError) as e:
            print(f"fixture check [FAIL] cover cache: {e}")
            return EXIT_VERIFY
        b = max(1, bits_for(g.n))
        bad = []
        for cov in layered.levels:
            bad.extend(check_cover(g, cov, cov.scale, 6 * b**3, 2 * b, 6 * b**4))
        bad.extend(check_layered(g, layered, layered.base**layered.top,
                                 layered.base))
        status = "PASS" if not bad else "FAIL"
        print(f"fixture check [{status}] cover cache"
              + (f": {bad[0]}" if bad else ""))
        failures += bool(bad)
    results = run_acceptance(profile="quick" if args.quick else "full")
    failures += sum(not r.passed for r in results)
    return EXIT_VERIFY if failures else EXIT_OK


def main(argv=None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as e:
        return EXIT_CONFIG if e.code not in (0, None) else 0
    try:
        if args.command == "gen":
            g = resolve_graph(args)
            text = save_graph(g)
            if args.out == "-":
                print(text, end="")
            else:
                with open(args.out, "w") as f:
                    f.write(text)
            return EXIT_OK
        if args.command == "run":
            return cmd_run(args)
        if args.command == "sweep":
            return cmd_sweep(args)
        return cmd_verify(args)
    except CliError as e:
        print(f"error: {e}", file=sys.stderr)
        return e.code
    except SimError as e:
        print(f"simulation error: {e}", file=sys.stderr)
        return EXIT_VERIFY


if __name__ == "__main__":
    sys.exit(main())
