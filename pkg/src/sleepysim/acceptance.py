"""The acceptance suite: every top-level criterion as a callable check.

Each criterion returns (passed, detail); the runner prints one line per
criterion and collects shared artifacts (traces, covers, reports) so the
cross-cutting criteria (cutter contract, invariants, accounting, compliance)
audit exactly what the exactness sweeps executed.
"""

from __future__ import annotations

import math
import random
import time
from dataclasses import dataclass, field
from math import inf

from .apsp_sched import apsp_random_delay
from .congest_cssp import cssp
from .energy_bfs import bootstrap_base_covers, full_bfs, run_thresholded_bfs_with_cover
from .energy_cssp import cssp_energy
from .engine import Message, run_simulation
from .graph import GraphSpec, gen_graph
from .netdecomp import bits_for
from .oracle import (
    check_cover, check_decomposition, check_layered, dijkstra, hop_distances,
)
from .trace_checks import (
    check_cutter_contract, check_halving, check_kill_budget,
    check_recursion_accounting, check_sleep_safety,
)


@dataclass
class CriterionResult:
    number: int
    name: str
    passed: bool
    detail: str
    elapsed: float = 0.0

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return f"criterion {self.number:2d} [{status}] {self.name}: {self.detail} ({self.elapsed:.1f}s)"


@dataclass
class SuiteContext:
    profile: str = "full"
    congest_runs: list = field(default_factory=list)  # (graph_used, trace, report)
    energy_runs: list = field(default_factory=list)
    bfs_runs: list = field(default_factory=list)  # (outputs, report)
    covers: list = field(default_factory=list)  # (graph, cover, scale)
    layereds: list = field(default_factory=list)  # (graph, layered)
    decomps: list = field(default_factory=list)  # (graph, decomp, k)
    decomp_traces: list = field(default_factory=list)  # (graph, trace)
    reports: list = field(default_factory=list)
    rerun_seeds: dict = field(default_factory=dict)

    def counts(self, full, quick):
        return full if self.profile == "full" else quick


def _random_spec(rng, n_cap, trial):
    n = rng.choice(
        [rng.randint(2, 16), rng.randint(2, 32), rng.randint(16, n_cap // 2 + 16),
         rng.randint(max(2, n_cap // 2), n_cap)]
    )
    n = max(2, min(n, n_cap))
    max_m = n * (n - 1) // 2
    # sparse draws leave disconnected graphs in the mix
    m = min(max_m, rng.choice([max(1, n // 2), n - 1, 2 * n, 3 * n]))
    mode = rng.choice(["unit", "uniform", "uniform", "zero-heavy"])
    cap = min(n**3, rng.choice([1, 7, 60, 1000]))
    return GraphSpec("random-gnm", n, seed=trial * 7919 + 13, m=m,
                     weight_mode=mode, max_w=max(1, cap))


def criterion_1(ctx) -> CriterionResult:
    t0 = time.time()
    count = ctx.counts(200, 8)
    rng = random.Random(1001)
    mismatches = 0
    for trial in range(count):
        spec = _random_spec(rng, 128, trial)
        g = gen_graph(spec)
        k = rng.randint(1, max(1, g.n // 4))
        sources = set(rng.sample(range(g.n), k))
        outputs, report, engine = cssp(g, sources)
        if outputs != dijkstra(g, sources):
            mismatches += 1
        ctx.congest_runs.append((engine.graph, engine.trace_log, report))
        ctx.reports.append(report)
        if trial % 10 == 0:
            ctx.rerun_seeds[("c1", trial)] = (spec, tuple(sorted(sources)),
                                              report.to_json())
    detail = f"{count} graphs, {mismatches} mismatches"
    return CriterionResult(1, "exactness congest cssp", mismatches == 0,
                           detail, time.time() - t0)


def criterion_2(ctx) -> CriterionResult:
    t0 = time.time()
    count = ctx.counts(50, 4)
    rng = random.Random(2002)
    mismatches = 0
    for trial in range(count):
        spec = _random_spec(rng, 96, trial + 500)
        g = gen_graph(spec)
        k = rng.randint(1, max(1, g.n // 6))
        sources = set(rng.sample(range(g.n), k))
        outputs, report, engine = cssp_energy(g, sources)
        if outputs != dijkstra(g, sources):
            mismatches += 1
        ctx.energy_runs.append((engine.graph, engine.trace_log, report))
        ctx.reports.append(report)
    detail = f"{count} graphs, {mismatches} mismatches"
    return CriterionResult(2, "exactness energy cssp", mismatches == 0,
                           detail, time.time() - t0)


def criterion_3(ctx) -> CriterionResult:
    t0 = time.time()
    if ctx.profile == "full":
        cases = [
            GraphSpec("path", 64), GraphSpec("path", 256),
            GraphSpec("cycle", 48), GraphSpec("cycle", 128),
            GraphSpec("grid", 64, seed=1), GraphSpec("grid", 256, seed=1),
            GraphSpec("random-tree", 48, seed=2), GraphSpec("random-tree", 96, seed=3),
            GraphSpec("random-gnm", 40, seed=4, m=90),
            GraphSpec("random-gnm", 64, seed=5, m=160),
        ]
    else:
        cases = [GraphSpec("path", 17), GraphSpec("grid", 16, seed=1)]
    rng = random.Random(3003)
    mismatches = 0
    for i, spec in enumerate(cases):
        g = gen_graph(spec)
        src = {rng.randrange(g.n)} if i % 2 else {0}
        outputs, report, engine, layered, decomps, tlogs = full_bfs(g, src)
        if outputs != hop_distances(g, src):
            mismatches += 1
        ctx.bfs_runs.append((outputs, report))
        ctx.reports.append(report)
        ctx.layereds.append((g, layered))
        for lvl, cov in enumerate(layered.levels):
            ctx.covers.append((g, cov, cov.scale))
        for dec, tl in zip(decomps, tlogs):
            ctx.decomp_traces.append((g, tl))
            ctx.decomps.append((g, dec, dec.separation))
        if i < 2:
            ctx.rerun_seeds[("c3", i)] = (spec, tuple(sorted(src)),
                                          report.to_json())
    detail = f"{len(cases)} graphs, {mismatches} mismatches"
    return CriterionResult(3, "exactness energy bfs", mismatches == 0,
                           detail, time.time() - t0)


def criterion_4(ctx) -> CriterionResult:
    t0 = time.time()
    checked = 0
    for graph, trace, _ in ctx.congest_runs + ctx.energy_runs:
        ok, detail = check_cutter_contract(graph, trace)
        if not ok:
            return CriterionResult(4, "cutter contract", False, detail,
                                   time.time() - t0)
        checked += int(detail.split()[0])
    return CriterionResult(4, "cutter contract", True,
                           f"{checked} outputs within bounds, 0 violations",
                           time.time() - t0)


def criterion_5(ctx) -> CriterionResult:
    t0 = time.time()
    ns = [64, 128, 256, 512] if ctx.profile == "full" else [32, 64]
    ratios = {}
    for n in ns:
        g = gen_graph(GraphSpec("random-gnm", n, seed=55, m=3 * n))
        outputs, report, engine = cssp(g, {0}, trace=False)
        ref = dijkstra(g, [0])
        if outputs != ref:
            return CriterionResult(5, "congestion trend", False,
                                   f"mismatch at n={n}", time.time() - t0)
        ctx.reports.append(report)
        logn = max(1, math.ceil(math.log2(n)))
        ratios[n] = report.max_congestion() / logn**2
    lo, hi = min(ratios.values()), max(ratios.values())
    band = hi / lo if lo else inf
    detail = (f"cong/log2(n)^2 = "
              + ", ".join(f"{n}:{r:.2f}" for n, r in ratios.items())
              + f"; band {band:.2f}x (C_cong={hi:.2f})")
    return CriterionResult(5, "congestion trend", band <= 2.0, detail,
                           time.time() - t0)


class _AwakeBfs:
    """All-awake baseline flood for the energy contrast check."""

    def __init__(self, node, nbrs, is_src):
        self.node = node
        self.nbrs = nbrs
        self.hop = 0 if is_src else None

    def on_round(self, api):
        if api.round == 0:
            api.always_awake()
            if self.hop == 0:
                for u in self.nbrs:
                    api.send(u, Message(1, (1,)))
            api.wake_at(1)
            return
        if self.hop is None:
            for src, msg in api.inbox:
                self.hop = msg.payload[0]
                for u in self.nbrs:
                    api.send(u, Message(1, (self.hop + 1,)))
                break
        if self.hop is not None:
            api.finish(self.hop)


def criterion_6(ctx) -> CriterionResult:
    t0 = time.time()
    ds = [64, 128, 256, 512] if ctx.profile == "full" else [16, 32]
    rounds = {}
    energy = {}
    base_energy = {}
    for d in ds:
        g = gen_graph(GraphSpec("path", d + 1))
        layered, decomps, rep_boot, tlogs = bootstrap_base_covers(g)
        ctx.layereds.append((g, layered))
        for cov in layered.levels:
            ctx.covers.append((g, cov, cov.scale))
        for dec, tl in zip(decomps, tlogs):
            ctx.decomp_traces.append((g, tl))
            ctx.decomps.append((g, dec, dec.separation))
        outputs, report, engine = run_thresholded_bfs_with_cover(
            g, layered, {0}, d)
        if outputs != hop_distances(g, [0]):
            return CriterionResult(6, "energy trend", False,
                                   f"mismatch at D={d}", time.time() - t0)
        ctx.bfs_runs.append((outputs, report))
        ctx.reports.append(report)
        rounds[d] = report.rounds
        energy[d] = report.max_energy()
        outs, rep, _ = run_simulation(
            g, lambda v: _AwakeBfs(v, [u for u, _ in g.neighbors(v)], v == 0))
        base_energy[d] = rep.max_energy()
    r_ratio = min(rounds[b] / rounds[a] for a, b in zip(ds, ds[1:]))
    e_ratio = max(energy[b] / energy[a] for a, b in zip(ds, ds[1:]))
    b_ratio = min(base_energy[b] / base_energy[a] for a, b in zip(ds, ds[1:]))
    ok = r_ratio >= 1.8 and e_ratio <= 1.5 and b_ratio >= 1.8
    detail = (f"rounds x{r_ratio:.2f}/doubling, max energy x{e_ratio:.2f} "
              f"(need <=1.5), baseline x{b_ratio:.2f}; "
              f"energy={sorted(energy.items())}")
    return CriterionResult(6, "energy trend", ok, detail, time.time() - t0)


def criterion_7(ctx) -> CriterionResult:
    t0 = time.time()
    checked = 0
    for g, cover, scale in ctx.covers:
        b = max(1, bits_for(g.n))
        out = check_cover(g, cover, scale, 6 * b**3, 2 * b, 6 * b**4)
        if out:
            return CriterionResult(7, "cover/decomp invariants", False,
                                   f"cover scale {scale}: {out[0]}",
                                   time.time() - t0)
        checked += 1
    for g, layered in ctx.layereds:
        out = check_layered(g, layered, layered.base**layered.top, layered.base)
        if out:
            return CriterionResult(7, "cover/decomp invariants", False,
                                   f"layered: {out[0]}", time.time() - t0)
        checked += 1
    for g, trace in ctx.decomp_traces:
        ok, detail = check_halving(trace)
        if not ok:
            return CriterionResult(7, "cover/decomp invariants", False,
                                   detail, time.time() - t0)
        ok, detail = check_kill_budget(trace, bits_for(g.n))
        if not ok:
            return CriterionResult(7, "cover/decomp invariants", False,
                                   detail, time.time() - t0)
        checked += 1
    for g, decomp, k in ctx.decomps:
        b = max(1, bits_for(g.n))
        out = check_decomposition(g, decomp, k, 6 * k * b**3, 2 * b)
        if out:
            return CriterionResult(7, "cover/decomp invariants", False,
                                   f"decomp k={k}: {out[0]}", time.time() - t0)
        checked += 1
    return CriterionResult(7, "cover/decomp invariants", True,
                           f"{checked} structures clean (halving and kill "
                           "budgets included)", time.time() - t0)


def criterion_8(ctx) -> CriterionResult:
    t0 = time.time()
    worst = ""
    for graph, trace, _ in ctx.congest_runs + ctx.energy_runs:
        ok, detail = check_recursion_accounting(trace, graph.n)
        if not ok:
            return CriterionResult(8, "recursion accounting", False, detail,
                                   time.time() - t0)
        worst = detail
    return CriterionResult(8, "recursion accounting", True, worst,
                           time.time() - t0)


def criterion_9(ctx) -> CriterionResult:
    t0 = time.time()
    criticals = 0
    losses = 0
    for outputs, report in ctx.bfs_runs:
        criticals += len(report.critical_losses)
        ok, detail = check_sleep_safety(outputs, report)
        if not ok:
            return CriterionResult(9, "sleep safety", False, detail,
                                   time.time() - t0)
        losses += len(report.watched_losses)
    for _, _, report in ctx.energy_runs:
        criticals += len(report.critical_losses)
    ok = criticals == 0
    return CriterionResult(
        9, "sleep safety", ok,
        f"0 frontier arrivals at sleeping nodes ({losses} duplicate losses "
        "audited)", time.time() - t0)


def criterion_10(ctx) -> CriterionResult:
    t0 = time.time()
    count = ctx.counts(20, 3)
    rng = random.Random(1010)
    mismatches = 0
    worst_c = 0.0
    for trial in range(count):
        n = rng.choice([rng.randint(4, 12)] * 3 + [rng.randint(13, 24)]
                       + [rng.randint(25, 32)])
        max_m = n * (n - 1) // 2
        m = min(max_m, rng.randint(n - 1, 3 * n))
        spec = GraphSpec("random-gnm", n, seed=trial + 77, m=m,
                         weight_mode="uniform", max_w=rng.randint(1, 9))
        g = gen_graph(spec)
        matrix, report, _, delays = apsp_random_delay(g, seed=trial)
        ref = {}
        for s in range(n):
            dist = dijkstra(g, [s])
            for v in range(n):
                ref[(s, v)] = dist[v]
        if matrix != ref:
            mismatches += 1
        _, solo, _ = cssp(g, {0}, trace=False)
        logn = max(1, math.ceil(math.log2(n)))
        fitted = report.rounds / max(1, solo.rounds * logn + g.n)
        worst_c = max(worst_c, fitted)
        ctx.reports.append(report)
        if trial < 5:
            ctx.rerun_seeds[("c10", trial)] = (spec, trial, report.to_json())
    ok = mismatches == 0 and worst_c <= 8.0
    detail = f"{count} graphs, {mismatches} mismatches, fitted c={worst_c:.2f}"
    return CriterionResult(10, "apsp random delay", ok, detail,
                           time.time() - t0)


def criterion_11(ctx) -> CriterionResult:
    t0 = time.time()
    worst = 0
    limit = None
    for report in ctx.reports:
        worst = max(worst, report.max_bits)
        if report.max_bits > report.bit_limit:
            return CriterionResult(11, "congest compliance", False,
                                   f"{report.max_bits} > {report.bit_limit}",
                                   time.time() - t0)
        limit = report.bit_limit if limit is None else min(limit, report.bit_limit)
    return CriterionResult(
        11, "congest compliance", True,
        f"0 budget violations across {len(ctx.reports)} runs "
        f"(worst message {worst} bits)", time.time() - t0)


def criterion_12(ctx) -> CriterionResult:
    t0 = time.time()
    for key in sorted(ctx.rerun_seeds):
        kind = key[0]
        if kind == "c1":
            spec, sources, want = ctx.rerun_seeds[key]
            g = gen_graph(spec)
            _, report, _ = cssp(g, set(sources))
        elif kind == "c3":
            spec, sources, want = ctx.rerun_seeds[key]
            g = gen_graph(spec)
            _, report, _, _, _, _ = full_bfs(g, set(sources))
        else:
            spec, seed, want = ctx.rerun_seeds[key]
            g = gen_graph(spec)
            _, report, _, _ = apsp_random_delay(g, seed=seed)
        if report.to_json() != want:
            return CriterionResult(12, "determinism", False,
                                   f"report drift on {key}", time.time() - t0)
    return CriterionResult(12, "determinism", True,
                           f"{len(ctx.rerun_seeds)} reruns byte-identical",
                           time.time() - t0)


CRITERIA = [
    criterion_1, criterion_2, criterion_3, criterion_4, criterion_5,
    criterion_6, criterion_7, criterion_8, criterion_9, criterion_10,
    criterion_11, criterion_12,
]


def run_acceptance(profile="full", emit=print):
    """Run every criterion in order; returns the list of CriterionResult."""
    ctx = SuiteContext(profile=profile)
    results = []
    for fn in CRITERIA:
        result = fn(ctx)
        results.append(result)
        emit(result.line())
    return results
