"""Post-run analysis of execution traces.

Traces are harness-side observations (never charged to the simulation); the
checks here validate per-invocation approximation contracts and recursion
accounting against the sequential oracles.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from math import inf

from .oracle import dijkstra

INF = inf


@dataclass
class CutterInvocation:
    path: int
    N: int
    W: int
    active: set = field(default_factory=set)
    init: dict = field(default_factory=dict)  # node -> starting offset
    ticks: dict = field(default_factory=dict)  # node -> tick or None


def collect_cutter_invocations(trace) -> dict:
    """Group frame/cutter trace events into per-invocation records, keyed by
    (path, N). Components of different sizes that share a recursion path use
    different tick granularity, so they are audited separately."""
    frames = {}
    for kind, data in trace:
        if kind == "frame":
            frames[(data["node"], data["path"])] = data
    out = {}
    for kind, data in trace:
        if kind != "cutter":
            continue
        node, path = data["node"], data["path"]
        fr = frames[(node, path)]
        key = (path, fr["N"])
        inv = out.get(key)
        if inv is None:
            inv = out[key] = CutterInvocation(path=path, N=fr["N"], W=fr["D"])
        inv.active.add(node)
        inv.ticks[node] = data["tick"]
        start = 0 if fr["src"] else None
        for o in fr["offsets"]:
            start = o if start is None else min(start, o)
        if start is not None:
            inv.init[node] = start
    return out


def check_cutter_contract(graph, trace):
    """Every finite approximation satisfies dist <= tick*tau < dist + W/2 and
    every non-answer implies dist > 2W, against an oracle on the frame's
    induced subgraph. All comparisons are exact integer arithmetic with
    tau = W / (2N)."""
    checked = 0
    for (path, N), inv in sorted(collect_cutter_invocations(trace).items()):
        sub = graph.induced(inv.active)
        if not inv.init:
            dist = {v: INF for v in inv.active}
        else:
            dist = dijkstra(sub, inv.init)
        W = inv.W
        for v in sorted(inv.active):
            d = dist[v]
            t = inv.ticks[v]
            checked += 1
            if t is not None:
                if d is INF:
                    return False, f"path {path}: node {v} got tick {t} but is unreachable"
                # dist <= t*W/(2N) < dist + W/2
                if not (2 * N * d <= t * W):
                    return False, f"path {path}: node {v} tick {t} below dist {d}"
                if not (t * W < 2 * N * d + N * W):
                    return False, f"path {path}: node {v} tick {t} exceeds dist {d} + W/2"
            else:
                if d is not INF and not (d > 2 * W):
                    return False, f"path {path}: node {v} unanswered but dist {d} <= {2 * W}"
    return True, f"{checked} cutter outputs verified"


def check_halving(trace):
    """Each color must cluster at least half of the nodes living when it
    started: survivors = living at phase 0 minus all kills of the color."""
    living0 = {}
    kills = {}
    for kind, data in trace:
        if kind == "phase_node" and data["phase"] == 0:
            living0[data["color"]] = living0.get(data["color"], 0) + 1
        elif kind == "killed":
            kills[data["color"]] = kills.get(data["color"], 0) + 1
    for color, base in sorted(living0.items()):
        dead = kills.get(color, 0)
        if 2 * (base - dead) < base:
            return False, f"color {color}: clustered {base - dead} of {base}"
    return True, f"{len(living0)} colors satisfy the halving guarantee"


def check_kill_budget(trace, b):
    """Per phase, kills stay within living/(2b), both globally and within
    every label-suffix class."""
    if b == 0:
        return True, "no phases"
    living = {}
    by_class = {}
    kills = {}
    kills_class = {}
    for kind, data in trace:
        if kind == "phase_node":
            key = (data["color"], data["phase"])
            living[key] = living.get(key, 0) + 1
            suffix = data["label"] & ((1 << data["phase"]) - 1)
            ck = key + (suffix,)
            by_class[ck] = by_class.get(ck, 0) + 1
        elif kind == "killed":
            key = (data["color"], data["phase"])
            kills[key] = kills.get(key, 0) + 1
            suffix = data["label"] & ((1 << data["phase"]) - 1)
            ck = key + (suffix,)
            kills_class[ck] = kills_class.get(ck, 0) + 1
    for key, dead in sorted(kills.items()):
        base = living.get(key, 0)
        if dead * 2 * b > base:
            return False, f"color/phase {key}: {dead} kills exceed {base}/(2*{b})"
    for ck, dead in sorted(kills_class.items()):
        base = by_class.get(ck, 0)
        if dead * 2 * b > base:
            return False, f"class {ck}: {dead} kills exceed {base}/(2*{b})"
    return True, "kill budget respected in every phase and class"


def check_cut_composition(graph, trace):
    """For every far-side recursion frame, the distance its parent composes
    must equal half-threshold plus the oracle distance from the simulated cut
    sources inside the frame's own subgraph."""
    frames = {}
    for kind, data in trace:
        if kind == "frame":
            frames.setdefault((data["path"], data["N"]), []).append(data)
    checked = 0
    for (path, N), rows in sorted(frames.items()):
        if path <= 1 or path % 2 == 0:
            continue  # only far-side (cut-source) frames
        parent_rows = {
            d["node"]: d for d in
            frames.get((path // 2, N), []) + frames.get((path // 2, 0), [])
        }
        active = {d["node"] for d in rows}
        init = {}
        for d in rows:
            if d["offsets"]:
                init[d["node"]] = min(d["offsets"])
        sub = graph.induced(active)
        dist_cut = dijkstra(sub, init) if init else {v: INF for v in active}
        # the parent frame's half threshold
        parent = next(iter(parent_rows.values()), None)
        if parent is None:
            continue
        half = parent["D"] // 2
        pa = {d["node"] for d in frames.get((path // 2, parent["N"]), [])}
        init_p = {}
        for d in frames.get((path // 2, parent["N"]), []):
            if d["src"]:
                init_p[d["node"]] = 0
            elif d["offsets"]:
                init_p[d["node"]] = min(d["offsets"])
        dist_parent = dijkstra(graph.induced(pa), init_p) if init_p else {}
        for v in sorted(active):
            dc = dist_cut.get(v, INF)
            dp = dist_parent.get(v, INF)
            if dc is not INF and dc <= half:
                if dp != half + dc:
                    return False, (
                        f"frame {path}: node {v} composes {half}+{dc} "
                        f"but parent distance is {dp}"
                    )
                checked += 1
    return True, f"{checked} cut compositions verified"


def check_sleep_safety(outputs, report):
    """A lost frontier message is benign only if its target had already been
    reached at a strictly smaller hop (duplicate announcements to sleeping,
    finished nodes). Anything else means the frontier hit a sleeping node."""
    for r, src, dst, tag, payload in report.watched_losses:
        hop = payload[0]
        got = outputs.get(dst, INF)
        if got is INF or got >= hop:
            return False, (
                f"frontier hop {hop} from {src} lost at sleeping node {dst} "
                f"round {r} (node's own hop: {got})"
            )
    return True, f"{len(report.watched_losses)} frontier losses, all duplicates"


def check_relevance(layered, decomps_sources, outputs, threshold):
    """Every cluster containing a node within the threshold must be relevant:
    its ancestor chain ends at a top cluster containing a source."""
    # relevance computed structurally from the cover stack
    top = layered.top
    relevant = set()
    for cl in layered.levels[top].clusters:
        if cl.members & decomps_sources:
            relevant.add((top, cl.id))
    for lvl in range(top - 1, -1, -1):
        for cl in layered.levels[lvl].clusters:
            pid = layered.parent_of.get((lvl, cl.id))
            if (lvl + 1, pid) in relevant:
                relevant.add((lvl, cl.id))
    for lvl in range(top + 1):
        for cl in layered.levels[lvl].clusters:
            hot = any(
                outputs.get(v, INF) is not INF and outputs[v] <= threshold
                for v in cl.members
            )
            if hot and (lvl, cl.id) not in relevant:
                return False, f"cluster {cl.id} level {lvl} reached but irrelevant"
    return True, "relevance closed over all reached clusters"


def check_recursion_accounting(trace, n, per_level=3):
    """Each node appears in at most `per_level` subproblems per threshold
    level and at most per_level*(log2 D + 1) in total."""
    by_node_level = {}
    d_top = 1
    for kind, data in trace:
        if kind != "frame":
            continue
        d_top = max(d_top, data["D"])
        key = (data["node"], data["D"])
        by_node_level[key] = by_node_level.get(key, 0) + 1
    levels = d_top.bit_length()
    totals = {}
    for (node, d), count in sorted(by_node_level.items()):
        if count > per_level:
            return False, f"node {node} in {count} subproblems at level {d}"
        totals[node] = totals.get(node, 0) + count
    cap = per_level * levels
    for node, total in sorted(totals.items()):
        if total > cap:
            return False, f"node {node} in {total} subproblems total (cap {cap})"
    return True, f"{len(totals)} nodes within {per_level}/level and {cap} total"
