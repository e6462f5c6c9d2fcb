"""Exact closest-source shortest paths with polylog per-edge congestion.

The algorithm runs a threshold-halving recursion per node as a stack of
*frames*. Each frame, identified by an integer path id that rides on every
message, executes on its active node set:

  1. base case (threshold 1): one probe round resolves outputs;
  2. a deterministic spanning-forest computation (Boruvka merge phases in
     fixed round windows sized by the frame's node bound);
  3. an approximate distance cutter: weights rounded up to multiples of
     tau = W/(2*N), then a token BFS where an edge of rounded weight a*tau
     delays a rounds, run for 6*N ticks;
  4. recursion on the near set with half the threshold; completion detected
     per component by an event-driven convergecast over the spanning tree,
     after which the root schedules the second recursion a safe margin ahead
     and broadcasts the start round;
  5. finished nodes announce their distances so cut neighbors can simulate
     the imaginary sources sitting on the crossing edges;
  6. recursion on the remaining set from those simulated sources; outputs
     compose as half-threshold + cut distance.

All distance arithmetic is exact integer tick counting; nothing floats.
"""

from __future__ import annotations

from math import inf

from .engine import Engine, Message, SimConfig
from .structures import ForestInfo

INF = inf

# message tags
T_COMP = 1
T_MINEDGE = 2
T_DECIDE = 3
T_CHOSEN = 4
T_ADOPT = 5
T_ACK = 6
T_SIZE = 7
T_SIZEB = 8
T_CUT = 9
T_BASE = 10
T_DONE1 = 11
T_START2 = 12
T_OUTANN = 13
T_DONE2 = 14
T_FDONE = 15

NO_EDGE = (1,)  # "no outgoing candidate" marker payload


def pow2_at_least(x: int) -> int:
    d = 1
    while d < x:
        d <<= 1
    return d


def ceil_div(a: int, b: int) -> int:
    return -(-a // b)


def lift_zero_weights(graph):
    """Zero weights become 1; positive weight w becomes n*w."""
    n = graph.n
    return graph.reweighted(lambda w: 1 if w == 0 else n * w)


def project_distance(x, n: int):
    """Map a distance in the lifted graph back: floor(x/n); INF stays INF."""
    if x is INF or x is None:
        return INF
    return x // n


class _Frame:
    """Per-node state of one recursion frame."""

    __slots__ = (
        "path", "D", "N", "t0", "active", "src", "offsets",
        "comp", "parent", "children", "depth", "size", "phase",
        "nbr_comp", "agg", "decision", "merging_done", "in_chosen",
        "pend_size",
        "t_cut", "cand", "tick", "v1",
        "t_child1", "done1_self", "done1_kids", "sent_done1", "start2",
        "out1", "v2", "offsets2", "done2_self", "done2_kids", "sent_done2",
        "out2", "final", "complete",
    )

    def __init__(self, path, D, N, t0, active, src, offsets):
        self.path = path
        self.D = D
        self.N = N
        self.t0 = t0
        self.active = active
        self.src = src
        self.offsets = offsets  # imaginary-source edge lengths ending here
        self.comp = None
        self.parent = None
        self.children = []
        self.depth = 0
        self.size = 1
        self.phase = 0
        self.nbr_comp = {}
        self.agg = None
        self.decision = None
        self.merging_done = False
        self.in_chosen = []
        self.pend_size = 0
        self.t_cut = None
        self.cand = None
        self.tick = None
        self.v1 = False
        self.t_child1 = None
        self.done1_self = False
        self.done1_kids = set()
        self.sent_done1 = False
        self.start2 = None
        self.out1 = INF
        self.v2 = False
        self.offsets2 = []
        self.done2_self = False
        self.done2_kids = set()
        self.sent_done2 = False
        self.out2 = INF
        self.final = None
        self.complete = False


class CsspProgram:
    """Node program for the threshold-halving recursion (congest flavor)."""

    def __init__(self, node, graph, sources, D_top, *,
                 forest_only=False, active0=None, start_margin=4,
                 trace=True):
        self.node = node
        self.nbrs = list(graph.neighbors(node))  # [(u, w)] sorted
        self.weight = dict(self.nbrs)
        self.n = graph.n
        self.is_source = node in sources
        self.D_top = D_top
        self.forest_only = forest_only
        self.active_root = active0 is None or node in active0
        self.start_margin = start_margin
        self.do_trace = trace
        self.frames: dict[int, _Frame] = {}
        self._plan: dict[int, list] = {}
        self._queue: dict[int, list] = {}
        self._sent_now: set = set()
        self._answer = None
        self._root_done = False
        self._started = False

    # -- plumbing ----------------------------------------------------------

    def _plan_at(self, api, r, path, action, *args):
        if r == api.round:
            self._do(api, path, action, args)
            return
        self._plan.setdefault(r, []).append((path, action, args))
        api.wake_at(r)

    def _send_slot(self, api, dst, msg):
        if dst in self._sent_now:
            raise AssertionError(
                f"slotted send collision node {self.node} -> {dst} round {api.round}"
            )
        self._sent_now.add(dst)
        api.send(dst, msg)

    def _send_queued(self, api, dst, msg):
        self._queue.setdefault(dst, []).append(msg)

    def _flush(self, api):
        pending = False
        for dst in sorted(self._queue):
            q = self._queue[dst]
            if q and dst not in self._sent_now:
                api.send(dst, q.pop(0))
                self._sent_now.add(dst)
            if q:
                pending = True
        if pending:
            api.wake_at(api.round + 1)

    # -- engine entry -------------------------------------------------------

    def on_round(self, api):
        self._sent_now = set()
        if not self._started:
            self._started = True
            api.always_awake()
            self._create_root(api)
        for src, msg in api.inbox:
            self._dispatch(api, src, msg)
        for path, action, args in self._plan.pop(api.round, []):
            self._do(api, path, action, args)
        self._flush(api)
        if self._root_done and not any(self._queue.values()):
            api.finish(self._answer)

    def _create_root(self, api):
        if not self.active_root:
            self._root_done = True
            return
        f = _Frame(1, self.D_top, max(1, self.n), api.round, True,
                   self.is_source, [])
        self._enter(api, f)

    def _do(self, api, path, action, args):
        f = self.frames.get(path)
        if f is None:
            return
        getattr(self, action)(api, f, *args)

    def _dispatch(self, api, src, msg):
        f = self.frames.get(msg.ctx)
        if f is None:
            return
        tag = msg.tag
        if tag == T_COMP:
            f.nbr_comp[src] = msg.payload[0]
        elif tag == T_CUT:
            self._on_cut(api, f, src, msg.payload[0])
        elif tag == T_MINEDGE:
            self._on_minedge(api, f, msg.payload)
        elif tag == T_DECIDE:
            self._on_decide(api, f, msg.payload)
        elif tag == T_CHOSEN:
            f.in_chosen.append(src)
        elif tag == T_ADOPT:
            self._on_adopt(api, f, src, msg.payload)
        elif tag == T_ACK:
            f.children.append(src)
        elif tag == T_SIZE:
            f.pend_size += msg.payload[0]
        elif tag == T_SIZEB:
            self._on_sizeb(api, f, msg.payload[0])
        elif tag == T_BASE:
            self._on_base_probe(api, f, src)
        elif tag == T_DONE1:
            f.done1_kids.add(src)
            self._check_done1(api, f)
        elif tag == T_START2:
            self._on_start2(api, f, msg.payload[0])
        elif tag == T_OUTANN:
            self._on_outann(api, f, src, msg.payload[0])
        elif tag == T_DONE2:
            f.done2_kids.add(src)
            self._check_done2(api, f)
        elif tag == T_FDONE:
            self._on_fdone(api, f)

    # -- frame lifecycle ----------------------------------------------------

    def _enter(self, api, f):
        self.frames[f.path] = f
        if self.do_trace:
            api.trace("frame", path=f.path, D=f.D, N=f.N,
                      src=f.src, offsets=tuple(f.offsets))
        f.comp = self.node
        if f.D == 1:
            if f.src:
                for u, _ in self.nbrs:
                    self._send_slot(api, u, Message(T_BASE, (), f.path))
            self._plan_at(api, f.t0 + 1, f.path, "_base_resolve")
            return
        if f.N == 1:
            f.size = 1
            f.t_cut = f.t0
            self._after_census(api, f)
            self._start_cutter(api, f)
            return
        self._phase_start(api, f)

    def _base_resolve(self, api, f):
        if f.src:
            f.final = 0
        elif f.offsets and min(f.offsets) == 1:
            f.final = 1
        else:
            f.final = INF
        self._frame_complete(api, f)

    def _on_base_probe(self, api, f, src):
        # a weight-1 edge from a probing source acts like an offset-1 source
        if f.D == 1 and not f.src and self.weight[src] == 1:
            f.offsets.append(1)

    # -- spanning forest (merge phases in fixed windows) ----------------------

    def _phase_count(self, f):
        p, size = 0, 1
        while size < f.N:
            size <<= 1
            p += 1
        return p

    def _phase_len(self, f):
        return 3 * (f.N + 2) + 4

    def _phase_base(self, f, p):
        return f.t0 + p * self._phase_len(f)

    def _phase_start(self, api, f):
        p = f.phase
        if p >= self._phase_count(f):
            self._census_start(api, f)
            return
        base = self._phase_base(f, p)
        if api.round != base:
            self._plan_at(api, base, f.path, "_phase_start")
            return
        if f.merging_done:
            f.phase += 1
            self._phase_start(api, f)
            return
        f.nbr_comp = {}
        f.agg = None
        f.decision = None
        f.in_chosen = []
        for u, _ in self.nbrs:
            self._send_slot(api, u, Message(T_COMP, (f.comp,), f.path))
        N = f.N
        if f.parent is not None:
            self._plan_at(api, base + 1 + (N - f.depth), f.path, "_send_minedge")
        else:
            self._plan_at(api, base + N + 1, f.path, "_root_decide")
        self._plan_at(api, base + 2 * (N + 2) + 1, f.path, "_send_chosen")
        self._plan_at(api, base + self._phase_len(f), f.path, "_phase_end")

    def _my_candidate(self, f):
        best = None
        for u, comp in sorted(f.nbr_comp.items()):
            if comp != f.comp:
                w = self.weight[u]
                key = (w, min(self.node, u), max(self.node, u))
                if best is None or key < best[0]:
                    best = (key, (w, self.node, u))
        return best

    def _on_minedge(self, api, f, payload):
        if payload == NO_EDGE:
            return
        _, w, a, b = payload
        key = (w, min(a, b), max(a, b))
        if f.agg is None or key < f.agg[0]:
            f.agg = (key, (w, a, b))

    def _send_minedge(self, api, f):
        mine = self._my_candidate(f)
        if mine is not None and (f.agg is None or mine[0] < f.agg[0]):
            f.agg = mine
        if f.agg is None:
            self._send_slot(api, f.parent, Message(T_MINEDGE, NO_EDGE, f.path))
        else:
            w, a, b = f.agg[1]
            self._send_slot(api, f.parent, Message(T_MINEDGE, (0, w, a, b), f.path))

    def _root_decide(self, api, f):
        mine = self._my_candidate(f)
        if mine is not None and (f.agg is None or mine[0] < f.agg[0]):
            f.agg = mine
        if f.agg is None:
            f.decision = ()
            f.merging_done = True
        else:
            f.decision = f.agg[1]
        for c in f.children:
            self._send_slot(api, c, Message(T_DECIDE, f.decision, f.path))

    def _on_decide(self, api, f, payload):
        f.decision = payload
        if payload == ():
            f.merging_done = True
        for c in f.children:
            self._send_slot(api, c, Message(T_DECIDE, payload, f.path))

    def _send_chosen(self, api, f):
        if f.decision and f.decision[1] == self.node:
            self._send_slot(api, f.decision[2], Message(T_CHOSEN, (), f.path))
        self._plan_at(api, api.round + 1, f.path, "_merge_kickoff")

    def _merge_kickoff(self, api, f):
        # core edge: my chosen target also chose me over the same edge
        if f.decision and f.decision[1] == self.node:
            other = f.decision[2]
            if other in f.in_chosen and self.node == min(self.node, other):
                links = self._merge_edges(f)
                f.parent = None
                f.depth = 0
                f.comp = self.node
                f.children = []
                for u in links:
                    self._send_slot(api, u, Message(T_ADOPT, (self.node, 0), f.path))

    def _merge_edges(self, f):
        """Local edges of the merged structure: old tree + chosen + received."""
        out = set(f.children)
        if f.parent is not None:
            out.add(f.parent)
        if f.decision and f.decision[1] == self.node:
            out.add(f.decision[2])
        out.update(f.in_chosen)
        return sorted(out)

    def _on_adopt(self, api, f, src, payload):
        root, d = payload
        links = self._merge_edges(f)
        f.comp = root
        f.parent = src
        f.depth = d + 1
        f.children = []
        for u in links:
            if u != src:
                self._send_slot(api, u, Message(T_ADOPT, (root, d + 1), f.path))
        self._send_queued(api, src, Message(T_ACK, (), f.path))

    def _phase_end(self, api, f):
        f.phase += 1
        self._phase_start(api, f)

    # -- component census ------------------------------------------------------

    def _census_start(self, api, f):
        base = self._phase_base(f, self._phase_count(f))
        if api.round != base:
            self._plan_at(api, base, f.path, "_census_start")
            return
        N = f.N
        f.pend_size = 0
        if f.parent is not None:
            self._plan_at(api, base + 1 + (N - f.depth), f.path, "_census_send")
        else:
            self._plan_at(api, base + N + 1, f.path, "_census_root")
        f.t_cut = base + 2 * (N + 2) + 2
        self._plan_at(api, f.t_cut, f.path, "_start_cutter")

    def _census_send(self, api, f):
        self._send_slot(api, f.parent, Message(T_SIZE, (1 + f.pend_size,), f.path))

    def _census_root(self, api, f):
        f.size = 1 + f.pend_size
        for c in f.children:
            self._send_slot(api, c, Message(T_SIZEB, (f.size,), f.path))
        self._after_census(api, f)

    def _on_sizeb(self, api, f, size):
        f.size = size
        for c in f.children:
            self._send_slot(api, c, Message(T_SIZEB, (size,), f.path))
        self._after_census(api, f)

    def _after_census(self, api, f):
        if self.forest_only and f.path == 1:
            self._answer = (f.comp, f.parent, f.depth, f.size)
            self._root_done = True

    # -- approximate cutter -------------------------------------------------------

    def _tick_weight(self, f, w):
        return ceil_div(2 * f.N * w, f.D)

    def _start_cutter(self, api, f):
        if self.forest_only:
            return
        k = 6 * f.N
        cand = None
        if f.src:
            cand = 0
        for o in f.offsets:
            t = ceil_div(2 * f.N * o, f.D)
            if cand is None or t < cand:
                cand = t
        f.cand = cand
        if cand is not None and cand <= k:
            self._plan_at(api, f.t_cut + cand, f.path, "_cut_finalize")
        self._plan_at(api, f.t_cut + k + 2, f.path, "_cutter_done")

    def _on_cut(self, api, f, src, tick):
        if f.tick is not None or f.t_cut is None:
            return
        cand = tick + self._tick_weight(f, self.weight[src])
        if f.cand is None or cand < f.cand:
            f.cand = cand
            if cand <= 6 * f.N:
                self._plan_at(api, f.t_cut + cand, f.path, "_cut_finalize")

    def _cut_finalize(self, api, f):
        if f.tick is not None or f.cand is None:
            return
        if api.round != f.t_cut + f.cand:
            return  # superseded by a better candidate
        f.tick = f.cand
        for u, _ in self.nbrs:
            self._send_slot(api, u, Message(T_CUT, (f.tick,), f.path))

    def _cutter_done(self, api, f):
        f.v1 = f.tick is not None and f.tick < 3 * f.N
        if self.do_trace:
            api.trace("cutter", path=f.path, tick=f.tick, v1=f.v1)
        f.t_child1 = api.round
        if f.v1:
            child = _Frame(f.path * 2, f.D // 2, f.size, f.t_child1,
                           True, f.src, list(f.offsets))
            self._enter(api, child)
        else:
            f.done1_self = True
        self._check_done1(api, f)

    # -- recursion bookkeeping ---------------------------------------------------

    def _child_complete(self, api, child):
        parent = self.frames.get(child.path // 2)
        if parent is None:
            return
        if child.path % 2 == 0:
            parent.out1 = child.final
            parent.done1_self = True
            self._check_done1(api, parent)
        else:
            parent.out2 = child.final
            parent.done2_self = True
            self._check_done2(api, parent)

    def _check_done1(self, api, f):
        if f.sent_done1 or f.t_child1 is None or not f.done1_self:
            return
        if not all(c in f.done1_kids for c in f.children):
            return
        f.sent_done1 = True
        if f.parent is not None:
            self._send_queued(api, f.parent, Message(T_DONE1, (), f.path))
        else:
            start2 = api.round + self.start_margin * f.size + 4
            self._on_start2(api, f, start2)

    def _on_start2(self, api, f, start2):
        if f.start2 is not None:
            return
        if start2 <= api.round:
            raise AssertionError(
                f"start-time broadcast arrived late at node {self.node}"
            )
        f.start2 = start2
        for c in f.children:
            self._send_queued(api, c, Message(T_START2, (start2,), f.path))
        self._plan_at(api, start2, f.path, "_announce_out")
        self._plan_at(api, start2 + 1, f.path, "_start_child2")

    def _announce_out(self, api, f):
        f.v2 = f.v1 and f.out1 is not INF
        if f.v2:
            for u, _ in self.nbrs:
                self._send_slot(api, u, Message(T_OUTANN, (f.out1,), f.path))

    def _on_outann(self, api, f, src, dist):
        if f.v1 and not f.v2 and f.out1 is INF:
            off = dist + self.weight[src] - f.D // 2
            assert off >= 1, "cut offset must be positive"
            f.offsets2.append(off)

    def _start_child2(self, api, f):
        if f.v1 and not f.v2:
            # an imaginary source is itself within D/2, so the cut slides
            # forward through its simulated edge: offset o becomes o - D/2
            half = f.D // 2
            inherited = [o - half for o in f.offsets]
            assert all(o >= 1 for o in inherited), "imaginary source behind cut"
            child = _Frame(f.path * 2 + 1, half, f.size, api.round,
                           True, False, sorted(f.offsets2 + inherited))
            self._enter(api, child)
        else:
            f.done2_self = True
        self._check_done2(api, f)

    def _check_done2(self, api, f):
        if f.sent_done2 or f.start2 is None or not f.done2_self:
            return
        if not all(c in f.done2_kids for c in f.children):
            return
        f.sent_done2 = True
        if f.parent is not None:
            self._send_queued(api, f.parent, Message(T_DONE2, (), f.path))
        else:
            self._on_fdone(api, f)

    def _on_fdone(self, api, f):
        if f.complete:
            return
        for c in f.children:
            self._send_queued(api, c, Message(T_FDONE, (), f.path))
        if f.v2:
            f.final = f.out1
        elif f.v1:
            f.final = (f.D // 2) + f.out2 if f.out2 is not INF else INF
        else:
            f.final = INF
        self._frame_complete(api, f)

    def _frame_complete(self, api, f):
        f.complete = True
        if f.path == 1:
            self._answer = f.final
            self._root_done = True
        else:
            self._child_complete(api, f)


# -- public API ----------------------------------------------------------------


def default_round_limit(n: int, D: int) -> int:
    levels = max(1, D.bit_length())
    logn = max(1, (max(2, n) - 1).bit_length())
    return 256 + 24 * n * levels * (4 * logn + 20)


def run_thresholded_cssp(graph, sources, D, *, config=None, trace=True):
    """Run the distributed D-thresholded computation; returns
    (outputs, report, engine)."""
    if D & (D - 1):
        raise ValueError("threshold must be a power of two")
    if not sources:
        raise ValueError("need at least one source")
    if any(w < 1 for (_, _, w) in graph.edges):
        raise ValueError("thresholded run requires weights >= 1 (lift zeros first)")
    cfg = config or SimConfig(round_limit=default_round_limit(graph.n, D))
    cfg.collect_trace = trace
    engine = Engine(graph, cfg)
    src = set(sources)
    programs = {
        v: CsspProgram(v, graph, src, D, trace=trace) for v in range(graph.n)
    }
    outputs, report = engine.run(programs)
    return outputs, report, engine


def boruvka_forest(graph, *, active=None, config=None) -> tuple:
    """Maximal spanning forest of the (induced) graph; every node learns its
    component id, parent, depth, and component size."""
    nodes = sorted(active) if active is not None else list(range(graph.n))
    cfg = config or SimConfig(round_limit=default_round_limit(graph.n, 2))
    engine = Engine(graph, cfg)
    programs = {
        v: CsspProgram(v, graph, set(), 2, forest_only=True,
                       active0=set(nodes), trace=False)
        for v in range(graph.n)
    }
    outputs, report = engine.run(programs)
    comp, parent, depth, size = {}, {}, {}, {}
    for v in nodes:
        c, p, d, s = outputs[v]
        comp[v], parent[v], depth[v], size[v] = c, p, d, s
    return ForestInfo(comp, parent, depth, size), report, engine


def cssp(graph, sources, *, config=None, trace=True):
    """Exact dist(S, v) for every node; lifts zero weights if present."""
    if not sources:
        raise ValueError("need at least one source")
    has_zero = any(w == 0 for (_, _, w) in graph.edges)
    work = lift_zero_weights(graph) if has_zero else graph
    D = pow2_at_least(max(1, work.n * work.max_weight))
    outputs, report, engine = run_thresholded_cssp(
        work, sources, D, config=config, trace=trace
    )
    if has_zero:
        outputs = {v: project_distance(d, graph.n) for v, d in outputs.items()}
    return outputs, report, engine
