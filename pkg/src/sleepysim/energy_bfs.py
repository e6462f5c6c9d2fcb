"""Energy-efficient breadth-first search over a layered sparse cover.

Every cluster runs a convergecast/broadcast pipeline on its Steiner tree
with period equal to its cover scale: a member at depth dep wakes at rounds
congruent to {p-dep-1, p-dep} (upward slots) and {dep, dep+1} (downward
slots) modulo p, so one full sweep climbs or descends the tree within one
period plus its depth. The BFS frontier advances one hop every sigma rounds;
clusters activate their children when told they have been reached, and
deactivate once every member knows it (level-0 clusters additionally wait
until all their members are reached). Inactive nodes are asleep; the
frontier must only ever arrive at awake nodes, and lost frontier messages
are logged so the sleep-safety check can separate harmless duplicates from
real violations.

Construction of the cover stack itself reuses the synchronous builder (all
participants awake and charged accordingly); this module adds the layering,
parent links, global-cluster detection, and the sleeping BFS phase.
"""

from __future__ import annotations

from math import inf

from .engine import Engine, Message, MegaroundConfig, SimConfig, merge_reports
from .netdecomp import ConstructionError, bits_for, build_cover_sync
from .structures import LayeredCover

INF = inf

EB_CONV = 40  # (level, cid, contains_src, reached_any, all_done)
EB_BCAST = 41  # (level, cid, contains_src, reached, deact)
EB_REACH = 42  # (hop,)
DG_LIST = 43
DG_CONV = 44
DG_BCAST = 45


def next_slot(anchor: int, period: int, residue: int, after: int) -> int:
    """Smallest round > after congruent to residue mod period."""
    base = after + 1
    return base + ((residue - (base - anchor)) % period)


class _RoleRt:
    """Per-node runtime state for one cluster membership."""

    __slots__ = (
        "level", "cid", "parent", "kids", "depth", "terminal", "period",
        "parent_key", "reported", "kid_flags", "sent", "bcast_seen",
        "init_done", "parent_init_done", "active", "sched", "init_sched",
        "done",
    )

    def __init__(self, level, cid, parent, kids, depth, terminal, period,
                 parent_key):
        self.level = level
        self.cid = cid
        self.parent = parent
        self.kids = list(kids)
        self.depth = depth
        self.terminal = terminal
        self.period = period
        self.parent_key = parent_key
        self.reported = set()
        self.kid_flags = {}
        self.sent = None
        self.bcast_seen = (0, 0, 0)
        self.init_done = False
        self.parent_init_done = parent_key is None
        self.active = False
        self.sched = None
        self.init_sched = None
        self.done = False

    def residues(self):
        p, dep = self.period, self.depth % self.period
        return {(p - dep - 1) % p, (p - dep) % p, dep, (dep + 1) % p}

    def conv_send_residue(self):
        return (self.period - (self.depth % self.period)) % self.period

    def bcast_send_residue(self):
        return (self.depth + 1) % self.period


class BfsParams:
    """Run-wide schedule constants derived from the measured cover stack."""

    __slots__ = ("anchor", "t0", "sigma", "hop_cap", "t_end")

    def __init__(self, anchor, t0, sigma, hop_cap, t_end):
        self.anchor = anchor
        self.t0 = t0
        self.sigma = sigma
        self.hop_cap = hop_cap
        self.t_end = t_end


class EnergyBfsProgram:
    """Sleeping-model node program for cover-driven thresholded BFS."""

    def __init__(self, node, graph, roles, is_source, params, trace=True):
        self.node = node
        self.nbrs = [u for (u, _) in graph.neighbors(node)]
        self.roles = roles  # dict (level, cid) -> _RoleRt
        self.is_source = is_source
        self.p = params
        self.do_trace = trace
        self.reached_hop = None
        self.sent_reach = False
        self._plan = {}
        self._started = False

    # -- schedule plumbing -----------------------------------------------------

    def _plan_at(self, api, r, action, *args):
        if r <= api.round:
            getattr(self, action)(api, *args)
            return
        bucket = self._plan.setdefault(r, [])
        item = (action, args)
        if item not in bucket:
            bucket.append(item)
            api.wake_at(r)

    def on_round(self, api):
        if not self._started:
            self._started = True
            self._boot(api)
        for src, msg in api.inbox:
            self._dispatch(api, src, msg)
        for action, args in self._plan.pop(api.round, []):
            getattr(self, action)(api, *args)

    def _boot(self, api):
        for key in sorted(self.roles):
            rt = self.roles[key]
            rt.init_sched = api.awake_periodic(
                self.p.anchor, rt.period, rt.residues(), api.round, self.p.t_end)
            self._maybe_conv(api, rt)
        self._plan_at(api, self.p.t0, "_bfs_start")
        self._plan_at(api, self.p.t_end, "_wrap_up")

    # -- pipeline aggregation -----------------------------------------------------

    def _flags_self(self, rt):
        cs = 1 if (rt.terminal and self.is_source) else 0
        ra = 1 if (rt.terminal and self.reached_hop is not None) else 0
        if not rt.terminal:
            ad = 1
        else:
            know = rt.bcast_seen[1] == 1
            if rt.level == 0:
                ad = 1 if (know and self.reached_hop is not None) else 0
            else:
                ad = 1 if know else 0
        return cs, ra, ad

    def _aggregate(self, rt):
        cs, ra, ad = self._flags_self(rt)
        for kid in rt.kids:
            kcs, kra, kad = rt.kid_flags.get(kid, (0, 0, 0))
            cs |= kcs
            ra |= kra
            ad &= kad
        if len(rt.reported) < len(rt.kids):
            ad = 0
        return cs, ra, ad

    def _maybe_conv(self, api, rt):
        if rt.done:
            return
        if rt.sent is None and len(rt.reported) < len(rt.kids):
            return  # first report waits for the whole subtree
        agg = self._aggregate(rt)
        if rt.parent is None:
            self._root_progress(api, rt, agg)
            return
        if agg == rt.sent:
            return
        slot = next_slot(self.p.anchor, rt.period, rt.conv_send_residue(),
                         api.round - 1)
        self._plan_at(api, slot, "_conv_send", rt.level, rt.cid)

    def _conv_send(self, api, level, cid):
        rt = self.roles.get((level, cid))
        if rt is None or rt.done or rt.parent is None:
            return
        agg = self._aggregate(rt)
        if agg == rt.sent:
            return
        rt.sent = agg
        api.send(rt.parent, Message(EB_CONV, (level, cid) + agg), critical=True)

    def _root_progress(self, api, rt, agg):
        cs, ra, ad = agg
        old = rt.bcast_seen
        val = (max(old[0], cs), max(old[1], ra),
               1 if ((old[1] or ra) and ad) else old[2])
        first = not rt.init_done
        if first:
            rt.init_done = True
        if val != old or first:
            self._apply_bcast(api, rt, val)
            slot = next_slot(self.p.anchor, rt.period, rt.bcast_send_residue(),
                             api.round - 1)
            self._plan_at(api, slot, "_bcast_send", rt.level, rt.cid)

    def _bcast_send(self, api, level, cid):
        rt = self.roles.get((level, cid))
        if rt is None:
            return
        for kid in rt.kids:
            api.send(kid, Message(EB_BCAST, (level, cid) + rt.bcast_seen),
                     critical=True)

    def _dispatch(self, api, src, msg):
        if msg.tag == EB_CONV:
            level, cid, cs, ra, ad = msg.payload
            rt = self.roles.get((level, cid))
            if rt is None or rt.done:
                return
            rt.reported.add(src)
            rt.kid_flags[src] = (cs, ra, ad)
            self._maybe_conv(api, rt)
        elif msg.tag == EB_BCAST:
            level, cid, cs, ra, de = msg.payload
            rt = self.roles.get((level, cid))
            if rt is None or rt.done:
                return
            self._apply_bcast(api, rt, (cs, ra, de))
            slot = next_slot(self.p.anchor, rt.period, rt.bcast_send_residue(),
                             api.round - 1)
            self._plan_at(api, slot, "_bcast_send", level, cid)
        elif msg.tag == EB_REACH:
            self._on_reach(api, msg.payload[0])

    def _apply_bcast(self, api, rt, val):
        cs, ra, de = val
        old = rt.bcast_seen
        rt.bcast_seen = (max(old[0], cs), max(old[1], ra), max(old[2], de))
        if not rt.init_done:
            rt.init_done = True
            self._maybe_retire_init(api, rt)
        for ckey in sorted(self.roles):
            child = self.roles[ckey]
            if child.parent_key == (rt.level, rt.cid):
                if not child.parent_init_done:
                    child.parent_init_done = True
                    self._maybe_retire_init(api, child)
                if rt.bcast_seen[0] or rt.bcast_seen[1]:
                    self._activate(api, child)
        if rt.parent_key is None and cs:
            self._activate(api, rt)
        if ra and not old[1]:
            self._conv_refresh(api)
        if de and not rt.done:
            rt.done = True
            if rt.sched is not None:
                grace = api.round + 2 * (rt.period + rt.depth) + 4
                api.stop_awake(rt.sched, grace)

    def _maybe_retire_init(self, api, rt):
        """Sleep the initialization schedule once both this cluster's and its
        parent's init broadcasts have settled and no activation took over."""
        if rt.init_sched is None or not (rt.init_done and rt.parent_init_done):
            return
        if rt.active:
            grace = api.round
        else:
            grace = api.round + 2 * (rt.period + rt.depth) + 4
        api.stop_awake(rt.init_sched, grace)
        rt.init_sched = None

    def _activate(self, api, rt):
        if rt.active:
            return
        rt.active = True
        rt.sched = api.awake_periodic(
            self.p.anchor, rt.period, rt.residues(), api.round, self.p.t_end)
        if rt.init_sched is not None and rt.init_done and rt.parent_init_done:
            api.stop_awake(rt.init_sched, api.round)
            rt.init_sched = None
        if self.do_trace:
            api.trace("ebfs_active", level=rt.level, cid=rt.cid)

    def _conv_refresh(self, api):
        for key in sorted(self.roles):
            self._maybe_conv(api, self.roles[key])

    # -- the BFS itself --------------------------------------------------------------

    def _bfs_start(self, api):
        if self.is_source:
            self.reached_hop = 0
            if self.do_trace:
                api.trace("ebfs_reached", hop=0)
            self._conv_refresh(api)
            self._schedule_reach(api)

    def _schedule_reach(self, api):
        if self.sent_reach or self.reached_hop is None:
            return
        nxt = self.reached_hop + 1
        if nxt > self.p.hop_cap:
            return
        send_round = self.p.t0 + nxt * self.p.sigma
        if send_round >= self.p.t_end:
            return
        self.sent_reach = True
        self._plan_at(api, send_round, "_reach_send")

    def _reach_send(self, api):
        hop = self.reached_hop + 1
        for u in self.nbrs:
            api.send(u, Message(EB_REACH, (hop,)))

    def _on_reach(self, api, hop):
        if self.reached_hop is not None:
            return
        self.reached_hop = hop
        if self.do_trace:
            api.trace("ebfs_reached", hop=hop)
        self._conv_refresh(api)
        self._schedule_reach(api)

    def _wrap_up(self, api):
        api.finish(self.reached_hop if self.reached_hop is not None else INF)


# -- layering harness -------------------------------------------------------------------


def _decomp_cluster_of(decomp, node):
    color = decomp.node_color.get(node)
    if color is None:
        return None
    for cl in decomp.colors[color]:
        if node in cl.members:
            return cl.id
    return None


def assign_parents(graph, layered, level, decomp_hi):
    """Parent of every level-(level) cluster: the expanded cluster of the next
    cover that the root of its Steiner tree was clustered into."""
    lo = layered.levels[level]
    hi = layered.levels[level + 1]
    hi_ids = {cl.id for cl in hi.clusters}
    hi_nodes = {cl.id: set(cl.members) | set(cl.tree) for cl in hi.clusters}
    for cl in lo.clusters:
        root = cl.root
        pid = _decomp_cluster_of(decomp_hi, root)
        if pid is None or pid not in hi_ids:
            raise ConstructionError(
                f"level {level} cluster {cl.id}: root {root} has no parent cluster"
            )
        missing = set(cl.tree) - hi_nodes[pid]
        if missing:
            raise ConstructionError(
                f"level {level} cluster {cl.id}: parent {pid} misses "
                f"{len(missing)} tree nodes"
            )
        layered.parent_of[(level, cl.id)] = pid


def choose_base(stretch: int, requested=None) -> int:
    """Smallest power of two >= 2*stretch (or the requested override)."""
    if requested is not None:
        return requested
    b = 2
    while b < 2 * stretch:
        b <<= 1
    return b


def build_cover_next(graph, layered, *, config=None, trace=True):
    """Construct the next-scale cover and link the previous level into it."""
    level = layered.top
    B = layered.base
    scale = B ** (level + 1)
    cover, decomp, rep, tl = build_cover_sync(
        graph, scale, config=config, trace=trace, level=level + 1)
    stretch = cover.measured_stretch()
    if 2 * stretch > B and len(cover.clusters) > 1:
        raise ConstructionError(
            f"cover at scale {scale} has stretch {stretch} > base/2 = {B // 2}"
        )
    layered.levels.append(cover)
    assign_parents(graph, layered, level, decomp)
    return cover, decomp, rep, tl


def bootstrap_base_covers(graph, *, base=None, config=None, trace=True):
    """All-awake construction of the scale-1 and scale-B covers plus links."""
    cover0, decomp0, rep0, tl0 = build_cover_sync(graph, 1, config=config,
                                                  trace=trace, level=0)
    B = choose_base(cover0.measured_stretch(), base)
    cover1, decomp1, rep1, tl1 = build_cover_sync(graph, B, config=config,
                                                  trace=trace, level=1)
    stretch1 = cover1.measured_stretch()
    reports = [rep0, rep1]
    if base is None:
        B2 = choose_base(max(cover0.measured_stretch(), stretch1))
        if B2 != B:
            cover1, decomp1, rep1b, tl1 = build_cover_sync(
                graph, B2, config=config, trace=trace, level=1)
            reports.append(rep1b)
            B = B2
    layered = LayeredCover(base=B, levels=[cover0, cover1])
    assign_parents(graph, layered, 0, decomp1)
    return layered, [decomp0, decomp1], merge_reports(reports), [tl0, tl1]


class DetectProgram:
    """All-awake detection of a cluster containing its whole component."""

    def __init__(self, node, graph, roles, window):
        self.node = node
        self.nbrs = [u for (u, _) in graph.neighbors(node)]
        self.roles = roles
        self.window = window
        self.nbr_lists = {u: set() for u in self.nbrs}
        self.answer = {}
        self._acc = {}
        self._plan = {}
        self._started = False

    def _plan_at(self, api, r, action, *args):
        if r <= api.round:
            getattr(self, action)(api, *args)
            return
        self._plan.setdefault(r, []).append((action, args))
        api.wake_at(r)

    def on_round(self, api):
        if not self._started:
            self._started = True
            api.always_awake()
            mine = sorted(cid for (_, cid), rt in self.roles.items() if rt.terminal)
            for i, cid in enumerate(mine):
                self._plan_at(api, api.round + i + 1, "_tell", cid)
            self._plan_at(api, api.round + self.window, "_local_check")
        for src, msg in api.inbox:
            self._dispatch(api, src, msg)
        for action, args in self._plan.pop(api.round, []):
            getattr(self, action)(api, *args)

    def _tell(self, api, cid):
        for u in self.nbrs:
            api.send(u, Message(DG_LIST, (cid,)))

    def _dispatch(self, api, src, msg):
        if msg.tag == DG_LIST:
            self.nbr_lists[src].add(msg.payload[0])
        elif msg.tag == DG_CONV:
            level, cid, flag = msg.payload
            key = (level, cid)
            self._acc[key] = self._acc.get(key, 1) & flag
        elif msg.tag == DG_BCAST:
            level, cid, flag = msg.payload
            rt = self.roles.get((level, cid))
            if rt is not None and (level, cid) not in self.answer:
                self.answer[(level, cid)] = bool(flag)
                for kid in rt.kids:
                    api.send(kid, Message(DG_BCAST, (level, cid, flag)))

    def _local_check(self, api):
        base = api.round
        depth_cap = max((rt.depth for rt in self.roles.values()), default=0)
        cap = depth_cap + 2
        for key in sorted(self.roles):
            rt = self.roles[key]
            if rt.terminal:
                ok = all(rt.cid in self.nbr_lists[u] for u in self.nbrs)
            else:
                ok = True
            self._acc[key] = self._acc.get(key, 1) & (1 if ok else 0)
            if rt.parent is None:
                self._plan_at(api, base + cap + 1, "_root", key)
            else:
                self._plan_at(api, base + 1 + (cap - rt.depth), "_up", key)
        self._plan_at(api, base + 2 * (cap + 2), "_done")

    def _up(self, api, key):
        rt = self.roles[key]
        flag = self._acc.get(key, 1)
        api.send(rt.parent, Message(DG_CONV, key + (flag,)))

    def _root(self, api, key):
        rt = self.roles[key]
        flag = self._acc.get(key, 1)
        self.answer[key] = bool(flag)
        for kid in rt.kids:
            api.send(kid, Message(DG_BCAST, key + (flag,)))

    def _done(self, api):
        api.finish({f"{k[0]}:{k[1]}": v for k, v in sorted(self.answer.items())})


class PipelineProbe:
    """Standalone convergecast/broadcast pipeline on one cluster tree.

    Members wake two rounds per period for each direction; a raised predicate
    bit climbs to the root (OR) and the root's announcement descends. Used to
    exercise the pipeline primitive and its latency bounds on its own."""

    def __init__(self, node, rt, flag_at, horizon, anchor=1):
        self.node = node
        self.rt = rt
        self.flag_at = flag_at  # round at which this node raises its bit
        self.horizon = horizon
        self.anchor = anchor
        self.flag = False
        self.sent = 0
        self.kid_bits = {}
        self.root_knows = None
        self.know = None
        self._plan = {}
        self._started = False

    def _plan_at(self, api, r, action):
        if r <= api.round:
            getattr(self, action)(api)
            return
        bucket = self._plan.setdefault(r, [])
        if action not in bucket:
            bucket.append(action)
            api.wake_at(r)

    def on_round(self, api):
        rt = self.rt
        if not self._started:
            self._started = True
            if rt is not None:
                api.awake_periodic(self.anchor, rt.period, rt.residues(),
                                   0, self.horizon)
                if self.flag_at is not None:
                    self._plan_at(api, self.flag_at, "_raise")
            self._plan_at(api, self.horizon, "_wrap")
        for src, msg in api.inbox:
            if msg.tag == 1:
                self.kid_bits[src] = msg.payload[0]
                self._nudge(api)
            elif self.know is None:
                self.know = api.round
                self._plan_at(api, next_slot(
                    self.anchor, rt.period, rt.bcast_send_residue(),
                    api.round - 1), "_down")
        for action in self._plan.pop(api.round, []):
            getattr(self, action)(api)

    def _raise(self, api):
        self.flag = True
        self._nudge(api)

    def _nudge(self, api):
        rt = self.rt
        agg = int(self.flag or any(self.kid_bits.values()))
        if agg <= self.sent:
            return
        if rt.parent is None:
            if self.root_knows is None:
                self.root_knows = api.round
                self.know = api.round
                self.sent = agg
                self._plan_at(api, next_slot(
                    self.anchor, rt.period, rt.bcast_send_residue(),
                    api.round - 1), "_down")
            return
        self._plan_at(api, next_slot(
            self.anchor, rt.period, rt.conv_send_residue(), api.round - 1),
            "_up")

    def _up(self, api):
        rt = self.rt
        agg = int(self.flag or any(self.kid_bits.values()))
        if agg > self.sent:
            self.sent = agg
            api.send(rt.parent, Message(1, (agg,)), critical=True)

    def _down(self, api):
        for kid in self.rt.kids:
            api.send(kid, Message(2, (1,)), critical=True)

    def _wrap(self, api):
        api.finish((self.root_knows, self.know))


def tree_pipeline_run(graph, cluster, period, flag_rounds, c_pipe=3):
    """Run one cluster's pipeline alone: nodes in `flag_rounds` raise a bit at
    the given round; returns (root_detect_round, know_rounds, report)."""
    kids = {v: [] for v in cluster.tree}
    for v, (p, _, _) in cluster.tree.items():
        if p is not None:
            kids[p].append(v)
    depth = cluster.depth()
    horizon = max(flag_rounds.values(), default=1) + 3 * c_pipe * (depth + period) + 8
    roles = {}
    for v, (p, dep, term) in cluster.tree.items():
        roles[v] = _RoleRt(0, cluster.id, p, sorted(kids[v]), dep, term,
                           period, None)
    programs = {
        v: PipelineProbe(v, roles.get(v), flag_rounds.get(v), horizon)
        for v in range(graph.n)
    }
    engine = Engine(graph, SimConfig(round_limit=horizon + 8))
    outputs, report = engine.run(programs)
    root = cluster.root
    root_detect = outputs[root][0]
    know = {v: outputs[v][1] for v in cluster.tree}
    return root_detect, know, report


def _roles_for(graph, layered, top_level):
    """Per-node runtime roles for levels 0..top_level, with children lists."""
    roles = {v: {} for v in range(graph.n)}
    for lvl in range(top_level + 1):
        cover = layered.levels[lvl]
        period = max(1, layered.base**lvl)
        for cl in cover.clusters:
            kids = {v: [] for v in cl.tree}
            for v, (p, _, _) in cl.tree.items():
                if p is not None:
                    kids[p].append(v)
            pkey = None
            pid = layered.parent_of.get((lvl, cl.id))
            if pid is not None and lvl + 1 <= top_level:
                pkey = (lvl + 1, pid)
            for v, (p, dep, term) in cl.tree.items():
                roles[v][(lvl, cl.id)] = _RoleRt(
                    lvl, cl.id, p, sorted(kids[v]), dep, term, period, pkey)
    return roles


def detect_global_cluster(graph, cover):
    """All-awake containment detection; returns (stop flag, report). The stop
    flag is set when in every component some cluster spans it (so every node
    belongs to a spanning cluster)."""
    probe = LayeredCover(base=2, levels=[cover])
    roles_by_node = _roles_for(graph, probe, 0)
    memberships = max((len(r) for r in roles_by_node.values()), default=1)
    window = max(bits_for(graph.n), memberships) + 2
    cfg = SimConfig(
        round_limit=10_000_000,
        megaround=MegaroundConfig(width=max(4, memberships + 2)),
    )
    engine = Engine(graph, cfg)
    programs = {
        v: DetectProgram(v, graph, roles_by_node[v], window)
        for v in range(graph.n)
    }
    outputs, report = engine.run(programs)
    spanning = set()
    for v, ans in sorted(outputs.items()):
        for key, flag in ans.items():
            if flag:
                spanning.add(key)
    if not spanning:
        return False, report
    for v in range(graph.n):
        keys = {f"{lvl}:{cid}" for (lvl, cid) in roles_by_node[v]}
        if not keys & spanning:
            return False, report
    return True, report


def bfs_schedule(graph, layered, top_level, hop_cap, c_pipe=3):
    """Derive anchor, start round, cadence, and end round from measured trees."""
    B = layered.base
    max_depth = 0
    max_period = 1
    sigma = 4
    for lvl in range(top_level + 1):
        d = layered.max_tree_depth(lvl)
        p = max(1, B**lvl)
        max_depth = max(max_depth, d)
        max_period = max(max_period, p)
        if lvl >= 1:
            need = (c_pipe * (d + p) // max(1, p // 2)) + 1
            sigma = max(sigma, need)
    init_len = 4 * (max_depth + max_period) + 32
    anchor = 1
    t0 = anchor + init_len
    drain = 4 * (max_depth + max_period) + 32
    t_end = t0 + (hop_cap + 1) * sigma + drain
    return BfsParams(anchor, t0, sigma, hop_cap, t_end)


def run_thresholded_bfs_with_cover(graph, layered, sources, threshold, *,
                                   top_level=None, c_pipe=3, trace=True,
                                   config=None):
    """The sleeping-model BFS phase given a layered cover; returns
    (hop outputs, report, engine)."""
    if top_level is None:
        top_level = layered.top
    params = bfs_schedule(graph, layered, top_level, threshold, c_pipe)
    roles = _roles_for(graph, layered, top_level)
    width = layered.max_edge_multiplicity() + 2
    cfg = config or SimConfig(
        round_limit=params.t_end + 8,
        megaround=MegaroundConfig(width=width),
        watch_tags=frozenset({EB_REACH}),
    )
    engine = Engine(graph, cfg)
    src = set(sources)
    programs = {
        v: EnergyBfsProgram(v, graph, roles[v], v in src, params, trace=trace)
        for v in range(graph.n)
    }
    outputs, report = engine.run(programs)
    return outputs, report, engine


def full_bfs(graph, sources, *, base=None, c_pipe=3, trace=True, layered=None):
    """Exact hop distances from the source set with time/energy metering.

    Builds the cover stack level by level until some cluster spans every
    component, then runs the pipelined BFS. A prebuilt layered cover may be
    passed to skip construction (the cover cache path)."""
    reports = []
    decomps = []
    tlogs = []
    if layered is None:
        layered, decomps, reports, tlogs = _grow_until_global(
            graph, base=base, trace=trace)
    top = layered.top
    hop_cap = 2 * max(layered.max_tree_depth(lvl) for lvl in range(top + 1)) + 2
    outputs, rep, engine = run_thresholded_bfs_with_cover(
        graph, layered, sources, hop_cap, top_level=top, c_pipe=c_pipe,
        trace=trace)
    reports.append(rep)
    return outputs, merge_reports(reports), engine, layered, decomps, tlogs


def _grow_until_global(graph, *, base, trace):
    layered, decomps, rep_boot, tlogs = bootstrap_base_covers(
        graph, base=base, trace=trace)
    reports = [rep_boot]
    level = 0
    while True:
        spans, rep_d = detect_global_cluster(graph, layered.levels[level])
        reports.append(rep_d)
        if spans:
            break
        if level + 1 > layered.top:
            cover, decomp, rep, tl = build_cover_next(graph, layered, trace=trace)
            reports.append(rep)
            decomps.append(decomp)
            tlogs.append(tl)
        level += 1
    return layered, decomps, reports, tlogs


def thresholded_bfs(graph, sources, threshold, *, base=None, c_pipe=3,
                    trace=True, layered=None):
    """Thresholded hop distances built from scratch: cover construction stops
    at the level whose scale reaches 2*threshold (or earlier with a spanning
    cluster)."""
    reports = []
    decomps = []
    tlogs = []
    if layered is None:
        layered, decomps, rep_boot, tlogs = bootstrap_base_covers(
            graph, base=base, trace=trace)
        reports.append(rep_boot)
        while layered.base**layered.top < 2 * threshold:
            spans, rep_d = detect_global_cluster(graph, layered.levels[layered.top])
            reports.append(rep_d)
            if spans:
                break
            cover, decomp, rep, tl = build_cover_next(graph, layered, trace=trace)
            reports.append(rep)
            decomps.append(decomp)
            tlogs.append(tl)
    outputs, rep, engine = run_thresholded_bfs_with_cover(
        graph, layered, sources, threshold, top_level=layered.top,
        c_pipe=c_pipe, trace=trace)
    reports.append(rep)
    return outputs, merge_reports(reports), engine, layered, decomps, tlogs
