"""Deterministic separated network decomposition and sparse cover construction.

The construction colors the graph in rounds of label-driven cluster growth:
per color, ceil(log2 n) phases split living nodes into blue and red by one
label bit; per step, unstopped blue clusters flood join proposals to hop
distance k, reached reds request to join the first-arriving proposal (ties
to the smallest cluster id), cluster roots count proposers over their
Steiner trees and either absorb them (the tree grows along the proposal
paths, proposers recolor blue) or reject them (the proposers die and the
cluster stops for the phase). Dead and already-colored nodes keep relaying
and remain as nonterminal tree nodes.

Sequencing is fully in-protocol: every sub-window is round arithmetic from
per-component counters, and step/phase/color transitions are decided by a
two-bit barrier aggregation over the component spanning tree. All nodes stay
awake (this is the synchronous, congestion-metered construction; the cover
consumers handle sleeping separately).

Cover mode appends one expansion wave per color, growing each cluster to its
d-neighborhood and recording the expanded trees.
"""

from __future__ import annotations

from .congest_cssp import boruvka_forest
from .engine import Engine, Message, MegaroundConfig, SimConfig, SimError, merge_reports
from .structures import ClusterData, Cover, Decomposition

PD_PROP = 20
PD_JOIN = 21
PD_CNT = 22
PD_DEC = 23
PD_RCNT = 24
PD_BUP = 25
PD_BDOWN = 26
PD_EXP = 27

V_STEP = 0
V_PHASE = 1
V_COLOR = 2
V_DONE = 3

DEC_GROW = 1
DEC_STOP = 0


def bits_for(n: int) -> int:
    return max(0, (max(1, n) - 1).bit_length())


class ConstructionError(SimError):
    """The construction exceeded its color or step budget (indicates a bug)."""


class _Role:
    """My position in one cluster's Steiner tree."""

    __slots__ = ("parent", "depth", "terminal", "color", "kids")

    def __init__(self, parent, depth, terminal, color):
        self.parent = parent
        self.depth = depth
        self.terminal = terminal
        self.color = color
        self.kids = []


class DecompProgram:
    """All-awake node program building one decomposition (plus cover)."""

    def __init__(self, node, graph, forest, k, *, expand_to=None, trace=True):
        self.node = node
        self.nbrs = [u for (u, _) in graph.neighbors(node)]
        self.n = graph.n
        self.k = k
        self.d = expand_to
        self.b = bits_for(graph.n)
        self.color_cap = max(1, 2 * bits_for(graph.n))
        self.step_cap = max(8, 10 * self.b * max(1, bits_for(graph.n)))
        self.do_trace = trace
        self.comp_size = forest.size[node]
        self.fparent = forest.parent[node]
        self.fdepth = forest.depth[node]
        self.fkids = forest.children()[node]
        # color-scoped state
        self.color = 0
        self.phase = 0
        self.steps_done = 0
        self.in_step = 0
        self.living = True
        self.dead = False
        self.label = node
        self.roles: dict[int, _Role] = {}
        self.root_size = 1
        self.root_stop = False
        self.stopped = False
        # results
        self.my_color = None
        self.my_cluster = None
        self.decomp_roles: list = []
        self.cover_roles: dict[int, _Role] = {}
        self.colors_used = 0
        # per-step wave state
        self.prop = None  # (label, hop, st, wave parent)
        self.cnt_kids: dict[int, list] = {}
        self.join_acc: dict[int, int] = {}
        self.bar_active = False
        self.bar_dead = False
        self._acc: dict[int, int] = {}
        self._plan: dict[int, list] = {}
        self._started = False

    # -- window arithmetic ----------------------------------------------------

    def _rho(self):
        return self.k * (self.steps_done + 1)

    # -- plumbing ---------------------------------------------------------------

    def _plan_at(self, api, r, action, *args):
        if r == api.round:
            getattr(self, action)(api, *args)
            return
        self._plan.setdefault(r, []).append((action, args))
        api.wake_at(r)

    def _pop_acc(self, label):
        return self._acc.pop(label, 0)

    def on_round(self, api):
        if not self._started:
            self._started = True
            api.always_awake()
            self._plan_at(api, 1, "_color_start")
        props = []
        for src, msg in api.inbox:
            if msg.tag == PD_PROP:
                props.append((msg.payload[0], src, msg.payload))
            elif msg.tag == PD_EXP:
                self._on_expand(api, src, msg.payload)
            else:
                self._dispatch(api, src, msg)
        if props and self.prop is None:
            props.sort()  # ties go to the smallest cluster id
            _, src, payload = props[0]
            self._on_prop(api, src, payload)
        for action, args in self._plan.pop(api.round, []):
            getattr(self, action)(api, *args)

    def _dispatch(self, api, src, msg):
        tag = msg.tag
        if tag == PD_JOIN:
            label, count = msg.payload
            self.join_acc[label] = self.join_acc.get(label, 0) + count
            self.cnt_kids.setdefault(label, []).append(src)
        elif tag in (PD_CNT, PD_RCNT):
            label, count = msg.payload
            self._acc[label] = self._acc.get(label, 0) + count
        elif tag == PD_DEC:
            self._on_dec(api, src, msg.payload)
        elif tag == PD_BUP:
            self.bar_active = self.bar_active or bool(msg.payload[0])
            self.bar_dead = self.bar_dead or bool(msg.payload[1])
        elif tag == PD_BDOWN:
            self._on_verdict(api, msg.payload[0])

    # -- color / phase / step sequencing ------------------------------------------

    def _color_start(self, api):
        if self.color >= self.color_cap:
            raise ConstructionError(
                f"color budget {self.color_cap} exhausted with living nodes"
            )
        self.living = self.my_color is None
        self.dead = False
        self.label = self.node
        self.roles = {}
        self.steps_done = 0
        self.phase = 0
        self.in_step = 0
        self.root_size = 1
        self.root_stop = False
        self._acc = {}
        if self.living:
            self.roles[self.node] = _Role(None, 0, True, self.color)
        self._prelude(api)

    def _prelude(self, api):
        """Phase start: recount terminals toward each tree root."""
        base = api.round
        if self.do_trace and self.living:
            api.trace("phase_node", color=self.color, phase=self.phase,
                      label=self.label)
        self.stopped = False
        self.root_stop = False
        rho = self._rho()
        for label in sorted(self.roles):
            role = self.roles[label]
            if role.parent is None:
                self._plan_at(api, base + rho + 2, "_recount_root", label)
            else:
                self._plan_at(api, base + 1 + (rho - role.depth), "_recount_up", label)
        self._plan_at(api, base + rho + 3, "_step_begin")

    def _recount_up(self, api, label):
        role = self.roles.get(label)
        if role is None or role.parent is None:
            return
        total = (1 if role.terminal else 0) + self._pop_acc(label)
        api.send(role.parent, Message(PD_RCNT, (label, total)))

    def _recount_root(self, api, label):
        role = self.roles.get(label)
        if role is None:
            return
        self.root_size = (1 if role.terminal else 0) + self._pop_acc(label)

    def _step_begin(self, api):
        self.in_step += 1
        if self.in_step > self.step_cap:
            raise ConstructionError("step budget exceeded within a phase")
        base = api.round
        self.prop = None
        self.cnt_kids = {}
        self.join_acc = {}
        self.bar_active = False
        self.bar_dead = False
        k, rho, S = self.k, self._rho(), self.comp_size
        t_join = base + k + 2
        t_cnt = t_join + k + 2
        t_dec = t_cnt + rho + 2
        t_bar = t_dec + rho + k + 3
        mine = self.roles.get(self.label)
        if (self.living and mine is not None and mine.terminal
                and self._is_blue(self.label) and not self.stopped):
            for u in self.nbrs:
                api.send(u, Message(PD_PROP, (self.label, 1, mine.depth + 1)))
        self._plan_at(api, t_join, "_join_phase", t_join)
        self._plan_at(api, t_cnt, "_count_phase", t_cnt)
        self._plan_at(api, t_bar, "_barrier", t_bar)

    def _is_blue(self, label):
        return ((label >> self.phase) & 1) == 0

    # -- proposal wave ----------------------------------------------------------------

    def _on_prop(self, api, src, payload):
        label, hop, st = payload
        if hop > self.k:
            return
        self.prop = (label, hop, st, src)
        if hop < self.k:
            fwd = self.roles[label].depth + 1 if label in self.roles else st + 1
            for u in self.nbrs:
                if u != src:
                    api.send(u, Message(PD_PROP, (label, hop + 1, fwd)))

    def _join_phase(self, api, t_join):
        if self.prop is None:
            return
        label, hop, st, parent = self.prop
        self._plan_at(api, t_join + (self.k - hop), "_join_up")

    def _wants_join(self):
        if self.prop is None:
            return False
        label = self.prop[0]
        return (self.living and not self._is_blue(self.label)
                and label not in self.roles)

    def _join_up(self, api):
        label, hop, st, parent = self.prop
        if label in self.roles:
            return  # counts feed the Steiner aggregation at this node
        if self._wants_join():
            suffix = (1 << self.phase) - 1
            assert (self.label ^ label) & suffix == 0, "cross-class proposal"
        total = (1 if self._wants_join() else 0) + self.join_acc.pop(label, 0)
        if total > 0:
            api.send(parent, Message(PD_JOIN, (label, total)))

    # -- counting and decisions ----------------------------------------------------------

    def _wave_feed(self, label):
        if label in self.roles:
            return self.join_acc.pop(label, 0)
        return 0

    def _count_phase(self, api, t_cnt):
        rho = self._rho()
        for label in sorted(self.roles):
            role = self.roles[label]
            if role.parent is None:
                self._plan_at(api, t_cnt + rho + 2, "_root_decide", label)
            else:
                self._plan_at(api, t_cnt + 1 + (rho - role.depth), "_count_up", label)

    def _count_up(self, api, label):
        role = self.roles.get(label)
        if role is None or role.parent is None:
            return
        total = self._wave_feed(label) + self._pop_acc(label)
        api.send(role.parent, Message(PD_CNT, (label, total)))

    def _root_decide(self, api, label):
        role = self.roles.get(label)
        if role is None:
            return
        count = self._wave_feed(label) + self._pop_acc(label)
        if not self._is_blue(label) or self.root_stop:
            return
        grow = count > 0 and 2 * self.b * count > self.root_size
        if grow:
            self.root_size += count
        else:
            self.root_stop = True
            if self.label == label:
                self.stopped = True
        self._handle_dec(api, label, DEC_GROW if grow else DEC_STOP)

    def _on_dec(self, api, src, payload):
        label, verdict = payload
        role = self.roles.get(label)
        from_tree = role is not None and role.parent == src
        from_wave = (self.prop is not None and self.prop[0] == label
                     and self.prop[3] == src)
        if not (from_tree or from_wave):
            return
        self._handle_dec(api, label, verdict)

    def _handle_dec(self, api, label, verdict):
        """Relay a decision down tree and wave, and apply it locally."""
        role = self.roles.get(label)
        if role is not None:
            for c in role.kids:
                api.send(c, Message(PD_DEC, (label, verdict)))
        wave_kids = self.cnt_kids.pop(label, [])
        for c in wave_kids:
            api.send(c, Message(PD_DEC, (label, verdict)))
        if role is not None:
            if verdict == DEC_GROW:
                role.kids.extend(c for c in wave_kids if c not in role.kids)
            elif self.label == label:
                self.stopped = True
            return
        if self.prop is None or self.prop[0] != label:
            return
        _, hop, st, parent = self.prop
        joined = self._wants_join()
        if verdict == DEC_GROW:
            if joined or wave_kids:
                new = _Role(parent, st, joined, self.color)
                new.kids.extend(wave_kids)
                self.roles[label] = new
            if joined:
                old = self.roles.get(self.label)
                if old is not None and self.label != label:
                    old.terminal = False
                self.label = label
                self.stopped = False
        elif joined:
            self.living = False
            self.dead = True
            old = self.roles.get(self.label)
            if old is not None:
                old.terminal = False
            if self.do_trace:
                api.trace("killed", color=self.color, phase=self.phase,
                          label=self.label)

    # -- barrier -------------------------------------------------------------------------

    def _barrier(self, api, t_bar):
        S = self.comp_size
        root_role = self.roles.get(self.node)
        if (root_role is not None and root_role.parent is None
                and self._is_blue(self.node) and not self.root_stop
                and self.root_size > 0):
            self.bar_active = True
        self.bar_dead = self.bar_dead or self.dead
        if self.fparent is not None:
            self._plan_at(api, t_bar + (S - self.fdepth), "_bar_up")
        else:
            self._plan_at(api, t_bar + S + 1, "_bar_root")

    def _bar_up(self, api):
        api.send(self.fparent, Message(
            PD_BUP, (1 if self.bar_active else 0, 1 if self.bar_dead else 0)))

    def _bar_root(self, api):
        if self.bar_active:
            verdict = V_STEP
        elif self.phase + 1 < self.b:
            verdict = V_PHASE
        elif self.bar_dead:
            verdict = V_COLOR
        else:
            verdict = V_DONE
        self._on_verdict(api, verdict)

    def _on_verdict(self, api, verdict):
        for c in self.fkids:
            api.send(c, Message(PD_BDOWN, (verdict,)))
        end = api.round + (self.comp_size - self.fdepth) + 2
        self.steps_done += 1
        if verdict == V_STEP:
            self._plan_at(api, end, "_step_begin")
        elif verdict == V_PHASE:
            self.phase += 1
            self.in_step = 0
            self._plan_at(api, end, "_prelude")
        elif verdict == V_COLOR:
            self._archive_color(api)
            self.color += 1
            self._plan_at(api, end, "_color_start")
        else:
            self._archive_color(api)
            self.colors_used = self.color + 1
            if self.d is None:
                self._finish(api)
            else:
                self._plan_at(api, end, "_expand_start")

    def _archive_color(self, api):
        if self.living and self.my_color is None:
            self.my_color = self.color
            self.my_cluster = self.label
        for label, role in sorted(self.roles.items()):
            self.decomp_roles.append(
                (role.color, label, role.parent, role.depth, role.terminal))

    # -- cover expansion ---------------------------------------------------------------------

    def _expand_start(self, api):
        base = api.round
        self.cover_roles = {}
        for color, label, parent, depth, terminal in self.decomp_roles:
            self.cover_roles[(color, label)] = _Role(parent, depth, terminal, color)
        for c in range(self.colors_used):
            self._plan_at(api, base + c * (self.d + 3), "_expand_wave", c)
        self._plan_at(api, base + self.colors_used * (self.d + 3) + 1, "_finish")

    def _expand_wave(self, api, c):
        if self.my_color != c:
            return
        role = self.cover_roles.get((c, self.my_cluster))
        if role is not None and role.terminal:
            for u in self.nbrs:
                api.send(u, Message(PD_EXP, (self.my_cluster, 1, role.depth + 1, c)))

    def _on_expand(self, api, src, payload):
        label, hop, st, c = payload
        if hop > self.d:
            return
        role = self.cover_roles.get((c, label))
        if role is not None:
            if role.terminal:
                return  # wave already seen here
            role.terminal = True
            fwd = role.depth + 1
        else:
            self.cover_roles[(c, label)] = _Role(src, st, True, c)
            fwd = st + 1
        if hop < self.d:
            for u in self.nbrs:
                if u != src:
                    api.send(u, Message(PD_EXP, (label, hop + 1, fwd, c)))

    def _finish(self, api):
        cover = [
            (color, label, r.parent, r.depth, r.terminal)
            for (color, label), r in sorted(self.cover_roles.items())
        ]
        api.finish({
            "color": self.my_color,
            "cluster": self.my_cluster,
            "decomp": sorted(self.decomp_roles),
            "cover": cover,
        })


def _assemble(outputs, id_base, key, level=0):
    clusters = {}
    node_color = {}
    for v in sorted(outputs):
        out = outputs[v]
        if out is None:
            continue
        if out["color"] is not None:
            node_color[v] = out["color"]
        for color, label, parent, depth, terminal in out[key]:
            cid = color * id_base + label
            cl = clusters.get(cid)
            if cl is None:
                cl = clusters[cid] = ClusterData(
                    id=cid, members=set(), tree={}, level=level)
            cl.tree[v] = (parent, depth, terminal)
            if terminal:
                cl.members.add(v)
    return {cid: cl for cid, cl in clusters.items() if cl.members}, node_color


def decomp_config(n):
    return SimConfig(
        round_limit=200_000_000,
        megaround=MegaroundConfig(width=max(4, 2 * bits_for(n) + 2)),
    )


def build_decomposition(graph, k, *, config=None, trace=True, expand_to=None,
                        level=0):
    """k-separated weak-diameter decomposition (optionally expanded into a
    sparse cover when expand_to=d is given). Returns
    (Decomposition, Cover | None, report, trace_log)."""
    unit = graph.reweighted(lambda w: 1)
    forest, rep0, _ = boruvka_forest(unit)
    cfg = config or decomp_config(graph.n)
    engine = Engine(unit, cfg)
    programs = {
        v: DecompProgram(v, unit, forest, k, expand_to=expand_to, trace=trace)
        for v in range(graph.n)
    }
    outputs, rep1 = engine.run(programs)
    if rep1.status != "done":
        raise ConstructionError(f"decomposition run ended with {rep1.status}")
    id_base = graph.n
    dclusters, node_color = _assemble(outputs, id_base, "decomp", level)
    ncolors = 1 + max(node_color.values(), default=0)
    colors = [[] for _ in range(ncolors)]
    for cid, cl in sorted(dclusters.items()):
        colors[cid // id_base].append(cl)
    decomp = Decomposition(separation=k, colors=colors, node_color=node_color)
    cover = None
    if expand_to is not None:
        cclusters, _ = _assemble(outputs, id_base, "cover", level)
        cover = Cover(scale=expand_to, clusters=[
            cl for _, cl in sorted(cclusters.items())])
    report = merge_reports([rep0, rep1])
    return decomp, cover, report, engine.trace_log


def build_cover_sync(graph, d, *, config=None, trace=True, level=0):
    """Sparse d-cover via a (2d+1)-separated decomposition plus expansion."""
    decomp, cover, report, tlog = build_decomposition(
        graph, 2 * d + 1, config=config, trace=trace, expand_to=d, level=level)
    return cover, decomp, report, tlog
