"""Deterministic round-synchronous execution engine.

Semantics: computation and communication happen in lock-step rounds. A node
that is awake in round r receives every message sent to it in round r and may
act on them at its next awake round (>= r+1). A sleeping node performs no
computation; messages addressed to it are dropped and counted as lost.

The implementation is event-driven: rounds in which nothing happens are
skipped outright, so wall-clock cost scales with messages and program steps,
not with the round counter. Awake time is declared through schedule
components (spans and periodic patterns), which lets listening-only rounds
be charged for energy without executing any code.

Megarounds: with width k, every logical round of the loop stands for k
physical rounds. A node awake in a logical round is charged k physical
rounds, and may send up to k messages per neighbor in it.
"""

from __future__ import annotations

import heapq
import json
from dataclasses import dataclass, field


class SimError(RuntimeError):
    """Hard simulation failure (bit budget, oversubscription, protocol)."""


class ProtocolViolation(SimError):
    """A message marked protocol-critical was sent to a sleeping node."""


def int_bits(v: int) -> int:
    """Charged bits for a nonnegative integer: ceil(log2(v+2))."""
    if v < 0:
        raise SimError(f"negative wire integer {v}")
    return (v + 1).bit_length()


def bit_budget(n: int, max_w: int, c_msg: int = 8) -> int:
    """Per-message budget: c_msg * ceil(log2(n*(maxW+2)))."""
    return c_msg * max(1, (n * (max_w + 2) - 1).bit_length())


class Message:
    """A tagged bounded-integer message; ctx carries subproblem/instance id."""

    __slots__ = ("tag", "payload", "ctx")

    def __init__(self, tag: int, payload: tuple = (), ctx: int | None = None):
        self.tag = tag
        self.payload = payload
        self.ctx = ctx

    def __repr__(self):
        return f"Message(tag={self.tag}, payload={self.payload}, ctx={self.ctx})"


def audit_message(msg: Message, n: int, max_w: int) -> int:
    """Exact charged size in bits of one message."""
    bits = int_bits(msg.tag)
    if msg.ctx is not None:
        bits += int_bits(msg.ctx)
    for v in msg.payload:
        bits += int_bits(v)
    return bits


@dataclass
class MegaroundConfig:
    width: int = 1


@dataclass
class SimConfig:
    round_limit: int = 10_000_000  # logical rounds
    megaround: MegaroundConfig = field(default_factory=MegaroundConfig)
    c_msg: int = 8
    extra_ctx_bits: int = 0  # instance-id allowance for concurrent scheduling
    allow_oversubscription: bool = False
    raise_on_critical_loss: bool = True
    collect_trace: bool = True
    watch_tags: frozenset = frozenset()  # lost messages with these tags are logged


@dataclass
class RunReport:
    """Exact per-run metering; identical inputs yield identical reports."""

    rounds: int = 0
    energy: dict = field(default_factory=dict)
    congestion: dict = field(default_factory=dict)  # (u,v) u<v -> [u->v, v->u]
    delivered: int = 0
    lost: int = 0
    max_bits: int = 0
    bit_limit: int = 0
    status: str = "done"
    max_channel_demand: int = 0  # per-edge-direction sends in one round
    oversubscribed: list = field(default_factory=list)
    critical_losses: list = field(default_factory=list)
    watched_losses: list = field(default_factory=list)

    def max_energy(self) -> int:
        return max(self.energy.values(), default=0)

    def max_congestion(self) -> int:
        return max((max(c) for c in self.congestion.values()), default=0)

    def energy_percentile(self, q: float) -> int:
        vals = sorted(self.energy.values())
        if not vals:
            return 0
        return vals[min(len(vals) - 1, int(q * len(vals)))]

    def congestion_percentile(self, q: float) -> int:
        vals = sorted(max(c) for c in self.congestion.values())
        if not vals:
            return 0
        return vals[min(len(vals) - 1, int(q * len(vals)))]

    def total_sent(self) -> int:
        return sum(f + r for (f, r) in self.congestion.values())

    def to_json(self) -> str:
        doc = {
            "rounds": self.rounds,
            "energy": {str(v): e for v, e in sorted(self.energy.items())},
            "congestion": {
                f"{u}-{v}": list(c) for (u, v), c in sorted(self.congestion.items())
            },
            "max_bits": self.max_bits,
            "status": self.status,
        }
        return json.dumps(doc, sort_keys=True)


# -- awake schedules -------------------------------------------------------

ALWAYS = "always"
SPAN = "span"
PERIODIC = "periodic"


class Schedule:
    """Union of awake components for one node."""

    __slots__ = ("always", "spans", "periodics")

    def __init__(self):
        self.always = False
        self.spans = []  # (a, b) inclusive
        self.periodics = []  # (anchor, period, residues, a, b)

    def awake_at(self, r: int) -> bool:
        if self.always:
            return True
        for a, b in self.spans:
            if a <= r <= b:
                return True
        for anchor, period, residues, a, b in self.periodics:
            if a <= r <= b and (r - anchor) % period in residues:
                return True
        return False

    def next_awake_after(self, r: int):
        """Smallest awake round strictly greater than r, or None."""
        if self.always:
            return r + 1
        best = None
        for a, b in self.spans:
            if b <= r:
                continue
            cand = max(a, r + 1)
            if best is None or cand < best:
                best = cand
        for anchor, period, residues, a, b in self.periodics:
            if b <= r:
                continue
            start = max(a, r + 1)
            cand = None
            for off in range(period):
                rr = start + off
                if rr > b:
                    break
                if (rr - anchor) % period in residues:
                    cand = rr
                    break
            if cand is not None and (best is None or cand < best):
                best = cand
        return best

    def awake_rounds(self, horizon: int):
        """All awake rounds in [1, horizon] (round 0 is free initialization)."""
        if self.always:
            return set(range(1, horizon + 1))
        rounds = set()
        for a, b in self.spans:
            rounds.update(range(max(1, a), min(b, horizon) + 1))
        for anchor, period, residues, a, b in self.periodics:
            lo, hi = max(1, a), min(b, horizon)
            for res in residues:
                first = lo + ((anchor + res - lo) % period)
                rounds.update(range(first, hi + 1, period))
        return rounds


class NodeApi:
    """Per-step facade handed to a node program."""

    __slots__ = ("engine", "node", "round", "inbox", "_sends")

    def __init__(self, engine, node, rnd, inbox):
        self.engine = engine
        self.node = node
        self.round = rnd
        self.inbox = inbox
        self._sends = []

    def send(self, dst: int, msg: Message, critical: bool = False):
        self._sends.append((dst, msg, critical))

    def wake_at(self, r: int):
        if r <= self.round:
            raise SimError(f"wake_at({r}) not in the future of round {self.round}")
        self.engine._add_span(self.node, r, r)
        self.engine._push_step(r, self.node)

    def awake_span(self, a: int, b: int, step_at_start: bool = False):
        self.engine._add_span(self.node, a, b)
        if step_at_start and a > self.round:
            self.engine._push_step(a, self.node)

    def awake_periodic(self, anchor: int, period: int, residues, a: int, b: int):
        """Declare a periodic listening schedule; returns a handle that can be
        retired early with stop_awake (effective from the next round)."""
        sched = self.engine._sched(self.node)
        sched.periodics.append((anchor, period, frozenset(residues), a, b))
        return len(sched.periodics) - 1

    def stop_awake(self, handle: int, at_round: int):
        sched = self.engine._sched(self.node)
        anchor, period, residues, a, b = sched.periodics[handle]
        sched.periodics[handle] = (anchor, period, residues, a, min(b, at_round))

    def always_awake(self):
        self.engine._sched(self.node).always = True

    def finish(self, output=None):
        self.engine._finish(self.node, output)

    def trace(self, kind: str, **data):
        self.engine.trace(kind, node=self.node, round=self.round, **data)


class Engine:
    """Synchronous-round simulator over one graph."""

    def __init__(self, graph, config: SimConfig | None = None):
        self.graph = graph
        self.config = config or SimConfig()
        self.n = graph.n
        self.max_w = max(1, graph.max_weight)
        self.budget = bit_budget(self.n, self.max_w, self.config.c_msg)
        self.budget += self.config.extra_ctx_bits
        self._adj = graph.adjacency()
        self._nbr = {v: {u for (u, _) in nb} for v, nb in self._adj.items()}
        self._schedules = {}
        self._inboxes = {v: [] for v in range(self.n)}
        self._outputs = {}
        self._done = set()
        self._heap = []
        self._queued = set()
        self._report = RunReport(bit_limit=self.budget)
        self._congestion = {}
        self._trace = []
        self._last_event_round = 0

    # -- plumbing ---------------------------------------------------------

    def _sched(self, node) -> Schedule:
        s = self._schedules.get(node)
        if s is None:
            s = self._schedules[node] = Schedule()
        return s

    def _add_span(self, node, a, b):
        self._sched(node).spans.append((a, b))

    def _push_step(self, r, node):
        key = (r, node)
        if key not in self._queued:
            self._queued.add(key)
            heapq.heappush(self._heap, key)

    def _finish(self, node, output):
        self._outputs[node] = output
        self._done.add(node)

    def trace(self, kind: str, **data):
        if self.config.collect_trace:
            self._trace.append((kind, data))

    @property
    def trace_log(self):
        return self._trace

    # -- main loop ---------------------------------------------------------

    def run(self, programs: dict) -> tuple[dict, RunReport]:
        """Run per-node programs until all finish or the round limit hits.

        `programs` maps node id -> object with .on_round(api). Nodes are
        stepped at round 0 for initialization.
        """
        cfg = self.config
        width = cfg.megaround.width
        for v in sorted(programs):
            self._push_step(0, v)

        status = "done"
        while self._heap:
            r = self._heap[0][0]
            if r > cfg.round_limit:
                status = "timeout"
                break
            due = []
            while self._heap and self._heap[0][0] == r:
                key = heapq.heappop(self._heap)
                self._queued.discard(key)
                if key[1] not in self._done:
                    due.append(key[1])
            if not due:
                continue
            self._last_event_round = max(self._last_event_round, r)
            due.sort()
            all_sends = []
            for v in due:
                inbox = self._inboxes[v]
                self._inboxes[v] = []
                api = NodeApi(self, v, r, inbox)
                programs[v].on_round(api)
                if api._sends:
                    all_sends.append((v, api._sends))
            if all_sends:
                self._deliver(r, all_sends, width)
            if len(self._done) == self.n:
                break
        else:
            if len(self._done) < self.n:
                status = "timeout"
        if len(self._done) < self.n and status == "done":
            status = "timeout"

        return self._outputs, self._finalize(status, width)

    def _deliver(self, r, all_sends, width):
        per_channel = {}
        cfg = self.config
        for src, sends in all_sends:
            adj = self._nbr[src]
            for dst, msg, critical in sends:
                if dst not in adj:
                    raise SimError(f"node {src} sent to non-neighbor {dst}")
                bits = audit_message(msg, self.n, self.max_w)
                if bits > self._report.max_bits:
                    self._report.max_bits = bits
                if bits > self.budget:
                    raise SimError(
                        f"bit budget violation: tag {msg.tag} uses {bits} bits "
                        f"(budget {self.budget}) at round {r}"
                    )
                chan = (src, dst)
                cnt = per_channel.get(chan, 0) + 1
                per_channel[chan] = cnt
                if cnt > self._report.max_channel_demand:
                    self._report.max_channel_demand = cnt
                if cnt > width:
                    if cfg.allow_oversubscription:
                        self._report.oversubscribed.append((r, src, dst, msg.tag))
                    else:
                        raise SimError(
                            f"channel oversubscription {src}->{dst} round {r} "
                            f"(width {width}, tag {msg.tag})"
                        )
                ek = (src, dst) if src < dst else (dst, src)
                slot = self._congestion.get(ek)
                if slot is None:
                    slot = self._congestion[ek] = [0, 0]
                slot[0 if src < dst else 1] += 1
                sched = self._schedules.get(dst)
                awake = sched.awake_at(r) if sched else False
                if awake and dst not in self._done:
                    self._inboxes[dst].append((src, msg))
                    self._report.delivered += 1
                    nxt = sched.next_awake_after(r)
                    if nxt is not None:
                        self._push_step(nxt, dst)
                else:
                    self._report.lost += 1
                    if msg.tag in cfg.watch_tags:
                        self._report.watched_losses.append(
                            (r, src, dst, msg.tag, msg.payload))
                    if critical:
                        self._report.critical_losses.append((r, src, dst, msg.tag))
                        if cfg.raise_on_critical_loss:
                            raise ProtocolViolation(
                                f"critical message tag {msg.tag} from {src} lost at "
                                f"sleeping node {dst} in round {r}"
                            )

    def _finalize(self, status, width) -> RunReport:
        rep = self._report
        rep.status = status
        horizon = self._last_event_round
        rep.rounds = horizon * width
        energy = {}
        for v in range(self.n):
            sched = self._schedules.get(v)
            if sched is None:
                energy[v] = 0
            elif sched.always:
                energy[v] = horizon * width
            else:
                energy[v] = len(sched.awake_rounds(horizon)) * width
        rep.energy = energy
        rep.congestion = dict(sorted(self._congestion.items()))
        return rep


def merge_reports(reports) -> RunReport:
    """Combine sequential stage reports into one cumulative report."""
    out = RunReport()
    for rep in reports:
        out.rounds += rep.rounds
        for v, e in rep.energy.items():
            out.energy[v] = out.energy.get(v, 0) + e
        for ek, (f, r) in rep.congestion.items():
            slot = out.congestion.setdefault(ek, [0, 0])
            slot[0] += f
            slot[1] += r
        out.delivered += rep.delivered
        out.lost += rep.lost
        out.max_bits = max(out.max_bits, rep.max_bits)
        out.bit_limit = max(out.bit_limit, rep.bit_limit)
        out.oversubscribed.extend(rep.oversubscribed)
        out.critical_losses.extend(rep.critical_losses)
        out.watched_losses.extend(rep.watched_losses)
        if rep.status != "done":
            out.status = rep.status
    out.congestion = dict(sorted(out.congestion.items()))
    out.energy = dict(sorted(out.energy.items()))
    return out


def run_simulation(graph, program_factory, config: SimConfig | None = None):
    """Build one program per node via `program_factory(node_id)` and run."""
    engine = Engine(graph, config)
    programs = {v: program_factory(v) for v in range(graph.n)}
    outputs, report = engine.run(programs)
    return outputs, report, engine
