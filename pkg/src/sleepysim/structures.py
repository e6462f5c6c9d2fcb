"""Shared cluster / cover / decomposition / forest data structures.

These are the artifacts the distributed constructions emit and the oracle
checkers consume. Serialization uses a versioned "SLPYCOV1" header so cover
stacks can be cached between runs.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field


@dataclass
class ClusterData:
    """One cluster: terminal member set plus a rooted Steiner tree.

    tree maps node -> (parent or None, depth, is_terminal); it may contain
    nonterminal relay nodes that are not members.
    """

    id: int
    members: set
    tree: dict
    level: int = 0

    @property
    def root(self) -> int:
        for v, (p, _, _) in self.tree.items():
            if p is None:
                return v
        raise ValueError(f"cluster {self.id} has no root")

    def depth(self) -> int:
        return max((d for (_, d, _) in self.tree.values()), default=0)

    def tree_edges(self):
        return [
            (min(v, p), max(v, p)) for v, (p, _, _) in self.tree.items() if p is not None
        ]


@dataclass
class Cover:
    """A sparse d-cover: clusters whose trees jointly cover every d-ball."""

    scale: int
    clusters: list

    def measured_stretch(self) -> int:
        if not self.clusters:
            return 1
        worst = max(cl.depth() for cl in self.clusters)
        return max(1, -(-worst // max(1, self.scale)))  # ceil

    def memberships(self, n: int) -> dict:
        out = {v: [] for v in range(n)}
        for cl in self.clusters:
            for v in cl.members:
                out[v].append(cl.id)
        return out


@dataclass
class Decomposition:
    """Vertex partition into colors of pairwise-separated clusters."""

    separation: int
    colors: list  # list of list[ClusterData]
    node_color: dict = field(default_factory=dict)

    def all_clusters(self):
        for clusters in self.colors:
            yield from clusters


@dataclass
class LayeredCover:
    """Covers at scales base**0 .. base**L with parent-containment links."""

    base: int
    levels: list  # list[Cover], index = level
    parent_of: dict = field(default_factory=dict)  # (level, cluster_id) -> parent id

    @property
    def top(self) -> int:
        return len(self.levels) - 1

    def max_edge_multiplicity(self) -> int:
        use = {}
        for cover in self.levels:
            for cl in cover.clusters:
                for e in cl.tree_edges():
                    use[e] = use.get(e, 0) + 1
        return max(use.values(), default=1)

    def max_tree_depth(self, level: int) -> int:
        return max((cl.depth() for cl in self.levels[level].clusters), default=0)


@dataclass
class ForestInfo:
    """Maximal spanning forest annotations from the component computation."""

    component: dict  # node -> component id (root id)
    parent: dict  # node -> parent or None
    depth: dict  # node -> depth
    size: dict  # node -> |C| of its component

    def children(self) -> dict:
        out = {v: [] for v in self.component}
        for v, p in self.parent.items():
            if p is not None:
                out[p].append(v)
        for v in out:
            out[v].sort()
        return out

    def components(self) -> dict:
        out = {}
        for v, c in self.component.items():
            out.setdefault(c, []).append(v)
        for c in out:
            out[c].sort()
        return out


COVER_MAGIC = "SLPYCOV1"


def _cluster_doc(cl: ClusterData) -> dict:
    return {
        "id": cl.id,
        "level": cl.level,
        "members": sorted(cl.members),
        "tree": {
            str(v): [p, d, 1 if t else 0] for v, (p, d, t) in sorted(cl.tree.items())
        },
    }


def _cluster_from(doc: dict) -> ClusterData:
    tree = {
        int(v): (p, d, bool(t)) for v, (p, d, t) in doc["tree"].items()
    }
    return ClusterData(
        id=doc["id"], members=set(doc["members"]), tree=tree, level=doc["level"]
    )


def save_layered_cover(lc: LayeredCover) -> str:
    doc = {
        "base": lc.base,
        "levels": [
            {"scale": cov.scale, "clusters": [_cluster_doc(cl) for cl in cov.clusters]}
            for cov in lc.levels
        ],
        "parents": [[lvl, cid, pid] for (lvl, cid), pid in sorted(lc.parent_of.items())],
    }
    return COVER_MAGIC + "\n" + json.dumps(doc, sort_keys=True) + "\n"


def load_layered_cover(text: str) -> LayeredCover:
    header, _, body = text.partition("\n")
    if header.strip() != COVER_MAGIC:
        raise ValueError(f"bad cover cache header {header!r}")
    doc = json.loads(body)
    levels = [
        Cover(scale=lv["scale"], clusters=[_cluster_from(c) for c in lv["clusters"]])
        for lv in doc["levels"]
    ]
    parent_of = {(lvl, cid): pid for lvl, cid, pid in doc["parents"]}
    return LayeredCover(base=doc["base"], levels=levels, parent_of=parent_of)
