from sleepysim.apsp_sched import apsp_random_delay, draw_delays
from sleepysim.congest_cssp import cssp
from sleepysim.graph import Graph, GraphSpec, gen_graph
from sleepysim.oracle import dijkstra


def all_pairs_reference(g):
    out = {}
    for s in range(g.n):
        d = dijkstra(g, [s])
        for v in range(g.n):
            out[(s, v)] = d[v]
    return out


def test_two_nodes():
    g = Graph.build(2, [(0, 1, 5)])
    matrix, report, _, _ = apsp_random_delay(g, seed=1)
    assert matrix[(0, 1)] == 5 and matrix[(1, 0)] == 5
    assert matrix[(0, 0)] == 0


def test_triangle():
    g = Graph.build(3, [(0, 1, 1), (1, 2, 2), (0, 2, 4)])
    matrix, _, _, _ = apsp_random_delay(g, seed=3)
    assert matrix[(0, 1)] == 1
    assert matrix[(1, 2)] == 2
    assert matrix[(0, 2)] == 3


def test_delays_deterministic():
    assert draw_delays(8, 8, 42) == draw_delays(8, 8, 42)
    assert draw_delays(8, 8, 42) != draw_delays(8, 8, 43)


def test_random_graph_matches_oracle():
    g = gen_graph(GraphSpec("random-gnm", 12, seed=7, m=26,
                            weight_mode="uniform", max_w=9))
    matrix, report, _, _ = apsp_random_delay(g, seed=11)
    assert matrix == all_pairs_reference(g)
    assert report.status == "done"


def test_instance_isolation():
    """Removing other instances does not change one instance's outputs."""
    g = gen_graph(GraphSpec("random-gnm", 10, seed=2, m=20,
                            weight_mode="uniform", max_w=5))
    matrix, _, _, _ = apsp_random_delay(g, seed=5)
    for s in (0, 4, 7):
        solo, _, _ = cssp(g, {s}, trace=False)
        assert {v: matrix[(s, v)] for v in range(g.n)} == solo


def test_determinism():
    g = gen_graph(GraphSpec("random-gnm", 9, seed=1, m=16,
                            weight_mode="uniform", max_w=4))
    _, r1, _, d1 = apsp_random_delay(g, seed=9)
    _, r2, _, d2 = apsp_random_delay(g, seed=9)
    assert d1 == d2
    assert r1.to_json() == r2.to_json()


def star_of_paths(arms, arm_len, w=1):
    edges = []
    n = 1 + arms * arm_len
    for a in range(arms):
        prev = 0
        for i in range(arm_len):
            node = 1 + a * arm_len + i
            edges.append((prev, node, w))
            prev = node
    return Graph.build(n, edges)


def test_random_delays_spread_demand():
    g = star_of_paths(4, 3)
    _, spread, _, _ = apsp_random_delay(g, delta=g.n, seed=13)
    _, packed, _, _ = apsp_random_delay(g, delta=1, seed=13)
    assert spread.max_channel_demand <= packed.max_channel_demand
