from sleepysim.graph import Graph, GraphSpec, gen_graph
from sleepysim.netdecomp import bits_for, build_cover_sync, build_decomposition
from sleepysim.oracle import check_cover, check_decomposition
from sleepysim.trace_checks import check_halving, check_kill_budget


def _diam_bound(n, k, c_diam=4):
    b = max(1, bits_for(n))
    return c_diam * k * b**3


def _check(graph, k, decomp):
    return check_decomposition(
        graph, decomp, k, _diam_bound(graph.n, k), 2 * max(1, bits_for(graph.n))
    )


def test_single_node():
    g = Graph.build(1, [])
    decomp, _, report, _ = build_decomposition(g, 2)
    assert len(decomp.colors) == 1
    assert decomp.node_color == {0: 0}
    assert _check(g, 2, decomp) == []


def test_edgeless_one_color():
    g = Graph.build(16, [])
    decomp, _, _, _ = build_decomposition(g, 3)
    assert len(decomp.colors) == 1
    assert sum(len(cl.members) for cl in decomp.colors[0]) == 16
    assert _check(g, 3, decomp) == []


def test_path_p8():
    g = gen_graph(GraphSpec("path", 8))
    decomp, _, _, tlog = build_decomposition(g, 2)
    assert _check(g, 2, decomp) == []
    clustered_first = sum(len(cl.members) for cl in decomp.colors[0])
    assert clustered_first >= 4  # at least half clustered by the first color
    ok, detail = check_halving(tlog)
    assert ok, detail
    ok, detail = check_kill_budget(tlog, bits_for(g.n))
    assert ok, detail


def test_grid_decomposition():
    g = gen_graph(GraphSpec("grid", 64, seed=0))
    decomp, _, _, tlog = build_decomposition(g, 2)
    assert _check(g, 2, decomp) == []
    ok, detail = check_halving(tlog)
    assert ok, detail
    ok, detail = check_kill_budget(tlog, bits_for(g.n))
    assert ok, detail


def test_cover_single_node():
    g = Graph.build(1, [])
    cover, _, _, _ = build_cover_sync(g, 1)
    assert len(cover.clusters) == 1
    assert check_cover(g, cover, 1, 8, 4, 8) == []


def test_cover_star():
    g = Graph.build(6, [(0, i, 1) for i in range(1, 6)])
    cover, _, _, _ = build_cover_sync(g, 1)
    full = {cl.id for cl in cover.clusters if cl.members == set(range(6))}
    assert full, "some cluster must contain the whole star"
    b = max(1, bits_for(g.n))
    assert check_cover(g, cover, 1, 4 * b**3, 2 * b, 4 * b**3) == []


def test_cover_cycle():
    g = gen_graph(GraphSpec("cycle", 32, seed=0))
    cover, decomp, _, _ = build_cover_sync(g, 4)
    b = bits_for(g.n)
    assert check_cover(g, cover, 4, 4 * b**3, 2 * b, 4 * b**3) == []
    assert _check(g, 2 * 4 + 1, decomp) == []


def test_determinism():
    g = gen_graph(GraphSpec("random-gnm", 24, seed=6, m=48))
    d1, _, r1, _ = build_decomposition(g, 2)
    d2, _, r2, _ = build_decomposition(g, 2)
    assert r1.to_json() == r2.to_json()
    assert d1.node_color == d2.node_color
