import pytest

from sleepysim.energy_bfs import (
    bootstrap_base_covers, build_cover_next, detect_global_cluster, full_bfs,
    next_slot, run_thresholded_bfs_with_cover, thresholded_bfs,
    tree_pipeline_run,
)
from sleepysim.structures import ClusterData
from sleepysim.graph import Graph, GraphSpec, gen_graph
from sleepysim.oracle import INF, check_layered, hop_distances
from sleepysim.trace_checks import check_relevance, check_sleep_safety


def unit_path(n):
    return gen_graph(GraphSpec("path", n))


def test_next_slot():
    assert next_slot(0, 4, 2, 5) == 6
    assert next_slot(0, 4, 2, 6) == 10
    assert next_slot(1, 3, 0, 0) == 1


def test_bootstrap_single_node():
    g = Graph.build(1, [])
    layered, decomps, report, _ = bootstrap_base_covers(g)
    assert len(layered.levels) == 2
    assert all(len(cov.clusters) == 1 for cov in layered.levels)
    assert check_layered(g, layered, layered.base, layered.base) == []


def test_bootstrap_cycle_checker_clean():
    g = gen_graph(GraphSpec("cycle", 16))
    layered, decomps, report, _ = bootstrap_base_covers(g)
    assert check_layered(g, layered, layered.base, layered.base) == []
    # all-awake accounting: nobody's energy exceeds total rounds
    assert all(e <= report.rounds for e in report.energy.values())
    assert report.max_energy() > 0


def test_detect_global_trivial():
    g = Graph.build(1, [])
    layered, _, _, _ = bootstrap_base_covers(g)
    spans, _ = detect_global_cluster(g, layered.levels[0])
    assert spans


def test_detect_global_path():
    g = unit_path(9)
    layered, _, _, _ = bootstrap_base_covers(g)
    spans_top, _ = detect_global_cluster(g, layered.levels[1])
    # scale-B cover of P9 must contain a spanning cluster at desk scale
    assert spans_top


def test_detect_global_disconnected():
    g = Graph.build(4, [(0, 1, 1), (2, 3, 1)])
    layered, _, _, _ = bootstrap_base_covers(g)
    spans, _ = detect_global_cluster(g, layered.levels[1])
    assert spans  # each component separately contained


def test_full_bfs_all_sources():
    g = unit_path(10)
    outputs, report, engine, layered, _, _ = full_bfs(g, set(range(10)))
    assert all(outputs[v] == 0 for v in range(10))


@pytest.mark.parametrize("n", [2, 5, 12, 33])
def test_full_bfs_path_oracle(n):
    g = unit_path(n)
    outputs, report, engine, layered, _, _ = full_bfs(g, {0})
    assert outputs == hop_distances(g, [0])
    ok, detail = check_sleep_safety(outputs, report)
    assert ok, detail
    assert report.critical_losses == []


def test_full_bfs_grid_corner():
    g = gen_graph(GraphSpec("grid", 64, seed=0))
    outputs, report, _, layered, _, _ = full_bfs(g, {0})
    ref = hop_distances(g, [0])
    assert outputs == ref
    ok, detail = check_sleep_safety(outputs, report)
    assert ok, detail
    assert check_layered(g, layered, layered.base ** layered.top, layered.base) == []


def test_full_bfs_random_graph():
    g = gen_graph(GraphSpec("random-gnm", 40, seed=3, m=90))
    outputs, report, _, _, _, _ = full_bfs(g, {7})
    assert outputs == hop_distances(g, [7])


def test_full_bfs_disconnected():
    g = Graph.build(7, [(0, 1, 1), (1, 2, 1), (4, 5, 1), (5, 6, 1)])
    outputs, report, _, _, _, _ = full_bfs(g, {0})
    ref = hop_distances(g, [0])
    assert outputs == ref
    assert outputs[4] is INF and outputs[3] is INF


def test_thresholded_zero():
    g = unit_path(6)
    outputs, _, _, _, _, _ = thresholded_bfs(g, {2}, 0)
    assert outputs == {0: INF, 1: INF, 2: 0, 3: INF, 4: INF, 5: INF}


def test_thresholded_p10():
    g = unit_path(10)
    outputs, report, engine, layered, _, _ = thresholded_bfs(g, {0}, 4)
    want = {v: (v if v <= 4 else INF) for v in range(10)}
    assert outputs == want
    ok, detail = check_sleep_safety(outputs, report)
    assert ok, detail
    ok, detail = check_relevance(layered, {0}, outputs, 4)
    assert ok, detail


def test_thresholded_beyond_diameter_equals_full():
    g = unit_path(8)
    out1, _, _, _, _, _ = thresholded_bfs(g, {0}, 64)
    out2, _, _, _, _, _ = full_bfs(g, {0})
    assert out1 == out2


def test_irrelevant_component_sleeps():
    """Clusters whose top ancestor holds no source never wake after init."""
    g = Graph.build(40, [(i, i + 1, 1) for i in range(19)]
                    + [(i, i + 1, 1) for i in range(20, 39)])
    layered, _, _, _ = bootstrap_base_covers(g)
    outputs, report, _ = run_thresholded_bfs_with_cover(g, layered, {0}, 30)
    assert outputs[19] == 19 and outputs[20] is INF
    hot = max(report.energy[v] for v in range(20))
    cold = max(report.energy[v] for v in range(20, 40))
    assert cold < hot / 4  # init listening only on the sourceless side


def test_pipeline_singleton_period4():
    g = Graph.build(1, [])
    cl = ClusterData(id=0, members={0}, tree={0: (None, 0, True)})
    root_detect, know, _ = tree_pipeline_run(g, cl, 4, {0: 1})
    assert root_detect <= 1 + 4  # within one period


def test_pipeline_depth2_latency():
    g = Graph.build(3, [(0, 1, 1), (1, 2, 1)])
    cl = ClusterData(id=0, members={0, 1, 2},
                     tree={0: (None, 0, True), 1: (0, 1, True), 2: (1, 2, True)})
    root_detect, know, report = tree_pipeline_run(g, cl, 4, {2: 1})
    c_pipe = 3
    assert root_detect <= 1 + c_pipe * (2 + 4)
    # broadcast back reaches every depth-d node within c_pipe*(d+p) more rounds
    assert all(k <= root_detect + c_pipe * (2 + 4) for k in know.values())
    # wake fraction: two awake rounds per period and direction
    horizon = report.rounds
    assert report.max_energy() <= 4 * (horizon // 4 + 2)


def test_pipeline_wake_fraction_in_bfs():
    g = unit_path(33)
    layered, _, _, _ = bootstrap_base_covers(g)
    outputs, report, engine = run_thresholded_bfs_with_cover(g, layered, {0}, 32)
    for v in range(g.n):
        sched = engine._schedules.get(v)
        if sched is None:
            continue
        for anchor, period, residues, a, b in sched.periodics:
            assert len(residues) <= 4
            lvl_periods = {max(1, layered.base**lvl) for lvl in range(layered.top + 1)}
            assert period in lvl_periods


def test_build_cover_next_levels():
    g = unit_path(32)
    layered, decomps, _, _ = bootstrap_base_covers(g, base=4)
    if layered.base ** layered.top < 16:
        try:
            build_cover_next(g, layered)
        except Exception:
            pytest.skip("stretch exceeds forced base at this scale")
    assert layered.base == 4
