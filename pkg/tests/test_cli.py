import json

from sleepysim.cli import EXIT_CONFIG, EXIT_OK, EXIT_TIMEOUT, EXIT_VERIFY, main
from sleepysim.energy_bfs import bootstrap_base_covers
from sleepysim.graph import GraphSpec, gen_graph, save_graph
from sleepysim.structures import save_layered_cover


def test_run_cssp_with_verify(tmp_path, capsys):
    fixture = tmp_path / "p3.txt"
    fixture.write_text("3 2\n0 1 2\n1 2 3\n")
    out = tmp_path / "out"
    code = main(["run", "--graph", str(fixture), "--algo", "cssp-congest",
                 "--verify", "--out", str(out)])
    assert code == EXIT_OK
    dist = json.loads((out / "distances.json").read_text())
    assert dist == {"0": 0, "1": 2, "2": 5}
    report = json.loads((out / "report.json").read_text())
    assert report["status"] == "done"


def test_run_generated_energy(tmp_path):
    out = tmp_path / "out"
    code = main(["run", "--gen", "path", "--n", "9", "--algo", "bfs-energy",
                 "--verify", "--out", str(out),
                 "--save-cover", str(tmp_path / "cover.slpycov")])
    assert code == EXIT_OK
    assert (tmp_path / "cover.slpycov").read_text().startswith("SLPYCOV1")


def test_cover_cache_roundtrip(tmp_path):
    cache = tmp_path / "cover.slpycov"
    code = main(["run", "--gen", "path", "--n", "9", "--algo", "bfs-energy",
                 "--verify", "--save-cover", str(cache),
                 "--out", str(tmp_path / "a")])
    assert code == EXIT_OK
    code = main(["run", "--gen", "path", "--n", "9", "--algo", "bfs-energy",
                 "--verify", "--cover-cache", str(cache),
                 "--out", str(tmp_path / "b")])
    assert code == EXIT_OK


def test_malformed_config_exits_2(tmp_path):
    cfg = tmp_path / "run.conf"
    cfg.write_text("algo cssp-congest\nbogus-key 7\n")
    code = main(["run", "--config", str(cfg), "--gen", "path", "--n", "3"])
    assert code == EXIT_CONFIG


def test_config_file_with_flag_override(tmp_path):
    cfg = tmp_path / "run.conf"
    cfg.write_text("# experiment template\nalgo cssp-congest\ngen path\nn 5\n")
    out = tmp_path / "out"
    code = main(["run", "--config", str(cfg), "--verify", "--out", str(out)])
    assert code == EXIT_OK


def test_round_limit_timeout(tmp_path):
    code = main(["run", "--gen", "path", "--n", "12", "--algo", "cssp-congest",
                 "--round-limit", "5", "--out", str(tmp_path / "o")])
    assert code == EXIT_TIMEOUT


def test_missing_graph_exits_2():
    assert main(["run", "--algo", "cssp-congest"]) == EXIT_CONFIG


def test_apsp_matrix_csv(tmp_path):
    out = tmp_path / "out"
    code = main(["run", "--gen", "cycle", "--n", "4", "--algo", "apsp",
                 "--verify", "--out", str(out)])
    assert code == EXIT_OK
    rows = (out / "matrix.csv").read_text().strip().split("\n")
    assert len(rows) == 4
    assert rows[0].split(",")[0] == "0"


def test_sweep_rows(tmp_path, capsys):
    code = main(["sweep", "--algo", "cssp-congest", "--axis", "n",
                 "--values", "8,12,16", "--gen", "random-gnm"])
    assert code == EXIT_OK
    lines = capsys.readouterr().out.strip().split("\n")
    assert lines[0] == "point,rounds,max_energy,max_congestion"
    assert len(lines) == 4


def test_sweep_empty_axis():
    code = main(["sweep", "--algo", "cssp-congest", "--axis", "n",
                 "--values", ""])
    assert code == EXIT_CONFIG


def test_verify_missing_fixtures(tmp_path):
    code = main(["verify", "--fixtures", str(tmp_path / "nope"), "--quick"])
    assert code == EXIT_CONFIG


def test_verify_corrupted_cover_cache(tmp_path, capsys):
    g = gen_graph(GraphSpec("path", 9))
    layered, _, _, _ = bootstrap_base_covers(g)
    # corrupt: drop a node from every level-0 cluster member list
    for cl in layered.levels[0].clusters:
        if len(cl.members) > 1:
            cl.members.discard(max(cl.members))
    fix = tmp_path / "fix"
    fix.mkdir()
    (fix / "graph.txt").write_text(save_graph(g))
    (fix / "cover.slpycov").write_text(save_layered_cover(layered))
    code = main(["verify", "--fixtures", str(fix), "--quick"])
    text = capsys.readouterr().out
    assert "fixture check [FAIL]" in text
    assert code == EXIT_VERIFY


def test_decomp_and_cover_algos(tmp_path):
    out = tmp_path / "out"
    code = main(["run", "--gen", "cycle", "--n", "12", "--algo", "decomp",
                 "--k", "2", "--verify", "--out", str(out)])
    assert code == EXIT_OK
    doc = json.loads((out / "distances.json").read_text())
    assert doc["colors"] >= 1
    code = main(["run", "--gen", "cycle", "--n", "12", "--algo", "cover",
                 "--d", "2", "--verify", "--out", str(out)])
    assert code == EXIT_OK


def test_gen_to_stdout(capsys):
    code = main(["gen", "--gen", "path", "--n", "3"])
    assert code == EXIT_OK
    assert capsys.readouterr().out == "3 2\n0 1 1\n1 2 1\n"
