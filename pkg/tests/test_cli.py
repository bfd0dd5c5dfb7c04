import json

import pytest

import qswitch as q
from qswitch.cli import main


@pytest.fixture
def triangle_file(tmp_path, triangle):
    path = tmp_path / "triangle.json"
    q.dump_instance(triangle, str(path))
    return str(path)


@pytest.fixture
def stability_file(tmp_path, stability_triangle):
    path = tmp_path / "stable.json"
    q.dump_instance(stability_triangle, str(path))
    return str(path)


def write_triples(tmp_path, name, triples):
    path = tmp_path / name
    path.write_text(json.dumps(triples), encoding="utf-8")
    return str(path)


def test_match_command(tmp_path, triangle_file, capsys):
    weights = write_triples(
        tmp_path, "w.json", [["a", "b", 1.0], ["a", "c", 1.0], ["b", "c", 1.0]]
    )
    assert main(["match", "--instance", triangle_file, "--weights", weights]) == 0
    doc = json.loads(capsys.readouterr().out)
    assert doc == {"matching": [["a", "b"]], "weight": 1.0}


def test_lp_solve_both_algs(tmp_path, triangle_file, capsys):
    weights = write_triples(
        tmp_path, "w.json", [["a", "b", 1.0], ["a", "c", 1.0], ["b", "c", 1.0]]
    )
    assert main(["lp-solve", "--alg", "1", "--instance", triangle_file, "--weights", weights]) == 0
    doc1 = json.loads(capsys.readouterr().out)
    assert doc1["value"] == pytest.approx(1.0)
    assert doc1["objective_trace"] == pytest.approx([1.5, 1.0])
    assert doc1["cuts"] == [["a", "b", "c"]]

    assert main(["lp-solve", "--alg", "2", "--instance", triangle_file, "--weights", weights]) == 0
    doc2 = json.loads(capsys.readouterr().out)
    assert doc2["value"] == pytest.approx(1.0)
    for _, _, val in doc2["x"]:
        assert val == pytest.approx(1.0 / 3.0)


def test_decompose_command(tmp_path, triangle_file, capsys):
    x = write_triples(
        tmp_path, "x.json", [["a", "b", 1 / 3], ["a", "c", 1 / 3], ["b", "c", 1 / 3]]
    )
    assert main(["decompose", "--instance", triangle_file, "--x", x]) == 0
    doc = json.loads(capsys.readouterr().out)
    assert len(doc["atoms"]) == 3
    for atom in doc["atoms"]:
        assert atom["probability"] == pytest.approx(1 / 3)


def test_decompose_outside_polytope_exit_code(tmp_path, triangle_file, capsys):
    x = write_triples(
        tmp_path, "x.json", [["a", "b", 0.5], ["a", "c", 0.5], ["b", "c", 0.5]]
    )
    assert main(["decompose", "--instance", triangle_file, "--x", x]) == 3
    assert "infeasible" in capsys.readouterr().err


def test_bad_instance_exit_code(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text(
        json.dumps(
            {
                "vertices": ["a", "b"],
                "edges": [["a", "b"]],
                "node_params": {
                    "a": {"lambda": 2.0, "mu": 0.0, "buffer": 1},
                    "b": {"lambda": 0.5, "mu": 0.0, "buffer": 1},
                },
                "edge_demand": [],
            }
        ),
        encoding="utf-8",
    )
    weights = write_triples(tmp_path, "w.json", [["a", "b", 1.0]])
    assert main(["match", "--instance", str(bad), "--weights", weights]) == 2
    assert "error" in capsys.readouterr().err


def test_missing_file_exit_code(tmp_path, capsys):
    weights = write_triples(tmp_path, "w.json", [["a", "b", 1.0]])
    assert main(["match", "--instance", str(tmp_path / "nope.json"), "--weights", weights]) == 2
    capsys.readouterr()


def test_malformed_weights_exit_code(tmp_path, triangle_file, capsys):
    bad = tmp_path / "w.json"
    bad.write_text(json.dumps({"a-b": 1.0}), encoding="utf-8")
    assert main(["match", "--instance", triangle_file, "--weights", str(bad)]) == 2
    assert "triples" in capsys.readouterr().err


def test_gamma_command(stability_file, capsys):
    assert main(["gamma", "--instance", stability_file, "--policy", "alg1"]) == 0
    doc = json.loads(capsys.readouterr().out)
    assert doc["gamma"] == pytest.approx(0.6166044765744043)
    assert doc["policy"] == "alg1"
    assert set(doc["edge_bound"]) == {"a-b", "a-c", "b-c"}


def test_chain_sweep_stdout(capsys):
    assert (
        main(
            [
                "chain-sweep",
                "--lambdas",
                "0.3",
                "--mu-factors",
                "0.05",
                "--buffers",
                "2,4",
                "--variants",
                "alg1",
            ]
        )
        == 0
    )
    out = capsys.readouterr().out
    lines = out.strip().split("\n")
    assert lines[0] == "lambda,mu,B,variant,C,gamma,gamma_product,effective_gamma"
    assert len(lines) == 3


def test_chain_sweep_files_deterministic(tmp_path, capsys):
    argv = [
        "chain-sweep",
        "--lambdas",
        "0.2,0.3",
        "--mu-factors",
        "0.1",
        "--buffers",
        "2,3",
        "--out",
        str(tmp_path / "sweep.csv"),
        "--compare-out",
        str(tmp_path / "cmp.json"),
    ]
    assert main(argv) == 0
    first = (tmp_path / "sweep.csv").read_bytes()
    meta = json.loads((tmp_path / "sweep.csv.meta.json").read_text(encoding="utf-8"))
    cmp_doc = json.loads((tmp_path / "cmp.json").read_text(encoding="utf-8"))
    assert meta["grid"]["lambdas"] == [0.2, 0.3]
    assert cmp_doc["points"] == 4
    assert main(argv) == 0
    assert (tmp_path / "sweep.csv").read_bytes() == first
    capsys.readouterr()


def test_simulate_stats_and_trace(tmp_path, stability_file):
    stats_path = tmp_path / "stats.json"
    trace_path = tmp_path / "trace.csv"
    argv = [
        "simulate",
        "--instance",
        stability_file,
        "--frame",
        "20",
        "--horizon",
        "400",
        "--seed",
        "5",
        "--alg",
        "1",
        "--trace-out",
        str(trace_path),
        "--stats-out",
        str(stats_path),
    ]
    assert main(argv) == 0
    doc = json.loads(stats_path.read_text(encoding="utf-8"))
    assert doc["horizon"] == 400
    assert doc["policy"] == "alg1"
    trace = trace_path.read_text(encoding="utf-8").strip().split("\n")
    assert len(trace) == 401
    # byte-identical rerun
    first = stats_path.read_bytes(), trace_path.read_bytes()
    assert main(argv) == 0
    assert (stats_path.read_bytes(), trace_path.read_bytes()) == first


def test_simulate_fixed_mixture(tmp_path, stability_file):
    x = write_triples(
        tmp_path, "x.json", [["a", "b", 0.15], ["a", "c", 0.15], ["b", "c", 0.15]]
    )
    stats_path = tmp_path / "stats.json"
    argv = [
        "simulate",
        "--instance",
        stability_file,
        "--horizon",
        "300",
        "--alg",
        "fixed",
        "--fixed-x",
        x,
        "--stats-out",
        str(stats_path),
    ]
    assert main(argv) == 0
    doc = json.loads(stats_path.read_text(encoding="utf-8"))
    assert doc["policy"] == "fixed-mixture"
    assert doc["lp_solves"] == 0


def test_simulate_fixed_requires_vector(stability_file, capsys):
    assert main(["simulate", "--instance", stability_file, "--horizon", "100", "--alg", "fixed"]) == 2
    assert "fixed-x" in capsys.readouterr().err


def test_figures_command(tmp_path):
    out = tmp_path / "figs"
    assert main(["figures", "--out-dir", str(out)]) == 0
    names = sorted(p.name for p in out.iterdir())
    assert names == [
        "availability_sweep.csv",
        "availability_sweep.csv.meta.json",
        "gap_profile.csv",
        "gap_profile.csv.meta.json",
    ]
    sweep = (out / "availability_sweep.csv").read_text(encoding="utf-8").strip().split("\n")
    # header plus 5 lambdas x 2 factors x 5 buffers x 2 variants
    assert len(sweep) == 101
    gaps = (out / "gap_profile.csv").read_text(encoding="utf-8").strip().split("\n")
    # header plus 1 lambda x 2 factors x 21 buffers
    assert len(gaps) == 43
