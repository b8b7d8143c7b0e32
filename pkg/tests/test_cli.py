import json
import subprocess
import sys

import pytest

from sigcontain.cli import main
from sigcontain.graph import parse_graph

THREE_ROOTS = """#n: 8
#leaders: 0
0 0 +
1 1 +
2 2 +
3 3 +
4 4 +
5 5 +
6 6 +
7 7 +
1 2 +
2 1 -
3 4 -
4 3 -
1 6 +
3 6 -
5 7 +
"""


@pytest.fixture
def graph_file(tmp_path):
    p = tmp_path / "g.txt"
    p.write_text(THREE_ROOTS)
    return str(p)


def run_cli(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_analyze(graph_file, capsys, tmp_path):
    dot = tmp_path / "c.dot"
    code, out, _ = run_cli(capsys, "analyze", graph_file, "--dot", str(dot))
    assert code == 0
    doc = json.loads(out)
    assert doc["n"] == 8 and doc["leaders"] == [0]
    types = {tuple(s["parts"][0]) if s["type"] != 2 else tuple(sorted(sum(s["parts"], []))):
             s["type"] for s in doc["sccs"]}
    assert types[(1, 2)] == 3 and types[(3, 4)] == 2
    assert doc["signed"]["n_levels"] == doc["classic"]["n_levels"]
    assert dot.read_text().startswith("digraph")


def test_steady_leaders_only(tmp_path, capsys):
    p = tmp_path / "l.txt"
    p.write_text("#leaders: 0 1 2\n0 0 +\n1 1 +\n2 2 +\n")
    code, out, _ = run_cli(capsys, "steady", str(p), "--leader-states=-1,0.5,1")
    assert code == 0
    doc = json.loads(out)
    assert doc["contained"] == [] and doc["bound"] == 1.0


def test_steady_csv_and_x0_file(graph_file, tmp_path, capsys):
    x0 = tmp_path / "x0.txt"
    x0.write_text("1 4 -4 2 6 3 0 0\n")
    csv = tmp_path / "s.csv"
    code, out, _ = run_cli(capsys, "steady", graph_file, "--x0", str(x0), "--csv", str(csv))
    assert code == 0
    doc = json.loads(out)
    # {1,2} is unbalanced -> 0; {3,4} is balanced with alpha = (2 - 6)/2 = -2
    assert doc["xbar"][1] == pytest.approx(0, abs=1e-12)
    assert doc["xbar"][3] == pytest.approx(-2) and doc["xbar"][4] == pytest.approx(2)
    assert csv.read_text().startswith("node,scc,type,xbar,contained\n")


def test_place_full_budget(graph_file, capsys, tmp_path):
    lp = tmp_path / "m.lp"
    code, out, _ = run_cli(capsys, "place", graph_file, "-d", "3", "--export-lp", str(lp))
    assert code == 0
    doc = json.loads(out)
    assert doc["n_roots"] == 3 and doc["selected_roots"] == [1, 2, 3]
    assert doc["objective"] == 7
    assert lp.read_text().startswith("Maximize\n")


def test_place_budget_too_large(graph_file, capsys):
    code, _, err = run_cli(capsys, "place", graph_file, "-d", "4")
    assert code == 2 and "4" in err


def test_simulate(graph_file, capsys, tmp_path):
    trace = tmp_path / "t.csv"
    code, out, _ = run_cli(capsys, "simulate", graph_file, "--x0", "5", "--trace", str(trace))
    assert code == 0
    doc = json.loads(out)
    assert doc["converged"] and doc["phi"] == [] and doc["x0_seed"] == 5
    assert trace.read_text().startswith("k,x_0,")


def test_simulate_cap_is_numeric_failure(graph_file, capsys):
    code, _, _ = run_cli(capsys, "simulate", graph_file, "--max-iters", "3")
    assert code == 3


def test_generate_and_pipeline(tmp_path, capsys):
    spec = tmp_path / "spec.json"
    spec.write_text(json.dumps({"levels": 2, "sccs_per_level": [2, 2],
                                "scc_size_range": [2, 6], "n_leaders": 2}))
    out = tmp_path / "g.txt"
    code, _, _ = run_cli(capsys, "generate", "--spec", str(spec), "--seed", "3", "-o", str(out))
    assert code == 0
    g = parse_graph(out.read_text())
    assert g.leaders == (0, 1)
    code, text, _ = run_cli(capsys, "pipeline", str(out), "-d", "1", "--trials", "3")
    assert code == 0
    doc = json.loads(text)
    assert doc["ok"] and doc["source"] == "graph" and len(doc["trials"]) == 3
    assert all(t["max_abs_sim_vs_steady"] < 1e-6 for t in doc["trials"])
    code, text, _ = run_cli(capsys, "pipeline", str(spec), "-d", "2", "--seed", "3")
    assert code == 0 and json.loads(text)["source"] == "spec"


@pytest.mark.parametrize("argv", [
    ["steady"],
    ["place", "x.txt"],
    ["nonsense"],
    ["simulate", "x.txt", "--stride", "abc"],
])
def test_usage_errors(argv, capsys):
    with pytest.raises(SystemExit) as exc:
        main(argv)
    assert exc.value.code == 1


@pytest.mark.parametrize("text", ["0 1 +\n0 1 -\n", "0 0 +\n0 q +\n", "{\"n\": 2"])
def test_data_errors(text, tmp_path, capsys):
    p = tmp_path / "bad.txt"
    p.write_text(text)
    code, _, err = run_cli(capsys, "analyze", str(p))
    assert code == 2 and err


def test_missing_file(capsys):
    assert run_cli(capsys, "analyze", "/nonexistent/graph.txt")[0] == 2


def test_repeat_runs_are_byte_identical(tmp_path):
    outs = []
    for k in range(2):
        path = tmp_path / f"r{k}.json"
        subprocess.run([sys.executable, "-m", "sigcontain", "pipeline", "reference", "-d", "2",
                        "--trials", "1", "--seed", "11", "--json", str(path)], check=True)
        outs.append(path.read_bytes())
    assert outs[0] == outs[1]


@pytest.mark.parametrize("sub", ["steady", "simulate", "pipeline"])
def test_help_lists_numeric_defaults(sub, capsys):
    with pytest.raises(SystemExit) as exc:
        main([sub, "--help"])
    assert exc.value.code == 0
    out = " ".join(capsys.readouterr().out.split())
    assert "(default: (-10.0, 10.0))" in out
    if sub != "steady":
        assert "(default: 1e-12)" in out and "(default: 100000)" in out
