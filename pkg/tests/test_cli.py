import json
import subprocess
import sys

import pytest

from chacon_lab.cli import main

GRAPH = '{"n0": 1, "offsets": [0, 0]}'
WEIRD = '{"n0": 1, "offsets": [0, 0], "taus": [[1, 3], [1, 1]], "tail": "repeat"}'
DISS = '{"n0": 1, "offsets": [0, 0], "taus": [[1, 3]], "tail": "repeat"}'


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def run_json(capsys, *argv):
    code, out, _ = run(capsys, *argv)
    return code, json.loads(out)


def test_tower_table(capsys):
    code, out, _ = run(capsys, "tower", "--depth", "3")
    assert code == 0
    assert out.strip().splitlines() == ["n,h_n,L_n", "0,1,1", "1,8,8/3", "2,50,50/9", "3,302,302/27"]


def test_tower_levels(capsys):
    code, out, _ = run(capsys, "tower", "--levels", "1")
    lines = out.strip().splitlines()
    assert lines[0] == "level,left,right" and len(lines) == 9 and lines[-1] == "7,7/3,8/3"


def test_orbit(capsys):
    code, out, _ = run(capsys, "orbit", "--point", "0", "--steps", "2")
    assert out.strip().splitlines() == ["j,x1", "0,0", "1,1/3", "2,1"]


def test_crossings_and_lemmas(capsys):
    code, data = run_json(capsys, "crossings", "--point", "0,0", "--n", "2", "--j-max", "100")
    assert [c["start"] for c in data["crossings"]] == [0, 50]
    code, data = run_json(capsys, "verify", "lemma24", "--d", "2", "--n", "2", "--window", "2000",
                          "--point", "0,4/3")
    assert code == 0 and data["failed"] == 0
    code, data = run_json(capsys, "verify", "lemma22", "--n", "1", "--g1", "1")
    assert code == 0 and data["failed"] == 0 and data["checked"] > 0
    code, data = run_json(capsys, "verify", "lemma22", "--d", "2", "--n", "1")
    assert code == 0 and data["total"]["failed"] == 0 and len(data["runs"]) == 4
    code, data = run_json(capsys, "verify", "lemma23", "--n", "2", "--ell", "2")
    assert code == 0
    code, data = run_json(capsys, "verify", "lemma25", "--n", "2", "--point", "0,0")
    assert code == 0 and data["checked"] > 0
    code, data = run_json(capsys, "verify", "lemma26", "--point", "0", "--n-max", "3")
    assert code == 0 and [h["n"] for h in data["special_depths"]] == [2, 3]


def test_verify_measures(capsys):
    assert run_json(capsys, "verify", "seen", "--family", WEIRD, "--depth", "5", "--j-min", "0",
                    "--j-max", "100")[0] == 0
    code, data = run_json(capsys, "verify", "graph-identity", "--family", '{"n0":1,"offsets":[0,2]}', "--n", "2")
    assert code == 0 and data["alpha"] == "3/2"
    assert run_json(capsys, "verify", "additivity", "--family", WEIRD, "--n", "2")[0] == 0


def test_diagonal_commands(capsys):
    code, data = run_json(capsys, "diagonal", "refine", "--depth", "1", "--offsets", "0,3", "--tau", "1,3")
    assert data["to"]["offsets"] == [0, 20]
    code, data = run_json(capsys, "diagonal", "check", "--family", WEIRD, "--up-to", "4")
    assert code == 0 and [d["offsets"] for d in data["diagonals"]][-1] == [0, 622]
    code, out, _ = run(capsys, "diagonal", "render")
    assert out.startswith("<svg") and out.count('data-kind="forbidden"') == 4


def test_measure_commands(capsys, tmp_path):
    code, data = run_json(capsys, "measure", "eval", "--family", WEIRD, "--box", "2:0,17")
    assert data["value"] == "1/4" and data["derived_by_restriction"] is False
    code, data = run_json(capsys, "measure", "eval", "--family", '{"n0":2,"offsets":[0,17]}', "--box", "1:0,0")
    assert data["derived_by_restriction"] is True
    code, out, _ = run(capsys, "measure", "halfcube", "--family", WEIRD, "--n-max", "2")
    assert out.strip().splitlines()[1:] == ["1,4,1/4,1,16,corner", "2,8,1/4,2,625,"]
    code, data = run_json(capsys, "measure", "classify", "--family", DISS)
    assert data["kind"] == "WeirdDissipative"
    code, data = run_json(capsys, "measure", "marginal", "--family", WEIRD, "--n", "2")
    assert data["compatible_levels"] == 8
    tensor = tmp_path / "t.csv"
    tensor.write_text("l1,l2,num,exp\n0,0,1,2\n0,1,1,2\n1,0,1,2\n1,1,1,2\n")
    code, data = run_json(capsys, "measure", "factorize", "--tensor", str(tensor))
    assert data["partition"] == [[1], [2]] and data["scale"] == "4/9"
    prod = '{"partition": [[1], [2]], "factors": [{"n0": 1, "offsets": [0]}, {"n0": 1, "offsets": [0]}]}'
    code, data = run_json(capsys, "measure", "eval", "--product", prod, "--box", "1:0,2")
    assert data["value"] == "1/16"


def test_witness_and_experiments(capsys):
    code, data = run_json(capsys, "witness", "make", "--family", GRAPH, "--depth", "3")
    assert data["point"][0] == data["point"][1]
    assert run_json(capsys, "witness", "check", "--family", GRAPH, "--depth", "4")[0] == 0
    code, data = run_json(capsys, "experiment", "hopf", "--family", GRAPH, "--steps", "18140", "--seed", "3")
    assert data["max_deviation"] <= 0.1 and data["seed"] == 3
    code, out, _ = run(capsys, "experiment", "hopf", "--family", GRAPH, "--steps", "50", "--format", "csv")
    assert out.splitlines()[0] == "levels,n_B,sigma,exact_ratio,empirical_ratio,deviation"
    code, data = run_json(capsys, "experiment", "counts", "--family", '{"n0":1,"offsets":[0]}', "--m", "1",
                          "--n", "2", "--point", "0")
    assert code == 0 and data["shift_check"]["failed"] == 0
    code, data = run_json(capsys, "experiment", "support", "--family", DISS, "--witness-depth", "5",
                          "--depths", "3,4")
    assert [r["crossings"] for r in data["rows"]] == [1, 1]


def test_render_to_file(capsys, tmp_path):
    target = tmp_path / "f1.svg"
    assert main(["render", "figure1", "--step", "2", "-o", str(target)]) == 0
    assert target.read_text().startswith("<svg")
    assert [p.name for p in tmp_path.iterdir()] == ["f1.svg"]
    assert main(["render", "figure2"]) == 0


def test_exit_codes(capsys):
    assert run(capsys, "tower", "--depth", "40")[0] == 2
    assert run(capsys, "diagonal", "refine", "--depth", "1", "--offsets", "0,0", "--tau", "1,2")[0] == 2
    assert run(capsys, "witness", "make", "--family", DISS, "--depth", "3")[0] == 2
    assert run(capsys, "experiment", "support", "--family", GRAPH)[0] == 2
    assert run(capsys, "measure", "eval", "--box", "1:0,0")[0] == 2
    with pytest.raises(SystemExit) as exc:
        main(["verify"])
    assert exc.value.code == 2
    # a family whose D_2 is not initial at depth 3 fails the check
    assert run(capsys, "diagonal", "check", "--family", '{"n0":3,"offsets":[0,0]}', "--up-to", "4")[0] == 1


def test_max_depth_env(monkeypatch, capsys):
    from chacon_lab.tower import _default

    monkeypatch.setenv("CHACON_MAX_DEPTH", "3")
    _default.cache_clear()
    try:
        code, out, _ = run(capsys, "tower")
        assert out.strip().splitlines()[-1] == "3,302,302/27"
    finally:
        monkeypatch.delenv("CHACON_MAX_DEPTH")
        _default.cache_clear()


def test_module_entry_point():
    res = subprocess.run([sys.executable, "-m", "chacon_lab", "tower", "--depth", "1"], capture_output=True,
                         text=True, check=True)
    assert res.stdout.splitlines()[-1] == "1,8,8/3"
