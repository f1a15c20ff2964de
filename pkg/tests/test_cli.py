import hashlib
import json
import shutil
import subprocess
import sys

import pytest

from sepcube.cli import EXIT_CAP, EXIT_FAIL, EXIT_OK, EXIT_USAGE, main
from sepcube.constructions import Graph, write_graph
from sepcube.cube import BoolSet, write_boolset
from sepcube.polytope import box, read_ef, read_hpoly, write_hpoly


@pytest.fixture
def files(tmp_path):
    A = BoolSet.from_points(3, ["100", "011", "111"])
    write_boolset(tmp_path / "A.set", A)
    write_hpoly(tmp_path / "box.hpoly", box(3))
    G = Graph(6, [(0, 3), (0, 4), (1, 4), (2, 5)], (range(3), range(3, 6)))
    write_graph(tmp_path / "G.graph", G)
    return tmp_path


def run_json(capsys, argv):
    code = main(argv + ["--json"])
    out = capsys.readouterr().out
    return code, json.loads(out)


def test_construct_hamming(files, capsys):
    code, rep = run_json(capsys, ["construct", "--kind", "hamming", "--set", str(files / "A.set"),
                                  "--out", str(files / "P.hpoly")])
    assert code == EXIT_OK
    assert rep["schema"] == 1 and rep["outcome"] == "pass"
    assert rep["metrics"]["inequalities"] == 8
    assert len(read_hpoly(files / "P.hpoly")) == 8
    assert list(rep["inputs"].values())[0] == hashlib.sha256((files / "A.set").read_bytes()).hexdigest()


def test_construct_halfsquare_counts(files, capsys):
    code, rep = run_json(capsys, ["construct", "--kind", "halfsquare", "--set", str(files / "A.set"),
                                  "--out", str(files / "P.ef")])
    assert code == EXIT_OK
    ef = read_ef(files / "P.ef")
    n1, n2 = ef.part.n1, ef.part.n2
    assert rep["metrics"]["inequalities"] == 2 * (n1 + n2) == 12


def test_unknown_kind_is_usage_error(files):
    with pytest.raises(SystemExit) as err:
        main(["construct", "--kind", "nope", "--out", str(files / "x")])
    assert err.value.code == EXIT_USAGE


def test_missing_flag_is_usage_error(files, capsys):
    code, rep = run_json(capsys, ["construct", "--kind", "hamming", "--out", str(files / "x")])
    assert code == EXIT_USAGE and rep["outcome"] == "error" and "--set" in rep["error"]


def test_parse_error_is_usage_error(files, capsys):
    (files / "bad.set").write_text("SET 2\n01\n")
    code, rep = run_json(capsys, ["construct", "--kind", "hamming", "--set", str(files / "bad.set"),
                                  "--out", str(files / "x")])
    assert code == EXIT_USAGE and "line 2" in rep["error"]


def test_verify_halfsquare_and_cross_check(files, capsys):
    main(["construct", "--kind", "halfsquare", "--set", str(files / "A.set"), "--out", str(files / "P.ef")])
    capsys.readouterr()
    code = main(["verify", "--ef", str(files / "P.ef"), "--set", str(files / "A.set"), "--cross-check"])
    rep = json.loads(capsys.readouterr().out)
    assert code == EXIT_OK and rep["passed"]
    assert rep["cross_check"] == {"methods": ["CANONICAL_LIFT", "FM_ORACLE"], "agree": True}


def test_verify_box_fails_with_mismatches(files, capsys):
    code = main(["verify", "--poly", str(files / "box.hpoly"), "--set", str(files / "A.set")])
    rep = json.loads(capsys.readouterr().out)
    assert code == EXIT_FAIL
    assert rep["mismatch_count"] == 5
    assert {m["expected"] for m in rep["mismatches"]} == {"out"}


def test_verify_report_file(files, capsys):
    report = files / "r.json"
    code = main(["verify", "--poly", str(files / "box.hpoly"), "--set", str(files / "A.set"), "--report", str(report)])
    assert code == EXIT_FAIL
    assert capsys.readouterr().out == ""
    assert json.loads(report.read_text())["method"] == "DIRECT"


def test_verify_cap_exit_code(files, capsys):
    A = BoolSet.from_int(6, 0x5A5A_F00F_1234_8765)
    write_boolset(files / "B.set", A)
    main(["construct", "--kind", "halfsquare", "--set", str(files / "B.set"), "--out", str(files / "B.ef")])
    capsys.readouterr()
    code, rep = run_json(capsys, ["verify", "--ef", str(files / "B.ef"), "--set", str(files / "B.set"),
                                  "--method", "oracle", "--cap", "40"])
    assert code == EXIT_CAP and rep["outcome"] == "error"


def test_project_and_check_contain(files, capsys):
    code, rep = run_json(capsys, ["project", "--poly", str(files / "box.hpoly"), "--coords", "1,3",
                                  "--out", str(files / "proj.hpoly")])
    assert code == EXIT_OK and rep["parameters"]["coords"] == [1, 3]
    assert read_hpoly(files / "proj.hpoly").dim == 2
    write_hpoly(files / "big.hpoly", box(3, 0, 2))
    assert main(["check-contain", "--inner", str(files / "box.hpoly"), "--outer", str(files / "big.hpoly")]) == EXIT_OK
    assert main(["check-contain", "--inner", str(files / "big.hpoly"), "--outer", str(files / "box.hpoly")]) == EXIT_FAIL


def test_relaxation_contained_in_pairwise(files, capsys):
    main(["construct", "--kind", "rpg", "--graph", str(files / "G.graph"), "--out", str(files / "r.hpoly")])
    main(["construct", "--kind", "qg", "--graph", str(files / "G.graph"), "--out", str(files / "q.hpoly")])
    capsys.readouterr()
    assert main(["check-contain", "--inner", str(files / "r.hpoly"), "--outer", str(files / "q.hpoly")]) == EXIT_OK
    assert json.loads(capsys.readouterr().out) == {"contained": True}


def test_matrix_decompose_verify(files, capsys):
    assert main(["matrix", "--graph", str(files / "G.graph"), "--out", str(files / "M.txt")]) == EXIT_OK
    assert (files / "M.txt").read_text().startswith("MATRIX dense 4 11")
    assert main(["decompose", "--graph", str(files / "G.graph"), "--out", str(files / "D.txt")]) == EXIT_OK
    capsys.readouterr()
    assert main(["verify-decomp", "--graph", str(files / "G.graph"), "--decomp", str(files / "D.txt")]) == EXIT_OK
    assert json.loads(capsys.readouterr().out) == {"passed": True}
    # duplicate the first rectangle to force a double cover
    lines = (files / "D.txt").read_text().splitlines()
    k = int(lines[0].split()[1])
    (files / "D2.txt").write_text("\n".join([f"RECT {k + 1}"] + lines[1:] + lines[1:3]) + "\n")
    assert main(["verify-decomp", "--graph", str(files / "G.graph"), "--decomp", str(files / "D2.txt")]) == EXIT_FAIL
    assert json.loads(capsys.readouterr().out)["reason"] == "double-cover"


def test_suite_examples(capsys):
    assert main(["suite", "--seed", "7", "--max-n", "6", "--trials", "3"]) == EXIT_OK
    out = capsys.readouterr().out
    assert out.count("PASS") == 8 and "FAIL" not in out
    assert main(["suite", "--only", "ode-halfspace", "--n", "4", "--exhaustive"]) == EXIT_OK
    assert "PASS odd-halfspace" in capsys.readouterr().out
    assert main(["suite", "--max-n", "30"]) == EXIT_CAP
    assert main(["suite", "--only", "nonsense"]) == EXIT_USAGE


def test_env_cap_override(monkeypatch, capsys):
    monkeypatch.setenv("SEPCUBE_MAX_N", "5")
    assert main(["suite", "--max-n", "6", "--only", "hamming"]) == EXIT_CAP


def test_reports_are_deterministic(files, capsys):
    argv = ["construct", "--kind", "halfsquare", "--set", str(files / "A.set"), "--out", str(files / "P.ef")]
    _, first = run_json(capsys, argv)
    text1 = (files / "P.ef").read_bytes()
    _, second = run_json(capsys, argv)
    assert first == second and (files / "P.ef").read_bytes() == text1
    _, rep = run_json(capsys, ["suite", "--max-n", "5", "--trials", "2"])
    _, again = run_json(capsys, ["suite", "--max-n", "5", "--trials", "2"])
    assert rep == again
    _, timed = run_json(capsys, argv + ["--timing"])
    assert "wall_time_s" in timed["metrics"]


def test_threads_do_not_change_results(files, capsys):
    A = BoolSet.from_int(10, 12345678901234567890)
    write_boolset(files / "T.set", A)
    main(["construct", "--kind", "hamming", "--set", str(files / "T.set"), "--out", str(files / "T.hpoly")])
    capsys.readouterr()
    outs = []
    for k in ("1", "4"):
        assert main(["verify", "--poly", str(files / "T.hpoly"), "--set", str(files / "T.set"), "--threads", k]) == EXIT_OK
        outs.append(capsys.readouterr().out)
    assert outs[0] == outs[1]


@pytest.mark.skipif(shutil.which("sepcube") is None, reason="console script not installed")
def test_console_script(files):
    proc = subprocess.run(["sepcube", "suite", "--max-n", "4", "--trials", "2", "--json"],
                          capture_output=True, text=True)
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["outcome"] == "pass"


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "sepcube.cli", "suite", "--only", "parity-count", "--max-n", "4"],
                          capture_output=True, text=True)
    assert proc.returncode == 0 and proc.stdout.startswith("PASS parity-count")
