import json
import subprocess
import sys

import pytest

from fulldof import formats
from fulldof.cli import RunConfig, dispatch, main


def write(tmp_path, name, obj):
    p = tmp_path / name
    p.write_text(obj if isinstance(obj, str) else json.dumps(obj, indent=2))
    return str(p)


@pytest.fixture
def ones(tmp_path):
    return write(tmp_path, "ones.json", {"entries": [["1"] * 3] * 3})


@pytest.fixture
def bits(tmp_path):
    bit = {"support": ["0", "1"], "probs": ["1/2", "1/2"]}
    return write(tmp_path, "bits.json", {"rvs": [bit, bit, bit]})


def run(argv, tmp_path):
    out = tmp_path / "report.json"
    code = main(argv + ["--out", str(out)])
    return code, json.loads(out.read_text())


def test_check_all_ones_witnesses(ones, tmp_path):
    code, rep = run(["check", "--matrix", ones, "--N", "2", "--d", "0"], tmp_path)
    assert code == 2 and rep["verdict"] == "witness"
    assert [u["verdict"] for u in rep["users"]] == ["witness"] * 3
    assert all(u["lhs"] == u["rhs"] for u in rep["users"])
    code, rep = run(["check", "--matrix", ones, "--N", "2", "--d", "0", "--first-only"], tmp_path)
    assert len(rep["users"]) == 1


def test_check_certificate_exit_zero(tmp_path):
    m = write(tmp_path, "m.json", {"entries": [["100", "1", "1"], ["1", "101", "1"], ["1", "1", "103"]]})
    code, rep = run(["check", "--matrix", m, "--N", "2", "--d", "0"], tmp_path)
    assert code == 0 and rep["verdict"] == "certificate"
    code, rep2 = run(["oracle", "--matrix", m, "--N", "2", "--d", "0"], tmp_path)
    assert code == 0


def test_check_cap_is_unknown(tmp_path):
    m = write(tmp_path, "m.json", {"entries": [["1/7", "2", "1/2"], ["3", "5", "-1"], ["2/3", "11", "13"]]})
    code, rep = run(["check", "--matrix", m, "--N", "5", "--d", "1", "--cap", "100"], tmp_path)
    assert code == 1 and rep["verdict"] == "unknown"


def test_not_fully_connected_is_error(tmp_path):
    m = write(tmp_path, "m.json", {"entries": [["1", "0"], ["1", "1"]]})
    code, rep = run(["check", "--matrix", m, "--N", "2", "--d", "0"], tmp_path)
    assert code == 1 and "(1, 2)" in rep["error"]


def test_symbolic_check(tmp_path):
    m = write(tmp_path, "m.json", {"entries": [["1", "1", "1"], ["1", "1", "1"], ["1", "5", "1"]]})
    code, rep = run(["check", "--matrix", m, "--N", "2", "--d", "1", "--symbolic", "--user", "1",
                     "--diagonal", "0,1;1"], tmp_path)
    assert code == 2 and rep["users"][0]["af"] == [0, 1]


def test_canonicalize_identity(ones, tmp_path):
    code, rep = run(["canonicalize", "--matrix", ones], tmp_path)
    assert code == 0
    assert rep["canonical"] == {"g": ["1"] * 3, "h": "1", "rows": ["1"] * 3, "cols": ["1"] * 3}


def test_wset(ones, tmp_path):
    code, rep = run(["wset", "--matrix", ones, "--N", "3", "--d", "1"], tmp_path)
    assert code == 0 and rep["values"] == [str(k) for k in range(15)]


def test_entropy_prints_bound(bits, capsys):
    assert main(["entropy", "--rvs", bits, "--coeffs", "1,1,0"]) == 0
    assert capsys.readouterr().out.startswith("H = 1.5 bits")


def test_ratio(tmp_path, bits):
    m = write(tmp_path, "m.json", {"entries": [["2", "1", "1"], ["1", "3", "1"], ["1", "1", "5"]]})
    code, rep = run(["ratio", "--matrix", m, "--rvs", bits, "--epsilon", "1/10"], tmp_path)
    assert code == 0 and rep["balancing"]["verdict"] in ("holds", "not-applicable")


def test_verify_small(tmp_path):
    code, rep = run(["verify", "--suite", "subadditivity", "--instances", "10", "--seed", "1"], tmp_path)
    assert code == 0 and rep["verdict"] == "all-hold"
    assert len(rep["suites"][0]["records"]) == 10
    assert all(r["verdict"] == "holds" for r in rep["suites"][0]["records"])


def test_replay_probe(tmp_path, bits):
    m = write(tmp_path, "m.json", {"entries": [["5/3", "1", "1"], ["1", "1", "1"], ["1", "2", "1"]]})
    code, rep = run(["replay", "probe", "--matrix", m, "--rvs", bits, "--coeffs", "1,2;1,1",
                     "--N", "3", "--d", "1"], tmp_path)
    assert code == 0 and rep["verdict"] == "all-hold"
    code, rep = run(["replay", "base", "--matrix", m, "--rvs", bits, "--coeffs", "2,1"], tmp_path)
    assert code == 0
    code, rep = run(["replay", "step", "--matrix", m, "--rvs", bits, "--coeffs", "1,1;1,1"], tmp_path)
    assert code == 0


def test_parse_errors_name_field_and_line(tmp_path):
    bad = write(tmp_path, "bad.json", '{\n  "entries": [\n    ["1", "2"],\n    ["3", "x/y"]\n  ]\n}\n')
    with pytest.raises(formats.InputError) as e:
        formats.load_matrix(bad)
    assert "entries[1][1]" in str(e.value) and "line 4" in str(e.value)
    broken = write(tmp_path, "broken.json", '{\n  "entries": [\n    ["1", "2"\n  ]\n}\n')
    with pytest.raises(formats.InputError) as e:
        formats.load_matrix(broken)
    assert "line 5" in str(e.value)
    rv = write(tmp_path, "rv.json", '{\n "support": ["0", "1"],\n "probs": ["1/2", "1/3"]\n}\n')
    with pytest.raises(formats.InputError) as e:
        formats.load_rvs(rv)
    assert "line 3" in str(e.value)


def test_parse_error_exit_code(tmp_path, capsys):
    bad = write(tmp_path, "bad.json", '{"entries": [["1", 0.5], ["1", "1"]]}')
    assert main(["canonicalize", "--matrix", bad]) == 1
    assert "entries[0][1]" in capsys.readouterr().err


def test_config_validation(ones):
    assert main(["check", "--matrix", ones, "--N", "2", "--d", "0", "--workers", "0"]) == 1
    code, rep = dispatch(RunConfig("check", matrix=ones, N=2))
    assert code == 1 and "--d" in rep["error"]


def test_report_write_is_atomic(tmp_path):
    target = tmp_path / "sub" / "r.json"
    formats.write_report({"a": 1}, target)
    assert json.loads(target.read_text()) == {"a": 1}
    assert [p.name for p in target.parent.iterdir()] == ["r.json"]


def test_determinism_across_workers(tmp_path):
    reports = []
    for w in ("1", "2"):
        out = tmp_path / f"r{w}.json"
        main(["verify", "--suite", "balancing", "--instances", "25", "--seed", "5", "--workers", w, "--report", str(out)])
        reports.append(formats.strip_timestamp(json.loads(out.read_text())))
    assert json.dumps(reports[0]) == json.dumps(reports[1])


def test_console_script_runs(ones):
    r = subprocess.run([sys.executable, "-m", "fulldof.cli", "check", "--matrix", ones, "--N", "2", "--d", "0"],
                       capture_output=True, text=True)
    assert r.returncode == 2 and json.loads(r.stdout)["verdict"] == "witness"
