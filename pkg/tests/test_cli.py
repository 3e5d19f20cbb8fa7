import json
import subprocess
import sys

import pytest

from zpc import cli
from zpc.zero_store import load_native


def run(argv, capsys):
    code = cli.main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


@pytest.fixture(scope="module")
def z100(tmp_path_factory):
    p = tmp_path_factory.mktemp("cli") / "z100.zpc"
    assert cli.main(["zeros", "compute", "--t-min", "10", "--t-max", "100", "--out", str(p)]) == 0
    return p


@pytest.fixture
def line_file(tmp_path, capsys):
    spec = tmp_path / "spec.json"
    spec.write_text(json.dumps({"seeds": [[0.4, 20, 1], [0.5, 20, 1]]}))
    out = tmp_path / "line.zpc"
    assert run(["synth", "build", "--spec", spec, "--out", out], capsys)[0] == 0
    return out


def test_bounds_json(capsys):
    code, out, _ = run(["bounds", "--c", "1.3333333333"], capsys)
    d = json.loads(out)
    assert code == 0 and d["valid"] is True
    assert round(d["simple"], 4) == 0.6667 and round(d["critical"], 4) == 0.6667
    assert round(d["simple_and_critical"], 4) == 0.3333


def test_compute(z100, capsys):
    zs = load_native(z100)
    assert len(zs) == 29 and zs.certificate.certified


def test_count(z100, capsys):
    code, out, _ = run(["stats", "count", "--t", "100", "--zeros", z100], capsys)
    d = json.loads(out)
    assert code == 0 and d["count"] == 29 and abs(d["theta_difference"]) < 1


def test_decompose(line_file, capsys):
    code, out, _ = run(["stats", "decompose", "--zeros", line_file], capsys)
    d = json.loads(out)
    assert (d["lhs_bruteforce"], d["diag"], d["sym_diag"], d["nonsym_horiz"]) == (9, 3, 2, 4)


def test_fejer_integral_check(z100, capsys):
    code, out, _ = run(["stats", "fejer", "--t", "100", "--zeros", z100, "--integral-check"], capsys)
    d = json.loads(out)
    assert code == 0 and d["integral_form"]["relative_deviation"] < 1e-10


def test_paircorr_csv(z100, capsys):
    code, out, _ = run(["stats", "paircorr", "--lambda-max", "3", "--bins", "6", "--zeros", z100,
                        "--format", "csv"], capsys)
    lines = out.splitlines()
    assert code == 0 and lines[0] == "bin_lo,bin_hi,empirical,predicted,raw_count" and len(lines) == 7


def test_es_and_table(z100, capsys):
    code, out, _ = run(["stats", "es", "--lambda", "0.25", "--zeros", z100, "--format", "table"], capsys)
    assert code == 0 and "ratio" in out


def test_bounds_box(z100, capsys):
    code, out, _ = run(["bounds", "box", "--b", "0.3", "--t", "50", "--zeros", z100], capsys)
    d = json.loads(out)
    assert code == 0 and d["hypothesis_holds"] and d["conclusions"]


def test_ingest_and_export(tmp_path, z100, capsys):
    txt = tmp_path / "z.txt"
    assert run(["zeros", "export", "--zeros", z100, "--as", "odlyzko", "--out", txt], capsys)[0] == 0
    nat = tmp_path / "z.zpc"
    code, out, _ = run(["zeros", "ingest", "--format", "odlyzko", "--in", txt, "--out", nat], capsys)
    assert code == 0 and json.loads(out)["records"] == 29
    # plain text files are accepted wherever a zero file is expected
    assert run(["stats", "count", "--t", "90", "--zeros", txt], capsys)[0] == 0
    # the text format only reaches its last ordinate, so (0, 100] is not covered
    assert run(["stats", "count", "--t", "100", "--zeros", txt], capsys)[0] == 2


def test_full_precision_json(z100, capsys):
    _, out, _ = run(["stats", "fejer", "--t", "100", "--zeros", z100], capsys)
    total = json.loads(out)["total"]
    from zpc.paircorr import fejer_double_sum
    assert total == fejer_double_sum(load_native(z100), 100.0).total


@pytest.mark.parametrize("argv", [
    [],
    ["bounds"],
    ["stats", "fejer", "--t", "5", "--zeros", "x"],
    ["stats", "fejer", "--t", "100"],
    ["stats", "paircorr", "--lambda-max", "3", "--bins", "2", "--zeros", "x"],
    ["zeros", "compute", "--t-min", "50", "--t-max", "20", "--out", "x"],
    ["stats", "fejer", "--t", "100", "--zeros", "x", "--threads", "0"],
    ["nonsense"],
])
def test_usage_errors(argv, capsys):
    code, out, err = run(argv, capsys)
    assert code == 1 and out == ""
    assert err.startswith("error:") and "usage:" in err


def test_data_errors(tmp_path, capsys):
    bad = tmp_path / "bad.txt"
    bad.write_text("14.1\nabc\n")
    code, _, err = run(["stats", "count", "--t", "20", "--zeros", bad], capsys)
    assert code == 2 and "line 2" in err
    assert run(["stats", "count", "--t", "20", "--zeros", tmp_path / "missing"], capsys)[0] == 2


def test_out_is_idempotent(tmp_path, z100, capsys):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    for p in (a, b, a):
        assert run(["stats", "fejer", "--t", "100", "--zeros", z100, "--out", p], capsys)[0] == 0
    assert a.read_bytes() == b.read_bytes()
    z1, z2 = tmp_path / "1.zpc", tmp_path / "2.zpc"
    for p in (z1, z2):
        run(["zeros", "compute", "--t-min", "10", "--t-max", "60", "--out", p], capsys)
    assert z1.read_bytes() == z2.read_bytes()


def test_threads_env_default(monkeypatch, z100, capsys):
    monkeypatch.setenv("ZPC_THREADS", "3")
    args = cli.build_parser().parse_args(["stats", "es", "--lambda", "1", "--zeros", "x"])
    assert args.threads == 3


def test_module_entry_point():
    r = subprocess.run([sys.executable, "-m", "zpc", "bounds", "--c", "1"], capture_output=True, text=True)
    assert r.returncode == 0 and json.loads(r.stdout)["simple_and_critical"] == 1.0
