import csv
import io
import json

import pytest

from hexwalk.cli import EXIT_FAIL, EXIT_PASS, EXIT_RESOURCE, EXIT_USAGE, RunConfig, UsageError, main, parse_range
from hexwalk.enumerator import count_saws


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_parse_range():
    assert parse_range("0..2") == [0, 1, 2]
    assert parse_range("1,4") == [1, 4]
    with pytest.raises(UsageError):
        parse_range("a..b")


def test_run_config_validation():
    with pytest.raises(UsageError):
        RunConfig(workers=0)
    with pytest.raises(UsageError):
        RunConfig(fmt="xml")


def test_verify_triangle_identity(capsys):
    code, out, _ = run(capsys, "verify", "eq22", "--k", "0..2")
    rep = json.loads(out)
    assert code == EXIT_PASS and rep["status"] == "pass"
    assert [c["detail"]["exact"] for c in rep["checks"]] == ["0", "0", "0"]


def test_verify_triangle_identity_off_critical(capsys):
    code, out, _ = run(capsys, "verify", "eq22", "--x", "1/2")
    rep = json.loads(out)
    assert code == EXIT_FAIL and rep["status"] == "fail"
    assert any(c["detail"]["exact"] != "0" for c in rep["checks"])


def test_verify_vertex_off_critical(capsys):
    code, out, _ = run(capsys, "verify", "vertex-relation", "--k", "1", "--x", "1/2")
    assert code == EXIT_FAIL
    assert json.loads(out)["checks"][0]["detail"]["vertex"]


def test_verify_all_defaults(capsys):
    code, out, _ = run(capsys, "verify", "all", "--format", "csv")
    rows = list(csv.DictReader(io.StringIO(out)))
    assert code == EXIT_PASS
    assert rows and all(r["status"] in ("pass", "inconclusive") for r in rows)


def test_partition_D(capsys):
    code, out, _ = run(capsys, "partition", "D", "--k", "0..3", "--format", "csv")
    rows = list(csv.DictReader(io.StringIO(out)))
    assert code == EXIT_PASS and len(rows) == 4
    assert rows[0]["exact"] == "true" and rows[0]["decimal_12"] == "1.082392200292"
    assert all(r["lower"] == r["upper"] for r in rows)


def test_partition_B0(capsys):
    _, out, _ = run(capsys, "partition", "B", "--k", "0", "--cap", "10", "--format", "csv")
    row = next(csv.DictReader(io.StringIO(out)))
    assert row["lower"] == row["upper"] == "1"


def test_partition_G_cache(capsys, tmp_path):
    args = ["partition", "G", "--k", "1..8", "--cap", "12", "--cache-dir", str(tmp_path)]
    _, first, err1 = run(capsys, *args)
    _, second, err2 = run(capsys, *args)
    assert first == second
    assert "misses=1" in err1 and "hits=1" in err2
    _, bigger, _ = run(capsys, "partition", "G", "--k", "1..8", "--cap", "16")
    for a, b in zip(json.loads(first), json.loads(bigger)):
        assert float(a["decimal"]) <= float(b["decimal"])
    code, out, _ = run(capsys, "cache", "list", "--cache-dir", str(tmp_path))
    assert code == EXIT_PASS and len(json.loads(out)) == 1
    run(capsys, "cache", "clear", "--cache-dir", str(tmp_path))
    _, out, _ = run(capsys, "cache", "list", "--cache-dir", str(tmp_path))
    assert json.loads(out) == []


def test_partition_F(capsys):
    code, out, _ = run(capsys, "partition", "F", "--k", "1", "--start", "1,3", "--format", "csv")
    targets = [r["target"] for r in csv.DictReader(io.StringIO(out))]
    assert code == EXIT_PASS and targets == ["F^B", "F^L", "F^R", "F^T", "D^-"]


def test_unfold_certificate(capsys):
    code, out, _ = run(capsys, "unfold", "--n", "8")
    cert = json.loads(out)
    assert code == EXIT_PASS
    assert cert["horizontal_bridge"] and cert["length_preserved"]
    assert len(cert["input"]) == 9


def test_decompose_corpus(capsys):
    code, out, _ = run(capsys, "decompose", "--cap", "10")
    assert code == EXIT_PASS and json.loads(out)["round_trip"] is True


def test_decompose_file(capsys, tmp_path):
    f = tmp_path / "b.json"
    f.write_text("[[0,0],[1,3],[2,6],[3,9],[4,12]]")
    code, out, _ = run(capsys, "decompose", "--walk", str(f))
    rec = json.loads(out)
    assert code == EXIT_PASS and rec["round_trip"] and rec["I"] == [1, 1]


def test_displacement(capsys):
    code, out, _ = run(capsys, "displacement", "--n", "10", "--format", "csv")
    rows = list(csv.DictReader(io.StringIO(out)))
    assert code == EXIT_PASS
    assert sum(int(r["count"]) for r in rows) == count_saws(10)


def test_renewals(capsys):
    code, out, _ = run(capsys, "renewals", "--k", "1")
    profiles = json.loads(out)
    assert code == EXIT_PASS and profiles
    assert all(p["N"] == len(p["renewals"]) for p in profiles)


def test_render(capsys, tmp_path):
    f = tmp_path / "w.json"
    f.write_text("[[0, 0]]")
    out_path = tmp_path / "w.svg"
    assert main(["render", str(f), "--out", str(out_path)]) == EXIT_PASS
    first = out_path.read_text()
    main(["render", str(f), "--out", str(out_path)])
    assert out_path.read_text() == first
    f.write_text("[[0, 0],\n [1, 2]]")
    code, _, err = run(capsys, "render", str(f))
    assert code == EXIT_USAGE and ":2:" in err


def test_config_file(capsys, tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("# defaults\nk = 0..1\nformat = csv\n")
    code, out, _ = run(capsys, "verify", "eq22", "--config", str(cfg))
    assert code == EXIT_PASS and out.startswith("suite,check,status,detail")
    assert out.count("triangle identity k=") == 2
    cfg.write_text("nonsense\n")
    code, _, _ = run(capsys, "verify", "eq22", "--config", str(cfg))
    assert code == EXIT_USAGE


def test_usage_errors(capsys):
    assert run(capsys, "bogus")[0] == EXIT_USAGE
    assert run(capsys, "verify", "eq22", "--k", "x")[0] == EXIT_USAGE
    assert run(capsys, "verify", "eq22", "--x", "pi")[0] == EXIT_USAGE
    assert run(capsys, "partition", "G", "--k", "0")[0] == EXIT_USAGE


def test_resource_error(capsys):
    assert run(capsys, "partition", "D", "--k", "9")[0] == EXIT_RESOURCE
    assert run(capsys, "partition", "B", "--k", "2", "--cap", "20", "--budget", "50")[0] == EXIT_RESOURCE
