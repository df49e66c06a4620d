import io
import json
import subprocess
import sys
import xml.etree.ElementTree as ET

import pytest

from ivconform import bigfloat as bf
from ivconform import shipped_suites
from ivconform.bigfloat import BINARY32
from ivconform.cli import main, parse_range
from ivconform.hexfloat import parse_number
from ivconform.suite import load_suite


def cli(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = main(list(argv), out, err)
    return code, out.getvalue(), err.getvalue()


def suite_named(prefix):
    return str(next(p for p in shipped_suites() if p.name.startswith(prefix)))


def test_run_passes_on_shipped_suite(tmp_path):
    report, junit, plot = tmp_path / "r.json", tmp_path / "r.xml", tmp_path / "r.png"
    code, out, err = cli("run", suite_named("exp_easy"), "--report", str(report), "--junit", str(junit),
                         "--plot", str(plot))
    assert code == 0
    assert out.splitlines()[0].startswith("suite\tindex")
    assert "pass_tight" in err
    data = json.loads(report.read_text())
    assert data["total"] == len(out.splitlines()) - 1
    assert ET.parse(junit).getroot().tag == "testsuites"
    assert plot.read_bytes()[:8] == b"\x89PNG\r\n\x1a\n"


def test_run_empty_suite(tmp_path):
    path = tmp_path / "empty.json"
    path.write_text("[]\n")
    code, out, _ = cli("run", str(path))
    assert code == 0 and out.count("\n") == 1


def test_run_reports_failures_with_exit_1(tmp_path):
    path = tmp_path / "wrong.json"
    path.write_text(json.dumps([{
        "function": "exp", "precision": 53, "format_hint": "binary64",
        "input": [{"type": "interval", "inf": "0x0@0", "sup": "0x0@0"}],
        "output": {"tight": {"type": "interval", "inf": "0x2@0", "sup": "0x2@0"}},
    }]))
    code, out, _ = cli("run", str(path))
    assert code == 1 and "fail_unsound" in out


@pytest.mark.parametrize("argv", [
    ["run", "/nonexistent.json"],
    ["run", "--adapter", "native"],
    ["run", "--jobs", "0"],
    ["run", "--fuzz", "-1"],
    ["generate", "--function", "tan", "--input", "[1,2]", "--precision", "53"],
    ["generate", "--function", "exp", "--input", "[2,1]", "--precision", "53"],
    ["generate", "--function", "exp", "--input", "[1,2]"],
    ["generate", "--function", "exp", "--input", "[1,2]", "--precision", "24", "--format-hint", "binary64"],
    ["find-hard", "--function", "exp", "--precision", "12", "--range", "[1,3)", "--hardness", "4"],
    ["find-hard", "--function", "exp", "--precision", "12", "--range", "1..2", "--hardness", "4"],
])
def test_usage_errors_exit_2(argv):
    code, _, err = cli(*argv)
    assert code == 2 and "error" in err


def test_run_rejects_suites_with_fatal_issues(tmp_path):
    path = tmp_path / "bad.json"
    path.write_text(json.dumps([{
        "function": "exp", "precision": 53,
        "input": [{"type": "interval", "inf": "0x2@0", "sup": "0x1@0"}],
        "output": {"tight": {"type": "interval", "inf": "0x1@0", "sup": "0x1@0"}},
    }]))
    code, _, err = cli("run", str(path))
    assert code == 2 and "case 0" in err


def test_generate_atanh_example():
    # [PAPER] atanh([-0xf.fe1e00@-1, 0xf.fe1e00@-1]) at precision 23
    code, out, _ = cli("generate", "--function", "atanh", "--precision", "23",
                       "--input", "[-0xf.fe1e00@-1, 0xf.fe1e00@-1]_com")
    assert code == 0
    (case,) = json.loads(out)
    assert case["output"]["tight"] == {"type": "interval", "inf": "-0x4.305fa@0", "sup": "0x4.305fa@0", "dec": "com"}
    assert case["output"]["accurate"]["sup"] == "0x4.30683@0"


def test_generate_to_file(tmp_path):
    path = tmp_path / "g.json"
    code, out, _ = cli("generate", "--function", "add", "--format-hint", "binary32",
                       "--input", "[1,2]", "--input", "[0.1,0.1]", "--out", str(path))
    assert code == 0 and out == ""
    (c,) = load_suite(path).cases
    assert c.format_hint == "binary32" and len(c.inputs) == 2


def test_find_hard(tmp_path):
    out_path = tmp_path / "hard.json"
    plot = tmp_path / "hard.png"
    code, out, err = cli("find-hard", "--function", "exp", "--precision", "12", "--range", "[1,2)",
                         "--hardness", "10", "--out", str(out_path), "--plot", str(plot))
    assert code == 0
    rows = out.splitlines()
    assert rows[0] == "x\thardness\trun_kind" and len(rows) > 1
    assert "hard cases among 2048 arguments" in err
    side = json.loads((tmp_path / "hard.hardcases.json").read_text())
    assert len(side) == len(rows) - 1 == len(load_suite(out_path))
    assert plot.exists()
    code, _, err = cli("find-hard", "--function", "exp", "--precision", "12", "--range", "[1,2)",
                       "--hardness", "10", "--budget", "10")
    assert code == 1 and "budget" in err


def test_parse_range():
    r = parse_range("[1, 2)", BINARY32)
    assert len(r) == 1 << 23
    r = parse_range("[1,1.5]", BINARY32)
    assert r.t1 == bf.next_up(parse_number("1.5", BINARY32))
    with pytest.raises(ValueError):
        parse_range("(1,2)", BINARY32)


def test_validate(tmp_path):
    code, out, err = cli("validate", *[str(p) for p in shipped_suites()])
    assert code == 0
    assert "fatal" not in out
    path = tmp_path / "decimal.json"
    path.write_text(json.dumps([{
        "function": "exp", "precision": 53, "format_hint": "binary64",
        "input": [{"type": "interval", "inf": "0.1", "sup": "0.1"}],
        "output": {"tight": {"type": "interval", "inf": "0x1@0", "sup": "0x2@0"}},
    }]))
    code, out, _ = cli("validate", str(path))
    assert code == 0 and "warning" in out
    code, out, _ = cli("validate", "--exact", str(path))
    assert code == 1 and "fatal" in out
    broken = tmp_path / "broken.json"
    broken.write_text("[{")
    assert cli("validate", str(broken))[0] == 1


def test_build_suites_to_directory(tmp_path, monkeypatch):
    import ivconform.catalog as catalog
    calls = []
    monkeypatch.setattr(catalog, "build_all", lambda outdir, jobs, log: calls.append((outdir, jobs)))
    assert cli("build-suites", "--outdir", str(tmp_path), "--jobs", "2")[0] == 0
    assert calls == [(str(tmp_path), 2)]


def test_module_entry_point():
    r = subprocess.run([sys.executable, "-m", "ivconform", "--version"], capture_output=True, text=True)
    assert r.returncode == 0 and r.stdout.startswith("ivconform ")
    r = subprocess.run([sys.executable, "-m", "ivconform"], capture_output=True, text=True)
    assert r.returncode == 2
