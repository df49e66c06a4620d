import json
import sys
import xml.etree.ElementTree as ET

import pytest

from ivconform import bigfloat as bf
from ivconform import shipped_suites
from ivconform.bigfloat import BINARY64
from ivconform.generator import make_case
from ivconform.harness import (
    BuiltinAdapter,
    MutationAdapter,
    Response,
    StubAdapter,
    SubprocessAdapter,
    Verdict,
    fuzz_case,
    make_adapter,
    run_case,
    run_suite,
)
from ivconform.interval import DecoratedInterval, Interval, construct
from ivconform.suite import TestValue, dumps_suite, interval_to_value, load_suite, loads_suite

FMT = BINARY64


@pytest.fixture
def exp_case():
    return make_case("exp", [construct(1, 2, FMT)], FMT, decorated=False)


def answering(value):
    return StubAdapter(lambda *a: Response("ok", value))


def test_verdict_lattice(exp_case):
    c = exp_case
    tight = c.tight
    lo, hi = bf.from_float(2.718281828459045), bf.from_float(7.38905609893065)
    accurate_only = interval_to_value(Interval(bf.next_down(lo), hi, FMT))
    too_wide = interval_to_value(Interval(bf.from_float(2.0), bf.from_float(8.0), FMT))
    unsound = interval_to_value(Interval(lo, bf.next_down(bf.next_down(hi)), FMT))
    assert c.accurate is not None
    table = {
        (tight, "tight"): Verdict.PASS_TIGHT,
        (tight, "accurate"): Verdict.PASS_ACCURATE,
        (tight, "valid"): Verdict.PASS_VALID,
        (accurate_only, "tight"): Verdict.FAIL_INACCURATE,
        (accurate_only, "accurate"): Verdict.PASS_ACCURATE,
        (too_wide, "accurate"): Verdict.FAIL_INACCURATE,
        (too_wide, "valid"): Verdict.PASS_VALID,
        (unsound, "valid"): Verdict.FAIL_UNSOUND,
        (unsound, "tight"): Verdict.FAIL_UNSOUND,
    }
    for (v, claim), want in table.items():
        assert run_case(c, answering(v), claim).verdict is want, (v, claim)


def test_error_and_skip_verdicts(exp_case):
    c = exp_case
    assert run_case(c, StubAdapter(lambda *a: Response("unsupported")), "tight").verdict is Verdict.SKIP_UNSUPPORTED
    r = run_case(c, StubAdapter(lambda *a: Response("error", detail="boom")), "tight")
    assert r.verdict is Verdict.ERROR and r.detail == "boom"
    r = run_case(c, answering(TestValue("boolean", val=True)), "tight")
    assert r.verdict is Verdict.ERROR and "expected a interval" in r.detail

    def explode(*a):
        raise RuntimeError("crash")
    r = run_case(c, StubAdapter(explode), "tight")
    assert r.verdict is Verdict.ERROR and "crash" in r.detail
    r = run_case(c, answering(TestValue("interval", "0x3@0", "0x1@0")), "tight")
    assert r.verdict is Verdict.ERROR


def test_accurate_claim_needs_accurate_output():
    (c,) = loads_suite(json.dumps([{
        "function": "exp", "precision": 53, "format_hint": "binary64",
        "input": [{"type": "interval", "inf": "0x0@0", "sup": "0x0@0"}],
        "output": {"tight": {"type": "interval", "inf": "0x1@0", "sup": "0x1@0"}},
    }])).cases
    r = run_case(c, BuiltinAdapter(), "accurate")
    assert r.verdict is Verdict.ERROR
    assert run_case(c, BuiltinAdapter(), "tight").verdict is Verdict.PASS_TIGHT


def test_decoration_mismatch_fails_tight():
    c = make_case("exp", [construct(1, 2, FMT)], FMT, decorated=True)
    assert c.tight.dec == "com"
    wrong = TestValue("interval", c.tight.inf, c.tight.sup, "dac")
    r = run_case(c, answering(wrong), "tight")
    assert r.verdict is Verdict.FAIL_INACCURATE and r.detail == "decoration differs"
    bare_answer = TestValue("interval", c.tight.inf, c.tight.sup)
    r = run_case(c, answering(bare_answer), "tight")
    assert r.verdict is Verdict.PASS_TIGHT and r.detail.startswith("warning")


def test_non_interval_results():
    (c,) = loads_suite(json.dumps([
        {"function": "mid", "precision": 53, "format_hint": "binary64",
         "input": [{"type": "interval", "inf": "0x1@0", "sup": "0x2@0"}],
         "output": {"tight": {"type": "number", "val": "0x1.8@0"}}},
    ])).cases
    assert run_case(c, BuiltinAdapter(), "tight").verdict is Verdict.PASS_TIGHT
    assert run_case(c, answering(TestValue("number", val="1.5")), "tight").verdict is Verdict.PASS_TIGHT
    r = run_case(c, answering(TestValue("number", val="0x1@0")), "valid")
    assert r.verdict is Verdict.FAIL_UNSOUND


def test_builtin_passes_every_shipped_suite():
    report = run_suite([load_suite(p) for p in shipped_suites()], BuiltinAdapter())
    assert report.ok
    assert set(report.counts) == {"pass_tight"}


def test_builtin_reports_unsupported_functions():
    r = BuiltinAdapter().call("tan", 53, [TestValue("interval", "0x1@0", "0x2@0")])
    assert r.status == "unsupported"


def test_mutation_adapter_shrinks_sup(exp_case):
    m = MutationAdapter(BuiltinAdapter())
    r = m.call("exp", 53, exp_case.inputs, "binary64")
    assert bf.next_up(bf.from_float(float.fromhex(r.value.sup.replace("@0", "p0")))) == \
        bf.from_float(float.fromhex(exp_case.tight.sup.replace("@0", "p0")))
    assert run_case(exp_case, m, "valid").verdict is Verdict.FAIL_UNSOUND
    # a singleton collapses to empty, decorated to trv
    one = TestValue("interval", "0x1@0", "0x1@0", "com")
    r = m.call("sqrt", 53, [one], "binary64")
    assert r.value == TestValue("interval", "inf", "-inf", "trv")


def test_fuzz_rejects_bad_sample_counts(exp_case):
    with pytest.raises(ValueError):
        fuzz_case(exp_case, BuiltinAdapter(), 0, 1)


def test_fuzz_catches_a_narrow_stub_that_agrees_on_the_case():
    # the stub answers the suite case exactly but returns something too narrow on singletons
    c = make_case("exp", [construct(1, 2, FMT)], FMT, decorated=False)
    single = interval_to_value(Interval.point(bf.from_int(1, FMT)))

    def narrow(function, precision, inputs, hint):
        if inputs[0] == c.inputs[0]:
            return Response("ok", c.tight)
        return Response("ok", single)
    r = fuzz_case(c, StubAdapter(narrow), 10, 0)
    assert r.verdict is Verdict.FAIL_UNSOUND and "singleton" in r.detail
    assert fuzz_case(c, BuiltinAdapter(), 10, 0).verdict is Verdict.PASS_TIGHT


def test_fuzz_is_deterministic():
    s = load_suite(next(p for p in shipped_suites() if p.name.startswith("exp")))
    a = run_suite(s, BuiltinAdapter(), fuzz=5, seed=7)
    b = run_suite(s, BuiltinAdapter(), fuzz=5, seed=7, jobs=4)
    assert a.dumps() == b.dumps()


def test_reports(exp_case):
    s = loads_suite(dumps_suite([exp_case, exp_case]), source_name="demo")
    calls = iter([Response("ok", exp_case.tight), Response("unsupported")])
    report = run_suite(s, StubAdapter(lambda *a: next(calls)))
    data = json.loads(report.dumps())
    assert "wall_time" not in data
    assert data["summary"] == {"pass_tight": 1, "skip_unsupported": 1}
    assert data["per_function"] == {"exp": {"pass_tight": 1, "skip_unsupported": 1}}
    assert report.ok
    root = ET.fromstring(report.junit())
    (ts,) = root
    assert ts.get("name") == "demo" and ts.get("tests") == "2" and ts.get("skipped") == "1"
    lines = report.tsv().splitlines()
    assert lines[0].split("\t")[:4] == ["suite", "index", "function", "verdict"]
    assert lines[2].split("\t")[3] == "skip_unsupported"


def test_report_failures_in_junit(exp_case):
    s = loads_suite(dumps_suite([exp_case]), source_name="demo")
    report = run_suite(s, answering(TestValue("interval", "0x1@0", "0x1@0")))
    assert not report.ok
    tc = ET.fromstring(report.junit()).find("testsuite/testcase")
    assert tc.find("failure").get("type") == "fail_unsound"


def test_make_adapter():
    assert isinstance(make_adapter("builtin"), BuiltinAdapter)
    a = make_adapter("cmd:python3 -m ivconform.refserver")
    assert isinstance(a, SubprocessAdapter) and a.argv == ["python3", "-m", "ivconform.refserver"]
    for bad in ("cmd:", "native"):
        with pytest.raises(ValueError):
            make_adapter(bad)


# --------------------------------------------------------------------------
# external processes


def script(tmp_path, body):
    path = tmp_path / "adapter.py"
    path.write_text("import json, sys, time\n" + body)
    return SubprocessAdapter([sys.executable, str(path)], timeout=2)


def test_refserver_agrees_with_builtin():
    suites = [load_suite(p) for p in shipped_suites() if p.name.startswith(("exp", "atanh", "interval_ops"))]
    with SubprocessAdapter([sys.executable, "-m", "ivconform.refserver"]) as ext:
        a = run_suite(suites, ext)
    b = run_suite(suites, BuiltinAdapter())
    assert [r.verdict for r in a.results] == [r.verdict for r in b.results]
    assert [r.computed for r in a.results] == [r.computed for r in b.results]
    assert a.ok


def test_garbage_output(tmp_path, exp_case):
    ad = script(tmp_path, "for line in sys.stdin:\n    print('hello', flush=True)\n")
    with ad:
        r = run_case(exp_case, ad, "tight")
    assert r.verdict is Verdict.ERROR and r.detail.startswith("malformed response")


def test_wrong_id(tmp_path, exp_case):
    ad = script(tmp_path, "for line in sys.stdin:\n    print(json.dumps({'id': -1, 'status': 'unsupported'}), flush=True)\n")
    with ad:
        assert "id mismatch" in run_case(exp_case, ad, "tight").detail


def test_timeout(tmp_path, exp_case):
    ad = script(tmp_path, "for line in sys.stdin:\n    time.sleep(30)\n")
    ad.timeout = 0.5
    with ad:
        r = run_case(exp_case, ad, "tight")
    assert r.verdict is Verdict.ERROR and "timeout" in r.detail


def test_dying_process_is_restarted(tmp_path, exp_case):
    # answers once, then exits; the adapter must restart it for the next call
    ad = script(tmp_path,
                "line = sys.stdin.readline()\n"
                "req = json.loads(line)\n"
                "print(json.dumps({'id': req['id'], 'status': 'unsupported'}), flush=True)\n")
    with ad:
        assert run_case(exp_case, ad, "tight").verdict is Verdict.SKIP_UNSUPPORTED
        results = [run_case(exp_case, ad, "tight") for _ in range(3)]
    details = [r.detail for r in results]
    assert any(r.verdict is Verdict.SKIP_UNSUPPORTED for r in results), details
    assert all(r.verdict is Verdict.SKIP_UNSUPPORTED or "process exited" in r.detail for r in results), details


def test_missing_program(exp_case):
    ad = SubprocessAdapter(["/nonexistent/adapter"])
    r = run_case(exp_case, ad, "tight")
    assert r.verdict is Verdict.ERROR and "cannot start" in r.detail


def test_decorated_nai_round_trip_through_refserver():
    nai = interval_to_value(DecoratedInterval.nai(FMT))
    with SubprocessAdapter([sys.executable, "-m", "ivconform.refserver"]) as ext:
        r = ext.call("exp", 53, [nai], "binary64")
    assert r.status == "ok" and r.value.dec == "ill"
