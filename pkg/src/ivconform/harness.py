"""Run suites against an implementation and judge the answers.

An adapter maps ``(function, precision, inputs)`` to a response.  The
built-in adapter calls :mod:`ivconform.interval`; the subprocess adapter talks
newline-delimited JSON to an external program.  Each case is judged against
an accuracy claim (tight, accurate or valid), optionally with random
containment probes, and the verdicts are collected into a :class:`Report`.
"""

from __future__ import annotations

import enum
import json
import queue
import random
import shlex
import subprocess
import threading
import time
import xml.etree.ElementTree as ET
from collections import Counter
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

from . import bigfloat as bf
from .bigfloat import DOWN, UP, Format
from .hexfloat import format_number, parse_number
from .interval import (
    DecoratedInterval,
    Decoration,
    IllFormed,
    Interval,
    eval_decorated,
    eval_interval,
    format_interval,
    numeric,
    predicate,
    set_op,
)
from .pointfuncs import FunctionId, eval_correctly_rounded, in_domain
from .suite import (
    FORMAT_HINTS,
    TestCase,
    TestSuite,
    TestValue,
    bare,
    case_format,
    interval_to_value,
    number_to_value,
    value_to_interval,
)

__all__ = [
    "AccuracyClaim",
    "Verdict",
    "Response",
    "CaseResult",
    "Report",
    "BuiltinAdapter",
    "SubprocessAdapter",
    "MutationAdapter",
    "StubAdapter",
    "AdapterError",
    "run_case",
    "fuzz_case",
    "run_suite",
    "make_adapter",
]

DEFAULT_TIMEOUT = 10.0


class AccuracyClaim(str, enum.Enum):
    TIGHT = "tight"
    ACCURATE = "accurate"
    VALID = "valid"

    def __str__(self):
        return self.value


class Verdict(str, enum.Enum):
    PASS_TIGHT = "pass_tight"
    PASS_ACCURATE = "pass_accurate"
    PASS_VALID = "pass_valid"
    FAIL_UNSOUND = "fail_unsound"
    FAIL_INACCURATE = "fail_inaccurate"
    SKIP_UNSUPPORTED = "skip_unsupported"
    ERROR = "error"

    def __str__(self):
        return self.value

    @property
    def passed(self) -> bool:
        return self.value.startswith("pass")

    @property
    def failed(self) -> bool:
        return self in (Verdict.FAIL_UNSOUND, Verdict.FAIL_INACCURATE, Verdict.ERROR)


_PASS = {
    AccuracyClaim.TIGHT: Verdict.PASS_TIGHT,
    AccuracyClaim.ACCURATE: Verdict.PASS_ACCURATE,
    AccuracyClaim.VALID: Verdict.PASS_VALID,
}


@dataclass(frozen=True)
class Response:
    status: str  # "ok", "unsupported" or "error"
    value: Optional[TestValue] = None
    detail: str = ""


class AdapterError(RuntimeError):
    pass


# --------------------------------------------------------------------------
# adapters


def _input_intervals(inputs: Sequence[TestValue], fmt: Format):
    vals = [value_to_interval(v, fmt) for v in inputs]
    if any(isinstance(v, DecoratedInterval) for v in vals):
        vals = [v if isinstance(v, DecoratedInterval) else DecoratedInterval.new(v) for v in vals]
        return vals, True
    return vals, False


class BuiltinAdapter:
    """The package's own interval engine.  Pure, so safe for concurrent calls."""

    identity = "builtin"
    serial = False

    def call(self, function: str, precision: int, inputs: Sequence[TestValue],
             format_hint: Optional[str] = None) -> Response:
        fmt = FORMAT_HINTS[format_hint] if format_hint else bf.wide(precision)
        try:
            value = self._evaluate(function, inputs, fmt)
        except NotImplementedError:
            return Response("unsupported")
        except Exception as exc:  # the engine must never take the harness down
            return Response("error", detail=f"{type(exc).__name__}: {exc}")
        return Response("ok", value)

    def _evaluate(self, function: str, inputs: Sequence[TestValue], fmt: Format) -> TestValue:
        try:
            fid = FunctionId(function)
        except ValueError:
            fid = None
        if fid is not None:
            xs, decorated = _input_intervals(inputs, fmt)
            if decorated:
                return interval_to_value(eval_decorated(fid, xs, fmt))
            return interval_to_value(eval_interval(fid, xs, fmt))
        if function in ("intersection", "convexHull"):
            xs, decorated = _input_intervals(inputs, fmt)
            kind = "intersection" if function == "intersection" else "convex_hull"
            r = set_op(kind, bare(xs[0]), bare(xs[1]))
            if decorated:
                if any(x.is_nai for x in xs):
                    return interval_to_value(DecoratedInterval.nai(fmt))
                return interval_to_value(DecoratedInterval(r, Decoration.TRV))
            return interval_to_value(r)
        if function in ("inf", "sup", "mid", "rad", "wid", "mag", "mig"):
            xs, _ = _input_intervals(inputs, fmt)
            if isinstance(xs[0], DecoratedInterval) and xs[0].is_nai:
                return number_to_value(bf.nan(fmt))
            return number_to_value(numeric(function, bare(xs[0])))
        if function == "isMember":
            x = parse_number(inputs[0].val, fmt)
            y = bare(value_to_interval(inputs[1], fmt))
            return TestValue("boolean", val=predicate("member", x, y))
        preds = {"isEmpty": "is_empty", "isEntire": "is_entire", "equal": "equal",
                 "subset": "subset", "interior": "interior", "disjoint": "disjoint"}
        if function in preds:
            xs, _ = _input_intervals(inputs, fmt)
            return TestValue("boolean", val=predicate(preds[function], *[bare(x) for x in xs]))
        raise NotImplementedError(function)


class StubAdapter:
    """Adapter driven by a callable ``(case-like args) -> Response``; for tests."""

    serial = False

    def __init__(self, fn: Callable[..., Response], identity: str = "stub"):
        self._fn = fn
        self.identity = identity

    def call(self, function, precision, inputs, format_hint=None) -> Response:
        return self._fn(function, precision, inputs, format_hint)


class MutationAdapter:
    """Wraps an adapter and pulls every interval sup down by one ulp."""

    def __init__(self, inner):
        self.inner = inner
        self.identity = f"mutate-sup({inner.identity})"
        self.serial = getattr(inner, "serial", False)

    def call(self, function, precision, inputs, format_hint=None) -> Response:
        r = self.inner.call(function, precision, inputs, format_hint)
        if r.status != "ok" or r.value is None or r.value.type != "interval":
            return r
        fmt = FORMAT_HINTS[format_hint] if format_hint else bf.wide(precision)
        x = value_to_interval(r.value, fmt)
        dec = x.dec if isinstance(x, DecoratedInterval) else None
        x = bare(x)
        if x.is_empty:
            return r
        hi = bf.next_down(x.hi)
        shrunk = Interval.empty(fmt) if hi < x.lo else Interval(x.lo, hi, fmt)
        if dec is not None:
            dec = Decoration.TRV if shrunk.is_empty else dec
            if dec is Decoration.COM and not shrunk.is_bounded:
                dec = Decoration.DAC
            return Response("ok", interval_to_value(DecoratedInterval(shrunk, dec)))
        return Response("ok", interval_to_value(shrunk))


class SubprocessAdapter:
    """External implementation speaking newline-delimited JSON on stdin/stdout.

    Request: ``{"id": k, "function": f, "precision": p, "input": [...]}`` (plus
    ``format_hint`` when the case has one).  Response: ``{"id": k, "status":
    "ok", "value": {...}}``, ``{"id": k, "status": "unsupported"}`` or
    ``{"id": k, "status": "error", "detail": "..."}``.  Calls are serialized.
    """

    serial = True

    def __init__(self, argv: Sequence[str], timeout: float = DEFAULT_TIMEOUT):
        self.argv = list(argv)
        self.timeout = timeout
        self.identity = "cmd:" + shlex.join(self.argv)
        self._lock = threading.Lock()
        self._proc: Optional[subprocess.Popen] = None
        self._lines: Optional[queue.Queue] = None
        self._next_id = 0

    def _start(self):
        self._proc = subprocess.Popen(
            self.argv,
            stdin=subprocess.PIPE,
            stdout=subprocess.PIPE,
            stderr=subprocess.DEVNULL,
            text=True,
            encoding="utf-8",
            bufsize=1,
        )
        self._lines = queue.Queue()
        proc, lines = self._proc, self._lines

        def pump():
            for line in proc.stdout:
                lines.put(line)
            lines.put(None)

        threading.Thread(target=pump, daemon=True).start()

    def close(self):
        with self._lock:
            self._kill()

    def _kill(self):
        if self._proc is not None:
            try:
                self._proc.kill()
                self._proc.wait(timeout=5)
            except Exception:
                pass
            for stream in (self._proc.stdin, self._proc.stdout):
                try:
                    stream.close()
                except Exception:
                    pass
        self._proc = None

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        self.close()

    def call(self, function, precision, inputs, format_hint=None) -> Response:
        with self._lock:
            return self._call(function, precision, inputs, format_hint)

    def _call(self, function, precision, inputs, format_hint) -> Response:
        if self._proc is None or self._proc.poll() is not None:
            try:
                self._start()
            except OSError as exc:
                return Response("error", detail=f"cannot start {self.argv[0]!r}: {exc}")
        self._next_id += 1
        rid = self._next_id
        req = {"id": rid, "function": function, "precision": precision,
               "input": [v.to_json() for v in inputs]}
        if format_hint is not None:
            req["format_hint"] = format_hint
        try:
            self._proc.stdin.write(json.dumps(req) + "\n")
            self._proc.stdin.flush()
        except (BrokenPipeError, OSError) as exc:
            self._kill()
            return Response("error", detail=f"process exited: {exc}")
        try:
            line = self._lines.get(timeout=self.timeout)
        except queue.Empty:
            self._kill()
            return Response("error", detail=f"timeout after {self.timeout:g} s")
        if line is None:
            self._kill()
            return Response("error", detail="process exited")
        return self._decode(line, rid)

    def _decode(self, line: str, rid: int) -> Response:
        try:
            msg = json.loads(line)
        except ValueError:
            self._kill()
            return Response("error", detail=f"malformed response: {line.strip()[:80]!r}")
        if not isinstance(msg, dict) or msg.get("id") != rid:
            self._kill()
            return Response("error", detail="malformed response: id mismatch")
        status = msg.get("status")
        if status == "unsupported":
            return Response("unsupported")
        if status == "error":
            return Response("error", detail=str(msg.get("detail", "")))
        if status == "ok":
            try:
                return Response("ok", TestValue.from_json(msg.get("value"), 0, "value"))
            except ValueError as exc:
                return Response("error", detail=f"malformed response: {exc}")
        return Response("error", detail=f"malformed response: status {status!r}")


def make_adapter(spec: str, timeout: float = DEFAULT_TIMEOUT):
    """``builtin`` or ``cmd:<argv>`` (shell-style quoting)."""
    if spec == "builtin":
        return BuiltinAdapter()
    if spec.startswith("cmd:"):
        argv = shlex.split(spec[4:])
        if not argv:
            raise ValueError("empty command")
        return SubprocessAdapter(argv, timeout)
    raise ValueError(f"unknown adapter {spec!r}")


# --------------------------------------------------------------------------
# judgment


@dataclass(frozen=True)
class CaseResult:
    suite: str
    index: int
    function: str
    verdict: Verdict
    detail: str = ""
    computed: Optional[str] = None
    expected_tight: Optional[str] = None
    expected_accurate: Optional[str] = None

    def to_json(self) -> dict:
        return {
            "suite": self.suite,
            "index": self.index,
            "function": self.function,
            "verdict": self.verdict.value,
            "detail": self.detail,
            "computed": self.computed,
            "expected_tight": self.expected_tight,
            "expected_accurate": self.expected_accurate,
        }


def render_value(v: Optional[TestValue], fmt: Format) -> Optional[str]:
    if v is None:
        return None
    if v.type == "interval":
        try:
            return format_interval(value_to_interval(v, fmt))
        except (ValueError, IllFormed):
            return f"[{v.inf}, {v.sup}]" + (f"_{v.dec}" if v.dec else "")
    if v.type == "boolean":
        return "true" if v.val else "false"
    return str(v.val)


def _subset(x: Interval, y: Interval) -> bool:
    return predicate("subset", x, y)


def _call(adapter, c: TestCase, inputs=None) -> Response:
    try:
        return adapter.call(c.function, c.precision, list(inputs if inputs is not None else c.inputs),
                            c.format_hint)
    except Exception as exc:
        return Response("error", detail=f"adapter failure: {type(exc).__name__}: {exc}")


def _judge(c: TestCase, r: Response, claim: AccuracyClaim):
    """Verdict, detail and the parsed computed value (or None)."""
    claim = AccuracyClaim(claim)
    if r.status == "unsupported":
        return Verdict.SKIP_UNSUPPORTED, "unsupported by adapter", None
    if r.status != "ok":
        return Verdict.ERROR, r.detail or "adapter error", None
    fmt = case_format(c)
    z, t = r.value, c.tight
    if z is None or z.type != t.type:
        got = None if z is None else z.type
        return Verdict.ERROR, f"expected a {t.type} result, got {got}", None
    if t.type != "interval":
        if t.type == "number":
            a, b = parse_number(z.val, fmt), parse_number(t.val, fmt)
            same = a.same_value(b)
        else:
            same = z.val == t.val
        if same:
            return _PASS[claim], "", None
        return Verdict.FAIL_UNSOUND, f"value mismatch: got {z.val}, expected {t.val}", None
    try:
        zi = value_to_interval(z, fmt)
    except (ValueError, IllFormed) as exc:
        return Verdict.ERROR, f"invalid interval result: {exc}", None
    ti = value_to_interval(t, fmt)
    notes = []
    both_dec = isinstance(zi, DecoratedInterval) and isinstance(ti, DecoratedInterval)
    if isinstance(zi, DecoratedInterval) != isinstance(ti, DecoratedInterval):
        notes.append("warning: decorated/bare mismatch, compared bare intervals")
    zb, tb = bare(zi), bare(ti)
    if not _subset(tb, zb):
        return Verdict.FAIL_UNSOUND, f"result {format_interval(zb)} does not contain tight {format_interval(tb)}", zi
    detail = "; ".join(notes)
    if claim is AccuracyClaim.VALID:
        return Verdict.PASS_VALID, detail, zi
    if claim is AccuracyClaim.TIGHT:
        if zb == tb and (not both_dec or zi.dec == ti.dec):
            return Verdict.PASS_TIGHT, detail, zi
        why = "decoration differs" if zb == tb else "result wider than tight"
        return Verdict.FAIL_INACCURATE, why, zi
    if c.accurate is None:
        return Verdict.ERROR, "claim accurate needs an accurate output in the case", zi
    ab = bare(value_to_interval(c.accurate, fmt))
    if _subset(zb, ab):
        return Verdict.PASS_ACCURATE, detail, zi
    return Verdict.FAIL_INACCURATE, "result wider than accurate", zi


def _result(suite: str, index: int, c: TestCase, verdict, detail, r: Optional[Response]) -> CaseResult:
    fmt = case_format(c)
    return CaseResult(
        suite=suite,
        index=index,
        function=c.function,
        verdict=verdict,
        detail=detail,
        computed=render_value(r.value, fmt) if r is not None and r.status == "ok" else None,
        expected_tight=render_value(c.tight, fmt),
        expected_accurate=render_value(c.accurate, fmt),
    )


def run_case(c: TestCase, adapter, claim: AccuracyClaim, *, suite: str = "", index: int = 0) -> CaseResult:
    """Call the adapter once and judge its answer against the case."""
    r = _call(adapter, c)
    verdict, detail, _ = _judge(c, r, claim)
    return _result(suite, index, c, verdict, detail, r)


# --------------------------------------------------------------------------
# fuzzing


def _domain_bounds(f: FunctionId, x: Interval, fmt: Format):
    """Ordinal range of representable points of ``x`` inside Dom(f), or None."""
    lo, hi = x.lo, x.hi
    if lo.is_inf:
        lo = bf.max_finite(fmt, -1)
    if hi.is_inf:
        hi = bf.max_finite(fmt)
    a, b = bf.to_ordinal(lo), bf.to_ordinal(hi)
    zero, one = 0, bf.to_ordinal(bf.from_int(1, fmt))
    if f is FunctionId.SQRT:
        a = max(a, zero)
    elif f in (FunctionId.LOG, FunctionId.LOG2):
        a = max(a, 1)
    elif f is FunctionId.ATANH:
        a, b = max(a, -one + 1), min(b, one - 1)
    return (a, b) if a <= b else None


def _sample_points(rng: random.Random, a: int, b: int, n: int) -> list:
    pts = [a, b] if n >= 2 else [a]
    pts += [rng.randint(a, b) for _ in range(max(n - 2, 0))]
    return pts


def fuzz_case(c: TestCase, adapter, n: int, seed, claim: AccuracyClaim = AccuracyClaim.TIGHT,
              *, suite: str = "", index: int = 0) -> CaseResult:
    """Judge the case, then probe ``n`` points of the input for containment.

    Each point ``x`` (both input endpoints are always among them) must have
    its correctly rounded image inside the adapter's result ``z``, and the
    adapter's own answer on ``[x, x]`` must lie inside ``z`` as well.
    """
    if n < 1:
        raise ValueError("fuzz sample count must be >= 1")
    r = _call(adapter, c)
    verdict, detail, z = _judge(c, r, claim)
    if not verdict.passed or z is None:
        return _result(suite, index, c, verdict, detail, r)
    try:
        f = FunctionId(c.function)
    except ValueError:
        return _result(suite, index, c, verdict, detail, r)
    fmt = case_format(c)
    rng = random.Random(f"{seed}:{suite}:{index}")
    xs = [value_to_interval(v, fmt) for v in c.inputs]
    if any(isinstance(x, DecoratedInterval) and x.is_nai for x in xs):
        return _result(suite, index, c, verdict, detail, r)
    zb = bare(z)
    columns = []
    for x in xs:
        xb = bare(x)
        rngs = None if xb.is_empty else _domain_bounds(f, xb, fmt)
        if rngs is None:
            return _result(suite, index, c, verdict, detail, r)
        columns.append(_sample_points(rng, *rngs, n))
    for point in zip(*columns):
        args = [bf.from_ordinal(k, fmt) for k in point]
        if not in_domain(f, args):
            continue
        where = ", ".join(format_number(a) for a in args)
        lo = eval_correctly_rounded(f, args, fmt, DOWN)
        hi = eval_correctly_rounded(f, args, fmt, UP)
        if not (zb.contains_value(lo) and zb.contains_value(hi)):
            return _result(suite, index, c, Verdict.FAIL_UNSOUND,
                           f"f({where}) in [{format_number(lo)}, {format_number(hi)}] escapes result", r)
        singles = []
        for a, x in zip(args, xs):
            p = Interval.point(a)
            singles.append(interval_to_value(DecoratedInterval(p, x.dec) if isinstance(x, DecoratedInterval) else p))
        rs = _call(adapter, c, singles)
        if rs.status != "ok" or rs.value is None or rs.value.type != "interval":
            return _result(suite, index, c, Verdict.ERROR, f"singleton query at {where}: {rs.detail or rs.status}", r)
        try:
            sb = bare(value_to_interval(rs.value, fmt))
        except (ValueError, IllFormed) as exc:
            return _result(suite, index, c, Verdict.ERROR, f"singleton query at {where}: {exc}", r)
        if not _subset(sb, zb):
            return _result(suite, index, c, Verdict.FAIL_UNSOUND,
                           f"singleton result at {where} is {format_interval(sb)}, outside result", r)
    return _result(suite, index, c, verdict, detail, r)


# --------------------------------------------------------------------------
# suites and reports


@dataclass
class Report:
    claim: AccuracyClaim
    adapter: str
    seed: int
    fuzz: int
    results: list = field(default_factory=list)
    wall_time: float = 0.0

    @property
    def counts(self) -> dict:
        return dict(sorted(Counter(r.verdict.value for r in self.results).items()))

    @property
    def per_function(self) -> dict:
        out: dict = {}
        for r in self.results:
            out.setdefault(r.function, Counter())[r.verdict.value] += 1
        return {k: dict(sorted(v.items())) for k, v in sorted(out.items())}

    @property
    def ok(self) -> bool:
        return not any(r.verdict.failed for r in self.results)

    def to_json(self) -> dict:
        # wall time is left out so that reports are reproducible byte for byte
        return {
            "claim": str(self.claim),
            "adapter": self.adapter,
            "seed": self.seed,
            "fuzz": self.fuzz,
            "total": len(self.results),
            "summary": self.counts,
            "per_function": self.per_function,
            "results": [r.to_json() for r in self.results],
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=2) + "\n"

    def junit(self) -> str:
        root = ET.Element("testsuites", name="ivconform")
        by_suite: dict = {}
        for r in self.results:
            by_suite.setdefault(r.suite, []).append(r)
        for name, rs in by_suite.items():
            failures = sum(r.verdict in (Verdict.FAIL_UNSOUND, Verdict.FAIL_INACCURATE) for r in rs)
            errors = sum(r.verdict is Verdict.ERROR for r in rs)
            skipped = sum(r.verdict is Verdict.SKIP_UNSUPPORTED for r in rs)
            ts = ET.SubElement(root, "testsuite", name=name, tests=str(len(rs)), failures=str(failures),
                               errors=str(errors), skipped=str(skipped))
            for r in rs:
                tc = ET.SubElement(ts, "testcase", classname=name, name=f"{r.index}:{r.function}")
                msg = f"{r.verdict.value}: {r.detail}".strip(": ")
                if r.verdict in (Verdict.FAIL_UNSOUND, Verdict.FAIL_INACCURATE):
                    ET.SubElement(tc, "failure", message=msg, type=r.verdict.value)
                elif r.verdict is Verdict.ERROR:
                    ET.SubElement(tc, "error", message=msg)
                elif r.verdict is Verdict.SKIP_UNSUPPORTED:
                    ET.SubElement(tc, "skipped", message=msg)
        return ET.tostring(root, encoding="unicode") + "\n"

    def tsv(self) -> str:
        lines = ["suite\tindex\tfunction\tverdict\tcomputed\texpected_tight\tdetail"]
        for r in self.results:
            lines.append("\t".join([r.suite, str(r.index), r.function, r.verdict.value,
                                    r.computed or "", r.expected_tight or "", r.detail]))
        return "\n".join(lines) + "\n"


def run_suite(
    suites,
    adapter,
    claim: AccuracyClaim = AccuracyClaim.TIGHT,
    *,
    jobs: int = 1,
    seed: int = 0,
    fuzz: int = 0,
) -> Report:
    """Judge every case of one suite (or a list of suites).

    With ``jobs > 1`` cases are judged on a thread pool; results keep suite
    order and each case draws from its own seed, so the report does not
    depend on ``jobs``.  Adapters flagged ``serial`` serialize their own calls.
    """
    if isinstance(suites, TestSuite):
        suites = [suites]
    claim = AccuracyClaim(claim)
    work = [(s.source_name, i, c) for s in suites for i, c in enumerate(s.cases)]

    def judge(item):
        name, i, c = item
        try:
            if fuzz > 0:
                return fuzz_case(c, adapter, fuzz, seed, claim, suite=name, index=i)
            return run_case(c, adapter, claim, suite=name, index=i)
        except Exception as exc:
            return _result(name, i, c, Verdict.ERROR, f"harness failure: {type(exc).__name__}: {exc}", None)

    start = time.perf_counter()
    if jobs > 1 and len(work) > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(judge, work))
    else:
        results = [judge(w) for w in work]
    report = Report(claim, adapter.identity, seed, fuzz, results)
    report.wall_time = time.perf_counter() - start
    return report
