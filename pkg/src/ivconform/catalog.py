"""Recipes for the suites shipped in ``ivconform/suites``.

``python3 -m ivconform build-suites`` reruns them; the output is
deterministic, so regenerating must leave the files unchanged.
"""

from __future__ import annotations

from pathlib import Path

from . import SUITES_DIR
from . import bigfloat as bf
from .bigfloat import BINARY32, BINARY64
from .generator import (
    SearchRange,
    emit_category_cases,
    find_hard_cases,
    hard_suite_cases,
    make_case,
    write_sidecar,
)
from .harness import BuiltinAdapter
from .hexfloat import parse_number
from .interval import Interval, construct, eval_interval
from .pointfuncs import pi_enclosure
from .suite import TestCase, TestValue, interval_to_value, loads_suite, save_suite

SPOTLIGHT = ("cbrt", "exp", "sin", "atanh")

ATANH_P23_EXAMPLE = """[
  {
    "function": "atanh",
    "precision": 23,
    "input": [
      {
        "type": "interval",
        "inf": "-0xf.fe1e00@-1",
        "sup": "0xf.fe1e00@-1",
        "dec": "com"
      }
    ],
    "output": {
      "tight": {
        "type": "interval",
        "inf": "-0x4.305fa0@0",
        "sup": "0x4.305fa0@0",
        "dec": "com"
      },
      "accurate": {
        "type": "interval",
        "inf": "-0x4.306830@0",
        "sup": "0x4.306830@0",
        "dec": "com"
      }
    }
  }
]
"""

# (format, first argument, number of consecutive arguments, hardness)
HARD_PRESETS = {
    "exp": [(BINARY32, "0x1p-4", 1 << 14, 12), (BINARY64, "0x1p-1", 1 << 13, 12), (BINARY64, "0x1.4p-2", 1 << 13, 12),
            (bf.wide(12), "1", 1 << 11, 10)],
    "sin": [(BINARY64, "0x1.4p-3", 1 << 13, 12), (BINARY64, "0x1p-1", 1 << 13, 12), (BINARY32, "0x1.8p-1", 1 << 13, 12),
            (bf.wide(12), "0.5", 1 << 11, 10)],
    "cbrt": [(BINARY64, "0x1p-1022", 1 << 14, 12), (BINARY64, "0x1p-1000", 1 << 13, 12),
             (BINARY32, "0x1p-126", 1 << 12, 12)],
    "atanh": [(BINARY32, "0x1p-2", 1 << 14, 12), (BINARY32, "0x1.cp-1", 1 << 13, 12), (bf.wide(12), "0.5", 1 << 11, 10)],
}


def hard_search(f: str, jobs: int = 1) -> tuple:
    """All hard cases of the presets for ``f``, and the suite cases built from them."""
    found, cases = [], []
    for fmt, start, count, h in HARD_PRESETS[f]:
        t0 = parse_number(start, fmt)
        t1 = bf.from_ordinal(bf.to_ordinal(t0) + count, fmt)
        hcs = find_hard_cases(f, SearchRange(t0, t1, fmt), h, jobs=jobs)
        found.extend(hcs)
        cases.extend(hard_suite_cases(hcs, fmt))
    return found, cases


def arithmetic_cases() -> list:
    B = BINARY64
    iv = lambda lo, hi: construct(lo, hi, B)  # noqa: E731
    out = []

    def add(f, *xs, note=None):
        out.append(make_case(f, list(xs), B, comment=note))

    add("add", iv(1, 2), iv(3, 4))
    add("add", iv("0.1", "0.2"), iv("0.3", "0.3"), note="decimal endpoints rounded outward")
    add("add", iv("0x1.fffffffffffffp1023", "0x1.fffffffffffffp1023"), iv("0x1.fffffffffffffp1023", "0x1.fffffffffffffp1023"),
        note="overflow")
    add("add", iv("-inf", 1), iv(2, "inf"))
    add("sub", iv(0, 1), iv(0, 1))
    add("sub", iv(1, 1), iv("0x1p-60", "0x1p-60"))
    add("mul", iv(-1, 2), iv(-3, 4))
    add("mul", iv(0, 0), iv("-inf", "inf"), note="0 * inf = 0 for intervals")
    add("mul", iv(1, "inf"), iv(-1, 0))
    add("mul", iv("0.1", "0.1"), iv(3, 3))
    add("mul", iv(-2, -1), iv(-3, 5))
    for x, y in [((1, 1), (0, 1)), ((1, 2), (-1, 1)), ((-1, 1), (0, 1)), ((0, 1), (0, 1)), ((1, 2), (-1, 0)),
                 ((1, 2), (0, 0)), ((0, 0), (0, 0)), ((0, 0), (-1, 1)), ((1, 2), (3, 3)), ((-2, -1), (2, 4)),
                 ((1, "inf"), (1, "inf")), ((-3, 5), (-2, -1)), ((-2, -1), (0, 3)), ((-2, -1), (-3, 0))]:
        add("div", iv(*x), iv(*y))
    add("neg", iv(1, 2))
    add("neg", iv("-inf", 3))
    add("sqr", iv(-3, 2))
    add("sqr", iv("-inf", -2))
    add("sqr", iv("0.1", "0.1"))
    add("sqrt", iv(-2, 1), note="domain restriction: sqrt([-2,1]) = sqrt([0,1])")
    add("sqrt", iv(2, 2))
    add("sqrt", iv(0, "inf"))
    add("sqrt", iv(-3, -1))
    add("exp2", iv(-1, 10))
    add("exp2", iv(1023, 1024))
    add("exp2", iv("-1080", "-1070"), note="subnormal results")
    add("log", iv(0, 1))
    add("log", iv(1, "2.718281828459045"))
    add("log", iv(-1, 0))
    add("log2", iv("0.25", 8))
    add("log2", iv(3, 3))
    add("cos", iv(0, 7))
    add("cos", iv(1, 2))
    add("cos", iv(-1, 1))
    add("cos", iv(3, 3.5))
    add("cos", iv("1e22", "1e22"))
    # sqrt(2 pi) from the binary64 hull of pi
    b = pi_enclosure(120)
    pi = Interval(bf.convert(b.lo, B, bf.DOWN), bf.convert(b.hi, B, bf.UP), B)
    two_pi = eval_interval("mul", [pi, iv(2, 2)], B)
    add("mul", pi, iv(2, 2), note="2 pi from the tight hull of pi")
    add("sqrt", two_pi, note="sqrt(2 pi)")
    # x - x + x - x + x - x + x on [0, 1], one operation per case
    x = e = iv(0, 1)
    for op in ("sub", "add", "sub", "add", "sub", "add"):
        add(op, e, x, note="dependency: x-x+x-x+x-x+x")
        e = eval_interval(op, [e, x], B)
    return out


_OPS_INTERVALS = [("1", "3"), ("1", "2"), ("-3", "4"), ("-3", "2"), ("-inf", "inf"), ("-inf", "1"), ("2", "inf"),
                  ("0.1", "0.2"), ("0", "0"), (None, None)]


def interval_ops_cases() -> list:
    B = BINARY64
    adapter = BuiltinAdapter()

    def val(lo, hi):
        if lo is None:
            return interval_to_value(Interval.empty(B))
        return interval_to_value(construct(lo, hi, B))

    def case(function, inputs, note=None):
        r = adapter.call(function, 53, inputs, "binary64")
        assert r.status == "ok", (function, r)
        acc = r.value if r.value.type == "interval" else None
        return TestCase(function, 53, tuple(inputs), r.value, acc, "binary64", note)

    out = []
    for fn in ("inf", "sup", "mid", "rad", "wid", "mag", "mig"):
        for lo, hi in _OPS_INTERVALS:
            out.append(case(fn, [val(lo, hi)]))
    pairs = [(("0", "2"), ("1", "3")), (("0", "1"), ("2", "3")), (("0", "1"), ("3", "4")), (("1", "2"), ("0", "3")),
             (("-inf", "0"), ("0", "inf")), (("0", "1"), (None, None)), (("1", "2"), ("1", "2")),
             (("0", "3"), ("1", "2")), (("-inf", "inf"), ("0", "1"))]
    for fn in ("intersection", "convexHull", "equal", "subset", "interior", "disjoint"):
        for a, b in pairs:
            out.append(case(fn, [val(*a), val(*b)]))
    for lo, hi in _OPS_INTERVALS:
        out.append(case("isEmpty", [val(lo, hi)]))
        out.append(case("isEntire", [val(lo, hi)]))
    for num, (lo, hi) in [("0x1@0", ("1", "3")), ("0x0@0", ("1", "3")), ("inf", ("2", "inf")),
                          ("0x1.8@0", ("1", "2")), ("0x0@0", (None, None))]:
        out.append(case("isMember", [TestValue("number", val=num), val(lo, hi)]))
    return out


def build_all(outdir=None, jobs: int = 1, log=None) -> list:
    """Write every shipped suite into ``outdir``; returns the written paths."""
    outdir = Path(outdir or SUITES_DIR)
    outdir.mkdir(parents=True, exist_ok=True)
    written = []

    def emit(name, cases):
        path = outdir / name
        save_suite(cases, path)
        written.append(path)
        if log:
            log(f"{path}: {len(cases)} cases")

    example = outdir / "atanh_p23_example.json"
    example.write_text(ATANH_P23_EXAMPLE, encoding="utf-8")
    loads_suite(ATANH_P23_EXAMPLE)
    written.append(example)
    for f in SPOTLIGHT:
        for category in ("easy", "special", "exceptional"):
            emit(f"{f}_{category}.json", emit_category_cases(f, BINARY64, category))
        found, cases = hard_search(f, jobs=jobs)
        emit(f"{f}_hard.json", cases)
        write_sidecar(found, outdir / f"{f}_hard.hardcases.json")
    emit("arithmetic.json", arithmetic_cases())
    emit("interval_ops.json", interval_ops_cases())
    return written
