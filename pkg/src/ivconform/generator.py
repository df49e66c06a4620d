"""Expected outputs, hard-to-round arguments and category cases.

The oracle is the interval engine itself: ``tight`` is the decorated
evaluation and ``accurate`` is ``nextOut(f_tight(nextOut(x)))``.  Hard cases
are found by brute force: every argument of a range is checked for a long run
of identical bits right after the last significand bit of ``f(x)``.
"""

from __future__ import annotations

import json
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Optional, Sequence, Union

from . import bigfloat as bf
from .bigfloat import DOWN, UP, TOWARD_ZERO, BigFloat, Format
from .hexfloat import format_hex
from .interval import (
    DecoratedInterval,
    Decoration,
    Interval,
    construct,
    eval_decorated,
    eval_interval,
    next_out,
)
from .pointfuncs import (
    ARITY,
    DEFAULT_CEILING,
    FunctionId,
    ResourceError,
    eval_faithful,
    exact_case,
    in_domain,
)
from .suite import FORMAT_HINTS, TestCase, TestValue, interval_to_value

__all__ = [
    "HardCase",
    "SearchRange",
    "expected_outputs",
    "find_hard_cases",
    "trailing_run",
    "make_case",
    "emit_category_cases",
    "hard_suite_cases",
    "write_sidecar",
    "DEFAULT_BUDGET",
]

DEFAULT_BUDGET = 1 << 20
DEFAULT_EXTRA = 64
# Both runs leave f(x) next to a representable number, which is exactly where
# directed rounding cannot decide.
_DIRECTED = frozenset({DOWN, UP, TOWARD_ZERO})

IntervalLike = Union[Interval, DecoratedInterval]


# --------------------------------------------------------------------------
# expected outputs


def _decorate(x: IntervalLike) -> DecoratedInterval:
    return x if isinstance(x, DecoratedInterval) else DecoratedInterval.new(x)


def expected_outputs(f: FunctionId, inputs: Sequence[IntervalLike], fmt: Format):
    """``(tight, accurate)`` decorated intervals for ``f`` over ``inputs``.

    The accurate interval carries the tight decoration, except that com is
    lowered to dac when the widened result is unbounded.
    """
    f = FunctionId(f)
    decs = [_decorate(x) for x in inputs]
    tight = eval_decorated(f, decs, fmt)
    if tight.is_nai:
        return tight, tight
    widened = [next_out(d.interval) for d in decs]
    acc = next_out(eval_interval(f, widened, fmt))
    dec = tight.dec
    if dec is Decoration.COM and not acc.is_bounded:
        dec = Decoration.DAC
    if acc.is_empty:
        dec = Decoration.TRV
    return tight, DecoratedInterval(acc, dec)


def _format_hint(fmt: Format) -> Optional[str]:
    for name, preset in FORMAT_HINTS.items():
        if preset == fmt:
            return name
    return None


def make_case(f: FunctionId, inputs: Sequence[IntervalLike], fmt: Format, *,
              comment: Optional[str] = None, decorated: bool = True) -> TestCase:
    """A complete test case with hexadecimal endpoints and both expected outputs."""
    f = FunctionId(f)
    if decorated:
        inputs = [_decorate(x) for x in inputs]
    tight, acc = expected_outputs(f, inputs, fmt)
    if not decorated:
        tight, acc = tight.interval, acc.interval
    return TestCase(
        function=f.value,
        precision=fmt.precision,
        inputs=tuple(interval_to_value(x) for x in inputs),
        tight=interval_to_value(tight),
        accurate=interval_to_value(acc),
        format_hint=_format_hint(fmt),
        comment=comment,
    )


def make_nai_case(f: FunctionId, lo: str, hi: str, fmt: Format, comment: str) -> TestCase:
    """Case whose input is an invalid construction; the answer is NaI."""
    nai = TestValue("interval", inf="inf", sup="-inf", dec="ill")
    return TestCase(
        function=FunctionId(f).value,
        precision=fmt.precision,
        inputs=tuple(TestValue("interval", inf=lo, sup=hi, dec="ill") for _ in range(ARITY[FunctionId(f)])),
        tight=nai,
        accurate=nai,
        format_hint=_format_hint(fmt),
        comment=comment,
    )


# --------------------------------------------------------------------------
# hard-to-round search


@dataclass(frozen=True)
class HardCase:
    """An argument whose image has ``hardness`` identical bits after bit ``p``."""

    x: BigFloat
    function: FunctionId
    hardness: int
    run_kind: str  # "zeros" or "ones"
    direction_affected: frozenset = field(default=_DIRECTED)

    def to_json(self) -> dict:
        return {
            "x": format_hex(self.x),
            "function": self.function.value,
            "precision": self.x.fmt.precision,
            "hardness": self.hardness,
            "run_kind": self.run_kind,
            "direction_affected": sorted(d.name.lower() for d in self.direction_affected),
        }


@dataclass(frozen=True)
class SearchRange:
    """Arguments ``t0 <= x < t1`` of ``fmt``, all inside one binade."""

    t0: BigFloat
    t1: BigFloat
    fmt: Format

    def __post_init__(self):
        if not (self.t0.is_finite and self.t1.is_finite):
            raise ValueError("search range needs finite bounds")
        if not self.t0 < self.t1:
            raise ValueError("search range needs t0 < t1")
        last = bf.next_down(bf.convert(self.t1, self.fmt, UP))
        if self.t0.is_zero or last.is_zero or self.t0.sign != last.sign:
            raise ValueError("search range must not contain zero")
        if self.t0.lead_exponent != last.lead_exponent:
            raise ValueError("search range must lie within one binade")

    @property
    def ordinals(self) -> tuple:
        a = bf.to_ordinal(bf.convert(self.t0, self.fmt, UP))
        b = bf.to_ordinal(bf.convert(self.t1, self.fmt, UP))
        return a, b

    def __len__(self):
        a, b = self.ordinals
        return max(b - a, 0)


def _truncate(x: BigFloat, shift: int) -> int:
    m, e = x.scaled()
    m = abs(m)
    e += shift
    return m << e if e >= 0 else m >> -e


def trailing_run(f: FunctionId, x: BigFloat, p: int, q: int, ceiling: int) -> tuple:
    """``(bit, length)`` of the run of equal bits of ``|f(x)|`` starting at bit ``p``.

    Bit 0 is the leading bit.  Works at working precision ``q``, widening it
    until the run provably ends inside the bits the bracket determines.
    """
    f = FunctionId(f)
    while True:
        if q > ceiling:
            raise ResourceError(f"{f} at {format_hex(x)}: working precision {q} exceeds ceiling {ceiling}")
        b = eval_faithful(f, [x], q)
        lo, hi = sorted((abs(b.lo), abs(b.hi)))
        if not lo.is_zero and hi.is_finite and lo.lead_exponent == hi.lead_exponent:
            lead = lo.lead_exponent
            n_lo = _truncate(lo, q - 1 - lead)
            n_hi = _truncate(hi, q - 1 - lead)
            diff = (n_lo ^ n_hi).bit_length()
            known = q - diff - p  # determined bits after the significand
            if known > 0:
                tail = (n_lo >> diff) & ((1 << known) - 1)
                bit = tail >> (known - 1)
                run = known - (tail if bit == 0 else tail ^ ((1 << known) - 1)).bit_length()
                if run < known:
                    return bit, run
        q = p + 2 * (q - p)


def _scan(f: FunctionId, fmt: Format, a: int, b: int, h: int, pattern: str, q0: int, ceiling: int) -> list:
    found = []
    p = fmt.precision
    for k in range(a, b):
        x = bf.from_ordinal(k, fmt)
        if not in_domain(f, [x]) or exact_case(f, [x]) is not None:
            continue
        bit, run = trailing_run(f, x, p, q0, ceiling)
        if run < h:
            continue
        kind = "ones" if bit else "zeros"
        if pattern in ("both", kind):
            found.append(HardCase(x, f, run, kind))
    return found


def _scan_star(args):
    return _scan(*args)


def find_hard_cases(
    f: FunctionId,
    r: SearchRange,
    h: int,
    pattern: str = "both",
    *,
    jobs: int = 1,
    budget: int = DEFAULT_BUDGET,
    working_precision: Optional[int] = None,
    ceiling: Optional[int] = None,
) -> list:
    """Every argument of ``r`` whose image has a run of at least ``h`` equal bits after bit ``p``.

    The search is exhaustive.  Arguments with exact images are skipped.  With
    ``jobs > 1`` the range is cut into chunks scanned by worker processes; the
    result is in argument order either way.
    """
    f = FunctionId(f)
    if ARITY[f] != 1:
        raise ValueError(f"{f} is not a one-argument function")
    if h < 1:
        raise ValueError("hardness must be >= 1")
    if pattern not in ("zeros", "ones", "both"):
        raise ValueError(f"unknown run pattern {pattern!r}")
    p = r.fmt.precision
    ceiling = p + DEFAULT_CEILING if ceiling is None else ceiling
    q0 = p + h + DEFAULT_EXTRA if working_precision is None else working_precision
    if q0 < p + h + 1:
        raise ValueError("working precision must exceed p + h")
    if q0 > ceiling:
        raise ResourceError(f"working precision {q0} for hardness {h} exceeds ceiling {ceiling}")
    a, b = r.ordinals
    if b - a > budget:
        raise ResourceError(f"{b - a} arguments exceed the budget of {budget}; narrow the range")
    if jobs <= 1 or b - a < 256:
        return _scan(f, r.fmt, a, b, h, pattern, q0, ceiling)
    step = max(64, -(-(b - a) // (jobs * 4)))
    chunks = [(f, r.fmt, lo, min(lo + step, b), h, pattern, q0, ceiling) for lo in range(a, b, step)]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        parts = list(pool.map(_scan_star, chunks))
    return [hc for part in parts for hc in part]


def write_sidecar(cases: Sequence[HardCase], path: Union[str, os.PathLike]) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump([c.to_json() for c in cases], fh, indent=2)
        fh.write("\n")


def sidecar_path(suite_path: Union[str, os.PathLike]) -> str:
    root, _ = os.path.splitext(os.fspath(suite_path))
    return root + ".hardcases.json"


def hard_suite_cases(cases: Sequence[HardCase], fmt: Format, *, pairs: bool = True) -> list:
    """Singleton cases for each hard argument, plus intervals joining neighbours."""
    out = []
    for hc in cases:
        x = Interval.point(hc.x)
        note = f"hard-to-round: {hc.run_kind} run of {hc.hardness} bits"
        out.append(make_case(hc.function, [x], fmt, comment=note))
    if pairs:
        for a, b in zip(cases[::2], cases[1::2]):
            lo, hi = sorted((a.x, b.x))
            out.append(make_case(a.function, [Interval(lo, hi, fmt)], fmt, comment="hard-to-round endpoints"))
    return out


# --------------------------------------------------------------------------
# category presets

_EASY = {
    FunctionId.EXP: [("0", "0"), ("1", "1"), ("-1", "1"), ("0", "1"), ("-2", "3.5"), ("0.5", "0.5")],
    FunctionId.SIN: [("0", "0"), ("1", "1"), ("0", "1"), ("-0.5", "0.5"), ("1", "2"), ("3", "4"), ("-3.5", "-3")],
    FunctionId.CBRT: [("-64", "-64"), ("8", "27"), ("-1", "1"), ("2", "2"), ("-0.125", "1000"), ("0", "0")],
    FunctionId.ATANH: [("0", "0"), ("-0.5", "0.5"), ("0.25", "0.75"), ("-0.9", "-0.1"), ("0.5", "0.5")],
}
_EASY_DEFAULT = [("1", "2"), ("0.5", "0.5"), ("0.25", "4")]
_EASY_BINARY = [(("1", "2"), ("3", "4")), (("-1", "2"), ("-3", "4")), (("0.5", "0.5"), ("3", "3"))]

_SPECIAL = {
    FunctionId.EXP: [("-inf", "0"), ("0", "inf"), ("-inf", "inf"), ("-0x0@0", "0"), ("709", "710"),
                     ("710", "710"), ("-746", "-745"), ("-inf", "-1000")],
    FunctionId.SIN: [("-inf", "inf"), ("0", "inf"), ("-inf", "0"), ("-0x0@0", "0"), ("1e300", "1e300"),
                     ("1e22", "1e22"), ("0x1p1000", "0x1p1000"), ("0x1p-1074", "0x1p-1074")],
    FunctionId.CBRT: [("-inf", "inf"), ("-inf", "-8"), ("0", "inf"), ("-0x0@0", "0x0@0"),
                      ("0x1p-1074", "0x1p-1074"), ("-0x1p-1022", "0x1p-1022"), ("1e308", "inf")],
    FunctionId.ATANH: [("0", "1"), ("-1", "0"), ("-1", "1"), ("1", "1"), ("-1", "-1"), ("-inf", "inf"),
                       ("1", "inf"), ("2", "3"), ("-0x0@0", "0"), ("0x1p-1074", "0x1p-1000")],
}

_EXCEPTIONAL = [
    ("-inf", "-inf", "[-inf, -inf] is not an interval"),
    ("inf", "inf", "[+inf, +inf] is not an interval"),
    ("2", "1", "reversed bounds"),
    ("nan", "1", "nan lower bound"),
    ("1", "nan", "nan upper bound"),
    ("nan", "nan", "nan bounds"),
]


def emit_category_cases(f: FunctionId, fmt: Format, category: str) -> list:
    """Preset cases: ``easy`` values, ``special`` zeros/infinities/domain edges, ``exceptional`` NaI inputs."""
    f = FunctionId(f)
    if category == "easy":
        if ARITY[f] == 2:
            return [make_case(f, [construct(*a, fmt), construct(*b, fmt)], fmt, comment="easy")
                    for a, b in _EASY_BINARY]
        return [make_case(f, [construct(lo, hi, fmt)], fmt, comment="easy") for lo, hi in _EASY.get(f, _EASY_DEFAULT)]
    if category == "special":
        if ARITY[f] == 2:
            ends = [("-inf", "inf"), ("0", "0"), ("0", "inf"), ("-inf", "0")]
            return [make_case(f, [construct(*a, fmt), construct(*b, fmt)], fmt, comment="special")
                    for a in ends for b in ends]
        cases = [make_case(f, [construct(lo, hi, fmt)], fmt, comment="special")
                 for lo, hi in _SPECIAL.get(f, [("-inf", "inf"), ("0", "inf"), ("-inf", "0")])]
        cases.append(make_case(f, [Interval.empty(fmt)], fmt, comment="special: empty input"))
        return cases
    if category == "exceptional":
        return [make_nai_case(f, lo, hi, fmt, f"exceptional: {why}") for lo, hi, why in _EXCEPTIONAL]
    raise ValueError(f"unknown category {category!r}")
