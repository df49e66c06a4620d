"""Set-based intervals with IEEE 1788-2015 semantics.

An :class:`Interval` is either empty or a pair of endpoints in one format;
unbounded endpoints are the infinities.  Every operation returns the tightest
representable enclosure of the exact image of the inputs intersected with the
function's domain.  :class:`DecoratedInterval` adds the 1788 decoration.
"""

from __future__ import annotations

import enum
import re
from fractions import Fraction
from typing import Iterable, Optional, Sequence, Union

from . import bigfloat as bf
from .bigfloat import DOWN, NEAREST, UP, BigFloat, Format, Kind, RoundingDirection
from .hexfloat import ParseError, format_hex, parse_number
from .pointfuncs import ARITY, FunctionId, ResourceError, eval_correctly_rounded, pi_enclosure

__all__ = [
    "Decoration",
    "IllFormed",
    "Interval",
    "DecoratedInterval",
    "construct",
    "eval_interval",
    "eval_decorated",
    "next_out",
    "numeric",
    "set_op",
    "predicate",
    "parse_interval_literal",
    "format_interval",
]


class Decoration(enum.IntEnum):
    """1788 decorations, ordered ``ill < trv < def < dac < com``."""

    ILL = 0
    TRV = 1
    DEF = 2
    DAC = 3
    COM = 4

    def __str__(self):
        return self.name.lower()

    @classmethod
    def parse(cls, text: str) -> "Decoration":
        if text in ("com", "dac", "def", "trv", "ill"):
            return cls[text.upper()]
        raise ValueError(f"unknown decoration {text!r}")


class IllFormed(ValueError):
    """Invalid interval bounds.  ``rule`` names the violated constraint."""

    def __init__(self, rule: str, message: str):
        super().__init__(message)
        self.rule = rule


Number = Union[BigFloat, str, int, float, Fraction]


class Interval:
    """A closed, possibly empty or unbounded, interval of the extended reals."""

    __slots__ = ("lo", "hi", "fmt")

    def __init__(self, lo: Optional[BigFloat], hi: Optional[BigFloat], fmt: Format):
        if (lo is None) != (hi is None):
            raise IllFormed("empty", "both endpoints or neither must be given")
        if lo is not None:
            _check_bounds(lo, hi)
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)
        object.__setattr__(self, "fmt", fmt)

    def __setattr__(self, name, value):
        raise AttributeError("Interval is immutable")

    def __reduce__(self):
        return (Interval, (self.lo, self.hi, self.fmt))

    @classmethod
    def empty(cls, fmt: Format) -> "Interval":
        return cls(None, None, fmt)

    @classmethod
    def entire(cls, fmt: Format) -> "Interval":
        return cls(bf.infinity(fmt, -1), bf.infinity(fmt), fmt)

    @classmethod
    def point(cls, x: BigFloat) -> "Interval":
        return cls(x, x, x.fmt)

    @property
    def is_empty(self) -> bool:
        return self.lo is None

    @property
    def is_entire(self) -> bool:
        return not self.is_empty and self.lo.kind is Kind.NEG_INF and self.hi.kind is Kind.POS_INF

    @property
    def is_bounded(self) -> bool:
        return self.is_empty or (self.lo.is_finite and self.hi.is_finite)

    def contains_value(self, x: BigFloat) -> bool:
        return not self.is_empty and self.lo <= x <= self.hi

    def __eq__(self, other):
        if not isinstance(other, Interval):
            return NotImplemented
        if self.is_empty or other.is_empty:
            return self.is_empty and other.is_empty
        return bf.compare(self.lo, other.lo) == 0 and bf.compare(self.hi, other.hi) == 0

    def __hash__(self):
        if self.is_empty:
            return hash(None)
        return hash((self.lo.to_fraction() if self.lo.is_finite else self.lo.kind,
                     self.hi.to_fraction() if self.hi.is_finite else self.hi.kind))

    def __repr__(self):
        return f"Interval({format_interval(self)}, {self.fmt})"


def _check_bounds(lo: BigFloat, hi: BigFloat):
    if lo.is_nan or hi.is_nan:
        raise IllFormed("nan", "nan is not a valid bound")
    if lo.kind is Kind.POS_INF:
        raise IllFormed("inf_lower", "lower bound cannot be +inf")
    if hi.kind is Kind.NEG_INF:
        raise IllFormed("inf_upper", "upper bound cannot be -inf")
    if bf.compare(lo, hi) > 0:
        raise IllFormed("reversed", "lower bound exceeds upper bound")


class DecoratedInterval:
    """An :class:`Interval` paired with its :class:`Decoration`."""

    __slots__ = ("interval", "dec")

    def __init__(self, interval: Interval, dec: Decoration):
        dec = Decoration(dec)
        if dec is Decoration.ILL and not interval.is_empty:
            raise IllFormed("ill", "an ill-decorated interval must be empty")
        if interval.is_empty and dec not in (Decoration.TRV, Decoration.ILL):
            raise IllFormed("empty_dec", f"empty interval cannot carry {dec}")
        if not interval.is_bounded and dec is Decoration.COM:
            raise IllFormed("com_unbounded", "an unbounded interval cannot be com")
        object.__setattr__(self, "interval", interval)
        object.__setattr__(self, "dec", dec)

    def __setattr__(self, name, value):
        raise AttributeError("DecoratedInterval is immutable")

    def __reduce__(self):
        return (DecoratedInterval, (self.interval, self.dec))

    @classmethod
    def nai(cls, fmt: Format) -> "DecoratedInterval":
        return cls(Interval.empty(fmt), Decoration.ILL)

    @classmethod
    def new(cls, interval: Interval) -> "DecoratedInterval":
        """Decorate a bare interval with the strongest admissible decoration."""
        if interval.is_empty:
            return cls(interval, Decoration.TRV)
        return cls(interval, Decoration.COM if interval.is_bounded else Decoration.DAC)

    @property
    def is_nai(self) -> bool:
        return self.dec is Decoration.ILL

    def __eq__(self, other):
        if not isinstance(other, DecoratedInterval):
            return NotImplemented
        return self.dec == other.dec and self.interval == other.interval

    def __hash__(self):
        return hash((self.interval, self.dec))

    def __repr__(self):
        return f"DecoratedInterval({format_interval(self)}, {self.interval.fmt})"


# --------------------------------------------------------------------------
# construction


def _coerce(v: Number, fmt: Format, rnd: RoundingDirection) -> BigFloat:
    if isinstance(v, BigFloat):
        return v if v.fmt == fmt else bf.convert(v, fmt, rnd)
    if isinstance(v, str):
        return parse_number(v, fmt, rnd)
    if isinstance(v, float):
        if v != v:
            return bf.nan(fmt)
        if v in (float("inf"), float("-inf")):
            return bf.infinity(fmt, 1 if v > 0 else -1)
        return bf.from_fraction(Fraction(v), fmt, rnd)
    return bf.from_fraction(Fraction(v), fmt, rnd)


def construct(lo: Number, hi: Number, fmt: Format) -> Interval:
    """Build ``[lo, hi]`` in ``fmt``, rounding inexact bounds outward.

    Raises :class:`IllFormed` for nan bounds, ``[-inf, -inf]``,
    ``[+inf, +inf]`` and reversed bounds.
    """
    a = _coerce(lo, fmt, DOWN)
    b = _coerce(hi, fmt, UP)
    return Interval(a, b, fmt)


def _outward(x: Interval, fmt: Format) -> Interval:
    if x.fmt == fmt or x.is_empty:
        return x if x.fmt == fmt else Interval.empty(fmt)
    return Interval(bf.convert(x.lo, fmt, DOWN), bf.convert(x.hi, fmt, UP), fmt)


# --------------------------------------------------------------------------
# evaluation


def _cr(f: FunctionId, x: BigFloat, fmt: Format, rnd: RoundingDirection) -> BigFloat:
    return eval_correctly_rounded(f, [x], fmt, rnd)


def _monotone(f: FunctionId, lo: BigFloat, hi: BigFloat, fmt: Format) -> Interval:
    return Interval(_cr(f, lo, fmt, DOWN), _cr(f, hi, fmt, UP), fmt)


def _mul_ext(x: BigFloat, y: BigFloat, fmt: Format, rnd: RoundingDirection) -> BigFloat:
    # interval convention: 0 * inf = 0
    if x.is_zero or y.is_zero:
        return bf.zero(fmt)
    return bf.arith("mul", x, y, fmt, rnd)


def _div_ext(x: BigFloat, y: BigFloat, fmt: Format, rnd: RoundingDirection) -> BigFloat:
    if x.is_finite and y.is_inf:
        return bf.zero(fmt)
    return bf.arith("div", x, y, fmt, rnd)


def _mul(x: Interval, y: Interval, fmt: Format) -> Interval:
    lows = [_mul_ext(a, b, fmt, DOWN) for a in (x.lo, x.hi) for b in (y.lo, y.hi)]
    highs = [_mul_ext(a, b, fmt, UP) for a in (x.lo, x.hi) for b in (y.lo, y.hi)]
    return Interval(min(lows), max(highs), fmt)


def _div(x: Interval, y: Interval, fmt: Format) -> Interval:
    a, b, c, d = x.lo, x.hi, y.lo, y.hi
    if c.is_zero and d.is_zero:
        return Interval.empty(fmt)
    if a.is_zero and b.is_zero:
        return Interval(bf.zero(fmt), bf.zero(fmt), fmt)
    ninf, pinf = bf.infinity(fmt, -1), bf.infinity(fmt)
    zero = bf.zero(fmt)
    pos, neg = a >= zero, b <= zero
    if c > zero:
        if pos:
            return Interval(_div_ext(a, d, fmt, DOWN), _div_ext(b, c, fmt, UP), fmt)
        if neg:
            return Interval(_div_ext(a, c, fmt, DOWN), _div_ext(b, d, fmt, UP), fmt)
        return Interval(_div_ext(a, c, fmt, DOWN), _div_ext(b, c, fmt, UP), fmt)
    if d < zero:
        if pos:
            return Interval(_div_ext(b, d, fmt, DOWN), _div_ext(a, c, fmt, UP), fmt)
        if neg:
            return Interval(_div_ext(b, c, fmt, DOWN), _div_ext(a, d, fmt, UP), fmt)
        return Interval(_div_ext(b, d, fmt, DOWN), _div_ext(a, d, fmt, UP), fmt)
    if c.is_zero:
        if pos:
            return Interval(_div_ext(a, d, fmt, DOWN), pinf, fmt)
        if neg:
            return Interval(ninf, _div_ext(b, d, fmt, UP), fmt)
    elif d.is_zero:
        if pos:
            return Interval(ninf, _div_ext(a, c, fmt, UP), fmt)
        if neg:
            return Interval(_div_ext(b, c, fmt, DOWN), pinf, fmt)
    return Interval(ninf, pinf, fmt)


def _sqr(x: Interval, fmt: Format) -> Interval:
    sq = lambda v, r: _mul_ext(v, v, fmt, r)  # noqa: E731
    zero = bf.zero(fmt)
    if x.lo >= zero:
        return Interval(sq(x.lo, DOWN), sq(x.hi, UP), fmt)
    if x.hi <= zero:
        return Interval(sq(x.hi, DOWN), sq(x.lo, UP), fmt)
    return Interval(bf.zero(fmt), max(sq(x.lo, UP), sq(x.hi, UP)), fmt)


def _half_pi_floor(x: BigFloat) -> int:
    """floor(x / (pi/2)) for finite ``x``, with pi enclosed rigorously."""
    if x.is_zero:
        return 0
    v = x.to_fraction()
    q = max(64, x.lead_exponent + x.fmt.precision + 32)
    while True:
        pi = pi_enclosure(q)
        lo, hi = pi.lo.to_fraction() / 2, pi.hi.to_fraction() / 2
        a, b = sorted((v / lo, v / hi))
        fa, fb = a.numerator // a.denominator, b.numerator // b.denominator
        if fa == fb:
            return fa
        q *= 2
        if q > 1 << 24:
            raise ResourceError("cannot locate argument relative to multiples of pi/2")


def _trig(f: FunctionId, x: Interval, fmt: Format) -> Interval:
    one = bf.from_int(1, fmt)
    full = Interval(-one, one, fmt)
    if not x.is_bounded:
        return full
    jlo, jhi = _half_pi_floor(x.lo), _half_pi_floor(x.hi)
    if jhi - jlo >= 4:
        return full
    # critical points j*pi/2 with jlo < j <= jhi lie inside the interval
    peak, trough = (1, 3) if f is FunctionId.SIN else (0, 2)
    crit = {j % 4 for j in range(jlo + 1, jhi + 1)}
    lo = -one if trough in crit else min(_cr(f, x.lo, fmt, DOWN), _cr(f, x.hi, fmt, DOWN))
    hi = one if peak in crit else max(_cr(f, x.lo, fmt, UP), _cr(f, x.hi, fmt, UP))
    return Interval(lo, hi, fmt)


def _restrict(x: Interval, lo: Optional[BigFloat], hi: Optional[BigFloat], open_lo: bool, open_hi: bool):
    """Clip ``x`` to a domain; returns ``(a, b, a_at_edge, b_at_edge)`` or None when disjoint."""
    a, b = x.lo, x.hi
    a_edge = b_edge = False
    if lo is not None:
        if b < lo or (open_lo and bf.compare(b, lo) == 0):
            return None
        if a <= lo:
            a, a_edge = lo, True
    if hi is not None:
        if a > hi or (open_hi and bf.compare(a, hi) == 0):
            return None
        if b >= hi:
            b, b_edge = hi, True
    return a, b, a_edge, b_edge


def eval_interval(f: FunctionId, inputs: Sequence[Interval], fmt: Format) -> Interval:
    """Tightest interval in ``fmt`` enclosing ``f`` over ``inputs`` intersected with its domain."""
    f = FunctionId(f)
    if len(inputs) != ARITY[f]:
        raise TypeError(f"{f} takes {ARITY[f]} argument(s), got {len(inputs)}")
    xs = [_outward(x, fmt) for x in inputs]
    if any(x.is_empty for x in xs):
        return Interval.empty(fmt)
    x = xs[0]
    if f is FunctionId.ADD:
        y = xs[1]
        return Interval(bf.arith("add", x.lo, y.lo, fmt, DOWN), bf.arith("add", x.hi, y.hi, fmt, UP), fmt)
    if f is FunctionId.SUB:
        y = xs[1]
        return Interval(bf.arith("sub", x.lo, y.hi, fmt, DOWN), bf.arith("sub", x.hi, y.lo, fmt, UP), fmt)
    if f is FunctionId.MUL:
        return _mul(x, xs[1], fmt)
    if f is FunctionId.DIV:
        return _div(x, xs[1], fmt)
    if f is FunctionId.NEG:
        return Interval(-x.hi, -x.lo, fmt)
    if f is FunctionId.SQR:
        return _sqr(x, fmt)
    if f in (FunctionId.SIN, FunctionId.COS):
        return _trig(f, x, fmt)
    if f in (FunctionId.EXP, FunctionId.EXP2, FunctionId.CBRT):
        return _monotone(f, x.lo, x.hi, fmt)
    zero = bf.zero(fmt)
    if f is FunctionId.SQRT:
        r = _restrict(x, zero, None, False, False)
        return Interval.empty(fmt) if r is None else _monotone(f, r[0], r[1], fmt)
    if f in (FunctionId.LOG, FunctionId.LOG2):
        r = _restrict(x, zero, None, True, False)
        if r is None:
            return Interval.empty(fmt)
        lo = bf.infinity(fmt, -1) if r[2] else _cr(f, r[0], fmt, DOWN)
        return Interval(lo, _cr(f, r[1], fmt, UP), fmt)
    if f is FunctionId.ATANH:
        one = bf.from_int(1, fmt)
        r = _restrict(x, -one, one, True, True)
        if r is None:
            return Interval.empty(fmt)
        lo = bf.infinity(fmt, -1) if r[2] else _cr(f, r[0], fmt, DOWN)
        hi = bf.infinity(fmt) if r[3] else _cr(f, r[1], fmt, UP)
        return Interval(lo, hi, fmt)
    raise TypeError(f"no interval version of {f}")


def _inside_domain(f: FunctionId, xs: Sequence[Interval]) -> bool:
    """Whether the (nonempty) inputs lie in the domain, where every function here is continuous."""
    x = xs[0]
    zero = bf.zero(x.fmt)
    if f is FunctionId.DIV:
        y = xs[1]
        return y.lo > zero or y.hi < zero
    if f is FunctionId.SQRT:
        return x.lo >= zero
    if f in (FunctionId.LOG, FunctionId.LOG2):
        return x.lo > zero
    if f is FunctionId.ATANH:
        one = bf.from_int(1, x.fmt)
        return x.lo > -one and x.hi < one
    return True


def eval_decorated(f: FunctionId, inputs: Sequence[DecoratedInterval], fmt: Format) -> DecoratedInterval:
    """Decorated evaluation: bare result plus min(input decorations, local decoration)."""
    f = FunctionId(f)
    if any(d.is_nai for d in inputs):
        return DecoratedInterval.nai(fmt)
    bare = [d.interval for d in inputs]
    result = eval_interval(f, bare, fmt)
    if result.is_empty:
        return DecoratedInterval(result, Decoration.TRV)
    if not _inside_domain(f, [_outward(x, fmt) for x in bare]):
        local = Decoration.TRV
    elif all(x.is_bounded for x in bare) and result.is_bounded:
        local = Decoration.COM
    else:
        local = Decoration.DAC
    return DecoratedInterval(result, min([local] + [d.dec for d in inputs]))


def next_out(x: Interval) -> Interval:
    """``[nextDown(inf), nextUp(sup)]``; infinite endpoints stay, empty stays empty."""
    if x.is_empty:
        return x
    return Interval(bf.next_down(x.lo), bf.next_up(x.hi), x.fmt)


# --------------------------------------------------------------------------
# numeric functions, set operations, predicates


def numeric(fn: str, x: Interval) -> BigFloat:
    """One of inf, sup, mid, rad, wid, mag, mig.  Empty input gives nan."""
    fmt = x.fmt
    if fn not in ("inf", "sup", "mid", "rad", "wid", "mag", "mig"):
        raise ValueError(f"unknown numeric function {fn!r}")
    if x.is_empty:
        return bf.nan(fmt)
    a, b = x.lo, x.hi
    if fn == "inf":
        return a
    if fn == "sup":
        return b
    if fn == "mag":
        return max(abs(a), abs(b))
    if fn == "mig":
        if a <= bf.zero(fmt) <= b:
            return bf.zero(fmt)
        return min(abs(a), abs(b))
    if fn == "wid":
        return bf.arith("sub", b, a, fmt, UP)
    if fn == "mid":
        return _mid(x)
    m = _mid(x)
    if not x.is_bounded:
        return bf.infinity(fmt)
    mv = m.to_fraction()
    r = max(mv - a.to_fraction(), b.to_fraction() - mv)
    return bf.from_fraction(r, fmt, UP)


def _mid(x: Interval) -> BigFloat:
    fmt = x.fmt
    a, b = x.lo, x.hi
    if x.is_entire:
        return bf.zero(fmt)
    if a.is_inf:
        return bf.max_finite(fmt, -1)
    if b.is_inf:
        return bf.max_finite(fmt)
    return bf.from_fraction((a.to_fraction() + b.to_fraction()) / 2, fmt, NEAREST)


def set_op(kind: str, x: Interval, y: Interval) -> Interval:
    """``intersection`` or ``convex_hull`` of two intervals of the same format."""
    if x.fmt != y.fmt:
        raise ValueError(f"format mismatch: {x.fmt} vs {y.fmt}")
    fmt = x.fmt
    if kind == "intersection":
        if x.is_empty or y.is_empty:
            return Interval.empty(fmt)
        lo, hi = max(x.lo, y.lo), min(x.hi, y.hi)
        return Interval.empty(fmt) if lo > hi else Interval(lo, hi, fmt)
    if kind in ("convex_hull", "convexHull", "hull"):
        if x.is_empty:
            return y
        if y.is_empty:
            return x
        return Interval(min(x.lo, y.lo), max(x.hi, y.hi), fmt)
    raise ValueError(f"unknown set operation {kind!r}")


def predicate(kind: str, *args) -> bool:
    """Set predicates: is_empty, is_entire, equal, subset, interior, disjoint, member."""
    if kind == "is_empty":
        return args[0].is_empty
    if kind == "is_entire":
        return args[0].is_entire
    if kind == "member":
        v, x = args
        return v.is_finite and x.contains_value(v)
    x, y = args
    if kind == "equal":
        return x == y
    if kind == "subset":
        return x.is_empty or (not y.is_empty and y.lo <= x.lo and x.hi <= y.hi)
    if kind == "interior":
        if x.is_empty:
            return True
        if y.is_empty:
            return False
        below = y.lo < x.lo or y.lo.kind is Kind.NEG_INF
        above = x.hi < y.hi or y.hi.kind is Kind.POS_INF
        return below and above
    if kind == "disjoint":
        return x.is_empty or y.is_empty or x.hi < y.lo or y.hi < x.lo
    raise ValueError(f"unknown predicate {kind!r}")


# --------------------------------------------------------------------------
# literals

_LITERAL = re.compile(r"^\s*\[(?P<body>[^\[\]]*)\](?:_(?P<dec>[A-Za-z]+))?\s*$")


def parse_interval_literal(text: str, fmt: Format) -> DecoratedInterval:
    """Parse ``[l, u]``, ``[x]``, ``[]``, ``[empty]``, ``[entire]``, ``[nai]`` with optional ``_dec``.

    Endpoints round outward so the result encloses the literal.  Without a
    suffix the strongest admissible decoration is inferred.
    """
    m = _LITERAL.match(text)
    if not m:
        raise ParseError("malformed interval literal", text, 0)
    body = m.group("body").strip().lower()
    dec = None
    if m.group("dec") is not None:
        try:
            dec = Decoration.parse(m.group("dec").lower())
        except ValueError:
            raise ParseError(f"unknown decoration {m.group('dec')!r}", text, m.start("dec")) from None
    if body == "nai":
        if dec not in (None, Decoration.ILL):
            raise ParseError("nai cannot carry a decoration", text, m.start("dec"))
        return DecoratedInterval.nai(fmt)
    if body in ("", "empty"):
        x = Interval.empty(fmt)
    elif body == "entire":
        x = Interval.entire(fmt)
    else:
        parts = body.split(",")
        if len(parts) == 1:
            lo_text = hi_text = parts[0]
        elif len(parts) == 2:
            lo_text, hi_text = parts
        else:
            raise ParseError("too many endpoints", text, m.start("body"))
        x = construct(lo_text.strip(), hi_text.strip(), fmt)
    if dec is None:
        return DecoratedInterval.new(x)
    try:
        return DecoratedInterval(x, dec)
    except IllFormed as exc:
        raise ParseError(str(exc), text, m.start("dec")) from None


def format_interval(x: Union[Interval, DecoratedInterval]) -> str:
    """Canonical literal; :func:`parse_interval_literal` reads it back bit-exactly."""
    dec = None
    if isinstance(x, DecoratedInterval):
        if x.is_nai:
            return "[nai]"
        x, dec = x.interval, x.dec
    if x.is_empty:
        body = "[empty]"
    elif x.is_entire:
        body = "[entire]"
    else:
        body = f"[{format_hex(x.lo)}, {format_hex(x.hi)}]"
    return body if dec is None else f"{body}_{dec}"


def hull_of(values: Iterable[BigFloat], fmt: Format) -> Interval:
    """Smallest interval containing every value (empty for no values)."""
    vals = list(values)
    if not vals:
        return Interval.empty(fmt)
    return Interval(bf.convert(min(vals), fmt, DOWN), bf.convert(max(vals), fmt, UP), fmt)
