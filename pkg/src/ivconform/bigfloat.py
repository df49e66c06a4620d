"""Radix-2 multiprecision floating-point values with explicit formats.

A :class:`BigFloat` is an immutable value tied to a :class:`Format`.  Every
operation here is a pure function: there is no ambient rounding mode, the
direction is always an argument.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import NamedTuple, Optional, Union

__all__ = [
    "FloatError",
    "ExponentRangeError",
    "Kind",
    "RoundingDirection",
    "Format",
    "BINARY32",
    "BINARY64",
    "wide",
    "working",
    "BigFloat",
    "Bracket",
    "zero",
    "infinity",
    "nan",
    "max_finite",
    "min_positive",
    "round_scaled",
    "from_int",
    "from_fraction",
    "from_float",
    "convert",
    "round_from_bracket",
    "next_float",
    "next_up",
    "next_down",
    "to_ordinal",
    "from_ordinal",
    "arith",
    "compare",
]

# Exponents are plain Python ints, but formats are kept within this bound so a
# runaway computation fails loudly instead of allocating gigantic integers.
EXPONENT_LIMIT = 1 << 62
WIDE_EXPONENT = 1 << 20
WORKING_EXPONENT = 1 << 30


class FloatError(ValueError):
    """Invalid operand or format for a BigFloat operation."""


class ExponentRangeError(FloatError):
    """An exponent left the range a format (or the implementation) supports."""


class Kind(enum.Enum):
    ZERO = "zero"
    FINITE = "finite"
    POS_INF = "pos_inf"
    NEG_INF = "neg_inf"
    NAN = "nan"


class RoundingDirection(enum.Enum):
    DOWN = "down"
    UP = "up"
    NEAREST_EVEN = "nearest_even"
    TOWARD_ZERO = "toward_zero"

    @property
    def opposite(self) -> "RoundingDirection":
        if self is RoundingDirection.DOWN:
            return RoundingDirection.UP
        if self is RoundingDirection.UP:
            return RoundingDirection.DOWN
        return self


DOWN = RoundingDirection.DOWN
UP = RoundingDirection.UP
NEAREST = RoundingDirection.NEAREST_EVEN
TOWARD_ZERO = RoundingDirection.TOWARD_ZERO


@dataclass(frozen=True)
class Format:
    """Precision and exponent range of a binary floating-point format.

    ``emin``/``emax`` bound the exponent of the leading significand bit.
    """

    precision: int
    emin: int
    emax: int
    subnormals: bool = False
    name: Optional[str] = None

    def __post_init__(self):
        if self.precision < 2:
            raise FloatError(f"precision must be >= 2, got {self.precision}")
        if not self.emin < self.emax:
            raise FloatError(f"need emin < emax, got {self.emin}, {self.emax}")
        if max(abs(self.emin), abs(self.emax)) >= EXPONENT_LIMIT:
            raise ExponentRangeError("exponent range exceeds implementation limit")

    @property
    def min_exponent(self) -> int:
        """Exponent of the smallest positive value."""
        if self.subnormals:
            return self.emin - self.precision + 1
        return self.emin

    def __str__(self):
        return self.name or f"p{self.precision}[{self.emin},{self.emax}]"


BINARY32 = Format(24, -126, 127, True, "binary32")
BINARY64 = Format(53, -1022, 1023, True, "binary64")


def wide(precision: int) -> Format:
    """Arbitrary precision with a huge exponent range and no subnormals."""
    return Format(precision, -WIDE_EXPONENT, WIDE_EXPONENT, False, f"wide({precision})")


def working(precision: int) -> Format:
    """Format used for oracle brackets; its range strictly contains ``wide``."""
    return Format(precision, -WORKING_EXPONENT, WORKING_EXPONENT, False, f"working({precision})")


class BigFloat:
    """An immutable binary floating-point value.

    Finite values are ``sign * significand * 2**(exponent - p + 1)``.  Normal
    significands have exactly ``p`` bits; subnormals (IEEE-like formats only)
    store ``exponent == emin`` with a shorter significand.  Zero is unsigned.
    """

    __slots__ = ("kind", "sign", "significand", "exponent", "fmt")

    def __init__(self, kind: Kind, sign: int, significand: int, exponent: int, fmt: Format):
        object.__setattr__(self, "kind", kind)
        object.__setattr__(self, "sign", sign)
        object.__setattr__(self, "significand", significand)
        object.__setattr__(self, "exponent", exponent)
        object.__setattr__(self, "fmt", fmt)

    def __setattr__(self, name, value):
        raise AttributeError("BigFloat is immutable")

    def __reduce__(self):
        return (BigFloat, (self.kind, self.sign, self.significand, self.exponent, self.fmt))

    # classification

    @property
    def is_nan(self) -> bool:
        return self.kind is Kind.NAN

    @property
    def is_inf(self) -> bool:
        return self.kind is Kind.POS_INF or self.kind is Kind.NEG_INF

    @property
    def is_zero(self) -> bool:
        return self.kind is Kind.ZERO

    @property
    def is_finite(self) -> bool:
        return self.kind is Kind.ZERO or self.kind is Kind.FINITE

    @property
    def is_subnormal(self) -> bool:
        return self.kind is Kind.FINITE and self.significand < (1 << (self.fmt.precision - 1))

    def scaled(self) -> tuple[int, int]:
        """Return ``(m, e)`` with the exact value ``m * 2**e`` (m signed)."""
        if self.kind is Kind.ZERO:
            return 0, 0
        if self.kind is not Kind.FINITE:
            raise FloatError(f"{self!r} has no finite value")
        return self.sign * self.significand, self.exponent - self.fmt.precision + 1

    @property
    def lead_exponent(self) -> int:
        """Exponent of the leading one bit (differs from ``exponent`` for subnormals)."""
        m, e = self.scaled()
        return e + abs(m).bit_length() - 1

    def to_fraction(self) -> Fraction:
        m, e = self.scaled()
        return Fraction(m) * 2**e if e >= 0 else Fraction(m, 1 << -e)

    def __float__(self) -> float:
        if self.kind is Kind.NAN:
            return math.nan
        if self.kind is Kind.POS_INF:
            return math.inf
        if self.kind is Kind.NEG_INF:
            return -math.inf
        m, e = self.scaled()
        try:
            return math.ldexp(float(m), e) if abs(m).bit_length() <= 53 else float(self.to_fraction())
        except OverflowError:
            return math.copysign(math.inf, m)

    def __neg__(self) -> "BigFloat":
        if self.kind is Kind.FINITE:
            return BigFloat(Kind.FINITE, -self.sign, self.significand, self.exponent, self.fmt)
        if self.kind is Kind.POS_INF:
            return infinity(self.fmt, -1)
        if self.kind is Kind.NEG_INF:
            return infinity(self.fmt, 1)
        return self

    def __abs__(self) -> "BigFloat":
        return -self if (self.kind is Kind.FINITE and self.sign < 0) or self.kind is Kind.NEG_INF else self

    # equality is bit identity; ordering is numeric

    def __eq__(self, other):
        if not isinstance(other, BigFloat):
            return NotImplemented
        if self.kind is Kind.NAN or other.kind is Kind.NAN:
            return False
        return (
            self.kind is other.kind
            and self.sign == other.sign
            and self.significand == other.significand
            and self.exponent == other.exponent
            and self.fmt == other.fmt
        )

    def __hash__(self):
        return hash((self.kind, self.sign, self.significand, self.exponent, self.fmt))

    def __lt__(self, other):
        return compare(self, other) == -1

    def __le__(self, other):
        return compare(self, other) in (-1, 0)

    def __gt__(self, other):
        return compare(self, other) == 1

    def __ge__(self, other):
        return compare(self, other) in (0, 1)

    def same_value(self, other: "BigFloat") -> bool:
        """Numeric equality regardless of format (nan equals nan here)."""
        if self.is_nan or other.is_nan:
            return self.is_nan and other.is_nan
        return compare(self, other) == 0

    def __repr__(self):
        if self.kind is Kind.FINITE:
            m, e = self.scaled()
            return f"BigFloat({m}*2**{e}, {self.fmt})"
        return f"BigFloat({self.kind.value}, {self.fmt})"


class Bracket(NamedTuple):
    """A guaranteed enclosure ``lo <= true value <= hi``."""

    lo: BigFloat
    hi: BigFloat

    def contains(self, other: "Bracket") -> bool:
        return self.lo <= other.lo and other.hi <= self.hi


def zero(fmt: Format) -> BigFloat:
    return BigFloat(Kind.ZERO, 1, 0, 0, fmt)


def infinity(fmt: Format, sign: int = 1) -> BigFloat:
    return BigFloat(Kind.POS_INF if sign > 0 else Kind.NEG_INF, 1 if sign > 0 else -1, 0, 0, fmt)


def nan(fmt: Format) -> BigFloat:
    return BigFloat(Kind.NAN, 1, 0, 0, fmt)


def max_finite(fmt: Format, sign: int = 1) -> BigFloat:
    return BigFloat(Kind.FINITE, sign, (1 << fmt.precision) - 1, fmt.emax, fmt)


def min_positive(fmt: Format, sign: int = 1) -> BigFloat:
    if fmt.subnormals:
        return BigFloat(Kind.FINITE, sign, 1, fmt.emin, fmt)
    return BigFloat(Kind.FINITE, sign, 1 << (fmt.precision - 1), fmt.emin, fmt)


def _rounds_away(sign: int, rnd: RoundingDirection) -> bool:
    """Whether a directed rounding moves the magnitude up (no ties involved)."""
    if rnd is TOWARD_ZERO:
        return False
    if rnd is UP:
        return sign > 0
    if rnd is DOWN:
        return sign < 0
    raise FloatError("nearest rounding needs the remainder")


def _overflow(sign: int, fmt: Format, rnd: RoundingDirection) -> BigFloat:
    if rnd is NEAREST or _rounds_away(sign, rnd):
        return infinity(fmt, sign)
    return max_finite(fmt, sign)


def round_scaled(
    sign: int, mag: int, e: int, fmt: Format, rnd: RoundingDirection, sticky: bool = False
) -> BigFloat:
    """Round ``sign * (mag + delta) * 2**e`` into ``fmt``.

    ``delta`` is 0 when ``sticky`` is false, otherwise some unknown value in
    (0, 1).  A sticky input must carry enough bits that the unknown fraction
    lies strictly below the target grid; violating this raises.
    """
    if mag < 0:
        sign, mag = -sign, -mag
    sign = 1 if sign >= 0 else -1
    if mag == 0:
        if sticky:
            raise FloatError("sticky rounding needs a nonzero significand")
        return zero(fmt)
    p = fmt.precision
    lead = e + mag.bit_length() - 1
    if lead > fmt.emax:
        return _overflow(sign, fmt, rnd)
    if lead < fmt.emin and not fmt.subnormals:
        return _flush(sign, mag, e, lead, fmt, rnd, sticky)
    qe = (max(lead, fmt.emin) if fmt.subnormals else lead) - p + 1
    shift = qe - e
    if shift <= 0:
        if sticky:
            raise FloatError("sticky bits finer than the target grid are undefined")
        q = mag << -shift
    else:
        q = mag >> shift
        rem = mag & ((1 << shift) - 1)
        if rem or sticky:
            if rnd is NEAREST:
                half = 1 << (shift - 1)
                bump = rem > half or (rem == half and (sticky or q & 1))
            else:
                bump = _rounds_away(sign, rnd)
            if bump:
                q += 1
                if q == 1 << p:
                    q >>= 1
                    qe += 1
    if q == 0:
        return zero(fmt)
    exponent = qe + p - 1
    if exponent > fmt.emax:
        return _overflow(sign, fmt, rnd)
    return BigFloat(Kind.FINITE, sign, q, exponent, fmt)


def _flush(sign, mag, e, lead, fmt, rnd, sticky):
    # magnitude lies in (0, 2**emin) and there is nothing representable in between
    if rnd is NEAREST:
        if lead < fmt.emin - 1:
            bump = False
        else:
            exact_half = mag & (mag - 1) == 0 and not sticky
            bump = not exact_half
    else:
        bump = _rounds_away(sign, rnd)
    return min_positive(fmt, sign) if bump else zero(fmt)


def from_int(n: int, fmt: Format, rnd: RoundingDirection = NEAREST) -> BigFloat:
    return round_scaled(1, n, 0, fmt, rnd)


def round_rational(num: int, den: int, fmt: Format, rnd: RoundingDirection) -> BigFloat:
    """Round ``num / den`` (den > 0) into ``fmt``."""
    if den <= 0:
        raise FloatError("denominator must be positive")
    if num == 0:
        return zero(fmt)
    sign = 1 if num > 0 else -1
    num = abs(num)
    shift = max(0, fmt.precision + 3 + den.bit_length() - num.bit_length())
    q, r = divmod(num << shift, den)
    return round_scaled(sign, q, -shift, fmt, rnd, sticky=r != 0)


def from_fraction(value: Union[Fraction, int], fmt: Format, rnd: RoundingDirection = NEAREST) -> BigFloat:
    value = Fraction(value)
    return round_rational(value.numerator, value.denominator, fmt, rnd)


def from_float(x: float, fmt: Format = BINARY64, rnd: RoundingDirection = NEAREST) -> BigFloat:
    if math.isnan(x):
        return nan(fmt)
    if math.isinf(x):
        return infinity(fmt, 1 if x > 0 else -1)
    num, den = x.as_integer_ratio()
    return round_rational(num, den, fmt, rnd)


def convert(x: BigFloat, fmt: Format, rnd: RoundingDirection = NEAREST) -> BigFloat:
    """Round ``x`` into another format."""
    if x.kind is Kind.FINITE:
        m, e = x.scaled()
        return round_scaled(1, m, e, fmt, rnd)
    return BigFloat(x.kind, x.sign, 0, 0, fmt)


def round_from_bracket(b: Bracket, target: Format, rnd: RoundingDirection) -> Optional[BigFloat]:
    """Round both ends of ``b``; return the common value, or ``None`` when they differ.

    ``None`` means the bracket is too wide to decide and the caller has to
    recompute at a higher working precision.
    """
    if b.lo.is_nan or b.hi.is_nan:
        raise FloatError("nan in bracket")
    lo = convert(b.lo, target, rnd)
    hi = convert(b.hi, target, rnd)
    return lo if lo == hi else None


# ordinals: consecutive representable values map to consecutive integers


def _max_ordinal(fmt: Format) -> int:
    half = 1 << (fmt.precision - 1)
    if fmt.subnormals:
        return (fmt.emax - fmt.emin) * half + (1 << fmt.precision) - 1
    return (fmt.emax - fmt.emin + 1) * half


def to_ordinal(x: BigFloat) -> int:
    """Signed index of ``x`` among the representable values of its format.

    Zero maps to 0 and the infinities to one past the extreme finite values.
    """
    fmt = x.fmt
    if x.kind is Kind.NAN:
        raise FloatError("nan has no ordinal")
    if x.kind is Kind.ZERO:
        return 0
    if x.is_inf:
        return (_max_ordinal(fmt) + 1) * x.sign
    half = 1 << (fmt.precision - 1)
    if fmt.subnormals:
        idx = (x.exponent - fmt.emin) * half + x.significand
    else:
        idx = (x.exponent - fmt.emin) * half + (x.significand - half) + 1
    return idx * x.sign


def from_ordinal(n: int, fmt: Format) -> BigFloat:
    top = _max_ordinal(fmt)
    if n == 0:
        return zero(fmt)
    sign = 1 if n > 0 else -1
    idx = abs(n)
    if idx > top:
        return infinity(fmt, sign)
    half = 1 << (fmt.precision - 1)
    if fmt.subnormals:
        if idx < half:
            return BigFloat(Kind.FINITE, sign, idx, fmt.emin, fmt)
        k, r = divmod(idx, half)
        return BigFloat(Kind.FINITE, sign, half + r, fmt.emin + k - 1, fmt)
    k, r = divmod(idx - 1, half)
    return BigFloat(Kind.FINITE, sign, half + r, fmt.emin + k, fmt)


def next_float(x: BigFloat, rnd: RoundingDirection) -> BigFloat:
    """nextUp (``rnd=UP``) or nextDown (``rnd=DOWN``) within ``x``'s format."""
    if x.is_nan:
        raise FloatError("next of nan")
    if rnd is UP:
        if x.kind is Kind.POS_INF:
            return x
        if x.kind is Kind.NEG_INF:
            return max_finite(x.fmt, -1)
        return from_ordinal(to_ordinal(x) + 1, x.fmt)
    if rnd is DOWN:
        if x.kind is Kind.NEG_INF:
            return x
        if x.kind is Kind.POS_INF:
            return max_finite(x.fmt, 1)
        return from_ordinal(to_ordinal(x) - 1, x.fmt)
    raise FloatError("next needs UP or DOWN")


def next_up(x: BigFloat) -> BigFloat:
    return next_float(x, UP)


def next_down(x: BigFloat) -> BigFloat:
    return next_float(x, DOWN)


# arithmetic


def _add_exact_or_sticky(x: BigFloat, y: BigFloat, fmt: Format, rnd: RoundingDirection) -> BigFloat:
    mx, ex = x.scaled()
    my, ey = y.scaled()
    if mx == 0:
        return round_scaled(1, my, ey, fmt, rnd)
    if my == 0:
        return round_scaled(1, mx, ex, fmt, rnd)
    lead_x = ex + abs(mx).bit_length() - 1
    lead_y = ey + abs(my).bit_length() - 1
    if lead_x < lead_y:
        mx, ex, lead_x, my, ey, lead_y = my, ey, lead_y, mx, ex, lead_x
    # when y is far below x's last needed bit it only contributes a sticky bit
    low = min(ex, lead_x - fmt.precision - 3)
    if lead_y + 1 <= low:
        shift = ex - low
        a = abs(mx) << shift
        sign = 1 if mx > 0 else -1
        if (my > 0) == (mx > 0):
            return round_scaled(sign, a, low, fmt, rnd, sticky=True)
        return round_scaled(sign, a - 1, low, fmt, rnd, sticky=True)
    e = min(ex, ey)
    total = (mx << (ex - e)) + (my << (ey - e))
    return round_scaled(1, total, e, fmt, rnd)


def arith(op: str, x: BigFloat, y: BigFloat, fmt: Format, rnd: RoundingDirection) -> BigFloat:
    """Correctly rounded ``add``, ``sub``, ``mul`` or ``div``."""
    if op == "sub":
        return arith("add", x, -y, fmt, rnd)
    if x.is_nan or y.is_nan:
        return nan(fmt)
    if op == "add":
        if x.is_inf or y.is_inf:
            if x.is_inf and y.is_inf and x.sign != y.sign:
                return nan(fmt)
            return infinity(fmt, x.sign if x.is_inf else y.sign)
        return _add_exact_or_sticky(x, y, fmt, rnd)
    if op == "mul":
        if x.is_inf or y.is_inf:
            if x.is_zero or y.is_zero:
                return nan(fmt)
            return infinity(fmt, x.sign * y.sign)
        mx, ex = x.scaled()
        my, ey = y.scaled()
        return round_scaled(1, mx * my, ex + ey, fmt, rnd)
    if op == "div":
        if x.is_inf:
            if y.is_inf:
                return nan(fmt)
            return infinity(fmt, x.sign * (y.sign if not y.is_zero else 1))
        if y.is_inf:
            return zero(fmt)
        if y.is_zero:
            if x.is_zero:
                return nan(fmt)
            return infinity(fmt, x.sign)
        if x.is_zero:
            return zero(fmt)
        mx, ex = x.scaled()
        my, ey = y.scaled()
        sign = 1 if (mx > 0) == (my > 0) else -1
        mx, my = abs(mx), abs(my)
        shift = max(0, fmt.precision + 3 + my.bit_length() - mx.bit_length())
        q, r = divmod(mx << shift, my)
        return round_scaled(sign, q, ex - ey - shift, fmt, rnd, sticky=r != 0)
    raise FloatError(f"unknown arithmetic operation {op!r}")


def _rank(x: BigFloat) -> int:
    if x.kind is Kind.NEG_INF:
        return -2
    if x.kind is Kind.POS_INF:
        return 2
    return 0


def compare(x: BigFloat, y: BigFloat) -> Optional[int]:
    """Return -1, 0 or 1; ``None`` when either side is nan."""
    if x.is_nan or y.is_nan:
        return None
    rx, ry = _rank(x), _rank(y)
    if rx or ry:
        return (rx > ry) - (rx < ry)
    mx, ex = x.scaled()
    my, ey = y.scaled()
    sx = (mx > 0) - (mx < 0)
    sy = (my > 0) - (my < 0)
    if sx != sy:
        return (sx > sy) - (sx < sy)
    if sx == 0:
        return 0
    lx = ex + abs(mx).bit_length()
    ly = ey + abs(my).bit_length()
    if lx != ly:
        return sx if lx > ly else -sx
    e = min(ex, ey)
    a = mx << (ex - e)
    b = my << (ey - e)
    return (a > b) - (a < b)
