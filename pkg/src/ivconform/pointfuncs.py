"""Correctly rounded elementary functions at a point.

Each function has a fixed-point evaluator returning ``(y, err, s)`` with the
guarantee ``|f(x) - y * 2**s| <= err * 2**s``.  :func:`eval_faithful` turns that
into a :class:`~ivconform.bigfloat.Bracket` at a working precision, and
:func:`eval_correctly_rounded` runs the Ziv loop on top of it: round both ends
of the bracket, and if they disagree, recompute with more bits.

All arithmetic is on Python integers.  Error bounds are counted in units of
the last fixed-point bit and are deliberately generous.
"""

from __future__ import annotations

import enum
import math
import threading
from fractions import Fraction
from functools import lru_cache
from typing import Optional, Sequence

from . import bigfloat as bf
from .bigfloat import DOWN, NEAREST, UP, BigFloat, Bracket, Format, Kind, RoundingDirection

__all__ = [
    "FunctionId",
    "DomainError",
    "ResourceError",
    "ARITY",
    "in_domain",
    "eval_faithful",
    "eval_correctly_rounded",
    "exact_case",
    "pi_enclosure",
    "DEFAULT_CEILING",
]

DEFAULT_CEILING = 2000
START_EXTRA = 20


class FunctionId(str, enum.Enum):
    NEG = "neg"
    ADD = "add"
    SUB = "sub"
    MUL = "mul"
    DIV = "div"
    SQR = "sqr"
    SQRT = "sqrt"
    CBRT = "cbrt"
    EXP = "exp"
    EXP2 = "exp2"
    LOG = "log"
    LOG2 = "log2"
    SIN = "sin"
    COS = "cos"
    ATANH = "atanh"

    def __str__(self):
        return self.value


ARITY = {f: 2 if f in (FunctionId.ADD, FunctionId.SUB, FunctionId.MUL, FunctionId.DIV) else 1 for f in FunctionId}
ARITHMETIC = {FunctionId.ADD, FunctionId.SUB, FunctionId.MUL, FunctionId.DIV}


class DomainError(ValueError):
    """Argument outside the natural domain of the function."""


class ResourceError(RuntimeError):
    """The required working precision exceeded the configured ceiling."""


def in_domain(f: FunctionId, args: Sequence[BigFloat]) -> bool:
    """Membership of a point in the natural real domain of ``f``."""
    f = FunctionId(f)
    if any(a.is_nan for a in args):
        return False
    if f is FunctionId.DIV:
        return not args[1].is_zero
    x = args[0]
    if f is FunctionId.SQRT:
        return x.kind is not Kind.NEG_INF and (x.is_zero or x.sign > 0)
    if f in (FunctionId.LOG, FunctionId.LOG2):
        return x.kind is Kind.POS_INF or (x.kind is Kind.FINITE and x.sign > 0)
    if f is FunctionId.ATANH:
        if not x.is_finite:
            return False
        m, e = x.scaled()
        return abs(m).bit_length() + e <= 0 or x.is_zero
    if f in (FunctionId.SIN, FunctionId.COS):
        return x.is_finite
    return True


# --------------------------------------------------------------------------
# fixed-point constants


def _bucket(w: int) -> int:
    return ((w + 64) // 256 + 1) * 256


def _atan_inv(n: int, w: int, hyperbolic: bool) -> tuple[int, int]:
    """atan(1/n) or atanh(1/n) scaled by 2**w, with an error bound in units."""
    power = (1 << w) // n
    n2 = n * n
    total = 0
    k = 0
    while power:
        term = power // (2 * k + 1)
        total += term if (hyperbolic or k % 2 == 0) else -term
        power //= n2
        k += 1
    return total, k + 2


@lru_cache(maxsize=64)
def _pi_bucket(w: int) -> tuple[int, int]:
    a, ea = _atan_inv(5, w, False)
    b, eb = _atan_inv(239, w, False)
    return 16 * a - 4 * b, 16 * ea + 4 * eb


@lru_cache(maxsize=64)
def _ln2_bucket(w: int) -> tuple[int, int]:
    a, ea = _atan_inv(26, w, True)
    b, eb = _atan_inv(4801, w, True)
    c, ec = _atan_inv(8749, w, True)
    return 18 * a - 2 * b + 8 * c, 18 * ea + 2 * eb + 8 * ec


_cache_lock = threading.Lock()


def _from_bucket(fn, w: int) -> tuple[int, int]:
    wb = _bucket(w)
    with _cache_lock:
        value, err = fn(wb)
    d = wb - w
    return value >> d, (err >> d) + 2


def _pi_fixed(w: int) -> tuple[int, int]:
    """pi * 2**w and its error in units (read-mostly cache under the hood)."""
    return _from_bucket(_pi_bucket, w)


def _ln2_fixed(w: int) -> tuple[int, int]:
    return _from_bucket(_ln2_bucket, w)


# --------------------------------------------------------------------------
# series kernels


def _exp_taylor(r: int, w: int) -> tuple[int, int]:
    """exp(r / 2**w) * 2**w for |r| <= 0.75 * 2**w."""
    if abs(r) > (3 << w) >> 2:
        raise AssertionError("exp kernel argument out of range")
    total = 0
    term = 1 << w
    j = 0
    while term:
        total += term
        j += 1
        term = ((term * r) >> w) // j
    return total, 8 * j + 40


def _atanh_ratio(a: int, b: int, w: int) -> tuple[int, int, int]:
    """atanh(a/b) with relative accuracy, for |a/b| <= 1/2 and b > 0."""
    if a == 0:
        return 0, 0, -w
    z2 = ((a * a) << w) // (b * b)
    total = 0
    power = 1 << w
    k = 0
    while power:
        total += power // (2 * k + 1)
        power = (power * z2) >> w
        k += 1
    err_s = 4 * k + 6
    t = b.bit_length() - abs(a).bit_length() + 1
    y = _mul_div_shift(a * total, b, t)
    return y, 4 * err_s + 2, -(w + t)


def _mul_div_shift(num: int, den: int, t: int) -> int:
    """floor(num * 2**t / den) for any integer t."""
    if t >= 0:
        return (num << t) // den
    return num // (den << -t)


def _sin_ratio(a: int, b: int, w: int) -> tuple[int, int, int]:
    """sin(a/b) with relative accuracy, for |a/b| <= 1 and b > 0."""
    if a == 0:
        return 0, 0, -w
    z2 = ((a * a) << w) // (b * b)
    total = 0
    term = 1 << w
    k = 0
    while term:
        total += term
        k += 1
        term = -(((term * z2) >> w) // ((2 * k) * (2 * k + 1)))
    err_s = 3 * k + 6
    t = b.bit_length() - abs(a).bit_length() + 1
    y = _mul_div_shift(a * total, b, t)
    return y, 4 * err_s + 2, -(w + t)


def _cos_ratio(a: int, b: int, w: int) -> tuple[int, int, int]:
    """cos(a/b) with absolute accuracy 2**-w, for |a/b| <= 1 and b > 0."""
    z2 = ((a * a) << w) // (b * b)
    total = 0
    term = 1 << w
    k = 0
    while term:
        total += term
        k += 1
        term = -(((term * z2) >> w) // ((2 * k - 1) * (2 * k)))
    return total, 3 * k + 6, -w


def _log_ratio(a: int, b: int, k: int, w: int) -> tuple[int, int, int]:
    """log(a/b * 2**k) for positive integers a, b."""
    e = a.bit_length() - b.bit_length()
    if e >= 0:
        aa, bb = a, b << e
    else:
        aa, bb = a << -e, b
    # bring aa/bb into [sqrt(1/2), sqrt(2))
    while 2 * aa * aa < bb * bb:
        aa <<= 1
        e -= 1
    while aa * aa >= 2 * bb * bb:
        bb <<= 1
        e += 1
    e += k
    y, err, s = _atanh_ratio(aa - bb, aa + bb, w)
    y, err, s = 2 * y, 2 * err, s
    if e == 0:
        return y, err, s
    w2 = w + e.bit_length() + 4
    lg, elg = _ln2_fixed(w2)
    shift = -s - w2
    if shift >= 0:
        yf = y >> shift
        ef = (err >> shift) + 2
    else:
        yf = y << -shift
        ef = err << -shift
    return e * lg + yf, abs(e) * elg + ef, -w2


def _to_fixed(m: int, e: int, w: int) -> tuple[int, int]:
    """floor(m * 2**(e + w)) and its error (0 or 1)."""
    s = e + w
    if s >= 0:
        return m << s, 0
    return m >> -s, 1


def _icbrt(n: int) -> int:
    """floor(cbrt(n)) for n >= 0 by integer Newton iteration."""
    if n < 2:
        return n
    y = 1 << ((n.bit_length() + 2) // 3)
    while True:
        z = (2 * y + n // (y * y)) // 3
        if z >= y:
            break
        y = z
    while y * y * y > n:
        y -= 1
    while (y + 1) ** 3 <= n:
        y += 1
    return y


# --------------------------------------------------------------------------
# evaluators: (x, w) -> (y, err, s)


def _ev_exp(x: BigFloat, w: int):
    m, e = x.scaled()
    k = round(float(x) / math.log(2))
    w2 = w + max(abs(k).bit_length(), 1) + 4
    lg, elg = _ln2_fixed(w2)
    xf, ex = _to_fixed(m, e, w2)
    r = xf - k * lg
    er = ex + abs(k) * elg
    t, et = _exp_taylor(r, w2)
    return t, et + 3 * er, k - w2


def _ev_exp2(x: BigFloat, w: int):
    m, e = x.scaled()
    n = m >> -e if e < 0 else m << e
    w2 = w + 8
    frac = m - (n << -e) if e < 0 else 0
    ff, ef = _to_fixed(frac, e, w2) if frac else (0, 0)
    lg, elg = _ln2_fixed(w2)
    r = (ff * lg) >> w2
    er = ef + elg + 2
    t, et = _exp_taylor(r, w2)
    return t, et + 3 * er, n - w2


def _ev_log(x: BigFloat, w: int):
    m, e = x.scaled()
    return _log_ratio(m, 1, e, w)


def _ev_log2(x: BigFloat, w: int):
    y, err, s = _ev_log(x, w + 4)
    w2 = w + 8
    lg, elg = _ln2_fixed(w2)
    # y * 2**s / ln2 with ln2 = (lg +- elg) * 2**-w2; 2**w2 / lg < 1.5
    q = _mul_div_shift(y, lg, w2)
    eq = 2 * err + ((abs(y) * 3 * elg) >> w2) + 2
    return q, eq, s


def _ev_atanh(x: BigFloat, w: int):
    m, e = x.scaled()
    if e >= 0:
        raise DomainError("atanh argument outside (-1, 1)")
    d = 1 << -e
    if 2 * abs(m) <= d:
        return _atanh_ratio(m, d, w)
    y, err, s = _log_ratio(d + m, d - m, 0, w + 2)
    return y, err, s - 1


def _reduce_half_pi(x: BigFloat, w: int):
    """Return (r, err_r, wp, k) with x = k*pi/2 + r, r = r_int * 2**-wp."""
    m, e = x.scaled()
    lead = x.lead_exponent
    wp = w + max(lead, 0) + 24
    pi, epi = _pi_fixed(wp)
    half, ehalf = pi >> 1, (epi + 1) // 2 + 1
    xf, ex = _to_fixed(m, e, wp)
    k = (2 * xf + half) // (2 * half)
    r = xf - k * half
    return r, ex + abs(k) * ehalf, wp, k


def _ev_trig(x: BigFloat, w: int, cosine: bool):
    m, e = x.scaled()
    if x.lead_exponent < 0:
        d = 1 << -e
        return _cos_ratio(m, d, w) if cosine else _sin_ratio(m, d, w)
    r, er, wp, k = _reduce_half_pi(x, w)
    quadrant = k & 3
    use_sin = (quadrant % 2 == 0) != cosine
    y, err, s = _sin_ratio(r, 1 << wp, w) if use_sin else _cos_ratio(r, 1 << wp, w)
    # propagate the reduction error (derivatives are bounded by 1)
    shift = -wp - s
    err += (er << shift) if shift >= 0 else -((-er) >> -shift)
    negate = quadrant in (2, 3) if not cosine else quadrant in (1, 2)
    return (-y if negate else y), err, s


def _ev_sqrt(x: BigFloat, w: int):
    m, e = x.scaled()
    shift = max(0, 2 * w + 4 - m.bit_length())
    if (e - shift) % 2:
        shift += 1
    return math.isqrt(m << shift), 1, (e - shift) // 2


def _ev_cbrt(x: BigFloat, w: int):
    m, e = x.scaled()
    sign = -1 if m < 0 else 1
    m = abs(m)
    shift = max(0, 3 * w + 6 - m.bit_length())
    shift += (e - shift) % 3
    root = _icbrt(m << shift)
    return sign * root, 1, (e - shift) // 3


_EVALUATORS = {
    FunctionId.EXP: _ev_exp,
    FunctionId.EXP2: _ev_exp2,
    FunctionId.LOG: _ev_log,
    FunctionId.LOG2: _ev_log2,
    FunctionId.ATANH: _ev_atanh,
    FunctionId.SIN: lambda x, w: _ev_trig(x, w, False),
    FunctionId.COS: lambda x, w: _ev_trig(x, w, True),
    FunctionId.SQRT: _ev_sqrt,
    FunctionId.CBRT: _ev_cbrt,
}


# --------------------------------------------------------------------------
# exact cases


def _exact_value(sign: int, m: int, e: int) -> BigFloat:
    if m == 0:
        return bf.zero(bf.working(2))
    fmt = bf.working(max(2, m.bit_length()))
    return bf.round_scaled(sign, m, e, fmt, NEAREST)


def _odd_part(m: int, e: int) -> tuple[int, int]:
    tz = (m & -m).bit_length() - 1
    return m >> tz, e + tz


def exact_case(f: FunctionId, args: Sequence[BigFloat]) -> Optional[BigFloat]:
    """The exact value of ``f(args)`` when it is a dyadic number, else ``None``.

    Transcendental functions are exact only at the classical points; algebraic
    ones are tested with integer arithmetic.
    """
    f = FunctionId(f)
    if any(not a.is_finite for a in args):
        return None
    x = args[0]
    if f in ARITHMETIC:
        return None
    if x.is_zero:
        if f in (FunctionId.EXP, FunctionId.EXP2, FunctionId.COS):
            return _exact_value(1, 1, 0)
        if f in (FunctionId.LOG, FunctionId.LOG2):
            return None
        return _exact_value(1, 0, 0)
    m, e = x.scaled()
    sign = 1 if m > 0 else -1
    odd, oe = _odd_part(abs(m), e)
    if f is FunctionId.NEG:
        return _exact_value(-sign, odd, oe)
    if f is FunctionId.SQR:
        return _exact_value(1, odd * odd, 2 * oe)
    if f is FunctionId.EXP2:
        if oe >= 0 and abs(m).bit_length() + e <= 40:
            n = sign * (odd << oe)
            return _exact_value(1, 1, n)
        return None
    if f is FunctionId.LOG and sign > 0 and odd == 1 and oe == 0:
        return _exact_value(1, 0, 0)
    if f is FunctionId.LOG2 and sign > 0 and odd == 1:
        return _exact_value(1 if oe >= 0 else -1, abs(oe), 0)
    if f is FunctionId.SQRT and sign > 0 and oe % 2 == 0:
        r = math.isqrt(odd)
        if r * r == odd:
            return _exact_value(1, r, oe // 2)
    if f is FunctionId.CBRT and oe % 3 == 0:
        r = _icbrt(odd)
        if r * r * r == odd:
            return _exact_value(sign, r, oe // 3)
    return None


# --------------------------------------------------------------------------
# brackets


def _enclose(evaluate, q: int, limit: int) -> tuple[int, int, int]:
    """Run ``evaluate(w)`` until the enclosure is relatively narrower than 2**-(q+8)."""
    w = q + 16
    while True:
        y, err, s = evaluate(w)
        a, b = y - err, y + err
        if a > 0 or b < 0:
            small = min(abs(a), abs(b))
            lead = s + small.bit_length() - 1
            width_exp = s + (b - a).bit_length()
            deficit = width_exp - (lead - q - 8)
            if deficit <= 0:
                return a, b, s
            w += deficit + 8
        else:
            w = 2 * w
        if w > limit:
            raise ResourceError(f"working precision {w} exceeds limit {limit}")


def _bracket_from_enclosure(a: int, b: int, s: int, q: int) -> Bracket:
    fmt = bf.working(q)
    small = min(abs(a), abs(b))
    lead = s + small.bit_length() - 1
    # widen by 2**(lead-q-4) so brackets at growing q are nested
    d = lead - q - 4
    base = min(s, d)
    a2 = (a << (s - base)) - (1 << (d - base))
    b2 = (b << (s - base)) + (1 << (d - base))
    return Bracket(bf.round_scaled(1, a2, base, fmt, DOWN), bf.round_scaled(1, b2, base, fmt, UP))


def pi_enclosure(q: int) -> Bracket:
    """Bracket around pi at precision ``q`` (Machin's arctangent formula)."""
    if q < 2:
        raise ValueError("precision must be >= 2")

    def evaluate(w):
        v, err = _pi_fixed(w)
        return v, err, -w

    a, b, s = _enclose(evaluate, q, 64 * q + 4096)
    return _bracket_from_enclosure(a, b, s, q)


def _threshold_ln2_hi() -> Fraction:
    return Fraction(6932, 10000)


def _exp_range(f: FunctionId, x: BigFloat, fmt: Format) -> Optional[int]:
    """+1 if exp/exp2(x) surely overflows ``fmt``, -1 if surely below min/4, else None."""
    hi = fmt.emax + 1
    lo = fmt.min_exponent - 2
    if x.lead_exponent > 40:
        return 1 if x.sign > 0 else -1
    v = x.to_fraction()
    scale = _threshold_ln2_hi() if f is FunctionId.EXP else 1
    if v >= hi * scale:
        return 1
    if v <= lo * scale:
        return -1
    return None


def _check_args(f: FunctionId, args: Sequence[BigFloat]):
    if len(args) != ARITY[f]:
        raise TypeError(f"{f} takes {ARITY[f]} argument(s), got {len(args)}")
    if any(a.is_nan for a in args):
        raise DomainError(f"nan argument to {f}")


def _limit(f: FunctionId, x: BigFloat) -> Optional[BigFloat]:
    """Value at an infinite argument, when ``f`` has a limit there."""
    w = bf.working(2)
    pos = x.kind is Kind.POS_INF
    if f in (FunctionId.EXP, FunctionId.EXP2):
        return bf.infinity(w) if pos else bf.zero(w)
    if f in (FunctionId.LOG, FunctionId.LOG2, FunctionId.SQRT):
        return bf.infinity(w) if pos else None
    if f is FunctionId.CBRT:
        return bf.infinity(w, 1 if pos else -1)
    if f is FunctionId.NEG:
        return bf.infinity(w, -1 if pos else 1)
    if f is FunctionId.SQR:
        return bf.infinity(w)
    return None


_LN2_LO = Fraction(69314718, 10**8)
_LN2_HI = Fraction(69314719, 10**8)


def _tiny_bounds(f: FunctionId, x: BigFloat, q: int) -> Optional[Bracket]:
    """Truncated Taylor bounds for |x| < 2**-16, in directed arithmetic at ``q`` bits.

    The cost does not grow with the exponent of ``x``, which matters for
    wide formats where |x| can be 2**-1000000.
    """
    if x.is_zero or x.lead_exponent >= -16:
        return None
    if f not in (FunctionId.EXP, FunctionId.EXP2, FunctionId.SIN, FunctionId.COS, FunctionId.ATANH):
        return None
    w = bf.working(q)

    def op(name, a, b, rnd):
        return bf.arith(name, a, b, w, rnd)

    def k(n):
        return bf.from_fraction(n, w)

    one = k(1)
    sq_lo, sq_hi = op("mul", x, x, DOWN), op("mul", x, x, UP)
    if f is FunctionId.EXP:
        # 1 + v <= exp(v) <= 1 + v + v^2
        return Bracket(op("add", one, x, DOWN), op("add", one, op("add", x, sq_hi, UP), UP))
    if f is FunctionId.EXP2:
        l_lo, l_hi = bf.from_fraction(_LN2_LO, w, DOWN), bf.from_fraction(_LN2_HI, w, UP)
        lo_c, hi_c = (l_lo, l_hi) if x.sign > 0 else (l_hi, l_lo)
        lo = op("add", one, op("mul", x, lo_c, DOWN), DOWN)
        hi = op("add", one, op("add", op("mul", x, hi_c, UP), sq_hi, UP), UP)
        return Bracket(lo, hi)
    if f is FunctionId.COS:
        # 1 - v^2/2 <= cos(v) <= 1 - v^2/4
        return Bracket(op("sub", one, op("div", sq_hi, k(2), UP), DOWN),
                       op("sub", one, op("div", sq_lo, k(4), DOWN), UP))
    a = abs(x)
    cube_lo, cube_hi = op("mul", sq_lo, a, DOWN), op("mul", sq_hi, a, UP)
    if f is FunctionId.SIN:
        # a - a^3/6 <= sin(a) <= a - a^3/8
        lo = op("sub", a, op("div", cube_hi, k(6), UP), DOWN)
        hi = op("sub", a, op("div", cube_lo, k(8), DOWN), UP)
    else:
        # a + a^3/3 <= atanh(a) <= a + a^3/2
        lo = op("add", a, op("div", cube_lo, k(3), DOWN), DOWN)
        hi = op("add", a, op("div", cube_hi, k(2), UP), UP)
    return Bracket(lo, hi) if x.sign > 0 else Bracket(-hi, -lo)


def _round_irrational(b: Bracket, target: Format, rnd: RoundingDirection) -> Optional[BigFloat]:
    """Like ``round_from_bracket``, for a value known to be irrational.

    Such a value lies strictly inside ``b``, so a directed rounding is
    decided as soon as no number of ``target`` lies strictly between the ends.
    """
    if rnd is bf.TOWARD_ZERO:
        if b.lo.sign >= 0 and not b.lo.is_zero:
            rnd = DOWN
        elif b.hi.sign < 0:
            rnd = UP
    if rnd is DOWN:
        r = bf.convert(b.lo, target, DOWN)
        return r if bf.compare(bf.next_up(r), b.hi) >= 0 else None
    if rnd is UP:
        r = bf.convert(b.hi, target, UP)
        return r if bf.compare(bf.next_down(r), b.lo) <= 0 else None
    return bf.round_from_bracket(b, target, rnd)


def eval_faithful(f: FunctionId, args: Sequence[BigFloat], q: int, *, ceiling: Optional[int] = None) -> Bracket:
    """Bracket ``f(args)`` at working precision ``q``: lo <= f(args) <= hi, hi - lo <= 2 ulps.

    When ``exp``/``exp2`` leave the working range the bracket reaches the
    corresponding infinity or zero.
    """
    f = FunctionId(f)
    _check_args(f, args)
    if ceiling is not None and q > ceiling:
        raise ResourceError(f"working precision {q} exceeds ceiling {ceiling}")
    fmt = bf.working(q)
    if f in ARITHMETIC:
        x, y = args
        return Bracket(bf.arith(f.value, x, y, fmt, DOWN), bf.arith(f.value, x, y, fmt, UP))
    x = args[0]
    if x.is_inf:
        lim = _limit(f, x)
        if lim is None:
            raise DomainError(f"{f} has no value at {x!r}")
        lim = bf.convert(lim, fmt)
        return Bracket(lim, lim)
    if not in_domain(f, args):
        raise DomainError(f"{f} undefined at {x!r}")
    if f in (FunctionId.EXP, FunctionId.EXP2):
        side = _exp_range(f, x, fmt)
        if side == 1:
            return Bracket(bf.max_finite(fmt), bf.infinity(fmt))
        if side == -1:
            return Bracket(bf.zero(fmt), bf.min_positive(fmt))
    exact = exact_case(f, args)
    if exact is not None:
        return Bracket(bf.convert(exact, fmt, DOWN), bf.convert(exact, fmt, UP))
    if f is FunctionId.NEG or f is FunctionId.SQR:
        return Bracket(*(_point_exact(f, x, fmt, d) for d in (DOWN, UP)))
    evaluate = _EVALUATORS[f]
    limit = 64 * q + 12 * max(x.lead_exponent, 0) + 20000
    a, b, s = _enclose(lambda w: evaluate(x, w), q, limit)
    return _bracket_from_enclosure(a, b, s, q)


def _point_exact(f: FunctionId, x: BigFloat, fmt: Format, rnd: RoundingDirection) -> BigFloat:
    if f is FunctionId.NEG:
        return bf.convert(-x, fmt, rnd)
    return bf.arith("mul", x, x, fmt, rnd)


def eval_correctly_rounded(
    f: FunctionId,
    args: Sequence[BigFloat],
    target: Format,
    rnd: RoundingDirection,
    *,
    start_precision: Optional[int] = None,
    ceiling: Optional[int] = None,
) -> BigFloat:
    """Directed (or nearest) rounding of the exact ``f(args)`` into ``target``.

    Ziv loop: the working precision starts at ``p + 20`` bits and the surplus
    doubles until both ends of the bracket round to the same value.
    """
    f = FunctionId(f)
    _check_args(f, args)
    p = target.precision
    ceiling = p + DEFAULT_CEILING if ceiling is None else ceiling
    if f in ARITHMETIC:
        return bf.arith(f.value, args[0], args[1], target, rnd)
    x = args[0]
    if f is FunctionId.NEG or f is FunctionId.SQR:
        return _point_exact(f, x, target, rnd)
    if x.is_inf:
        lim = _limit(f, x)
        if lim is None:
            raise DomainError(f"{f} has no value at {x!r}")
        return bf.convert(lim, target, rnd)
    if not in_domain(f, args):
        raise DomainError(f"{f} undefined at {x!r}")
    if f in (FunctionId.EXP, FunctionId.EXP2):
        # before the exact cases: 2**n for huge n is exact but unrepresentable
        side = _exp_range(f, x, target)
        if side == 1:
            return bf.infinity(target) if rnd in (UP, NEAREST) else bf.max_finite(target)
        if side == -1:
            return bf.min_positive(target) if rnd is UP else bf.zero(target)
    exact = exact_case(f, args)
    if exact is not None:
        return bf.convert(exact, target, rnd)
    bounds = _tiny_bounds(f, x, p + 40)
    if bounds is not None:
        value = _round_irrational(bounds, target, rnd)
        if value is not None:
            return value
    q = start_precision if start_precision is not None else p + START_EXTRA
    q = max(q, p + 2)
    while True:
        if q > ceiling:
            raise ResourceError(f"{f}({x!r}): working precision {q} exceeds ceiling {ceiling}")
        bracket = eval_faithful(f, args, q)
        value = bf.round_from_bracket(bracket, target, rnd)
        if value is not None:
            return value
        q = p + 2 * (q - p)
