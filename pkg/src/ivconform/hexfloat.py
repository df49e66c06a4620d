"""Bit-exact hexadecimal text for BigFloats, plus tolerant number parsing.

The native notation is ``[-]0xH.HHH@E``: hex digits read as a radix-16
fixed-point number, scaled by ``16**E`` with ``E`` written in decimal.
C-style ``0x1.8p3`` literals, decimal literals and ``inf``/``nan`` spellings
are accepted on input; only the ``@`` form is ever written.
"""

from __future__ import annotations

from fractions import Fraction

from .bigfloat import (
    NEAREST,
    BigFloat,
    FloatError,
    Format,
    Kind,
    RoundingDirection,
    infinity,
    nan,
    round_rational,
    round_scaled,
)

__all__ = ["ParseError", "PrecisionError", "parse_number", "format_hex", "format_number"]

_HEX = "0123456789abcdef"


class ParseError(ValueError):
    """Malformed numeric text; ``pos`` is the offending character index."""

    def __init__(self, message: str, text: str, pos: int):
        super().__init__(f"{message} at position {pos} in {text!r}")
        self.text = text
        self.pos = pos


class PrecisionError(ValueError):
    """A literal that must be exact is not representable in the target format."""


def _digits(text: str, pos: int, alphabet: str) -> tuple[str, int]:
    start = pos
    while pos < len(text) and text[pos] in alphabet:
        pos += 1
    return text[start:pos], pos


def _exponent(text: str, pos: int) -> tuple[int, int]:
    start = pos
    if pos < len(text) and text[pos] in "+-":
        pos += 1
    digits, end = _digits(text, pos, "0123456789")
    if not digits:
        raise ParseError("expected exponent digits", text, end)
    return int(text[start:end]), end


def _scan(text: str) -> tuple[int, object]:
    """Return ``(sign, payload)`` where payload is ``(mag, e2)``, a Fraction, or a keyword."""
    s = text.strip().lower()
    offset = len(text) - len(text.lstrip())
    if not s:
        raise ParseError("empty number", text, 0)
    pos = 0
    sign = 1
    if s[0] in "+-":
        sign = -1 if s[0] == "-" else 1
        pos = 1
    rest = s[pos:]
    if rest in ("inf", "infinity"):
        return sign, "inf"
    if rest == "nan":
        return sign, "nan"
    if rest.startswith("0x"):
        pos += 2
        int_part, pos = _digits(s, pos, _HEX)
        frac_part = ""
        if pos < len(s) and s[pos] == ".":
            frac_part, pos = _digits(s, pos + 1, _HEX)
        if not int_part and not frac_part:
            raise ParseError("expected hex digits", text, offset + pos)
        mag = int(int_part + frac_part, 16)
        e2 = -4 * len(frac_part)
        if pos < len(s):
            marker = s[pos]
            if marker == "@":
                exp, pos = _exponent(s, pos + 1)
                e2 += 4 * exp
            elif marker == "p":
                exp, pos = _exponent(s, pos + 1)
                e2 += exp
            else:
                raise ParseError(f"unexpected character {text[offset + pos]!r}", text, offset + pos)
        if pos != len(s):
            raise ParseError("trailing characters", text, offset + pos)
        return sign, (mag, e2)
    int_part, pos = _digits(s, pos, "0123456789")
    frac_part = ""
    if pos < len(s) and s[pos] == ".":
        frac_part, pos = _digits(s, pos + 1, "0123456789")
    if not int_part and not frac_part:
        raise ParseError("expected a number", text, offset + pos)
    exp = 0
    if pos < len(s) and s[pos] == "e":
        exp, pos = _exponent(s, pos + 1)
    if pos != len(s):
        raise ParseError(f"unexpected character {text[offset + pos]!r}", text, offset + pos)
    value = Fraction(int(int_part + frac_part or "0")) / 10 ** len(frac_part) * Fraction(10) ** exp
    return sign, value


def parse_number(
    text: str,
    target: Format,
    rnd: RoundingDirection = NEAREST,
    *,
    exact: bool = False,
) -> BigFloat:
    """Parse ``text`` into ``target``, rounding inexact literals in ``rnd``.

    With ``exact=True`` an inexact literal raises :class:`PrecisionError`.
    Negative zero parses to the (unsigned) zero.
    """
    sign, payload = _scan(text)
    if payload == "inf":
        return infinity(target, sign)
    if payload == "nan":
        return nan(target)
    if isinstance(payload, Fraction):
        num, den = payload.numerator * sign, payload.denominator
        value = round_rational(num, den, target, rnd)
        if exact and value.to_fraction() != payload * sign:
            raise PrecisionError(f"{text!r} is not representable in {target}")
        return value
    mag, e2 = payload
    value = round_scaled(sign, mag, e2, target, rnd)
    if exact and _odd_scaled(value) != _odd_scaled_pair(sign * mag, e2):
        raise PrecisionError(f"{text!r} is not representable in {target}")
    return value


def _odd_scaled_pair(m: int, e: int):
    if m == 0:
        return 0, 0
    tz = (m & -m).bit_length() - 1
    return m >> tz, e + tz


def _odd_scaled(x: BigFloat):
    """``(m, e)`` with odd ``m`` and value ``m * 2**e``; None if not finite."""
    if not x.is_finite:
        return None
    return _odd_scaled_pair(*x.scaled())


def is_exact(text: str, target: Format) -> bool:
    """Whether ``text`` denotes a value representable in ``target``."""
    try:
        parse_number(text, target, exact=True)
    except PrecisionError:
        return False
    return True


def format_hex(x: BigFloat) -> str:
    """Canonical ``@`` form: one nonzero hex digit before the point, no trailing zeros."""
    if x.kind is Kind.NAN:
        raise FloatError("nan has no hexadecimal form")
    if x.kind is Kind.POS_INF:
        return "inf"
    if x.kind is Kind.NEG_INF:
        return "-inf"
    if x.kind is Kind.ZERO:
        return "0x0@0"
    m, e = x.scaled()
    sign = "-" if m < 0 else ""
    m = abs(m)
    tz = (m & -m).bit_length() - 1
    m >>= tz
    e += tz
    lead = e + m.bit_length() - 1
    e16 = lead // 4
    s = e - 4 * e16
    if s >= 0:
        return f"{sign}0x{m << s:x}@{e16}"
    ndig = (-s + 3) // 4
    digits = f"{m << (4 * ndig + s):x}"
    head, tail = digits[0], digits[1:].rstrip("0")
    if tail:
        return f"{sign}0x{head}.{tail}@{e16}"
    return f"{sign}0x{head}@{e16}"


def format_number(x: BigFloat) -> str:
    """Like :func:`format_hex` but renders nan as ``"nan"``."""
    return "nan" if x.is_nan else format_hex(x)
