import random
from fractions import Fraction

import mpmath
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ivconform import bigfloat as bf
from ivconform.bigfloat import BINARY64, DOWN, UP
from ivconform.hexfloat import ParseError
from ivconform.interval import (
    DecoratedInterval,
    Decoration,
    IllFormed,
    Interval,
    construct,
    eval_decorated,
    eval_interval,
    format_interval,
    hull_of,
    next_out,
    numeric,
    parse_interval_literal,
    predicate,
    set_op,
)
from oracle import is_rd, is_ru, mp

B = BINARY64
COM, DAC, DEF, TRV, ILL = Decoration.COM, Decoration.DAC, Decoration.DEF, Decoration.TRV, Decoration.ILL


def iv(lo, hi):
    return construct(lo, hi, B)


def div_(lo, hi, dec=None):
    x = iv(lo, hi)
    return DecoratedInterval.new(x) if dec is None else DecoratedInterval(x, dec)


EMPTY = Interval.empty(B)
ENTIRE = Interval.entire(B)


# --------------------------------------------------------------------------
# examples given in prose


def test_sqrt_of_partially_defined_interval():
    # [PAPER] sqrt([-2,1]) = sqrt([0,1]) = [0,1], flagged by its decoration
    r = eval_decorated("sqrt", [div_(-2, 1)], B)
    assert r.interval == iv(0, 1)
    assert r.dec is TRV


def test_product_with_sine_of_square_root():
    # [PAPER] [0.5,1.5] * sin(sqrt([2,4])) is inside [0.4546, 1.5]
    s = eval_interval("sin", [eval_interval("sqrt", [iv(2, 4)], B)], B)
    r = eval_interval("mul", [iv("0.5", "1.5"), s], B)
    assert iv("0.4546", "0.4546").lo <= r.lo and r.hi <= iv("1.5", "1.5").hi


# --------------------------------------------------------------------------
# construction and validity


@pytest.mark.parametrize("lo, hi, rule", [("inf", "inf", "inf_lower"), ("-inf", "-inf", "inf_upper"),
                                          (2, 1, "reversed"), (float("nan"), 1, "nan")])
def test_construct_rejects_ill_formed(lo, hi, rule):
    with pytest.raises(IllFormed) as info:
        iv(lo, hi)
    assert info.value.rule == rule


def test_construct_rounds_outward():
    x = iv("0.1", "0.1")
    assert x.lo.to_fraction() < Fraction(1, 10) < x.hi.to_fraction()
    assert bf.next_up(x.lo) == x.hi


def test_decoration_validation():
    with pytest.raises(IllFormed):
        DecoratedInterval(iv(1, 2), ILL)
    with pytest.raises(IllFormed):
        DecoratedInterval(EMPTY, COM)
    with pytest.raises(IllFormed):
        DecoratedInterval(iv(1, "inf"), COM)
    assert DecoratedInterval.new(iv(1, "inf")).dec is DAC
    assert DecoratedInterval.new(EMPTY).dec is TRV
    assert DecoratedInterval.nai(B).is_nai


def test_decoration_order_and_parse():
    assert ILL < TRV < DEF < DAC < COM
    assert Decoration.parse("dac") is DAC
    assert str(COM) == "com"
    with pytest.raises(ValueError):
        Decoration.parse("good")


# --------------------------------------------------------------------------
# arithmetic against exact rational arithmetic

small = st.fractions(min_value=-1000, max_value=1000, max_denominator=1000)


@st.composite
def intervals(draw):
    a, b = sorted((draw(small), draw(small)))
    return iv(a, b), (a, b)


def hull_check(result, values):
    """``result`` is the outward-rounded hull of ``values`` (exact rationals)."""
    lo, hi = min(values), max(values)
    assert result.lo == bf.from_fraction(lo, B, DOWN)
    assert result.hi == bf.from_fraction(hi, B, UP)


@settings(max_examples=200)
@given(intervals(), intervals())
def test_add_sub_mul_are_tight(xa, ya):
    x, _ = xa
    y, _ = ya
    xs = [x.lo.to_fraction(), x.hi.to_fraction()]
    ys = [y.lo.to_fraction(), y.hi.to_fraction()]
    hull_check(eval_interval("add", [x, y], B), [a + b for a in xs for b in ys])
    hull_check(eval_interval("sub", [x, y], B), [a - b for a in xs for b in ys])
    hull_check(eval_interval("mul", [x, y], B), [a * b for a in xs for b in ys])


@settings(max_examples=200)
@given(intervals(), intervals())
def test_div_is_tight_when_divisor_excludes_zero(xa, ya):
    x, _ = xa
    y, _ = ya
    if y.lo <= bf.zero(B) <= y.hi:
        return
    xs = [x.lo.to_fraction(), x.hi.to_fraction()]
    ys = [y.lo.to_fraction(), y.hi.to_fraction()]
    hull_check(eval_interval("div", [x, y], B), [a / b for a in xs for b in ys])


@pytest.mark.parametrize("x, y, expected", [
    ((1, 2), (-1, 1), ("-inf", "inf")),
    ((1, 2), (0, 1), (1, "inf")),
    ((1, 2), (-1, 0), ("-inf", -1)),
    ((-2, -1), (0, 3), ("-inf", Fraction(-1, 3))),
    ((-2, -1), (-3, 0), (Fraction(1, 3), "inf")),
    ((-1, 1), (0, 1), ("-inf", "inf")),
    ((0, 0), (-1, 1), (0, 0)),
    ((1, 2), (0, 0), None),
    ((0, 0), (0, 0), None),
    ((1, "inf"), (1, "inf"), (0, "inf")),
    ((-3, 5), (-2, -1), (-5, 3)),
])
def test_division_cases(x, y, expected):
    r = eval_interval("div", [iv(*x), iv(*y)], B)
    assert r == (EMPTY if expected is None else iv(*expected))


def test_zero_times_infinity_is_zero():
    assert eval_interval("mul", [iv(0, 0), ENTIRE], B) == iv(0, 0)
    assert eval_interval("mul", [iv(1, "inf"), iv(-1, 0)], B) == iv("-inf", 0)


def test_sqr_and_neg():
    assert eval_interval("sqr", [iv(-3, 2)], B) == iv(0, 9)
    assert eval_interval("sqr", [iv("-inf", -2)], B) == iv(4, "inf")
    assert eval_interval("neg", [iv("-inf", 3)], B) == iv(-3, "inf")


def test_empty_propagates():
    for f in ("add", "mul", "div"):
        assert eval_interval(f, [EMPTY, iv(1, 2)], B).is_empty
    assert eval_interval("exp", [EMPTY], B).is_empty


def test_arity_is_checked():
    with pytest.raises(TypeError):
        eval_interval("add", [iv(1, 2)], B)


def test_width_seven_dependency():
    e = x = iv(0, 1)
    for op in ("sub", "add", "sub", "add", "sub", "add"):
        e = eval_interval(op, [e, x], B)
    assert e == iv(-3, 4)


# --------------------------------------------------------------------------
# elementary functions


@pytest.mark.parametrize("f, x, expected", [
    ("sqrt", (-3, -1), None),
    ("sqrt", (0, "inf"), (0, "inf")),
    ("log", (0, 1), ("-inf", 0)),
    ("log", (-1, 0), None),
    ("log2", ("0.25", 8), (-2, 3)),
    ("atanh", (-1, 1), ("-inf", "inf")),
    ("atanh", (1, 2), None),
    ("exp", ("-inf", 0), (0, 1)),
    ("exp2", (-1, 10), ("0.5", 1024)),
    ("cbrt", (-8, 27), (-2, 3)),
])
def test_elementary_edge_cases(f, x, expected):
    r = eval_interval(f, [iv(*x)], B)
    assert r == (EMPTY if expected is None else iv(*expected))


@pytest.mark.parametrize("f", ["exp", "exp2", "log", "log2", "sqrt", "cbrt", "atanh"])
def test_monotone_functions_use_correctly_rounded_endpoints(f):
    rng = random.Random(f)
    fn = {"exp": mpmath.exp, "exp2": lambda t: mpmath.power(2, t), "log": mpmath.log,
          "log2": lambda t: mpmath.log(t, 2), "sqrt": mpmath.sqrt, "atanh": mpmath.atanh,
          "cbrt": lambda t: mpmath.sign(t) * mpmath.cbrt(abs(t))}[f]
    lo_b, hi_b = {"atanh": (-0.99, 0.99), "log": (1e-3, 50), "log2": (1e-3, 50), "sqrt": (0, 50)}.get(f, (-20, 20))
    for _ in range(25):
        a, b = sorted(rng.uniform(lo_b, hi_b) for _ in range(2))
        r = eval_interval(f, [iv(a, b)], B)
        with mpmath.workprec(300):
            assert is_rd(r.lo, fn(mp(bf.from_float(a))))
            assert is_ru(r.hi, fn(mp(bf.from_float(b))))


def oracle_prec(*xs):
    """Enough bits to see sin(x) - x even for tiny x."""
    return 400 + 3 * max([0] + [-x.lead_exponent for x in xs if not x.is_zero])


def trig_range(f, a, b):
    """[DERIVED] exact min and max of sin/cos over [a, b] via its critical points."""
    with mpmath.workprec(oracle_prec(a, b)):
        fn = mpmath.sin if f == "sin" else mpmath.cos
        a, b = mp(a), mp(b)
        vals = [fn(a), fn(b)]
        shift = mpmath.pi / 2 if f == "sin" else 0
        k = int(mpmath.ceil((a - shift) / mpmath.pi))
        while shift + k * mpmath.pi <= b:
            vals.append(mpmath.mpf(1) if k % 2 == 0 else mpmath.mpf(-1))
            k += 1
        return min(vals), max(vals)


@settings(max_examples=150, deadline=None)
@given(st.sampled_from(["sin", "cos"]), st.floats(-50, 50), st.floats(0, 8))
def test_trig_is_tight(f, a, w):
    x = iv(a, a + w)
    r = eval_interval(f, [x], B)
    lo, hi = trig_range(f, x.lo, x.hi)
    with mpmath.workprec(oracle_prec(x.lo, x.hi)):
        assert (r.lo.to_fraction() == -1 and lo == -1) or is_rd(r.lo, lo)
        assert (r.hi.to_fraction() == 1 and hi == 1) or is_ru(r.hi, hi)


def test_trig_wide_and_unbounded():
    assert eval_interval("sin", [iv(0, 7)], B) == iv(-1, 1)
    assert eval_interval("cos", [iv("-inf", 0)], B) == iv(-1, 1)
    assert eval_interval("cos", [iv(-1, 1)], B).hi == bf.from_int(1, B)
    # one critical point at 3 pi / 2 inside [4, 5]
    assert eval_interval("sin", [iv(4, 5)], B).lo == bf.from_int(-1, B)


def test_trig_huge_point():
    r = eval_interval("sin", [iv("1e22", "1e22")], B)
    with mpmath.workprec(2000):
        true = mpmath.sin(mp(bf.from_float(1e22)))
    assert is_rd(r.lo, true) and is_ru(r.hi, true)


# --------------------------------------------------------------------------
# decorations


@pytest.mark.parametrize("f, xs, dec", [
    ("add", [div_(1, 2), div_(3, 4)], COM),
    ("exp", [div_(710, 710)], DAC),
    ("exp", [div_(0, "inf")], DAC),
    ("sqrt", [div_(-1, 4)], TRV),
    ("log", [div_(0, 1)], TRV),
    ("atanh", [div_(-1, 0)], TRV),
    ("div", [div_(1, 2), div_(-1, 1)], TRV),
    ("div", [div_(1, 2), div_(1, 2)], COM),
    ("sqrt", [div_(-3, -1)], TRV),
    ("mul", [div_(1, 2, DEF), div_(3, 4)], DEF),
    ("sin", [div_("-inf", "inf")], DAC),
])
def test_decorations(f, xs, dec):
    assert eval_decorated(f, xs, B).dec is dec


def test_nai_propagates():
    r = eval_decorated("add", [DecoratedInterval.nai(B), div_(1, 2)], B)
    assert r.is_nai


def test_empty_result_is_trv():
    r = eval_decorated("log", [div_(-2, -1)], B)
    assert r.interval.is_empty and r.dec is TRV


# --------------------------------------------------------------------------
# numeric functions, set operations, predicates


@pytest.mark.parametrize("fn, x, expected", [
    ("inf", (1, 3), 1), ("sup", (1, 3), 3), ("mid", (1, 3), 2), ("rad", (1, 3), 1), ("wid", (1, 3), 2),
    ("mag", (-3, 2), 3), ("mig", (-3, 2), 0), ("mig", (2, 5), 2), ("mig", (-5, -2), 2),
    ("mid", ("-inf", "inf"), 0), ("rad", (2, "inf"), "inf"), ("wid", ("-inf", 1), "inf"),
])
def test_numeric(fn, x, expected):
    r = numeric(fn, iv(*x))
    want = bf.infinity(B) if expected == "inf" else bf.from_int(expected, B)
    assert r == want


def test_numeric_edge_conventions():
    assert numeric("mid", iv("-inf", 1)) == bf.max_finite(B, -1)
    assert numeric("mid", iv(1, "inf")) == bf.max_finite(B)
    for fn in ("inf", "sup", "mid", "rad", "wid", "mag", "mig"):
        assert numeric(fn, EMPTY).is_nan
    with pytest.raises(ValueError):
        numeric("median", iv(1, 2))


def test_rad_covers_both_halves():
    x = iv("0.1", "0.7")
    m, r = numeric("mid", x).to_fraction(), numeric("rad", x).to_fraction()
    assert m - r <= x.lo.to_fraction() and x.hi.to_fraction() <= m + r


def test_set_operations():
    assert set_op("intersection", iv(0, 2), iv(1, 3)) == iv(1, 2)
    assert set_op("intersection", iv(0, 1), iv(2, 3)).is_empty
    assert set_op("convexHull", iv(0, 1), iv(3, 4)) == iv(0, 4)
    assert set_op("convex_hull", EMPTY, iv(3, 4)) == iv(3, 4)
    with pytest.raises(ValueError):
        set_op("union", iv(0, 1), iv(1, 2))


def test_predicates():
    assert predicate("subset", iv(1, 2), iv(0, 3))
    assert predicate("subset", EMPTY, iv(0, 3))
    assert not predicate("subset", iv(0, 3), iv(1, 2))
    assert predicate("interior", iv(1, 2), iv(0, 3))
    assert not predicate("interior", iv(0, 2), iv(0, 3))
    assert predicate("interior", iv(0, 2), ENTIRE)
    assert predicate("disjoint", iv(0, 1), iv(2, 3))
    assert not predicate("disjoint", iv(0, 1), iv(1, 3))
    assert predicate("equal", iv(1, 2), iv(1, 2))
    assert predicate("is_empty", EMPTY) and predicate("is_entire", ENTIRE)
    assert predicate("member", bf.from_int(1, B), iv(1, 3))
    assert not predicate("member", bf.infinity(B), iv(2, "inf"))


def test_next_out_and_hull():
    x = next_out(iv(1, 2))
    assert x.lo == bf.next_down(bf.from_int(1, B)) and x.hi == bf.next_up(bf.from_int(2, B))
    assert next_out(EMPTY).is_empty
    assert next_out(ENTIRE) == ENTIRE
    assert hull_of([bf.from_int(3, B), bf.from_int(-1, B)], B) == iv(-1, 3)
    assert hull_of([], B).is_empty


# --------------------------------------------------------------------------
# literals


@pytest.mark.parametrize("text, expected", [
    ("[1, 2]", "[0x1@0, 0x2@0]_com"),
    ("[1,2]_def", "[0x1@0, 0x2@0]_def"),
    ("[3]", "[0x3@0, 0x3@0]_com"),
    ("[]", "[empty]_trv"),
    ("[empty]", "[empty]_trv"),
    ("[entire]", "[entire]_dac"),
    ("[-inf, 1]", "[-inf, 0x1@0]_dac"),
    ("[nai]", "[nai]"),
    ("[empty]_ill", "[nai]"),
    ("  [ 0x1.8@0 , 2.5 ]_trv ", "[0x1.8@0, 0x2.8@0]_trv"),
])
def test_literals(text, expected):
    x = parse_interval_literal(text, B)
    assert format_interval(x) == expected
    assert parse_interval_literal(format_interval(x), B) == x


@pytest.mark.parametrize("text", ["1, 2", "[1, 2, 3]", "[1, 2]_xyz", "[2, 1]", "[1, 2]_ill", "[empty]_com",
                                  "[nai]_com", "[a, b]"])
def test_bad_literals(text):
    with pytest.raises((ParseError, IllFormed)):
        parse_interval_literal(text, B)


def test_bare_format():
    assert format_interval(iv(1, 2)) == "[0x1@0, 0x2@0]"
    assert format_interval(EMPTY) == "[empty]"
    assert format_interval(ENTIRE) == "[entire]"


def test_value_semantics():
    assert iv(1, 2) == iv("1", "0x2@0")
    assert len({iv(1, 2), iv(1, 2), iv(1, 3)}) == 2
    assert iv(1, 2).contains_value(bf.from_float(1.5))
    assert not EMPTY.contains_value(bf.from_float(1.5))
    assert Interval.point(bf.from_int(4, B)) == iv(4, 4)
