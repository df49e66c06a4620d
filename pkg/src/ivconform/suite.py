"""JSON test suites: one object per case, with hexadecimal endpoints.

A case looks like::

    {"function": "atanh", "precision": 23,
     "input": [{"type": "interval", "inf": "-0xf.fe1e@-1", "sup": "0xf.fe1e@-1", "dec": "com"}],
     "output": {"tight": {...}, "accurate": {...}}}

``precision`` selects ``wide(precision)``; the optional ``format_hint``
(``binary32``/``binary64``) selects an IEEE format instead.  The empty
interval is written with ``inf`` = ``"inf"`` and ``sup`` = ``"-inf"``; with
decoration ``ill`` that is NaI.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, replace
from typing import Any, BinaryIO, Optional, Sequence, TextIO, Union

from . import bigfloat as bf
from .bigfloat import DOWN, UP, BigFloat, Format, Kind
from .hexfloat import ParseError, PrecisionError, format_number, parse_number
from .interval import Decoration, DecoratedInterval, IllFormed, Interval

__all__ = [
    "SuiteError",
    "SchemaError",
    "Issue",
    "TestValue",
    "TestCase",
    "TestSuite",
    "case_format",
    "load_suite",
    "loads_suite",
    "save_suite",
    "dumps_suite",
    "validate_case",
    "value_to_interval",
    "interval_to_value",
    "KNOWN_FUNCTIONS",
]

VALUE_TYPES = ("interval", "number", "boolean", "string")
FORMAT_HINTS = {"binary32": bf.BINARY32, "binary64": bf.BINARY64}

# Functions the built-in engine understands; anything else is a warning only.
INTERVAL_FUNCTIONS = (
    "neg", "add", "sub", "mul", "div", "sqr", "sqrt", "cbrt",
    "exp", "exp2", "log", "log2", "sin", "cos", "atanh",
    "intersection", "convexHull",
)
NUMBER_FUNCTIONS = ("inf", "sup", "mid", "rad", "wid", "mag", "mig")
BOOLEAN_FUNCTIONS = ("isEmpty", "isEntire", "equal", "subset", "interior", "disjoint", "isMember")
KNOWN_FUNCTIONS = INTERVAL_FUNCTIONS + NUMBER_FUNCTIONS + BOOLEAN_FUNCTIONS


class SuiteError(ValueError):
    """Unreadable suite file.  ``line``/``col`` locate JSON syntax errors."""

    def __init__(self, message: str, line: Optional[int] = None, col: Optional[int] = None):
        where = f" (line {line}, column {col})" if line is not None else ""
        super().__init__(message + where)
        self.line = line
        self.col = col


class SchemaError(SuiteError):
    """A case that does not follow the schema; names the case index and field."""

    def __init__(self, index: int, path: str, message: str):
        ValueError.__init__(self, f"case {index}: {path} {message}")
        self.index = index
        self.path = path
        self.line = self.col = None


@dataclass(frozen=True)
class Issue:
    severity: str  # "fatal" or "warning"
    path: str
    message: str

    @property
    def fatal(self) -> bool:
        return self.severity == "fatal"

    def __str__(self):
        return f"{self.severity}: {self.path}: {self.message}"


@dataclass(frozen=True)
class TestValue:
    """One typed JSON value.  Interval endpoints are kept as the original strings."""

    __test__ = False

    type: str
    inf: Optional[str] = None
    sup: Optional[str] = None
    dec: Optional[str] = None
    val: Any = None

    def to_json(self) -> dict:
        if self.type == "interval":
            out = {"type": "interval", "inf": self.inf, "sup": self.sup}
            if self.dec is not None:
                out["dec"] = self.dec
            return out
        return {"type": self.type, "val": self.val}

    @classmethod
    def from_json(cls, obj: Any, index: int, path: str) -> "TestValue":
        if not isinstance(obj, dict):
            raise SchemaError(index, path, "must be an object")
        kind = obj.get("type")
        if kind not in VALUE_TYPES:
            raise SchemaError(index, f"{path}.type", f"must be one of {', '.join(VALUE_TYPES)}")
        if kind == "interval":
            for key in ("inf", "sup"):
                if not isinstance(obj.get(key), str):
                    raise SchemaError(index, f"{path}.{key}", "required (string)")
            dec = obj.get("dec")
            if dec is not None and not isinstance(dec, str):
                raise SchemaError(index, f"{path}.dec", "must be a string")
            return cls("interval", inf=obj["inf"], sup=obj["sup"], dec=dec)
        if "val" not in obj:
            raise SchemaError(index, f"{path}.val", "required")
        val = obj["val"]
        if kind == "boolean" and not isinstance(val, bool):
            raise SchemaError(index, f"{path}.val", "must be true or false")
        if kind in ("number", "string") and not isinstance(val, str):
            raise SchemaError(index, f"{path}.val", "must be a string")
        return cls(kind, val=val)


@dataclass(frozen=True)
class TestCase:
    """One test: function, precision, inputs and expected outputs."""

    __test__ = False

    function: str
    precision: int
    inputs: tuple
    tight: TestValue
    accurate: Optional[TestValue] = None
    format_hint: Optional[str] = None
    comment: Optional[str] = None

    @property
    def format(self) -> Format:
        return case_format(self)

    def to_json(self) -> dict:
        out: dict = {"function": self.function, "precision": self.precision}
        out["input"] = [v.to_json() for v in self.inputs]
        output = {"tight": self.tight.to_json()}
        if self.accurate is not None:
            output["accurate"] = self.accurate.to_json()
        out["output"] = output
        if self.format_hint is not None:
            out["format_hint"] = self.format_hint
        if self.comment is not None:
            out["comment"] = self.comment
        return out

    def canonical(self) -> "TestCase":
        """Same case with every number rewritten in canonical hexadecimal."""
        fmt = case_format(self)
        conv = lambda v: None if v is None else _canonical_value(v, fmt)  # noqa: E731
        return replace(
            self,
            inputs=tuple(conv(v) for v in self.inputs),
            tight=conv(self.tight),
            accurate=conv(self.accurate),
        )


@dataclass(frozen=True)
class TestSuite:
    __test__ = False

    cases: tuple = ()
    source_name: str = "<memory>"

    def __len__(self):
        return len(self.cases)

    def __iter__(self):
        return iter(self.cases)


def case_format(c: TestCase) -> Format:
    if c.format_hint is not None:
        return FORMAT_HINTS[c.format_hint]
    return bf.wide(c.precision)


# --------------------------------------------------------------------------
# value conversion


def _endpoint(text: str, fmt: Format, rnd) -> BigFloat:
    return parse_number(text, fmt, rnd)


def value_to_interval(v: TestValue, fmt: Format) -> Union[Interval, DecoratedInterval]:
    """Interval (bare, or decorated when ``dec`` is present) denoted by ``v``.

    Endpoints round outward.  Decoration ``ill`` yields NaI whatever the bounds;
    otherwise invalid bounds raise :class:`IllFormed`.
    """
    if v.type != "interval":
        raise TypeError(f"not an interval value: {v.type}")
    dec = Decoration.parse(v.dec) if v.dec is not None else None
    if dec is Decoration.ILL:
        return DecoratedInterval.nai(fmt)
    lo = _endpoint(v.inf, fmt, DOWN)
    hi = _endpoint(v.sup, fmt, UP)
    if lo.kind is Kind.POS_INF and hi.kind is Kind.NEG_INF:
        x = Interval.empty(fmt)
    else:
        x = Interval(lo, hi, fmt)
    return x if dec is None else DecoratedInterval(x, dec)


def interval_to_value(x: Union[Interval, DecoratedInterval]) -> TestValue:
    dec = None
    if isinstance(x, DecoratedInterval):
        x, dec = x.interval, str(x.dec)
    if x.is_empty:
        return TestValue("interval", inf="inf", sup="-inf", dec=dec)
    return TestValue("interval", inf=format_number(x.lo), sup=format_number(x.hi), dec=dec)


def number_to_value(x: BigFloat) -> TestValue:
    return TestValue("number", val=format_number(x))


def bare(x: Union[Interval, DecoratedInterval]) -> Interval:
    return x.interval if isinstance(x, DecoratedInterval) else x


def _canonical_value(v: TestValue, fmt: Format) -> TestValue:
    if v.type == "interval":
        lo = format_number(_endpoint(v.inf, fmt, DOWN))
        hi = format_number(_endpoint(v.sup, fmt, UP))
        return replace(v, inf=lo, sup=hi)
    if v.type == "number":
        return replace(v, val=format_number(parse_number(v.val, fmt)))
    return v


# --------------------------------------------------------------------------
# loading and saving


def _reject_constant(name):
    raise ValueError(f"non-standard JSON constant {name}")


def _parse_case(obj: Any, index: int) -> TestCase:
    if not isinstance(obj, dict):
        raise SchemaError(index, "case", "must be an object")
    function = obj.get("function")
    if not isinstance(function, str) or not function:
        raise SchemaError(index, "function", "required (string)")
    precision = obj.get("precision")
    if isinstance(precision, bool) or not isinstance(precision, int):
        raise SchemaError(index, "precision", "required (integer)")
    if precision < 2:
        raise SchemaError(index, "precision", "must be >= 2")
    inputs = obj.get("input")
    if not isinstance(inputs, list):
        raise SchemaError(index, "input", "required (array)")
    values = tuple(TestValue.from_json(v, index, f"input[{i}]") for i, v in enumerate(inputs))
    output = obj.get("output")
    if not isinstance(output, dict):
        raise SchemaError(index, "output", "required (object)")
    if "tight" not in output:
        raise SchemaError(index, "output.tight", "required")
    tight = TestValue.from_json(output["tight"], index, "output.tight")
    accurate = None
    if output.get("accurate") is not None:
        accurate = TestValue.from_json(output["accurate"], index, "output.accurate")
        if tight.type != "interval" or accurate.type != "interval":
            raise SchemaError(index, "output.accurate", "only allowed for interval outputs")
    hint = obj.get("format_hint")
    if hint is not None and hint not in FORMAT_HINTS:
        raise SchemaError(index, "format_hint", f"must be one of {', '.join(FORMAT_HINTS)}")
    comment = obj.get("comment")
    if comment is not None and not isinstance(comment, str):
        raise SchemaError(index, "comment", "must be a string")
    return TestCase(function, precision, values, tight, accurate, hint, comment)


def loads_suite(text: Union[str, bytes], source_name: str = "<memory>") -> TestSuite:
    """Parse a suite from JSON text (an array of cases, or one case object)."""
    if isinstance(text, bytes):
        text = text.decode("utf-8")
    try:
        data = json.loads(text, parse_constant=_reject_constant)
    except json.JSONDecodeError as exc:
        raise SuiteError(f"{source_name}: invalid JSON: {exc.msg}", exc.lineno, exc.colno) from None
    except ValueError as exc:
        raise SuiteError(f"{source_name}: {exc}") from None
    if isinstance(data, dict):
        data = [data]
    if not isinstance(data, list):
        raise SuiteError(f"{source_name}: top level must be an array of cases")
    return TestSuite(tuple(_parse_case(obj, i) for i, obj in enumerate(data)), source_name)


def load_suite(source: Union[str, os.PathLike, BinaryIO, TextIO]) -> TestSuite:
    """Load a suite from a path or an open stream."""
    if isinstance(source, (str, os.PathLike)):
        with open(source, "rb") as fh:
            return loads_suite(fh.read(), os.fspath(source))
    name = getattr(source, "name", "<stream>")
    return loads_suite(source.read(), str(name))


def dumps_suite(s: Union[TestSuite, Sequence[TestCase]]) -> str:
    """Canonical JSON text: two-space indent, hexadecimal endpoints."""
    cases = s.cases if isinstance(s, TestSuite) else tuple(s)
    if not cases:
        return "[]\n"
    return json.dumps([c.canonical().to_json() for c in cases], indent=2) + "\n"


def save_suite(s: Union[TestSuite, Sequence[TestCase]], path: Union[str, os.PathLike, TextIO]) -> None:
    text = dumps_suite(s)
    if isinstance(path, (str, os.PathLike)):
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        path.write(text)


# --------------------------------------------------------------------------
# validation


def _check_number(text: str, fmt: Format, path: str, exact_required: bool, issues: list):
    try:
        parse_number(text, fmt, exact=True)
    except ParseError as exc:
        issues.append(Issue("fatal", path, f"unparseable number: {exc}"))
    except PrecisionError:
        sev = "fatal" if exact_required else "warning"
        issues.append(Issue(sev, path, f"{text!r} not representable at {fmt}"))


def _check_interval(v: TestValue, fmt: Format, path: str, exact_required: bool, issues: list):
    before = len(issues)
    _check_number(v.inf, fmt, f"{path}.inf", exact_required, issues)
    _check_number(v.sup, fmt, f"{path}.sup", exact_required, issues)
    if v.dec is not None and v.dec not in ("com", "dac", "def", "trv", "ill"):
        issues.append(Issue("fatal", f"{path}.dec", f"unknown decoration {v.dec!r}"))
        return None
    if any(i.fatal for i in issues[before:]):
        return None
    try:
        return value_to_interval(v, fmt)
    except IllFormed as exc:
        issues.append(Issue("fatal", path, f"ill-formed interval ({exc.rule}): {exc}"))
        return None


def validate_case(c: TestCase, *, exact_required: bool = False) -> list:
    """Problems with a case, as :class:`Issue` objects (empty when the case is clean)."""
    issues: list = []
    if c.function not in KNOWN_FUNCTIONS:
        issues.append(Issue("warning", "function", f"{c.function!r} is not implemented by the built-in engine"))
    if c.format_hint is not None:
        preset = FORMAT_HINTS.get(c.format_hint)
        if preset is None:
            issues.append(Issue("fatal", "format_hint", f"unknown format {c.format_hint!r}"))
            return issues
        if preset.precision != c.precision:
            issues.append(Issue("fatal", "precision", f"{c.format_hint} has precision {preset.precision}"))
    if c.precision < 2:
        issues.append(Issue("fatal", "precision", "must be >= 2"))
        return issues
    fmt = case_format(c)
    for i, v in enumerate(c.inputs):
        path = f"input[{i}]"
        if v.type == "interval":
            _check_interval(v, fmt, path, exact_required, issues)
        elif v.type == "number":
            _check_number(v.val, fmt, f"{path}.val", exact_required, issues)
    if c.tight.type == "number":
        if c.tight.val != "nan":
            _check_number(c.tight.val, fmt, "output.tight.val", exact_required, issues)
        return issues
    if c.tight.type != "interval":
        return issues
    tight = _check_interval(c.tight, fmt, "output.tight", exact_required, issues)
    if c.accurate is not None:
        acc = _check_interval(c.accurate, fmt, "output.accurate", exact_required, issues)
        if tight is not None and acc is not None and not _subset(bare(tight), bare(acc)):
            issues.append(Issue("fatal", "output", "tight not within accurate"))
    return issues


def _subset(x: Interval, y: Interval) -> bool:
    if x.is_empty:
        return True
    return not y.is_empty and y.lo <= x.lo and x.hi <= y.hi
