"""Conformance toolkit for IEEE 1788-2015 interval arithmetic.

* :mod:`~ivconform.bigfloat`: radix-2 multiprecision values with directed rounding
* :mod:`~ivconform.hexfloat`: exact hexadecimal text
* :mod:`~ivconform.pointfuncs`: correctly rounded elementary functions (Ziv loop)
* :mod:`~ivconform.interval`: set-based bare and decorated intervals
* :mod:`~ivconform.suite`: JSON test suites
* :mod:`~ivconform.harness`: suite runner, fuzzer and reports
* :mod:`~ivconform.generator`: expected outputs and hard-to-round search
"""

from pathlib import Path

__version__ = "0.1.0"

SUITES_DIR = Path(__file__).resolve().parent / "suites"


def shipped_suite_paths() -> list:
    """Paths of the suites bundled with the package, sorted by name."""
    return sorted(SUITES_DIR.glob("*.json"), key=lambda p: p.name) if SUITES_DIR.is_dir() else []


def _is_suite(path: Path) -> bool:
    return not path.name.endswith(".hardcases.json")


def shipped_suites() -> list:
    return [p for p in shipped_suite_paths() if _is_suite(p)]
