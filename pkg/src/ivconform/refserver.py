"""Reference implementation of the subprocess adapter protocol.

Reads one JSON request per line on stdin and answers each with the built-in
engine, one JSON response per line on stdout::

    python3 -m ivconform.refserver
"""

from __future__ import annotations

import json
import sys

from .harness import BuiltinAdapter
from .suite import TestValue


def handle(line: str, adapter: BuiltinAdapter) -> dict:
    try:
        req = json.loads(line)
    except ValueError as exc:
        return {"id": None, "status": "error", "detail": f"bad request: {exc}"}
    rid = req.get("id") if isinstance(req, dict) else None
    try:
        inputs = [TestValue.from_json(v, 0, f"input[{i}]") for i, v in enumerate(req["input"])]
        r = adapter.call(req["function"], int(req["precision"]), inputs, req.get("format_hint"))
    except (KeyError, TypeError, ValueError) as exc:
        return {"id": rid, "status": "error", "detail": f"bad request: {exc}"}
    out = {"id": rid, "status": r.status}
    if r.status == "ok":
        out["value"] = r.value.to_json()
    elif r.status == "error":
        out["detail"] = r.detail
    return out


def main(stdin=None, stdout=None) -> int:
    stdin = stdin or sys.stdin
    stdout = stdout or sys.stdout
    adapter = BuiltinAdapter()
    for line in stdin:
        if not line.strip():
            continue
        stdout.write(json.dumps(handle(line, adapter)) + "\n")
        stdout.flush()
    return 0


if __name__ == "__main__":
    sys.exit(main())
