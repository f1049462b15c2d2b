"""Job execution: load the submitted source, run each case, report frames.

One shim process serves one job batch, strictly single-threaded. The source
is executed once into a fresh module namespace (problems are self-contained
and tests must not rely on cross-case module state); each input tuple is
realized, the entry point invoked, and the result canonicalized.

A source that fails to execute yields an exception result on every case
(or a job-level error frame when there are no cases to carry it). Unhandled
case exceptions map to ``exception`` verdicts with the type name and
message. Timeouts are the supervisor's job: it hard-kills this process.
"""

from __future__ import annotations

import builtins
import time

from . import canonical
from .protocol import FrameWriter

# Modules candidate code may import. Problem prompts lean on typing and
# collections; solutions commonly reach for the math/string toolbox.
DEFAULT_ALLOWED_IMPORTS = (
    "typing", "collections", "math", "cmath", "re", "itertools", "functools",
    "heapq", "bisect", "string", "datetime", "statistics", "fractions",
    "decimal", "random", "copy", "json", "operator", "array", "enum",
    "dataclasses", "abc", "numbers", "unicodedata", "textwrap", "hashlib",
    "base64", "struct", "queue",
)


class ImportGuard:
    """Restrict __import__ to an allowlist while candidate code runs."""

    def __init__(self, allowed: tuple[str, ...]):
        if not allowed:
            raise ValueError("import allowlist must be non-empty")
        self.allowed = frozenset(allowed)
        self._original = None

    def _check(self, name: str):
        root = name.split(".", 1)[0]
        if root not in self.allowed:
            raise ImportError(f"import of {name!r} is not permitted in the sandbox")

    def __enter__(self):
        original = builtins.__import__

        def guarded(name, globals=None, locals=None, fromlist=(), level=0):
            if level == 0:
                self._check(name)
            return original(name, globals, locals, fromlist, level)

        self._original = original
        builtins.__import__ = guarded
        return self

    def __exit__(self, *exc):
        builtins.__import__ = self._original
        return False


def serve_job(request: dict, writer: FrameWriter,
              allowed_imports: tuple[str, ...] = DEFAULT_ALLOWED_IMPORTS,
              guard_imports: bool = True) -> None:
    job_id = request.get("job_id")
    inputs = request.get("inputs", [])
    namespace: dict = {}
    source_error = None
    guard = ImportGuard(allowed_imports) if guard_imports else _NullGuard()
    try:
        code = compile(request["source"], "<candidate>", "exec")
        with guard:
            exec(code, namespace)
    except BaseException as exc:  # report, never crash the protocol
        source_error = (type(exc).__name__, str(exc))

    if source_error and not inputs:
        writer.write_frame({
            "job_id": job_id,
            "error": "source",
            "message": f"{source_error[0]}: {source_error[1]}",
        })
        return

    entry = namespace.get(request.get("entry_point", ""))
    for index, encoded in enumerate(inputs):
        started = time.perf_counter()
        if source_error:
            wire = canonical.exception_wire(*source_error)
            verdict = "exception"
        elif not callable(entry):
            wire = canonical.exception_wire(
                "NameError",
                f"entry point {request.get('entry_point')!r} is not defined",
            )
            verdict = "exception"
        else:
            try:
                args = [canonical.realize(v) for v in encoded]
            except canonical.WireError as exc:
                wire = canonical.exception_wire("WireError", str(exc))
                verdict = "exception"
            else:
                try:
                    with guard:
                        result = entry(*args)
                    wire = canonical.canonicalize(result)
                    verdict = "ok"
                except BaseException as exc:
                    wire = canonical.exception_wire(type(exc).__name__, str(exc))
                    verdict = "exception"
        wall_ms = (time.perf_counter() - started) * 1000.0
        writer.write_frame({
            "job_id": job_id,
            "index": index,
            "verdict": verdict,
            "value": wire,
            "wall_ms": wall_ms,
        })


class _NullGuard:
    def __enter__(self):
        return self

    def __exit__(self, *exc):
        return False
