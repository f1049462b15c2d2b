#!/usr/bin/env python3
"""Stand-in for the production in-sandbox runner, used by the test suite.

Speaks the supervisor's wire protocol. Two modes:

* exec mode (default): really executes the submitted source with exec(),
  so supervisor timeout/kill/recycle/hostility paths are exercised against
  genuine behavior. Deliberately minimal: no import policing, simpler
  canonicalization fallbacks than the production shim.
* --transcript FILE: replays recorded response frames verbatim (optionally
  delayed), for bit-exact protocol tests and corruption drills.

The primary suite must run without the production shim installed; this file
is what makes that possible.
"""

import argparse
import json
import os
import sys
import time

from benchforge import canonical

# grab the protocol channels before untrusted code can touch fd 0/1
_PROTO_FD = os.dup(1)
_REQUEST_FD = os.dup(0)
_DEVNULL = os.open(os.devnull, os.O_RDWR)
os.dup2(_DEVNULL, 0)
os.dup2(_DEVNULL, 1)
sys.stdout = os.fdopen(os.dup(_DEVNULL), "w")
sys.stdin = os.fdopen(os.dup(_DEVNULL), "r")


def write_frame(obj) -> None:
    payload = json.dumps(obj, separators=(",", ":"), ensure_ascii=False).encode("utf-8")
    os.write(_PROTO_FD, str(len(payload)).encode("ascii") + b"\n" + payload + b"\n")


class RequestReader:
    def __init__(self, fd):
        self.fd = fd
        self.buf = b""

    def _fill(self):
        chunk = os.read(self.fd, 65536)
        if not chunk:
            raise EOFError
        self.buf += chunk

    def read_line(self) -> bytes:
        while b"\n" not in self.buf:
            self._fill()
        line, self.buf = self.buf.split(b"\n", 1)
        return line

    def read_exact(self, n: int) -> bytes:
        while len(self.buf) < n:
            self._fill()
        out, self.buf = self.buf[:n], self.buf[n:]
        return out

    def read_frame(self) -> dict:
        header = self.read_line()
        length = int(header)
        body = self.read_exact(length + 1)
        self.last_raw = header + b"\n" + body
        return json.loads(body[:length])


def apply_mem_limit(limit: int) -> None:
    if limit <= 0:
        return
    try:
        import resource

        resource.setrlimit(resource.RLIMIT_AS, (limit, limit))
    except (ImportError, ValueError, OSError):
        pass


def run_transcript(path: str) -> None:
    entries = json.loads(open(path, encoding="utf-8").read())
    for entry in entries:
        delay = entry.get("delay_ms", 0)
        if delay:
            time.sleep(delay / 1000.0)
        if entry.get("raw") is not None:
            os.write(_PROTO_FD, entry["raw"].encode("utf-8"))
        else:
            write_frame(entry["frame"])
    exit_code = 0
    if entries and isinstance(entries[-1], dict):
        exit_code = entries[-1].get("exit", 0)
    os._exit(exit_code)


def run_exec(request: dict) -> None:
    namespace: dict = {}
    source_error = None
    try:
        exec(compile(request["source"], "<candidate>", "exec"), namespace)
    except BaseException as exc:  # noqa: BLE001 - reporting, not handling
        source_error = (type(exc).__name__, str(exc))
    inputs = request.get("inputs", [])
    if source_error and not inputs:
        write_frame({
            "job_id": request["job_id"],
            "error": "source",
            "message": f"{source_error[0]}: {source_error[1]}",
        })
        return
    fn = namespace.get(request["entry_point"])
    for index, encoded in enumerate(inputs):
        start = time.perf_counter()
        if source_error:
            value = canonical.exception_value(*source_error)
            verdict = "exception"
        elif not callable(fn):
            value = canonical.exception_value(
                "NameError", f"entry point {request['entry_point']!r} is not defined"
            )
            verdict = "exception"
        else:
            args = [canonical.to_python(v)
                    for v in canonical.args_from_jsonable(encoded)]
            try:
                value = canonical.from_python(fn(*args))
                verdict = "ok"
            except BaseException as exc:  # noqa: BLE001
                value = canonical.from_python(exc)
                verdict = "exception"
        wall_ms = (time.perf_counter() - start) * 1000.0
        write_frame({
            "job_id": request["job_id"],
            "index": index,
            "verdict": verdict,
            "value": canonical.to_jsonable(value),
            "wall_ms": wall_ms,
        })


def main() -> None:
    parser = argparse.ArgumentParser()
    parser.add_argument("--mem-limit", type=int, default=0)
    parser.add_argument("--transcript")
    parser.add_argument("--no-ready", action="store_true")
    parser.add_argument("--dump-request", help="write the raw request frame here")
    args = parser.parse_args()
    apply_mem_limit(args.mem_limit)
    if not args.no_ready:
        write_frame({"ready": True})
    reader = RequestReader(_REQUEST_FD)
    try:
        request = reader.read_frame()
    except EOFError:
        return
    if args.dump_request:
        with open(args.dump_request, "wb") as fh:
            fh.write(reader.last_raw)
    if args.transcript:
        run_transcript(args.transcript)
    run_exec(request)


if __name__ == "__main__":
    main()
