"""Entry point: boot handshake, one job, exit.

Protocol sequence: emit ``{"ready": true}``, read one request frame from
stdin, execute, emit one result frame per case, exit 0 (EOF marks the job's
end). Malformed frames produce an error frame, never a silent exit.
"""

from __future__ import annotations

import argparse
import os
import sys

from .protocol import FrameReader, FrameWriter, ProtocolError
from .runner import DEFAULT_ALLOWED_IMPORTS, serve_job


def secure_descriptors() -> tuple[int, int]:
    """Detach candidate-visible fds 0/1 from the protocol channel."""
    proto_out = os.dup(1)
    proto_in = os.dup(0)
    devnull = os.open(os.devnull, os.O_RDWR)
    os.dup2(devnull, 0)
    os.dup2(devnull, 1)
    sys.stdout = os.fdopen(os.dup(devnull), "w")
    sys.stdin = os.fdopen(os.dup(devnull), "r")
    return proto_in, proto_out


def apply_mem_limit(limit: int) -> None:
    if limit <= 0:
        return
    try:
        import resource

        resource.setrlimit(resource.RLIMIT_AS, (limit, limit))
    except (ImportError, ValueError, OSError):
        pass  # platform without rlimits; the supervisor still hard-kills


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(prog="codeshim")
    parser.add_argument("--mem-limit", type=int, default=0,
                        help="address-space cap in bytes (0 = none)")
    parser.add_argument("--allow-imports", default=",".join(DEFAULT_ALLOWED_IMPORTS),
                        help="comma-separated module allowlist for candidate code")
    parser.add_argument("--no-import-guard", action="store_true")
    args = parser.parse_args(argv)

    proto_in, proto_out = secure_descriptors()
    apply_mem_limit(args.mem_limit)
    writer = FrameWriter(proto_out)
    writer.write_frame({"ready": True})
    reader = FrameReader(proto_in)
    try:
        request = reader.read_frame()
    except EOFError:
        return 0
    except ProtocolError as exc:
        writer.write_frame({"job_id": None, "error": "protocol", "message": str(exc)})
        return 1
    allowed = tuple(m.strip() for m in args.allow_imports.split(",") if m.strip())
    serve_job(request, writer, allowed_imports=allowed,
              guard_imports=not args.no_import_guard)
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
