"""Isolated execution of untrusted candidate code.

The supervisor never runs candidate code in-process. Each job batch gets a
fresh worker subprocess (the "shim") in its own session and scratch
directory; a hard kill of the whole process group is the only timeout
mechanism that untrusted code cannot dodge. When a case times out or the
worker dies, the current case gets its verdict and the remaining inputs are
resubmitted to a fresh worker, so every input always receives exactly one
result, in order.

Wire protocol (length-prefixed JSON frames over stdin/stdout):

* frame = ASCII byte length, ``\\n``, payload bytes, ``\\n``
* shim -> host on boot: ``{"ready": true}``
* host -> shim, exactly one: ``{"job_id", "source", "entry_point",
  "inputs", "per_case_timeout_ms"}`` (inputs are canonical-encoded tuples)
* shim -> host, one per case, in order: ``{"job_id", "index", "verdict",
  "value", "wall_ms"}`` with verdict ``ok`` or ``exception``
* shim -> host for a job-level failure (only meaningful when there are no
  cases to report it through): ``{"job_id", "error", "message"}``
* shim exit (EOF) ends the job; ``timeout`` verdicts are issued host-side.

Source-level failures (the submitted source does not execute) are reported
by the shim as an ``exception`` result on every case.
"""

from __future__ import annotations

import json
import os
import select
import shutil
import signal
import subprocess
import sys
import tempfile
import threading
import time
from concurrent.futures import Future, ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

from . import canonical
from .canonical import Args, CanonicalValue
from .errors import (
    CompileError,
    GroundtruthFailure,
    InvariantViolation,
    ProtocolError,
    SandboxFailure,
)
from .oracles import judge
from .problems import Problem

DEFAULT_MEMORY_LIMIT = 2 * 1024**3
DEFAULT_T_MAX_MS = 1000.0
DEFAULT_FACTOR = 4.0

VERDICT_OK = "ok"
VERDICT_EXCEPTION = "exception"
VERDICT_TIMEOUT = "timeout"


@dataclass(frozen=True)
class TimeoutPolicy:
    """T = max(t_max, factor * t_gt); t_gt is the measured groundtruth time."""

    t_max_ms: float = DEFAULT_T_MAX_MS
    factor: float = DEFAULT_FACTOR
    t_gt_ms: float = 0.0


def effective_timeout(policy: TimeoutPolicy) -> float:
    """Per-case timeout in milliseconds under the policy."""
    if policy.t_gt_ms < 0:
        raise InvariantViolation("timeout-policy", "t_gt must be >= 0")
    return max(policy.t_max_ms, policy.factor * policy.t_gt_ms)


@dataclass
class ExecJob:
    job_id: str
    source: str
    entry_point: str
    inputs: list[Args]
    per_case_timeout_ms: float
    memory_limit: int | None = None  # None: use the supervisor's default

    def __post_init__(self):
        if not self.per_case_timeout_ms > 0:
            raise InvariantViolation("timeout", "per_case_timeout_ms must be > 0")


@dataclass(frozen=True)
class CaseResult:
    value: CanonicalValue
    wall_ms: float
    verdict: str


def execution_source(problem: Problem, solution: str) -> str:
    """Problem prompt context followed by the candidate solution.

    Only trailing whitespace is touched: an indented completion body must
    keep its indentation to continue the prompt's open function.
    """
    return problem.prompt.rstrip() + "\n\n" + solution.rstrip() + "\n"


# --- framing -----------------------------------------------------------------

def write_frame(stream, obj: dict) -> None:
    payload = json.dumps(obj, separators=(",", ":"), ensure_ascii=False).encode("utf-8")
    stream.write(str(len(payload)).encode("ascii") + b"\n" + payload + b"\n")
    stream.flush()


class _Corrupt(Exception):
    pass


class _Deadline(Exception):
    pass


class _Eof(Exception):
    pass


class _FrameReader:
    """Deadline-aware reader of length-prefixed JSON frames from a pipe."""

    def __init__(self, stream):
        self._fd = stream.fileno()
        os.set_blocking(self._fd, False)
        self._buf = bytearray()
        self._eof = False

    def read_frame(self, deadline: float) -> dict:
        header = self._read_until(b"\n", deadline)
        try:
            length = int(header)
        except ValueError:
            raise _Corrupt(f"bad frame header {header[:32]!r}")
        if length < 0 or length > 64 * 1024 * 1024:
            raise _Corrupt(f"unreasonable frame length {length}")
        body = self._read_exact(length + 1, deadline)
        try:
            frame = json.loads(body[:length].decode("utf-8"))
        except (UnicodeDecodeError, json.JSONDecodeError) as exc:
            raise _Corrupt(f"undecodable frame: {exc}")
        if not isinstance(frame, dict):
            raise _Corrupt("frame is not an object")
        return frame

    def _read_until(self, sep: bytes, deadline: float) -> bytes:
        while True:
            idx = self._buf.find(sep)
            if idx >= 0:
                out = bytes(self._buf[:idx])
                del self._buf[: idx + len(sep)]
                return out
            self._fill(deadline)

    def _read_exact(self, n: int, deadline: float) -> bytes:
        while len(self._buf) < n:
            self._fill(deadline)
        out = bytes(self._buf[:n])
        del self._buf[:n]
        return out

    def _fill(self, deadline: float) -> None:
        if self._eof:
            raise _Eof()
        remaining = deadline - time.monotonic()
        if remaining <= 0:
            raise _Deadline()
        ready, _, _ = select.select([self._fd], [], [], remaining)
        if not ready:
            raise _Deadline()
        chunk = os.read(self._fd, 65536)
        if chunk == b"":
            self._eof = True
            raise _Eof()
        self._buf.extend(chunk)


# --- supervisor ---------------------------------------------------------------

def default_shim_command() -> list[str]:
    """Production shim: the separately-installed in-sandbox runner."""
    return [sys.executable, "-m", "codeshim"]


class Supervisor:
    """Dispatches ExecJobs onto a pool of worker slots.

    Safe for concurrent submission; ordering is strict within a job and
    unspecified across jobs.
    """

    def __init__(
        self,
        shim_cmd: Sequence[str] | None = None,
        workers: int = 2,
        ready_timeout_s: float = 15.0,
        kill_grace_ms: float = 250.0,
        scratch_root: str | Path | None = None,
        memory_limit: int = DEFAULT_MEMORY_LIMIT,
    ):
        self.shim_cmd = list(shim_cmd) if shim_cmd else default_shim_command()
        self.workers = workers
        self.memory_limit = memory_limit
        self.ready_timeout_s = ready_timeout_s
        self.kill_grace_ms = kill_grace_ms
        self._own_scratch = scratch_root is None
        self._scratch = Path(
            scratch_root or tempfile.mkdtemp(prefix="benchforge-sandbox-")
        )
        self._scratch.mkdir(parents=True, exist_ok=True)
        self._pool = ThreadPoolExecutor(max_workers=workers)
        self._closed = False

    def __enter__(self) -> "Supervisor":
        return self

    def __exit__(self, *exc) -> None:
        self.close()

    def close(self) -> None:
        if self._closed:
            return
        self._closed = True
        self._pool.shutdown(wait=True)
        if self._own_scratch:
            shutil.rmtree(self._scratch, ignore_errors=True)

    def submit(self, job: ExecJob) -> Future:
        return self._pool.submit(self._execute, job)

    def run_job(self, job: ExecJob) -> list[CaseResult]:
        return self.submit(job).result()

    def run_many(self, jobs: Iterable[ExecJob]) -> list[list[CaseResult]]:
        futures = [self.submit(job) for job in jobs]
        return [f.result() for f in futures]

    def check_compiles(self, source: str, entry_point: str, timeout_ms: float = 5000.0) -> None:
        """Execute the source with zero cases; raise CompileError on failure."""
        job = ExecJob(
            job_id="compile-probe",
            source=source,
            entry_point=entry_point,
            inputs=[],
            per_case_timeout_ms=timeout_ms,
        )
        self.submit(job).result()

    # one job -> possibly several workers (recycled after timeout/crash)
    def _execute(self, job: ExecJob) -> list[CaseResult]:
        n = len(job.inputs)
        results: list[CaseResult | None] = [None] * n
        offset = 0
        if n == 0:
            self._run_worker(job, 0, results)
            return []
        while offset < n:
            new_offset = self._run_worker(job, offset, results)
            if new_offset <= offset:
                raise SandboxFailure("worker made no progress")  # unreachable guard
            offset = new_offset
        return [r for r in results if r is not None]

    def _run_worker(self, job: ExecJob, offset: int, results: list) -> int:
        remaining = job.inputs[offset:]
        timeout_s = job.per_case_timeout_ms / 1000.0
        grace_s = max(self.kill_grace_ms / 1000.0, 0.25 * timeout_s)
        scratch = Path(tempfile.mkdtemp(dir=self._scratch, prefix="job-"))
        stderr_path = scratch / "stderr.log"
        proc = None
        try:
            mem_limit = job.memory_limit or self.memory_limit
            with open(stderr_path, "wb") as stderr_fh:
                proc = subprocess.Popen(
                    self.shim_cmd + ["--mem-limit", str(mem_limit)],
                    stdin=subprocess.PIPE,
                    stdout=subprocess.PIPE,
                    stderr=stderr_fh,
                    cwd=scratch,
                    env=self._worker_env(scratch),
                    start_new_session=True,
                )
            reader = _FrameReader(proc.stdout)
            try:
                ready = reader.read_frame(time.monotonic() + self.ready_timeout_s)
            except (_Deadline, _Eof, _Corrupt) as exc:
                detail = str(exc) or type(exc).__name__.lstrip("_").lower()
                raise SandboxFailure(
                    f"shim failed to start: {detail}; "
                    f"stderr: {self._stderr_tail(stderr_path)}"
                ) from exc
            if ready.get("ready") is not True:
                raise SandboxFailure(f"unexpected boot frame: {ready!r}")
            request = {
                "job_id": job.job_id,
                "source": job.source,
                "entry_point": job.entry_point,
                "inputs": [canonical.args_to_jsonable(a) for a in remaining],
                "per_case_timeout_ms": job.per_case_timeout_ms,
            }
            try:
                write_frame(proc.stdin, request)
            except (BrokenPipeError, OSError):
                if not remaining:
                    raise CompileError(
                        f"worker died before the probe: {self._stderr_tail(stderr_path)}"
                    )
                results[offset] = self._crash_result("worker died at submit", 0.0)
                return offset + 1

            if not remaining:
                return self._finish_probe(reader, proc, timeout_s + grace_s)

            for i in range(len(remaining)):
                case_start = time.monotonic()
                deadline = case_start + timeout_s + grace_s
                try:
                    frame = reader.read_frame(deadline)
                except _Deadline:
                    elapsed = (time.monotonic() - case_start) * 1000.0
                    results[offset + i] = CaseResult(
                        value=canonical.exception_value(
                            "Timeout", f"exceeded {job.per_case_timeout_ms:g}ms"
                        ),
                        wall_ms=max(elapsed, job.per_case_timeout_ms),
                        verdict=VERDICT_TIMEOUT,
                    )
                    return offset + i + 1
                except _Eof:
                    elapsed = (time.monotonic() - case_start) * 1000.0
                    results[offset + i] = self._crash_result(
                        f"worker exited mid-job; stderr: {self._stderr_tail(stderr_path)}",
                        elapsed,
                    )
                    return offset + i + 1
                except _Corrupt as exc:
                    elapsed = (time.monotonic() - case_start) * 1000.0
                    results[offset + i] = self._crash_result(str(exc), elapsed)
                    return offset + i + 1
                problem = self._frame_problem(frame, job.job_id, i)
                if problem is not None:
                    elapsed = (time.monotonic() - case_start) * 1000.0
                    results[offset + i] = self._crash_result(problem, elapsed)
                    return offset + i + 1
                results[offset + i] = CaseResult(
                    value=canonical.from_jsonable(frame["value"]),
                    wall_ms=float(frame["wall_ms"]),
                    verdict=frame["verdict"],
                )
            return offset + len(remaining)
        finally:
            if proc is not None:
                self._kill(proc)
            shutil.rmtree(scratch, ignore_errors=True)

    def _finish_probe(self, reader: _FrameReader, proc, budget_s: float) -> int:
        deadline = time.monotonic() + budget_s
        try:
            frame = reader.read_frame(deadline)
        except _Eof:
            return 0  # clean exit, source executed
        except _Deadline:
            raise CompileError("source execution timed out")
        except _Corrupt as exc:
            raise ProtocolError(f"probe reply corrupt: {exc}")
        if frame.get("error"):
            raise CompileError(str(frame.get("message", frame["error"])))
        raise ProtocolError(f"unexpected probe frame: {frame!r}")

    @staticmethod
    def _frame_problem(frame: dict, job_id: str, expect_index: int) -> str | None:
        if frame.get("error"):
            return f"shim error: {frame.get('message', frame['error'])}"
        if frame.get("job_id") != job_id:
            return f"frame for wrong job {frame.get('job_id')!r}"
        if frame.get("index") != expect_index:
            return f"out-of-order frame index {frame.get('index')!r}"
        if frame.get("verdict") not in (VERDICT_OK, VERDICT_EXCEPTION):
            return f"illegal shim verdict {frame.get('verdict')!r}"
        if "value" not in frame or "wall_ms" not in frame:
            return "incomplete case frame"
        return None

    @staticmethod
    def _crash_result(detail: str, wall_ms: float) -> CaseResult:
        return CaseResult(
            value=canonical.exception_value("WorkerCrash", detail),
            wall_ms=wall_ms,
            verdict=VERDICT_EXCEPTION,
        )

    @staticmethod
    def _stderr_tail(path: Path, limit: int = 400) -> str:
        try:
            data = path.read_bytes()
        except OSError:
            return "<unavailable>"
        return data[-limit:].decode("utf-8", "replace").strip() or "<empty>"

    @staticmethod
    def _worker_env(scratch: Path) -> dict[str, str]:
        env = {
            "PATH": os.environ.get("PATH", "/usr/bin:/bin"),
            "HOME": str(scratch),
            "TMPDIR": str(scratch),
            "LANG": "C.UTF-8",
            "PYTHONDONTWRITEBYTECODE": "1",
            "PYTHONHASHSEED": "0",
            "PYTHONIOENCODING": "utf-8",
        }
        for passthrough in ("PYTHONPATH", "VIRTUAL_ENV"):
            if passthrough in os.environ:
                env[passthrough] = os.environ[passthrough]
        return env

    @staticmethod
    def _kill(proc: subprocess.Popen) -> None:
        try:
            os.killpg(proc.pid, signal.SIGKILL)
        except (ProcessLookupError, PermissionError):
            pass
        try:
            proc.kill()
        except ProcessLookupError:
            pass
        try:
            proc.wait(timeout=10)
        except subprocess.TimeoutExpired:
            pass
        for stream in (proc.stdin, proc.stdout):
            try:
                if stream:
                    stream.close()
            except OSError:
                pass


def measure_groundtruth(
    problem: Problem,
    supervisor: Supervisor,
    t_max_ms: float = DEFAULT_T_MAX_MS,
    factor: float = DEFAULT_FACTOR,
) -> TimeoutPolicy:
    """Time the groundtruth over the problem's tests; t_gt is the max case time."""
    if problem.groundtruth is None:
        raise GroundtruthFailure(f"{problem.task_id} has no groundtruth")
    job = ExecJob(
        job_id=f"gt:{problem.task_id}",
        source=execution_source(problem, problem.groundtruth),
        entry_point=problem.entry_point,
        inputs=list(problem.test_inputs),
        per_case_timeout_ms=t_max_ms,
    )
    results = supervisor.run_job(job)
    t_gt = 0.0
    for i, result in enumerate(results):
        if result.verdict != VERDICT_OK:
            raise GroundtruthFailure(
                f"{problem.task_id} groundtruth {result.verdict} on case {i}: "
                f"{result.value.payload!r}"
            )
        if not judge(problem.expected_outputs[i], result.value, problem.oracle):
            raise GroundtruthFailure(
                f"{problem.task_id} groundtruth output mismatch on case {i}"
            )
        t_gt = max(t_gt, result.wall_ms)
    return TimeoutPolicy(t_max_ms=t_max_ms, factor=factor, t_gt_ms=t_gt)
