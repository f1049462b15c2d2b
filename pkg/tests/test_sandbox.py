from __future__ import annotations

import json
import os
import time

import pytest

from benchforge import canonical
from benchforge.canonical import args_from_python as A
from benchforge.errors import (
    CompileError,
    GroundtruthFailure,
    InvariantViolation,
    SandboxFailure,
)
from benchforge.oracles import OracleSpec
from benchforge.problems import Problem
from benchforge.sandbox import (
    ExecJob,
    Supervisor,
    TimeoutPolicy,
    effective_timeout,
    measure_groundtruth,
)

from conftest import FIXTURES, fakeshim_cmd


def job(source, inputs, timeout_ms=1000, entry="f", job_id="job"):
    return ExecJob(
        job_id=job_id, source=source, entry_point=entry,
        inputs=inputs, per_case_timeout_ms=timeout_ms,
    )


# --- timeout policy -------------------------------------------------------------

def test_effective_timeout_default_small_gt():
    assert effective_timeout(TimeoutPolicy(t_gt_ms=50)) == 1000


def test_effective_timeout_scales_with_slow_groundtruth():
    assert effective_timeout(TimeoutPolicy(t_gt_ms=400)) == 1600


def test_effective_timeout_boundary():
    assert effective_timeout(TimeoutPolicy(t_gt_ms=250)) == 1000


def test_effective_timeout_grid():
    for t_gt in (0, 1, 10, 100, 249, 250, 251, 400, 1000, 5000):
        assert effective_timeout(TimeoutPolicy(t_gt_ms=t_gt)) == max(1000, 4 * t_gt)


def test_exec_job_requires_positive_timeout():
    with pytest.raises(InvariantViolation):
        job("def f():\n    pass\n", [], timeout_ms=0)


# --- basic execution ------------------------------------------------------------

def test_identity_job(supervisor):
    results = supervisor.run_job(job("def f(x):\n    return x\n", [A([1]), A([2])]))
    assert [r.verdict for r in results] == ["ok", "ok"]
    assert [canonical.to_python(r.value) for r in results] == [1, 2]


def test_exception_case_records_type(supervisor):
    results = supervisor.run_job(job("def f(x):\n    return 1 // x\n", [A([0])]))
    assert results[0].verdict == "exception"
    assert results[0].value.payload[0] == "ZeroDivisionError"


def test_results_in_order_and_one_per_input(supervisor):
    n = 7
    results = supervisor.run_job(
        job("def f(i):\n    return i * i\n", [A([i]) for i in range(n)])
    )
    assert len(results) == n
    assert [canonical.to_python(r.value) for r in results] == [i * i for i in range(n)]


def test_timeout_kills_and_continues(supervisor):
    source = "def f(x):\n    while x == 1:\n        pass\n    return x\n"
    results = supervisor.run_job(job(source, [A([0]), A([1]), A([2])], timeout_ms=150))
    assert [r.verdict for r in results] == ["ok", "timeout", "ok"]
    assert results[1].wall_ms >= 150


def test_module_level_hang_times_out(supervisor):
    source = "while True:\n    pass\n"
    results = supervisor.run_job(job(source, [A([0])], timeout_ms=150))
    assert results[0].verdict == "timeout"


def test_crash_recycles_worker_and_preserves_arity(supervisor):
    source = "import os\ndef f(x):\n    if x == 2:\n        os._exit(3)\n    return x\n"
    results = supervisor.run_job(job(source, [A([i]) for i in range(5)]))
    assert len(results) == 5
    assert results[2].verdict == "exception"
    assert results[2].value.payload[0] == "WorkerCrash"
    assert [canonical.to_python(r.value) for i, r in enumerate(results) if i != 2] == [0, 1, 3, 4]


def test_source_error_fails_every_case(supervisor):
    results = supervisor.run_job(job("def f(:\n", [A([1]), A([2])]))
    assert all(r.verdict == "exception" for r in results)
    assert all(r.value.payload[0] == "SyntaxError" for r in results)


def test_missing_entry_point(supervisor):
    results = supervisor.run_job(job("def g(x):\n    return x\n", [A([1])]))
    assert results[0].verdict == "exception"
    assert results[0].value.payload[0] == "NameError"


def test_stdout_pollution_does_not_corrupt_protocol(supervisor):
    source = (
        "import sys, os\n"
        "def f(x):\n"
        "    print('spam' * 100)\n"
        "    sys.stdout.write('more spam')\n"
        "    os.write(1, b'fd-level spam')\n"
        "    return x + 1\n"
    )
    results = supervisor.run_job(job(source, [A([1]), A([2])]))
    assert [canonical.to_python(r.value) for r in results] == [2, 3]


def test_compile_probe(supervisor):
    supervisor.check_compiles("def f(x):\n    return x\n", "f")
    with pytest.raises(CompileError) as err:
        supervisor.check_compiles("def f(:\n", "f")
    assert "SyntaxError" in str(err.value)
    with pytest.raises(CompileError):
        supervisor.check_compiles("import nosuchmodule_xyz\n", "f")


def test_compile_probe_hang_is_a_compile_error(supervisor):
    with pytest.raises(CompileError):
        supervisor.check_compiles("while True:\n    pass\n", "f", timeout_ms=300)


def test_concurrent_jobs_do_not_interleave_results(supervisor):
    jobs = [
        job(f"def f(x):\n    return x + {k}\n", [A([i]) for i in range(3)],
            job_id=f"conc-{k}")
        for k in range(8)
    ]
    batches = supervisor.run_many(jobs)
    for k, results in enumerate(batches):
        assert [canonical.to_python(r.value) for r in results] == [k, 1 + k, 2 + k]


def test_shim_that_never_readies_raises(tmp_path):
    with Supervisor(shim_cmd=fakeshim_cmd("--no-ready"), workers=1,
                    ready_timeout_s=0.8) as sup:
        with pytest.raises(SandboxFailure):
            sup.run_job(job("def f(x):\n    return x\n", [A([1])]))


# --- recorded transcripts ------------------------------------------------------

def transcript_supervisor(name):
    return Supervisor(
        shim_cmd=fakeshim_cmd("--transcript", str(FIXTURES / "transcripts" / name)),
        workers=1,
    )


def test_transcript_basic_replay():
    with transcript_supervisor("basic_ok.json") as sup:
        results = sup.run_job(job("ignored", [A([1]), A([2])], job_id="t1"))
    assert results[0].verdict == "ok"
    assert canonical.to_python(results[0].value) == 7
    assert results[0].wall_ms == 1.5
    assert results[1].verdict == "exception"
    assert results[1].value.payload == ("ValueError", "recorded")


def test_transcript_corrupt_index_recovers():
    with transcript_supervisor("corrupt_index.json") as sup:
        results = sup.run_job(job("ignored", [A([1]), A([2]), A([3])], job_id="t2"))
    assert len(results) == 3
    assert results[0].verdict == "ok"
    assert results[1].value.payload[0] == "WorkerCrash"
    assert results[2].verdict == "ok"  # fresh worker replays frame index 0


def test_transcript_wrong_job_id_is_corruption():
    with transcript_supervisor("wrong_job.json") as sup:
        results = sup.run_job(job("ignored", [A([1])], job_id="t4"))
    assert results[0].value.payload[0] == "WorkerCrash"


def test_transcript_garbage_bytes_is_corruption():
    with transcript_supervisor("garbage_bytes.json") as sup:
        results = sup.run_job(job("ignored", [A([1])], job_id="t9"))
    assert results[0].value.payload[0] == "WorkerCrash"


def test_transcript_slow_reply_times_out():
    with transcript_supervisor("slow_reply.json") as sup:
        results = sup.run_job(job("ignored", [A([1])], job_id="t5", timeout_ms=200))
    assert results[0].verdict == "timeout"


def test_request_frame_bytes_pinned(tmp_path):
    dump = tmp_path / "request.bin"
    with Supervisor(shim_cmd=fakeshim_cmd("--dump-request", str(dump),
                                          "--transcript",
                                          str(FIXTURES / "transcripts" / "basic_ok.json")),
                    workers=1) as sup:
        sup.run_job(job("SRC", [A([1]), A(["x"])], job_id="t1", timeout_ms=1000))
    raw = dump.read_bytes()
    payload = (
        '{"job_id":"t1","source":"SRC","entry_point":"f",'
        '"inputs":[[["int",1]],[["str","x"]]],"per_case_timeout_ms":1000}'
    ).encode()
    assert raw == str(len(payload)).encode() + b"\n" + payload + b"\n"


# --- groundtruth measurement -----------------------------------------------------

GT_PROMPT = '''def slow_id(x: int) -> int:
    """Identity with an artificial stall on one input.

    >>> slow_id(1)
    1
    """
'''

GT_SOURCE = (
    "import time\n"
    "def slow_id(x):\n"
    "    if x == 3:\n"
    "        time.sleep(0.15)\n"
    "    return x\n"
)


def _gt_problem(groundtruth=GT_SOURCE):
    return Problem(
        task_id="HumanEval/900",
        benchmark="humaneval",
        entry_point="slow_id",
        prompt=GT_PROMPT,
        groundtruth=groundtruth,
        test_inputs=[A([1]), A([2]), A([3])],
        expected_outputs=[canonical.from_python(v) for v in (1, 2, 3)],
        status="approved",
    )


def test_measure_groundtruth_max_not_mean(supervisor):
    policy = measure_groundtruth(_gt_problem(), supervisor)
    assert policy.t_gt_ms >= 120  # the slow case, not the average
    assert effective_timeout(policy) == max(1000, 4 * policy.t_gt_ms)


def test_measure_groundtruth_constant_time(supervisor):
    p = _gt_problem(groundtruth="def slow_id(x):\n    return x\n")
    policy = measure_groundtruth(p, supervisor)
    assert policy.t_gt_ms < 100
    assert effective_timeout(policy) == 1000


def test_measure_groundtruth_failure(supervisor):
    p = _gt_problem(groundtruth="def slow_id(x):\n    raise ValueError('no')\n")
    with pytest.raises(GroundtruthFailure):
        measure_groundtruth(p, supervisor)


def test_measure_groundtruth_mismatch(supervisor):
    p = _gt_problem(groundtruth="def slow_id(x):\n    return x + 1\n")
    with pytest.raises(GroundtruthFailure):
        measure_groundtruth(p, supervisor)


# --- pool throughput smoke -------------------------------------------------------

@pytest.mark.skipif((os.cpu_count() or 1) < 2, reason="needs >= 2 CPUs")
def test_pool_throughput_scales():
    n_workers = min(4, os.cpu_count() or 1)
    source = "def f(n):\n    return sum(i * i for i in range(n))\n"
    jobs = lambda: [
        job(source, [A([400_000])], job_id=f"cpu-{i}", timeout_ms=30_000)
        for i in range(2 * n_workers)
    ]
    with Supervisor(shim_cmd=fakeshim_cmd(), workers=1) as sup:
        t0 = time.monotonic()
        sup.run_many(jobs())
        single = time.monotonic() - t0
    with Supervisor(shim_cmd=fakeshim_cmd(), workers=n_workers) as sup:
        t0 = time.monotonic()
        sup.run_many(jobs())
        multi = time.monotonic() - t0
    assert single / multi >= 0.5 * n_workers
