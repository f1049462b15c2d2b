"""CI gate over the bundled seed benchmark fixture."""

from __future__ import annotations

from benchforge.oracles import judge
from benchforge.problems import ProblemStore, load_benchmark
from benchforge.sandbox import ExecJob, Supervisor, execution_source

from conftest import FIXTURES, fakeshim_cmd


def load_corpus():
    return load_benchmark("humaneval", FIXTURES / "seed_humaneval.jsonl")


def test_fixture_has_164_problems():
    problems = load_corpus()
    assert len(problems) == 164
    assert all(p.status == "approved" for p in problems)


def test_fixture_manifest():
    store = ProblemStore()
    store.extend(load_corpus())
    manifest = store.manifest("humaneval")
    assert manifest.problem_count == 164
    assert manifest.avg_test_count >= 4
    assert manifest.avg_prompt_len > 100


def test_every_groundtruth_self_passes():
    problems = load_corpus()
    with Supervisor(shim_cmd=fakeshim_cmd(), workers=2) as supervisor:
        jobs = [
            ExecJob(
                job_id=p.task_id,
                source=execution_source(p, p.groundtruth),
                entry_point=p.entry_point,
                inputs=list(p.test_inputs),
                per_case_timeout_ms=2000,
            )
            for p in problems
        ]
        batches = supervisor.run_many(jobs)
    failures = []
    for p, results in zip(problems, batches):
        for i, case in enumerate(results):
            if case.verdict != "ok" or not judge(
                p.expected_outputs[i], case.value, p.oracle
            ):
                failures.append((p.task_id, i, case.verdict))
    assert not failures, failures[:5]
