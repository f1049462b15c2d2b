"""Terminal review workflow for manual examination of generated problems.

Each draft/refined problem is shown with its groundtruth and tests; the
operator approves, edits, rejects, or skips. Approval re-verifies that the
groundtruth reproduces the stored expected outputs; an edit replaces the
groundtruth from a file and must survive the same check before the problem
can be approved. Decisions are persisted immediately, so a session can stop
and resume at any point.
"""

from __future__ import annotations

import sys
from dataclasses import dataclass, field, replace
from typing import Callable, Sequence, TextIO

from .errors import GroundtruthFailure
from .oracles import judge
from .problems import Problem, ProblemStore
from .sandbox import ExecJob, Supervisor, execution_source

_ACTIONS = "[a]pprove  [e]dit  [r]eject  [s]kip  [q]uit"


@dataclass
class ReviewSummary:
    approved: list[str] = field(default_factory=list)
    rejected: list[str] = field(default_factory=list)
    edited: list[str] = field(default_factory=list)
    skipped: list[str] = field(default_factory=list)


def review(
    store: ProblemStore,
    supervisor: Supervisor,
    statuses: Sequence[str] = ("draft", "refined"),
    benchmark: str | None = None,
    input_stream: TextIO = sys.stdin,
    output_stream: TextIO = sys.stdout,
    persist: Callable[[ProblemStore], None] | None = None,
    read_file: Callable[[str], str] | None = None,
) -> ReviewSummary:
    say = lambda text="": print(text, file=output_stream)
    read_file = read_file or (lambda path: open(path, encoding="utf-8").read())
    summary = ReviewSummary()
    queue = [
        p for p in store.problems(benchmark)
        if p.status in statuses
    ]
    for problem in queue:
        _show(problem, say)
        while True:
            say(_ACTIONS)
            line = input_stream.readline()
            if not line:
                return summary
            action = line.strip().lower()[:1]
            if action == "q":
                return summary
            if action == "s":
                summary.skipped.append(problem.task_id)
                break
            if action == "r":
                store.replace_problem(problem.with_status("rejected"))
                _persist(store, persist)
                summary.rejected.append(problem.task_id)
                say(f"rejected {problem.task_id}")
                break
            if action == "e":
                say("path to file with the replacement groundtruth:")
                path = input_stream.readline().strip()
                if not path:
                    continue
                candidate = replace(problem, groundtruth=read_file(path))
                failures = _self_pass_failures(candidate, supervisor)
                if failures:
                    say("edit blocked; groundtruth fails these cases:")
                    for failure in failures:
                        say(f"  {failure}")
                    continue
                problem = candidate
                store.replace_problem(problem)
                _persist(store, persist)
                summary.edited.append(problem.task_id)
                say(f"groundtruth updated for {problem.task_id}")
                continue
            if action == "a":
                failures = _self_pass_failures(problem, supervisor)
                if failures:
                    say("approval blocked; groundtruth fails these cases:")
                    for failure in failures:
                        say(f"  {failure}")
                    continue
                store.replace_problem(problem.with_status("approved"))
                _persist(store, persist)
                summary.approved.append(problem.task_id)
                say(f"approved {problem.task_id}")
                break
    return summary


def _persist(store: ProblemStore, persist) -> None:
    if persist is not None:
        persist(store)


def _show(problem: Problem, say) -> None:
    say("=" * 60)
    say(f"{problem.task_id}  [{problem.benchmark}, {problem.status}]")
    say("-" * 60)
    say(problem.prompt.rstrip())
    say("--- groundtruth " + "-" * 43)
    say((problem.groundtruth or "<none>").rstrip())
    say(f"--- tests: {len(problem.test_inputs)} " + "-" * 40)


def _self_pass_failures(problem: Problem, supervisor: Supervisor) -> list[str]:
    """Run the groundtruth over the stored tests; report mismatching cases."""
    if not problem.groundtruth:
        return ["<problem has no groundtruth>"]
    if not problem.test_inputs:
        return ["<problem has no tests>"]
    try:
        results = supervisor.run_job(
            ExecJob(
                job_id=f"review:{problem.task_id}",
                source=execution_source(problem, problem.groundtruth),
                entry_point=problem.entry_point,
                inputs=list(problem.test_inputs),
                per_case_timeout_ms=2000.0,
            )
        )
    except GroundtruthFailure as exc:
        return [str(exc)]
    failures = []
    for i, case in enumerate(results):
        if case.verdict != "ok":
            failures.append(f"case {i}: {case.verdict} {case.value.payload!r}")
        elif not judge(problem.expected_outputs[i], case.value, problem.oracle):
            failures.append(
                f"case {i}: expected {problem.expected_outputs[i].encode().decode()} "
                f"got {case.value.encode().decode()}"
            )
    return failures
