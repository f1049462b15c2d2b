"""Problem data model, validation, lineage, and JSONL persistence.

One JSONL line per problem, UTF-8, field names fixed by the file schema:
task_id, benchmark, seed_ids, entry_point, prompt, helpers, groundtruth,
test_inputs, expected_outputs, oracle, status (+ schema_version).
"""

from __future__ import annotations

import json
import re
import threading
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Iterable

from . import canonical
from .canonical import Args, CanonicalValue
from .errors import (
    DuplicateId,
    InvariantViolation,
    ParseError,
    UnknownBenchmark,
)
from .oracles import OracleSpec

SCHEMA_VERSION = 1

BENCHMARKS = (
    "humaneval",
    "difficult",
    "creative",
    "subtle",
    "combine",
    "tool_use",
    "verbose",
    "concise",
    "decompose",
    "combine_naive",
    "tool_use_main_only",
)

STATUSES = ("draft", "refined", "approved", "rejected")

# Statuses that require a complete, runnable problem.
_COMPLETE_STATUSES = ("refined", "approved")


@dataclass
class Problem:
    task_id: str
    benchmark: str
    entry_point: str
    prompt: str
    seed_ids: list[str] = field(default_factory=list)
    helpers: list[str] = field(default_factory=list)
    groundtruth: str | None = None
    test_inputs: list[Args] = field(default_factory=list)
    expected_outputs: list[CanonicalValue] = field(default_factory=list)
    oracle: OracleSpec = field(default_factory=OracleSpec)
    status: str = "draft"

    def with_status(self, status: str) -> "Problem":
        return replace(self, status=status)

    def to_record(self) -> dict:
        return {
            "schema_version": SCHEMA_VERSION,
            "task_id": self.task_id,
            "benchmark": self.benchmark,
            "seed_ids": list(self.seed_ids),
            "entry_point": self.entry_point,
            "prompt": self.prompt,
            "helpers": list(self.helpers),
            "groundtruth": self.groundtruth,
            "test_inputs": [canonical.args_to_jsonable(a) for a in self.test_inputs],
            "expected_outputs": [canonical.to_jsonable(v) for v in self.expected_outputs],
            "oracle": self.oracle.to_record(),
            "status": self.status,
        }

    @classmethod
    def from_record(cls, data: dict) -> "Problem":
        return cls(
            task_id=data["task_id"],
            benchmark=data["benchmark"],
            seed_ids=list(data.get("seed_ids", [])),
            entry_point=data["entry_point"],
            prompt=data["prompt"],
            helpers=list(data.get("helpers", [])),
            groundtruth=data.get("groundtruth"),
            test_inputs=[
                canonical.args_from_jsonable(a) for a in data.get("test_inputs", [])
            ],
            expected_outputs=[
                canonical.from_jsonable(v) for v in data.get("expected_outputs", [])
            ],
            oracle=OracleSpec.from_record(data.get("oracle", {})),
            status=data.get("status", "draft"),
        )


@dataclass(frozen=True)
class BenchmarkManifest:
    benchmark: str
    problem_count: int
    avg_prompt_len: float
    avg_test_count: float


def validate_problem(p: Problem) -> None:
    """Raise InvariantViolation naming the first failed invariant."""
    if not p.task_id:
        raise InvariantViolation("task-id", "task_id must be non-empty")
    if p.benchmark not in BENCHMARKS:
        raise InvariantViolation("benchmark", f"unknown benchmark {p.benchmark!r}")
    if p.status not in STATUSES:
        raise InvariantViolation("status", f"unknown status {p.status!r}")
    if p.status in _COMPLETE_STATUSES:
        if not p.groundtruth:
            raise InvariantViolation("groundtruth", f"{p.status} problem lacks groundtruth")
        if not p.test_inputs:
            raise InvariantViolation("tests", f"{p.status} problem has no tests")
        if len(p.test_inputs) != len(p.expected_outputs):
            raise InvariantViolation(
                "parallel-arrays",
                f"{len(p.test_inputs)} inputs vs {len(p.expected_outputs)} outputs",
            )
    elif p.expected_outputs and len(p.test_inputs) != len(p.expected_outputs):
        raise InvariantViolation(
            "parallel-arrays",
            f"{len(p.test_inputs)} inputs vs {len(p.expected_outputs)} outputs",
        )
    if not _defines_function(p.prompt, p.entry_point):
        raise InvariantViolation(
            "entry-point", f"{p.entry_point!r} is not defined in the prompt"
        )
    if (len(p.helpers) > 0) != (p.benchmark == "tool_use"):
        raise InvariantViolation(
            "helpers", "helpers are non-empty exactly for tool_use problems"
        )
    if p.benchmark in ("combine", "combine_naive") and len(p.seed_ids) != 2:
        raise InvariantViolation("seed-arity", f"{p.benchmark} needs exactly 2 seeds")
    if p.benchmark == "tool_use_main_only" and len(p.seed_ids) != 1:
        raise InvariantViolation(
            "seed-arity", "tool_use_main_only needs exactly 1 seed"
        )


def _defines_function(source: str, name: str) -> bool:
    # header+docstring prompts are valid Python; fall back to a regex for
    # prompts carrying partial code
    import ast

    try:
        tree = ast.parse(source)
    except SyntaxError:
        return re.search(rf"^\s*def\s+{re.escape(name)}\s*\(", source, re.M) is not None
    for node in ast.walk(tree):
        if isinstance(node, (ast.FunctionDef, ast.AsyncFunctionDef)) and node.name == name:
            return True
    return False


class ProblemStore:
    """In-memory store with serialized writes and JSONL persistence.

    Reads are safe concurrently; writes take the store lock. Approved
    records are immutable.
    """

    def __init__(self):
        self._records: dict[str, Problem] = {}
        self._lock = threading.RLock()

    def __len__(self) -> int:
        return len(self._records)

    def __contains__(self, task_id: str) -> bool:
        return task_id in self._records

    def put_problem(self, p: Problem) -> str:
        validate_problem(p)
        with self._lock:
            if p.task_id in self._records:
                raise DuplicateId(p.task_id)
            self._records[p.task_id] = p
        return p.task_id

    def replace_problem(self, p: Problem) -> None:
        validate_problem(p)
        with self._lock:
            current = self._records.get(p.task_id)
            if current is None:
                raise UnknownBenchmark(f"no such problem {p.task_id}")
            if current.status == "approved":
                raise InvariantViolation(
                    "approved-immutable", f"{p.task_id} is approved and frozen"
                )
            self._records[p.task_id] = p

    def get_problem(self, task_id: str) -> Problem:
        try:
            return self._records[task_id]
        except KeyError:
            raise UnknownBenchmark(f"no such problem {task_id}") from None

    def problems(self, benchmark: str | None = None) -> list[Problem]:
        if benchmark is None:
            return list(self._records.values())
        return [p for p in self._records.values() if p.benchmark == benchmark]

    def manifest(self, benchmark: str) -> BenchmarkManifest:
        if benchmark not in BENCHMARKS:
            raise UnknownBenchmark(benchmark)
        # rejected problems are retained for audit but not counted
        members = [
            p for p in self._records.values()
            if p.benchmark == benchmark and p.status != "rejected"
        ]
        if not members:
            raise UnknownBenchmark(f"benchmark {benchmark} is not loaded")
        count = len(members)
        return BenchmarkManifest(
            benchmark=benchmark,
            problem_count=count,
            avg_prompt_len=sum(len(p.prompt) for p in members) / count,
            avg_test_count=sum(len(p.test_inputs) for p in members) / count,
        )

    def validate_lineage(self) -> None:
        """Every non-humaneval problem's seeds must resolve within the store."""
        for p in self._records.values():
            if p.benchmark == "humaneval":
                continue
            for seed_id in p.seed_ids:
                if seed_id not in self._records:
                    raise InvariantViolation(
                        "lineage", f"{p.task_id} references unknown seed {seed_id}"
                    )
                if p.benchmark == "tool_use_main_only":
                    seed = self._records[seed_id]
                    if seed.benchmark != "tool_use":
                        raise InvariantViolation(
                            "lineage",
                            f"{p.task_id} must derive from a tool_use problem",
                        )

    def save_benchmark(self, benchmark: str, path: str | Path) -> int:
        problems = self.problems(benchmark)
        return write_jsonl(problems, path)

    def extend(self, problems: Iterable[Problem]) -> None:
        for p in problems:
            self.put_problem(p)


def load_benchmark(benchmark: str, path: str | Path) -> list[Problem]:
    """Read and validate a JSONL benchmark file; order preserved."""
    if benchmark not in BENCHMARKS:
        raise UnknownBenchmark(benchmark)
    out: list[Problem] = []
    seen: set[str] = set()
    with open(path, encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                data = json.loads(line)
                problem = Problem.from_record(data)
            except InvariantViolation:
                raise
            except Exception as exc:
                raise ParseError(line_no, str(exc)) from exc
            if problem.benchmark != benchmark:
                raise InvariantViolation(
                    "benchmark",
                    f"{problem.task_id}: expected {benchmark}, got {problem.benchmark}",
                )
            validate_problem(problem)
            if problem.task_id in seen:
                raise DuplicateId(problem.task_id)
            seen.add(problem.task_id)
            out.append(problem)
    return out


def write_jsonl(problems: Iterable[Problem], path: str | Path) -> int:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    count = 0
    with open(path, "w", encoding="utf-8") as fh:
        for p in problems:
            fh.write(json.dumps(p.to_record(), ensure_ascii=False) + "\n")
            count += 1
    return count
