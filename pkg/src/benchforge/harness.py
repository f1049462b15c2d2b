"""Candidate evaluation: prompt formatting, sanitization, verdicts, pass@k.

A candidate is judged by differential testing: run it on the problem's test
inputs inside the sandbox and compare each output against the groundtruth's
expected output under the problem's oracle.
"""

from __future__ import annotations

import json
import math
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

from . import extraction
from .errors import CompileError, DomainError, SanitizeFailure
from .oracles import judge
from .problems import Problem
from .sandbox import (
    ExecJob,
    Supervisor,
    TimeoutPolicy,
    effective_timeout,
    execution_source,
    measure_groundtruth,
)

INSTRUCT_PREFIX = "Please complete the following code snippet.\n"
INSTRUCT_SUFFIX = (
    "\nPlease return the complete code snippet wrapped in a code block (```).\n"
)

# End-of-sequence markers emitted by common model families; configurable per
# family via the eos_tokens argument.
DEFAULT_EOS_TOKENS = (
    "</s>",
    "<|endoftext|>",
    "<|EOT|>",
    "<|im_end|>",
    "<|eot_id|>",
    "<|end_of_text|>",
    "<eos>",
)

# A base-model completion ends where a new top-level block begins.
_COMPLETION_STOPS = ("\ndef ", "\nclass ", "\nif __name__", "\nassert ", "\nprint(")

PASS = "pass"
WRONG_OUTPUT = "wrong_output"
EXCEPTION = "exception"
TIMEOUT = "timeout"


def format_prompt(problem: Problem, model) -> str:
    """Base models autocomplete the raw prompt; instruct models get a wrapper."""
    if model.kind == "base":
        return problem.prompt
    return INSTRUCT_PREFIX + problem.prompt.rstrip() + "\n" + INSTRUCT_SUFFIX


def sanitize(
    raw: str,
    entry_point: str,
    eos_tokens: Sequence[str] = DEFAULT_EOS_TOKENS,
) -> str:
    """Recover runnable source from a raw model reply.

    First fenced code block when fences are present, truncated at the first
    end-of-sequence token. A reply defining the entry point is trimmed of
    surrounding prose until it parses; a reply without any ``def`` is kept
    as a completion body for the problem header.
    """
    if raw is None or not raw.strip():
        raise SanitizeFailure("empty reply")
    text = raw
    block = extraction.first_fenced_block(text)
    if block is not None:
        text = block
    text = _cut_at_eos(text, eos_tokens)
    if not text.strip():
        raise SanitizeFailure("no code after removing markers")
    if re.search(rf"^\s*(?:async\s+)?def\s+{re.escape(entry_point)}\s*\(", text, re.M):
        return _trim_standalone(text, entry_point)
    return _trim_completion(text)


def _cut_at_eos(text: str, eos_tokens: Sequence[str]) -> str:
    cut = len(text)
    for token in eos_tokens:
        idx = text.find(token)
        if idx != -1:
            cut = min(cut, idx)
    return text[:cut]


_CODE_LINE = re.compile(
    r"^(?:from\s|import\s|def\s|async\s+def\s|class\s|@|#"
    r"|[A-Za-z_][A-Za-z0-9_]*\s*[:=][^=])"
)


def _trim_standalone(text: str, entry_point: str) -> str:
    lines = text.splitlines()
    defines = re.compile(rf"^\s*(?:async\s+)?def\s+{re.escape(entry_point)}\s*\(", re.M)
    starts = [0] + [i for i, line in enumerate(lines) if _CODE_LINE.match(line)]
    for start in starts:
        trimmed = extraction._truncate_to_parse(lines[start:])
        if trimmed is not None and defines.search(trimmed):
            return trimmed.strip("\n") + "\n"
    raise SanitizeFailure("code region never parses")


def _trim_completion(text: str) -> str:
    body = text.strip("\n")
    cut = len(body)
    for stop in _COMPLETION_STOPS:
        idx = body.find(stop)
        if idx != -1:
            cut = min(cut, idx)
    body = body[:cut].rstrip()
    if not body.strip():
        raise SanitizeFailure("empty completion body")
    # refuse prose masquerading as a completion body
    import textwrap

    probe = "def __completion_probe__():\n" + textwrap.indent(body, "    ")
    try:
        compile(probe, "<completion>", "exec")
    except SyntaxError as exc:
        raise SanitizeFailure(f"completion body does not parse: {exc}") from exc
    return body + "\n"


@dataclass
class EvalResult:
    task_id: str
    model_id: str
    sample_index: int
    raw_output: str
    sanitized: str | None
    per_test: list[str] = field(default_factory=list)
    passed: bool = False
    wall_ms_total: float = 0.0
    failure: str | None = None

    def to_record(self) -> dict:
        return {
            "task_id": self.task_id,
            "model_id": self.model_id,
            "sample_index": self.sample_index,
            "raw_output": self.raw_output,
            "sanitized": self.sanitized,
            "per_test": list(self.per_test),
            "passed": self.passed,
            "wall_ms_total": self.wall_ms_total,
            "failure": self.failure,
        }

    @classmethod
    def from_record(cls, data: dict) -> "EvalResult":
        return cls(**data)


def evaluate(
    problem: Problem,
    samples: Sequence[str],
    supervisor: Supervisor,
    model_id: str = "model",
    policy: TimeoutPolicy | None = None,
    early_exit: bool = False,
    early_exit_chunk: int = 16,
    eos_tokens: Sequence[str] = DEFAULT_EOS_TOKENS,
) -> list[EvalResult]:
    """Run raw samples against the problem's tests and judge every case."""
    if policy is None:
        policy = measure_groundtruth(problem, supervisor)
    timeout_ms = effective_timeout(policy)
    results = []
    for index, raw in enumerate(samples):
        results.append(
            _evaluate_one(
                problem, raw, index, supervisor, timeout_ms,
                model_id, early_exit, early_exit_chunk, eos_tokens,
            )
        )
    return results


def _evaluate_one(
    problem, raw, index, supervisor, timeout_ms,
    model_id, early_exit, chunk_size, eos_tokens,
) -> EvalResult:
    result = EvalResult(
        task_id=problem.task_id,
        model_id=model_id,
        sample_index=index,
        raw_output=raw,
        sanitized=None,
    )
    try:
        clean = sanitize(raw, problem.entry_point, eos_tokens)
    except SanitizeFailure as exc:
        result.failure = f"sanitize: {exc}"
        return result
    result.sanitized = clean
    source = execution_source(problem, clean)
    try:
        supervisor.check_compiles(source, problem.entry_point, timeout_ms)
    except CompileError as exc:
        result.failure = f"compile: {exc}"
        return result

    inputs = list(problem.test_inputs)
    chunk = chunk_size if early_exit else max(len(inputs), 1)
    position = 0
    failed = False
    while position < len(inputs) and not failed:
        batch = inputs[position:position + chunk]
        job = ExecJob(
            job_id=f"{problem.task_id}#{model_id}#{index}@{position}",
            source=source,
            entry_point=problem.entry_point,
            inputs=batch,
            per_case_timeout_ms=timeout_ms,
        )
        for offset, case in enumerate(supervisor.run_job(job)):
            result.wall_ms_total += case.wall_ms
            if case.verdict == "timeout":
                verdict = TIMEOUT
            elif case.verdict == "exception":
                verdict = EXCEPTION
            elif judge(
                problem.expected_outputs[position + offset], case.value, problem.oracle
            ):
                verdict = PASS
            else:
                verdict = WRONG_OUTPUT
            result.per_test.append(verdict)
            if verdict != PASS:
                failed = True
        position += len(batch)
    result.passed = (
        len(result.per_test) == len(problem.test_inputs)
        and bool(result.per_test)
        and all(v == PASS for v in result.per_test)
    )
    return result


def pass_at_k(n: int, c: int, k: int) -> float:
    """Probability that at least one of k drawn samples is correct.

    1 - C(n-c, k) / C(n, k); greedy decoding is the n=1, k=1 case.
    """
    if not (0 <= c <= n):
        raise DomainError(f"need 0 <= c <= n, got c={c}, n={n}")
    if not (1 <= k <= n):
        raise DomainError(f"need 1 <= k <= n, got k={k}, n={n}")
    return 1.0 - math.comb(n - c, k) / math.comb(n, k)


def write_results(results: Iterable[EvalResult], path: str | Path) -> int:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    count = 0
    with open(path, "w", encoding="utf-8") as fh:
        for r in results:
            fh.write(json.dumps(r.to_record(), ensure_ascii=False) + "\n")
            count += 1
    return count


def load_results(path: str | Path) -> list[EvalResult]:
    out = []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            if line.strip():
                out.append(EvalResult.from_record(json.loads(line)))
    return out
