"""Targeted transformations of seed problems and derived dataset builders.

Eight transformation kinds; five change the problem's meaning, verbose and
concise only reword it. Derived builders: same-category pairing for the
combine kind, sequential two-stage composition (combine_naive), two-way
decomposition, and the helpers-stripped variant of tool_use problems.
"""

from __future__ import annotations

import ast
import json
import random
import re
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Iterable, Sequence

from . import canonical, extraction
from .canonical import Args, CanonicalValue
from .errors import (
    CategoryMismatch,
    ExecutionFailure,
    ExtractionError,
    InvariantViolation,
    NotToolUse,
    TypeMismatch,
)
from .llm import LlmGateway, ModelSpec, load_template, render
from .oracles import values_equal
from .problems import Problem, ProblemStore
from .sandbox import ExecJob, Supervisor, execution_source

TRANSFORMATION_KINDS = (
    "difficult",
    "creative",
    "subtle",
    "combine",
    "tool_use",
    "verbose",
    "concise",
    "decompose",
)

_SEMANTIC_PRESERVING = frozenset({"verbose", "concise"})

_BENCHMARK_TITLES = {
    "humaneval": "HumanEval",
    "difficult": "Difficult",
    "creative": "Creative",
    "subtle": "Subtle",
    "combine": "Combine",
    "tool_use": "Tool_Use",
    "verbose": "Verbose",
    "concise": "Concise",
    "decompose": "Decompose",
    "combine_naive": "Combine_Naive",
    "tool_use_main_only": "Tool_Use_Main_Only",
}


def semantic_altering(kind: str) -> bool:
    if kind not in TRANSFORMATION_KINDS:
        raise InvariantViolation("kind", f"unknown transformation {kind!r}")
    return kind not in _SEMANTIC_PRESERVING


def task_id_for(benchmark: str, index: str) -> str:
    return f"{_BENCHMARK_TITLES[benchmark]}/{index}"


def seed_index(task_id: str) -> str:
    return task_id.rsplit("/", 1)[-1]


def evolve(
    seed: Problem, kind: str, model: ModelSpec, gateway: LlmGateway
) -> Problem:
    """Transform one seed into a draft of the given kind (combine excluded)."""
    if kind == "combine":
        raise InvariantViolation("kind", "combine transforms pairs; use evolve_pair")
    if kind not in TRANSFORMATION_KINDS or kind == "decompose":
        if kind == "decompose":
            raise InvariantViolation("kind", "decompose yields two drafts; use decompose()")
        raise InvariantViolation("kind", f"unknown transformation {kind!r}")
    _require_usable_seed(seed)
    reply = gateway.complete(
        model, render(load_template(kind), {"problem": seed.prompt})
    )
    block = extraction.extract_problem(reply, tool_use=(kind == "tool_use"))
    if kind in _SEMANTIC_PRESERVING:
        _check_header_preserved(seed, block)
    draft = Problem(
        task_id=task_id_for(kind, seed_index(seed.task_id)),
        benchmark=kind,
        seed_ids=[seed.task_id],
        entry_point=block.entry_point,
        prompt=block.prompt,
        helpers=list(block.helpers),
        status="draft",
    )
    return draft


def evolve_pair(
    seed_a: Problem, seed_b: Problem, model: ModelSpec, gateway: LlmGateway
) -> Problem:
    """Combine two same-category seeds into one draft problem."""
    _require_usable_seed(seed_a)
    _require_usable_seed(seed_b)
    cat_a, cat_b = input_category(seed_a), input_category(seed_b)
    if cat_a != cat_b:
        raise CategoryMismatch(f"{cat_a} vs {cat_b}")
    reply = gateway.complete(
        model,
        render(
            load_template("combine"),
            {"problem_1": seed_a.prompt, "problem_2": seed_b.prompt},
        ),
    )
    block = extraction.extract_problem(reply, tool_use=False)
    return Problem(
        task_id=task_id_for(
            "combine", f"{seed_index(seed_a.task_id)}_{seed_index(seed_b.task_id)}"
        ),
        benchmark="combine",
        seed_ids=[seed_a.task_id, seed_b.task_id],
        entry_point=block.entry_point,
        prompt=block.prompt,
        status="draft",
    )


def input_category(problem: Problem) -> str:
    """Label from the ordered tuple of declared argument types."""
    header = extraction.parse_header(problem.prompt, problem.entry_point)
    kinds = [annotation or "any" for _, annotation in header.params]
    return "(" + ",".join(kinds) + ")"


def pair_seeds(
    seeds: Sequence[Problem], rng_seed: int = 0
) -> list[tuple[Problem, Problem]]:
    """Uniform random same-category pairing without replacement."""
    groups: dict[str, list[Problem]] = {}
    for seed in seeds:
        groups.setdefault(input_category(seed), []).append(seed)
    rng = random.Random(rng_seed)
    pairs = []
    for category in sorted(groups):
        members = groups[category]
        rng.shuffle(members)
        for i in range(0, len(members) - 1, 2):
            pairs.append((members[i], members[i + 1]))
    return pairs


def decompose(
    seed: Problem, model: ModelSpec, gateway: LlmGateway
) -> tuple[Problem, Problem]:
    """Split one seed into two smaller sub-problem drafts."""
    _require_usable_seed(seed)
    reply = gateway.complete(
        model, render(load_template("decompose"), {"problem": seed.prompt})
    )
    first, second = extraction.extract_problem_pair(reply)
    idx = seed_index(seed.task_id)
    out = []
    for n, block in enumerate((first, second), start=1):
        out.append(
            Problem(
                task_id=task_id_for("decompose", f"{idx}_{n}"),
                benchmark="decompose",
                seed_ids=[seed.task_id],
                entry_point=block.entry_point,
                prompt=block.prompt,
                status="draft",
            )
        )
    return out[0], out[1]


def derive_main_only(problem: Problem) -> Problem:
    """The same tool_use problem with helpers stripped from the prompt.

    Groundtruth, tests, and oracle are shared with the source problem.
    """
    if problem.benchmark != "tool_use":
        raise NotToolUse(problem.task_id)
    prompt = problem.prompt
    for helper in problem.helpers:
        prompt = prompt.replace(helper, "")
    prompt = re.sub(r"\n{3,}", "\n\n", prompt).lstrip("\n")
    return replace(
        problem,
        task_id=task_id_for("tool_use_main_only", seed_index(problem.task_id)),
        benchmark="tool_use_main_only",
        seed_ids=[problem.task_id],
        prompt=prompt,
        helpers=[],
    )


# --- sequential composition (combine_naive) -----------------------------------

@dataclass(frozen=True)
class CombineNaiveSpec:
    first: str  # task_id of stage-one problem A
    second: str  # task_id of stage-two problem B
    bridge_text: str  # hand-written connective between the two docstrings

    @classmethod
    def from_record(cls, data: dict) -> "CombineNaiveSpec":
        return cls(
            first=data["first"], second=data["second"], bridge_text=data["bridge_text"]
        )


def load_combine_naive_specs(path: str | Path) -> list[CombineNaiveSpec]:
    out = []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            if line.strip():
                out.append(CombineNaiveSpec.from_record(json.loads(line)))
    return out


_ANNOTATION_TAGS = {
    "int": "int",
    "float": "float",
    "bool": "bool",
    "str": "str",
    "list": "list",
    "tuple": "tuple",
    "set": "set",
    "frozenset": "frozenset",
    "dict": "dict",
    "none": "none",
}


def annotation_tag(annotation: str | None) -> str | None:
    if annotation is None:
        return None
    base = annotation.split("[", 1)[0].strip().lower()
    return _ANNOTATION_TAGS.get(base)


def build_combine_naive(
    store: ProblemStore,
    specs: Iterable[CombineNaiveSpec],
    supervisor: Supervisor,
    per_case_timeout_ms: float = 2000.0,
) -> list[Problem]:
    """Compose problems as second(first(x)) after verifying the types line up.

    Expected outputs come from the composed groundtruth and are re-checked
    against an independent two-stage execution of the parts.
    """
    out = []
    for number, spec in enumerate(specs):
        first = store.get_problem(spec.first)
        second = store.get_problem(spec.second)
        header_b = extraction.parse_header(second.prompt, second.entry_point)
        if len(header_b.params) != 1:
            raise TypeMismatch(
                f"{spec.second} takes {len(header_b.params)} arguments, need exactly 1"
            )
        wanted_tag = annotation_tag(header_b.params[0][1])
        if wanted_tag is None:
            if not second.test_inputs:
                raise TypeMismatch(f"{spec.second} has no declared or observed input type")
            wanted_tag = second.test_inputs[0][0].tag

        stage_one = _run_stage(
            supervisor, first, first.groundtruth, list(first.test_inputs),
            per_case_timeout_ms, f"cn{number}-a",
        )
        for i, value in enumerate(stage_one):
            if value.is_exception:
                raise ExecutionFailure(
                    f"{spec.first} groundtruth failed on its own case {i}"
                )
            if value.tag != wanted_tag:
                raise TypeMismatch(
                    f"{spec.first} returns {value.tag}, {spec.second} expects {wanted_tag}"
                )

        composed = _compose_problem(first, second, spec.bridge_text, number)
        expected = _run_stage(
            supervisor, composed, composed.groundtruth, list(first.test_inputs),
            per_case_timeout_ms, f"cn{number}-c",
        )
        stage_two = _run_stage(
            supervisor, second, second.groundtruth,
            [(value,) for value in stage_one],
            per_case_timeout_ms, f"cn{number}-b",
        )
        for i, (via_composed, via_stages) in enumerate(zip(expected, stage_two)):
            if via_composed.is_exception or via_stages.is_exception:
                raise ExecutionFailure(f"composition of {spec.first}+{spec.second} "
                                       f"raised on case {i}")
            if not values_equal(via_composed, via_stages, 1e-6):
                raise ExecutionFailure(
                    f"composed groundtruth disagrees with two-stage run on case {i}"
                )
        out.append(
            replace(
                composed,
                test_inputs=list(first.test_inputs),
                expected_outputs=list(expected),
                status="refined",
            )
        )
    return out


def _run_stage(
    supervisor: Supervisor,
    problem: Problem,
    solution: str | None,
    inputs: list[Args],
    timeout_ms: float,
    job_id: str,
) -> list[CanonicalValue]:
    if not solution:
        raise ExecutionFailure(f"{problem.task_id} has no groundtruth")
    results = supervisor.run_job(
        ExecJob(
            job_id=job_id,
            source=execution_source(problem, solution),
            entry_point=problem.entry_point,
            inputs=inputs,
            per_case_timeout_ms=timeout_ms,
        )
    )
    values = []
    for case in results:
        if case.verdict == "timeout":
            raise ExecutionFailure(f"{problem.task_id} stage timed out")
        values.append(case.value)
    return values


def _compose_problem(
    first: Problem, second: Problem, bridge_text: str, number: int
) -> Problem:
    prompt = _composed_prompt(first, second, bridge_text)
    groundtruth = _composed_groundtruth(first, second)
    return Problem(
        task_id=task_id_for(
            "combine_naive",
            f"{seed_index(first.task_id)}_{seed_index(second.task_id)}",
        ),
        benchmark="combine_naive",
        seed_ids=[first.task_id, second.task_id],
        entry_point=first.entry_point,
        prompt=prompt,
        groundtruth=groundtruth,
        oracle=second.oracle,
        status="draft",
    )


def _composed_prompt(first: Problem, second: Problem, bridge_text: str) -> str:
    """First problem's header over: its docstring + bridge + second docstring."""
    tree = ast.parse(first.prompt)
    node = next(
        n for n in tree.body
        if isinstance(n, (ast.FunctionDef, ast.AsyncFunctionDef))
        and n.name == first.entry_point
    )
    lines = first.prompt.splitlines()
    prelude = lines[: node.lineno - 1]
    header = lines[node.lineno - 1: node.body[0].lineno - 1]
    doc_a = ast.get_docstring(node) or ""
    tree_b = ast.parse(second.prompt)
    node_b = next(
        n for n in tree_b.body
        if isinstance(n, (ast.FunctionDef, ast.AsyncFunctionDef))
        and n.name == second.entry_point
    )
    doc_b = ast.get_docstring(node_b) or ""
    merged = (
        doc_a.strip() + "\n\n" + bridge_text.strip() + "\n\n" + doc_b.strip()
    )
    indented = "\n".join(
        ("    " + line) if line.strip() else "" for line in merged.splitlines()
    )
    pieces = prelude + header + ['    """', indented, '    """', ""]
    return "\n".join(pieces)


def _composed_groundtruth(first: Problem, second: Problem) -> str:
    """Runnable two-stage composition; each stage keeps its own namespace."""
    return (
        f"_STAGE_ONE = {{}}\n"
        f"exec(compile({first.groundtruth!r}, '<stage-one>', 'exec'), _STAGE_ONE)\n"
        f"_STAGE_TWO = {{}}\n"
        f"exec(compile({second.groundtruth!r}, '<stage-two>', 'exec'), _STAGE_TWO)\n"
        f"\n"
        f"def {first.entry_point}(*args):\n"
        f"    return _STAGE_TWO[{second.entry_point!r}]("
        f"_STAGE_ONE[{first.entry_point!r}](*args))\n"
    )


def _require_usable_seed(seed: Problem) -> None:
    if seed.status not in ("approved", "refined"):
        raise InvariantViolation(
            "seed-status", f"{seed.task_id} is {seed.status}; need refined/approved"
        )


def _check_header_preserved(seed: Problem, block: extraction.ProblemBlock) -> None:
    if block.entry_point != seed.entry_point:
        raise ExtractionError(
            f"semantic-preserving transform renamed {seed.entry_point!r} "
            f"to {block.entry_point!r}"
        )
    old = extraction.parse_header(seed.prompt, seed.entry_point)
    new = extraction.parse_header(block.prompt, block.entry_point)
    if old.arg_names != new.arg_names:
        raise ExtractionError(
            f"semantic-preserving transform changed argument names "
            f"{old.arg_names} -> {new.arg_names}"
        )
