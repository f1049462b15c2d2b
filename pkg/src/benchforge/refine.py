"""Draft-to-refined pipeline: groundtruth, tests, and self-consistency.

A draft converges when two independently generated solutions produce the
same outputs on the extracted test inputs; on disagreement the problem is
rephrased and the loop repeats. The second solution becomes the groundtruth
and its outputs the expected test outputs. Inputs on which both solutions
raise are treated as out-of-spec and dropped before the agreement check.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Iterable, Sequence

from . import canonical, extraction
from .canonical import Args, CanonicalValue
from .errors import (
    ArityMismatch,
    BenchforgeError,
    CompileError,
    ExtractionError,
    FixRejected,
    InvariantViolation,
    NoInputsRecovered,
    RefinementExhausted,
    SanitizeFailure,
)
from .harness import format_prompt, sanitize
from .llm import LlmGateway, ModelSpec, load_template, render
from .oracles import values_equal
from .problems import Problem, validate_problem
from .sandbox import (
    DEFAULT_T_MAX_MS,
    ExecJob,
    Supervisor,
    execution_source,
)

AGREEMENT_EPSILON = 1e-6  # the default oracle; custom oracles come later, at review


@dataclass
class RefinementIteration:
    solution_a: str
    solution_b: str
    inputs: list[Args]
    outputs_a: list[CanonicalValue]
    outputs_b: list[CanonicalValue]
    consistent: bool
    rephrased_prompt: str | None = None

    def to_record(self) -> dict:
        return {
            "solution_a": self.solution_a,
            "solution_b": self.solution_b,
            "inputs": [canonical.args_to_jsonable(a) for a in self.inputs],
            "outputs_a": [canonical.to_jsonable(v) for v in self.outputs_a],
            "outputs_b": [canonical.to_jsonable(v) for v in self.outputs_b],
            "consistent": self.consistent,
            "rephrased_prompt": self.rephrased_prompt,
        }


@dataclass
class RefinementTrace:
    task_id: str
    iterations: list[RefinementIteration] = field(default_factory=list)
    terminal: str = "exhausted"  # converged | exhausted

    def to_record(self) -> dict:
        return {
            "task_id": self.task_id,
            "iterations": [it.to_record() for it in self.iterations],
            "terminal": self.terminal,
        }


def write_traces(traces: Iterable[RefinementTrace], path: str | Path) -> int:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    count = 0
    with open(path, "a", encoding="utf-8") as fh:
        for trace in traces:
            fh.write(json.dumps(trace.to_record(), ensure_ascii=False) + "\n")
            count += 1
    return count


def generate_solution(
    problem: Problem,
    model: ModelSpec,
    gateway: LlmGateway,
    supervisor: Supervisor,
) -> str:
    """One candidate solution for the problem, sanitized and compile-checked."""
    reply = gateway.complete(model, format_prompt(problem, model))
    try:
        source = sanitize(reply, problem.entry_point)
    except SanitizeFailure as exc:
        raise ExtractionError(f"reply has no usable code: {exc}") from exc
    defines = problem.entry_point in extraction.defined_functions(source)
    if not defines and source.splitlines()[0][:1] not in (" ", "\t"):
        raise ExtractionError(
            f"reply neither defines nor completes {problem.entry_point!r}"
        )
    supervisor.check_compiles(execution_source(problem, source), problem.entry_point)
    return source


def extract_test_inputs(
    problem: Problem, model: ModelSpec, gateway: LlmGateway
) -> list[Args]:
    """Ask the model to extract (or invent) test inputs as assertions."""
    reply = gateway.complete(
        model,
        render(
            load_template("extract_tests"),
            {"problem": problem.prompt, "function_name": problem.entry_point},
        ),
    )
    pairs = extraction.parse_assertions(reply, problem.entry_point)
    header = extraction.parse_header(problem.prompt, problem.entry_point)
    inputs: list[Args] = []
    seen: set[tuple] = set()
    for args, _ in pairs:
        if not header.accepts_arity(len(args)):
            raise ArityMismatch(
                f"{problem.entry_point} takes {len(header.params)} args, "
                f"assertion has {len(args)}"
            )
        key = tuple(a.encode() for a in args)
        if key not in seen:
            seen.add(key)
            inputs.append(args)
    if not inputs:
        raise NoInputsRecovered(problem.task_id)
    return inputs


def derive_outputs(
    problem: Problem,
    solution: str,
    inputs: Sequence[Args],
    supervisor: Supervisor,
    per_case_timeout_ms: float = DEFAULT_T_MAX_MS,
) -> list[CanonicalValue]:
    """Execute the solution; exceptions come back as tagged markers."""
    results = supervisor.run_job(
        ExecJob(
            job_id=f"derive:{problem.task_id}",
            source=execution_source(problem, solution),
            entry_point=problem.entry_point,
            inputs=list(inputs),
            per_case_timeout_ms=per_case_timeout_ms,
        )
    )
    return [case.value for case in results]


def fix_docstring_examples(
    problem: Problem,
    io_pairs: Sequence[tuple[Args, CanonicalValue]],
    model: ModelSpec,
    gateway: LlmGateway,
) -> Problem:
    """Rewrite wrong docstring examples to match the derived outputs.

    The returned prompt is re-parsed and every checkable example must agree
    with io_pairs; one retry, then FixRejected.
    """
    assertion_lines = []
    for args, output in io_pairs:
        line = extraction.render_assertion(problem.entry_point, args, output)
        if line is not None:
            assertion_lines.append(line)
    if not assertion_lines:
        return problem
    if _examples_agree(problem.prompt, problem, io_pairs):
        return problem
    prompt_text = render(
        load_template("fix_examples"),
        {"problem": problem.prompt, "assertions": "\n".join(assertion_lines)},
    )
    last_problem = None
    for _ in range(2):
        reply = gateway.complete(model, prompt_text)
        try:
            block = extraction.extract_problem(
                reply, tool_use=(problem.benchmark == "tool_use")
            )
        except ExtractionError as exc:
            last_problem = str(exc)
            continue
        if block.entry_point != problem.entry_point:
            last_problem = f"entry point changed to {block.entry_point!r}"
            continue
        if _examples_agree(block.prompt, problem, io_pairs):
            return replace(problem, prompt=block.prompt, helpers=list(block.helpers))
        last_problem = "docstring still disagrees with the derived outputs"
    raise FixRejected(f"{problem.task_id}: {last_problem}")


def _examples_agree(prompt: str, problem: Problem, io_pairs) -> bool:
    derived = {
        tuple(a.encode() for a in args): output for args, output in io_pairs
    }
    for args, shown in extraction.parse_doctest_examples(prompt, problem.entry_point):
        if shown is None:
            continue
        key = tuple(a.encode() for a in args)
        if key not in derived:
            return False
        if derived[key].is_exception:
            return False
        if not values_equal(derived[key], shown, AGREEMENT_EPSILON):
            return False
    return True


def refine(
    problem: Problem,
    model: ModelSpec,
    gateway: LlmGateway,
    supervisor: Supervisor,
    max_iters: int = 3,
    reuse_inputs: Sequence[Args] | None = None,
) -> tuple[Problem, RefinementTrace]:
    """Iterate generate/extract/derive/fix until two solutions agree.

    `reuse_inputs` short-circuits input extraction for kinds whose seeds'
    tests carry over (subtle/verbose/concise).
    """
    if problem.status != "draft":
        raise InvariantViolation("status", f"refine expects a draft, got {problem.status}")
    trace = RefinementTrace(task_id=problem.task_id)
    current = problem
    for iteration_no in range(max_iters):
        solution_a = generate_solution(current, model, gateway, supervisor)
        if reuse_inputs is not None:
            inputs = list(reuse_inputs)
        else:
            inputs = extract_test_inputs(current, model, gateway)
        outputs_a = derive_outputs(current, solution_a, inputs, supervisor)
        current = fix_docstring_examples(
            current, list(zip(inputs, outputs_a)), model, gateway
        )
        solution_b = generate_solution(current, model, gateway, supervisor)
        outputs_b = derive_outputs(current, solution_b, inputs, supervisor)

        # both solutions raising on an input marks the input out-of-spec
        kept = [
            i for i in range(len(inputs))
            if not (outputs_a[i].is_exception and outputs_b[i].is_exception)
        ]
        inputs = [inputs[i] for i in kept]
        outputs_a = [outputs_a[i] for i in kept]
        outputs_b = [outputs_b[i] for i in kept]
        if not inputs:
            raise NoInputsRecovered(
                f"{problem.task_id}: every extracted input is out of spec"
            )
        consistent = all(
            values_equal(a, b, AGREEMENT_EPSILON)
            for a, b in zip(outputs_a, outputs_b)
        )
        iteration = RefinementIteration(
            solution_a=solution_a,
            solution_b=solution_b,
            inputs=inputs,
            outputs_a=outputs_a,
            outputs_b=outputs_b,
            consistent=consistent,
        )
        trace.iterations.append(iteration)
        if consistent:
            keep = [i for i, out in enumerate(outputs_b) if not out.is_exception]
            refined = replace(
                current,
                groundtruth=_self_contained_groundtruth(current, solution_b),
                test_inputs=[inputs[i] for i in keep],
                expected_outputs=[outputs_b[i] for i in keep],
                status="refined",
            )
            validate_problem(refined)
            trace.terminal = "converged"
            return refined, trace

        if iteration_no + 1 == max_iters:
            break  # no point rephrasing with no iterations left
        reply = gateway.complete(
            model, render(load_template("refine"), {"problem": current.prompt})
        )
        block = extraction.extract_problem(
            reply, tool_use=(problem.benchmark == "tool_use")
        )
        if block.entry_point != current.entry_point:
            raise ExtractionError(
                f"rephrase renamed the entry point to {block.entry_point!r}"
            )
        current = replace(current, prompt=block.prompt, helpers=list(block.helpers))
        iteration.rephrased_prompt = block.prompt

    trace.terminal = "exhausted"
    raise RefinementExhausted(trace)


def _self_contained_groundtruth(problem: Problem, solution: str) -> str:
    """tool_use groundtruths carry their helpers so they run without the prompt."""
    if not problem.helpers:
        return solution
    defined = set(extraction.defined_functions(solution))
    missing = [
        helper for helper in problem.helpers
        if not set(extraction.defined_functions(helper)) <= defined
    ]
    if not missing:
        return solution
    return "\n\n".join(h.strip() for h in missing) + "\n\n" + solution


# --- test augmentation ---------------------------------------------------------

def augment_tests(
    problem: Problem,
    model: ModelSpec,
    gateway: LlmGateway,
    supervisor: Supervisor,
    target_count: int = 50,
    rng_seed: int = 0,
    per_case_timeout_ms: float = DEFAULT_T_MAX_MS,
    max_rounds: int = 8,
) -> Problem:
    """Grow the test set toward `target_count` unique cases.

    Candidates come from model-proposed seed inputs plus value mutations of
    existing inputs; each survivor is validated against the declared
    argument types and executed on the groundtruth for its expected output.
    Inputs on which the groundtruth raises are dropped. Existing tests are
    never removed; the result may fall short if the space is exhausted.
    """
    if problem.status not in ("refined", "approved") or not problem.groundtruth:
        raise InvariantViolation("status", "augment_tests needs a refined problem")
    header = extraction.parse_header(problem.prompt, problem.entry_point)
    arg_tags = _declared_tags(header, problem.test_inputs)
    rng = random.Random(rng_seed)

    inputs = list(problem.test_inputs)
    outputs = list(problem.expected_outputs)
    seen = {tuple(a.encode() for a in args) for args in inputs}

    proposed: list[Args] = []
    try:
        reply = gateway.complete(
            model,
            render(
                load_template("extract_tests"),
                {"problem": problem.prompt, "function_name": problem.entry_point},
            ),
        )
        proposed = [args for args, _ in
                    extraction.parse_assertions(reply, problem.entry_point)]
    except BenchforgeError:
        proposed = []  # augmentation degrades to mutation-only

    pool = list(inputs)
    pending = [p for p in proposed if header.accepts_arity(len(p))]
    for _ in range(max_rounds):
        if len(inputs) >= target_count:
            break
        batch: list[Args] = []
        for candidate in pending:
            key = tuple(a.encode() for a in candidate)
            if key not in seen and _matches_tags(candidate, arg_tags):
                seen.add(key)
                batch.append(candidate)
        pending = []
        budget = max(target_count - len(inputs), 0) * 2 + 8
        if len(batch) > budget:
            batch = rng.sample(batch, budget)
        if not batch:
            mutated = _mutate_pool(pool, rng)
            fresh = [
                m for m in mutated
                if tuple(a.encode() for a in m) not in seen
            ]
            if not fresh:
                break
            pending = fresh
            continue
        results = supervisor.run_job(
            ExecJob(
                job_id=f"augment:{problem.task_id}",
                source=execution_source(problem, problem.groundtruth),
                entry_point=problem.entry_point,
                inputs=batch,
                per_case_timeout_ms=per_case_timeout_ms,
            )
        )
        for args, case in zip(batch, results):
            pool.append(args)
            if case.verdict != "ok" or case.value.is_exception:
                continue  # groundtruth rejects the input: out of spec
            inputs.append(args)
            outputs.append(case.value)
            if len(inputs) >= target_count:
                break
        pending = _mutate_pool(pool, rng) if len(inputs) < target_count else []
    return replace(problem, test_inputs=inputs, expected_outputs=outputs)


def _declared_tags(header: extraction.Header, existing: Sequence[Args]) -> list[str | None]:
    from .evolve import annotation_tag

    tags: list[str | None] = [annotation_tag(ann) for _, ann in header.params]
    for position in range(len(tags)):
        if tags[position] is None:
            observed = {
                args[position].tag for args in existing if len(args) > position
            }
            if len(observed) == 1:
                tags[position] = observed.pop()
    return tags


def _matches_tags(args: Args, arg_tags: list[str | None]) -> bool:
    if len(args) > len(arg_tags):
        return False
    return all(
        tag is None or value.tag == tag for value, tag in zip(args, arg_tags)
    )


def _mutate_pool(pool: list[Args], rng: random.Random) -> list[Args]:
    out: list[Args] = []
    for args in pool:
        for position in range(len(args)):
            for mutated in _mutate_value(canonical.to_python(args[position])):
                new_args = list(args)
                new_args[position] = canonical.from_python(mutated)
                out.append(tuple(new_args))
    rng.shuffle(out)
    return out


def _mutate_value(value) -> list:
    if isinstance(value, bool):
        return [not value]
    if isinstance(value, int):
        return [value + 1, value - 1, -value, 0]
    if isinstance(value, float):
        return [value + 1.0, value - 1.0, -value, 0.0]
    if isinstance(value, str):
        out = ["", value[1:], value[:-1], value * 2]
        return [v for v in out if v != value]
    if isinstance(value, (list, tuple)):
        kind = type(value)
        out = [kind(), kind(value[1:]), kind(value[:-1]), kind(reversed(value))]
        if value:
            head_variants = _mutate_value(value[0])
            for variant in head_variants[:2]:
                out.append(kind([variant, *value[1:]]))
            out.append(kind([*value, value[0]]))
        return [v for v in out if v != value]
    if isinstance(value, (set, frozenset)):
        kind = type(value)
        out = [kind()]
        if value:
            dropped = sorted(value, key=repr)[0]
            out.append(kind(v for v in value if v != dropped))
        return [v for v in out if v != value]
    if isinstance(value, dict):
        out = [{}]
        if value:
            first = next(iter(value))
            out.append({k: v for k, v in value.items() if k != first})
        return [v for v in out if v != value]
    return []
