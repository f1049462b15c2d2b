"""Scripted-transcript builders for full pipeline runs (no network).

The seed corpus's counting problems share one groundtruth shape:
``sum(1 for ch in s if ch in CHARSET)``. That makes every transformation
kind mechanically derivable: the helpers construct the transformed problem
text, the two solutions the mock "model" will reply with, and the
assertion replies for input extraction and augmentation. Docstring example
outputs are computed by executing the constructed solution, so the
fabricated problems are self-consistent unless a flow deliberately plants
a wrong example (to exercise the docstring-fix path).
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

from benchforge.problems import Problem

SAMPLE_INPUTS = ["amber", "AEIOU aeiou", "", "zip zap", "aAeEiIoOuU!"]
LIST_INPUTS = [["amber", "dune"], [], ["AEIOU", "xyz"], ["aa", "a", ""]]


def charset_of(seed: Problem) -> str:
    m = re.search(r"ch in '([^']*)'", seed.groundtruth or "")
    if not m:
        raise AssertionError(f"{seed.task_id} is not a counting seed")
    return m.group(1)


def run_solution(source: str, entry: str, *args):
    namespace: dict = {}
    exec(compile(source, "<flow>", "exec"), namespace)
    return namespace[entry](*args)


def docstring(entry: str, description: str, solution: str,
              example_inputs: list, wrong_first: bool = False) -> str:
    lines = [description, ""]
    for i, args in enumerate(example_inputs):
        call = f"{entry}({', '.join(repr(a) for a in args)})"
        value = run_solution(solution, entry, *args)
        if wrong_first and i == 0:
            value = value + 1 if isinstance(value, int) else value
        lines.append(f">>> {call}")
        lines.append(repr(value))
    return "\n".join(("    " + ln) if ln else "" for ln in lines)


def problem_text(entry: str, args: str, description: str, solution: str,
                 example_inputs: list, wrong_first: bool = False,
                 prefix: str = "") -> str:
    doc = docstring(entry, description, solution, example_inputs, wrong_first)
    return f'{prefix}def {entry}({args}):\n    """\n{doc}\n    """\n'


def assertion_reply(entry: str, solution: str, inputs: list) -> str:
    lines = []
    for args in inputs:
        value = run_solution(solution, entry, *args)
        call = ", ".join(repr(a) for a in args)
        lines.append(f"assert {entry}({call}) == {value!r}")
    return "\n".join(lines) + "\n"


@dataclass
class Flow:
    """One scripted evolve->refine->augment run."""

    kind: str
    seeds: list[Problem]
    script: list[str] = field(default_factory=list)
    entry: str = ""
    expect_fix: bool = False


def _refine_and_augment_script(entry: str, solution: str, str_inputs: list,
                               fixed_prompt: str | None = None) -> list[str]:
    extraction_reply = assertion_reply(entry, solution, str_inputs[:4])
    augment_reply = assertion_reply(entry, solution, str_inputs[2:])
    script = [f"```python\n{solution}\n```", extraction_reply]
    if fixed_prompt is not None:
        script.append(fixed_prompt)
    script += [f"```python\n{solution}\n```", augment_reply]
    return script


def difficult_flow(seed: Problem, plant_wrong_example: bool = False) -> Flow:
    charset = charset_of(seed)
    entry = f"{seed.entry_point}_strict"
    solution = (
        f"def {entry}(s: str):\n"
        f"    return 2 * sum(1 for ch in s if ch in {charset!r})\n"
    )
    description = (
        "Count the characters of s that appear in the target set "
        f"{charset!r}, then return double that count; counting must be "
        "performed in a single left-to-right scan."
    )
    examples = [(SAMPLE_INPUTS[0],), (SAMPLE_INPUTS[1],)]
    prompt = problem_text(entry, "s: str", description, solution, examples,
                          wrong_first=plant_wrong_example)
    fixed = problem_text(entry, "s: str", description, solution, examples) \
        if plant_wrong_example else None
    flow = Flow(kind="difficult", seeds=[seed], entry=entry,
                expect_fix=plant_wrong_example)
    inputs = [(s,) for s in SAMPLE_INPUTS]
    flow.script = [prompt] + _refine_and_augment_script(entry, solution, inputs, fixed)
    return flow


def creative_flow(seed: Problem) -> Flow:
    charset = charset_of(seed)
    entry = f"starlit_{seed.entry_point}"
    solution = (
        f"def {entry}(s: str):\n"
        f"    return sum(1 for ch in s if ch in {charset!r})\n"
    )
    description = (
        "A lighthouse keeper logs one flash for every signal rune in the "
        f"night message s; the runes are exactly {charset!r}. Return how "
        "many flashes the keeper logs."
    )
    examples = [(SAMPLE_INPUTS[0],), (SAMPLE_INPUTS[3],)]
    prompt = problem_text(entry, "s: str", description, solution, examples)
    flow = Flow(kind="creative", seeds=[seed], entry=entry)
    inputs = [(s,) for s in SAMPLE_INPUTS]
    flow.script = [prompt] + _refine_and_augment_script(entry, solution, inputs)
    return flow


def subtle_flow(seed: Problem) -> Flow:
    charset = charset_of(seed)
    entry = seed.entry_point
    solution = (
        f"def {entry}(s: str):\n"
        f"    return sum(1 for ch in s if ch in {charset!r}) + 1\n"
    )
    description = (
        f"Return one plus the number of characters of s that appear in "
        f"{charset!r} (the count starts from one, not zero)."
    )
    examples = [(SAMPLE_INPUTS[0],), (SAMPLE_INPUTS[2],)]
    prompt = problem_text(entry, "s: str", description, solution, examples)
    flow = Flow(kind="subtle", seeds=[seed], entry=entry)
    inputs = [(s,) for s in SAMPLE_INPUTS]
    flow.script = [prompt] + _refine_and_augment_script(entry, solution, inputs)
    return flow


def combine_flow(seed_a: Problem, seed_b: Problem) -> Flow:
    set_a, set_b = charset_of(seed_a), charset_of(seed_b)
    entry = f"{seed_a.entry_point}_with_{seed_b.entry_point}"
    solution = (
        f"def {entry}(s: str):\n"
        f"    first = sum(1 for ch in s if ch in {set_a!r})\n"
        f"    second = sum(1 for ch in s if ch in {set_b!r})\n"
        f"    return first + second\n"
    )
    description = (
        f"Return the combined total of characters of s that fall in "
        f"{set_a!r} plus those that fall in {set_b!r} (characters in both "
        "sets count twice)."
    )
    examples = [(SAMPLE_INPUTS[0],), (SAMPLE_INPUTS[1],)]
    prompt = problem_text(entry, "s: str", description, solution, examples)
    flow = Flow(kind="combine", seeds=[seed_a, seed_b], entry=entry)
    inputs = [(s,) for s in SAMPLE_INPUTS]
    flow.script = [prompt] + _refine_and_augment_script(entry, solution, inputs)
    return flow


def tool_use_flow(seed: Problem) -> Flow:
    charset = charset_of(seed)
    entry = f"total_{seed.entry_point}"
    helper_name = f"is_{seed.entry_point}_char"
    helper = (
        f"def {helper_name}(ch: str) -> bool:\n"
        f'    """Membership check for the target character set."""\n'
        f"    return ch in {charset!r}\n"
    )
    solution = (
        f"def {entry}(words: list):\n"
        f"    return sum(1 for w in words for ch in w if {helper_name}(ch))\n"
    )
    full_solution = helper + "\n" + solution
    description = (
        "Given a list of words, return the total number of characters "
        "across all words that belong to the target character set."
    )
    examples = [(LIST_INPUTS[0],), (LIST_INPUTS[2],)]
    doc = docstring(entry, description, full_solution, examples)
    prompt = f'{helper}\n\ndef {entry}(words: list):\n    """\n{doc}\n    """\n'
    flow = Flow(kind="tool_use", seeds=[seed], entry=entry)
    inputs = [(x,) for x in LIST_INPUTS]
    extraction_reply = assertion_reply(entry, full_solution, inputs[:3])
    augment_reply = assertion_reply(entry, full_solution, inputs[1:])
    flow.script = [
        prompt,
        f"```python\n{solution}\n```",  # solution a: relies on the prompt helper
        extraction_reply,
        f"```python\n{solution}\n```",  # solution b
        augment_reply,
    ]
    return flow


def verbose_flow(seed: Problem) -> Flow:
    charset = charset_of(seed)
    entry = seed.entry_point
    solution = seed.groundtruth
    description = (
        "This function receives a single string argument named s. It must "
        "examine every character of s, one at a time and in order, decide "
        f"whether that character belongs to the set {charset!r}, and "
        "finally return the total number of characters for which the "
        "answer was yes. No other characters influence the result."
    )
    examples = [tuple([_first_str(seed)]), (SAMPLE_INPUTS[1],)]
    prompt = problem_text(entry, "s: str", description, solution, examples)
    flow = Flow(kind="verbose", seeds=[seed], entry=entry)
    inputs = examples + [(s,) for s in SAMPLE_INPUTS if (s,) not in examples]
    flow.script = [prompt] + _refine_and_augment_script(entry, solution, inputs)
    return flow


def concise_flow(seed: Problem) -> Flow:
    charset = charset_of(seed)
    entry = seed.entry_point
    solution = seed.groundtruth
    description = f"Count characters of s in {charset!r}."
    examples = [tuple([_first_str(seed)])]
    prompt = problem_text(entry, "s: str", description, solution, examples)
    flow = Flow(kind="concise", seeds=[seed], entry=entry)
    inputs = examples + [(s,) for s in SAMPLE_INPUTS if (s,) not in examples]
    flow.script = [prompt] + _refine_and_augment_script(entry, solution, inputs)
    return flow


def decompose_flows(seed: Problem) -> tuple[list[str], list[Flow]]:
    """Returns (evolve script, [flow for sub-problem 1, flow for sub 2]).

    The decompose reply carries both blocks; each sub-problem then runs
    refine+augment with its own scripted replies.
    """
    charset = charset_of(seed)
    entry_1 = f"fold_{seed.entry_point}"
    entry_2 = f"{seed.entry_point}_folded"
    solution_1 = f"def {entry_1}(s: str):\n    return s.lower()\n"
    solution_2 = (
        f"def {entry_2}(s: str):\n"
        f"    return sum(1 for ch in s if ch in {charset.lower()!r})\n"
    )
    desc_1 = "Return s converted to lower case."
    desc_2 = (
        f"Given an already lower-cased string s, count its characters "
        f"that appear in {charset.lower()!r}."
    )
    text_1 = problem_text(entry_1, "s: str", desc_1, solution_1,
                          [(SAMPLE_INPUTS[1],)])
    text_2 = problem_text(entry_2, "s: str", desc_2, solution_2,
                          [(SAMPLE_INPUTS[0],)])
    evolve_reply = [text_1 + "\n" + text_2]
    inputs = [(s,) for s in SAMPLE_INPUTS]
    flows = []
    for entry, solution in ((entry_1, solution_1), (entry_2, solution_2)):
        flow = Flow(kind="decompose", seeds=[seed], entry=entry)
        flow.script = _refine_and_augment_script(entry, solution, inputs)
        flows.append(flow)
    return evolve_reply, flows


def _first_str(seed: Problem) -> str:
    from benchforge import canonical

    for args in seed.test_inputs:
        if args and args[0].tag == "str":
            return canonical.to_python(args[0])
    return SAMPLE_INPUTS[0]
