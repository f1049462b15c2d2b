#!/usr/bin/env python3
"""Generate the bundled 164-problem seed benchmark fixture.

Problems follow the original-benchmark format: a single function header with
a docstring carrying worked ``>>>`` examples, a canonical solution, and a
handful of test inputs. Everything (docstring example outputs, expected test
outputs) is computed by executing the groundtruth at generation time, so the
corpus is self-consistent by construction.

Also emits the sequential-composition spec fixture whose stage pairs are
type-compatible by construction.

Usage: python3 tools/gen_seed_corpus.py [--out fixtures/]
"""

from __future__ import annotations

import argparse
import json
import random
import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "src"))

from benchforge import canonical  # noqa: E402
from benchforge.problems import Problem, validate_problem  # noqa: E402


def run_groundtruth(source: str, entry: str, args):
    namespace: dict = {}
    exec(compile(source, "<groundtruth>", "exec"), namespace)
    return namespace[entry](*[_copy(a) for a in args])


def _copy(value):
    return json.loads(json.dumps(value)) if isinstance(value, (list, dict)) else value


def build_problem(index: int, spec: dict) -> Problem:
    entry = spec["entry"]
    args_names = spec["args"]
    doc_lines = [spec["doc"], ""]
    for example in spec["examples"]:
        call = f"{entry}({', '.join(repr(a) for a in example)})"
        result = run_groundtruth(spec["groundtruth"], entry, example)
        doc_lines.append(f">>> {call}")
        doc_lines.append(repr(result))
    doc = "\n".join(
        ("    " + line) if line else "" for line in doc_lines
    )
    imports = spec.get("imports", "")
    prompt = (
        f"{imports}def {entry}({args_names}):\n"
        f'    """\n{doc}\n    """\n'
    )
    # every docstring example is also a test case
    all_args = list(spec["examples"]) + [
        t for t in spec["tests"]
        if canonical.args_from_python(t)
        not in {canonical.args_from_python(e) for e in spec["examples"]}
    ]
    inputs = [canonical.args_from_python(args) for args in all_args]
    outputs = [
        canonical.from_python(run_groundtruth(spec["groundtruth"], entry, args))
        for args in all_args
    ]
    problem = Problem(
        task_id=f"HumanEval/{index}",
        benchmark="humaneval",
        entry_point=entry,
        prompt=prompt,
        groundtruth=spec["groundtruth"],
        test_inputs=inputs,
        expected_outputs=outputs,
        status="approved",
    )
    validate_problem(problem)
    return problem


def _count_family(rng) -> list[dict]:
    targets = [
        ("count_vowels", "vowel characters (aeiou, lowercase)", "aeiou"),
        ("count_upper_vowels", "uppercase vowel characters (AEIOU)", "AEIOU"),
        ("count_digits", "decimal digit characters", "0123456789"),
        ("count_spaces", "space characters", " "),
        ("count_stops", "full stop characters", "."),
        ("count_commas", "comma characters", ","),
        ("count_xyz", "characters from the set {x, y, z}", "xyz"),
        ("count_brackets", "round bracket characters ( and )", "()"),
        ("count_dashes", "dash characters", "-"),
        ("count_stars", "star characters (*)", "*"),
        ("count_hashes", "hash characters (#)", "#"),
        ("count_bangs", "exclamation mark characters", "!"),
    ]
    out = []
    for entry, what, charset in targets:
        words = _words(rng, 6)
        decorated = [
            _sprinkle(rng, w, charset) for w in words
        ]
        out.append({
            "entry": entry,
            "args": "s: str",
            "doc": f"Return how many {what} appear in s.",
            "examples": [(decorated[0],), (decorated[1],)],
            "tests": [(w,) for w in decorated + ["", charset * 3]],
            "groundtruth": (
                f"def {entry}(s: str):\n"
                f"    return sum(1 for ch in s if ch in {charset!r})\n"
            ),
        })
    return out


def _scan_family(rng) -> list[dict]:
    variants = [
        ("below_zero", "drops below zero", 0, "<"),
        ("below_one", "drops below one", 1, "<"),
        ("hits_ten", "reaches ten or more", 10, ">="),
        ("below_minus_five", "drops below minus five", -5, "<"),
    ]
    out = []
    for entry, what, bound, op in variants:
        ops = [[rng.randint(-6, 8) for _ in range(rng.randint(3, 7))] for _ in range(5)]
        out.append({
            "entry": entry,
            "args": "operations: list",
            "doc": (
                "Starting from a balance of zero, apply each deposit or "
                f"withdrawal in order and return True if the balance ever {what}, "
                "otherwise False."
            ),
            "examples": [(ops[0],), (ops[1],)],
            "tests": [(o,) for o in ops] + [([],)],
            "groundtruth": (
                f"def {entry}(operations: list):\n"
                f"    balance = 0\n"
                f"    for delta in operations:\n"
                f"        balance += delta\n"
                f"        if balance {op} {bound}:\n"
                f"            return True\n"
                f"    return False\n"
            ),
        })
    return out


def _running_family(rng) -> list[dict]:
    variants = [
        ("running_max", "largest value seen so far", "max"),
        ("running_min", "smallest value seen so far", "min"),
    ]
    out = []
    for entry, what, fn in variants:
        data = [[rng.randint(-9, 9) for _ in range(rng.randint(3, 6))] for _ in range(5)]
        out.append({
            "entry": entry,
            "args": "numbers: list",
            "doc": f"Return a list where position i holds the {what} in numbers[:i+1].",
            "examples": [(data[0],), (data[1],)],
            "tests": [(d,) for d in data] + [([],), ([4],)],
            "groundtruth": (
                f"def {entry}(numbers: list):\n"
                f"    out = []\n"
                f"    for n in numbers:\n"
                f"        out.append(n if not out else {fn}(out[-1], n))\n"
                f"    return out\n"
            ),
        })
    return out


def _multiples_family(rng) -> list[dict]:
    out = []
    for k in (3, 5, 7, 9):
        entry = f"sum_multiples_of_{k}"
        picks = [rng.randint(5, 60) for _ in range(4)]
        out.append({
            "entry": entry,
            "args": "n: int",
            "doc": f"Return the sum of all positive multiples of {k} strictly below n.",
            "examples": [(picks[0],), (picks[1],)],
            "tests": [(p,) for p in picks] + [(0,), (1,), (k,)],
            "groundtruth": (
                f"def {entry}(n: int):\n"
                f"    return sum(v for v in range({k}, max(n, 0), {k}))\n"
            ),
        })
    return out


def _digit_family(rng) -> list[dict]:
    variants = [
        ("digit_sum", "the sum of the decimal digits",
         "    return sum(int(d) for d in str(abs(x)))\n"),
        ("digit_product", "the product of the decimal digits",
         "    out = 1\n    for d in str(abs(x)):\n        out *= int(d)\n    return out\n"),
        ("digit_count", "how many decimal digits x has",
         "    return len(str(abs(x)))\n"),
        ("digit_max", "the largest decimal digit",
         "    return max(int(d) for d in str(abs(x)))\n"),
    ]
    out = []
    for entry, what, body in variants:
        picks = [rng.randint(0, 99999) for _ in range(4)]
        out.append({
            "entry": entry,
            "args": "x: int",
            "doc": f"Return {what} of the non-negative integer x.",
            "examples": [(picks[0],), (picks[1],)],
            "tests": [(p,) for p in picks] + [(0,), (7,)],
            "groundtruth": f"def {entry}(x: int):\n{body}",
        })
    return out


def _rotate_family(rng) -> list[dict]:
    out = []
    for entry, doc, body in [
        (
            "circular_shift",
            "Circularly shift the decimal digits of x to the right by shift "
            "places and return the result as a string. If shift exceeds the "
            "number of digits, return the digits reversed.",
            "    digits = str(x)\n"
            "    if shift > len(digits):\n"
            "        return digits[::-1]\n"
            "    shift = shift % len(digits) if len(digits) else 0\n"
            "    return digits[-shift:] + digits[:-shift] if shift else digits\n",
        ),
        (
            "rotate_left",
            "Rotate the characters of s to the left by n places and return "
            "the rotated string. Rotation wraps around the string's length.",
            "    if not s:\n"
            "        return s\n"
            "    n = n % len(s)\n"
            "    return s[n:] + s[:n]\n",
        ),
        (
            "rotate_right",
            "Rotate the characters of s to the right by n places and return "
            "the rotated string. Rotation wraps around the string's length.",
            "    if not s:\n"
            "        return s\n"
            "    n = n % len(s)\n"
            "    return s[-n:] + s[:-n] if n else s\n",
        ),
    ]:
        if entry == "circular_shift":
            args, tests = "x: int, shift: int", [
                (12, 1), (12, 2), (97532, 3), (8, 1), (1234, 9),
            ]
        else:
            words = _words(rng, 3)
            args = "s: str, n: int"
            tests = [(words[0], 1), (words[1], 3), (words[2], 0), ("", 4), ("ab", 7)]
        out.append({
            "entry": entry,
            "args": args,
            "doc": doc,
            "examples": tests[:2],
            "tests": tests,
            "groundtruth": f"def {entry}({args}):\n{body}",
        })
    return out


def _words_family(rng) -> list[dict]:
    sentences = [
        " ".join(_words(rng, rng.randint(3, 6))) for _ in range(6)
    ]
    return [
        {
            "entry": "reverse_words",
            "args": "s: str",
            "doc": "Return s with the order of its whitespace-separated words reversed, "
                   "joined by single spaces.",
            "examples": [(sentences[0],), (sentences[1],)],
            "tests": [(x,) for x in sentences] + [("",), ("solo",)],
            "groundtruth": (
                "def reverse_words(s: str):\n"
                "    return ' '.join(reversed(s.split()))\n"
            ),
        },
        {
            "entry": "capitalize_words",
            "args": "s: str",
            "doc": "Return s with every whitespace-separated word capitalized "
                   "(first letter upper case, the rest lower case), joined by single spaces.",
            "examples": [(sentences[2],), (sentences[3],)],
            "tests": [(x,) for x in sentences] + [("",)],
            "groundtruth": (
                "def capitalize_words(s: str):\n"
                "    return ' '.join(w.capitalize() for w in s.split())\n"
            ),
        },
        {
            "entry": "longest_word",
            "args": "s: str",
            "doc": "Return the longest whitespace-separated word in s; on ties pick "
                   "the earliest. Return the empty string when s has no words.",
            "examples": [(sentences[4],), (sentences[5],)],
            "tests": [(x,) for x in sentences] + [("",)],
            "groundtruth": (
                "def longest_word(s: str):\n"
                "    words = s.split()\n"
                "    if not words:\n"
                "        return ''\n"
                "    return max(words, key=len)\n"
            ),
        },
        {
            "entry": "word_lengths",
            "args": "s: str",
            "doc": "Return the lengths of the whitespace-separated words of s, in order.",
            "examples": [(sentences[0],), (sentences[2],)],
            "tests": [(x,) for x in sentences] + [("",)],
            "groundtruth": (
                "def word_lengths(s: str):\n"
                "    return [len(w) for w in s.split()]\n"
            ),
        },
    ]


def _strings_family(rng) -> list[dict]:
    words = _words(rng, 8)
    return [
        {
            "entry": "swap_case_letters",
            "args": "s: str",
            "doc": "Return s with every letter's case swapped; other characters unchanged.",
            "examples": [(words[0].title(),), (words[1].upper(),)],
            "tests": [(w.title(),) for w in words[:4]] + [("",), ("a1B2",)],
            "groundtruth": "def swap_case_letters(s: str):\n    return s.swapcase()\n",
        },
        {
            "entry": "strip_vowels",
            "args": "s: str",
            "doc": "Return s with every lowercase vowel (aeiou) removed.",
            "examples": [(words[2],), (words[3],)],
            "tests": [(w,) for w in words[:5]] + [("",), ("aeiou",)],
            "groundtruth": (
                "def strip_vowels(s: str):\n"
                "    return ''.join(ch for ch in s if ch not in 'aeiou')\n"
            ),
        },
        {
            "entry": "double_chars",
            "args": "s: str",
            "doc": "Return s with every character written twice, preserving order.",
            "examples": [(words[4],), (words[5],)],
            "tests": [(w,) for w in words[:4]] + [("",)],
            "groundtruth": (
                "def double_chars(s: str):\n"
                "    return ''.join(ch * 2 for ch in s)\n"
            ),
        },
        {
            "entry": "first_repeated_char",
            "args": "s: str",
            "doc": "Return the first character that appears twice in s, scanning left "
                   "to right; return the empty string if every character is unique.",
            "examples": [("abcba",), ("abc",)],
            "tests": [("abcba",), ("abc",), ("aa",), ("",), ("xyzzy",)],
            "groundtruth": (
                "def first_repeated_char(s: str):\n"
                "    seen = set()\n"
                "    for ch in s:\n"
                "        if ch in seen:\n"
                "            return ch\n"
                "        seen.add(ch)\n"
                "    return ''\n"
            ),
        },
    ]


def _pairs_family(rng) -> list[dict]:
    out = []
    for entry, doc, expression in [
        ("count_pairs_to_target",
         "Return how many index pairs (i, j) with i < j satisfy "
         "numbers[i] + numbers[j] == target.",
         "numbers[i] + numbers[j] == target"),
        ("count_equal_pairs",
         "Return how many index pairs (i, j) with i < j satisfy "
         "numbers[i] == numbers[j]; target is ignored for counting but kept "
         "for interface compatibility.",
         "numbers[i] == numbers[j]"),
    ]:
        data = [[rng.randint(-4, 6) for _ in range(rng.randint(3, 7))] for _ in range(4)]
        out.append({
            "entry": entry,
            "args": "numbers: list, target: int",
            "doc": doc,
            "examples": [(data[0], 3), (data[1], 0)],
            "tests": [(d, t) for d, t in zip(data, (3, 0, 2, -1))] + [([], 5)],
            "groundtruth": (
                f"def {entry}(numbers: list, target: int):\n"
                f"    count = 0\n"
                f"    for i in range(len(numbers)):\n"
                f"        for j in range(i + 1, len(numbers)):\n"
                f"            if {expression}:\n"
                f"                count += 1\n"
                f"    return count\n"
            ),
        })
    return out


def _list_family(rng) -> list[dict]:
    data = [[rng.randint(-9, 9) for _ in range(rng.randint(4, 7))] for _ in range(8)]
    return [
        {
            "entry": "dedupe_keep_first",
            "args": "items: list",
            "doc": "Return items with duplicates removed, keeping the first "
                   "occurrence of each value in its original position.",
            "examples": [(data[0] + data[0][:2],), (data[1],)],
            "tests": [(d + d[:2],) for d in data[:4]] + [([],)],
            "groundtruth": (
                "def dedupe_keep_first(items: list):\n"
                "    seen = set()\n"
                "    out = []\n"
                "    for item in items:\n"
                "        if item not in seen:\n"
                "            seen.add(item)\n"
                "            out.append(item)\n"
                "    return out\n"
            ),
        },
        {
            "entry": "unique_sorted",
            "args": "numbers: list",
            "doc": "Return the distinct values of numbers in ascending order.",
            "examples": [(data[2],), (data[3],)],
            "tests": [(d,) for d in data[:5]] + [([],)],
            "groundtruth": (
                "def unique_sorted(numbers: list):\n"
                "    return sorted(set(numbers))\n"
            ),
        },
        {
            "entry": "interleave",
            "args": "a: list, b: list",
            "doc": "Return the elements of a and b interleaved, starting with a; "
                   "when one list runs out, append the rest of the other.",
            "examples": [(data[0][:3], data[1][:3]), (data[2][:2], data[3][:4])],
            "tests": [(data[0][:3], data[1][:3]), (data[2][:2], data[3][:4]),
                      ([], data[4]), (data[5], []), ([], [])],
            "groundtruth": (
                "def interleave(a: list, b: list):\n"
                "    out = []\n"
                "    for i in range(max(len(a), len(b))):\n"
                "        if i < len(a):\n"
                "            out.append(a[i])\n"
                "        if i < len(b):\n"
                "            out.append(b[i])\n"
                "    return out\n"
            ),
        },
        {
            "entry": "minmax",
            "args": "numbers: list",
            "doc": "Return a (minimum, maximum) tuple of numbers; "
                   "return (0, 0) for an empty list.",
            "examples": [(data[4],), (data[5],)],
            "tests": [(d,) for d in data[:5]] + [([],)],
            "groundtruth": (
                "def minmax(numbers: list):\n"
                "    if not numbers:\n"
                "        return (0, 0)\n"
                "    return (min(numbers), max(numbers))\n"
            ),
        },
        {
            "entry": "row_sums",
            "args": "grid: list",
            "doc": "Return a list with the sum of every row of grid "
                   "(a list of lists of integers).",
            "examples": [([data[0][:3], data[1][:3]],), ([data[2][:2]],)],
            "tests": [([data[0][:3], data[1][:3]],), ([data[2][:2]],),
                      ([[]],), ([],)],
            "groundtruth": (
                "def row_sums(grid: list):\n"
                "    return [sum(row) for row in grid]\n"
            ),
        },
    ]


def _float_family(rng) -> list[dict]:
    data = [[rng.randint(-20, 20) for _ in range(rng.randint(3, 6))] for _ in range(6)]
    return [
        {
            "entry": "mean_value",
            "args": "numbers: list",
            "doc": "Return the arithmetic mean of numbers as a float; "
                   "return 0.0 for an empty list.",
            "examples": [(data[0],), (data[1],)],
            "tests": [(d,) for d in data[:5]] + [([],)],
            "groundtruth": (
                "def mean_value(numbers: list):\n"
                "    if not numbers:\n"
                "        return 0.0\n"
                "    return sum(numbers) / len(numbers)\n"
            ),
        },
        {
            "entry": "mean_abs_deviation",
            "args": "numbers: list",
            "doc": "Return the mean absolute deviation of numbers around their "
                   "arithmetic mean, as a float; return 0.0 for an empty list.",
            "examples": [(data[2],), (data[3],)],
            "tests": [(d,) for d in data[:5]] + [([],)],
            "groundtruth": (
                "def mean_abs_deviation(numbers: list):\n"
                "    if not numbers:\n"
                "        return 0.0\n"
                "    mean = sum(numbers) / len(numbers)\n"
                "    return sum(abs(x - mean) for x in numbers) / len(numbers)\n"
            ),
        },
        {
            "entry": "midpoint",
            "args": "a: float, b: float",
            "doc": "Return the midpoint of a and b as a float.",
            "examples": [(1.0, 4.0), (-2.5, 2.5)],
            "tests": [(1.0, 4.0), (-2.5, 2.5), (0.0, 0.0), (1e6, -1e6), (0.1, 0.2)],
            "groundtruth": "def midpoint(a: float, b: float):\n    return (a + b) / 2\n",
        },
    ]


def _bool_family(rng) -> list[dict]:
    data = [[rng.randint(-9, 9) for _ in range(rng.randint(2, 6))] for _ in range(6)]
    return [
        {
            "entry": "any_negative",
            "args": "numbers: list",
            "doc": "Return True if any element of numbers is strictly negative.",
            "examples": [(data[0],), ([1, 2],)],
            "tests": [(d,) for d in data[:4]] + [([],), ([0],)],
            "groundtruth": (
                "def any_negative(numbers: list):\n"
                "    return any(n < 0 for n in numbers)\n"
            ),
        },
        {
            "entry": "all_even",
            "args": "numbers: list",
            "doc": "Return True if every element of numbers is even "
                   "(the empty list counts as all even).",
            "examples": [([2, 4, 6],), (data[1],)],
            "tests": [(d,) for d in data[:4]] + [([],), ([2, 4],)],
            "groundtruth": (
                "def all_even(numbers: list):\n"
                "    return all(n % 2 == 0 for n in numbers)\n"
            ),
        },
        {
            "entry": "is_balanced_parens",
            "args": "text: str",
            "doc": "Return True if the round brackets in text are balanced: every "
                   "( closes with a later ) and no ) appears before its (.",
            "examples": [("(a(b))",), (")(",)],
            "tests": [("(a(b))",), (")(",), ("",), ("(((",), ("()()",)],
            "groundtruth": (
                "def is_balanced_parens(text: str):\n"
                "    depth = 0\n"
                "    for ch in text:\n"
                "        if ch == '(':\n"
                "            depth += 1\n"
                "        elif ch == ')':\n"
                "            depth -= 1\n"
                "            if depth < 0:\n"
                "                return False\n"
                "    return depth == 0\n"
            ),
        },
    ]


def _mapping_family(rng) -> list[dict]:
    words = _words(rng, 6)
    return [
        {
            "entry": "char_frequency",
            "args": "s: str",
            "doc": "Return a dict mapping each character of s to how many times "
                   "it appears.",
            "examples": [(words[0],), ("aab",)],
            "tests": [(w,) for w in words[:4]] + [("",)],
            "groundtruth": (
                "def char_frequency(s: str):\n"
                "    out = {}\n"
                "    for ch in s:\n"
                "        out[ch] = out.get(ch, 0) + 1\n"
                "    return out\n"
            ),
        },
        {
            "entry": "shared_letters",
            "args": "a: str, b: str",
            "doc": "Return the set of characters that appear in both a and b.",
            "examples": [(words[1], words[2]), ("abc", "cde")],
            "tests": [(words[1], words[2]), ("abc", "cde"), ("", "xyz"),
                      ("aa", "aa"), (words[3], words[4])],
            "groundtruth": (
                "def shared_letters(a: str, b: str):\n"
                "    return set(a) & set(b)\n"
            ),
        },
        {
            "entry": "most_common_char",
            "args": "s: str",
            "doc": "Return the most frequent character of s; break ties by "
                   "earliest first appearance. Return the empty string for empty s.",
            "examples": [("abab",), ("zz",)],
            "tests": [("abab",), ("zz",), ("",), ("abcabcb",), (words[5],)],
            "groundtruth": (
                "def most_common_char(s: str):\n"
                "    best, best_count = '', 0\n"
                "    for ch in s:\n"
                "        count = s.count(ch)\n"
                "        if count > best_count:\n"
                "            best, best_count = ch, count\n"
                "    return best\n"
            ),
        },
    ]


def _clamp_family(rng) -> list[dict]:
    data = [[rng.randint(-15, 15) for _ in range(rng.randint(3, 6))] for _ in range(4)]
    return [
        {
            "entry": "clamp_values",
            "args": "numbers: list, low: int, high: int",
            "doc": "Return numbers with every element clamped into [low, high].",
            "examples": [(data[0], -5, 5), (data[1], 0, 10)],
            "tests": [(data[0], -5, 5), (data[1], 0, 10), (data[2], -1, 1),
                      ([], 0, 4), (data[3], -20, 20)],
            "groundtruth": (
                "def clamp_values(numbers: list, low: int, high: int):\n"
                "    return [min(max(n, low), high) for n in numbers]\n"
            ),
        },
        {
            "entry": "count_in_range",
            "args": "numbers: list, low: int, high: int",
            "doc": "Return how many elements of numbers lie inside [low, high].",
            "examples": [(data[0], -5, 5), (data[2], 0, 9)],
            "tests": [(data[0], -5, 5), (data[2], 0, 9), ([], 0, 1),
                      (data[1], -100, 100), (data[3], 3, 3)],
            "groundtruth": (
                "def count_in_range(numbers: list, low: int, high: int):\n"
                "    return sum(1 for n in numbers if low <= n <= high)\n"
            ),
        },
    ]


def _common_family(rng) -> list[dict]:
    pools = [_words(rng, 7) for _ in range(4)]
    return [
        {
            "entry": "common_sorted",
            "args": "l1: list, l2: list, n: int",
            "doc": "Return up to n strings common to both l1 and l2, sorted by "
                   "increasing length; break length ties by order of first "
                   "appearance in l1.",
            "examples": [(pools[0], pools[0][2:] + ["extra"], 2),
                         (pools[1], pools[1][:3], 2)],
            "tests": [
                (pools[0], pools[0][2:] + ["extra"], 2),
                (pools[1], pools[1][:3], 2),
                (pools[2], pools[3], 3),
                ([], pools[0], 2),
                (pools[0], pools[0], 10),
            ],
            "groundtruth": (
                "def common_sorted(l1: list, l2: list, n: int):\n"
                "    seen = set(l2)\n"
                "    common = [s for s in l1 if s in seen]\n"
                "    ranked = sorted(common, key=lambda s: (len(s), l1.index(s)))\n"
                "    return ranked[:n]\n"
            ),
        },
    ]


def _words(rng, count: int) -> list[str]:
    lexicon = (
        "amber birch cedar dune ember fjord grove heath iris juniper kelp "
        "lagoon maple north opal pine quartz ridge slate tarn umber vale "
        "willow yarrow zephyr crest delta flint"
    ).split()
    return [rng.choice(lexicon) for _ in range(count)]


def _sprinkle(rng, word: str, charset: str) -> str:
    chars = list(word)
    for _ in range(rng.randint(1, 3)):
        chars.insert(rng.randint(0, len(chars)), rng.choice(charset))
    return "".join(chars)


FAMILY_BUILDERS = [
    _count_family,      # 12
    _scan_family,       # 4
    _running_family,    # 2
    _multiples_family,  # 4
    _digit_family,      # 4
    _rotate_family,     # 3
    _words_family,      # 4
    _strings_family,    # 4
    _pairs_family,      # 2
    _list_family,       # 5
    _float_family,      # 3
    _bool_family,       # 3
    _mapping_family,    # 3
    _clamp_family,      # 2
    _common_family,     # 1
]

TARGET = 164


def build_specs() -> list[dict]:
    rng = random.Random(20240311)
    specs: list[dict] = []
    round_no = 0
    while len(specs) < TARGET:
        for builder in FAMILY_BUILDERS:
            for spec in builder(rng):
                if round_no:
                    spec = dict(spec)
                    spec["entry"] = f"{spec['entry']}_v{round_no + 1}"
                    spec["groundtruth"] = spec["groundtruth"].replace(
                        f"def {spec['entry'][: -len(f'_v{round_no + 1}')]}(",
                        f"def {spec['entry']}(", 1,
                    )
                specs.append(spec)
                if len(specs) == TARGET:
                    return specs
        round_no += 1
    return specs


COMPOSE_SPECS = [
    # (first entry, second entry, bridge)
    ("reverse_words", "count_vowels",
     "Take the string produced by the step above and feed it, unchanged, "
     "into the next step:"),
    ("strip_vowels", "longest_word",
     "The text that results from the previous step is the input for the "
     "following task:"),
    ("count_vowels", "digit_sum",
     "Treat the number obtained above as the input of the next step:"),
    ("digit_sum", "sum_multiples_of_3",
     "Use the value computed above as the argument of the following problem:"),
    ("word_lengths", "running_max",
     "The list built in the previous step becomes the input of the next one:"),
    ("running_max", "unique_sorted",
     "Continue by applying the following transformation to the list from "
     "the step above:"),
    ("capitalize_words", "word_lengths",
     "Feed the transformed text from above into the final step:"),
    ("unique_sorted", "mean_value",
     "Finish by applying the next computation to the list produced above:"),
]


def main() -> None:
    parser = argparse.ArgumentParser()
    parser.add_argument("--out", default="fixtures")
    args = parser.parse_args()
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)

    specs = build_specs()
    problems = [build_problem(i, spec) for i, spec in enumerate(specs)]
    assert len(problems) == TARGET

    seeds_path = out_dir / "seed_humaneval.jsonl"
    with open(seeds_path, "w", encoding="utf-8") as fh:
        for p in problems:
            fh.write(json.dumps(p.to_record(), ensure_ascii=False) + "\n")
    print(f"wrote {len(problems)} problems to {seeds_path}")

    by_entry = {p.entry_point: p.task_id for p in problems}
    compose_path = out_dir / "combine_naive_specs.jsonl"
    with open(compose_path, "w", encoding="utf-8") as fh:
        for first, second, bridge in COMPOSE_SPECS:
            fh.write(json.dumps({
                "first": by_entry[first],
                "second": by_entry[second],
                "bridge_text": bridge,
            }) + "\n")
    print(f"wrote {len(COMPOSE_SPECS)} compose specs to {compose_path}")


if __name__ == "__main__":
    main()
