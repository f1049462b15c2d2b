#!/usr/bin/env python3
"""Freeze the sanitizer regression corpus.

Each sample is a raw model reply paired with the expected sanitizer outcome:
either the exact sanitized text (hash-pinned) or an expected failure. The
expected outputs were produced once and reviewed by hand; the test suite
re-runs the sanitizer and fails on any byte of drift.

Usage: python3 tools/gen_sanitizer_corpus.py [--check]
"""

from __future__ import annotations

import argparse
import hashlib
import json
import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "src"))

from benchforge.errors import SanitizeFailure  # noqa: E402
from benchforge.harness import sanitize  # noqa: E402

HEADER = 'def f(x):\n    """Stub header for completion-mode samples."""\n'

SAMPLES = [
    ("fenced_python", "f",
     "```python\ndef f(x):\n    return x + 1\n```"),
    ("fenced_bare", "f",
     "```\ndef f(x):\n    return x - 1\n```"),
    ("fenced_prose_around", "f",
     "Sure! Here's the implementation:\n\n```python\ndef f(x):\n    return x * 3\n```\n\nHope that helps."),
    ("fenced_unterminated", "f",
     "Here you go:\n```python\ndef f(x):\n    return x // 2"),
    ("two_fences_first_wins", "f",
     "```python\ndef f(x):\n    return 'first'\n```\nAlternatively:\n```python\ndef f(x):\n    return 'second'\n```"),
    ("eos_sentinel", "f",
     "def f(x):\n    return x + 10</s>"),
    ("eos_endoftext", "f",
     "def f(x):\n    return x - 10<|endoftext|>"),
    ("eos_eot", "f",
     "def f(x):\n    return 0<|EOT|>"),
    ("eos_im_end", "f",
     "def f(x):\n    return [x]<|im_end|>"),
    ("eos_then_garbage", "f",
     "def f(x):\n    return x</s>and here is some trailing junk ]]]"),
    ("multiple_eos", "f",
     "def f(x):\n    return x<|endoftext|></s><|endoftext|>"),
    ("eos_inside_fence", "f",
     "```python\ndef f(x):\n    return x * x\n</s>\n```"),
    ("plain_code", "f",
     "def f(x):\n    return x ** 2\n"),
    ("plain_code_trailing_prose", "f",
     "def f(x):\n    return x ** 3\n\nThis works by cubing the input value."),
    ("plain_code_leading_prose", "f",
     "Of course. The function below solves the task.\n\ndef f(x):\n    return -x\n"),
    ("prose_both_sides", "f",
     "Let me explain my approach first.\n\ndef f(x):\n    total = 0\n    for i in range(x):\n        total += i\n    return total\n\nAs you can see, the loop accumulates the answer."),
    ("markdown_heading_then_code", "f",
     "## Solution\n\ndef f(x):\n    return max(x, 0)\n"),
    ("code_with_imports", "f",
     "from math import sqrt\n\ndef f(x):\n    return sqrt(x)\n"),
    ("code_with_helper", "f",
     "def helper(y):\n    return y + 1\n\ndef f(x):\n    return helper(x) * 2\n"),
    ("signature_restated", "f",
     "def f(x):\n    \"\"\"Restated docstring.\"\"\"\n    return x or 1\n"),
    ("docstring_examples_kept", "f",
     "def f(x):\n    \"\"\"Doubles.\n\n    >>> f(2)\n    4\n    \"\"\"\n    return x * 2\n"),
    ("crlf_endings", "f",
     "def f(x):\r\n    return x + 7\r\n"),
    ("tabs_in_code", "f",
     "def f(x):\n\treturn x + 42\n"),
    ("unicode_strings", "f",
     "def f(x):\n    return 'π≈' + str(x)\n"),
    ("class_wrapped", "f",
     "class Solution:\n    def f(self, x):\n        return x\n\ndef f(x):\n    return Solution().f(x)\n"),
    ("body_only", "f",
     "    return x + 100\n"),
    ("body_only_trailing_def", "f",
     "    return x * 5\n\ndef unrelated():\n    pass\n"),
    ("body_only_trailing_print", "f",
     "    return x - 5\n\nprint(f(3))\n"),
    ("body_multiline", "f",
     "    total = x\n    for i in range(3):\n        total += i\n    return total\n"),
    ("fenced_body", "f",
     "```python\n    return x + 8\n```"),
    ("empty_reply", "f", ""),
    ("whitespace_reply", "f", "   \n \n"),
    ("eos_only", "f", "</s>"),
    ("empty_fence", "f", "```python\n\n```"),
    ("refusal_prose", "f",
     "I'm sorry, I cannot write this function for you today."),
    ("prose_no_code", "f",
     "The answer depends on several considerations about x and its meaning."),
]


def build() -> dict:
    out = []
    for name, entry, raw in SAMPLES:
        record = {"name": name, "entry_point": entry, "raw": raw}
        try:
            clean = sanitize(raw, entry)
        except SanitizeFailure as exc:
            record["expect"] = "failure"
            record["failure_contains"] = ""
        else:
            record["expect"] = "ok"
            record["sanitized"] = clean
            record["sanitized_sha256"] = hashlib.sha256(clean.encode()).hexdigest()
            record["mode"] = "standalone" if "def f" in clean else "body"
        out.append(record)
    return {
        "description": "Sanitizer regression corpus: raw replies with "
                       "hash-pinned expected outputs.",
        "completion_header": HEADER,
        "samples": out,
    }


def main() -> None:
    parser = argparse.ArgumentParser()
    parser.add_argument("--check", action="store_true",
                        help="verify the existing fixture instead of writing")
    args = parser.parse_args()
    path = Path(__file__).resolve().parent.parent / "fixtures" / "sanitizer_corpus.json"
    data = build()
    if args.check:
        existing = json.loads(path.read_text("utf-8"))
        assert existing == data, "sanitizer corpus drifted"
        print("corpus matches")
        return
    path.write_text(json.dumps(data, indent=1), "utf-8")
    ok = sum(1 for s in data["samples"] if s["expect"] == "ok")
    fail = len(data["samples"]) - ok
    print(f"wrote {len(data['samples'])} samples ({ok} ok, {fail} failures) to {path}")
    for s in data["samples"]:
        shown = repr(s.get("sanitized", "<failure>"))
        print(f"  {s['name']:28s} {s['expect']:7s} {shown[:80]}")


if __name__ == "__main__":
    main()
