"""Structure recovery from subject-language source and model replies.

Everything here is line/AST surgery: pulling a function header out of a
prompt, carving the code region out of a chatty reply, splitting problem
statements from helper implementations, and reading ``>>>`` examples or
``assert`` lines back into canonical values.
"""

from __future__ import annotations

import ast
import re
from dataclasses import dataclass

from . import canonical
from .canonical import Args, CanonicalValue
from .errors import ExtractionError, HeaderParseError

_FENCE_RE = re.compile(r"```[ \t]*([A-Za-z0-9_+-]*)[ \t]*\n(.*?)```", re.S)
_DEF_LINE_RE = re.compile(r"^(async[ \t]+)?def[ \t]+\w+", re.M)


@dataclass(frozen=True)
class Header:
    name: str
    params: tuple[tuple[str, str | None], ...]  # (arg name, annotation text)
    defaults: int = 0

    @property
    def arg_names(self) -> tuple[str, ...]:
        return tuple(name for name, _ in self.params)

    def accepts_arity(self, n: int) -> bool:
        required = len(self.params) - self.defaults
        return required <= n <= len(self.params)


@dataclass(frozen=True)
class ProblemBlock:
    prompt: str
    entry_point: str
    helpers: tuple[str, ...] = ()


def parse_header(source: str, entry_point: str | None = None) -> Header:
    """Read the declared signature of `entry_point` (or the only def)."""
    try:
        tree = ast.parse(source)
    except SyntaxError as exc:
        raise HeaderParseError(f"unparseable source: {exc}") from exc
    defs = [
        n for n in ast.walk(tree)
        if isinstance(n, (ast.FunctionDef, ast.AsyncFunctionDef))
    ]
    if entry_point is not None:
        defs = [n for n in defs if n.name == entry_point]
    if not defs:
        raise HeaderParseError(
            f"no function {entry_point!r} found" if entry_point else "no function found"
        )
    node = defs[-1]
    params = tuple(
        (arg.arg, _annotation_text(arg.annotation)) for arg in node.args.args
    )
    return Header(name=node.name, params=params, defaults=len(node.args.defaults))


def _annotation_text(node) -> str | None:
    if node is None:
        return None
    return ast.unparse(node).replace(" ", "")


def defined_functions(source: str) -> list[str]:
    try:
        tree = ast.parse(source)
    except SyntaxError:
        return re.findall(r"^\s*def\s+(\w+)\s*\(", source, re.M)
    return [
        n.name for n in ast.walk(tree)
        if isinstance(n, (ast.FunctionDef, ast.AsyncFunctionDef))
    ]


def first_fenced_block(text: str) -> str | None:
    m = _FENCE_RE.search(text)
    if m is None:
        # unterminated fence: take everything after the opening marker
        open_idx = text.find("```")
        if open_idx == -1:
            return None
        rest = text[open_idx + 3:]
        newline = rest.find("\n")
        if newline == -1:
            return None
        return rest[newline + 1:]
    return m.group(2)


def code_region(text: str) -> str:
    """First fenced block if present, else the longest parseable region
    anchored at a ``def`` line (keeping the imports attached above it)."""
    fenced = first_fenced_block(text)
    if fenced is not None:
        return fenced
    if _try_parse(text) is not None:
        return text
    lines = text.splitlines()
    best = ""
    for i, line in enumerate(lines):
        if not _DEF_LINE_RE.match(line):
            continue
        start = _attach_prelude(lines, i)
        candidate = _truncate_to_parse(lines[start:])
        if candidate is not None and len(candidate) > len(best):
            best = candidate
    if not best:
        raise ExtractionError("no parseable code region in reply")
    return best


def _attach_prelude(lines: list[str], def_index: int) -> int:
    start = def_index
    for j in range(def_index - 1, -1, -1):
        stripped = lines[j].strip()
        if (
            stripped == ""
            or stripped.startswith(("#", "import ", "from ", "@"))
        ):
            start = j
        else:
            break
    while start < def_index and lines[start].strip() == "":
        start += 1
    return start


def _truncate_to_parse(lines: list[str]) -> str | None:
    for end in range(len(lines), 0, -1):
        if lines[end - 1].strip() == "" and end != len(lines):
            continue
        candidate = "\n".join(lines[:end])
        if _try_parse(candidate) is not None:
            return candidate
    return None


def _try_parse(source: str):
    try:
        return ast.parse(source)
    except SyntaxError:
        return None


def _docstring_end(node) -> int | None:
    """End line (1-based) of the def's docstring statement, if any."""
    if not node.body:
        return None
    first = node.body[0]
    if (
        isinstance(first, ast.Expr)
        and isinstance(first.value, ast.Constant)
        and isinstance(first.value.value, str)
    ):
        return first.end_lineno
    return None


def _is_implemented(node) -> bool:
    skip = 1 if _docstring_end(node) is not None else 0
    return len(node.body) > skip


def extract_problem(reply: str, tool_use: bool = False) -> ProblemBlock:
    """Recover a single problem statement from a model reply.

    Non-tool_use replies must contain exactly one documented function; the
    prompt keeps imports and the header+docstring, dropping any body. For
    tool_use, every other def is a fully-implemented helper placed verbatim
    before the main header.
    """
    blocks = _extract_blocks(reply)
    documented = [b for b in blocks["defs"] if b["doc_end"] is not None]
    if not documented:
        raise ExtractionError("reply lacks a function with a docstring")
    if tool_use:
        main = documented[-1]
        helpers = [d for d in blocks["defs"] if d is not main]
        if not helpers:
            raise ExtractionError("tool_use reply has no helper functions")
        bad = [d["name"] for d in helpers if not d["implemented"]]
        if bad:
            raise ExtractionError(f"helpers are not implemented: {', '.join(bad)}")
        pieces = [
            b["full"] if b is not main else b["head"]
            for b in blocks["ordered"]
        ]
        prompt = _join_blocks(pieces)
        return ProblemBlock(
            prompt=prompt,
            entry_point=main["name"],
            helpers=tuple(d["full"] for d in helpers),
        )
    if len(documented) > 1:
        raise ExtractionError(
            f"reply contains {len(documented)} problems, expected one"
        )
    if len(blocks["defs"]) > 1:
        raise ExtractionError("reply contains extra function definitions")
    main = documented[0]
    pieces = [
        b["head"] if b is main else b["full"]
        for b in blocks["ordered"]
        if b["kind"] == "prelude" or b is main
    ]
    return ProblemBlock(prompt=_join_blocks(pieces), entry_point=main["name"])


def extract_problem_pair(reply: str) -> tuple[ProblemBlock, ProblemBlock]:
    """Recover exactly two sub-problems (each header+docstring) from a reply."""
    blocks = _extract_blocks(reply)
    documented = [b for b in blocks["defs"] if b["doc_end"] is not None]
    if len(documented) != 2:
        raise ExtractionError(
            f"reply contains {len(documented)} documented functions, expected two"
        )
    prelude = [b["full"] for b in blocks["ordered"] if b["kind"] == "prelude"]
    first, second = documented
    if first["name"] == second["name"]:
        raise ExtractionError("sub-problems share an entry point name")
    out = []
    for block in (first, second):
        prompt = _join_blocks(prelude + [block["head"]])
        out.append(ProblemBlock(prompt=prompt, entry_point=block["name"]))
    return out[0], out[1]


def _extract_blocks(reply: str) -> dict:
    region = code_region(reply)
    tree = _try_parse(region)
    if tree is None:
        region2 = _truncate_to_parse(region.splitlines())
        if region2 is None:
            raise ExtractionError("code region does not parse")
        region = region2
        tree = ast.parse(region)
    lines = region.splitlines()
    ordered = []
    defs = []
    for node in tree.body:
        if isinstance(node, (ast.FunctionDef, ast.AsyncFunctionDef)):
            doc_end = _docstring_end(node)
            entry = {
                "kind": "def",
                "name": node.name,
                "full": "\n".join(lines[node.lineno - 1:node.end_lineno]),
                "head": "\n".join(
                    lines[node.lineno - 1:(doc_end or node.end_lineno)]
                ),
                "doc_end": doc_end,
                "implemented": _is_implemented(node),
            }
            ordered.append(entry)
            defs.append(entry)
        elif isinstance(node, (ast.Import, ast.ImportFrom)):
            ordered.append({
                "kind": "prelude",
                "full": "\n".join(lines[node.lineno - 1:node.end_lineno]),
            })
        elif isinstance(node, ast.Assign):
            ordered.append({
                "kind": "prelude",
                "full": "\n".join(lines[node.lineno - 1:node.end_lineno]),
            })
        # anything else (calls, prints the model added) is dropped
    if not defs:
        raise ExtractionError("reply defines no functions")
    return {"ordered": ordered, "defs": defs}


def _join_blocks(pieces: list[str]) -> str:
    return "\n\n".join(piece.rstrip() for piece in pieces if piece.strip()) + "\n"


# --- examples and assertions -------------------------------------------------

_PROMPT_RE_CACHE: dict[str, re.Pattern] = {}


def parse_doctest_examples(
    prompt: str, entry_point: str
) -> list[tuple[Args, CanonicalValue | None]]:
    """Read ``>>> f(...)`` examples (with literal args/outputs) from a prompt.

    Examples whose arguments or shown output are not plain literals are
    skipped: they cannot be checked mechanically.
    """
    lines = prompt.splitlines()
    pattern = _PROMPT_RE_CACHE.get(entry_point)
    if pattern is None:
        pattern = re.compile(rf"^\s*>>>\s*{re.escape(entry_point)}\s*(\(.*\))\s*$")
        _PROMPT_RE_CACHE[entry_point] = pattern
    out: list[tuple[Args, CanonicalValue | None]] = []
    i = 0
    while i < len(lines):
        m = pattern.match(lines[i])
        if not m:
            i += 1
            continue
        args = _parse_call_args(f"{entry_point}{m.group(1)}", entry_point)
        expected_lines: list[str] = []
        j = i + 1
        while j < len(lines):
            stripped = lines[j].strip()
            if not stripped or stripped.startswith(">>>") or stripped in ('"""', "'''"):
                break
            expected_lines.append(stripped)
            j += 1
        expected: CanonicalValue | None = None
        if expected_lines:
            try:
                expected = canonical.from_literal(" ".join(expected_lines))
            except Exception:
                expected = None
                args = None
        if args is not None:
            out.append((args, expected))
        i = j if expected_lines else i + 1
    return out


def parse_assertions(
    reply: str, entry_point: str
) -> list[tuple[Args, CanonicalValue | None]]:
    """Read ``assert f(args) == expected`` statements from a reply."""
    out: list[tuple[Args, CanonicalValue | None]] = []
    for line in reply.splitlines():
        stripped = line.strip()
        if not stripped.startswith("assert "):
            continue
        node = _try_parse(stripped)
        if node is None or not node.body or not isinstance(node.body[0], ast.Assert):
            continue
        test = node.body[0].test
        call, expected_node = None, None
        if isinstance(test, ast.Compare) and len(test.ops) == 1 and isinstance(test.ops[0], ast.Eq):
            call, expected_node = test.left, test.comparators[0]
        elif isinstance(test, ast.Call):
            call = test
        if not (
            isinstance(call, ast.Call)
            and isinstance(call.func, ast.Name)
            and call.func.id == entry_point
        ):
            continue
        args = _literal_args(call)
        if args is None:
            continue
        expected = None
        if expected_node is not None:
            try:
                expected = canonical.from_python(ast.literal_eval(expected_node))
            except (ValueError, SyntaxError):
                expected = None
        out.append((args, expected))
    return out


def _parse_call_args(call_text: str, entry_point: str) -> Args | None:
    node = _try_parse(call_text)
    if node is None or not node.body:
        return None
    expr = node.body[0]
    if not isinstance(expr, ast.Expr) or not isinstance(expr.value, ast.Call):
        return None
    return _literal_args(expr.value)


def _literal_args(call: ast.Call) -> Args | None:
    if call.keywords:
        return None
    values = []
    for arg in call.args:
        try:
            values.append(ast.literal_eval(arg))
        except (ValueError, SyntaxError):
            return None
    return canonical.args_from_python(values)


def render_assertion(
    entry_point: str, args: Args, output: CanonicalValue
) -> str | None:
    """Format an io pair as an assert line; exception outputs have no literal."""
    if output.is_exception:
        return None
    arg_text = ", ".join(repr(canonical.to_python(a)) for a in args)
    return f"assert {entry_point}({arg_text}) == {canonical.to_python(output)!r}"
