from __future__ import annotations

import json
import os
import subprocess
import sys
from pathlib import Path

import pytest

from codeshim.canonical import canonicalize
from codeshim.protocol import FrameReader, FrameWriter
from codeshim.runner import ImportGuard, serve_job


class SinkWriter:
    def __init__(self):
        self.frames = []

    def write_frame(self, obj):
        self.frames.append(obj)


def run_request(source, entry, inputs, **kwargs):
    writer = SinkWriter()
    serve_job(
        {
            "job_id": "t",
            "source": source,
            "entry_point": entry,
            "inputs": [[canonicalize(a) for a in args] for args in inputs],
            "per_case_timeout_ms": 1000,
        },
        writer,
        **kwargs,
    )
    return writer.frames


def test_basic_case_frames():
    frames = run_request("def f(x):\n    return x * 2\n", "f", [(3,), (5,)])
    assert [f["verdict"] for f in frames] == ["ok", "ok"]
    assert [f["value"] for f in frames] == [["int", 6], ["int", 10]]
    assert [f["index"] for f in frames] == [0, 1]
    assert all(f["wall_ms"] >= 0 for f in frames)


def test_dict_return_encoding():
    frames = run_request("def f():\n    return {'a': 1}\n", "f", [()])
    assert frames[0]["value"] == ["dict", [[["str", "a"], ["int", 1]]]]


def test_nan_return_encoding():
    frames = run_request("def f():\n    return float('nan')\n", "f", [()])
    assert frames[0]["value"] == ["float", "nan"]


def test_unhandled_exception_maps_to_verdict():
    frames = run_request("def f(x):\n    raise ValueError('bad')\n", "f", [(1,)])
    assert frames[0]["verdict"] == "exception"
    assert frames[0]["value"][1]["type_name"] == "ValueError"
    assert frames[0]["value"][1]["message"] == "bad"


def test_source_error_reports_every_case():
    frames = run_request("def f(:\n", "f", [(1,), (2,)])
    assert len(frames) == 2
    assert all(f["verdict"] == "exception" for f in frames)
    assert all(f["value"][1]["type_name"] == "SyntaxError" for f in frames)


def test_source_error_with_no_cases_is_error_frame():
    frames = run_request("import nosuchmodule_abc\n", "f", [])
    assert len(frames) == 1
    assert frames[0]["error"] == "source"


def test_missing_entry_point():
    frames = run_request("def g():\n    return 1\n", "f", [()])
    assert frames[0]["value"][1]["type_name"] == "NameError"


def test_fresh_namespace_per_batch_not_per_case():
    source = (
        "calls = []\n"
        "def f(x):\n"
        "    calls.append(x)\n"
        "    return len(calls)\n"
    )
    frames = run_request(source, "f", [(1,), (2,), (3,)])
    # module state persists across cases within one batch by design
    assert [f["value"] for f in frames] == [["int", 1], ["int", 2], ["int", 3]]


def test_import_guard_blocks_disallowed():
    frames = run_request(
        "import os\ndef f():\n    return os.getpid()\n", "f", [()]
    )
    assert frames[0]["verdict"] == "exception"
    assert frames[0]["value"][1]["type_name"] == "ImportError"


def test_import_guard_allows_allowlisted():
    frames = run_request(
        "from collections import Counter\nimport math\n"
        "def f(s):\n    return Counter(s)['a'] + int(math.sqrt(4))\n",
        "f", [("aab",)],
    )
    assert frames[0]["value"] == ["int", 4]


def test_import_guard_restores_builtin():
    import builtins

    before = builtins.__import__
    run_request("import os\n", "f", [(1,)])
    assert builtins.__import__ is before


def test_import_guard_requires_nonempty_allowlist():
    with pytest.raises(ValueError):
        ImportGuard(())


def test_guard_can_be_disabled():
    frames = run_request(
        "import os\ndef f():\n    return os.path.sep\n", "f", [()],
        guard_imports=False,
    )
    assert frames[0]["verdict"] == "ok"


# --- process-level protocol -----------------------------------------------------

def spawn_shim(*extra):
    return subprocess.Popen(
        [sys.executable, "-m", "codeshim", *extra],
        stdin=subprocess.PIPE,
        stdout=subprocess.PIPE,
        stderr=subprocess.PIPE,
    )


def frame_bytes(obj) -> bytes:
    payload = json.dumps(obj, separators=(",", ":")).encode()
    return str(len(payload)).encode() + b"\n" + payload + b"\n"


def read_frames(stream):
    reader = FrameReader(stream.fileno())
    frames = []
    while True:
        try:
            frames.append(reader.read_frame())
        except EOFError:
            return frames


def test_end_to_end_process_protocol():
    proc = spawn_shim()
    request = {
        "job_id": "proc-1",
        "source": "def f(x):\n    print('candidate noise')\n    return x + 1\n",
        "entry_point": "f",
        "inputs": [[["int", 41]]],
        "per_case_timeout_ms": 1000,
    }
    out, _ = proc.communicate(frame_bytes(request), timeout=30)
    frames = []
    buf = out
    while buf:
        length, rest = buf.split(b"\n", 1)
        n = int(length)
        frames.append(json.loads(rest[:n]))
        buf = rest[n + 1:]
    assert frames[0] == {"ready": True}
    assert frames[1]["verdict"] == "ok"
    assert frames[1]["value"] == ["int", 42]
    assert proc.returncode == 0


def test_malformed_frame_yields_error_frame_not_silence():
    proc = spawn_shim()
    out, _ = proc.communicate(b"not-a-length\n{}\n", timeout=30)
    text = out.decode()
    assert '"ready":true' in text
    assert '"error":"protocol"' in text
