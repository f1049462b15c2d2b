"""Length-prefixed JSON frames over raw file descriptors.

Frame layout: ASCII decimal byte length, newline, payload bytes, newline.
The shim grabs its protocol descriptors before any candidate code runs, so
candidate writes to fd 0/1 cannot corrupt the stream.
"""

from __future__ import annotations

import json
import os


class ProtocolError(Exception):
    pass


class FrameReader:
    def __init__(self, fd: int):
        self.fd = fd
        self.buf = b""

    def _fill(self) -> None:
        chunk = os.read(self.fd, 65536)
        if not chunk:
            raise EOFError
        self.buf += chunk

    def read_line(self) -> bytes:
        while b"\n" not in self.buf:
            self._fill()
        line, self.buf = self.buf.split(b"\n", 1)
        return line

    def read_exact(self, n: int) -> bytes:
        while len(self.buf) < n:
            self._fill()
        out, self.buf = self.buf[:n], self.buf[n:]
        return out

    def read_frame(self) -> dict:
        header = self.read_line()
        try:
            length = int(header)
        except ValueError:
            raise ProtocolError(f"bad frame header {header[:32]!r}")
        if length < 0 or length > 64 * 1024 * 1024:
            raise ProtocolError(f"unreasonable frame length {length}")
        body = self.read_exact(length + 1)
        try:
            frame = json.loads(body[:length].decode("utf-8"))
        except (UnicodeDecodeError, json.JSONDecodeError) as exc:
            raise ProtocolError(f"undecodable frame: {exc}")
        if not isinstance(frame, dict):
            raise ProtocolError("frame is not an object")
        return frame


class FrameWriter:
    def __init__(self, fd: int):
        self.fd = fd

    def write_frame(self, obj: dict) -> None:
        payload = json.dumps(obj, separators=(",", ":"), ensure_ascii=False)
        data = payload.encode("utf-8")
        os.write(self.fd, str(len(data)).encode("ascii") + b"\n" + data + b"\n")
