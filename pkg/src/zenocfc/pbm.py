"""Plain (P1) portable bitmap reader and writer.

Netpbm stores ``1`` for a black pixel.  Messages use white = logic 1, so
file digits are the complement of message bits.
"""

from __future__ import annotations

from pathlib import Path

import numpy as np

from .messaging import BitmapMessage

MAX_PIXELS = 1 << 26
LINE_LIMIT = 70


class PbmError(ValueError):
    def __init__(self, message: str, line: int, col: int):
        super().__init__(f"line {line}, column {col}: {message}")
        self.line = line
        self.col = col


class _Scanner:
    def __init__(self, text: str):
        self.text = text
        self.pos = 0
        self.line = 1
        self.col = 1

    def _advance(self, n=1):
        for _ in range(n):
            if self.text[self.pos] == "\n":
                self.line += 1
                self.col = 1
            else:
                self.col += 1
            self.pos += 1

    def skip_space(self):
        text = self.text
        while self.pos < len(text):
            ch = text[self.pos]
            if ch == "#":
                while self.pos < len(text) and text[self.pos] != "\n":
                    self._advance()
            elif ch.isspace():
                self._advance()
            else:
                break

    def error(self, message):
        return PbmError(message, self.line, self.col)

    def at_end(self):
        return self.pos >= len(self.text)

    def integer(self, what):
        self.skip_space()
        start = self.pos
        line, col = self.line, self.col
        while self.pos < len(self.text) and self.text[self.pos].isdigit():
            self._advance()
        if start == self.pos:
            if self.at_end():
                raise self.error(f"truncated header: missing {what}")
            raise self.error(f"expected {what}, found {self.text[self.pos]!r}")
        if self.pos < len(self.text) and not (self.text[self.pos].isspace() or self.text[self.pos] == "#"):
            raise self.error(f"expected whitespace after {what}")
        value = int(self.text[start : self.pos])
        if value < 1:
            raise PbmError(f"{what} must be >= 1, got {value}", line, col)
        return value


def decode(text: str) -> BitmapMessage:
    sc = _Scanner(text)
    magic = text[:2]
    if magic != "P1":
        if len(magic) == 2 and magic[0] == "P" and magic[1] in "23456":
            raise sc.error(f"unsupported format {magic!r}: only plain P1 bitmaps are accepted")
        raise sc.error(f"bad magic number {magic!r}, expected 'P1'")
    sc._advance(2)
    if not sc.at_end() and not (text[sc.pos].isspace() or text[sc.pos] == "#"):
        raise sc.error("expected whitespace after magic number")
    width = sc.integer("width")
    height = sc.integer("height")
    if width * height > MAX_PIXELS:
        raise sc.error(f"dimensions {width}x{height} exceed {MAX_PIXELS} pixels")

    n = width * height
    digits = np.empty(n, dtype=np.uint8)
    k = 0
    while k < n:
        sc.skip_space()
        if sc.at_end():
            raise sc.error(f"truncated data: got {k} of {n} pixels")
        ch = text[sc.pos]
        if ch not in "01":
            raise sc.error(f"invalid pixel {ch!r}")
        digits[k] = ord(ch) - 48
        k += 1
        sc._advance()
    sc.skip_space()
    if not sc.at_end():
        raise sc.error("unexpected data after last pixel")
    return BitmapMessage(width, height, 1 - digits)


def encode(msg: BitmapMessage) -> str:
    chars = "".join("1" if b == 0 else "0" for b in msg.bits)
    out = [f"P1\n{msg.width} {msg.height}\n"]
    for r in range(msg.height):
        row = chars[r * msg.width : (r + 1) * msg.width]
        for i in range(0, len(row), LINE_LIMIT):
            out.append(row[i : i + LINE_LIMIT] + "\n")
    return "".join(out)


def read(path) -> BitmapMessage:
    return decode(Path(path).read_text(encoding="ascii"))


def write(path, msg: BitmapMessage) -> None:
    Path(path).write_text(encode(msg), encoding="ascii", newline="\n")
