"""Bit-granular writer/reader and the shared integer code.

Every variable-length integer is written as Elias gamma of ``value + 1``,
so zero is representable and the code is prefix-free.
"""
from __future__ import annotations


class CorruptCodeError(ValueError):
    """A code stream is truncated, malformed, or references missing data."""


def gamma(v: int) -> str:
    """Elias gamma code of ``v >= 1``."""
    if v < 1:
        raise ValueError(f"gamma code needs v >= 1, got {v}")
    body = format(v, "b")
    return "0" * (len(body) - 1) + body


def uint_len(value: int) -> int:
    """Bit length of ``gamma(value + 1)``."""
    return 2 * (value + 1).bit_length() - 1


class BitWriter:
    __slots__ = ("_parts", "_len")

    def __init__(self):
        self._parts: list[str] = []
        self._len = 0

    def bits(self, text: str) -> None:
        self._parts.append(text)
        self._len += len(text)

    def bit(self, b: int) -> None:
        self.bits("1" if b else "0")

    def uint(self, value: int) -> None:
        if value < 0:
            raise ValueError(f"cannot code negative integer {value}")
        self.bits(gamma(value + 1))

    def __len__(self) -> int:
        return self._len

    def getvalue(self) -> str:
        return "".join(self._parts)


class BitReader:
    __slots__ = ("_text", "pos")

    def __init__(self, text: str, pos: int = 0):
        self._text = text
        self.pos = pos

    def remaining(self) -> int:
        return len(self._text) - self.pos

    def bits(self, n: int) -> str:
        end = self.pos + n
        if end > len(self._text):
            raise CorruptCodeError(
                f"truncated stream: wanted {n} bits at offset {self.pos}, "
                f"{self.remaining()} left"
            )
        out = self._text[self.pos:end]
        self.pos = end
        return out

    def bit(self) -> int:
        return 1 if self.bits(1) == "1" else 0

    def uint(self) -> int:
        one = self._text.find("1", self.pos)
        if one < 0:
            raise CorruptCodeError(f"truncated gamma code at offset {self.pos}")
        zeros = one - self.pos
        self.pos = one
        return int(self.bits(zeros + 1), 2) - 1
