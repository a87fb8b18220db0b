"""Immutable binary strings.

Bit 0 is the leftmost character of the textual form.  When a string of
width ``w`` is packed into an integer, bit ``i`` lands at integer bit
position ``w - 1 - i``, so ``int(text, 2)`` is the packed value.
"""
from __future__ import annotations

import re
from typing import Iterable, Iterator, Union

_BINARY = re.compile(r"[01]*")
_WS = re.compile(r"\s+")


class BitString:
    """A finite string over ``{0, 1}``."""

    __slots__ = ("_bits",)

    def __init__(self, bits: Union[str, Iterable[int], "BitString"] = ""):
        if isinstance(bits, BitString):
            text = bits._bits
        elif isinstance(bits, str):
            text = bits
        else:
            text = "".join("1" if b else "0" for b in _as_binary_ints(bits))
        if not _BINARY.fullmatch(text):
            raise ValueError(f"not a binary string: {text[:32]!r}")
        self._bits = text

    @classmethod
    def zeros(cls, n: int) -> BitString:
        return cls("0" * n)

    @classmethod
    def ones(cls, n: int) -> BitString:
        return cls("1" * n)

    @classmethod
    def from_int(cls, value: int, width: int) -> BitString:
        if value < 0 or value >> width:
            raise ValueError(f"{value} does not fit in {width} bits")
        return cls(format(value, f"0{width}b") if width else "")

    @classmethod
    def from_bytes(cls, data: bytes) -> BitString:
        """Most significant bit of each byte first."""
        return cls("".join(format(b, "08b") for b in data))

    @classmethod
    def parse(cls, text: str) -> BitString:
        """Parse ``0``/``1`` text, ignoring whitespace."""
        return cls(_WS.sub("", text))

    def to_int(self) -> int:
        return int(self._bits, 2) if self._bits else 0

    def to_bytes(self) -> bytes:
        """Zero-pad to a byte boundary on the right, MSB first."""
        pad = (-len(self._bits)) % 8
        text = self._bits + "0" * pad
        return bytes(int(text[i:i + 8], 2) for i in range(0, len(text), 8))

    @property
    def bits(self) -> str:
        return self._bits

    @property
    def length(self) -> int:
        return len(self._bits)

    def weight(self) -> int:
        """Hamming weight."""
        return self._bits.count("1")

    def __len__(self) -> int:
        return len(self._bits)

    def __iter__(self) -> Iterator[int]:
        return (1 if c == "1" else 0 for c in self._bits)

    def __getitem__(self, idx):
        if isinstance(idx, slice):
            return BitString(self._bits[idx])
        return 1 if self._bits[idx] == "1" else 0

    def __add__(self, other: BitString) -> BitString:
        if not isinstance(other, BitString):
            return NotImplemented
        return BitString(self._bits + other._bits)

    def __eq__(self, other) -> bool:
        if isinstance(other, BitString):
            return self._bits == other._bits
        return NotImplemented

    def __hash__(self) -> int:
        return hash(("BitString", self._bits))

    def __str__(self) -> str:
        return self._bits

    def __repr__(self) -> str:
        shown = self._bits if len(self._bits) <= 40 else self._bits[:37] + "..."
        return f"BitString('{shown}')"


def _as_binary_ints(values: Iterable[int]) -> Iterator[int]:
    for v in values:
        if v not in (0, 1):
            raise ValueError(f"bit must be 0 or 1, got {v!r}")
        yield int(v)


EMPTY = BitString("")
