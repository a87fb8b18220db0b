"""Injective compressors with side information.

Each codec maps ``(V, X)`` to a self-delimiting payload from which ``V``
is recovered given the same ``X``.  Integers are coded with
:func:`revlaw.bitio.gamma` on ``value + 1`` throughout.

Payload layouts (``uint`` is the shared integer code):

RAW
    ``uint(len V)`` followed by ``V`` verbatim.
RLE
    ``uint(len V)``; if non-empty: first bit, ``uint(runs - 1)``, then
    ``uint(r - 1)`` for every run but the last, whose length is implied.
LZ78
    ``uint(len V)``, then ``(uint(index), bit)`` tokens.  The phrase
    dictionary is primed by an LZ78 parse of ``X``.  The final token omits
    its bit when the phrase ends exactly at ``len V``.
COPYREF
    Tokens terminated by ``00``: ``1 uint(offset) uint(length - 1)`` copies
    ``X[offset:offset + length]``; ``01 uint(length - 1) bits`` is a literal
    run.  References are chosen by greedy longest match into ``X``.
BEST
    2-bit tag of the shortest concrete codec, then its payload.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Union

from .bitio import BitReader, BitWriter, CorruptCodeError, uint_len
from .bitstring import BitString

__all__ = [
    "CodecId",
    "CodeWord",
    "ComplexityEstimate",
    "CorruptCodeError",
    "CONCRETE_CODECS",
    "compress",
    "decompress",
    "code_length_bits",
    "khat",
    "codeword_to_bytes",
    "codeword_from_bytes",
]


class CodecId(enum.IntEnum):
    RAW = 0
    RLE = 1
    LZ78 = 2
    COPYREF = 3
    BEST = 4

    @classmethod
    def parse(cls, name: Union[str, "CodecId"]) -> "CodecId":
        if isinstance(name, CodecId):
            return name
        try:
            return cls[name.upper()]
        except KeyError:
            raise ValueError(f"unknown codec {name!r}; choose from {[c.name for c in cls]}") from None


CONCRETE_CODECS = (CodecId.RAW, CodecId.RLE, CodecId.LZ78, CodecId.COPYREF)
BEST_TAG_BITS = 2


@dataclass(frozen=True)
class CodeWord:
    codec: CodecId
    payload: BitString

    @property
    def bit_length(self) -> int:
        return len(self.payload)


@dataclass(frozen=True)
class ComplexityEstimate:
    """Minimum code length over the concrete codecs.

    This is an *upper* estimate of conditional Kolmogorov complexity up to
    an unmodelled machine constant, never a certified lower bound.
    """

    bits: int
    winning_codec: CodecId
    semantics: str = "upper-estimate-of-K"


# --- RAW ---------------------------------------------------------------------

def _raw_encode(v: str, x: str, out: BitWriter) -> None:
    out.uint(len(v))
    out.bits(v)


def _raw_decode(r: BitReader, x: str) -> str:
    return r.bits(r.uint())


# --- RLE ---------------------------------------------------------------------

def _runs(v: str) -> list[int]:
    runs = []
    i = 0
    while i < len(v):
        j = i + 1
        while j < len(v) and v[j] == v[i]:
            j += 1
        runs.append(j - i)
        i = j
    return runs


def _rle_encode(v: str, x: str, out: BitWriter) -> None:
    out.uint(len(v))
    if not v:
        return
    runs = _runs(v)
    out.bits(v[0])
    out.uint(len(runs) - 1)
    for r in runs[:-1]:
        out.uint(r - 1)


def _rle_length(v: str) -> int:
    n = uint_len(len(v))
    if not v:
        return n
    runs = _runs(v)
    return n + 1 + uint_len(len(runs) - 1) + sum(uint_len(r - 1) for r in runs[:-1])


def _rle_decode(r: BitReader, x: str) -> str:
    length = r.uint()
    if length == 0:
        return ""
    bit = r.bits(1)
    n_runs = r.uint() + 1
    parts = []
    used = 0
    for _ in range(n_runs - 1):
        run = r.uint() + 1
        used += run
        if used >= length:
            raise CorruptCodeError("run lengths exceed the declared length")
        parts.append(bit * run)
        bit = "1" if bit == "0" else "0"
    parts.append(bit * (length - used))
    return "".join(parts)


# --- LZ78 --------------------------------------------------------------------

def _lz78_prime(x: str) -> tuple[dict[tuple[int, str], int], list[str]]:
    """Trie edges and phrase list after an LZ78 parse of ``x``.

    Index 0 is the empty phrase.  A trailing partial phrase of ``x`` adds
    no entry.
    """
    trie: dict[tuple[int, str], int] = {}
    phrases = [""]
    node = 0
    for c in x:
        nxt = trie.get((node, c))
        if nxt is None:
            trie[(node, c)] = len(phrases)
            phrases.append(phrases[node] + c)
            node = 0
        else:
            node = nxt
    return trie, phrases


def _lz78_encode(v: str, x: str, out: BitWriter) -> None:
    trie, phrases = _lz78_prime(x)
    size = len(phrases)
    out.uint(len(v))
    node = 0
    for c in v:
        nxt = trie.get((node, c))
        if nxt is None:
            out.uint(node)
            out.bits(c)
            trie[(node, c)] = size
            size += 1
            node = 0
        else:
            node = nxt
    if node:
        out.uint(node)


def _lz78_decode(r: BitReader, x: str) -> str:
    _, phrases = _lz78_prime(x)
    length = r.uint()
    parts = []
    got = 0
    while got < length:
        idx = r.uint()
        if idx >= len(phrases):
            raise CorruptCodeError(f"dangling dictionary index {idx} (size {len(phrases)})")
        phrase = phrases[idx]
        if got + len(phrase) == length and idx:
            parts.append(phrase)
            got = length
            break
        if got + len(phrase) >= length:
            raise CorruptCodeError("phrase overruns the declared length")
        c = r.bits(1)
        phrase = phrase + c
        phrases.append(phrase)
        parts.append(phrase)
        got += len(phrase)
    return "".join(parts)


# --- COPYREF -----------------------------------------------------------------

def _longest_match(x: str, v: str, pos: int) -> tuple[int, int]:
    """Longest prefix of ``v[pos:]`` occurring in ``x``: ``(length, first offset)``."""
    if not x:
        return 0, 0
    limit = len(v) - pos
    best, off = 0, 0
    k = 1
    while k <= limit:
        o = x.find(v[pos:pos + k], off)
        if o < 0:
            break
        best, off = k, o
        k *= 2
    hi = min(k, limit + 1)
    while hi - best > 1:
        mid = (best + hi) // 2
        o = x.find(v[pos:pos + mid], off)
        if o >= 0:
            best, off = mid, o
        else:
            hi = mid
    return best, off


def _copyref_encode(v: str, x: str, out: BitWriter) -> None:
    pending_start = None
    pos = 0

    def flush(end: int) -> None:
        nonlocal pending_start
        if pending_start is not None:
            out.bits("01")
            out.uint(end - pending_start - 1)
            out.bits(v[pending_start:end])
            pending_start = None

    while pos < len(v):
        m, off = _longest_match(x, v, pos)
        if pending_start is None:
            as_literal = 2 + uint_len(m - 1) + m
        else:
            run = pos - pending_start
            as_literal = m + uint_len(run + m - 1) - uint_len(run - 1)
        if m and 1 + uint_len(off) + uint_len(m - 1) <= as_literal:
            flush(pos)
            out.bits("1")
            out.uint(off)
            out.uint(m - 1)
            pos += m
        else:
            if pending_start is None:
                pending_start = pos
            pos += 1
    flush(pos)
    out.bits("00")


def _copyref_decode(r: BitReader, x: str) -> str:
    parts = []
    while True:
        if r.bit():
            off = r.uint()
            length = r.uint() + 1
            if off + length > len(x):
                raise CorruptCodeError(
                    f"dangling reference [{off}, {off + length}) into catalyst of length {len(x)}"
                )
            parts.append(x[off:off + length])
        elif r.bit():
            parts.append(r.bits(r.uint() + 1))
        else:
            return "".join(parts)


# --- dispatch ----------------------------------------------------------------

_ENCODERS = {
    CodecId.RAW: _raw_encode,
    CodecId.RLE: _rle_encode,
    CodecId.LZ78: _lz78_encode,
    CodecId.COPYREF: _copyref_encode,
}
_DECODERS = {
    CodecId.RAW: _raw_decode,
    CodecId.RLE: _rle_decode,
    CodecId.LZ78: _lz78_decode,
    CodecId.COPYREF: _copyref_decode,
}


def _encode_concrete(codec: CodecId, v: str, x: str) -> str:
    out = BitWriter()
    _ENCODERS[codec](v, x, out)
    return out.getvalue()


def _best_choice(v: str, x: str) -> tuple[CodecId, str]:
    # Ties resolve to the lowest codec id.
    candidates = [(c, _encode_concrete(c, v, x)) for c in CONCRETE_CODECS]
    return min(candidates, key=lambda item: (len(item[1]), item[0]))


def compress(codec: Union[CodecId, str], v: BitString, x: BitString = BitString()) -> CodeWord:
    codec = CodecId.parse(codec)
    vs, xs = str(v), str(x)
    if codec is CodecId.BEST:
        winner, body = _best_choice(vs, xs)
        payload = format(int(winner), f"0{BEST_TAG_BITS}b") + body
    else:
        payload = _encode_concrete(codec, vs, xs)
    return CodeWord(codec, BitString(payload))


def decompress(
    codec: Union[CodecId, str],
    code: Union[CodeWord, BitString, str],
    x: BitString = BitString(),
) -> BitString:
    """Invert :func:`compress`.  Bits after the payload are ignored."""
    codec = CodecId.parse(codec)
    if isinstance(code, CodeWord):
        if code.codec is not codec:
            raise CorruptCodeError(f"code word is {code.codec.name}, not {codec.name}")
        code = code.payload
    r = BitReader(str(code))
    xs = str(x)
    if codec is CodecId.BEST:
        codec = CodecId(int(r.bits(BEST_TAG_BITS), 2))
    return BitString(_DECODERS[codec](r, xs))


def code_length_bits(codec: Union[CodecId, str], v: BitString, x: BitString = BitString()) -> int:
    codec = CodecId.parse(codec)
    vs = str(v)
    if codec is CodecId.RAW:
        return uint_len(len(vs)) + len(vs)
    if codec is CodecId.RLE:
        return _rle_length(vs)
    if codec is CodecId.BEST:
        return BEST_TAG_BITS + min(code_length_bits(c, v, x) for c in CONCRETE_CODECS)
    return len(_encode_concrete(codec, vs, str(x)))


def khat(v: BitString, x: BitString = BitString()) -> ComplexityEstimate:
    """Computable upper estimate of the complexity of ``v`` given ``x``."""
    lengths = [(code_length_bits(c, v, x), c) for c in CONCRETE_CODECS]
    bits, winner = min(lengths)
    return ComplexityEstimate(bits, winner)


# --- byte serialization ------------------------------------------------------

def codeword_to_bytes(code: CodeWord) -> bytes:
    """Codec id byte, ``uint(bit_length)``, payload, zero padding (MSB first)."""
    w = BitWriter()
    w.uint(code.bit_length)
    w.bits(str(code.payload))
    return bytes([int(code.codec)]) + BitString(w.getvalue()).to_bytes()


def codeword_from_bytes(data: bytes) -> CodeWord:
    if not data:
        raise CorruptCodeError("empty code word serialization")
    try:
        codec = CodecId(data[0])
    except ValueError:
        raise CorruptCodeError(f"unknown codec id byte {data[0]}") from None
    r = BitReader(str(BitString.from_bytes(data[1:])))
    n = r.uint()
    return CodeWord(codec, BitString(r.bits(n)))
