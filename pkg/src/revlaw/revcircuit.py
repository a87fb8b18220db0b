"""Reversible circuits over NOT, CNOT, Toffoli and Fredkin gates.

All gates are self-inverse permutations of ``{0,1}^width``; a circuit is
their sequential composition.  States are handled as packed integers
internally (see :mod:`revlaw.bitstring` for the bit order), and the
exhaustive checks evaluate every input at once as a ``uint64`` array.

Circuit text format::

    # comment
    bits 3
    TOF 0 1 2
    FRED 0 1 2
"""
from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .bitstring import BitString

DEFAULT_MAX_WIDTH = 20


class CircuitError(ValueError):
    """Invalid gate or circuit construction."""


class CircuitParseError(CircuitError):
    def __init__(self, message: str, line: int):
        super().__init__(f"line {line}: {message}")
        self.line = line


class EnumerationBoundError(ValueError):
    """Exhaustive enumeration requested above the configured width cap."""


class GateKind(enum.Enum):
    NOT = "NOT"
    CNOT = "CNOT"
    TOFFOLI = "TOF"
    FREDKIN = "FRED"

    @property
    def arity(self) -> int:
        return _ARITY[self]


_ARITY = {GateKind.NOT: 1, GateKind.CNOT: 2, GateKind.TOFFOLI: 3, GateKind.FREDKIN: 3}
_MNEMONICS = {k.value: k for k in GateKind}


@dataclass(frozen=True)
class Gate:
    """A gate on explicit wires, controls first.

    FREDKIN wires are ``(control, a, b)``: ``a`` and ``b`` are swapped when
    the control is 1.
    """

    kind: GateKind
    wires: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "wires", tuple(int(w) for w in self.wires))
        if len(self.wires) != self.kind.arity:
            raise CircuitError(
                f"{self.kind.name} takes {self.kind.arity} wires, got {len(self.wires)}"
            )
        if any(w < 0 for w in self.wires):
            raise CircuitError(f"negative wire index in {self.wires}")
        if len(set(self.wires)) != len(self.wires):
            raise CircuitError(f"duplicate wire within gate {self.kind.name}{self.wires}")

    def __str__(self) -> str:
        return " ".join([self.kind.value, *map(str, self.wires)])


def NOT(t: int) -> Gate:
    return Gate(GateKind.NOT, (t,))


def CNOT(c: int, t: int) -> Gate:
    return Gate(GateKind.CNOT, (c, t))


def TOFFOLI(c1: int, c2: int, t: int) -> Gate:
    return Gate(GateKind.TOFFOLI, (c1, c2, t))


def FREDKIN(c: int, a: int, b: int) -> Gate:
    return Gate(GateKind.FREDKIN, (c, a, b))


@dataclass(frozen=True)
class Circuit:
    width: int
    gates: tuple[Gate, ...] = field(default=())

    def __post_init__(self):
        object.__setattr__(self, "gates", tuple(self.gates))
        if self.width < 0:
            raise CircuitError("width must be non-negative")
        for g in self.gates:
            for w in g.wires:
                if w >= self.width:
                    raise CircuitError(f"wire {w} out of range for width {self.width}")

    def __len__(self) -> int:
        return len(self.gates)

    def is_all_fredkin(self) -> bool:
        return all(g.kind is GateKind.FREDKIN for g in self.gates)


@dataclass(frozen=True)
class WeightCouple:
    """Hamming weights of the two halves of a ``2 * half_len`` bit string."""

    half_len: int
    left_weight: int
    right_weight: int

    def __post_init__(self):
        n = self.half_len
        if n < 0:
            raise ValueError("half_len must be non-negative")
        if not (0 <= self.left_weight <= n and 0 <= self.right_weight <= n):
            raise ValueError(
                f"couple ({self.left_weight},{self.right_weight}) out of range for n={n}"
            )

    @property
    def total(self) -> int:
        return self.left_weight + self.right_weight

    @property
    def imbalance(self) -> int:
        return self.left_weight - self.right_weight

    def as_tuple(self) -> tuple[int, int]:
        return (self.left_weight, self.right_weight)

    def __str__(self) -> str:
        return f"{self.left_weight},{self.right_weight}"


# --- text format -----------------------------------------------------------

def parse_circuit(text: str) -> Circuit:
    width: Optional[int] = None
    gates: list[Gate] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        tokens = line.split()
        head, args = tokens[0], tokens[1:]
        if width is None:
            if head != "bits" or len(args) != 1:
                raise CircuitParseError("expected header 'bits <n>'", lineno)
            width = _parse_index(args[0], lineno)
            continue
        kind = _MNEMONICS.get(head)
        if kind is None:
            raise CircuitParseError(f"unknown gate {head!r}", lineno)
        if len(args) != kind.arity:
            raise CircuitParseError(
                f"{head} takes {kind.arity} wires, got {len(args)}", lineno
            )
        wires = tuple(_parse_index(a, lineno) for a in args)
        for w in wires:
            if w >= width:
                raise CircuitParseError(f"wire {w} out of range for bits {width}", lineno)
        if len(set(wires)) != len(wires):
            raise CircuitParseError(f"duplicate wire in {line!r}", lineno)
        gates.append(Gate(kind, wires))
    if width is None:
        raise CircuitParseError("missing header 'bits <n>'", max(1, len(text.splitlines())))
    return Circuit(width, tuple(gates))


def _parse_index(tok: str, lineno: int) -> int:
    if not tok.isdigit():
        raise CircuitParseError(f"expected a non-negative integer, got {tok!r}", lineno)
    return int(tok)


def format_circuit(c: Circuit) -> str:
    return "\n".join([f"bits {c.width}", *map(str, c.gates)]) + "\n"


# --- execution --------------------------------------------------------------

def _apply_packed(x, g: Gate, width: int):
    """Apply ``g`` to packed state(s); works on ints and uint64 arrays alike."""
    one = 1 if isinstance(x, int) else np.uint64(1)
    s = [width - 1 - w for w in g.wires]
    if not isinstance(x, int):
        s = [np.uint64(v) for v in s]
    kind = g.kind
    if kind is GateKind.NOT:
        return x ^ (one << s[0])
    if kind is GateKind.CNOT:
        return x ^ (((x >> s[0]) & one) << s[1])
    if kind is GateKind.TOFFOLI:
        return x ^ (((x >> s[0]) & (x >> s[1]) & one) << s[2])
    d = ((x >> s[1]) ^ (x >> s[2])) & (x >> s[0]) & one
    return x ^ ((d << s[1]) | (d << s[2]))


def apply_gate(state: BitString, g: Gate) -> BitString:
    width = len(state)
    if max(g.wires) >= width:
        raise CircuitError(f"gate {g} does not fit a {width}-bit state")
    return BitString.from_int(_apply_packed(state.to_int(), g, width), width)


def _check_input(c: Circuit, x: BitString) -> None:
    if len(x) != c.width:
        raise CircuitError(f"width mismatch: circuit has {c.width} wires, input has {len(x)} bits")


def run(c: Circuit, x: BitString) -> BitString:
    _check_input(c, x)
    v = x.to_int()
    for g in c.gates:
        v = _apply_packed(v, g, c.width)
    return BitString.from_int(v, c.width)


def run_trace(c: Circuit, x: BitString) -> list[BitString]:
    _check_input(c, x)
    v = x.to_int()
    states = [x]
    for g in c.gates:
        v = _apply_packed(v, g, c.width)
        states.append(BitString.from_int(v, c.width))
    return states


def run_packed(c: Circuit, states: np.ndarray) -> np.ndarray:
    """Run ``c`` on an array of packed states (``uint64``); width must be <= 64."""
    if c.width > 64:
        raise CircuitError("packed execution supports at most 64 wires")
    x = np.asarray(states, dtype=np.uint64)
    for g in c.gates:
        x = _apply_packed(x, g, c.width)
    return x


def invert(c: Circuit) -> Circuit:
    return Circuit(c.width, tuple(reversed(c.gates)))


# --- exhaustive verification ------------------------------------------------

@dataclass(frozen=True)
class BijectivityVerdict:
    passed: bool
    fixed_points: Optional[int] = None
    # Two distinct inputs with the same image, when the check fails.
    counterexample: Optional[tuple[BitString, BitString]] = None


@dataclass(frozen=True)
class ConservativityVerdict:
    passed: bool
    mode: str
    # (input, output) with differing Hamming weight; exhaustive mode only.
    counterexample: Optional[tuple[BitString, BitString]] = None


def _all_inputs(c: Circuit, max_width: int) -> np.ndarray:
    if c.width > max_width:
        raise EnumerationBoundError(
            f"width {c.width} exceeds the enumeration bound {max_width}"
        )
    return np.arange(1 << c.width, dtype=np.uint64)


def check_bijective(c: Circuit, max_width: int = DEFAULT_MAX_WIDTH) -> BijectivityVerdict:
    xs = _all_inputs(c, max_width)
    ys = run_packed(c, xs)
    hits = np.bincount(ys.astype(np.int64), minlength=xs.size)
    if np.all(hits == 1):
        return BijectivityVerdict(True, fixed_points=int(np.count_nonzero(ys == xs)))
    target = int(np.flatnonzero(hits > 1)[0])
    a, b = np.flatnonzero(ys == np.uint64(target))[:2]
    return BijectivityVerdict(
        False,
        counterexample=(BitString.from_int(int(a), c.width), BitString.from_int(int(b), c.width)),
    )


def check_conservative(
    c: Circuit, mode: str = "exhaustive", max_width: int = DEFAULT_MAX_WIDTH
) -> ConservativityVerdict:
    """Weight preservation.  ``structural`` is sufficient only; ``exhaustive`` decides."""
    if mode == "structural":
        return ConservativityVerdict(c.is_all_fredkin(), mode)
    if mode != "exhaustive":
        raise ValueError(f"unknown mode {mode!r}")
    xs = _all_inputs(c, max_width)
    ys = run_packed(c, xs)
    bad = np.flatnonzero(np.bitwise_count(xs) != np.bitwise_count(ys))
    if bad.size == 0:
        return ConservativityVerdict(True, mode)
    i = int(bad[0])
    return ConservativityVerdict(
        False,
        mode,
        counterexample=(BitString.from_int(i, c.width), BitString.from_int(int(ys[i]), c.width)),
    )


def weight_couple(s: BitString) -> WeightCouple:
    if len(s) % 2:
        raise ValueError(f"weight couple needs an even length, got {len(s)}")
    n = len(s) // 2
    return WeightCouple(n, s[:n].weight(), s[n:].weight())


def packed_couples(states: np.ndarray, half_len: int) -> tuple[np.ndarray, np.ndarray]:
    """Left and right half weights of packed ``2 * half_len`` bit states."""
    states = np.asarray(states, dtype=np.uint64)
    low = np.uint64((1 << half_len) - 1)
    left = np.bitwise_count(states >> np.uint64(half_len))
    right = np.bitwise_count(states & low)
    return left.astype(np.int64), right.astype(np.int64)

