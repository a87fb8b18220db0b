"""Energy accounting for erasure and computation with side information.

Bit counts are exact integers; joules are ``bits * k * T * ln 2`` rounded
once to the nearest double.  Lower bounds that would require true
Kolmogorov complexity are never certified: the computable floor is 0 and
the compressor estimate rides along as an annotation.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence, Union

from .bitio import uint_len
from .bitstring import BitString
from .codec import CodecId, ComplexityEstimate, code_length_bits, khat

BOLTZMANN_CODATA_2018 = 1.380649e-23
DEFAULT_TEMPERATURE = 300.0
DEFAULT_SLACK_BITS = 64

_LN2 = Fraction(math.log(2))

HEURISTIC_NOTE = (
    "heuristic diagnostic: compressor lengths only upper-estimate complexity, "
    "so a flag is not a violation of reversibility"
)


@dataclass(frozen=True)
class PhysicalParams:
    boltzmann_k: float = BOLTZMANN_CODATA_2018
    temperature: float = DEFAULT_TEMPERATURE

    def __post_init__(self):
        if not self.temperature > 0:
            raise ValueError(f"temperature must be > 0 K, got {self.temperature}")
        if not self.boltzmann_k > 0:
            raise ValueError(f"boltzmann_k must be > 0, got {self.boltzmann_k}")


def bits_to_joules(bits: int, p: PhysicalParams) -> float:
    """``bits * k * T * ln 2`` with a single final rounding."""
    return float(bits * Fraction(p.boltzmann_k) * Fraction(p.temperature) * _LN2)


def landauer_naive(n_bits: int, p: PhysicalParams = PhysicalParams()) -> float:
    if n_bits < 0:
        raise ValueError(f"bit count must be >= 0, got {n_bits}")
    return bits_to_joules(n_bits, p)


@dataclass(frozen=True)
class CostBracket:
    lower_bits: int
    upper_bits: int
    lower_joules: float
    upper_joules: float
    params: PhysicalParams
    s_len: int
    x_len: int
    codec: CodecId
    khat: ComplexityEstimate
    annotations: dict = field(default_factory=dict)

    def to_record(self) -> dict:
        return {
            "s_len": self.s_len,
            "x_len": self.x_len,
            "codec": self.codec.name,
            "upper_bits": self.upper_bits,
            "lower_bits": self.lower_bits,
            "khat_bits": self.khat.bits,
            "khat_codec": self.khat.winning_codec.name,
            "temperature": self.params.temperature,
            "upper_joules": self.upper_joules,
            "lower_joules": self.lower_joules,
        }


def erasure_cost(
    s: BitString,
    x: BitString = BitString(),
    codec: Union[CodecId, str] = CodecId.BEST,
    p: PhysicalParams = PhysicalParams(),
) -> CostBracket:
    """Bracket the cost of erasing ``s`` while catalyst ``x`` is kept intact.

    The upper bound is achieved by compressing reversibly and erasing the
    code; the lower bound is the computable floor 0.
    """
    codec = CodecId.parse(codec)
    upper = code_length_bits(codec, s, x)
    est = khat(s, x)
    return CostBracket(
        lower_bits=0,
        upper_bits=upper,
        lower_joules=0.0,
        upper_joules=bits_to_joules(upper, p),
        params=p,
        s_len=len(s),
        x_len=len(x),
        codec=codec,
        khat=est,
        annotations={
            "upper": f"code length under {codec.name}",
            "lower": "computable floor; true bound needs uncomputable complexity",
            "khat": f"estimate ({est.semantics}) via {est.winning_codec.name}",
        },
    )


@dataclass(frozen=True)
class ComputationCost:
    """Estimated lower bound on the cost of turning ``A`` into ``B`` given ``X``.

    ``raw_bits`` may be negative; a negative value reads as work that could
    be extracted by letting the low-complexity input randomize.
    """

    raw_bits: int
    clamped_bits: int
    raw_joules: float
    estimate_joules: float
    khat_a: ComplexityEstimate
    b_code_bits: int
    codec: CodecId
    params: PhysicalParams
    semantics: str = "estimate"

    def to_record(self) -> dict:
        return {
            "khat_a_bits": self.khat_a.bits,
            "khat_a_codec": self.khat_a.winning_codec.name,
            "b_code_bits": self.b_code_bits,
            "codec": self.codec.name,
            "raw_bits": self.raw_bits,
            "clamped_bits": self.clamped_bits,
            "temperature": self.params.temperature,
            "raw_joules": self.raw_joules,
            "estimate_joules": self.estimate_joules,
            "semantics": self.semantics,
        }


def computation_cost_lower(
    a: BitString,
    b: BitString,
    x: BitString = BitString(),
    codec: Union[CodecId, str] = CodecId.BEST,
    p: PhysicalParams = PhysicalParams(),
) -> ComputationCost:
    codec = CodecId.parse(codec)
    ka = khat(a, x)
    lb = code_length_bits(codec, b, x)
    raw = ka.bits - lb
    clamped = max(0, raw)
    return ComputationCost(
        raw_bits=raw,
        clamped_bits=clamped,
        raw_joules=bits_to_joules(raw, p),
        estimate_joules=bits_to_joules(clamped, p),
        khat_a=ka,
        b_code_bits=lb,
        codec=codec,
        params=p,
    )


@dataclass(frozen=True)
class TraceStep:
    t: int
    bits: int
    drop: int
    allowance: int
    flagged: bool


@dataclass(frozen=True)
class QuasiMonotonicityReport:
    codec: CodecId
    slack: int
    steps: tuple[TraceStep, ...]
    note: str = HEURISTIC_NOTE

    @property
    def flagged_steps(self) -> list[int]:
        return [s.t for s in self.steps if s.flagged]

    def to_record(self) -> dict:
        return {
            "codec": self.codec.name,
            "slack": self.slack,
            "steps": [vars(s) for s in self.steps],
            "flagged_steps": self.flagged_steps,
            "note": self.note,
        }


def quasi_monotonicity_report(
    trace: Sequence[BitString],
    codec: Union[CodecId, str] = CodecId.BEST,
    slack: int = DEFAULT_SLACK_BITS,
) -> QuasiMonotonicityReport:
    """Compare each state's code length to the initial one.

    The allowance at step ``t`` is the length of the integer code for ``t``
    plus ``slack`` bits standing in for the machine constant.
    """
    if not trace:
        raise ValueError("trace must be non-empty")
    width = len(trace[0])
    if any(len(s) != width for s in trace):
        raise ValueError("all trace entries must have equal length")
    codec = CodecId.parse(codec)
    base = code_length_bits(codec, trace[0])
    steps = []
    for t, state in enumerate(trace):
        bits = base if t == 0 else code_length_bits(codec, state)
        drop = base - bits
        allowance = uint_len(t) + slack
        steps.append(TraceStep(t, bits, drop, allowance, drop > allowance))
    return QuasiMonotonicityReport(codec, slack, tuple(steps))
