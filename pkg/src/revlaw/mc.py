"""Seeded Monte-Carlo estimates of weight-class transitions.

Trial ``i`` draws its input from Philox stream ``STREAM_INPUT`` and, for
random circuits, its Fredkin gates from ``STREAM_CIRCUIT``, both keyed by
``seed ^ i`` (see :mod:`revlaw.rng`).  Trials are evaluated in vectorized
chunks; tallies are merged by addition, so the result does not depend on
chunk size or worker count.
"""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Union

import numpy as np

from . import rng as _rng
from .bitstring import BitString
from .combin import clausius_point_ratio, clausius_tail_ratio, kelvin_ratio, loaded_sign
from .revcircuit import FREDKIN, Circuit, WeightCouple, packed_couples, run_packed
from .rng import STREAM_CIRCUIT, STREAM_INPUT, TrialStream

MAX_MC_WIDTH = 64
DEFAULT_CHUNK = 8192
SIGMA_MARGIN = 4.0

CircuitSpec = Union[int, Circuit]


class ConservationViolation(RuntimeError):
    """A trial changed the total Hamming weight of its state."""


# --- samplers ----------------------------------------------------------------

def _partial_shuffle(draws: np.ndarray, m: int, k: int) -> np.ndarray:
    """First ``k`` entries of a per-row Fisher-Yates shuffle of ``range(m)``."""
    t = draws.shape[0]
    perm = np.broadcast_to(np.arange(m, dtype=np.int64), (t, m)).copy()
    rows = np.arange(t)
    for i in range(k):
        j = i + _rng.bounded(draws[:, i], m - i).astype(np.int64)
        pi = perm[:, i].copy()
        perm[:, i] = perm[rows, j]
        perm[rows, j] = pi
    return perm[:, :k]


def _positions_to_packed(pos: np.ndarray, width: int) -> np.ndarray:
    """OR together bits at string positions ``pos`` (shape ``(T, k)``)."""
    shifts = (width - 1 - pos).astype(np.uint64)
    packed = np.zeros(pos.shape[0], dtype=np.uint64)
    for col in range(pos.shape[1]):
        packed |= np.uint64(1) << shifts[:, col]
    return packed


def _couple_inputs(keys: np.ndarray, couple: WeightCouple, stream: int) -> np.ndarray:
    n, s1, s2 = couple.half_len, couple.left_weight, couple.right_weight
    d = _rng.draws(keys, stream, s1 + s2)
    left = _partial_shuffle(d[:, :s1], n, s1)
    right = _partial_shuffle(d[:, s1:], n, s2) + n
    return _positions_to_packed(np.concatenate([left, right], axis=1), 2 * n)


def _weight_inputs(keys: np.ndarray, width: int, w: int, stream: int) -> np.ndarray:
    d = _rng.draws(keys, stream, w)
    return _positions_to_packed(_partial_shuffle(d, width, w), width)


def _fredkin_wires(keys: np.ndarray, width: int, gate_count: int, stream: int) -> np.ndarray:
    """Uniform ordered triples of distinct wires, shape ``(T, gate_count, 3)``."""
    if width < 3:
        raise ValueError(f"Fredkin circuits need width >= 3, got {width}")
    d = _rng.draws(keys, stream, gate_count)
    idx = _rng.bounded(d, width * (width - 1) * (width - 2)).astype(np.int64)
    c, rest = np.divmod(idx, (width - 1) * (width - 2))
    a, b = np.divmod(rest, width - 2)
    a = a + (a >= c)
    lo, hi = np.minimum(c, a), np.maximum(c, a)
    b = b + (b >= lo)
    b = b + (b >= hi)
    return np.stack([c, a, b], axis=-1)


def _run_fredkin_batch(x: np.ndarray, wires: np.ndarray, width: int) -> np.ndarray:
    one = np.uint64(1)
    shifts = (width - 1 - wires).astype(np.uint64)
    for g in range(wires.shape[1]):
        sc, sa, sb = shifts[:, g, 0], shifts[:, g, 1], shifts[:, g, 2]
        d = ((x >> sa) ^ (x >> sb)) & (x >> sc) & one
        x = x ^ ((d << sa) | (d << sb))
    return x


def _as_stream(state: Union[TrialStream, int]) -> TrialStream:
    return state if isinstance(state, TrialStream) else TrialStream(int(state))


def sample_couple_string(n: int, couple: WeightCouple, state: Union[TrialStream, int]) -> BitString:
    """Uniform string of length ``2n`` whose halves have the couple's weights."""
    if couple.half_len != n:
        raise ValueError(f"couple {couple} has half_len {couple.half_len}, expected {n}")
    st = _as_stream(state)
    packed = _couple_inputs(st.keys(), couple, st.stream)
    return BitString.from_int(int(packed[0]), 2 * n)


def sample_fredkin_circuit(width: int, gate_count: int, state: Union[TrialStream, int]) -> Circuit:
    if gate_count < 0:
        raise ValueError("gate_count must be >= 0")
    st = _as_stream(state)
    if isinstance(state, int):
        st = st.with_stream(STREAM_CIRCUIT)
    wires = _fredkin_wires(st.keys(), width, gate_count, st.stream)[0]
    return Circuit(width, tuple(FREDKIN(*map(int, w)) for w in wires))


# --- transition estimates ----------------------------------------------------

@dataclass(frozen=True)
class TrialConfig:
    source: WeightCouple
    circuit_spec: CircuitSpec
    trials: int
    seed: int = 0

    def __post_init__(self):
        if self.trials < 1:
            raise ValueError("trials must be >= 1")
        if not 0 <= self.seed <= _rng.MASK64:
            raise ValueError("seed must be a 64-bit unsigned integer")
        width = 2 * self.source.half_len
        _check_circuit_spec(self.circuit_spec, width)

    @property
    def half_len(self) -> int:
        return self.source.half_len

    def to_record(self) -> dict:
        return {
            "half_len": self.half_len,
            "source": list(self.source.as_tuple()),
            "circuit": _describe_spec(self.circuit_spec),
            "trials": self.trials,
            "seed": self.seed,
        }


def _check_circuit_spec(spec: CircuitSpec, width: int) -> None:
    if width > MAX_MC_WIDTH:
        raise ValueError(f"width {width} exceeds Monte-Carlo limit {MAX_MC_WIDTH}")
    if isinstance(spec, Circuit):
        if spec.width != width:
            raise ValueError(f"circuit width {spec.width} != required width {width}")
    else:
        if spec < 0:
            raise ValueError("gate_count must be >= 0")
        if spec > 0 and width < 3:
            raise ValueError(f"random Fredkin circuits need width >= 3, got {width}")


def _describe_spec(spec: CircuitSpec) -> dict:
    if isinstance(spec, Circuit):
        return {"kind": "explicit", "width": spec.width, "gates": [str(g) for g in spec.gates]}
    return {"kind": "random-fredkin", "gate_count": spec}


@dataclass(frozen=True)
class CoupleStats:
    count: int
    freq: float
    stderr: float
    point_bound: Fraction
    tail_bound: Optional[Fraction]
    within_bound: bool


@dataclass(frozen=True)
class TransitionStats:
    config: TrialConfig
    per_couple: dict

    @property
    def counts(self) -> dict[WeightCouple, int]:
        return {k: v.count for k, v in self.per_couple.items()}

    @property
    def all_within_bound(self) -> bool:
        return all(v.within_bound for v in self.per_couple.values())

    def to_record(self) -> dict:
        return {
            "config": self.config.to_record(),
            "seed": self.config.seed,
            "per_couple": {str(k): _stats_record(v) for k, v in self.per_couple.items()},
        }


def _stats_record(s: CoupleStats) -> dict:
    rec = {
        "count": s.count,
        "freq": s.freq,
        "stderr": s.stderr,
        "bound_num": s.point_bound.numerator,
        "bound_den": s.point_bound.denominator,
        "within_bound": s.within_bound,
    }
    if s.tail_bound is not None:
        rec["tail_num"] = s.tail_bound.numerator
        rec["tail_den"] = s.tail_bound.denominator
    return rec


def _freq_stats(count: int, trials: int, bound: Fraction) -> tuple[float, float, bool]:
    f = count / trials
    se = math.sqrt(f * (1.0 - f) / trials)
    return f, se, f <= float(bound) + SIGMA_MARGIN * se


def _chunks(trials: int, chunk: int) -> list[tuple[int, int]]:
    return [(lo, min(lo + chunk, trials)) for lo in range(0, trials, chunk)]


def _evolve(keys: np.ndarray, x: np.ndarray, spec: CircuitSpec, width: int) -> np.ndarray:
    if isinstance(spec, Circuit):
        y = run_packed(spec, x)
    elif spec == 0:
        y = x.copy()
    else:
        y = _run_fredkin_batch(x, _fredkin_wires(keys, width, spec, STREAM_CIRCUIT), width)
    bad = np.flatnonzero(np.bitwise_count(x) != np.bitwise_count(y))
    if bad.size:
        i = int(bad[0])
        raise ConservationViolation(
            f"weight changed: {BitString.from_int(int(x[i]), width)} -> "
            f"{BitString.from_int(int(y[i]), width)}"
        )
    return y


def _map_chunks(fn, trials: int, workers: int, chunk: int) -> list:
    spans = _chunks(trials, chunk)
    if workers <= 1 or len(spans) == 1:
        return [fn(lo, hi) for lo, hi in spans]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(lambda s: fn(*s), spans))


def transition_counts(
    config: TrialConfig, workers: int = 1, chunk: int = DEFAULT_CHUNK
) -> dict[WeightCouple, int]:
    """Raw output-couple tallies for ``config``."""
    n = config.half_len
    width = 2 * n
    side = n + 1

    def one_chunk(lo: int, hi: int) -> np.ndarray:
        keys = _rng.trial_keys(config.seed, np.arange(lo, hi, dtype=np.uint64))
        x = _couple_inputs(keys, config.source, STREAM_INPUT)
        y = _evolve(keys, x, config.circuit_spec, width)
        left, right = packed_couples(y, n)
        return np.bincount(left * side + right, minlength=side * side)

    total = sum(_map_chunks(one_chunk, config.trials, workers, chunk))
    out = {}
    for key in np.flatnonzero(total):
        a, b = divmod(int(key), side)
        out[WeightCouple(n, a, b)] = int(total[key])
    return out


def estimate_transition(
    config: TrialConfig, workers: int = 1, chunk: int = DEFAULT_CHUNK
) -> TransitionStats:
    n = config.half_len
    src = config.source
    sign = loaded_sign(src)
    per = {}
    for target, count in sorted(transition_counts(config, workers, chunk).items(),
                                key=lambda kv: kv[0].as_tuple()):
        point = clausius_point_ratio(n, src, target)
        shift = sign * (target.imbalance - src.imbalance)
        tail = clausius_tail_ratio(n, src, shift // 2) if shift >= 0 else None
        f, se, ok = _freq_stats(count, config.trials, point)
        per[target] = CoupleStats(count, f, se, point, tail, ok)
    return TransitionStats(config, per)


# --- Kelvin-style concentration ----------------------------------------------

@dataclass(frozen=True)
class KelvinStats:
    N: int
    n: int
    w: int
    circuit_spec: CircuitSpec
    trials: int
    seed: int
    count: int
    freq: float
    stderr: float
    bound: Fraction
    within_bound: bool

    def to_record(self) -> dict:
        return {
            "config": {
                "N": self.N,
                "n": self.n,
                "w": self.w,
                "circuit": _describe_spec(self.circuit_spec),
                "trials": self.trials,
                "seed": self.seed,
            },
            "seed": self.seed,
            "count": self.count,
            "freq": self.freq,
            "stderr": self.stderr,
            "bound_num": self.bound.numerator,
            "bound_den": self.bound.denominator,
            "within_bound": self.within_bound,
        }


def estimate_kelvin(
    N: int,
    n: int,
    w: int,
    circuit_spec: CircuitSpec,
    trials: int,
    seed: int = 0,
    workers: int = 1,
    chunk: int = DEFAULT_CHUNK,
) -> KelvinStats:
    """Frequency with which weight-``w`` inputs land on a ``1^n`` prefix."""
    bound = kelvin_ratio(N, n, w)
    if trials < 1:
        raise ValueError("trials must be >= 1")
    if not 0 <= seed <= _rng.MASK64:
        raise ValueError("seed must be a 64-bit unsigned integer")
    _check_circuit_spec(circuit_spec, N)
    prefix = np.uint64((1 << n) - 1)

    def one_chunk(lo: int, hi: int) -> int:
        keys = _rng.trial_keys(seed, np.arange(lo, hi, dtype=np.uint64))
        x = _weight_inputs(keys, N, w, STREAM_INPUT)
        y = _evolve(keys, x, circuit_spec, N)
        if n == 0:
            return hi - lo
        return int(np.count_nonzero((y >> np.uint64(N - n)) == prefix))

    count = sum(_map_chunks(one_chunk, trials, workers, chunk))
    f, se, ok = _freq_stats(count, trials, bound)
    return KelvinStats(N, n, w, circuit_spec, trials, seed, count, f, se, bound, ok)
