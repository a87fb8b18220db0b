"""Philox4x32-10 counter-based generator, vectorized over trials.

Every Monte-Carlo trial owns an independent stream keyed by the sub-seed
``(seed ^ trial_index) mod 2**64``.  Within a trial, draw ``k`` of stream
``s`` is the 64-bit word taken from Philox block ``k // 2`` with counter
``(k // 2, s, seed_lo, seed_hi)``; the first two output words of a block
form draw ``2m``, the last two form draw ``2m + 1`` (high word first).

The base seed sits in the counter as well as the key.  With the key alone,
seeds that differ only in bits below the trial count would produce the same
set of sub-seeds in a different order, and therefore identical aggregate
tallies.  Because a draw is a pure function of ``(seed, trial, stream, k)``,
results do not depend on how trials are batched or scheduled.
"""
from __future__ import annotations

import numpy as np

MASK32 = 0xFFFFFFFF
MASK64 = 0xFFFFFFFFFFFFFFFF

_M0 = np.uint64(0xD2511F53)
_M1 = np.uint64(0xCD9E8D57)
_W0 = np.uint64(0x9E3779B9)
_W1 = np.uint64(0xBB67AE85)
_LO = np.uint64(MASK32)
_S32 = np.uint64(32)

# Stream ids consumed by the samplers in ``mc``.
STREAM_INPUT = 0
STREAM_CIRCUIT = 1


def philox4x32(counter: np.ndarray, key: np.ndarray, rounds: int = 10) -> np.ndarray:
    """Apply the Philox4x32 bijection.

    ``counter`` has shape ``(..., 4)`` and ``key`` shape ``(..., 2)``; both
    hold 32-bit values (any unsigned dtype).  Returns a ``uint32`` array of
    shape ``np.broadcast_shapes(counter.shape, key.shape[:-1] + (4,))``.
    """
    counter = np.asarray(counter, dtype=np.uint64)
    key = np.asarray(key, dtype=np.uint64)
    c0, c1, c2, c3 = (counter[..., i] for i in range(4))
    k0, k1 = key[..., 0], key[..., 1]
    for r in range(rounds):
        if r:
            k0 = (k0 + _W0) & _LO
            k1 = (k1 + _W1) & _LO
        p0 = _M0 * c0
        p1 = _M1 * c2
        c0, c1, c2, c3 = (
            (p1 >> _S32) ^ c1 ^ k0,
            p1 & _LO,
            (p0 >> _S32) ^ c3 ^ k1,
            p0 & _LO,
        )
    return np.stack(np.broadcast_arrays(c0, c1, c2, c3), axis=-1).astype(np.uint32)


def trial_keys(seed: int, trials: np.ndarray) -> np.ndarray:
    """Per-trial key material of shape ``(T, 4)``.

    Columns 0-1 are the Philox key words of ``seed ^ trial`` (low word
    first); columns 2-3 are the low and high words of ``seed``, used as
    the upper counter words.
    """
    if not 0 <= seed <= MASK64:
        raise ValueError(f"seed must be a 64-bit unsigned integer, got {seed}")
    sub = np.uint64(seed) ^ np.asarray(trials, dtype=np.uint64)
    base = np.broadcast_to(np.uint64(seed), sub.shape)
    return np.stack([sub & _LO, sub >> _S32, base & _LO, base >> _S32], axis=-1)


def draws(keys: np.ndarray, stream: int, count: int) -> np.ndarray:
    """First ``count`` 64-bit draws of ``stream``; shape ``(T, count)``.

    ``keys`` is the ``(T, 4)`` output of :func:`trial_keys`.
    """
    keys = np.asarray(keys, dtype=np.uint64)
    n_trials = keys.shape[0]
    if count == 0:
        return np.zeros((n_trials, 0), dtype=np.uint64)
    blocks = (count + 1) // 2
    ctr = np.zeros((n_trials, blocks, 4), dtype=np.uint64)
    ctr[:, :, 0] = np.arange(blocks, dtype=np.uint64)
    ctr[:, :, 1] = stream
    ctr[:, :, 2:] = keys[:, None, 2:]
    words = philox4x32(ctr, keys[:, None, :2]).astype(np.uint64)
    pairs = words.reshape(n_trials, blocks * 2, 2)
    out = (pairs[..., 0] << _S32) | pairs[..., 1]
    return out[:, :count]


def bounded(u64: np.ndarray, m) -> np.ndarray:
    """Map 64-bit draws to ``[0, m)`` by multiply-high; ``1 <= m < 2**32``.

    The bias per value is below ``m / 2**64``.
    """
    m = np.asarray(m, dtype=np.uint64)
    if np.any(m < 1) or np.any(m > MASK32):
        raise ValueError("bound must lie in [1, 2**32)")
    hi = u64 >> _S32
    lo = u64 & _LO
    return (hi * m + ((lo * m) >> _S32)) >> _S32


class TrialStream:
    """Random state of a single trial: one Philox key plus a stream id.

    The samplers in ``mc`` accept this as their rng state; the batched code
    paths use the same draw layout, so a scalar call reproduces the
    corresponding row of a batched run exactly.
    """

    __slots__ = ("seed", "trial", "stream")

    def __init__(self, seed: int, trial: int = 0, stream: int = STREAM_INPUT):
        self.seed = seed
        self.trial = trial
        self.stream = stream

    def keys(self) -> np.ndarray:
        return trial_keys(self.seed, np.array([self.trial]))

    def draws(self, count: int) -> np.ndarray:
        return draws(self.keys(), self.stream, count)[0]

    def with_stream(self, stream: int) -> TrialStream:
        return TrialStream(self.seed, self.trial, stream)

    def __repr__(self) -> str:
        return f"TrialStream(seed={self.seed}, trial={self.trial}, stream={self.stream})"
