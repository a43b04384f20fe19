"""Counter-based generation of random sign vectors.

Random hypotheses over a large universe are never stored. Each hypothesis
owns a 64-bit key derived from (master seed, stream, index), and bit j of
word w of its sign vector is a pure function of (key, w). Any slice of any
hypothesis can therefore be regenerated in O(slice) with no state, which is
what lets the lazily scanned hypothesis pools and their fully materialized
test oracles agree bit for bit.

The mixer is the splitmix64 finalizer. Its avalanche quality is plenty for
unbiased-looking sign bits; nothing here needs cryptographic strength.

Convention: bit 1 encodes sign -1, bit 0 encodes +1. Word w covers universe
points 64*w+1 .. 64*w+64 (1-based), least significant bit first.
"""

from __future__ import annotations

import numpy as np

__all__ = [
    "mix64",
    "derive_seed",
    "hyp_key",
    "sign_words",
    "unpack_signs",
    "signs_at",
    "STREAM_TRIAL",
    "STREAM_QUOTA",
    "STREAM_FALLBACK",
    "STREAM_SAMPLE",
    "STREAM_BAGS",
]

# Disjoint stream tags. Every consumer of randomness in the package hangs off
# one of these so that seeds never collide across purposes.
STREAM_TRIAL = 0
STREAM_QUOTA = 1
STREAM_FALLBACK = 2
STREAM_SAMPLE = 3
STREAM_BAGS = 4

_U64 = np.uint64
_GOLDEN = _U64(0x9E3779B97F4A7C15)
_MIX_A = _U64(0xBF58476D1CE4E5B9)
_MIX_B = _U64(0x94D049BB133111EB)
_STREAM_SALT = _U64(0xD1B54A32D192ED03)
_INDEX_SALT = _U64(0x8CB92BA72F3D8DD7)
_WORD_SALT = _GOLDEN


def mix64(x: np.ndarray | int) -> np.ndarray | np.uint64:
    """splitmix64 finalizer, vectorized; uint64 wraparound is intended."""
    x = np.asarray(x, dtype=_U64)
    with np.errstate(over="ignore"):
        x = x + _GOLDEN
        x = (x ^ (x >> _U64(30))) * _MIX_A
        x = (x ^ (x >> _U64(27))) * _MIX_B
        x = x ^ (x >> _U64(31))
    return x if x.ndim else _U64(x)


def derive_seed(seed: int, stream: int, counter: int | np.ndarray) -> int | np.ndarray:
    """Derived integer seed(s) for numpy generators and sub-trials."""
    out = hyp_key(seed, stream, counter)
    return out if isinstance(out, np.ndarray) else int(out)


def hyp_key(seed: int, stream: int, index: int | np.ndarray) -> np.uint64 | np.ndarray:
    """Key of hypothesis `index` within a stream. Vectorized over index."""
    with np.errstate(over="ignore"):
        base = mix64(_U64(seed) ^ (_U64(stream) * _STREAM_SALT))
        return mix64(base ^ (np.asarray(index, dtype=_U64) * _INDEX_SALT))


def sign_words(key: np.uint64 | np.ndarray, word_index: int | np.ndarray) -> np.ndarray | np.uint64:
    """Packed 64-bit sign words; broadcasts key against word_index."""
    with np.errstate(over="ignore"):
        return mix64(np.asarray(key, dtype=_U64) ^ (np.asarray(word_index, dtype=_U64) * _WORD_SALT))


def unpack_signs(words: np.ndarray, n: int) -> np.ndarray:
    """First n signs of a packed word array, as int8 in {-1,+1}."""
    bits = np.unpackbits(np.ascontiguousarray(words).view(np.uint8), bitorder="little")
    return (1 - 2 * bits[:n]).astype(np.int8)


def signs_at(key: np.uint64, indices0: np.ndarray) -> np.ndarray:
    """Signs at 0-based universe positions, regenerating only the touched words."""
    idx = np.asarray(indices0, dtype=np.uint64)
    words = sign_words(key, idx >> np.uint64(6))
    bits = (words >> (idx & np.uint64(63))) & np.uint64(1)
    return (1 - 2 * bits.astype(np.int8)).astype(np.int8)
