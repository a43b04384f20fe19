"""Finite-universe domain model.

The learning problem lives on the universe {1, ..., u} under the uniform
data distribution with the all-ones target concept, so generalization error
is exactly computable by counting. This module provides the domain types
(hypotheses, samples, sparse distributions, voting classifiers) and the
exact loss/margin/advantage functionals everything else is built on.

Sign convention: a vote total of exactly zero predicts +1 and is therefore
correct. All public indices are 1-based; internal arrays are 0-based.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Iterator

import numpy as np

from . import bitgen

__all__ = [
    "MASS_TOL",
    "WEIGHT_TOL",
    "InvariantViolation",
    "WeakLearnerUnavailable",
    "Universe",
    "Hypothesis",
    "RandomHypothesis",
    "TailMinusHypothesis",
    "ExplicitHypothesis",
    "SampleSet",
    "SampleDistribution",
    "VotingClassifier",
    "draw_sample",
    "advantage",
    "exact_error",
    "margin",
]

# Probability mass and classifier weights must balance to these after every
# construction or renormalization.
MASS_TOL = 1e-12
WEIGHT_TOL = 1e-12


class InvariantViolation(RuntimeError):
    """A runtime-checked contract of the construction failed."""


class WeakLearnerUnavailable(RuntimeError):
    """Base for failures where a weak-learner interface cannot serve a
    qualifying hypothesis. Boosting code treats these as run failures, never
    as bugs."""


@dataclass(frozen=True)
class Universe:
    """The finite domain {1, ..., size}."""

    size: int

    def __post_init__(self) -> None:
        if self.size < 1:
            raise ValueError(f"universe size must be >= 1 (got {self.size})")


class Hypothesis:
    """A +-1 labeling of the universe.

    Concrete representations: counter-generated (RandomHypothesis),
    structural (TailMinusHypothesis), or stored (ExplicitHypothesis).
    Identity for caching and weight bookkeeping is the `key` tuple; two
    hypothesis objects with equal keys label the universe identically.
    """

    universe_size: int
    key: tuple

    def sign_at(self, index: int) -> int:
        """Sign at a 1-based index."""
        if not 1 <= index <= self.universe_size:
            raise IndexError(f"index {index} outside universe [1, {self.universe_size}]")
        return int(self.signs_at(np.asarray([index], dtype=np.int64))[0])

    def signs_at(self, indices: np.ndarray) -> np.ndarray:
        """Signs at an array of 1-based indices, as int8."""
        raise NotImplementedError

    def signs(self) -> np.ndarray:
        """The full length-u sign vector, int8. May be cached by the instance."""
        raise NotImplementedError

    def __eq__(self, other: object) -> bool:
        return isinstance(other, Hypothesis) and self.key == other.key

    def __hash__(self) -> int:
        return hash(self.key)

    def __repr__(self) -> str:
        return f"{type(self).__name__}(u={self.universe_size}, key={self.key})"


class RandomHypothesis(Hypothesis):
    """Lazy uniform random sign vector, regenerated on demand from its key.

    Full vectors are never cached on the instance: pools intern thousands of
    these, and regenerating ~u/64 words costs microseconds while a cache
    would pin megabytes per hypothesis at realistic universe sizes.
    """

    __slots__ = ("universe_size", "key", "_word_key")

    def __init__(self, universe_size: int, word_key: np.uint64, key: tuple):
        self.universe_size = universe_size
        self._word_key = np.uint64(word_key)
        self.key = key

    def signs_at(self, indices: np.ndarray) -> np.ndarray:
        return bitgen.signs_at(self._word_key, np.asarray(indices, dtype=np.int64) - 1)

    def signs(self) -> np.ndarray:
        nwords = (self.universe_size + 63) // 64
        words = bitgen.sign_words(self._word_key, np.arange(nwords, dtype=np.uint64))
        return bitgen.unpack_signs(words, self.universe_size)


class TailMinusHypothesis(Hypothesis):
    """-1 on the last `tail` points, +1 everywhere else.

    tail = r1 gives the adversary's anchor hypothesis; tail = 0 is the
    all-plus hypothesis that never errs.
    """

    __slots__ = ("universe_size", "key", "tail")

    def __init__(self, universe_size: int, tail: int):
        if not 0 <= tail <= universe_size:
            raise ValueError(f"tail length must be in [0, {universe_size}] (got {tail})")
        self.universe_size = universe_size
        self.tail = tail
        self.key = ("tail", tail)

    def signs_at(self, indices: np.ndarray) -> np.ndarray:
        idx = np.asarray(indices, dtype=np.int64)
        return np.where(idx <= self.universe_size - self.tail, 1, -1).astype(np.int8)

    def signs(self) -> np.ndarray:
        out = np.ones(self.universe_size, dtype=np.int8)
        if self.tail:
            out[self.universe_size - self.tail:] = -1
        return out


class ExplicitHypothesis(Hypothesis):
    """A stored sign vector; used for combined votes and test fixtures."""

    __slots__ = ("universe_size", "key", "_signs")

    def __init__(self, signs: np.ndarray, label: object = None):
        signs = np.asarray(signs, dtype=np.int8)
        if signs.ndim != 1:
            raise ValueError("signs must be one-dimensional")
        if not np.all(np.abs(signs) == 1):
            raise ValueError("every sign must be exactly -1 or +1")
        self.universe_size = len(signs)
        self._signs = signs
        self.key = ("explicit", label if label is not None else id(self))

    def signs_at(self, indices: np.ndarray) -> np.ndarray:
        return self._signs[np.asarray(indices, dtype=np.int64) - 1]

    def signs(self) -> np.ndarray:
        return self._signs


@dataclass(frozen=True)
class SampleSet:
    """An i.i.d. sample: the draw multiset plus its distinct-point view."""

    universe: Universe
    draws: np.ndarray  # 1-based indices, in draw order

    def __post_init__(self) -> None:
        draws = np.asarray(self.draws, dtype=np.int64)
        object.__setattr__(self, "draws", draws)
        if draws.ndim != 1 or len(draws) == 0:
            raise ValueError("draws must be a nonempty 1-d array")
        if draws.min() < 1 or draws.max() > self.universe.size:
            raise ValueError("every draw must lie in [1, u]")

    @property
    def m(self) -> int:
        return len(self.draws)

    @cached_property
    def distinct(self) -> np.ndarray:
        """Sorted distinct sampled indices."""
        return np.unique(self.draws)

    def complement_iterator(self) -> Iterator[int]:
        """Unsampled indices in ascending order, lazily."""
        prev = 0
        for s in self.distinct:
            yield from range(prev + 1, int(s))
            prev = int(s)
        yield from range(prev + 1, self.universe.size + 1)


def draw_sample(universe: Universe, m: int, seed: int) -> SampleSet:
    """m uniform draws with replacement from [1, u], deterministic in seed."""
    if m < 1:
        raise ValueError(f"sample size must be >= 1 (got {m})")
    rng = np.random.default_rng(seed)
    draws = rng.integers(1, universe.size + 1, size=m, dtype=np.int64)
    return SampleSet(universe, draws)


@dataclass(frozen=True)
class SampleDistribution:
    """Sparse distribution: strictly positive mass on sorted support indices."""

    indices: np.ndarray  # 1-based, strictly ascending
    mass: np.ndarray  # float64, aligned with indices

    def __post_init__(self) -> None:
        idx = np.asarray(self.indices, dtype=np.int64)
        mass = np.asarray(self.mass, dtype=np.float64)
        object.__setattr__(self, "indices", idx)
        object.__setattr__(self, "mass", mass)
        if idx.shape != mass.shape or idx.ndim != 1 or len(idx) == 0:
            raise ValueError("indices and mass must be aligned nonempty 1-d arrays")
        if len(idx) > 1 and not np.all(np.diff(idx) > 0):
            raise ValueError("support indices must be strictly ascending")
        if not np.all(mass > 0.0):
            raise ValueError("all stored masses must be strictly positive")
        total = float(mass.sum())
        if abs(total - 1.0) > MASS_TOL:
            raise ValueError(f"mass must sum to 1 within {MASS_TOL} (got {total!r})")

    @classmethod
    def uniform(cls, indices: np.ndarray) -> "SampleDistribution":
        idx = np.asarray(indices, dtype=np.int64)
        return cls(idx, np.full(len(idx), 1.0 / len(idx)))

    @property
    def support(self) -> np.ndarray:
        return self.indices

    def as_dict(self) -> dict[int, float]:
        return {int(i): float(p) for i, p in zip(self.indices, self.mass)}

    def mass_at_most(self, split: int) -> float:
        """Total mass on support indices <= split."""
        pos = int(np.searchsorted(self.indices, split, side="right"))
        return float(self.mass[:pos].sum())


def advantage(h: Hypothesis, dist: SampleDistribution) -> float:
    """sum_i dist(i) * h(i): the edge over random guessing under all-ones."""
    return float(np.dot(dist.mass, h.signs_at(dist.indices).astype(np.float64)))


@dataclass(frozen=True)
class VotingClassifier:
    """Convex combination of hypotheses; prediction is the sign of the vote."""

    terms: tuple[tuple[float, Hypothesis], ...]

    def __post_init__(self) -> None:
        if not self.terms:
            raise ValueError("a voting classifier needs at least one term")
        total = 0.0
        u = self.terms[0][1].universe_size
        for w, h in self.terms:
            if w < 0.0:
                raise ValueError(f"term weights must be nonnegative (got {w!r})")
            if h.universe_size != u:
                raise ValueError("all hypotheses must share one universe")
            total += float(w)
        if abs(total - 1.0) > WEIGHT_TOL:
            raise ValueError(f"weights must sum to 1 within {WEIGHT_TOL} (got {total!r})")

    @property
    def universe_size(self) -> int:
        return self.terms[0][1].universe_size

    def margins(self) -> np.ndarray:
        """Vote totals over the whole universe, accumulated in term order.

        Term order matters: per-point results are bit-identical to a naive
        per-point loop because both perform the same float64 additions in
        the same sequence.
        """
        out = np.zeros(self.universe_size, dtype=np.float64)
        for w, h in self.terms:
            out += float(w) * h.signs().astype(np.float64)
        return out

    def margins_at(self, indices: np.ndarray) -> np.ndarray:
        """Vote totals at 1-based indices, same accumulation order as margins()."""
        idx = np.asarray(indices, dtype=np.int64)
        out = np.zeros(len(idx), dtype=np.float64)
        for w, h in self.terms:
            out += float(w) * h.signs_at(idx).astype(np.float64)
        return out

    def predictions(self) -> np.ndarray:
        """+1/-1 over the universe; zero vote totals predict +1."""
        return np.where(self.margins() < 0.0, -1, 1).astype(np.int8)

    def weight_on(self, key: tuple) -> float:
        """Total weight carried by terms whose hypothesis has this key."""
        return float(sum(w for w, h in self.terms if h.key == key))


def exact_error(f: VotingClassifier, universe: Universe) -> float:
    """|{i : vote total at i < 0}| / u, computed bit-parallel per term."""
    if f.universe_size != universe.size:
        raise ValueError("classifier universe does not match")
    return float(np.count_nonzero(f.margins() < 0.0)) / universe.size


def margin(f: VotingClassifier, i: int) -> float:
    """Vote total at 1-based index i; positive iff confidently correct."""
    if not 1 <= i <= f.universe_size:
        raise IndexError(f"index {i} outside universe [1, {f.universe_size}]")
    total = 0.0
    for w, h in f.terms:
        total += float(w) * float(h.sign_at(i))
    return total
