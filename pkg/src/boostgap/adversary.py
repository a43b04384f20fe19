"""The adversarial weak learner.

Given a sample over a sized universe, the adversary answers every boosting
query with a hypothesis of advantage >= 2*gamma while steering the final
vote: a structural anchor hypothesis soaks up queries whose mass sits on
the first part of the universe, and a quota-constrained scan of a random
pool plants coordinated -1 votes on the first r unsampled first-part
points. A benign fallback pool (same distribution, no quota) answers
whatever remains and doubles as the control condition.

Hypothesis pools are never materialized: each pool is k blocks of
per_block_budget counter-generated hypotheses (the anchor is logically
index 0 of every block), scanned in deterministic (block, index) order.
The scan engine keeps per-support panels of candidate sign rows in float32
(+-1 is exact in float32) and screens advantages with a slack much larger
than the float32 matvec error before confirming in float64, so lazy scans
select exactly the hypothesis an exhaustive materialized scan would.
"""

from __future__ import annotations

import math
from collections import OrderedDict
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from . import bitgen
from .core import (
    Hypothesis,
    InvariantViolation,
    RandomHypothesis,
    SampleDistribution,
    SampleSet,
    TailMinusHypothesis,
    Universe,
    VotingClassifier,
    WeakLearnerUnavailable,
    advantage,
)

__all__ = [
    "AdversaryExhausted",
    "CalibrationConstants",
    "AdversaryParams",
    "PlantedBlock",
    "planted_block",
    "HypothesisSets",
    "quota_select",
    "fallback_select",
    "weak_learn",
    "AdversarialWeakLearner",
    "Certificate",
    "CertifierFailure",
    "certify_majority",
]

# float32 screening slack for the panel matvec; the observed float32 error is
# around 2e-6, so candidates are never screened out, only double-checked.
_SCREEN_SLACK = 1e-3
# heavy-mass columns used by the partial screen when the distribution has
# concentrated enough for the remaining mass to bound the advantage
_SCREEN_COLUMNS = 2048
# exact-arithmetic tolerance for the weak-learner contract
_CONTRACT_TOL = 1e-12
# relative tolerance for the certifier's potential identity
_POTENTIAL_TOL = 1e-9


class AdversaryExhausted(WeakLearnerUnavailable):
    """Neither selector could serve a qualifying hypothesis.

    The construction must never mask this (substituting the all-plus
    hypothesis would destroy it), so the query fails loudly and the caller
    marks the trial invalid.
    """

    def __init__(self, message: str = "no qualifying hypothesis in either pool"):
        super().__init__(message)


@dataclass(frozen=True)
class CalibrationConstants:
    """Stand-ins for the construction's unspecified universal constants."""

    c0: float = 1.0
    c1: float = 1.0
    c2: float = 1.0
    c3: float = 1.0
    mc1: float = 1.0
    mc2: float = 1.0
    mc3: float = 1.0

    def __post_init__(self) -> None:
        for name in ("c0", "c1", "mc1", "mc2"):
            v = getattr(self, name)
            if not 0.0 < v <= 1.0:
                raise ValueError(f"constant {name} must be in (0, 1] (got {v})")
        for name in ("c2", "c3", "mc3"):
            v = getattr(self, name)
            if v < 1.0:
                raise ValueError(f"constant {name} must be >= 1 (got {v})")


@dataclass(frozen=True)
class AdversaryParams:
    """All derived quantities of the construction for one (gamma, d, m, alpha).

    Use AdversaryParams.derive() rather than the raw constructor; it applies
    the ceiling-rounded formulas. minus_quota is capped at r: the raw formula
    exceeds r exactly when alpha*gamma_prime > 1, i.e. only outside the
    regime flagged by lemma_regime_ok, and an unsatisfiable quota would
    silently disable the planting branch.
    """

    gamma: float
    d: int
    m: int
    alpha: float
    gamma_prime: float
    r: int
    r1: int
    universe_size: int
    k: int
    minus_quota: int
    per_block_budget: int
    select_threshold: float
    switch_threshold: float
    delta: float
    constants: CalibrationConstants
    lemma_regime_ok: bool

    @classmethod
    def derive(
        cls,
        gamma: float,
        d: int,
        m: int,
        alpha: float = 2.0,
        constants: CalibrationConstants | None = None,
        per_block_budget: int = 4096,
        select_threshold: float | None = None,
        switch_threshold: float | None = None,
    ) -> "AdversaryParams":
        constants = constants or CalibrationConstants()
        if not 0.0 < gamma <= 0.25:
            raise ValueError(f"gamma must satisfy 0 < gamma <= 1/4 (got {gamma})")
        if d < math.log(1.0 / gamma):
            raise ValueError(
                f"d must satisfy d >= ln(1/gamma) = {math.log(1.0 / gamma):.4f} (got {d})"
            )
        gamma_prime = 8.0 * gamma
        r = math.ceil(d / gamma_prime**2)
        if m < 4 * r:
            raise ValueError(f"m must satisfy m >= 4*ceil(d/(8*gamma)^2) = {4 * r} (got {m})")
        r1 = math.ceil(alpha**2 * r)
        u = math.ceil(8.0 * alpha**2 * m / math.log(m / r))
        k = math.ceil(math.log(u) / gamma**2)
        quota = min(r, math.ceil((0.5 + alpha * gamma_prime / 2.0) * r))
        theta = 2.0 * gamma
        return cls(
            gamma=gamma,
            d=d,
            m=m,
            alpha=alpha,
            gamma_prime=gamma_prime,
            r=r,
            r1=r1,
            universe_size=u,
            k=k,
            minus_quota=quota,
            per_block_budget=per_block_budget,
            select_threshold=theta if select_threshold is None else select_threshold,
            switch_threshold=theta if switch_threshold is None else switch_threshold,
            delta=0.25,
            constants=constants,
            lemma_regime_ok=gamma_prime * alpha <= constants.c0,
        )

    def __post_init__(self) -> None:
        if self.alpha < 1.0:
            raise ValueError(f"alpha must be >= 1 (got {self.alpha})")
        if self.m < 4 * self.r:
            raise ValueError(f"m >= 4r required (m={self.m}, r={self.r})")
        if not self.r <= self.r1 <= self.universe_size / 8:
            raise ValueError(
                f"r <= r1 <= u/8 required (r={self.r}, r1={self.r1}, u={self.universe_size})"
            )
        if self.per_block_budget < 1:
            raise ValueError("per_block_budget must be >= 1")
        if not 1 <= self.minus_quota <= self.r:
            raise ValueError(f"minus_quota must be in [1, r] (got {self.minus_quota})")
        for name in ("select_threshold", "switch_threshold"):
            v = getattr(self, name)
            if not 0.0 < v < 1.0:
                raise ValueError(f"{name} must be in (0, 1) (got {v})")

    @property
    def first_part_size(self) -> int:
        return self.universe_size - self.r1

    def universe(self) -> Universe:
        return Universe(self.universe_size)

    def default_rounds(self) -> int:
        """The zero-training-error horizon ceil(ln m / (2 gamma^2)) + 1."""
        return math.ceil(math.log(self.m) / (2.0 * self.gamma**2)) + 1

    def default_bags(self) -> int:
        """Bootstrap bag count ceil(log2(m / delta))."""
        return math.ceil(math.log2(self.m / self.delta))

    def case1_weight_threshold(self) -> float:
        """Anchor-weight level above which heavy anchor mass forces errors."""
        x = 14.0 * math.sqrt(self.constants.c3 * self.gamma**2)
        return x / (1.0 + x)


@dataclass(frozen=True)
class PlantedBlock:
    """The first r unsampled first-part points: where mistakes get planted."""

    indices: np.ndarray  # 1-based ascending, all <= u - r1, none sampled

    def __post_init__(self) -> None:
        idx = np.asarray(self.indices, dtype=np.int64)
        object.__setattr__(self, "indices", idx)
        if len(idx) == 0 or (len(idx) > 1 and not np.all(np.diff(idx) > 0)):
            raise ValueError("planted indices must be nonempty and strictly ascending")
        if int(idx[0]) < 1:
            raise ValueError("planted indices are 1-based and must be >= 1")

    def __len__(self) -> int:
        return len(self.indices)


def _planted_from_distinct(distinct: np.ndarray, params: AdversaryParams) -> PlantedBlock | None:
    limit = params.first_part_size
    r = params.r
    d1 = distinct[distinct <= limit]
    # gap sizes between consecutive sampled points, with sentinels at 0 and limit+1
    bounds = np.concatenate(([0], d1, [limit + 1]))
    gaps = np.diff(bounds) - 1
    if int(gaps.sum()) < r:
        return None
    out = np.empty(r, dtype=np.int64)
    got = 0
    for j in np.nonzero(gaps)[0]:
        lo = int(bounds[j]) + 1
        take = min(int(gaps[j]), r - got)
        out[got:got + take] = np.arange(lo, lo + take)
        got += take
        if got == r:
            break
    return PlantedBlock(out)


def planted_block(sample: SampleSet, params: AdversaryParams) -> PlantedBlock | None:
    """First r unsampled indices within the first part, or None when fewer
    than r first-part points are unsampled (the sample is too covering)."""
    if sample.universe.size != params.universe_size:
        raise ValueError("sample universe does not match params")
    return _planted_from_distinct(sample.distinct, params)


class _Block(Sequence):
    """One scan block: the anchor at index 0, then per_block_budget randoms."""

    def __init__(self, sets: "HypothesisSets", stream: int, block_index: int):
        self._sets = sets
        self._stream = stream
        self._block = block_index

    def __len__(self) -> int:
        return self._sets.params.per_block_budget + 1

    def __getitem__(self, i: int) -> Hypothesis:
        if i < 0:
            i += len(self)
        if not 0 <= i < len(self):
            raise IndexError(i)
        if i == 0:
            return self._sets.anchor
        return self._sets.random_hypothesis(
            self._stream, self._block * self._sets.params.per_block_budget + i - 1
        )


class _BlockFamily(Sequence):
    def __init__(self, sets: "HypothesisSets", stream: int):
        self._sets = sets
        self._stream = stream

    @property
    def sets(self) -> "HypothesisSets":
        return self._sets

    @property
    def stream(self) -> int:
        return self._stream

    def __len__(self) -> int:
        return self._sets.params.k

    def __getitem__(self, b: int) -> _Block:
        if b < 0:
            b += len(self)
        if not 0 <= b < len(self):
            raise IndexError(b)
        return _Block(self._sets, self._stream, b)


class HypothesisSets:
    """The two lazy pools plus the anchor, all keyed by one master seed.

    quota_blocks is the pool the planting selector scans; fallback_blocks is
    the benign pool. Blocks of the two are generated from disjoint seed
    streams. Hypothesis objects are interned so equal indices share sign
    caches, and per-support scan state is kept in a small LRU.
    """

    _SCAN_CACHE = 4  # supports kept alive; bags reuse their own within a run

    def __init__(self, master_seed: int, params: AdversaryParams):
        self.master_seed = int(master_seed)
        self.params = params
        self.anchor = TailMinusHypothesis(params.universe_size, params.r1)
        self._intern: dict[tuple, RandomHypothesis] = {}
        self._scans: OrderedDict[bytes, _SupportScan] = OrderedDict()
        self._keys: dict[int, np.ndarray] = {}

    @property
    def quota_blocks(self) -> _BlockFamily:
        return _BlockFamily(self, bitgen.STREAM_QUOTA)

    @property
    def fallback_blocks(self) -> _BlockFamily:
        return _BlockFamily(self, bitgen.STREAM_FALLBACK)

    def pool_size(self) -> int:
        """Hypotheses addressable across both pools, anchor counted once."""
        return 2 * self.params.k * self.params.per_block_budget + 1

    def random_hypothesis(self, stream: int, index: int) -> RandomHypothesis:
        total = self.params.k * self.params.per_block_budget
        if not 0 <= index < total:
            raise IndexError(f"hypothesis index {index} outside pool [0, {total})")
        key = ("quota" if stream == bitgen.STREAM_QUOTA else "fallback", index)
        h = self._intern.get(key)
        if h is None:
            word_key = bitgen.hyp_key(self.master_seed, stream, index)
            h = RandomHypothesis(self.params.universe_size, word_key, key)
            self._intern[key] = h
        return h

    def pool_keys(self, stream: int, lo: int, hi: int) -> np.ndarray:
        """Generator keys for pool hypotheses [lo, hi), cached per stream.

        Every scan context regenerates rows from these, so bags and repeated
        trials on one instance share the key computation.
        """
        cached = self._keys.get(stream)
        have = 0 if cached is None else len(cached)
        if hi > have:
            total = self.params.k * self.params.per_block_budget
            grow = min(total, max(hi, have + 16 * self.params.per_block_budget))
            fresh = bitgen.hyp_key(
                self.master_seed, stream, np.arange(have, grow, dtype=np.int64)
            )
            cached = fresh if cached is None else np.concatenate([cached, fresh])
            self._keys[stream] = cached
        return cached[lo:hi]

    def scan_for(self, support: np.ndarray) -> "_SupportScan":
        # identity fast path: boosting passes the same distinct-points array
        # every round, and hashing half a megabyte per query is measurable
        for token, scan in self._scans.items():
            if scan.support is support:
                self._scans.move_to_end(token)
                return scan
        key = np.asarray(support, dtype=np.int64).tobytes()
        scan = self._scans.get(key)
        if scan is None:
            scan = _SupportScan(self, np.asarray(support, dtype=np.int64))
            self._scans[key] = scan
            while len(self._scans) > self._SCAN_CACHE:
                self._scans.popitem(last=False)
        else:
            self._scans.move_to_end(key)
        return scan


_PANEL_BYTES = 192 << 20  # packed-row cache budget per candidate panel


class _Panel:
    """Growable candidate list with a bit-packed sign-row cache.

    Candidate ids are kept for every hypothesis ever scanned. Sign rows
    are distribution independent but big, and a boosting run makes
    hundreds of queries over one support, most of which rescan the same
    prefix; rows for the first max_stored candidates are therefore cached
    bit-packed (one bit per support point, bit 1 meaning -1) and reused
    across queries. Beyond the byte budget only ids survive and rows are
    regenerated per query, which keeps memory bounded on queries that
    have to dig arbitrarily deep for a qualifier.
    """

    def __init__(self, packed_width: int, max_stored: int) -> None:
        self.ids = np.empty(0, dtype=np.int64)
        self.count = 0
        self.cursor = 0  # next block (quota) or next hypothesis index (fallback)
        self.exhausted = False
        self.packed = np.empty((0, packed_width), dtype=np.uint8)
        self.stored = 0
        self.max_stored = max_stored

    def room(self) -> int:
        return self.max_stored - self.stored

    def append(self, ids: np.ndarray, packed_rows: np.ndarray | None) -> None:
        """Append candidates; packed_rows, when given, extend the cached
        prefix and must cover the leading portion of ids."""
        if len(ids) == 0:
            return
        need = self.count + len(ids)
        if need > len(self.ids):
            cap = max(256, 2 * len(self.ids))
            while cap < need:
                cap *= 2
            new_ids = np.empty(cap, dtype=np.int64)
            new_ids[: self.count] = self.ids[: self.count]
            self.ids = new_ids
        self.ids[self.count:need] = ids
        self.count = need
        if packed_rows is None or len(packed_rows) == 0:
            return
        grow = self.stored + len(packed_rows)
        if grow > len(self.packed):
            cap = max(256, 2 * len(self.packed))
            while cap < grow:
                cap *= 2
            cap = min(cap, self.max_stored)
            new_packed = np.empty((cap, self.packed.shape[1]), dtype=np.uint8)
            new_packed[: self.stored] = self.packed[: self.stored]
            self.packed = new_packed
        self.packed[self.stored:grow] = packed_rows
        self.stored = grow


class _SupportScan:
    """Per-support scan engine shared by the selectors and the certifier.

    Holds the support's word/bit addressing, its planted block, and lazily
    grown candidate panels for both pools. All advantage screening happens
    in float32 with _SCREEN_SLACK over sign rows taken from the packed
    panel cache (or regenerated past its budget), then candidates are
    confirmed in float64, preserving exact first-match semantics.
    """

    _ROW_CHUNK = 128  # bounds the uint64 temporary in row generation

    def __init__(self, sets: HypothesisSets, support: np.ndarray):
        self.sets = sets
        params = sets.params
        self.support = support
        sup0 = support - 1
        self._sup_bit = (sup0 & 63).astype(np.uint64)
        words = (sup0 >> 6).astype(np.uint64)
        self._usw, self._sup_winv = np.unique(words, return_inverse=True)
        self.n_first = int(np.searchsorted(support, params.first_part_size, side="right"))
        self.planted = _planted_from_distinct(support, params)
        if self.planted is not None:
            p0 = self.planted.indices - 1
            self._planted_words = (p0 >> 6).astype(np.uint64)
            self._planted_bits = (p0 & 63).astype(np.uint64)
        self._panels: dict[tuple[int, bool], _Panel] = {}
        self._packed_width = (len(support) + 7) // 8
        self._panel_rows = max(256, _PANEL_BYTES // max(1, self._packed_width))

    def panel(self, stream: int, use_quota: bool) -> _Panel:
        # quota filtering changes what the panel holds, so the same stream
        # scanned with and without it gets separate candidate lists
        p = self._panels.get((stream, use_quota))
        if p is None:
            p = _Panel(self._packed_width, self._panel_rows)
            self._panels[(stream, use_quota)] = p
        return p

    def _bits_for(self, keys: np.ndarray) -> np.ndarray:
        """0/1 rows on the support (1 means -1) for a batch of hypothesis keys."""
        out = np.empty((len(keys), len(self.support)), dtype=np.uint8)
        for lo in range(0, len(keys), self._ROW_CHUNK):
            hi = min(len(keys), lo + self._ROW_CHUNK)
            words = bitgen.sign_words(keys[lo:hi, None], self._usw[None, :])
            out[lo:hi] = ((words[:, self._sup_winv] >> self._sup_bit) & np.uint64(1)).astype(
                np.uint8
            )
        return out

    def _rows_for(self, keys: np.ndarray) -> np.ndarray:
        """float32 sign rows on the support for a batch of hypothesis keys."""
        bits = self._bits_for(keys)
        return (1 - 2 * bits.astype(np.int8)).astype(np.float32)

    def _packed_for(self, keys: np.ndarray) -> np.ndarray:
        """Bit-packed sign rows (little-endian within bytes) for the cache."""
        out = np.empty((len(keys), self._packed_width), dtype=np.uint8)
        for lo in range(0, len(keys), self._ROW_CHUNK):
            hi = min(len(keys), lo + self._ROW_CHUNK)
            out[lo:hi] = np.packbits(self._bits_for(keys[lo:hi]), axis=1, bitorder="little")
        return out

    def _row64(self, packed_row: np.ndarray) -> np.ndarray:
        bits = np.unpackbits(packed_row, count=len(self.support), bitorder="little")
        return (1 - 2 * bits.astype(np.int8)).astype(np.float64)

    def _extend_quota(self, panel: _Panel, target: int, use_quota: bool) -> None:
        params = self.sets.params
        budget = params.per_block_budget
        while panel.count < target and panel.cursor < params.k:
            # keys are shared via the pool cache; quota discovery batches
            # several blocks to amortize the vectorized word arithmetic,
            # while the unfiltered variant stays proportional to demand
            first = panel.cursor
            last = min(params.k, first + (16 if use_quota else 1))
            panel.cursor = last
            lo, hi = first * budget, last * budget
            ids = np.arange(lo, hi, dtype=np.int64)
            keys = self.sets.pool_keys(bitgen.STREAM_QUOTA, lo, hi)
            if use_quota:
                words = bitgen.sign_words(keys[:, None], self._planted_words[None, :])
                minus = ((words >> self._planted_bits) & np.uint64(1)).sum(axis=1)
                mask = minus >= params.minus_quota
                ids, keys = ids[mask], keys[mask]
            room = panel.room()
            packed = self._packed_for(keys[:room]) if room > 0 else None
            panel.append(ids, packed)
        if panel.cursor >= params.k:
            panel.exhausted = True

    def _extend_fallback(self, panel: _Panel, stream: int, target: int) -> None:
        params = self.sets.params
        total = params.k * params.per_block_budget
        while panel.count < target and panel.cursor < total:
            n = min(max(256, target - panel.count), total - panel.cursor)
            lo, hi = panel.cursor, panel.cursor + n
            panel.cursor = hi
            ids = np.arange(lo, hi, dtype=np.int64)
            room = panel.room()
            packed = None
            if room > 0:
                keys = self.sets.pool_keys(stream, lo, min(hi, lo + room))
                packed = self._packed_for(keys)
            panel.append(ids, packed)
        if panel.cursor >= total:
            panel.exhausted = True

    def _screen_plan(self, d64: np.ndarray, theta: float):
        """Column subset for screening: the heaviest-mass points, when the
        rest of the mass is small enough to bound the advantage soundly.

        A row's advantage is within tail_mass of its partial sum over the
        top columns, so screening against theta - tail_mass - slack never
        rejects a true qualifier; it only adds cheap false positives for
        the float64 confirmation stage. Returns (columns, masses32, slack),
        with columns None meaning screen against the full support.
        """
        n = len(d64)
        k = _SCREEN_COLUMNS
        if n <= 4 * k:
            return None, d64.astype(np.float32), theta - _SCREEN_SLACK
        top = np.argpartition(d64, n - k)[n - k:]
        tail = 1.0 - float(d64[top].sum())
        if tail > theta / 4.0:
            return None, d64.astype(np.float32), theta - _SCREEN_SLACK
        return np.sort(top), d64[np.sort(top)].astype(np.float32), theta - tail - _SCREEN_SLACK

    def first_qualifying(
        self, stream: int, dist: SampleDistribution, theta: float, use_quota: bool
    ) -> tuple[Hypothesis, float] | None:
        """First pool hypothesis (in global scan order) with advantage >= theta.

        For the quota stream with use_quota, the panel already contains only
        hypotheses meeting the planted-block minus quota, so position order
        in the panel is scan order among qualifying candidates.
        """
        if not np.array_equal(dist.indices, self.support):
            raise ValueError("distribution support does not match this scan context")
        d64 = dist.mass
        cols, dcols32, cutoff = self._screen_plan(d64, theta)
        if cols is not None:
            col_bytes = cols >> 3
            col_shift = (cols & 7).astype(np.uint8)
        panel = self.panel(stream, use_quota)
        extend = (
            (lambda p, t: self._extend_quota(p, t, use_quota))
            if stream == bitgen.STREAM_QUOTA
            else (lambda p, t: self._extend_fallback(p, stream, t))
        )
        # row chunks (gathered from the cache or regenerated) are the
        # dominant temporary; hold them at a fixed byte budget
        width = len(cols) if cols is not None else len(self.support)
        cap_cached = max(64, (32 << 20) // (4 * max(1, width)))
        cap_fresh = max(64, (32 << 20) // (4 * len(self.support)))
        pos = 0
        chunk = 64
        while True:
            if panel.count < pos + chunk and not panel.exhausted:
                extend(panel, pos + chunk)
            hi = min(panel.count, pos + chunk)
            if pos >= hi:
                if panel.exhausted:
                    return None
                continue
            cached = pos < panel.stored
            rows = None
            if cached:
                hi = min(hi, panel.stored, pos + cap_cached)
                pk = panel.packed[pos:hi]
                if cols is None:
                    bits = np.unpackbits(pk, axis=1, count=len(self.support), bitorder="little")
                else:
                    bits = (pk[:, col_bytes] >> col_shift) & np.uint8(1)
                screened = (1 - 2 * bits.astype(np.int8)).astype(np.float32) @ dcols32
            else:
                hi = min(hi, pos + cap_fresh)
                keys = bitgen.hyp_key(self.sets.master_seed, stream, panel.ids[pos:hi])
                rows = self._rows_for(keys)
                screened = (rows if cols is None else rows[:, cols]) @ dcols32
            for off in np.nonzero(screened >= cutoff)[0]:
                j = pos + int(off)
                row = self._row64(panel.packed[j]) if rows is None else rows[int(off)].astype(np.float64)
                adv = float(np.dot(row, d64))
                if adv >= theta:
                    return self.sets.random_hypothesis(stream, int(panel.ids[j])), adv
            pos = hi
            chunk = min(chunk * 4, cap_cached if cached else cap_fresh)

    def block_first_qualifying(
        self,
        stream: int,
        block_index: int,
        dist: SampleDistribution,
        theta: float,
        use_quota: bool,
    ) -> tuple[Hypothesis, float] | None:
        """First qualifying hypothesis within one block (certifier rounds)."""
        params = self.sets.params
        budget = params.per_block_budget
        d64 = dist.mass
        d32 = d64.astype(np.float32)
        ids = np.arange(block_index * budget, (block_index + 1) * budget, dtype=np.int64)
        keys = self.sets.pool_keys(stream, block_index * budget, (block_index + 1) * budget)
        if use_quota:
            words = bitgen.sign_words(keys[:, None], self._planted_words[None, :])
            minus = ((words >> self._planted_bits) & np.uint64(1)).sum(axis=1)
            mask = minus >= params.minus_quota
            ids, keys = ids[mask], keys[mask]
        for lo in range(0, len(ids), 512):
            hi = min(len(ids), lo + 512)
            rows = self._rows_for(keys[lo:hi])
            adv32 = rows @ d32
            for off in np.nonzero(adv32 >= theta - _SCREEN_SLACK)[0]:
                adv = float(np.dot(rows[int(off)].astype(np.float64), d64))
                if adv >= theta:
                    return self.sets.random_hypothesis(stream, int(ids[lo + int(off)])), adv
        return None


def _anchor_advantage(dist: SampleDistribution, params: AdversaryParams) -> float:
    """Advantage of the anchor: +1 on the first part, -1 on the tail."""
    mass_first = dist.mass_at_most(params.first_part_size)
    return 2.0 * mass_first - 1.0


def _scan_generic(
    blocks, dist: SampleDistribution, theta: float, quota: int | None, planted: PlantedBlock | None
) -> tuple[Hypothesis, float] | None:
    """Reference scan over explicit block sequences (fixtures, small pools)."""
    for block in blocks:
        for h in block:
            adv = advantage(h, dist)
            if adv < theta:
                continue
            if quota is not None and planted is not None:
                if int(np.sum(h.signs_at(planted.indices) == -1)) < quota:
                    continue
            return h, adv
    return None


def _quota_select_with_adv(
    dist: SampleDistribution,
    sets,
    frs: PlantedBlock | None,
    params: AdversaryParams,
) -> tuple[Hypothesis, float] | None:
    expected = _planted_from_distinct(dist.indices, params)
    if (frs is None) != (expected is None) or (
        frs is not None and not np.array_equal(frs.indices, expected.indices)
    ):
        raise ValueError("frs was not computed from this distribution's support")
    # branch (a): enough first-part mass makes the anchor's advantage certain
    anchor = getattr(sets, "anchor", None)
    mass_first = dist.mass_at_most(params.first_part_size)
    if anchor is not None and mass_first > 0.5 + params.gamma_prime / 8.0:
        adv = 2.0 * mass_first - 1.0
        if adv >= params.select_threshold:  # recomputed, not assumed
            return anchor, adv
    if not isinstance(sets, HypothesisSets):
        # fixture path: literal scan over whatever blocks were injected
        quota = params.minus_quota if frs is not None else None
        return _scan_generic(sets.quota_blocks, dist, params.select_threshold, quota, frs)
    scan = sets.scan_for(dist.indices)
    if frs is None:
        # no quota to demand; the anchor at the head of block 0 is scanned first
        adv = _anchor_advantage(dist, params)
        if adv >= params.select_threshold:
            return sets.anchor, adv
        return scan.first_qualifying(bitgen.STREAM_QUOTA, dist, params.select_threshold, False)
    # anchor has zero planted minuses, so the quota (>= 1) always skips it
    return scan.first_qualifying(bitgen.STREAM_QUOTA, dist, params.select_threshold, True)


def _fallback_select_with_adv(
    dist: SampleDistribution, sets, params: AdversaryParams
) -> tuple[Hypothesis, float] | None:
    if not isinstance(sets, HypothesisSets):
        return _scan_generic(sets.fallback_blocks, dist, params.select_threshold, None, None)
    scan = sets.scan_for(dist.indices)
    adv = _anchor_advantage(dist, params)
    if adv >= params.select_threshold:
        return sets.anchor, adv
    return scan.first_qualifying(bitgen.STREAM_FALLBACK, dist, params.select_threshold, False)


def quota_select(
    dist: SampleDistribution,
    sets: HypothesisSets,
    frs: PlantedBlock | None,
    params: AdversaryParams,
) -> Hypothesis | None:
    """The planting selector.

    (a) If first-part mass exceeds 1/2 + gamma_prime/8, serve the anchor
    (its advantage is recomputed, never assumed). (b) Otherwise serve the
    first quota-pool hypothesis, in deterministic scan order, with advantage
    >= select_threshold and, when frs is present, at least minus_quota
    entries equal to -1 on frs. Returns None when the pool is exhausted.
    Pure: equal distributions yield the identical hypothesis.
    """
    got = _quota_select_with_adv(dist, sets, frs, params)
    return None if got is None else got[0]


def fallback_select(
    dist: SampleDistribution, sets: HypothesisSets, params: AdversaryParams
) -> Hypothesis | None:
    """First fallback-pool hypothesis with advantage >= select_threshold.

    The anchor sits at the head of every block, so it is served whenever its
    analytic advantage qualifies. Returns None on pool exhaustion.
    """
    got = _fallback_select_with_adv(dist, sets, params)
    return None if got is None else got[0]


def _weak_learn_with_adv(
    dist: SampleDistribution, sets: HypothesisSets, params: AdversaryParams
) -> tuple[Hypothesis, float, str]:
    frs = _planted_from_distinct(dist.indices, params)
    got = _quota_select_with_adv(dist, sets, frs, params)
    route = "quota"
    if got is None or got[1] < params.switch_threshold:
        got = _fallback_select_with_adv(dist, sets, params)
        route = "fallback"
    if got is None:
        raise AdversaryExhausted()
    h, adv = got
    if adv < params.switch_threshold - _CONTRACT_TOL:
        raise InvariantViolation(
            f"weak-learner contract broken: advantage {adv!r} < "
            f"switch threshold {params.switch_threshold!r}"
        )
    return h, adv, "anchor" if h is getattr(sets, "anchor", None) else route


def weak_learn(
    dist: SampleDistribution, sets: HypothesisSets, params: AdversaryParams
) -> Hypothesis:
    """The adversary's answer to one boosting query.

    Serves the planting selector's choice when it meets switch_threshold,
    else the fallback's. Raises AdversaryExhausted when both pools fail;
    the returned hypothesis always satisfies the advantage contract.
    """
    return _weak_learn_with_adv(dist, sets, params)[0]


class AdversarialWeakLearner:
    """The construction packaged as a boosting weak-learner callable.

    use_quota=False drops the planting selector entirely (the control
    condition: same random pool, no minus-quota). Instances record simple
    serving statistics for diagnostics; the statistics do not influence
    selection, which stays a pure function of the queried distribution.
    """

    def __init__(self, sets: HypothesisSets, params: AdversaryParams, use_quota: bool = True):
        self.sets = sets
        self.params = params
        self.use_quota = use_quota
        self.reset_stats()

    def reset_stats(self) -> None:
        self.calls = 0
        self.min_advantage = math.inf
        self.anchor_served = 0
        self.quota_served = 0
        self.fallback_served = 0

    def __call__(self, dist: SampleDistribution) -> Hypothesis:
        if self.use_quota:
            h, adv, route = _weak_learn_with_adv(dist, self.sets, self.params)
        else:
            got = _fallback_select_with_adv(dist, self.sets, self.params)
            if got is None:
                raise AdversaryExhausted("fallback pool exhausted")
            h, adv = got
            if adv < self.params.switch_threshold - _CONTRACT_TOL:
                raise InvariantViolation(
                    f"weak-learner contract broken: advantage {adv!r} < "
                    f"switch threshold {self.params.switch_threshold!r}"
                )
            route = "anchor" if h is self.sets.anchor else "fallback"
        self.calls += 1
        self.min_advantage = min(self.min_advantage, adv)
        if route == "anchor":
            self.anchor_served += 1
        elif route == "quota":
            self.quota_served += 1
        else:
            self.fallback_served += 1
        return h


@dataclass(frozen=True, eq=False)
class Certificate:
    """Successful certifier run: the vote, its margins, and the normalizers."""

    classifier: VotingClassifier
    min_margin: float
    z_values: np.ndarray
    eta: float
    threshold: float

    @property
    def rounds(self) -> int:
        return len(self.z_values)


@dataclass(frozen=True)
class CertifierFailure:
    """A certifier round found no qualifying hypothesis."""

    round_index: int


def certify_majority(
    blocks,
    sample: SampleSet,
    params: AdversaryParams,
    restrict_minus: bool,
    threshold: float | None = None,
) -> Certificate | CertifierFailure:
    """Multiplicative-weights certificate that the pools can always serve.

    Runs one round per block: round j scans block j for a hypothesis with
    advantage >= threshold under the current distribution over the sample's
    distinct points (restrict_minus additionally demands the planted-block
    minus quota, the planting pool's mode), then reweights by exp(-eta * h)
    with eta = ln((1+theta)/(1-theta))/2. On success the uniform vote over
    the selected hypotheses carries min sample margin >= theta/8, with every
    normalizer Z_l <= 1 - theta^2/2; both are verified, as is the potential
    identity exp(-eta*f_k(i)) = |S| * D(i) * prod(Z), at 1e-9.

    blocks may be any sequence of hypothesis sequences; the lazy pools get a
    panel fast path, explicit fixture blocks a reference scan. If
    restrict_minus is set but the sample leaves fewer than r first-part
    points unsampled, there is no planted block and the quota is dropped.
    """
    theta = params.select_threshold if threshold is None else threshold
    if not 0.0 <= theta < 1.0:
        raise ValueError(f"threshold must be in [0, 1) (got {theta})")
    eta = 0.5 * math.log((1.0 + theta) / (1.0 - theta))
    support = sample.distinct
    n = len(support)
    planted = planted_block(sample, params) if restrict_minus else None
    quota = params.minus_quota if (restrict_minus and planted is not None) else None

    fast = isinstance(blocks, _BlockFamily)
    scan = blocks.sets.scan_for(support) if fast else None

    d = np.full(n, 1.0 / n)
    chosen: list[Hypothesis] = []
    z_values = np.empty(len(blocks))
    margins_k = np.zeros(n, dtype=np.int64)

    for j in range(len(blocks)):
        dist = SampleDistribution(support, d)
        if fast:
            adv_anchor = _anchor_advantage(dist, params)
            got = None
            if quota is None and adv_anchor >= theta:
                got = (blocks.sets.anchor, adv_anchor)
            if got is None:
                got = scan.block_first_qualifying(
                    blocks.stream, j, dist, theta, quota is not None
                )
        else:
            got = _scan_generic([blocks[j]], dist, theta, quota, planted)
        if got is None:
            return CertifierFailure(round_index=j)
        h, _ = got
        chosen.append(h)
        signs = h.signs_at(support).astype(np.float64)
        w = d * np.exp(-eta * signs)
        z = float(w.sum())
        z_values[j] = z
        if z > 1.0 - theta * theta / 2.0 + _POTENTIAL_TOL:
            raise InvariantViolation(
                f"certifier round {j}: Z = {z!r} exceeds 1 - theta^2/2"
            )
        d = w / z
        margins_k += h.signs_at(support).astype(np.int64)

    # potential identity in log space: -eta*f_k(i) = ln|S| + ln D(i) + sum ln Z,
    # checked against the actual final distribution (d stays positive at the
    # round counts this package targets; it only underflows near k ~ 5000/eta)
    lhs = -eta * margins_k.astype(np.float64)
    rhs = math.log(n) + np.log(d) + float(np.log(z_values).sum())
    if float(np.max(np.abs(lhs - rhs))) > _POTENTIAL_TOL * max(1.0, float(np.max(np.abs(lhs)))):
        raise InvariantViolation("certifier potential identity violated beyond 1e-9")

    k = len(blocks)
    min_margin = float(margins_k.min()) / k
    if min_margin < theta / 8.0 - _POTENTIAL_TOL:
        raise InvariantViolation(
            f"certified margin {min_margin!r} below guarantee {theta / 8.0!r}"
        )
    f = VotingClassifier(tuple((1.0 / k, h) for h in chosen))
    return Certificate(
        classifier=f,
        min_margin=min_margin,
        z_values=z_values,
        eta=eta,
        threshold=theta,
    )
