"""Monte-Carlo checks of the construction's probabilistic ingredients.

Each check estimates one tail probability at small scale and compares it
to its claimed bound at three standard errors. The linear-combination
check is budgeted falsification, not verification: its verdict is only
ever "no counterexample found". All checks are chunked, seeded, and
bit-reproducible; reports merge by exact success-count addition.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "MonteCarloReport",
    "merge_reports",
    "check_bias_lemma",
    "check_coupon_collector",
    "check_linear_comb",
    "check_anticoncentration",
    "calibrate_anticoncentration",
]

# rows per simulation batch are sized so a batch stays within ~64 MB
_BATCH_CELLS = 8_000_000


def _batch_rows(cols: int) -> int:
    return max(1, _BATCH_CELLS // max(1, cols))


@dataclass(frozen=True)
class MonteCarloReport:
    """One estimated probability against one claimed bound.

    passed means the estimate is consistent with the bound at 3 standard
    errors: empirical >= bound - 3*se for direction "lower", empirical <=
    bound + 3*se for "upper". Serialized with the JSON key "pass".
    """

    trials: int
    empirical_probability: float
    claimed_bound: float
    direction: str
    passed: bool
    std_error: float

    def __post_init__(self) -> None:
        if self.trials < 1:
            raise ValueError(f"trials must be >= 1 (got {self.trials})")
        if not 0.0 <= self.empirical_probability <= 1.0:
            raise ValueError(
                f"empirical_probability must be in [0, 1] (got {self.empirical_probability!r})"
            )
        if self.direction not in ("lower", "upper"):
            raise ValueError(f"direction must be 'lower' or 'upper' (got {self.direction!r})")
        if self.passed is not _passes(
            self.empirical_probability, self.claimed_bound, self.direction, self.std_error
        ):
            raise ValueError("pass flag inconsistent with bound, direction and std_error")

    @classmethod
    def from_counts(
        cls, successes: int, trials: int, claimed_bound: float, direction: str
    ) -> "MonteCarloReport":
        if trials < 1:
            raise ValueError(f"trials must be >= 1 (got {trials})")
        emp = successes / trials
        se = math.sqrt(emp * (1.0 - emp) / trials)
        return cls(
            trials=trials,
            empirical_probability=emp,
            claimed_bound=claimed_bound,
            direction=direction,
            passed=_passes(emp, claimed_bound, direction, se),
            std_error=se,
        )

    @property
    def successes(self) -> int:
        return round(self.empirical_probability * self.trials)

    def to_json(self) -> str:
        return json.dumps(
            {
                "trials": self.trials,
                "empirical_probability": self.empirical_probability,
                "claimed_bound": self.claimed_bound,
                "direction": self.direction,
                "pass": self.passed,
                "std_error": self.std_error,
            }
        )

    @classmethod
    def from_json(cls, text: str) -> "MonteCarloReport":
        rec = json.loads(text)
        return cls(
            trials=rec["trials"],
            empirical_probability=rec["empirical_probability"],
            claimed_bound=rec["claimed_bound"],
            direction=rec["direction"],
            passed=rec["pass"],
            std_error=rec["std_error"],
        )


def _passes(emp: float, bound: float, direction: str, se: float) -> bool:
    if direction == "lower":
        return emp >= bound - 3.0 * se
    return emp <= bound + 3.0 * se


def merge_reports(a: MonteCarloReport, b: MonteCarloReport) -> MonteCarloReport:
    """Combine two independent runs of the same check by count addition."""
    if a.claimed_bound != b.claimed_bound or a.direction != b.direction:
        raise ValueError("reports check different claims and cannot be merged")
    return MonteCarloReport.from_counts(
        a.successes + b.successes, a.trials + b.trials, a.claimed_bound, a.direction
    )


def check_bias_lemma(
    w: np.ndarray,
    alpha_tilde: float,
    alpha_prime: float,
    beta: float,
    trials: int,
    seed: int = 0,
) -> MonteCarloReport:
    """Tail of a biased signed sum against its anti-concentration bound.

    Coordinates are independent with P[h_i = -1] = 1/2 + alpha_tilde*beta;
    the event is sum(w_i h_i) <= -alpha_prime*beta, claimed to occur with
    probability at least min(1/4, 1/2 - 4*at*ap/(2*at - ap)^2).
    """
    w = np.asarray(w, dtype=np.float64)
    if abs(float(np.abs(w).sum()) - 1.0) > 1e-12:
        raise ValueError("w must have L1 norm exactly 1")
    if alpha_tilde < 1.0:
        raise ValueError(f"alpha_tilde must be >= 1 (got {alpha_tilde})")
    if not 0.0 < alpha_prime < alpha_tilde:
        raise ValueError(
            f"alpha_prime must be in (0, alpha_tilde) (got {alpha_prime})"
        )
    if not 0.0 <= beta < 1.0 / (2.0 * alpha_tilde):
        raise ValueError(
            f"beta must be in [0, 1/(2*alpha_tilde)) (got {beta})"
        )
    if trials < 1:
        raise ValueError("trials must be >= 1")
    p_minus = 0.5 + alpha_tilde * beta
    bound = min(0.25, 0.5 - 4.0 * alpha_tilde * alpha_prime / (2.0 * alpha_tilde - alpha_prime) ** 2)
    rng = np.random.default_rng(seed)
    d = len(w)
    successes = 0
    left = trials
    while left > 0:
        rows = min(left, _batch_rows(d))
        signs = np.where(rng.random((rows, d)) < p_minus, -1.0, 1.0)
        sums = signs @ w
        successes += int(np.count_nonzero(sums <= -alpha_prime * beta))
        left -= rows
    return MonteCarloReport.from_counts(successes, trials, bound, "lower")


def check_coupon_collector(
    m: int, r: int, zeta: float, trials: int, seed: int = 0
) -> MonteCarloReport:
    """Coupon-collector deficit: do m draws reach coupons - 2r distinct?

    With coupons = ceil(zeta*m/ln(m/r)) equally likely coupons, the claim
    is that m draws suffice to collect coupons - 2r distinct ones with
    probability at least 1/2, i.e. P[X <= m] has upper bound 1/2 for the
    waiting time X. Equivalently the distinct count among m draws reaches
    the target at least half the time; we estimate the failure direction.
    """
    if r < 1:
        raise ValueError(f"r must be >= 1 (got {r})")
    if m < 4 * r:
        raise ValueError(f"m >= 4r required (m={m}, r={r})")
    if zeta < 8.0:
        raise ValueError(f"zeta must be >= 8 (got {zeta})")
    if trials < 1:
        raise ValueError("trials must be >= 1")
    coupons = math.ceil(zeta * m / math.log(m / r))
    target = coupons - 2 * r
    rng = np.random.default_rng(seed)
    successes = 0
    left = trials
    while left > 0:
        rows = min(left, _batch_rows(m))
        draws = rng.integers(0, coupons, size=(rows, m))
        draws.sort(axis=1)
        distinct = 1 + np.count_nonzero(np.diff(draws, axis=1) != 0, axis=1)
        successes += int(np.count_nonzero(distinct >= target))
        left -= rows
    return MonteCarloReport.from_counts(successes, trials, 0.5, "upper")


def _l1_normalize(w: np.ndarray) -> np.ndarray:
    s = float(np.abs(w).sum())
    return w / s if s > 0.0 else w


def check_linear_comb(
    r: int,
    n: int,
    trials: int,
    adversarial_search_budget: int = 256,
    seed: int = 0,
) -> MonteCarloReport:
    """Budgeted falsification of the many-small-entries property.

    For a uniform sign matrix A in {-1,1}^(r x n), the claim is that every
    L1-unit w leaves at least r/10 entries of Aw below 14*sqrt(lg(n)/r).
    Each trial searches for a violating w over signed basis vectors, random
    L1-unit vectors, vectors snapped to the grid of step 40*lg(n)/r, and a
    greedy ascent, all within the search budget. The reported probability
    is the fraction of matrices where a violation was FOUND; finding none
    is evidence, not proof.
    """
    if n < 1:
        raise ValueError(f"n must be >= 1 (got {n})")
    lg_n = math.log2(n) if n > 1 else 0.0
    if r < 40.0 * lg_n:
        raise ValueError(f"r >= 40*lg(n) = {40.0 * lg_n} required (got {r})")
    if trials < 1:
        raise ValueError("trials must be >= 1")
    tau = 14.0 * math.sqrt(lg_n / r)
    need_below = r / 10.0
    grid_step = 40.0 * lg_n / r if lg_n > 0.0 else None
    rng = np.random.default_rng(seed)
    violations = 0

    def violates(A: np.ndarray, w: np.ndarray) -> bool:
        return int(np.count_nonzero(A @ w < tau)) < need_below

    def count_large(A: np.ndarray, w: np.ndarray) -> int:
        return int(np.count_nonzero(A @ w >= tau))

    for _ in range(trials):
        A = rng.integers(0, 2, size=(r, n)).astype(np.float64) * 2.0 - 1.0
        found = False
        best_w = None
        best_large = -1
        candidates = []
        for j in range(n):
            e = np.zeros(n)
            e[j] = 1.0
            candidates.append(e)
            candidates.append(-e)
        n_random = max(0, adversarial_search_budget - len(candidates))
        for _ in range(n_random):
            w = _l1_normalize(rng.standard_normal(n))
            candidates.append(w)
            if grid_step is not None:
                snapped = np.round(w / grid_step) * grid_step
                if float(np.abs(snapped).sum()) > 0.0:
                    candidates.append(_l1_normalize(snapped))
        for w in candidates:
            if violates(A, w):
                found = True
                break
            c = count_large(A, w)
            if c > best_large:
                best_large, best_w = c, w
        if not found and best_w is not None:
            # greedy ascent: push mass toward coordinates that raise the
            # count of entries at or above the threshold
            w = best_w.copy()
            for _ in range(adversarial_search_budget):
                j = int(rng.integers(0, n))
                delta = rng.choice((-0.25, 0.25))
                trial_w = w.copy()
                trial_w[j] += delta
                trial_w = _l1_normalize(trial_w)
                c = count_large(A, trial_w)
                if c > best_large:
                    best_large, w = c, trial_w
                    if violates(A, w):
                        found = True
                        break
        if found:
            violations += 1
    return MonteCarloReport.from_counts(violations, trials, 2.0 ** (-0.01 * r), "upper")


def _validate_anticoncentration(x: np.ndarray, beta: float, mc1: float) -> None:
    if np.any(x < 0.0):
        raise ValueError("x must be nonnegative")
    if float(x.sum()) < (1.0 - beta) / 2.0 - 1e-12:
        raise ValueError(
            f"sum(x) = {float(x.sum())!r} must be at least (1-beta)/2 = {(1.0 - beta) / 2.0!r}"
        )
    if beta < 0.0 or beta > mc1 / 6.0:
        raise ValueError(f"beta must be in [0, mc1/6 = {mc1 / 6.0}] (got {beta})")


def check_anticoncentration(
    x: np.ndarray,
    beta: float,
    trials: int,
    seed: int = 0,
    mc1: float = 1.0,
    mc2: float = 1.0,
    mc3: float = 1.0,
) -> MonteCarloReport:
    """Lower bound on P[sum(h_i x_i) >= beta] for uniform signs h.

    The claimed bound is mc2 * exp(-mc3 * 16 * beta^2 * n / mc1^2) at the
    current calibration constants; ties (sum exactly beta) count as hits,
    so the comparison carries a tolerance of n rounding ulps: a dot product
    whose exact value equals beta must not be dropped for landing a few
    ulps short after accumulation.
    """
    x = np.asarray(x, dtype=np.float64)
    _validate_anticoncentration(x, beta, mc1)
    if trials < 1:
        raise ValueError("trials must be >= 1")
    n = len(x)
    bound = mc2 * math.exp(-mc3 * 16.0 * beta * beta * n / (mc1 * mc1))
    tie_tol = n * np.finfo(np.float64).eps * max(float(x.sum()), abs(beta), 1.0)
    rng = np.random.default_rng(seed)
    successes = 0
    left = trials
    while left > 0:
        rows = min(left, _batch_rows(n))
        signs = np.where(rng.random((rows, n)) < 0.5, -1.0, 1.0)
        sums = signs @ x
        successes += int(np.count_nonzero(sums >= beta - tie_tol))
        left -= rows
    return MonteCarloReport.from_counts(successes, trials, bound, "lower")


def calibrate_anticoncentration(
    x: np.ndarray,
    beta: float,
    trials: int,
    seed: int = 0,
    mc1: float = 1.0,
    mc2: float = 1.0,
) -> tuple[float, float]:
    """Constants the data supports: largest mc2-like, smallest mc3-like.

    Returns (c2, c3) such that c2 * exp(-16*beta^2*n/mc1^2) and
    mc2 * exp(-c3 * 16*beta^2*n/mc1^2) both sit at or below the empirical
    probability, clamped to c2 <= 1 and c3 >= 1. Degenerate cases: zero
    empirical probability yields (0.0, inf); beta = 0 leaves the exponent
    inert, yielding (min(1, emp/mc2-free bound), 1.0).
    """
    x = np.asarray(x, dtype=np.float64)
    _validate_anticoncentration(x, beta, mc1)
    report = check_anticoncentration(x, beta, trials, seed=seed, mc1=mc1, mc2=mc2, mc3=1.0)
    emp = report.empirical_probability
    n = len(x)
    exponent = 16.0 * beta * beta * n / (mc1 * mc1)
    if emp == 0.0:
        return 0.0, math.inf
    if exponent == 0.0:
        return min(1.0, emp), 1.0
    c2 = min(1.0, emp / math.exp(-exponent))
    c3 = max(1.0, math.log(mc2 / emp) / exponent)
    return c2, c3
