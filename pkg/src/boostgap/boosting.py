"""AdaBoost, a margin-maximizing variant, and bootstrap bagging.

All three run against a weak-learner callable (distribution in, hypothesis
out) and the all-ones concept, so a hypothesis is correct exactly where it
votes +1. The boosting distribution lives on the distinct sample points and
stays strictly positive there each round; that positivity is the property
the adversarial weak learner exploits, so it is asserted, not assumed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .core import (
    Hypothesis,
    ExplicitHypothesis,
    InvariantViolation,
    SampleDistribution,
    SampleSet,
    VotingClassifier,
    WeakLearnerUnavailable,
)

__all__ = [
    "WeakLearnerBroken",
    "BoostConfig",
    "adaboost",
    "adaboost_margin_nu",
    "bootstrap_bags",
    "majority_vote",
    "BaggedOutcome",
    "bagged_majority",
]

WeakLearner = Callable[[SampleDistribution], Hypothesis]

# tolerance on the weighted-error contract check: exact-arithmetic slack only
_EDGE_TOL = 1e-12
_SUM_TOL = 1e-12

_VARIANTS = ("plain", "margin_nu")


class WeakLearnerBroken(RuntimeError):
    """The weak learner returned a hypothesis violating its edge contract."""


@dataclass(frozen=True)
class BoostConfig:
    """Run parameters for one boosting invocation.

    theta is the contracted half-edge: the weak learner promises weighted
    error <= 1/2 - theta every round, and the exponential-loss bound
    exp(ln n - 2 t theta^2) is asserted against the running training error.
    theta = 0 disables both (no contract, vacuous bound).
    """

    rounds: int
    edge_floor: float = 1e-9
    variant: str = "plain"
    nu: float = 0.0
    theta: float = 0.0

    def __post_init__(self) -> None:
        if self.rounds < 1:
            raise ValueError(f"rounds must be >= 1 (got {self.rounds})")
        if not 0.0 < self.edge_floor <= 1e-3:
            raise ValueError(f"edge_floor must be in (0, 1e-3] (got {self.edge_floor})")
        if self.variant not in _VARIANTS:
            raise ValueError(f"variant must be one of {_VARIANTS} (got {self.variant!r})")
        if self.nu < 0.0:
            raise ValueError(f"nu must be >= 0 (got {self.nu})")
        if not 0.0 <= self.theta < 0.5:
            raise ValueError(f"theta must be in [0, 0.5) (got {self.theta})")


def _boost(sample: SampleSet, weak_learner: WeakLearner, cfg: BoostConfig,
           margin_nu: bool) -> VotingClassifier:
    support = sample.distinct
    n = len(support)
    d = np.full(n, 1.0 / n)
    hyps: list[Hypothesis] = []
    raw_w: list[float] = []
    vote = np.zeros(n)
    rho = math.inf
    rounds_done = 0
    try:
        for t in range(cfg.rounds):
            if not np.all(d > 0.0):
                raise InvariantViolation(
                    f"round {t}: boosting distribution lost strict positivity"
                )
            h = weak_learner(SampleDistribution(support, d))
            signs = h.signs_at(support).astype(np.float64)
            eps = float(d[signs < 0.0].sum())
            if eps > 0.5 - cfg.theta + _EDGE_TOL:
                raise WeakLearnerBroken(
                    f"round {t}: weighted error {eps!r} exceeds "
                    f"1/2 - theta = {0.5 - cfg.theta!r}"
                )
            eps = min(max(eps, cfg.edge_floor), 0.5 - cfg.edge_floor)
            w = 0.5 * math.log((1.0 - eps) / eps)
            if margin_nu:
                rho = min(rho, 1.0 - 2.0 * eps)
                w -= 0.5 * math.log((1.0 + rho - cfg.nu) / (1.0 - rho + cfg.nu))
                if w < 0.0:
                    w = 0.0
            hyps.append(h)
            raw_w.append(w)
            d = d * np.exp(-w * signs)
            z = float(d.sum())
            if z <= 0.0:
                raise InvariantViolation(f"round {t}: distribution normalizer collapsed")
            d = d / z
            if abs(float(d.sum()) - 1.0) > _SUM_TOL:
                raise InvariantViolation(
                    f"round {t}: distribution sum {float(d.sum())!r} not 1"
                )
            vote += w * signs
            if not margin_nu and cfg.theta > 0.0:
                errs = int(np.count_nonzero(vote < 0.0))
                bound = math.exp(math.log(n) - 2.0 * (t + 1) * cfg.theta**2)
                if errs > bound + _EDGE_TOL:
                    raise InvariantViolation(
                        f"round {t}: {errs} training errors exceed "
                        f"exponential-loss bound {bound!r}"
                    )
            rounds_done = t + 1
    except BaseException as exc:
        exc.boost_rounds_completed = rounds_done
        raise
    total = sum(raw_w)
    if total <= 0.0:
        # all-zero weight schedule (margin_nu can clamp every round): fall
        # back to the uniform vote rather than emit an invalid classifier
        weights = [1.0 / len(hyps)] * len(hyps)
    else:
        weights = [w / total for w in raw_w]
    return VotingClassifier(tuple(zip(weights, hyps)))


def adaboost(sample: SampleSet, weak_learner: WeakLearner, cfg: BoostConfig) -> VotingClassifier:
    """Run AdaBoost for cfg.rounds rounds and return the normalized vote.

    Each round: query the weak learner with the current distribution over
    distinct sample points, measure its weighted error eps_t against the
    all-ones concept, set w_t = ln((1-eps_t)/eps_t)/2 with eps_t clamped to
    [edge_floor, 1/2 - edge_floor], and reweight by exp(-w_t * h_t). Output
    weights are the w_t normalized to sum 1; they depend on the hypotheses
    only through their signs on the sample.

    Raises WeakLearnerBroken when eps_t > 1/2 - theta, and lets weak-learner
    unavailability propagate; either carries boost_rounds_completed.
    cfg.variant = "margin_nu" dispatches to adaboost_margin_nu's rule.
    """
    if sample.m < 1:
        raise ValueError("sample must be nonempty")
    return _boost(sample, weak_learner, cfg, margin_nu=(cfg.variant == "margin_nu"))


def adaboost_margin_nu(sample: SampleSet, weak_learner: WeakLearner,
                       cfg: BoostConfig) -> VotingClassifier:
    """AdaBoost with the nu-adjusted weight rule (a margin-pursuing variant).

    w_t = ln((1-eps_t)/eps_t)/2 - ln((1+rho_t-nu)/(1-rho_t+nu))/2 where
    rho_t is the running minimum edge so far; negative weights clamp to 0.
    Demonstrative variant: it shares adaboost's transcript semantics but
    trades training-error contraction for larger margins.
    """
    if sample.m < 1:
        raise ValueError("sample must be nonempty")
    return _boost(sample, weak_learner, cfg, margin_nu=True)


def bootstrap_bags(sample: SampleSet, bags: int, bag_size: int, seed: int) -> list[SampleSet]:
    """Deterministic bootstrap resamples: draws indexed by a seeded RNG."""
    if bags < 1:
        raise ValueError(f"bags must be >= 1 (got {bags})")
    if not 1 <= bag_size <= sample.m:
        raise ValueError(f"bag_size must be in [1, m={sample.m}] (got {bag_size})")
    rng = np.random.default_rng(seed)
    rows = rng.integers(0, sample.m, size=(bags, bag_size))
    return [SampleSet(sample.universe, sample.draws[row]) for row in rows]


def majority_vote(predictions: Sequence[np.ndarray]) -> np.ndarray:
    """Pointwise unweighted majority of +-1 vectors; ties vote +1."""
    if len(predictions) == 0:
        raise ValueError("majority of zero voters is undefined")
    total = np.zeros(len(predictions[0]), dtype=np.int64)
    for p in predictions:
        total += np.asarray(p, dtype=np.int64)
    return np.where(total < 0, -1, 1).astype(np.int8)


@dataclass(frozen=True, eq=False)
class BaggedOutcome:
    """Majority-of-majorities output plus the surviving inner runs."""

    classifier: VotingClassifier
    inner: tuple[VotingClassifier, ...]
    failed_bags: int
    total_bags: int


def bagged_majority(
    sample: SampleSet,
    weak_learner: WeakLearner,
    cfg: BoostConfig,
    bags: int | None = None,
    bag_size: int | None = None,
    seed: int = 0,
) -> BaggedOutcome:
    """Boost on bootstrap resamples and take the unweighted majority.

    Defaults: bags = ceil(log2(m / 0.25)), bag_size = m. Every bag runs
    adaboost against the same weak-learner instance. A bag whose run fails
    (weak learner unavailable or contract-broken) is dropped and counted;
    survivors vote with equal weight 1/(surviving bags). If every bag fails
    the last failure propagates.

    Each inner vote is collapsed to its sign first, so the outer classifier
    is a true majority of majorities, exposed as one explicit-vector term
    per surviving bag.
    """
    if bags is None:
        bags = math.ceil(math.log2(sample.m / 0.25))
    if bag_size is None:
        bag_size = sample.m
    inner: list[VotingClassifier] = []
    failed = 0
    last_exc: Exception | None = None
    for b, bag in enumerate(bootstrap_bags(sample, bags, bag_size, seed)):
        try:
            inner.append(adaboost(bag, weak_learner, cfg))
        except (WeakLearnerUnavailable, WeakLearnerBroken) as exc:
            failed += 1
            last_exc = exc
    if not inner:
        raise last_exc
    voters = tuple(
        ExplicitHypothesis(f.predictions(), label=("bag", b))
        for b, f in enumerate(inner)
    )
    outer = VotingClassifier(tuple((1.0 / len(voters), h) for h in voters))
    return BaggedOutcome(
        classifier=outer, inner=tuple(inner), failed_bags=failed, total_bags=bags
    )
