"""Trial runner, sweep driver, and their CSV/JSON artifacts.

A trial is one (sample, weak learner, boosting algorithm) run at fixed
parameters, producing one CSV row of exactly sixteen columns. A sweep runs
a trial grid over sample sizes and algorithm arms, appends per-arm
aggregate rows to the same CSV, and writes a JSON summary holding the
sample-complexity fits. Floats are serialized with repr() so every value
round-trips bit-exactly; downstream consumers re-parse the CSV rather than
share memory with the sweep.

Seeding is hierarchical: the sweep's master seed derives one seed per
trial (recorded in its row), and each trial derives independent streams
for its sample draw and its bootstrap bags, so any row can be reproduced
in isolation from its own seed column.
"""

from __future__ import annotations

import csv
import json
import math
import multiprocessing
from dataclasses import dataclass
from typing import Callable, Iterable, Sequence

import numpy as np

from . import bitgen
from .adversary import AdversarialWeakLearner, AdversaryParams, HypothesisSets, planted_block
from .boosting import (
    BaggedOutcome,
    BoostConfig,
    WeakLearnerBroken,
    adaboost,
    adaboost_margin_nu,
    bagged_majority,
)
from .core import SampleSet, VotingClassifier, WeakLearnerUnavailable, draw_sample, exact_error

__all__ = [
    "CSV_FIELDS",
    "ALGORITHMS",
    "TrialResult",
    "TrialDetail",
    "run_trial",
    "run_trial_detailed",
    "SweepSpec",
    "FitReport",
    "fit_models",
    "SweepSummary",
    "run_sweep",
    "write_csv",
    "read_csv",
    "summary_path_for",
]

CSV_FIELDS = (
    "seed",
    "m",
    "u",
    "r",
    "r1",
    "gamma",
    "d",
    "alpha",
    "algo",
    "adversary",
    "exact_error",
    "h0_weight",
    "in_spart1",
    "frs_minus_fraction",
    "rounds_used",
    "failure",
)

ALGORITHMS = ("adaboost", "adastar", "bagged")

# seed labels marking aggregate rows; everything else in the seed column is
# a literal trial seed
AGGREGATE_LABELS = ("mean", "median", "frac_spart1")


@dataclass(frozen=True)
class TrialResult:
    """One trial's CSV row. failure is None when the run finished; failed
    runs carry 0.0 metrics and are excluded from aggregates."""

    seed: int
    m: int
    u: int
    r: int
    r1: int
    gamma: float
    d: int
    alpha: float
    algo: str
    adversary: str
    exact_error: float
    h0_weight: float
    in_spart1: bool
    frs_minus_fraction: float
    rounds_used: int
    failure: str | None

    def __post_init__(self) -> None:
        if self.algo not in ALGORITHMS:
            raise ValueError(f"algo must be one of {ALGORITHMS} (got {self.algo!r})")
        if self.adversary not in ("on", "off"):
            raise ValueError(f"adversary must be 'on' or 'off' (got {self.adversary!r})")

    def to_row(self) -> dict[str, str]:
        return {
            "seed": str(self.seed),
            "m": str(self.m),
            "u": str(self.u),
            "r": str(self.r),
            "r1": str(self.r1),
            "gamma": repr(self.gamma),
            "d": str(self.d),
            "alpha": repr(self.alpha),
            "algo": self.algo,
            "adversary": self.adversary,
            "exact_error": repr(self.exact_error),
            "h0_weight": repr(self.h0_weight),
            "in_spart1": "true" if self.in_spart1 else "false",
            "frs_minus_fraction": repr(self.frs_minus_fraction),
            "rounds_used": str(self.rounds_used),
            "failure": self.failure or "",
        }

    @classmethod
    def from_row(cls, row: dict[str, str]) -> "TrialResult":
        return cls(
            seed=int(row["seed"]),
            m=int(row["m"]),
            u=int(row["u"]),
            r=int(row["r"]),
            r1=int(row["r1"]),
            gamma=float(row["gamma"]),
            d=int(row["d"]),
            alpha=float(row["alpha"]),
            algo=row["algo"],
            adversary=row["adversary"],
            exact_error=float(row["exact_error"]),
            h0_weight=float(row["h0_weight"]),
            in_spart1=row["in_spart1"] == "true",
            frs_minus_fraction=float(row["frs_minus_fraction"]),
            rounds_used=int(row["rounds_used"]),
            failure=row["failure"] or None,
        )


@dataclass(frozen=True)
class TrialDetail:
    """Diagnostics that never enter the CSV; picklable for worker returns."""

    min_advantage: float
    train_error: float | None
    weak_learner_calls: int
    anchor_served: int
    quota_served: int
    fallback_served: int
    failed_bags: int
    total_bags: int


def _boost_config(params: AdversaryParams, algo: str, rounds: int | None) -> BoostConfig:
    return BoostConfig(
        rounds=rounds if rounds is not None else params.default_rounds(),
        variant="margin_nu" if algo == "adastar" else "plain",
        nu=params.gamma if algo == "adastar" else 0.0,
        theta=params.gamma,
    )


def run_trial_detailed(
    params: AdversaryParams,
    algo: str,
    adversary_on: bool,
    seed: int,
    rounds: int | None = None,
    weak_learner: Callable | None = None,
) -> tuple[TrialResult, TrialDetail]:
    """Run one trial and return its CSV row plus off-row diagnostics.

    The sample and (for bagging) the bootstrap index matrix are drawn from
    streams derived from the trial seed; the hypothesis pools are keyed by
    the trial seed directly. weak_learner overrides the adversarial one for
    fixtures; it still faces the same boosting transcript.
    """
    if algo not in ALGORITHMS:
        raise ValueError(f"algo must be one of {ALGORITHMS} (got {algo!r})")
    sample = draw_sample(
        params.universe(), params.m, int(bitgen.derive_seed(seed, bitgen.STREAM_SAMPLE, 0))
    )
    sets = HypothesisSets(seed, params)
    learner = weak_learner
    if learner is None:
        learner = AdversarialWeakLearner(sets, params, use_quota=adversary_on)
    cfg = _boost_config(params, algo, rounds)
    planted = planted_block(sample, params)

    classifier: VotingClassifier | None = None
    failed_bags = 0
    total_bags = 0
    failure: str | None = None
    rounds_used = 0
    try:
        if algo == "adaboost":
            classifier = adaboost(sample, learner, cfg)
        elif algo == "adastar":
            classifier = adaboost_margin_nu(sample, learner, cfg)
        else:
            outcome: BaggedOutcome = bagged_majority(
                sample,
                learner,
                cfg,
                seed=int(bitgen.derive_seed(seed, bitgen.STREAM_BAGS, 0)),
            )
            classifier = outcome.classifier
            failed_bags = outcome.failed_bags
            total_bags = outcome.total_bags
        rounds_used = cfg.rounds
    except (WeakLearnerUnavailable, WeakLearnerBroken) as exc:
        failure = type(exc).__name__
        rounds_used = getattr(exc, "boost_rounds_completed", 0)

    if classifier is not None:
        err = exact_error(classifier, params.universe())
        h0_weight = classifier.weight_on(sets.anchor.key)
        if planted is not None:
            frs_minus = float(
                np.mean(classifier.margins_at(planted.indices) < 0.0)
            )
        else:
            frs_minus = 0.0
        train_margins = classifier.margins_at(sample.distinct)
        train_error = float(np.mean(train_margins < 0.0))
    else:
        err = 0.0
        h0_weight = 0.0
        frs_minus = 0.0
        train_error = None

    result = TrialResult(
        seed=seed,
        m=params.m,
        u=params.universe_size,
        r=params.r,
        r1=params.r1,
        gamma=params.gamma,
        d=params.d,
        alpha=params.alpha,
        algo=algo,
        adversary="on" if adversary_on else "off",
        exact_error=err,
        h0_weight=h0_weight,
        in_spart1=planted is not None,
        frs_minus_fraction=frs_minus,
        rounds_used=rounds_used,
        failure=failure,
    )
    detail = TrialDetail(
        min_advantage=float(getattr(learner, "min_advantage", math.inf)),
        train_error=train_error,
        weak_learner_calls=int(getattr(learner, "calls", 0)),
        anchor_served=int(getattr(learner, "anchor_served", 0)),
        quota_served=int(getattr(learner, "quota_served", 0)),
        fallback_served=int(getattr(learner, "fallback_served", 0)),
        failed_bags=failed_bags,
        total_bags=total_bags,
    )
    return result, detail


def run_trial(
    params: AdversaryParams,
    algo: str,
    adversary_on: bool,
    seed: int,
    rounds: int | None = None,
    weak_learner: Callable | None = None,
) -> TrialResult:
    """run_trial_detailed without the diagnostics."""
    return run_trial_detailed(params, algo, adversary_on, seed, rounds, weak_learner)[0]


def _parse_arm(entry: str) -> tuple[str, bool]:
    algo, sep, adv = entry.partition(":")
    if not sep or algo not in ALGORITHMS or adv not in ("on", "off"):
        raise ValueError(
            f"algorithm arm must look like 'adaboost:on' with algo in {ALGORITHMS} "
            f"(got {entry!r})"
        )
    return algo, adv == "on"


@dataclass(frozen=True)
class SweepSpec:
    """A sweep: one (gamma, d, alpha) point crossed with sample sizes and
    algorithm arms. Arms are 'algo:on' / 'algo:off' strings, where off runs
    the quota-free control learner over the same pools."""

    gamma: float
    d: int
    alpha: float
    m_grid: tuple[int, ...]
    trials: int
    algorithms: tuple[str, ...]
    seed: int
    rounds: int | None = None
    per_block_budget: int = 4096

    def __post_init__(self) -> None:
        object.__setattr__(self, "m_grid", tuple(int(m) for m in self.m_grid))
        object.__setattr__(self, "algorithms", tuple(self.algorithms))
        if len(self.m_grid) == 0:
            raise ValueError("m_grid must be nonempty")
        if any(b >= a for a, b in zip(self.m_grid[1:], self.m_grid)):
            raise ValueError(f"m_grid must be strictly ascending (got {self.m_grid})")
        if self.trials < 1:
            raise ValueError(f"trials must be >= 1 (got {self.trials})")
        if len(self.algorithms) == 0:
            raise ValueError("algorithms must be nonempty")
        for entry in self.algorithms:
            _parse_arm(entry)

    def params_for(self, m: int) -> AdversaryParams:
        return AdversaryParams.derive(
            self.gamma, self.d, m, self.alpha, per_block_budget=self.per_block_budget
        )

    def to_json_dict(self) -> dict:
        return {
            "gamma": self.gamma,
            "d": self.d,
            "alpha": self.alpha,
            "m_grid": list(self.m_grid),
            "trials": self.trials,
            "algorithms": list(self.algorithms),
            "seed": self.seed,
            "rounds": self.rounds,
            "per_block_budget": self.per_block_budget,
        }

    @classmethod
    def from_json_dict(cls, rec: dict) -> "SweepSpec":
        known = {
            "gamma", "d", "alpha", "m_grid", "trials", "algorithms", "seed",
            "rounds", "per_block_budget",
        }
        unknown = set(rec) - known
        if unknown:
            raise ValueError(f"unknown sweep config keys: {sorted(unknown)}")
        missing = {"gamma", "d", "alpha", "m_grid", "trials", "algorithms", "seed"} - set(rec)
        if missing:
            raise ValueError(f"sweep config missing keys: {sorted(missing)}")
        return cls(
            gamma=float(rec["gamma"]),
            d=int(rec["d"]),
            alpha=float(rec["alpha"]),
            m_grid=tuple(int(m) for m in rec["m_grid"]),
            trials=int(rec["trials"]),
            algorithms=tuple(rec["algorithms"]),
            seed=int(rec["seed"]),
            rounds=None if rec.get("rounds") is None else int(rec["rounds"]),
            per_block_budget=int(rec.get("per_block_budget", 4096)),
        )


@dataclass(frozen=True)
class FitReport:
    """Least-squares fits of mean error against two growth laws.

    a_log scales eps(m) = a * d * ln(m*gamma^2/d) / (m*gamma^2); a_flat
    scales eps(m) = a * d / (m*gamma^2). Both are fit and compared in log
    space; preferred names the smaller sum of squared log residuals.
    Zero-error points cannot enter a log fit and are dropped.
    """

    a_log: float
    a_flat: float
    ssr_log: float
    ssr_flat: float
    preferred: str
    points: tuple[tuple[int, float], ...]

    def to_json_dict(self) -> dict:
        return {
            "a_log": self.a_log,
            "a_flat": self.a_flat,
            "ssr_log": self.ssr_log,
            "ssr_flat": self.ssr_flat,
            "preferred": self.preferred,
            "points": [[m, e] for m, e in self.points],
        }


def _log_shape(m: float, gamma: float, d: float) -> float:
    scale = m * gamma * gamma
    return d * math.log(scale / d) / scale


def _flat_shape(m: float, gamma: float, d: float) -> float:
    return d / (m * gamma * gamma)


def fit_models(points: Sequence[tuple[int, float]], gamma: float, d: float) -> FitReport:
    """Fit both growth laws to (m, mean error) points.

    Each model has one free coefficient, so the log-space least-squares
    solution is exact: ln a = mean(ln eps - ln shape). Points with
    non-positive error are excluded; with none left the report is all
    zeros and flat-preferred by convention.
    """
    pts = tuple((int(m), float(e)) for m, e in points)
    usable = [(m, e) for m, e in pts if e > 0.0 and _log_shape(m, gamma, d) > 0.0]
    if not usable:
        return FitReport(0.0, 0.0, 0.0, 0.0, "flat", pts)
    log_resid = [math.log(e) - math.log(_log_shape(m, gamma, d)) for m, e in usable]
    flat_resid = [math.log(e) - math.log(_flat_shape(m, gamma, d)) for m, e in usable]
    ln_a_log = sum(log_resid) / len(log_resid)
    ln_a_flat = sum(flat_resid) / len(flat_resid)
    ssr_log = sum((x - ln_a_log) ** 2 for x in log_resid)
    ssr_flat = sum((x - ln_a_flat) ** 2 for x in flat_resid)
    return FitReport(
        a_log=math.exp(ln_a_log),
        a_flat=math.exp(ln_a_flat),
        ssr_log=ssr_log,
        ssr_flat=ssr_flat,
        preferred="log" if ssr_log < ssr_flat else "flat",
        points=pts,
    )


@dataclass(frozen=True)
class SweepSummary:
    """The sweep's JSON artifact: fits per arm plus the headline ratio."""

    spec: SweepSpec
    fits: dict[str, FitReport]
    largest_m_ratio: float | None
    master_seed: int

    def to_json_dict(self) -> dict:
        return {
            "spec": self.spec.to_json_dict(),
            "fits": {arm: fit.to_json_dict() for arm, fit in self.fits.items()},
            "largest_m_ratio": self.largest_m_ratio,
            "master_seed": self.master_seed,
        }


def summary_path_for(csv_path: str) -> str:
    base = csv_path[:-4] if csv_path.endswith(".csv") else csv_path
    return base + ".summary.json"


def _agg_value(values: list[float], how: str) -> float:
    if not values:
        return 0.0
    if how == "mean":
        return float(np.mean(values))
    return float(np.median(values))


def _aggregate_rows(group: list[TrialResult]) -> list[dict[str, str]]:
    """mean / median / frac_spart1 rows for one (m, algo, adversary) group.

    Metric columns aggregate the non-failed trials only; the failure column
    records '<failed>/<total>'. The frac_spart1 row carries the fraction of
    trials whose sample admitted a planted block (over all trials, since
    the sample exists whether or not the run finished).
    """
    head = group[0]
    ok = [t for t in group if t.failure is None]
    failed = len(group) - len(ok)
    frac_spart1 = float(np.mean([1.0 if t.in_spart1 else 0.0 for t in group]))
    rows = []
    for label in AGGREGATE_LABELS:
        if label == "frac_spart1":
            metrics = {
                "exact_error": repr(0.0),
                "h0_weight": repr(0.0),
                "frs_minus_fraction": repr(0.0),
                "rounds_used": repr(0.0),
                "in_spart1": repr(frac_spart1),
            }
        else:
            metrics = {
                "exact_error": repr(_agg_value([t.exact_error for t in ok], label)),
                "h0_weight": repr(_agg_value([t.h0_weight for t in ok], label)),
                "frs_minus_fraction": repr(
                    _agg_value([t.frs_minus_fraction for t in ok], label)
                ),
                "rounds_used": repr(_agg_value([float(t.rounds_used) for t in ok], label)),
                "in_spart1": repr(frac_spart1),
            }
        rows.append(
            {
                "seed": label,
                "m": str(head.m),
                "u": str(head.u),
                "r": str(head.r),
                "r1": str(head.r1),
                "gamma": repr(head.gamma),
                "d": str(head.d),
                "alpha": repr(head.alpha),
                "algo": head.algo,
                "adversary": head.adversary,
                "failure": f"{failed}/{len(group)}",
                **metrics,
            }
        )
    return rows


def write_csv(path: str, trials: Iterable[TrialResult], with_aggregates: bool = True) -> None:
    """Write trial rows sorted by (m, algo, adversary, seed), then the
    aggregate rows for every group, to one CSV file."""
    ordered = sorted(trials, key=lambda t: (t.m, t.algo, t.adversary, t.seed))
    groups: dict[tuple, list[TrialResult]] = {}
    for t in ordered:
        groups.setdefault((t.m, t.algo, t.adversary), []).append(t)
    with open(path, "w", newline="") as fh:
        out = csv.DictWriter(fh, fieldnames=list(CSV_FIELDS))
        out.writeheader()
        for t in ordered:
            out.writerow(t.to_row())
        if with_aggregates:
            for key in sorted(groups):
                for row in _aggregate_rows(groups[key]):
                    out.writerow(row)


def read_csv(path: str) -> tuple[list[TrialResult], list[dict[str, str]]]:
    """Read back trial rows and aggregate rows (raw dicts) from write_csv."""
    trials: list[TrialResult] = []
    aggregates: list[dict[str, str]] = []
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames != list(CSV_FIELDS):
            raise ValueError(
                f"unexpected CSV columns {reader.fieldnames}; want {list(CSV_FIELDS)}"
            )
        for row in reader:
            if row["seed"] in AGGREGATE_LABELS:
                aggregates.append(dict(row))
            else:
                trials.append(TrialResult.from_row(row))
    return trials, aggregates


def _pool_trial(job: tuple) -> tuple[TrialResult, TrialDetail]:
    params, algo, adversary_on, seed, rounds = job
    return run_trial_detailed(params, algo, adversary_on, seed, rounds)


def run_sweep(
    spec: SweepSpec,
    out_csv: str,
    jobs: int = 1,
    on_detail: Callable[[TrialResult, TrialDetail], None] | None = None,
) -> SweepSummary:
    """Run the sweep grid, write its CSV and summary JSON, return the summary.

    Trials are independent; jobs > 1 fans them out over a process pool.
    Whatever has completed is flushed to the CSV even when the sweep is
    interrupted, so partial artifacts are still well-formed. on_detail
    receives every (TrialResult, TrialDetail) in completion order.
    """
    jobs_list: list[tuple] = []
    arms = [(entry, *_parse_arm(entry)) for entry in spec.algorithms]
    for m_idx, m in enumerate(spec.m_grid):
        params = spec.params_for(m)
        for algo_idx, (_, algo, adv_on) in enumerate(arms):
            for trial_idx in range(spec.trials):
                counter = (m_idx * len(arms) + algo_idx) * spec.trials + trial_idx
                seed = int(bitgen.derive_seed(spec.seed, bitgen.STREAM_TRIAL, counter))
                jobs_list.append((params, algo, adv_on, seed, spec.rounds))

    results: list[TrialResult] = []
    try:
        if jobs <= 1:
            for job in jobs_list:
                result, detail = _pool_trial(job)
                results.append(result)
                if on_detail is not None:
                    on_detail(result, detail)
        else:
            with multiprocessing.Pool(jobs) as pool:
                for result, detail in pool.imap_unordered(_pool_trial, jobs_list):
                    results.append(result)
                    if on_detail is not None:
                        on_detail(result, detail)
    finally:
        write_csv(out_csv, results)

    fits: dict[str, FitReport] = {}
    mean_errors: dict[tuple[str, int], float] = {}
    for entry, algo, adv_on in arms:
        adv = "on" if adv_on else "off"
        points = []
        for m in spec.m_grid:
            ok = [
                t.exact_error
                for t in results
                if t.m == m and t.algo == algo and t.adversary == adv and t.failure is None
            ]
            if ok:
                mean = float(np.mean(ok))
                points.append((m, mean))
                mean_errors[(entry, m)] = mean
        fits[entry] = fit_models(points, spec.gamma, spec.d)

    largest = spec.m_grid[-1]
    num = mean_errors.get(("adaboost:on", largest))
    den = mean_errors.get(("bagged:on", largest))
    ratio = (num / den) if (num is not None and den not in (None, 0.0)) else None

    summary = SweepSummary(
        spec=spec, fits=fits, largest_m_ratio=ratio, master_seed=spec.seed
    )
    with open(summary_path_for(out_csv), "w") as fh:
        json.dump(summary.to_json_dict(), fh, indent=2)
        fh.write("\n")
    return summary
