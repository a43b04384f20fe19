"""Adversarial weak learning versus boosting.

A weak learner that honors its advantage contract on every query can still
steer AdaBoost toward a provably suboptimal final hypothesis. This package
implements that construction end to end: the planted-coordinate adversary,
the boosting algorithms it targets, Monte-Carlo checks of the probabilistic
ingredients, and an experiment harness that measures generalization error
exactly over the finite universe.
"""

from .core import (
    Universe,
    Hypothesis,
    RandomHypothesis,
    TailMinusHypothesis,
    ExplicitHypothesis,
    SampleSet,
    SampleDistribution,
    VotingClassifier,
    draw_sample,
    advantage,
    exact_error,
    margin,
    InvariantViolation,
    WeakLearnerUnavailable,
)
from .adversary import (
    AdversaryExhausted,
    CalibrationConstants,
    AdversaryParams,
    PlantedBlock,
    planted_block,
    HypothesisSets,
    quota_select,
    fallback_select,
    weak_learn,
    AdversarialWeakLearner,
    Certificate,
    CertifierFailure,
    certify_majority,
)
from .boosting import (
    WeakLearnerBroken,
    BoostConfig,
    adaboost,
    adaboost_margin_nu,
    bootstrap_bags,
    majority_vote,
    BaggedOutcome,
    bagged_majority,
)
from .lemma_lab import (
    MonteCarloReport,
    merge_reports,
    check_bias_lemma,
    check_coupon_collector,
    check_linear_comb,
    check_anticoncentration,
    calibrate_anticoncentration,
)
from .harness import (
    TrialResult,
    TrialDetail,
    run_trial,
    run_trial_detailed,
    SweepSpec,
    FitReport,
    fit_models,
    SweepSummary,
    run_sweep,
    write_csv,
    read_csv,
)

__version__ = "0.1.0"

__all__ = [
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
    "InvariantViolation",
    "WeakLearnerUnavailable",
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
    "WeakLearnerBroken",
    "BoostConfig",
    "adaboost",
    "adaboost_margin_nu",
    "bootstrap_bags",
    "majority_vote",
    "BaggedOutcome",
    "bagged_majority",
    "MonteCarloReport",
    "merge_reports",
    "check_bias_lemma",
    "check_coupon_collector",
    "check_linear_comb",
    "check_anticoncentration",
    "calibrate_anticoncentration",
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
]
