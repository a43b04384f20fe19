"""Command-line front end.

Exit codes: 0 success; 2 configuration or usage error (click's own usage
failures land there too); 3 when a run's failure fraction exceeds
--max-fail-rate, a lemma check does not pass, or certification fails.
"""

from __future__ import annotations

import json
import sys

import click
import numpy as np

from . import bitgen, lemma_lab
from .adversary import AdversaryParams, Certificate, HypothesisSets, certify_majority
from .core import draw_sample
from .harness import SweepSpec, run_sweep, summary_path_for

__all__ = ["main"]


def _derive_or_usage(gamma: float, d: int, m: int, alpha: float,
                     budget: int = 4096) -> AdversaryParams:
    try:
        return AdversaryParams.derive(gamma, d, m, alpha, per_block_budget=budget)
    except ValueError as exc:
        raise click.UsageError(str(exc))


@click.group()
def main() -> None:
    """Adversarial weak learning versus boosting: experiments and checks."""


@main.command()
@click.option("--gamma", type=float, required=True, help="Weak-learner edge parameter.")
@click.option("--d", type=int, required=True, help="Complexity parameter (d >= ln(1/gamma)).")
@click.option("--m", type=int, required=True, help="Sample size.")
@click.option("--alpha", type=float, default=2.0, show_default=True, help="Universe stretch factor.")
@click.option("--trials", type=int, default=1, show_default=True, help="Independent trials.")
@click.option("--algo", type=click.Choice(["adaboost", "adastar", "bagged"]), default="adaboost",
              show_default=True)
@click.option("--adversary", type=click.Choice(["on", "off"]), default="on", show_default=True,
              help="off runs the quota-free control learner.")
@click.option("--rounds", type=int, default=None, help="Boosting rounds (default: zero-error horizon).")
@click.option("--seed", type=int, default=0, show_default=True, help="Master seed.")
@click.option("--out", type=click.Path(dir_okay=False, writable=True), default="run.csv",
              show_default=True, help="CSV output path (summary JSON written alongside).")
@click.option("--jobs", type=int, default=1, show_default=True, help="Worker processes.")
@click.option("--budget", type=int, default=4096, show_default=True,
              help="Hypotheses per pool block.")
@click.option("--max-fail-rate", type=float, default=0.05, show_default=True,
              help="Exit 3 when more than this fraction of trials fail.")
def run(gamma, d, m, alpha, trials, algo, adversary, rounds, seed, out, jobs, budget,
        max_fail_rate) -> None:
    """Run TRIALS trials of one algorithm arm at one sample size."""
    _derive_or_usage(gamma, d, m, alpha, budget)  # fail fast on bad parameters
    try:
        spec = SweepSpec(
            gamma=gamma, d=d, alpha=alpha, m_grid=(m,), trials=trials,
            algorithms=(f"{algo}:{adversary}",), seed=seed, rounds=rounds,
            per_block_budget=budget,
        )
    except ValueError as exc:
        raise click.UsageError(str(exc))
    _finish_sweep(spec, out, jobs, max_fail_rate)


@main.command()
@click.option("--config", type=click.Path(exists=True, dir_okay=False), required=True,
              help="JSON file mirroring SweepSpec (see README for the schema).")
@click.option("--out", type=click.Path(dir_okay=False, writable=True), default="sweep.csv",
              show_default=True, help="CSV output path (summary JSON written alongside).")
@click.option("--jobs", type=int, default=1, show_default=True, help="Worker processes.")
@click.option("--max-fail-rate", type=float, default=0.05, show_default=True,
              help="Exit 3 when more than this fraction of trials fail.")
def sweep(config, out, jobs, max_fail_rate) -> None:
    """Run a full sweep from a JSON config."""
    try:
        with open(config) as fh:
            rec = json.load(fh)
        spec = SweepSpec.from_json_dict(rec)
        for m in spec.m_grid:
            spec.params_for(m)  # surface parameter violations before running
    except (ValueError, OSError) as exc:
        raise click.UsageError(str(exc))
    _finish_sweep(spec, out, jobs, max_fail_rate)


def _finish_sweep(spec: SweepSpec, out: str, jobs: int, max_fail_rate: float) -> None:
    summary = run_sweep(spec, out, jobs=jobs)
    from .harness import read_csv  # local import keeps module load light

    trials, _ = read_csv(out)
    failed = sum(1 for t in trials if t.failure is not None)
    click.echo(f"wrote {len(trials)} trial rows + aggregates to {out}")
    click.echo(f"summary: {summary_path_for(out)}")
    for arm, fit in summary.fits.items():
        click.echo(
            f"  {arm}: a_log={fit.a_log!r} a_flat={fit.a_flat!r} "
            f"ssr_log={fit.ssr_log!r} ssr_flat={fit.ssr_flat!r} preferred={fit.preferred}"
        )
    if summary.largest_m_ratio is not None:
        click.echo(f"  largest_m_ratio={summary.largest_m_ratio!r}")
    click.echo(f"  failures: {failed}/{len(trials)}")
    if trials and failed / len(trials) > max_fail_rate:
        click.echo(f"failure rate exceeds {max_fail_rate}", err=True)
        sys.exit(3)


@main.group()
def lemmas() -> None:
    """Monte-Carlo lemma checks (exit 3 when a check does not pass)."""


def _emit_report(report: lemma_lab.MonteCarloReport) -> None:
    click.echo(report.to_json())
    if not report.passed:
        sys.exit(3)


@lemmas.command()
@click.option("--d", type=int, default=2, show_default=True, help="Coordinates (uniform weights).")
@click.option("--w-json", type=str, default=None, help="Explicit weight vector as a JSON list.")
@click.option("--alpha-tilde", type=float, required=True)
@click.option("--alpha-prime", type=float, required=True)
@click.option("--beta", type=float, required=True)
@click.option("--trials", type=int, default=100000, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
def bias(d, w_json, alpha_tilde, alpha_prime, beta, trials, seed) -> None:
    """Tail of a biased signed sum (lower-bounded probability)."""
    w = np.full(d, 1.0 / d) if w_json is None else np.asarray(json.loads(w_json), dtype=float)
    try:
        report = lemma_lab.check_bias_lemma(w, alpha_tilde, alpha_prime, beta, trials, seed)
    except ValueError as exc:
        raise click.UsageError(str(exc))
    _emit_report(report)


@lemmas.command()
@click.option("--m", type=int, required=True)
@click.option("--r", type=int, required=True)
@click.option("--zeta", type=float, default=8.0, show_default=True)
@click.option("--trials", type=int, default=10000, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
def coupon(m, r, zeta, trials, seed) -> None:
    """Coupon-collector deficit (upper-bounded probability)."""
    try:
        report = lemma_lab.check_coupon_collector(m, r, zeta, trials, seed)
    except ValueError as exc:
        raise click.UsageError(str(exc))
    _emit_report(report)


@lemmas.command()
@click.option("--r", type=int, required=True)
@click.option("--n", type=int, required=True)
@click.option("--trials", type=int, default=200, show_default=True)
@click.option("--budget", type=int, default=256, show_default=True,
              help="Adversarial search budget per matrix.")
@click.option("--seed", type=int, default=0, show_default=True)
def lincomb(r, n, trials, budget, seed) -> None:
    """Search for linear combinations dodging the small-entry floor."""
    try:
        report = lemma_lab.check_linear_comb(r, n, trials, budget, seed)
    except ValueError as exc:
        raise click.UsageError(str(exc))
    _emit_report(report)


@lemmas.command()
@click.option("--n", type=int, default=20, show_default=True, help="Coordinates (uniform 1/(2n) x).")
@click.option("--x-json", type=str, default=None, help="Explicit x vector as a JSON list.")
@click.option("--beta", type=float, required=True)
@click.option("--trials", type=int, default=100000, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--mc1", type=float, default=1.0, show_default=True)
@click.option("--mc2", type=float, default=1.0, show_default=True)
@click.option("--mc3", type=float, default=1.0, show_default=True)
@click.option("--calibrate", is_flag=True, help="Also print supported (c2, c3) constants.")
def anticonc(n, x_json, beta, trials, seed, mc1, mc2, mc3, calibrate) -> None:
    """Anti-concentration lower bound for a signed weighted sum."""
    x = np.full(n, 1.0 / (2 * n)) if x_json is None else np.asarray(json.loads(x_json), dtype=float)
    try:
        report = lemma_lab.check_anticoncentration(x, beta, trials, seed, mc1=mc1, mc2=mc2, mc3=mc3)
        if calibrate:
            c2, c3 = lemma_lab.calibrate_anticoncentration(x, beta, trials, seed, mc1=mc1, mc2=mc2)
            click.echo(json.dumps({"c2": c2, "c3": c3 if c3 != float("inf") else "inf"}))
    except ValueError as exc:
        raise click.UsageError(str(exc))
    _emit_report(report)


@main.command()
@click.option("--gamma", type=float, required=True)
@click.option("--d", type=int, required=True)
@click.option("--m", type=int, required=True)
@click.option("--alpha", type=float, default=2.0, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True, help="Pool and sample seed.")
@click.option("--pool", type=click.Choice(["quota", "fallback"]), default="quota",
              show_default=True, help="Which hypothesis pool to certify.")
@click.option("--restrict-minus/--no-restrict-minus", default=True, show_default=True,
              help="Demand the planted-block minus quota each round.")
@click.option("--threshold", type=float, default=None, help="Advantage threshold (default 2*gamma).")
@click.option("--budget", type=int, default=4096, show_default=True)
def certify(gamma, d, m, alpha, seed, pool, restrict_minus, threshold, budget) -> None:
    """Certify that a pool serves every round of a multiplicative-weights vote."""
    params = _derive_or_usage(gamma, d, m, alpha, budget)
    sample = draw_sample(
        params.universe(), m, int(bitgen.derive_seed(seed, bitgen.STREAM_SAMPLE, 0))
    )
    sets = HypothesisSets(seed, params)
    blocks = sets.quota_blocks if pool == "quota" else sets.fallback_blocks
    outcome = certify_majority(blocks, sample, params, restrict_minus, threshold)
    if isinstance(outcome, Certificate):
        click.echo(
            json.dumps(
                {
                    "ok": True,
                    "rounds": outcome.rounds,
                    "min_margin": outcome.min_margin,
                    "max_z": float(np.max(outcome.z_values)),
                    "eta": outcome.eta,
                    "threshold": outcome.threshold,
                }
            )
        )
    else:
        click.echo(json.dumps({"ok": False, "failed_round": outcome.round_index}))
        sys.exit(3)


if __name__ == "__main__":
    main()
