"""Experiment orchestration: seeded alpha sweeps and their file outputs."""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from . import __version__
from .analysis import (
    StatSummary,
    Tally,
    empirical_distribution,
    gibbs_distribution,
    summarize,
    tally,
    tv_distance,
)
from .engines import (
    NoiseDraw,
    NoiseModel,
    RunParams,
    draw_noise,
    run_sa_batch,
    run_sssv_batch,
)
from .ising import ENUMERATION_LIMIT, IsingProblem, enumerate_ground_space
from .rng import MASK64, SplitMix64, derive_run_seed
from .schedule import AnnealSchedule

CSV_HEADER = [
    "alpha", "runs", "n_isolated", "n_clustered", "n_excited",
    "p_gs", "ratio", "ratio_ci_low", "ratio_ci_high", "tv_gibbs",
]

# Index reserved for the shared frozen-noise stream; alpha indices from
# enumerate() can never reach it because derive_run_seed rejects 2^32.
FROZEN_NOISE_INDEX = 0xFFFFFFFF


def default_alpha_grid() -> list[float]:
    """20 evenly spaced points in (0, 1] plus the two called-out values."""
    grid = [k / 20 for k in range(1, 21)] + [0.1099, 0.2834]
    return sorted(grid)


@dataclass(frozen=True)
class ExperimentConfig:
    problem: IsingProblem
    schedule: AnnealSchedule
    alphas: tuple[float, ...]
    model: str = "sssv"
    noise: NoiseModel = NoiseModel()
    runs_per_alpha: int = 10000
    sweeps: int = 1500
    temperature: float = 0.22
    transverse_sign: int = -1
    base_seed: int = 42
    freeze_noise: bool = False
    compute_gibbs_distance: bool = False
    problem_label: str = "custom"

    def __post_init__(self):
        object.__setattr__(self, "alphas", tuple(float(a) for a in self.alphas))
        if self.model not in ("sssv", "sa"):
            raise ValueError("model must be 'sssv' or 'sa'")
        if not self.alphas:
            raise ValueError("alphas must be non-empty")
        for a in self.alphas:
            if not 0.0 <= a <= 1.0:
                raise ValueError(f"alpha {a} outside [0, 1]")
        if self.runs_per_alpha < 1:
            raise ValueError("runs_per_alpha must be positive")
        if self.sweeps < 2:
            raise ValueError("sweeps must be at least 2")
        if self.temperature <= 0:
            raise ValueError("temperature must be positive")
        if self.transverse_sign not in (-1, 1):
            raise ValueError("transverse_sign must be -1 or +1")
        if self.model == "sa" and (self.noise.sigma_h > 0 or self.noise.sigma_j > 0):
            raise ValueError("the sa engine has no calibration-noise terms; "
                             "set both sigmas to 0 for model 'sa'")
        if self.freeze_noise and self.model != "sssv":
            raise ValueError("freeze_noise only applies to the sssv model")
        if self.compute_gibbs_distance and self.problem.n_spins > ENUMERATION_LIMIT:
            raise ValueError(
                f"gibbs distance needs enumeration (<= {ENUMERATION_LIMIT} spins)")


@dataclass(frozen=True)
class AlphaRecord:
    alpha: float
    tally: Tally
    summary: StatSummary
    tv_gibbs: float | None = None


@dataclass(frozen=True)
class SweepResult:
    provenance: dict
    records: list[AlphaRecord] = field(default_factory=list)


_MIX1 = np.uint64(0xBF58476D1CE4E5B9)
_MIX2 = np.uint64(0x94D049BB133111EB)


def _mix64_array(z: np.ndarray) -> np.ndarray:
    z = (z ^ (z >> np.uint64(30))) * _MIX1
    z = (z ^ (z >> np.uint64(27))) * _MIX2
    return z ^ (z >> np.uint64(31))


def derive_run_seeds(base_seed: int, alpha_index: int, n_runs: int) -> np.ndarray:
    """Vector of derive_run_seed(base_seed, alpha_index, i) for i < n_runs."""
    if n_runs < 1:
        raise ValueError("n_runs must be positive")
    # delegate the range checks on the scalar path
    derive_run_seed(base_seed, alpha_index, n_runs - 1)
    packed = (np.uint64(alpha_index) << np.uint64(32)) | np.arange(n_runs, dtype=np.uint64)
    return _mix64_array(np.uint64(base_seed & MASK64) ^ _mix64_array(packed))


def _provenance(config: ExperimentConfig) -> dict:
    p = config.problem
    sched = config.schedule
    return {
        "version": __version__,
        "model": config.model,
        "problem_label": config.problem_label,
        "problem": {
            "n_spins": p.n_spins,
            "h": [[i, v] for i, v in sorted(p.fields.items())],
            "j": [[i, j, v] for (i, j), v in sorted(p.couplings.items())],
            "core": sorted(p.core) if p.core is not None else None,
        },
        "schedule": {
            "name": sched.name,
            "s": sched.s.tolist(),
            "A_GHz": sched.A.tolist(),
            "B_GHz": sched.B.tolist(),
        },
        "alphas": list(config.alphas),
        "runs_per_alpha": config.runs_per_alpha,
        "sweeps": config.sweeps,
        "temperature": config.temperature,
        "transverse_sign": config.transverse_sign,
        "sigma_h": config.noise.sigma_h,
        "sigma_j": config.noise.sigma_j,
        "base_seed": config.base_seed,
        "freeze_noise": config.freeze_noise,
        "compute_gibbs_distance": config.compute_gibbs_distance,
    }


def run_experiment(config: ExperimentConfig, workers: int | None = None,
                   progress: Callable[[AlphaRecord], None] | None = None) -> SweepResult:
    """Execute the configured sweep.

    Results are bit-identical for identical configs no matter how many
    workers execute the batch, because every run is seeded independently
    from (base_seed, alpha index, run index).
    """
    import numba

    problem = config.problem
    info = enumerate_ground_space(problem)
    params_base = dict(sweeps=config.sweeps, temperature=config.temperature,
                       transverse_sign=config.transverse_sign)
    frozen: NoiseDraw | None = None
    if config.freeze_noise:
        stream = SplitMix64(derive_run_seed(config.base_seed, FROZEN_NOISE_INDEX, 0))
        frozen = draw_noise(problem, config.noise, stream)

    records: list[AlphaRecord] = []
    old_threads = numba.get_num_threads()
    if workers is not None:
        if workers < 1:
            raise ValueError("workers must be positive")
        numba.set_num_threads(max(1, min(workers, numba.config.NUMBA_NUM_THREADS)))
    try:
        for ai, alpha in enumerate(config.alphas):
            seeds = derive_run_seeds(config.base_seed, ai, config.runs_per_alpha)
            params = RunParams(alpha=alpha, **params_base)
            if config.model == "sssv":
                spins, _ = run_sssv_batch(problem, config.schedule, params,
                                          config.noise, seeds, frozen_noise=frozen)
            else:
                spins = run_sa_batch(problem, config.schedule, params, seeds)
            t = tally(problem, info, spins)
            summary = summarize(t, info.clustered_count)
            tv = None
            if config.compute_gibbs_distance:
                ref = gibbs_distribution(problem, alpha, float(config.schedule.B[-1]),
                                         config.temperature)
                tv = tv_distance(empirical_distribution(t, problem.n_spins), ref)
            record = AlphaRecord(alpha=alpha, tally=t, summary=summary, tv_gibbs=tv)
            records.append(record)
            if progress is not None:
                progress(record)
    finally:
        numba.set_num_threads(old_threads)
    return SweepResult(provenance=_provenance(config), records=records)


def _fmt(x: float | None, undefined: str = "NaN") -> str:
    if x is None:
        return undefined
    return repr(float(x))


def _record_row(rec: AlphaRecord) -> list[str]:
    s = rec.summary
    ci_lo = s.ratio_ci[0] if s.ratio_ci is not None else None
    ci_hi = s.ratio_ci[1] if s.ratio_ci is not None else None
    return [
        repr(float(rec.alpha)),
        str(rec.tally.runs),
        str(rec.tally.n_isolated),
        str(rec.tally.n_clustered),
        str(rec.tally.n_excited),
        repr(float(s.p_gs)),
        _fmt(s.ratio),
        _fmt(ci_lo),
        _fmt(ci_hi),
        "" if rec.tv_gibbs is None else repr(float(rec.tv_gibbs)),
    ]


def emit_csv(result: SweepResult, destination) -> None:
    """Write the per-alpha table; floats keep full round-trip precision."""
    rows = [_record_row(r) for r in result.records]
    if hasattr(destination, "write"):
        w = csv.writer(destination, lineterminator="\n")
        w.writerow(CSV_HEADER)
        w.writerows(rows)
        return
    with open(destination, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(CSV_HEADER)
        w.writerows(rows)


def _result_document(result: SweepResult, include_histogram: bool) -> dict:
    recs = []
    for r in result.records:
        s = r.summary
        entry = {
            "alpha": r.alpha,
            "runs": r.tally.runs,
            "n_isolated": r.tally.n_isolated,
            "n_clustered": r.tally.n_clustered,
            "n_excited": r.tally.n_excited,
            "p_gs": s.p_gs,
            "p_isolated": s.p_isolated,
            "p_clustered_per_state": s.p_clustered_per_state,
            "ratio": s.ratio,
            "ratio_ci_low": s.ratio_ci[0] if s.ratio_ci else None,
            "ratio_ci_high": s.ratio_ci[1] if s.ratio_ci else None,
            "tv_gibbs": r.tv_gibbs,
        }
        if include_histogram:
            # Keys become strings in JSON; kept sorted for stable output.
            entry["histogram"] = {str(k): r.tally.histogram[k]
                                  for k in sorted(r.tally.histogram)}
        recs.append(entry)
    return {"provenance": result.provenance, "records": recs}


def emit_json(result: SweepResult, destination, include_histogram: bool = False) -> None:
    """Write the full result with provenance.

    Histograms are omitted unless requested: for n spins each one can hold
    up to 2^n entries, which dwarfs the summary rows for larger problems.
    """
    doc = _result_document(result, include_histogram)
    if hasattr(destination, "write"):
        json.dump(doc, destination, indent=2)
        destination.write("\n")
        return
    with open(destination, "w") as fh:
        json.dump(doc, fh, indent=2)
        fh.write("\n")


def load_sweep_json(source) -> SweepResult:
    """Read back a result written by emit_json."""
    if hasattr(source, "read"):
        doc = json.load(source)
    else:
        with open(source) as fh:
            doc = json.load(fh)
    records = []
    for e in doc["records"]:
        hist = {int(k): v for k, v in e.get("histogram", {}).items()}
        t = Tally(runs=e["runs"], n_isolated=e["n_isolated"],
                  n_clustered=e["n_clustered"], n_excited=e["n_excited"],
                  histogram=hist)
        ci = None
        if e["ratio_ci_low"] is not None:
            ci = (e["ratio_ci_low"], e["ratio_ci_high"])
        s = StatSummary(p_gs=e["p_gs"], p_isolated=e["p_isolated"],
                        p_clustered_per_state=e["p_clustered_per_state"],
                        ratio=e["ratio"], ratio_ci=ci)
        records.append(AlphaRecord(alpha=e["alpha"], tally=t, summary=s,
                                   tv_gibbs=e["tv_gibbs"]))
    return SweepResult(provenance=doc["provenance"], records=records)


def format_csv(result: SweepResult) -> str:
    """The exact CSV text emit_csv would write, as a string."""
    import io

    buf = io.StringIO()
    emit_csv(result, buf)
    return buf.getvalue()


def format_json(result: SweepResult, include_histogram: bool = False) -> str:
    import io

    buf = io.StringIO()
    emit_json(result, buf, include_histogram)
    return buf.getvalue()
