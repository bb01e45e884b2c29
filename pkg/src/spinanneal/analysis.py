"""Statistics over run outcomes: tallies, ratios, Gibbs comparisons."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .ising import (
    ENUMERATION_LIMIT,
    Classification,
    GroundSpaceInfo,
    IsingProblem,
    all_energies,
    configs_to_indices,
)

Z_95 = 1.959963984540054


def wilson_interval(k: int, n: int, z: float = Z_95) -> tuple[float, float]:
    """Wilson score interval for a binomial proportion k/n."""
    if n <= 0:
        raise ValueError("n must be positive")
    if not 0 <= k <= n:
        raise ValueError("k must lie in [0, n]")
    p = k / n
    denom = 1.0 + z * z / n
    center = (p + z * z / (2 * n)) / denom
    half = (z / denom) * math.sqrt(p * (1 - p) / n + z * z / (4 * n * n))
    # at the boundaries the exact interval endpoint is the boundary itself
    lo = 0.0 if k == 0 else max(0.0, center - half)
    hi = 1.0 if k == n else min(1.0, center + half)
    return lo, hi


@dataclass
class Tally:
    """Outcome counts for a batch of runs on one problem."""

    runs: int = 0
    n_isolated: int = 0
    n_clustered: int = 0
    n_excited: int = 0
    histogram: dict[int, int] = field(default_factory=dict)

    def merge(self, other: "Tally") -> "Tally":
        hist = dict(self.histogram)
        for k, v in other.histogram.items():
            hist[k] = hist.get(k, 0) + v
        return Tally(
            runs=self.runs + other.runs,
            n_isolated=self.n_isolated + other.n_isolated,
            n_clustered=self.n_clustered + other.n_clustered,
            n_excited=self.n_excited + other.n_excited,
            histogram=hist,
        )


def tally(problem: IsingProblem, info: GroundSpaceInfo, configs: np.ndarray) -> Tally:
    """Classify a (runs, n_spins) block of final configurations."""
    configs = np.asarray(configs)
    if configs.ndim == 1:
        configs = configs[None, :]
    if configs.shape[0] == 0:
        raise ValueError("cannot tally an empty batch")
    if configs.shape[1] != problem.n_spins:
        raise ValueError("configuration width does not match problem")
    indices = configs_to_indices(configs)
    ground = info.ground_indices
    iso = info.isolated_index
    n_iso = 0
    n_clu = 0
    hist: dict[int, int] = {}
    vals, counts = np.unique(indices, return_counts=True)
    for v, c in zip(vals.tolist(), counts.tolist()):
        hist[v] = c
        if v in ground:
            if iso is not None and v == iso:
                n_iso += c
            else:
                n_clu += c
    runs = int(configs.shape[0])
    return Tally(
        runs=runs,
        n_isolated=n_iso,
        n_clustered=n_clu,
        n_excited=runs - n_iso - n_clu,
        histogram=hist,
    )


def classify_counts(problem: IsingProblem, info: GroundSpaceInfo,
                    configs: np.ndarray) -> list[Classification]:
    """Per-run labels, same order as the input rows."""
    configs = np.asarray(configs)
    if configs.ndim == 1:
        configs = configs[None, :]
    indices = configs_to_indices(configs)
    out = []
    for v in indices.tolist():
        if v not in info.ground_indices:
            out.append(Classification.EXCITED)
        elif info.isolated_index is not None and v == info.isolated_index:
            out.append(Classification.ISOLATED)
        else:
            out.append(Classification.CLUSTERED)
    return out


@dataclass(frozen=True)
class StatSummary:
    """Derived statistics for one tally.

    ``ratio`` is the isolated probability over the mean per-state
    clustered probability; it is None (undefined) when no clustered state
    was ever observed. With zero isolated hits the ratio is 0.0 and the
    interval still has a positive upper bound.
    """

    p_gs: float
    p_isolated: float
    p_clustered_per_state: float
    ratio: float | None
    ratio_ci: tuple[float, float] | None


def summarize(t: Tally, clustered_count: int) -> StatSummary:
    if t.runs <= 0:
        raise ValueError("cannot summarize an empty tally")
    if clustered_count <= 0:
        raise ValueError("clustered_count must be positive")
    p_gs = (t.n_isolated + t.n_clustered) / t.runs
    p_iso = t.n_isolated / t.runs
    p_clu_per = t.n_clustered / t.runs / clustered_count
    iso_lo, iso_hi = wilson_interval(t.n_isolated, t.runs)
    clu_lo, clu_hi = wilson_interval(t.n_clustered, t.runs)
    if t.n_clustered == 0:
        return StatSummary(p_gs, p_iso, p_clu_per, None, None)
    ratio = p_iso / p_clu_per
    ci = (iso_lo / (clu_hi / clustered_count), iso_hi / (clu_lo / clustered_count))
    return StatSummary(p_gs, p_iso, p_clu_per, ratio, ci)


def gibbs_distribution(problem: IsingProblem, alpha: float, b_final: float,
                       temperature: float) -> np.ndarray:
    """Boltzmann weights over all 2^n configurations at the final point.

    Energies are alpha * B(1) * E_Ising; the max weight is shifted to one
    before exponentiation so small temperatures stay finite.
    """
    if problem.n_spins > ENUMERATION_LIMIT:
        raise ValueError(f"enumeration limited to {ENUMERATION_LIMIT} spins")
    if temperature <= 0:
        raise ValueError("temperature must be positive")
    energies = all_energies(problem) * (alpha * b_final)
    logw = -energies / temperature
    logw -= logw.max()
    w = np.exp(logw)
    return w / w.sum()


def empirical_distribution(t: Tally, n_spins: int) -> np.ndarray:
    """Histogram of final configurations, normalized over all 2^n indices."""
    if n_spins > ENUMERATION_LIMIT:
        raise ValueError(f"enumeration limited to {ENUMERATION_LIMIT} spins")
    if t.runs <= 0:
        raise ValueError("empty tally has no distribution")
    p = np.zeros(2 ** n_spins)
    for idx, c in t.histogram.items():
        p[idx] = c
    return p / t.runs


def tv_distance(p: np.ndarray, q: np.ndarray, atol: float = 1e-9) -> float:
    """Total variation distance between two distributions on the same support."""
    p = np.asarray(p, dtype=float)
    q = np.asarray(q, dtype=float)
    if p.shape != q.shape:
        raise ValueError("distributions must have the same length")
    if np.any(p < -atol) or np.any(q < -atol):
        raise ValueError("distributions must be non-negative")
    if abs(p.sum() - 1.0) > atol or abs(q.sum() - 1.0) > atol:
        raise ValueError("distributions must sum to 1")
    return 0.5 * float(np.abs(p - q).sum())
