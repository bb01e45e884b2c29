"""Annealing schedules A(s), B(s) and their crossings with the temperature.

A schedule is a table of (s, A, B) nodes in GHz over normalized time
s in [0, 1], evaluated by piecewise-linear interpolation. The effective
problem term during a run is alpha * B(s); `crossings` locates where the
transverse term falls below the temperature and where the scaled problem
term first beats it, which is what controls whether the late anneal is
transverse-driven or purely thermal.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np

DEFAULT_NODE_COUNT = 21
DEFAULT_PEAK_GHZ = 30.0
DEFAULT_EXPONENT = 5


@dataclass(frozen=True)
class SchedulePoint:
    A: float
    B: float


@dataclass(frozen=True)
class AnnealSchedule:
    s: np.ndarray
    A: np.ndarray
    B: np.ndarray
    name: str = "unnamed"

    def __post_init__(self):
        s = np.asarray(self.s, dtype=float)
        a = np.asarray(self.A, dtype=float)
        b = np.asarray(self.B, dtype=float)
        if not (s.shape == a.shape == b.shape) or s.ndim != 1 or s.size < 2:
            raise ValueError("schedule needs matching s/A/B arrays with at least 2 nodes")
        if s[0] != 0.0 or s[-1] != 1.0:
            raise ValueError("schedule must span s=0 to s=1")
        if not np.all(np.diff(s) > 0):
            raise ValueError("s values must be strictly increasing")
        if not (np.all(np.isfinite(a)) and np.all(np.isfinite(b))):
            raise ValueError("A and B must be finite")
        if a.min() < 0 or b.min() < 0:
            raise ValueError("A and B must be non-negative")
        for attr, arr in (("s", s), ("A", a), ("B", b)):
            arr.setflags(write=False)
            object.__setattr__(self, attr, arr)

    def evaluate(self, s):
        """Piecewise-linear (A, B) at s; accepts a scalar or an array.

        Scalars come back as a SchedulePoint, arrays as an (A, B) pair.
        """
        s_arr = np.asarray(s, dtype=float)
        if np.any(s_arr < 0) or np.any(s_arr > 1):
            raise ValueError("s must lie in [0, 1]")
        a = np.interp(s_arr, self.s, self.A)
        b = np.interp(s_arr, self.s, self.B)
        if np.isscalar(s) or s_arr.ndim == 0:
            return SchedulePoint(A=float(a), B=float(b))
        return a, b

    def crossings(self, alpha: float, temperature: float) -> tuple[float | None, float | None]:
        """(s_A, s_B): earliest s with A(s) <= T, and with alpha*B(s) >= T.

        Either is None when the threshold is never reached on [0, 1].
        Found by scanning segments and solving linearly inside the first
        segment that brackets the threshold.
        """
        if not 0.0 <= alpha <= 1.0:
            raise ValueError("alpha must lie in [0, 1]")
        if temperature <= 0:
            raise ValueError("temperature must be positive")
        s_a = _first_crossing(self.s, self.A, temperature, downward=True)
        s_b = _first_crossing(self.s, alpha * self.B, temperature, downward=False)
        return s_a, s_b


def _first_crossing(s: np.ndarray, y: np.ndarray, level: float, downward: bool) -> float | None:
    """Earliest s where piecewise-linear y(s) meets `level` from the stated side."""
    hit = (y <= level) if downward else (y >= level)
    if hit[0]:
        return float(s[0])
    for k in range(1, len(s)):
        if hit[k]:
            y0, y1 = y[k - 1], y[k]
            if y1 == y0:
                return float(s[k])
            t = (level - y0) / (y1 - y0)
            return float(s[k - 1] + t * (s[k] - s[k - 1]))
    return None


def default_schedule() -> AnnealSchedule:
    """Built-in synthetic schedule: 21 nodes of A = 30*(1-s)^5, B = 30*s^5 GHz.

    The steep symmetric power law keeps alpha*B(s) below a ~0.2 GHz
    temperature until after the transverse term has died whenever alpha is
    small, while at alpha near 1 the problem term already dominates the
    temperature where A and B cross. Both regimes of the benchmark
    experiments are therefore reachable on one synthetic curve. It is a
    stand-in, not hardware data; fidelity runs should load a measured
    schedule file.
    """
    s = np.arange(DEFAULT_NODE_COUNT) / (DEFAULT_NODE_COUNT - 1)
    a = DEFAULT_PEAK_GHZ * (1 - s) ** DEFAULT_EXPONENT
    b = DEFAULT_PEAK_GHZ * s ** DEFAULT_EXPONENT
    return AnnealSchedule(s=s, A=a, B=b, name="default")


CSV_HEADER = ["s", "A_GHz", "B_GHz"]


def save_schedule_csv(schedule: AnnealSchedule, path) -> None:
    with open(path, "w", newline="") as f:
        writer = csv.writer(f)
        writer.writerow(CSV_HEADER)
        for row in zip(schedule.s, schedule.A, schedule.B):
            writer.writerow([repr(float(v)) for v in row])


def load_schedule_csv(path, name: str | None = None) -> AnnealSchedule:
    with open(path, newline="") as f:
        reader = csv.reader(f)
        header = next(reader, None)
        if header is None or [h.strip() for h in header] != CSV_HEADER:
            raise ValueError(f"schedule file {path} must start with header {','.join(CSV_HEADER)}")
        rows = []
        for lineno, row in enumerate(reader, start=2):
            if not row or all(not c.strip() for c in row):
                continue
            if len(row) != 3:
                raise ValueError(f"{path}:{lineno}: expected 3 columns")
            try:
                rows.append(tuple(float(c) for c in row))
            except ValueError as exc:
                raise ValueError(f"{path}:{lineno}: {exc}") from exc
    if not rows:
        raise ValueError(f"schedule file {path} has no data rows")
    data = np.array(rows)
    label = name if name is not None else str(path)
    return AnnealSchedule(s=data[:, 0], A=data[:, 1], B=data[:, 2], name=label)
