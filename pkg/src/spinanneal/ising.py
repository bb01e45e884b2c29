"""Ising problems, the benchmark gadget family, and exact ground-space tools.

Energies use the convention E(s) = -sum_i h_i s_i - sum_{i<j} J_ij s_i s_j
with spins in {-1, +1}. Problem units are dimensionless; physical scale
enters only when an engine multiplies by the schedule.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from enum import Enum
from functools import cached_property

import numpy as np

ENUMERATION_LIMIT = 24


class Classification(Enum):
    ISOLATED = "isolated"
    CLUSTERED = "clustered"
    EXCITED = "excited"


@dataclass(frozen=True)
class IsingProblem:
    """Immutable fields/couplings problem on ``n_spins`` spins.

    ``couplings`` keys are (i, j) pairs with i < j, each edge at most once.
    ``core`` marks the ring spins of gadget instances and is None for
    problems without that structure.
    """

    n_spins: int
    fields: dict[int, float] = field(default_factory=dict)
    couplings: dict[tuple[int, int], float] = field(default_factory=dict)
    core: frozenset[int] | None = None

    def __post_init__(self):
        if self.n_spins <= 0:
            raise ValueError("n_spins must be positive")
        for i in self.fields:
            if not 0 <= i < self.n_spins:
                raise ValueError(f"field index {i} out of range")
        seen = set()
        for (i, j) in self.couplings:
            if not (0 <= i < self.n_spins and 0 <= j < self.n_spins):
                raise ValueError(f"coupling ({i},{j}) out of range")
            if i >= j:
                raise ValueError(f"coupling ({i},{j}) must have i < j")
            if (i, j) in seen:
                raise ValueError(f"duplicate coupling ({i},{j})")
            seen.add((i, j))
        if self.core is not None:
            object.__setattr__(self, "core", frozenset(self.core))
            for i in self.core:
                if not 0 <= i < self.n_spins:
                    raise ValueError(f"core index {i} out of range")

    @cached_property
    def h_vector(self) -> np.ndarray:
        h = np.zeros(self.n_spins)
        for i, v in self.fields.items():
            h[i] = v
        h.setflags(write=False)
        return h

    @cached_property
    def edges(self) -> list[tuple[int, int]]:
        """Edge list in sorted order; noise draws and kernels index edges by
        position in this list."""
        return sorted(self.couplings)

    @cached_property
    def j_vector(self) -> np.ndarray:
        j = np.array([self.couplings[e] for e in self.edges], dtype=float)
        j.setflags(write=False)
        return j

    @cached_property
    def adjacency(self) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
        """CSR-style neighbor arrays: (ptr, neighbor index, J value, edge id)."""
        nbrs: list[list[tuple[int, float, int]]] = [[] for _ in range(self.n_spins)]
        for e, (i, j) in enumerate(self.edges):
            v = self.couplings[(i, j)]
            nbrs[i].append((j, v, e))
            nbrs[j].append((i, v, e))
        ptr = np.zeros(self.n_spins + 1, dtype=np.int64)
        idx, val, eid = [], [], []
        for i, lst in enumerate(nbrs):
            ptr[i + 1] = ptr[i] + len(lst)
            for (j, v, e) in lst:
                idx.append(j)
                val.append(v)
                eid.append(e)
        return (ptr, np.array(idx, dtype=np.int64),
                np.array(val, dtype=float), np.array(eid, dtype=np.int64))


def as_spin_config(spins, n_spins: int) -> np.ndarray:
    """Validate and return spins as an int8 array of -1/+1."""
    s = np.asarray(spins)
    if s.shape != (n_spins,):
        raise ValueError(f"expected {n_spins} spins, got shape {s.shape}")
    if not np.all(np.abs(s) == 1):
        raise ValueError("spins must be -1 or +1")
    return s.astype(np.int8)


def energy(problem: IsingProblem, spins) -> float:
    """Exact Ising energy of one configuration, in problem units."""
    s = as_spin_config(spins, problem.n_spins)
    e = -float(np.dot(problem.h_vector, s))
    for (i, j), v in problem.couplings.items():
        e -= v * float(s[i]) * float(s[j])
    return e


def config_to_index(spins) -> int:
    """Pack a configuration into an integer: bit i is set iff spin i is +1."""
    s = np.asarray(spins)
    idx = 0
    for i in range(s.shape[0]):
        if s[i] > 0:
            idx |= 1 << i
    return idx


def configs_to_indices(spins_matrix: np.ndarray) -> np.ndarray:
    """Vectorized config_to_index over a (runs, n_spins) matrix."""
    up = (np.asarray(spins_matrix) > 0).astype(np.uint64)
    weights = np.uint64(1) << np.arange(spins_matrix.shape[1], dtype=np.uint64)
    return up @ weights


def index_to_config(index: int, n_spins: int) -> np.ndarray:
    bits = (index >> np.arange(n_spins)) & 1
    return (2 * bits - 1).astype(np.int8)


def all_energies(problem: IsingProblem) -> np.ndarray:
    """Energies of all 2^n configurations, indexed by config_to_index.

    Guarded by ENUMERATION_LIMIT; the vector for 24 spins already holds 16M
    doubles.
    """
    n = problem.n_spins
    if n > ENUMERATION_LIMIT:
        raise ValueError(f"enumeration limited to {ENUMERATION_LIMIT} spins, got {n}")
    size = 1 << n
    energies = np.zeros(size)
    indices = np.arange(size, dtype=np.uint32)
    spins_cache = {}
    for i, h in problem.fields.items():
        spins_cache[i] = ((indices >> i) & 1).astype(np.float64) * 2.0 - 1.0
        energies -= h * spins_cache[i]
    for (i, j), v in problem.couplings.items():
        si = spins_cache.get(i)
        if si is None:
            si = ((indices >> i) & 1).astype(np.float64) * 2.0 - 1.0
        sj = spins_cache.get(j)
        if sj is None:
            sj = ((indices >> j) & 1).astype(np.float64) * 2.0 - 1.0
        energies -= v * si * sj
    return energies


@dataclass(frozen=True)
class GroundSpaceInfo:
    ground_energy: float
    ground_indices: frozenset[int]
    n_spins: int
    isolated_index: int | None
    clustered_count: int

    @property
    def degeneracy(self) -> int:
        return len(self.ground_indices)

    def ground_states(self) -> list[np.ndarray]:
        return [index_to_config(i, self.n_spins) for i in sorted(self.ground_indices)]


def enumerate_ground_space(problem: IsingProblem, atol: float = 1e-9) -> GroundSpaceInfo:
    """Exhaustively find the ground energy and every minimizer.

    The all-(-1) state is reported as isolated when it is a ground state;
    clustered_count is the number of remaining ground states.
    """
    energies = all_energies(problem)
    e0 = float(energies.min())
    ground = np.flatnonzero(energies <= e0 + atol)
    ground_set = frozenset(int(g) for g in ground)
    isolated = 0 if 0 in ground_set else None  # index 0 encodes all spins -1
    clustered = len(ground_set) - (1 if isolated is not None else 0)
    return GroundSpaceInfo(
        ground_energy=e0,
        ground_indices=ground_set,
        n_spins=problem.n_spins,
        isolated_index=isolated,
        clustered_count=clustered,
    )


def classify(problem: IsingProblem, info: GroundSpaceInfo, spins) -> Classification:
    """Sort one configuration into isolated / clustered / excited."""
    s = as_spin_config(spins, problem.n_spins)
    idx = config_to_index(s)
    if idx not in info.ground_indices:
        return Classification.EXCITED
    if idx == info.isolated_index:
        return Classification.ISOLATED
    return Classification.CLUSTERED


def make_gadget(n_core: int) -> IsingProblem:
    """Degenerate benchmark instance: a ferromagnetic core ring with one
    pendant peripheral per core spin.

    Core spins 0..n_core-1 carry field +1 and form a cycle; peripheral spin
    n_core+i hangs off core spin i with field -1. All couplings are +1. The
    ground space has energy -2*n_core and degeneracy 2^n_core + 1: every
    core-all-up state regardless of peripherals, plus the all-down state.
    """
    if n_core < 3:
        raise ValueError("n_core must be at least 3")
    fields: dict[int, float] = {}
    couplings: dict[tuple[int, int], float] = {}
    for i in range(n_core):
        fields[i] = 1.0
        fields[n_core + i] = -1.0
        a, b = i, (i + 1) % n_core
        couplings[(min(a, b), max(a, b))] = 1.0
        couplings[(i, n_core + i)] = 1.0
    return IsingProblem(
        n_spins=2 * n_core,
        fields=fields,
        couplings=couplings,
        core=frozenset(range(n_core)),
    )


def save_problem(problem: IsingProblem, path) -> None:
    doc = {
        "n_spins": problem.n_spins,
        "h": [[i, v] for i, v in sorted(problem.fields.items())],
        "j": [[i, j, problem.couplings[(i, j)]] for (i, j) in problem.edges],
    }
    if problem.core is not None:
        doc["core"] = sorted(problem.core)
    with open(path, "w") as f:
        json.dump(doc, f, indent=2)
        f.write("\n")


def load_problem(path) -> IsingProblem:
    with open(path) as f:
        doc = json.load(f)
    try:
        n_spins = int(doc["n_spins"])
        fields = {int(i): float(v) for i, v in doc.get("h", [])}
        couplings = {}
        for i, j, v in doc.get("j", []):
            i, j = int(i), int(j)
            if i > j:
                i, j = j, i
            couplings[(i, j)] = float(v)
    except (KeyError, TypeError, ValueError) as exc:
        raise ValueError(f"malformed problem file {path}: {exc}") from exc
    core = frozenset(int(i) for i in doc["core"]) if "core" in doc else None
    return IsingProblem(n_spins=n_spins, fields=fields, couplings=couplings, core=core)
