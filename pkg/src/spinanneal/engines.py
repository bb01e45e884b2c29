"""Rotor-model and simulated-annealing engines.

The rotor model treats each qubit as a classical O(2) magnet with angle
theta in [0, pi], evolving by Metropolis updates under

    H(t) = sign_t * A(t) * sum_i sin(theta_i)
           - sum_i (B(t) * alpha * h_i + eps_i) * cos(theta_i)
           - sum_{i<j} (B(t) * alpha * J_ij + delta_ij) * cos(theta_i) * cos(theta_j)

where eps_i and delta_ij are per-run Gaussian calibration offsets. The
offsets are deliberately not scaled by B or alpha: they model programming
error at fixed physical size, which is what lets them dominate when alpha
is small. The transverse sign defaults to -1 so the strong early A-term
holds rotors at the equator (the x-polarized start); the +1 convention is
available for comparison.

The SA baseline is the same schedule-driven Metropolis with spins
restricted to {-1, +1} and no transverse term: energy alpha * B(s) * E_Ising
at fixed temperature.

Hot loops are compiled with numba. Every run owns one SplitMix64 stream
seeded per run, consumed in a fixed documented order (noise draw, then per
sweep: visit shuffle, then per spin: proposal uniform and acceptance
uniform), so single runs, batched runs, and any thread count all produce
bit-identical results.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numba
import numpy as np
from numba import njit, prange

from .ising import IsingProblem, as_spin_config
from .rng import SplitMix64
from .schedule import AnnealSchedule, SchedulePoint

# The default TBB layer hard-requires a recent TBB; workqueue is always
# built in, and batch results do not depend on the layer because each run
# writes only its own output rows.
numba.config.THREADING_LAYER = "workqueue"

U64 = np.uint64
_GAMMA = U64(0x9E3779B97F4A7C15)
_MIX1 = U64(0xBF58476D1CE4E5B9)
_MIX2 = U64(0x94D049BB133111EB)
_INV53 = 1.0 / 9007199254740992.0  # 2^-53


@dataclass(frozen=True)
class NoiseModel:
    """Standard deviations (GHz) of the per-run calibration offsets."""

    sigma_h: float = 0.0
    sigma_j: float = 0.0

    def __post_init__(self):
        if not (math.isfinite(self.sigma_h) and math.isfinite(self.sigma_j)):
            raise ValueError("noise sigmas must be finite")
        if self.sigma_h < 0 or self.sigma_j < 0:
            raise ValueError("noise sigmas must be non-negative")


@dataclass(frozen=True)
class NoiseDraw:
    """One realization of the calibration offsets for a specific problem.

    ``eps_coupling`` is aligned with ``problem.edges`` order.
    """

    eps_field: np.ndarray
    eps_coupling: np.ndarray

    def coupling_map(self, problem: IsingProblem) -> dict[tuple[int, int], float]:
        return {e: float(v) for e, v in zip(problem.edges, self.eps_coupling)}


@dataclass(frozen=True)
class RunParams:
    alpha: float
    sweeps: int = 1500
    temperature: float = 0.22
    transverse_sign: int = -1
    seed: int = 0

    def __post_init__(self):
        if not 0.0 <= self.alpha <= 1.0:
            raise ValueError("alpha must lie in [0, 1]")
        if self.sweeps < 2:
            raise ValueError("sweeps must be at least 2")
        if self.temperature <= 0:
            raise ValueError("temperature must be positive")
        if self.transverse_sign not in (-1, 1):
            raise ValueError("transverse_sign must be -1 or +1")


@dataclass
class RotorState:
    theta: np.ndarray

    def __post_init__(self):
        t = np.asarray(self.theta, dtype=float)
        if t.ndim != 1:
            raise ValueError("theta must be a vector")
        if np.any(t < 0) or np.any(t > np.pi):
            raise ValueError("angles must lie in [0, pi]")
        self.theta = t

    def project(self) -> np.ndarray:
        """Spins from angles: +1 where cos(theta) >= 0 (ties resolve to +1)."""
        return np.where(np.cos(self.theta) >= 0.0, 1, -1).astype(np.int8)


# --- compiled stream primitives (bit-compatible with rng.SplitMix64) ---


@njit(cache=True)
def _next_u64(state):
    state = state + _GAMMA
    z = state
    z = (z ^ (z >> U64(30))) * _MIX1
    z = (z ^ (z >> U64(27))) * _MIX2
    return state, z ^ (z >> U64(31))


@njit(cache=True)
def _next_unit(state):
    state, v = _next_u64(state)
    return state, (v >> U64(11)) * _INV53


@njit(cache=True)
def _fill_normals(state, out, sigma):
    for i in range(out.shape[0]):
        state, u1 = _next_unit(state)
        state, u2 = _next_unit(state)
        out[i] = sigma * np.sqrt(-2.0 * np.log(1.0 - u1)) * np.cos(2.0 * np.pi * u2)
    return state


@njit(cache=True)
def _shuffled_order(state, order):
    n = order.shape[0]
    for i in range(n):
        order[i] = i
    for i in range(n - 1, 0, -1):
        state, v = _next_u64(state)
        j = np.int64(v % U64(i + 1))
        tmp = order[i]
        order[i] = order[j]
        order[j] = tmp
    return state


# --- rotor kernels ---


@njit(cache=True)
def _rotor_sweep(state, theta, cos_t, sin_t, h, nbr_ptr, nbr_idx, nbr_j, nbr_edge,
                 a, b, alpha, temp, tsign, eps_h, eps_j, order):
    """One Metropolis sweep in shuffled order; mutates theta/cos_t/sin_t."""
    n = theta.shape[0]
    state = _shuffled_order(state, order)
    ba = b * alpha
    for k in range(n):
        i = order[k]
        state, u_prop = _next_unit(state)
        new_theta = np.pi * u_prop
        new_cos = np.cos(new_theta)
        new_sin = np.sin(new_theta)
        f = ba * h[i] + eps_h[i]
        z = 0.0
        for p in range(nbr_ptr[i], nbr_ptr[i + 1]):
            z += (ba * nbr_j[p] + eps_j[nbr_edge[p]]) * cos_t[nbr_idx[p]]
        d_e = tsign * a * (new_sin - sin_t[i]) - (f + z) * (new_cos - cos_t[i])
        state, u_acc = _next_unit(state)
        if d_e <= 0.0 or u_acc < np.exp(-d_e / temp):
            theta[i] = new_theta
            cos_t[i] = new_cos
            sin_t[i] = new_sin
    return state


@njit(cache=True)
def _rotor_run(seed, h, nbr_ptr, nbr_idx, nbr_j, nbr_edge, a_arr, b_arr,
               alpha, temp, tsign, sigma_h, sigma_j, frozen_eps_h, frozen_eps_j,
               use_frozen, theta_out, spins_out):
    """One full anneal from theta = pi/2; returns the final stream state."""
    n = h.shape[0]
    state = U64(seed)
    eps_h = np.zeros(n)
    eps_j = np.zeros(frozen_eps_j.shape[0])
    if use_frozen:
        for i in range(n):
            eps_h[i] = frozen_eps_h[i]
        for e in range(eps_j.shape[0]):
            eps_j[e] = frozen_eps_j[e]
    else:
        if sigma_h > 0.0:
            state = _fill_normals(state, eps_h, sigma_h)
        if sigma_j > 0.0:
            state = _fill_normals(state, eps_j, sigma_j)
    theta = np.full(n, np.pi / 2.0)
    cos_t = np.cos(theta)
    sin_t = np.sin(theta)
    order = np.empty(n, dtype=np.int64)
    sweeps = a_arr.shape[0]
    for k in range(sweeps):
        state = _rotor_sweep(state, theta, cos_t, sin_t, h, nbr_ptr, nbr_idx,
                             nbr_j, nbr_edge, a_arr[k], b_arr[k], alpha, temp,
                             tsign, eps_h, eps_j, order)
    for i in range(n):
        theta_out[i] = theta[i]
        spins_out[i] = 1 if cos_t[i] >= 0.0 else -1
    return state


@njit(cache=True, parallel=True)
def _rotor_batch(seeds, h, nbr_ptr, nbr_idx, nbr_j, nbr_edge, a_arr, b_arr,
                 alpha, temp, tsign, sigma_h, sigma_j, frozen_eps_h, frozen_eps_j,
                 use_frozen, theta_out, spins_out):
    for r in prange(seeds.shape[0]):
        _rotor_run(seeds[r], h, nbr_ptr, nbr_idx, nbr_j, nbr_edge, a_arr, b_arr,
                   alpha, temp, tsign, sigma_h, sigma_j, frozen_eps_h,
                   frozen_eps_j, use_frozen, theta_out[r], spins_out[r])


# --- SA kernels ---


@njit(cache=True)
def _sa_run(seed, h, nbr_ptr, nbr_idx, nbr_j, b_arr, alpha, temp,
            init_spins, use_init, spins_out):
    n = h.shape[0]
    state = U64(seed)
    spins = np.empty(n, dtype=np.int8)
    if use_init:
        for i in range(n):
            spins[i] = init_spins[i]
    else:
        for i in range(n):
            state, u = _next_unit(state)
            spins[i] = 1 if u < 0.5 else -1
    order = np.empty(n, dtype=np.int64)
    for k in range(b_arr.shape[0]):
        c = b_arr[k] * alpha
        state = _shuffled_order(state, order)
        for idx in range(n):
            i = order[idx]
            local = h[i]
            for p in range(nbr_ptr[i], nbr_ptr[i + 1]):
                local += nbr_j[p] * spins[nbr_idx[p]]
            d_e = 2.0 * c * spins[i] * local
            state, u_acc = _next_unit(state)
            if d_e <= 0.0 or u_acc < np.exp(-d_e / temp):
                spins[i] = -spins[i]
    for i in range(n):
        spins_out[i] = spins[i]
    return state


@njit(cache=True, parallel=True)
def _sa_batch(seeds, h, nbr_ptr, nbr_idx, nbr_j, b_arr, alpha, temp,
              init_spins, use_init, spins_out):
    for r in prange(seeds.shape[0]):
        _sa_run(seeds[r], h, nbr_ptr, nbr_idx, nbr_j, b_arr, alpha, temp,
                init_spins, use_init, spins_out[r])


# --- Python API ---


def rotor_energy(problem: IsingProblem, state: RotorState, point: SchedulePoint,
                 params: RunParams, noise: NoiseDraw | None = None) -> float:
    """Full rotor Hamiltonian (GHz) of one state at one schedule point."""
    theta = state.theta
    if theta.shape[0] != problem.n_spins:
        raise ValueError("state size does not match problem")
    eps_h, eps_j = _noise_arrays(problem, noise)
    cos_t = np.cos(theta)
    e = params.transverse_sign * point.A * float(np.sin(theta).sum())
    e -= float(np.dot(point.B * params.alpha * problem.h_vector + eps_h, cos_t))
    for e_idx, (i, j) in enumerate(problem.edges):
        coupling = point.B * params.alpha * problem.j_vector[e_idx] + eps_j[e_idx]
        e -= coupling * cos_t[i] * cos_t[j]
    return e


def _noise_arrays(problem: IsingProblem, noise: NoiseDraw | None) -> tuple[np.ndarray, np.ndarray]:
    m = len(problem.edges)
    if noise is None:
        return np.zeros(problem.n_spins), np.zeros(m)
    eps_h = np.asarray(noise.eps_field, dtype=float)
    eps_j = np.asarray(noise.eps_coupling, dtype=float)
    if eps_h.shape != (problem.n_spins,) or eps_j.shape != (m,):
        raise ValueError("noise draw does not match problem dimensions")
    return eps_h, eps_j


def draw_noise(problem: IsingProblem, model: NoiseModel, rng: SplitMix64) -> NoiseDraw:
    """Fresh offsets: fields first, then couplings in problem.edges order.

    Zero-sigma components consume nothing from the stream, mirroring the
    compiled kernels exactly.
    """
    n, m = problem.n_spins, len(problem.edges)
    eps_h = np.zeros(n)
    eps_j = np.zeros(m)
    if model.sigma_h > 0.0:
        for i in range(n):
            eps_h[i] = rng.normal(model.sigma_h)
    if model.sigma_j > 0.0:
        for e in range(m):
            eps_j[e] = rng.normal(model.sigma_j)
    return NoiseDraw(eps_field=eps_h, eps_coupling=eps_j)


def metropolis_sweep(problem: IsingProblem, state: RotorState, point: SchedulePoint,
                     params: RunParams, noise: NoiseDraw | None, rng: SplitMix64) -> RotorState:
    """One shuffled Metropolis sweep; returns the updated state.

    Proposals are uniform on [0, pi]; the acceptance uniform is always
    drawn, even for downhill moves, to keep stream positions fixed.
    """
    eps_h, eps_j = _noise_arrays(problem, noise)
    theta = np.array(state.theta, dtype=float)
    cos_t = np.cos(theta)
    sin_t = np.sin(theta)
    ptr, idx, val, eid = problem.adjacency
    order = np.empty(problem.n_spins, dtype=np.int64)
    end_state = _rotor_sweep(U64(rng.state), theta, cos_t, sin_t,
                             problem.h_vector, ptr, idx, val, eid,
                             point.A, point.B, params.alpha, params.temperature,
                             float(params.transverse_sign), eps_h, eps_j, order)
    rng.state = int(end_state)
    return RotorState(theta=theta)


def _schedule_arrays(schedule: AnnealSchedule, sweeps: int) -> tuple[np.ndarray, np.ndarray]:
    s_values = np.arange(sweeps) / (sweeps - 1)
    return schedule.evaluate(s_values)


def run_sssv(problem: IsingProblem, schedule: AnnealSchedule, params: RunParams,
             noise_model: NoiseModel | None = None, rng: SplitMix64 | None = None,
             frozen_noise: NoiseDraw | None = None) -> tuple[np.ndarray, RotorState]:
    """One rotor anneal; returns (projected spins, final angles).

    The stream comes from ``rng`` when given (and is left positioned after
    the run), otherwise from ``params.seed``. ``frozen_noise`` bypasses the
    per-run draw entirely.
    """
    model = noise_model or NoiseModel()
    stream = rng if rng is not None else SplitMix64(params.seed)
    a_arr, b_arr = _schedule_arrays(schedule, params.sweeps)
    ptr, idx, val, eid = problem.adjacency
    theta_out = np.empty(problem.n_spins)
    spins_out = np.empty(problem.n_spins, dtype=np.int8)
    if frozen_noise is not None:
        eps_h, eps_j = _noise_arrays(problem, frozen_noise)
        use_frozen = True
    else:
        eps_h, eps_j = np.zeros(problem.n_spins), np.zeros(len(problem.edges))
        use_frozen = False
    end_state = _rotor_run(U64(stream.state), problem.h_vector,
                           ptr, idx, val, eid, a_arr, b_arr,
                           params.alpha, params.temperature, float(params.transverse_sign),
                           model.sigma_h, model.sigma_j, eps_h, eps_j, use_frozen,
                           theta_out, spins_out)
    stream.state = int(end_state)
    return spins_out, RotorState(theta=theta_out)


def run_sa(problem: IsingProblem, schedule: AnnealSchedule, params: RunParams,
           rng: SplitMix64 | None = None, initial=None) -> np.ndarray:
    """One SA anneal; returns the final spin configuration.

    ``initial`` fixes the starting configuration (skipping the random-start
    draws); by default spins start uniformly at random.
    """
    stream = rng if rng is not None else SplitMix64(params.seed)
    a_arr, b_arr = _schedule_arrays(schedule, params.sweeps)
    ptr, idx, val, _ = problem.adjacency
    spins_out = np.empty(problem.n_spins, dtype=np.int8)
    if initial is not None:
        init = as_spin_config(initial, problem.n_spins)
        use_init = True
    else:
        init = np.zeros(problem.n_spins, dtype=np.int8)
        use_init = False
    end_state = _sa_run(U64(stream.state), problem.h_vector, ptr, idx, val, b_arr,
                        params.alpha, params.temperature, init, use_init, spins_out)
    stream.state = int(end_state)
    return spins_out


def run_sssv_batch(problem: IsingProblem, schedule: AnnealSchedule, params: RunParams,
                   noise_model: NoiseModel, seeds: np.ndarray,
                   frozen_noise: NoiseDraw | None = None) -> tuple[np.ndarray, np.ndarray]:
    """Many independent rotor runs; returns (spins, thetas) row per run.

    Row r is bit-identical to run_sssv with seed seeds[r] regardless of
    thread count, because each run owns its stream and its output rows.
    """
    seeds = np.ascontiguousarray(seeds, dtype=np.uint64)
    a_arr, b_arr = _schedule_arrays(schedule, params.sweeps)
    ptr, idx, val, eid = problem.adjacency
    runs = seeds.shape[0]
    theta_out = np.empty((runs, problem.n_spins))
    spins_out = np.empty((runs, problem.n_spins), dtype=np.int8)
    if frozen_noise is not None:
        eps_h, eps_j = _noise_arrays(problem, frozen_noise)
        use_frozen = True
    else:
        eps_h, eps_j = np.zeros(problem.n_spins), np.zeros(len(problem.edges))
        use_frozen = False
    _rotor_batch(seeds, problem.h_vector, ptr, idx, val, eid, a_arr, b_arr,
                 params.alpha, params.temperature, float(params.transverse_sign),
                 noise_model.sigma_h, noise_model.sigma_j, eps_h, eps_j,
                 use_frozen, theta_out, spins_out)
    return spins_out, theta_out


def run_sa_batch(problem: IsingProblem, schedule: AnnealSchedule, params: RunParams,
                 seeds: np.ndarray) -> np.ndarray:
    """Many independent SA runs; returns one spin row per run."""
    seeds = np.ascontiguousarray(seeds, dtype=np.uint64)
    a_arr, b_arr = _schedule_arrays(schedule, params.sweeps)
    ptr, idx, val, _ = problem.adjacency
    runs = seeds.shape[0]
    spins_out = np.empty((runs, problem.n_spins), dtype=np.int8)
    init = np.zeros(problem.n_spins, dtype=np.int8)
    _sa_batch(seeds, problem.h_vector, ptr, idx, val, b_arr,
              params.alpha, params.temperature, init, False, spins_out)
    return spins_out
