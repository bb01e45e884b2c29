"""Classical rotor and simulated-annealing simulator for annealer benchmarks.

The package models qubits as classical O(2) rotors driven by a two-branch
annealing schedule, reproduces the isolated-vs-clustered ground-state
statistics of a ring-with-pendants gadget family, and ships a CLI for
alpha sweeps, ground-space enumeration, and schedule diagnostics.
"""

__version__ = "0.1.0"

from .analysis import (
    StatSummary,
    Tally,
    empirical_distribution,
    gibbs_distribution,
    summarize,
    tally,
    tv_distance,
    wilson_interval,
)
from .engines import (
    NoiseDraw,
    NoiseModel,
    RotorState,
    RunParams,
    draw_noise,
    metropolis_sweep,
    rotor_energy,
    run_sa,
    run_sa_batch,
    run_sssv,
    run_sssv_batch,
)
from .ising import (
    ENUMERATION_LIMIT,
    Classification,
    GroundSpaceInfo,
    IsingProblem,
    classify,
    energy,
    enumerate_ground_space,
    load_problem,
    make_gadget,
    save_problem,
)
from .rng import SplitMix64, derive_run_seed, mix64
from .runner import (
    AlphaRecord,
    ExperimentConfig,
    SweepResult,
    default_alpha_grid,
    derive_run_seeds,
    emit_csv,
    emit_json,
    load_sweep_json,
    run_experiment,
)
from .schedule import (
    AnnealSchedule,
    SchedulePoint,
    default_schedule,
    load_schedule_csv,
    save_schedule_csv,
)

__all__ = [
    "__version__",
    "AlphaRecord",
    "AnnealSchedule",
    "Classification",
    "ENUMERATION_LIMIT",
    "ExperimentConfig",
    "GroundSpaceInfo",
    "IsingProblem",
    "NoiseDraw",
    "NoiseModel",
    "RotorState",
    "RunParams",
    "SchedulePoint",
    "SplitMix64",
    "StatSummary",
    "SweepResult",
    "Tally",
    "classify",
    "default_alpha_grid",
    "default_schedule",
    "derive_run_seed",
    "derive_run_seeds",
    "draw_noise",
    "emit_csv",
    "emit_json",
    "empirical_distribution",
    "energy",
    "enumerate_ground_space",
    "gibbs_distribution",
    "load_problem",
    "load_schedule_csv",
    "load_sweep_json",
    "make_gadget",
    "metropolis_sweep",
    "mix64",
    "rotor_energy",
    "run_experiment",
    "run_sa",
    "run_sa_batch",
    "run_sssv",
    "run_sssv_batch",
    "save_problem",
    "save_schedule_csv",
    "summarize",
    "tally",
    "tv_distance",
    "wilson_interval",
]
