"""Rotor and SA engine behavior, stream layout, and equilibrium physics."""

import numpy as np
import pytest

import spinanneal as sp
from spinanneal.rng import SplitMix64
from spinanneal.schedule import SchedulePoint


def mirror_rotor_run(problem, schedule, params, noise_model):
    """Pure-Python replica of run_sssv, consuming the stream step by step.

    Any divergence from the compiled kernel, in stream order or in the
    accept rule, shows up as a bitwise mismatch in the test below.
    """
    n = problem.n_spins
    rng = SplitMix64(params.seed)
    eps_h = np.zeros(n)
    eps_j = np.zeros(len(problem.edges))
    if noise_model.sigma_h > 0:
        for i in range(n):
            eps_h[i] = rng.normal(noise_model.sigma_h)
    if noise_model.sigma_j > 0:
        for e in range(len(problem.edges)):
            eps_j[e] = rng.normal(noise_model.sigma_j)
    theta = np.full(n, np.pi / 2)
    cos_t = np.cos(theta)
    sin_t = np.sin(theta)
    ptr, idx, val, eid = problem.adjacency
    a_arr, b_arr = schedule.evaluate(np.arange(params.sweeps) / (params.sweeps - 1))
    for k in range(params.sweeps):
        order = _mirror_shuffle(rng, n)
        ba = b_arr[k] * params.alpha
        for pos in range(n):
            i = order[pos]
            nt = np.pi * rng.uniform()
            nc, ns = np.cos(nt), np.sin(nt)
            f = ba * problem.h_vector[i] + eps_h[i]
            z = 0.0
            for p in range(ptr[i], ptr[i + 1]):
                z += (ba * val[p] + eps_j[eid[p]]) * cos_t[idx[p]]
            d_e = params.transverse_sign * a_arr[k] * (ns - sin_t[i]) \
                - (f + z) * (nc - cos_t[i])
            u_acc = rng.uniform()
            if d_e <= 0.0 or u_acc < np.exp(-d_e / params.temperature):
                theta[i] = nt
                cos_t[i] = nc
                sin_t[i] = ns
    spins = np.where(cos_t >= 0.0, 1, -1).astype(np.int8)
    return spins, theta


def _mirror_shuffle(rng, n):
    order = list(range(n))
    for i in range(n - 1, 0, -1):
        j = rng.next_u64() % (i + 1)
        order[i], order[j] = order[j], order[i]
    return order


def mirror_sa_run(problem, schedule, params):
    n = problem.n_spins
    rng = SplitMix64(params.seed)
    spins = np.empty(n, dtype=np.int8)
    for i in range(n):
        spins[i] = 1 if rng.uniform() < 0.5 else -1
    ptr, idx, val, _ = problem.adjacency
    _, b_arr = schedule.evaluate(np.arange(params.sweeps) / (params.sweeps - 1))
    for k in range(params.sweeps):
        c = b_arr[k] * params.alpha
        order = _mirror_shuffle(rng, n)
        for pos in range(n):
            i = order[pos]
            local = problem.h_vector[i]
            for p in range(ptr[i], ptr[i + 1]):
                local += val[p] * spins[idx[p]]
            d_e = 2.0 * c * spins[i] * local
            u = rng.uniform()
            if d_e <= 0.0 or u < np.exp(-d_e / params.temperature):
                spins[i] = -spins[i]
    return spins


# --- rotor_energy ---


def test_rotor_energy_equator(gadget4):
    state = sp.RotorState(theta=np.full(8, np.pi / 2))
    point = SchedulePoint(A=3.0, B=17.0)
    params = sp.RunParams(alpha=0.6, seed=0)
    e = sp.rotor_energy(gadget4, state, point, params)
    assert e == pytest.approx(-3.0 * 8, abs=1e-12)
    params_plus = sp.RunParams(alpha=0.6, transverse_sign=1, seed=0)
    assert sp.rotor_energy(gadget4, state, point, params_plus) == pytest.approx(3.0 * 8, abs=1e-12)


def test_rotor_energy_reduces_to_ising(gadget4):
    """At poles the rotor Hamiltonian is the scaled binary energy."""
    rng = np.random.default_rng(8)
    params = sp.RunParams(alpha=0.85, seed=0)
    for _ in range(20):
        spins = rng.choice([-1, 1], size=8)
        theta = np.where(spins > 0, 0.0, np.pi)
        state = sp.RotorState(theta=theta)
        point = SchedulePoint(A=float(rng.uniform(0, 30)), B=float(rng.uniform(0, 30)))
        e = sp.rotor_energy(gadget4, state, point, params)
        assert e == pytest.approx(point.B * 0.85 * sp.energy(gadget4, spins), abs=1e-9)


def test_rotor_energy_ground_value(gadget4):
    state = sp.RotorState(theta=np.full(8, np.pi))
    point = SchedulePoint(A=0.0, B=1.0)
    params = sp.RunParams(alpha=1.0, seed=0)
    assert sp.rotor_energy(gadget4, state, point, params) == pytest.approx(-8.0, abs=1e-12)


def test_rotor_energy_includes_noise(gadget4):
    state = sp.RotorState(theta=np.zeros(8))  # all cos = +1
    point = SchedulePoint(A=0.0, B=0.0)
    params = sp.RunParams(alpha=1.0, seed=0)
    noise = sp.NoiseDraw(eps_field=np.full(8, 0.5),
                         eps_coupling=np.zeros(len(gadget4.edges)))
    # only the eps terms survive: -sum(eps_i * cos) = -4
    assert sp.rotor_energy(gadget4, state, point, params, noise) == pytest.approx(-4.0)


def test_rotor_energy_dimension_mismatch(gadget4):
    state = sp.RotorState(theta=np.zeros(5))
    with pytest.raises(ValueError):
        sp.rotor_energy(gadget4, state, SchedulePoint(1.0, 1.0),
                        sp.RunParams(alpha=1.0, seed=0))


# --- local vs global energy ---


def test_local_delta_matches_global(gadget4):
    """The kernel's local dE formula must equal the full energy difference."""
    rng = np.random.default_rng(17)
    params = sp.RunParams(alpha=0.7, temperature=0.22, seed=0)
    point = SchedulePoint(A=2.3, B=11.0)
    stream = SplitMix64(55)
    noise = sp.draw_noise(gadget4, sp.NoiseModel(0.24, 0.1), stream)
    ptr, idx, val, eid = gadget4.adjacency
    ba = point.B * params.alpha
    for _ in range(200):
        theta = rng.uniform(0, np.pi, size=8)
        state = sp.RotorState(theta=theta)
        i = int(rng.integers(0, 8))
        new_t = float(rng.uniform(0, np.pi))
        cos_t = np.cos(theta)
        f = ba * gadget4.h_vector[i] + noise.eps_field[i]
        z = 0.0
        for p in range(ptr[i], ptr[i + 1]):
            z += (ba * val[p] + noise.eps_coupling[eid[p]]) * cos_t[idx[p]]
        local = params.transverse_sign * point.A * (np.sin(new_t) - np.sin(theta[i])) \
            - (f + z) * (np.cos(new_t) - np.cos(theta[i]))
        theta2 = theta.copy()
        theta2[i] = new_t
        global_delta = sp.rotor_energy(gadget4, sp.RotorState(theta=theta2), point, params, noise) \
            - sp.rotor_energy(gadget4, state, point, params, noise)
        assert abs(local - global_delta) < 1e-9


# --- stream layout (bitwise mirrors) ---


def test_run_sssv_matches_python_mirror():
    g3 = sp.make_gadget(3)
    sched = sp.default_schedule()
    nm = sp.NoiseModel(sigma_h=0.3, sigma_j=0.2)
    for seed in (1, 99, 123456789):
        for tsign in (-1, 1):
            params = sp.RunParams(alpha=0.7, sweeps=40, temperature=0.22,
                                  transverse_sign=tsign, seed=seed)
            kern_spins, kern_state = sp.run_sssv(g3, sched, params, nm)
            mir_spins, mir_theta = mirror_rotor_run(g3, sched, params, nm)
            assert np.array_equal(kern_spins, mir_spins)
            assert np.array_equal(kern_state.theta, mir_theta)


def test_run_sa_matches_python_mirror():
    g3 = sp.make_gadget(3)
    sched = sp.default_schedule()
    for seed in (4, 71, 98765):
        params = sp.RunParams(alpha=1.0, sweeps=60, temperature=0.22, seed=seed)
        assert np.array_equal(sp.run_sa(g3, sched, params),
                              mirror_sa_run(g3, sched, params))


def test_metropolis_sweep_advances_shared_stream(gadget4):
    """The Python-level sweep resumes the caller's stream where it left off."""
    rng = SplitMix64(2024)
    state = sp.RotorState(theta=np.linspace(0.1, 3.0, 8))
    params = sp.RunParams(alpha=0.5, sweeps=2, temperature=0.3, seed=0)
    point = SchedulePoint(A=1.0, B=2.0)
    out = sp.metropolis_sweep(gadget4, state, point, params, None, rng)
    assert out.theta.shape == (8,)
    # stream advanced by exactly (n-1) shuffle + 2n decision draws
    fresh = SplitMix64(2024)
    for _ in range(7 + 16):
        fresh.next_u64()
    assert rng.state == fresh.state


# --- sweep behavior ---


def test_sweep_t_infinite_accepts_everything(gadget4):
    rng = SplitMix64(3)
    theta0 = np.linspace(0.2, 2.9, 8)
    params = sp.RunParams(alpha=1.0, sweeps=2, temperature=1e12, seed=0)
    out = sp.metropolis_sweep(gadget4, sp.RotorState(theta=theta0),
                              SchedulePoint(A=30.0, B=30.0), params, None, rng)
    assert np.all(out.theta != theta0)
    assert np.all((out.theta >= 0) & (out.theta <= np.pi))


def test_sweep_flat_hamiltonian_accepts_everything(gadget4):
    rng = SplitMix64(9)
    theta0 = np.linspace(0.2, 2.9, 8)
    params = sp.RunParams(alpha=1.0, sweeps=2, temperature=0.22, seed=0)
    out = sp.metropolis_sweep(gadget4, sp.RotorState(theta=theta0),
                              SchedulePoint(A=0.0, B=0.0), params, None, rng)
    assert np.all(out.theta != theta0)


def test_single_rotor_equilibrium_quick(const_schedule):
    """Chain samples vs numerical quadrature of the Boltzmann density.

    Reduced-size version of the full acceptance check: 1e5 independent
    chains, 300 burn-in sweeps, 50 bins.
    """
    prob = sp.IsingProblem(n_spins=1, fields={0: 1.0}, couplings={})
    params = sp.RunParams(alpha=1.0, sweeps=300, temperature=0.22, seed=1)
    seeds = sp.derive_run_seeds(777, 0, 100000)
    _, thetas = sp.run_sssv_batch(prob, const_schedule, params, sp.NoiseModel(), seeds)
    tv = _tv_against_quadrature(thetas[:, 0], temperature=0.22, nbins=50)
    assert tv < 0.02


def _tv_against_quadrature(samples, temperature, nbins):
    grid = np.linspace(0.0, np.pi, 200001)
    w = np.exp(np.cos(grid) / temperature)
    cdf = np.concatenate([[0.0], np.cumsum((w[1:] + w[:-1]) * 0.5 * np.diff(grid))])
    cdf /= cdf[-1]
    edges = np.linspace(0.0, np.pi, nbins + 1)
    oracle = np.diff(np.interp(edges, grid, cdf))
    counts, _ = np.histogram(samples, bins=edges)
    emp = counts / counts.sum()
    return 0.5 * np.abs(emp - oracle).sum()


def test_theta_stays_in_range(gadget4, default_sched):
    params = sp.RunParams(alpha=0.4, sweeps=200, temperature=0.22, seed=12)
    _, state = sp.run_sssv(gadget4, default_sched, params, sp.NoiseModel(0.24, 0.0))
    assert np.all(state.theta >= 0.0)
    assert np.all(state.theta <= np.pi)


def test_projection_rule():
    state = sp.RotorState(theta=np.array([0.0, np.pi, np.pi / 2, 1.0, 2.5]))
    assert list(state.project()) == [1, -1, 1, 1, -1]


def test_run_sssv_deterministic(gadget4, default_sched):
    params = sp.RunParams(alpha=0.3, sweeps=80, temperature=0.22, seed=4242)
    nm = sp.NoiseModel(0.24, 0.0)
    s1, t1 = sp.run_sssv(gadget4, default_sched, params, nm)
    s2, t2 = sp.run_sssv(gadget4, default_sched, params, nm)
    assert np.array_equal(s1, s2)
    assert np.array_equal(t1.theta, t2.theta)


def test_batch_rows_match_single_runs(gadget4, default_sched):
    nm = sp.NoiseModel(0.24, 0.1)
    params = sp.RunParams(alpha=0.5, sweeps=60, temperature=0.22, seed=0)
    seeds = sp.derive_run_seeds(9, 0, 20)
    batch_spins, batch_theta = sp.run_sssv_batch(gadget4, default_sched, params, nm, seeds)
    for r in (0, 7, 19):
        p = sp.RunParams(alpha=0.5, sweeps=60, temperature=0.22, seed=int(seeds[r]))
        s, t = sp.run_sssv(gadget4, default_sched, p, nm)
        assert np.array_equal(s, batch_spins[r])
        assert np.array_equal(t.theta, batch_theta[r])


def test_sa_batch_rows_match_single_runs(gadget4, default_sched):
    params = sp.RunParams(alpha=1.0, sweeps=60, temperature=0.22, seed=0)
    seeds = sp.derive_run_seeds(10, 0, 20)
    batch = sp.run_sa_batch(gadget4, default_sched, params, seeds)
    for r in (0, 11, 19):
        p = sp.RunParams(alpha=1.0, sweeps=60, temperature=0.22, seed=int(seeds[r]))
        assert np.array_equal(sp.run_sa(gadget4, default_sched, p), batch[r])


def test_alpha_zero_projects_uniformly(default_sched):
    """With no problem term the final spins are coin flips per site."""
    g3 = sp.make_gadget(3)
    params = sp.RunParams(alpha=0.0, sweeps=200, temperature=0.22, seed=0)
    seeds = sp.derive_run_seeds(31, 0, 10000)
    spins, _ = sp.run_sssv_batch(g3, default_sched, params, sp.NoiseModel(), seeds)
    # each spin individually unbiased
    means = spins.mean(axis=0)
    assert np.all(np.abs(means) < 4 / np.sqrt(10000))
    # and the joint distribution close to uniform over 64 configurations
    info = sp.enumerate_ground_space(g3)
    t = sp.tally(g3, info, spins)
    emp = sp.empirical_distribution(t, 6)
    uniform = np.full(64, 1 / 64)
    assert sp.tv_distance(emp, uniform) < 0.1


# --- noise draws ---


def test_draw_noise_zero_sigma_draws_nothing(gadget4):
    rng = SplitMix64(77)
    before = rng.state
    d = sp.draw_noise(gadget4, sp.NoiseModel(0.0, 0.0), rng)
    assert rng.state == before
    assert np.all(d.eps_field == 0.0)
    assert np.all(d.eps_coupling == 0.0)


def test_draw_noise_order_and_values(gadget4):
    """Fields are drawn first, then couplings in sorted edge order."""
    rng = SplitMix64(123)
    d = sp.draw_noise(gadget4, sp.NoiseModel(0.24, 0.1), rng)
    ref = SplitMix64(123)
    for i in range(8):
        assert d.eps_field[i] == ref.normal(0.24)
    for e in range(len(gadget4.edges)):
        assert d.eps_coupling[e] == ref.normal(0.1)


def test_draw_noise_statistics(gadget4):
    rng = SplitMix64(55)
    vals = []
    for _ in range(12500):
        vals.extend(sp.draw_noise(gadget4, sp.NoiseModel(0.24, 0.0), rng).eps_field)
    vals = np.array(vals)
    assert vals.size == 100000
    assert abs(vals.mean()) < 3 * 0.24 / np.sqrt(vals.size)
    assert abs(vals.std() - 0.24) < 0.02 * 0.24


def test_draw_noise_one_offset_per_edge(gadget4):
    rng = SplitMix64(2)
    d = sp.draw_noise(gadget4, sp.NoiseModel(0.0, 0.24), rng)
    assert d.eps_coupling.shape == (8,)
    assert np.all(d.eps_coupling != 0.0)
    assert set(d.coupling_map(gadget4)) == set(gadget4.edges)


def test_frozen_noise_reproducible(gadget4, default_sched):
    stream = SplitMix64(66)
    frozen = sp.draw_noise(gadget4, sp.NoiseModel(0.24, 0.0), stream)
    params = sp.RunParams(alpha=0.2, sweeps=50, temperature=0.22, seed=5)
    s1, _ = sp.run_sssv(gadget4, default_sched, params, sp.NoiseModel(0.24, 0.0),
                        frozen_noise=frozen)
    s2, _ = sp.run_sssv(gadget4, default_sched, params, sp.NoiseModel(0.24, 0.0),
                        frozen_noise=frozen)
    assert np.array_equal(s1, s2)


# --- SA behavior ---


def test_sa_zero_temperature_is_greedy(gadget4, const_schedule):
    """All single flips off the all-down state raise the energy, so a cold
    chain started there never moves."""
    iso = -np.ones(8)
    e0 = sp.energy(gadget4, iso)
    for i in range(8):
        c = iso.copy()
        c[i] = 1
        assert sp.energy(gadget4, c) > e0
    params = sp.RunParams(alpha=1.0, sweeps=200, temperature=1e-6, seed=3)
    final = sp.run_sa(gadget4, const_schedule, params, initial=iso)
    assert np.array_equal(final, iso)


def test_sa_alpha_zero_uniform(default_sched):
    g3 = sp.make_gadget(3)
    params = sp.RunParams(alpha=0.0, sweeps=100, temperature=0.22, seed=0)
    seeds = sp.derive_run_seeds(77, 0, 4000)
    spins = sp.run_sa_batch(g3, default_sched, params, seeds)
    means = spins.mean(axis=0)
    assert np.all(np.abs(means) < 4 / np.sqrt(4000))


def test_sa_finds_ground_space(gadget4, default_sched, info4):
    params = sp.RunParams(alpha=1.0, sweeps=1500, temperature=0.22, seed=0)
    seeds = sp.derive_run_seeds(15, 0, 500)
    spins = sp.run_sa_batch(gadget4, default_sched, params, seeds)
    t = sp.tally(gadget4, info4, spins)
    assert (t.n_isolated + t.n_clustered) / t.runs > 0.9


def test_sa_deterministic(gadget4, default_sched):
    params = sp.RunParams(alpha=0.8, sweeps=80, temperature=0.22, seed=31337)
    assert np.array_equal(sp.run_sa(gadget4, default_sched, params),
                          sp.run_sa(gadget4, default_sched, params))


def test_sa_initial_must_match_problem(gadget4, default_sched):
    params = sp.RunParams(alpha=1.0, sweeps=10, temperature=0.22, seed=1)
    with pytest.raises(ValueError):
        sp.run_sa(gadget4, default_sched, params, initial=np.ones(5))


# --- validation ---


def test_run_params_validation():
    with pytest.raises(ValueError):
        sp.RunParams(alpha=1.5, seed=0)
    with pytest.raises(ValueError):
        sp.RunParams(alpha=0.5, sweeps=1, seed=0)
    with pytest.raises(ValueError):
        sp.RunParams(alpha=0.5, temperature=0.0, seed=0)
    with pytest.raises(ValueError):
        sp.RunParams(alpha=0.5, transverse_sign=2, seed=0)


def test_noise_model_validation():
    with pytest.raises(ValueError):
        sp.NoiseModel(sigma_h=-0.1)
    with pytest.raises(ValueError):
        sp.NoiseModel(sigma_j=float("nan"))


def test_rotor_state_validation():
    with pytest.raises(ValueError):
        sp.RotorState(theta=np.array([0.0, 3.5]))
    with pytest.raises(ValueError):
        sp.RotorState(theta=np.array([-0.1, 1.0]))


def test_transverse_sign_literal_convention(gadget4, default_sched, info4):
    """The +1 printed-formula convention still anneals into the ground space."""
    params = sp.RunParams(alpha=1.0, sweeps=1500, temperature=0.22,
                          transverse_sign=1, seed=0)
    seeds = sp.derive_run_seeds(21, 0, 300)
    spins, _ = sp.run_sssv_batch(gadget4, default_sched, params, sp.NoiseModel(), seeds)
    t = sp.tally(gadget4, info4, spins)
    assert (t.n_isolated + t.n_clustered) / t.runs > 0.5
