import numpy as np
import pytest

from poisson_growth.hammersley import (
    ParticleConfig,
    build_coupled_shock_pair,
    build_flat_field_2d,
    build_shock_field_2d,
    equilibrium_init,
    flux_past,
    padding_for,
    simulate,
    stopping_line_slope,
)
from poisson_growth.poisson import mix64, sample

LAM = np.array([2.0, 1.0])
RHO = np.array([3.0, 2.0])
WINDOW = ((-2.0, -2.0), (2.0, 2.0))


def test_equilibrium_init_counts_and_determinism():
    n_rep = 3000
    mu, length = 1.5, 4.0
    counts = np.array([len(equilibrium_init(mu, (0.0, length), mix64(2, r)).positions)
                       for r in range(n_rep)], dtype=float)
    lam = mu * length
    se = np.sqrt(lam / n_rep)
    assert abs(counts.mean() - lam) < 4 * se
    a = equilibrium_init(1.0, (-1.0, 1.0), 5)
    b = equilibrium_init(1.0, (-1.0, 1.0), 5)
    assert np.array_equal(a.positions, b.positions)
    assert len(equilibrium_init(1.0, (1.0, 1.0), 5).positions) == 0


def test_no_cloud_points_means_constant_trajectories():
    init = ParticleConfig(np.array([0.0, 1.0]), (-1.0, 2.0), 1.0)
    traj = simulate(init, tau=1e-9, T=1e-6, seed=1)
    assert traj.n_jumps == 0
    assert np.array_equal(traj.positions_at(1e-6), init.positions)


def test_single_cloud_point_moves_the_right_particle():
    init = ParticleConfig(np.array([1.0, 2.0]), (0.0, 3.0), 1.0)
    traj = simulate(init, tau=0.5, T=2.0, seed=3)
    # replay manually against the recorded events
    pos = init.positions.copy()
    for j in range(len(traj.times)):
        if traj.idxs[j] < 0:
            continue
        i = int(np.searchsorted(pos, traj.news[j], side="right"))
        assert i == traj.idxs[j]
        assert pos[i] == traj.olds[j]
        pos[i] = traj.news[j]
    assert np.array_equal(pos, traj.positions_at(2.0))


def test_particles_never_cross():
    init = equilibrium_init(1.0, (-30.0, 10.0), 11)
    traj = simulate(init, tau=1.0, T=10.0, seed=12)
    for t in (0.0, 2.5, 5.0, 10.0):
        pos = traj.positions_at(t)
        assert np.all(np.diff(pos) >= 0)


def test_jump_count_identity_per_realization():
    # every jump consumes the cloud point that had a particle to its right
    init = equilibrium_init(1.0, (-20.0, 5.0), 21)
    traj = simulate(init, tau=1.0, T=5.0, seed=22)
    pos = init.positions.copy()
    expected = 0
    for j in range(len(traj.times)):
        i = int(np.searchsorted(pos, traj.news[j], side="right"))
        if i < len(pos):
            expected += 1
            pos[i] = traj.news[j]
    assert traj.n_jumps == expected


def test_equilibrium_counting_mean_growth():
    # E N(y,t) - N(0,0) = mu y + (tau/mu) t
    mu, tau, T = 1.0, 1.0, 20.0
    pad = padding_for(mu, tau, T)
    reps = 120
    ys = np.array([-6.0, 4.0])
    ts = np.array([8.0, 20.0])
    acc = np.zeros((2, 2))
    for r in range(reps):
        init = equilibrium_init(mu, (-pad - 10, pad), mix64(71, r))
        traj = simulate(init, tau, T, mix64(72, r))
        base = traj.count(0.0, 0.0)
        for i, y in enumerate(ys):
            for j, t in enumerate(ts):
                acc[i, j] += traj.count(y, t) - base
    acc /= reps
    pred = mu * ys[:, None] + (tau / mu) * ts[None, :]
    # 4 sigma with Var(N) of order mu|y| + flux variance
    bound = 4 * np.sqrt((mu * np.abs(ys)[:, None] + (tau / mu) * ts) / reps)
    assert np.all(np.abs(acc - pred) <= bound + 0.2)


def test_flux_is_poisson_with_rate_tau_over_mu():
    mu, tau, T = 1.0, 1.0, 40.0
    pad = padding_for(mu, tau, T)
    reps = 150
    fluxes = np.empty(reps)
    for r in range(reps):
        init = equilibrium_init(mu, (-pad - 10, pad), mix64(55, r))
        traj = simulate(init, tau, T, mix64(56, r))
        fluxes[r] = flux_past(traj, 0.0, T)
    lam = tau / mu * T
    assert abs(fluxes.mean() - lam) < 3 * np.sqrt(lam / reps)
    assert 0.7 < fluxes.var(ddof=1) / fluxes.mean() < 1.3


def test_flux_scales_with_tau():
    mu, T = 1.0, 30.0
    reps = 60
    means = []
    for tau in (1.0, 2.0):
        pad = padding_for(mu, tau, T)
        vals = []
        for r in range(reps):
            init = equilibrium_init(mu, (-pad - 10, pad), mix64(81, r))
            traj = simulate(init, tau, T, mix64(82 + int(tau), r))
            vals.append(flux_past(traj, 0.0, T))
        means.append(np.mean(vals))
    ratio = means[1] / means[0]
    assert abs(ratio - 2.0) < 0.25


def test_no_jumps_cross_a_point_without_flux():
    init = ParticleConfig(np.array([5.0]), (0.0, 6.0), 1.0)
    traj = simulate(init, tau=1e-9, T=1e-6, seed=9)
    assert flux_past(traj, 2.0, 1e-6) == 0


def test_stopping_line_slope_formula():
    assert stopping_line_slope(np.array([1.0, 2.0]), np.array([2.0, 3.0])) == 1.0
    assert stopping_line_slope(LAM, RHO) == 1.0


def test_shock_builder_rejects_bad_parameter_order():
    with pytest.raises(ValueError, match="rho1/rho2"):
        build_shock_field_2d(np.array([1.0, 2.0]), np.array([2.0, 3.0]),
                             WINDOW, 0)
    with pytest.raises(ValueError, match="coordinatewise"):
        build_shock_field_2d(np.array([2.0, 2.0]), np.array([1.0, 3.0]),
                             WINDOW, 0)


def test_flat_field_mean_matches_slope():
    rho = np.array([2.0, 1.0])
    pts = np.array([[1.0, 1.5], [-1.0, -1.5], [1.5, 0.5], [0.0, 0.0]])
    reps = 40
    acc = np.zeros(len(pts))
    for r in range(reps):
        prof = build_flat_field_2d(rho, WINDOW, mix64(17, r))
        acc += prof.value_many(pts)
    acc /= reps
    pred = pts @ rho
    sd = np.sqrt((np.abs(pts) @ rho + 1.0) / reps)
    assert np.all(np.abs(acc - pred) <= 4 * sd + 0.25)


def test_flat_field_is_monotone_staircase():
    prof = build_flat_field_2d(np.array([1.0, 1.0]), WINDOW, 3)
    assert prof.field.is_monotone()


def test_shock_field_monotone_and_mean_increments():
    # means: the stopped construction carries O(1) boundary layers near
    # the line, so increments deep inside each region are the sharp check
    reps = 30
    deep_below = np.array([[-1.6, -1.6], [-0.4, -1.6], [-1.6, -0.9]])
    deep_above = np.array([[0.9, 1.6], [1.7, 1.6], [0.9, 0.6]])
    acc_b = np.zeros(len(deep_below))
    acc_a = np.zeros(len(deep_above))
    for r in range(reps):
        prof = build_shock_field_2d(LAM, RHO, WINDOW, mix64(19, r))
        assert prof.field.is_monotone()
        acc_b += prof.value_many(deep_below)
        acc_a += prof.value_many(deep_above)
    acc_b /= reps
    acc_a /= reps
    # spatial/time increments inside one region follow that region's slope
    d_b = acc_b[1:] - acc_b[0]
    pred_b = (deep_below[1:] - deep_below[0]) @ LAM
    d_a = acc_a[1:] - acc_a[0]
    pred_a = (deep_above[1:] - deep_above[0]) @ RHO
    assert np.all(np.abs(d_b - pred_b) <= 0.75)
    assert np.all(np.abs(d_a - pred_a) <= 0.75)


def test_shock_field_absolute_means_within_monte_carlo_band():
    reps = 25
    pts = np.array([[1.0, 1.5], [-1.0, -1.5], [-0.5, -1.5], [1.5, 0.5]])
    acc = np.zeros(len(pts))
    for r in range(reps):
        prof = build_shock_field_2d(LAM, RHO, WINDOW, mix64(23, r))
        acc += prof.value_many(pts)
    acc /= reps
    pred = np.maximum(pts @ RHO, pts @ LAM)
    sd = np.sqrt((np.abs(pts) @ np.maximum(LAM, RHO) + 1.0) / reps)
    assert np.all(np.abs(acc - pred) <= 4 * sd + 0.6)


def test_coupled_pair_sandwich_and_below_line_equality():
    a = stopping_line_slope(LAM, RHO)
    for seed in (5, 6, 7):
        s0, z0, a0 = build_coupled_shock_pair(LAM, RHO, WINDOW, seed)
        cen = a0.grid.centers()
        diff = z0.value_many(cen) - s0.value_many(cen)
        assert np.all((diff >= 0) & (diff <= 1))
        h = float(np.max(a0.grid.cell_size))
        below = cen[:, 1] <= -a * cen[:, 0] - h
        assert np.all(diff[below] == 0)
        # A0 sits above the line, one cell of slack
        in_cells = cen[a0.membership.ravel()]
        if len(in_cells):
            assert np.all(in_cells[:, 1] >= -a * in_cells[:, 0] - h)


def test_coupled_pair_profiles_are_valid_initial_data():
    s0, z0, a0 = build_coupled_shock_pair(LAM, RHO, WINDOW, 12)
    assert s0.field.is_monotone()
    assert z0.field.is_monotone()
    assert a0.membership.sum() > 0


def test_trajectory_dump_format(tmp_path):
    init = equilibrium_init(1.0, (-10.0, 5.0), 31)
    traj = simulate(init, tau=1.0, T=3.0, seed=32)
    from poisson_growth.hammersley import save_trajectories

    path = tmp_path / "traj.csv"
    save_trajectories(traj, path)
    lines = path.read_text().splitlines()
    assert lines[0] == "k,t,pos"
    assert len(lines) == 1 + traj.n_jumps
