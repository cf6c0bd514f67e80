import numpy as np
import pytest
from scipy import optimize

from poisson_growth.core import GridRegion, GridSpec, region_from_predicate
from poisson_growth.macroscopic import (
    ArgmaxSet,
    FlatMacro,
    GridMacro,
    RarefactionMacro,
    ShockMacro,
    closed_form_u,
    forward_W,
    hopf_lax_solve,
    interface_X,
    shape_g,
    velocity,
)


def test_velocity_known_values_and_errors():
    kappa, f, grad = velocity(np.array([1.0]), 2.0)
    assert (kappa, f, grad[0]) == (1.0, 1.0, -1.0)
    kappa, f, grad = velocity(np.array([1.0, 1.0]), 3.0)
    assert (kappa, f) == (1.0, 1.0)
    assert np.allclose(grad, [-1.0, -1.0])
    with pytest.raises(ValueError):
        velocity(np.array([1.0, 0.0]), 2.0)
    with pytest.raises(ValueError):
        velocity(np.array([1.0]), -1.0)


def test_velocity_homogeneity():
    rho = np.array([0.7, 1.3, 2.1])
    _, f1, _ = velocity(rho, 2.4)
    _, f2, _ = velocity(2 * rho, 2.4)
    assert f2 == pytest.approx(2.0 ** -3 * f1)


def test_shape_g_values():
    assert shape_g(np.zeros(3), 2.0) == 0.0
    assert shape_g(np.array([1.0]), 2.0) == 2.0
    assert shape_g(np.array([-0.2, 1.0]), 2.0) == -np.inf


def test_conjugacy_of_shape_and_velocity():
    # f(rho) = -inf_x {x . rho - g(x)}, checked numerically
    for d, c in ((1, 2.0), (2, 2.5)):
        for rho in (np.full(d, 0.8), np.full(d, 1.7), np.linspace(1, 2, d)):
            _, f, _ = velocity(rho, c)

            def obj(x):
                if np.any(x <= 0):
                    return 1e9
                return float(x @ rho) - shape_g(x, c)

            # analytic interior optimum exists; polish from a rough start
            res = optimize.minimize(obj, np.full(d, 0.5), method="Nelder-Mead",
                                    options={"xatol": 1e-10, "fatol": 1e-12,
                                             "maxiter": 20000})
            assert -res.fun == pytest.approx(f, rel=1e-6)


def test_hopf_lax_flat_profile_value_and_argmax():
    prof = FlatMacro(np.array([1.0]))
    grid = GridSpec(np.array([-4.0]), np.array([3.0]), np.array([1400]))
    u, arg = hopf_lax_solve(prof, np.array([1.0]), 1.0, 2.0, grid)
    assert u == pytest.approx(2.0, abs=2 * 1.0 * 0.005)
    u2, arg2 = hopf_lax_solve(prof, np.array([1.0]), 1.0, 2.0, grid, tol=1e-9)
    assert len(arg2.points) == 1
    assert arg2.points[0, 0] == pytest.approx(0.0, abs=0.006)
    assert not arg2.shock


def test_hopf_lax_wedge_like_grid_profile_matches_shape():
    # 0 on the positive quadrant, very negative below
    g = GridSpec(np.array([-3.0, -3.0]), np.array([3.0, 3.0]), np.array([60, 60]))
    vals = np.where(np.all(g.centers() >= 0, axis=1), 0.0, -1e9)
    prof = GridMacro(g, vals)
    c, t = 2.5, 1.0
    # the default tolerance is useless for cliff data (its Lipschitz bound
    # is the cliff height), so pass one at the relevant scale
    for x in (np.array([1.0, 1.0]), np.array([2.0, 0.8])):
        u, _ = hopf_lax_solve(prof, x, t, c, g, tol=0.5)
        assert u == pytest.approx(t * shape_g(x / t, c), abs=0.35)


def test_hopf_lax_boundary_doubling_error():
    prof = FlatMacro(np.array([1.0]))
    tiny = GridSpec(np.array([0.5]), np.array([1.2]), np.array([20]))
    with pytest.raises(RuntimeError, match="boundary"):
        hopf_lax_solve(prof, np.array([1.0]), 1.0, 2.0, tiny)


def test_closed_form_flat_agrees_with_grid_solver_everywhere():
    prof = FlatMacro(np.array([0.8, 1.4]))
    grid = GridSpec(np.array([-5.0, -5.0]), np.array([3.0, 3.0]),
                    np.array([320, 320]))
    lip = prof.lipschitz_bound()
    cell = float(np.max(grid.cell_size))
    for x in (np.array([0.5, 0.5]), np.array([1.0, -0.3])):
        for t in (0.5, 1.0):
            uc, _ = closed_form_u(prof, x, t, 2.2)
            ug, _ = hopf_lax_solve(prof, x, t, 2.2, grid)
            assert abs(uc - ug) <= 2 * lip * cell


def test_closed_form_shock_branches_and_hyperplane():
    lam, rho, c = np.array([1.0]), np.array([2.0]), 2.0
    prof = ShockMacro(lam, rho)
    t = 1.0
    # hyperplane at x = t (f(lam) - f(rho)) / (rho - lam) = t / 2
    u, arg = closed_form_u(prof, np.array([0.5]), t, c)
    assert arg.shock and len(arg.points) == 2
    # both branch values agree there to 1e-9
    _, f_l, _ = velocity(lam, c)
    _, f_r, _ = velocity(rho, c)
    assert abs((0.5 * rho[0] + t * f_r) - (0.5 * lam[0] + t * f_l)) < 1e-9
    ul, al = closed_form_u(prof, np.array([0.49]), t, c)
    ur, ar = closed_form_u(prof, np.array([0.51]), t, c)
    assert len(al.points) == 1 and len(ar.points) == 1
    assert not al.shock and not ar.shock


def test_closed_form_rarefaction_fan_and_continuity():
    lam, rho, c = np.array([1.0]), np.array([2.0]), 2.0
    prof = RarefactionMacro(lam, rho)
    t = 1.0
    for x in (0.3, 0.5, 0.77):
        u, arg = closed_form_u(prof, np.array([x]), t, c)
        assert u == pytest.approx(2 * np.sqrt(x * t), abs=1e-9)
        assert len(arg.points) == 1
        # fan maximizer sits on the kink hyperplane
        assert arg.points[0, 0] == pytest.approx(0.0, abs=1e-9)
    # continuity at both fan edges (t/4 and t)
    for edge in (0.25, 1.0):
        lo_val = closed_form_u(prof, np.array([edge - 1e-12]), t, c)[0]
        hi_val = closed_form_u(prof, np.array([edge + 1e-12]), t, c)[0]
        assert abs(lo_val - hi_val) < 1e-9


def test_closed_form_shock_vs_grid_solver_within_tolerance():
    lam, rho, c = np.array([0.8, 1.1]), np.array([1.6, 2.0]), 2.4
    prof = ShockMacro(lam, rho)
    grid = GridSpec(np.array([-6.0, -6.0]), np.array([3.0, 3.0]),
                    np.array([360, 360]))
    lip = prof.lipschitz_bound()
    cell = float(np.max(grid.cell_size))
    for x in (np.array([0.2, 0.1]), np.array([1.0, 0.5]), np.array([-0.4, 0.8])):
        uc, _ = closed_form_u(prof, x, 1.0, c)
        ug, _ = hopf_lax_solve(prof, x, 1.0, c, grid)
        assert abs(uc - ug) <= 2 * lip * cell


def test_closed_form_rarefaction_vs_grid_solver_within_tolerance():
    lam, rho, c = np.array([0.9, 0.7]), np.array([1.8, 1.5]), 2.1
    prof = RarefactionMacro(lam, rho)
    grid = GridSpec(np.array([-6.0, -6.0]), np.array([3.0, 3.0]),
                    np.array([360, 360]))
    lip = prof.lipschitz_bound()
    cell = float(np.max(grid.cell_size))
    for x in (np.array([0.4, 0.3]), np.array([1.2, 0.9]), np.array([-0.2, 0.6])):
        uc, _ = closed_form_u(prof, x, 1.0, c)
        ug, _ = hopf_lax_solve(prof, x, 1.0, c, grid)
        assert abs(uc - ug) <= 2 * lip * cell


def test_grid_profile_unsupported_in_closed_form():
    g = GridSpec(np.array([-1.0]), np.array([1.0]), np.array([4]))
    prof = GridMacro(g, np.arange(4.0))
    with pytest.raises(ValueError, match="closed forms"):
        closed_form_u(prof, np.array([0.0]), 1.0, 2.0)


def test_u_is_monotone_in_x_and_increasing_in_t():
    prof = ShockMacro(np.array([1.0]), np.array([2.0]))
    xs = np.linspace(-1.5, 1.5, 25)
    for t in (0.4, 1.0):
        us = [closed_form_u(prof, np.array([x]), t, 2.0)[0] for x in xs]
        assert all(a <= b + 1e-12 for a, b in zip(us, us[1:]))
    for x in (-0.5, 0.2, 0.9):
        u1 = closed_form_u(prof, np.array([x]), 0.5, 2.0)[0]
        u2 = closed_form_u(prof, np.array([x]), 1.0, 2.0)[0]
        assert u2 > u1


def _half_space(grid, normal, offset=0.0):
    nv = np.asarray(normal, dtype=float)
    return region_from_predicate(grid, lambda c: float(c @ nv) >= offset)


def test_forward_w_flat_is_translation():
    prof = FlatMacro(np.array([1.0]))
    grid = GridSpec(np.array([-2.0]), np.array([3.0]), np.array([100]))
    B = _half_space(grid, [1.0])
    W = forward_W(prof, B, 1.0, 2.0, grid)
    got = grid.centers().ravel()[W.membership.ravel()]
    assert got.min() == pytest.approx(1.0, abs=0.06)
    assert got.max() > 2.9


def test_forward_w_whole_grid_is_whole_grid():
    prof = FlatMacro(np.array([1.0, 1.0]))
    grid = GridSpec(np.array([-2.0, -2.0]), np.array([2.0, 2.0]),
                    np.array([20, 20]))
    B = GridRegion(grid, np.ones(grid.n_cells, dtype=bool))
    W = forward_W(prof, B, 0.5, 2.0, grid)
    # maximizers of interior cells stay inside the grid; cells whose
    # maximizer leaves the grid window cannot be marked
    inner = W.membership[3:, 3:]
    assert inner.all()


def test_forward_w_shock_empty_band():
    lam, rho, c = np.array([1.0]), np.array([2.0]), 2.0
    prof = ShockMacro(lam, rho)
    grid = GridSpec(np.array([-3.0]), np.array([3.0]), np.array([120]))
    _, f_l, g_l = velocity(lam, c)
    _, f_r, g_r = velocity(rho, c)
    t = 1.0
    lo_band = t * (f_l - f_r) + t * float(g_l[0])
    hi_band = t * (f_l - f_r) + t * float(g_r[0])
    B = region_from_predicate(
        grid, lambda y: lo_band + 0.07 < y[0] < hi_band - 0.07)
    assert not B.is_empty
    W = forward_W(prof, B, t, c, grid)
    assert W.is_empty


def test_forward_w_grows_with_b():
    prof = RarefactionMacro(np.array([1.0]), np.array([2.0]))
    grid = GridSpec(np.array([-3.0]), np.array([3.0]), np.array([90]))
    B1 = _half_space(grid, [1.0], 0.5)
    B2 = _half_space(grid, [1.0], 0.0)
    W1 = forward_W(prof, B1, 1.0, 2.0, grid)
    W2 = forward_W(prof, B2, 1.0, 2.0, grid)
    assert not np.any(W1.membership & ~W2.membership)


def test_interface_flat_half_space_is_thin_band():
    prof = FlatMacro(np.array([1.0]))
    grid = GridSpec(np.array([-2.0]), np.array([3.0]), np.array([100]))
    B = _half_space(grid, [1.0])
    X = interface_X(prof, B, 1.0, 2.0, grid)
    got = grid.centers().ravel()[X.membership.ravel()]
    assert 1 <= len(got) <= 3
    assert np.all(np.abs(got - 1.0) <= 0.1)


def test_interface_rarefaction_strip():
    prof = RarefactionMacro(np.array([1.0]), np.array([2.0]))
    grid = GridSpec(np.array([-2.0]), np.array([3.0]), np.array([200]))
    B = _half_space(grid, [1.0])
    X = interface_X(prof, B, 1.0, 2.0, grid)
    got = grid.centers().ravel()[X.membership.ravel()]
    assert got.min() == pytest.approx(0.25, abs=0.03)
    assert got.max() == pytest.approx(1.0, abs=0.03)


def test_interface_of_empty_b_is_empty():
    prof = FlatMacro(np.array([1.0]))
    grid = GridSpec(np.array([-2.0]), np.array([3.0]), np.array([50]))
    B = GridRegion(grid, np.zeros(50, dtype=bool))
    assert interface_X(prof, B, 1.0, 2.0, grid).is_empty


def test_scan_cross_checks_closed_forms_on_flat():
    prof = FlatMacro(np.array([1.0]))
    eval_grid = GridSpec(np.array([-1.0]), np.array([2.5]), np.array([70]))
    search = GridSpec(np.array([-4.0]), np.array([3.0]), np.array([1400]))
    B = _half_space(eval_grid, [1.0])
    Wc = forward_W(prof, B, 1.0, 2.0, eval_grid)
    Ws = forward_W(prof, B, 1.0, 2.0, eval_grid, tol=1e-9, search_grid=search,
                   method="scan")
    assert int(np.sum(Wc.membership ^ Ws.membership)) <= 2


def test_forward_w_idempotent_under_tolerance_halving():
    # closed-form route: region independent of the collection tolerance
    prof = ShockMacro(np.array([1.0]), np.array([2.0]))
    grid = GridSpec(np.array([-2.0]), np.array([2.0]), np.array([80]))
    B = _half_space(grid, [1.0], 0.2)
    W1 = forward_W(prof, B, 0.7, 2.0, grid, tol=0.1)
    W2 = forward_W(prof, B, 0.7, 2.0, grid, tol=0.05)
    assert np.array_equal(W1.membership, W2.membership)


def test_argmax_set_diameter():
    a = ArgmaxSet(np.array([[0.0, 0.0], [1.0, 0.5]]), 0.0)
    assert a.diameter == 1.0
    assert ArgmaxSet(np.array([[2.0]]), 0.0).diameter == 0.0


def test_solutions_dump_format(tmp_path):
    from poisson_growth.macroscopic import MacroSolution, save_solutions, \
        solve_on_grid

    prof = ShockMacro(np.array([1.0]), np.array([2.0]))
    sol = MacroSolution(prof, 2.0)
    assert sol.kappa == (2.0 / 2) ** 2
    grid = GridSpec(np.array([0.0]), np.array([1.0]), np.array([8]))
    pts, vals, shocks = solve_on_grid(prof, grid, 1.0, 2.0)
    path = tmp_path / "sol.csv"
    save_solutions(pts, np.full(len(pts), 1.0), vals, shocks, path)
    lines = path.read_text().splitlines()
    assert lines[0] == "x0,t,u,shock_flag"
    assert len(lines) == 1 + 8
    # the cell straddling the shock hyperplane x = 1/2 is flagged
    flagged = [ln for ln in lines[1:] if ln.endswith(",1")]
    assert len(flagged) <= 1
