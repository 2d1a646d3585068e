import dataclasses

import numpy as np
import pytest

from helpers import SQRT2, bilinear_problem, singleton_problem
from isaacslab import pde
from isaacslab.pde import BlowupError, CflError, PdeError, SpatialGrid, ValueField

seed = 0


def test_grid_basics():
    grid = SpatialGrid(-1.0, 1.0, 5)
    assert grid.dx == 0.5
    assert np.array_equal(grid.xs, np.array([-1.0, -0.5, 0.0, 0.5, 1.0]))
    idx = grid.nearest_index(np.array([-0.9, 0.24, 2.0]))
    assert idx.tolist() == [0, 2, 4]
    assert np.array_equal(grid.clamp(np.array([-3.0, 0.1, 7.0])), [-1.0, 0.1, 1.0])


def test_grid_validation():
    with pytest.raises(PdeError):
        SpatialGrid(1.0, -1.0, 5)
    with pytest.raises(PdeError):
        SpatialGrid(0.0, 1.0, 2)
    with pytest.raises(PdeError):
        SpatialGrid(0.0, np.inf, 5)


def test_value_field_validation():
    grid = SpatialGrid(0.0, 1.0, 3)
    with pytest.raises(PdeError):
        ValueField(grid, np.array([0.0, 0.0]), np.zeros((2, 3)))
    with pytest.raises(PdeError):
        ValueField(grid, np.array([0.0, 1.0]), np.zeros((2, 4)))
    bad = np.zeros((2, 3))
    bad[1, 1] = np.nan
    with pytest.raises(PdeError):
        ValueField(grid, np.array([0.0, 1.0]), bad)


def test_value_field_lookup():
    grid = SpatialGrid(0.0, 1.0, 3)
    vf = ValueField(grid, np.array([0.0, 1.0]), np.array([[0.0, 1.0, 2.0], [4.0, 5.0, 6.0]]))
    assert np.array_equal(vf.initial_slice, [0.0, 1.0, 2.0])
    assert np.array_equal(vf.final_slice, [4.0, 5.0, 6.0])
    assert vf.value_at(0.0, 0.25) == 0.5
    # halfway in time, node 0: (0 + 4) / 2
    assert vf.value_at(0.5, 0.0) == 2.0
    with pytest.raises(PdeError):
        vf.slice_at(0.3)
    with pytest.raises(PdeError):
        vf.value_at(1.5, 0.0)


def test_cfl_pure_diffusion():
    # sigma = sqrt(2), dx = 0.1: dt <= (1 - 1e-6) / (sigma^2 / dx^2) = 0.005 ...
    prob = singleton_problem(drift=0.0, sigma=SQRT2)
    grid = SpatialGrid(-5.0, 5.0, 101)
    dt = pde.cfl_max_dt(prob, grid)
    assert abs(dt - 0.005 * (1.0 - 1e-6)) < 1e-12


def test_cfl_pure_drift():
    # sigma = 0, |b| = 4, dx = 0.1: dt <= (1 - 1e-6) / (4 / 0.1)
    prob = singleton_problem(drift=4.0, sigma=0.0)
    grid = SpatialGrid(-5.0, 5.0, 101)
    dt = pde.cfl_max_dt(prob, grid)
    assert abs(dt - 0.025 * (1.0 - 1e-6)) < 1e-12


def test_cfl_drift_plus_diffusion():
    # bilinear on |x| <= 5 with kappa=4: max|b| = 4, max sigma^2 = 2
    prob = bilinear_problem()
    grid = SpatialGrid(-5.0, 5.0, 101)
    dt = pde.cfl_max_dt(prob, grid)
    expect = (1.0 - 1e-6) / (4.0 / 0.1 + 2.0 / 0.01)
    assert abs(dt - expect) < 1e-15


def test_cfl_scales_with_dx():
    # diffusion-dominated: doubling dx quadruples the time step
    prob = singleton_problem(drift=0.0, sigma=SQRT2)
    fine = pde.cfl_max_dt(prob, SpatialGrid(-5.0, 5.0, 201))
    coarse = pde.cfl_max_dt(prob, SpatialGrid(-5.0, 5.0, 101))
    assert abs(coarse / fine - 4.0) < 1e-9


def test_solve_rejects_unstable_dt():
    prob = singleton_problem()
    grid = SpatialGrid(-5.0, 5.0, 101)
    with pytest.raises(CflError):
        pde.solve(prob, grid, dt=10.0 * pde.cfl_max_dt(prob, grid), hamiltonian="mixed")


def test_constant_payoff_is_exact():
    # H == 0 when g is constant, so every slice equals the constant bitwise
    prob = singleton_problem(payoff=("constant", (0.7,)))
    grid = SpatialGrid(-4.0, 4.0, 81)
    field = pde.solve(prob, grid, dt=pde.cfl_max_dt(prob, grid), hamiltonian="mixed")
    assert np.all(field.values == 0.7)


def test_heat_equation_oracle():
    # b=0, sigma=sqrt(2): v_t + v_xx = 0, g(x)=x^2 => v(t,x) = x^2 + 2(T-t).
    # With T - t = 0.5 the clip at 64 is irrelevant for |x| <= 2.
    prob = singleton_problem(drift=0.0, sigma=SQRT2, payoff=("clipped_quadratic", (64.0,)))
    grid = SpatialGrid(-8.0, 8.0, 321)
    field = pde.solve(prob, grid, dt=pde.cfl_max_dt(prob, grid), hamiltonian="mixed")
    xs = grid.xs
    window = np.abs(xs) <= 2.0
    exact = xs[window] ** 2 + 1.0
    err = np.max(np.abs(field.initial_slice[window] - exact))
    assert err < 2e-2
    assert abs(field.value_at(0.0, 0.0) - 1.0) < 2e-2


def test_drifted_cosine_oracle():
    # b=mu, sigma=s: v(t,x) = exp(-s^2 (T-t)/2) cos(x + mu (T-t))
    prob = singleton_problem(drift=0.01, sigma=1.0, payoff=("cosine", (1.0, 1.0)))
    grid = SpatialGrid(-8.0, 8.0, 321)
    field = pde.solve(prob, grid, dt=pde.cfl_max_dt(prob, grid), hamiltonian="mixed")
    xs = grid.xs
    window = np.abs(xs) <= 2.0
    exact = np.exp(-0.25) * np.cos(xs[window] + 0.005)
    err = np.max(np.abs(field.initial_slice[window] - exact))
    assert err < 2e-2


@pytest.mark.parametrize("ham", ["lower", "mixed", "upper"])
def test_maximum_principle(ham):
    # scheme is monotone, so values stay inside the terminal bounds
    prob = bilinear_problem()
    grid = SpatialGrid(-8.0, 8.0, 321)
    field = pde.solve(prob, grid, dt=pde.cfl_max_dt(prob, grid), hamiltonian=ham)
    assert np.all(field.values <= 1.0 + 1e-9)
    assert np.all(field.values >= -1.0 - 1e-9)


def test_hamiltonian_ordering():
    prob = bilinear_problem(prio_family="constant", prio_params=(0.5,))
    grid = SpatialGrid(-8.0, 8.0, 321)
    dt = pde.cfl_max_dt(prob, grid)
    lo = pde.solve(prob, grid, dt=dt, hamiltonian="lower")
    mid = pde.solve(prob, grid, dt=dt, hamiltonian="mixed")
    hi = pde.solve(prob, grid, dt=dt, hamiltonian="upper")
    assert np.all(lo.values <= mid.values + 1e-9)
    assert np.all(mid.values <= hi.values + 1e-9)


def test_isaacs_gap_zero_for_singleton():
    # one action per side: sup inf == inf sup pointwise, bitwise
    prob = singleton_problem()
    grid = SpatialGrid(-4.0, 4.0, 161)
    gap = pde.isaacs_gap(prob, grid, pde.cfl_max_dt(prob, grid))
    assert np.all(gap.values == 0.0)


def test_isaacs_gap_positive_for_bilinear():
    prob = bilinear_problem()
    grid = SpatialGrid(-8.0, 8.0, 161)
    gap = pde.isaacs_gap(prob, grid, pde.cfl_max_dt(prob, grid))
    assert np.min(gap.values) >= -1e-9
    interior = np.abs(grid.xs) <= 2.0
    assert np.max(gap.values[:, interior]) > 1e-3


@pytest.mark.parametrize("p, ham", [(0.0, "upper"), (1.0, "lower")])
def test_degenerate_priority_matches_one_sided(p, ham):
    prob = bilinear_problem(prio_family="constant", prio_params=(p,))
    grid = SpatialGrid(-6.0, 6.0, 161)
    dt = pde.cfl_max_dt(prob, grid)
    mixed = pde.solve(prob, grid, dt=dt, hamiltonian="mixed")
    side = pde.solve(prob, grid, dt, hamiltonian=ham)
    assert np.array_equal(mixed.values, side.values)


def test_monotone_in_terminal_data():
    # clipping at 4 sits below clipping at 64 everywhere, so values order too
    grid = SpatialGrid(-6.0, 6.0, 161)
    small = bilinear_problem(payoff=("clipped_quadratic", (4.0,)))
    large = bilinear_problem(payoff=("clipped_quadratic", (64.0,)))
    dt = min(pde.cfl_max_dt(small, grid), pde.cfl_max_dt(large, grid))
    v1 = pde.solve(small, grid, dt=dt, hamiltonian="mixed")
    v2 = pde.solve(large, grid, dt=dt, hamiltonian="mixed")
    assert np.all(v1.values <= v2.values + 1e-12)


def test_zero_horizon_returns_terminal():
    prob = singleton_problem()
    prob = dataclasses.replace(prob, start_time=prob.horizon)
    grid = SpatialGrid(-4.0, 4.0, 81)
    field = pde.solve(prob, grid, dt=0.01, hamiltonian="mixed")
    assert field.values.shape == (1, 81)
    assert np.array_equal(field.values[0], prob.payoff_values(grid.xs[:, None]))
