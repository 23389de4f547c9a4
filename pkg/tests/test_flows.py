import json

import numpy as np
import numpy.testing as npt
import pytest

from constants import FOUR_PI_SQ
from errors import DomainError
from flows import (
    ansatz_deviation, chi_closed_form, chi_rhs, classify_limit, connecting_orbits,
    count_connecting_orbits, cylinder_energies, energy_drift, integrate_chi, integrate_orbit,
    solve_cylinder,
)
from torus_core import FlatTorus, FreeHamiltonian, LatticeVector, PendulumHamiltonian, geodesic_loop


# --- Hamiltonian orbits ---

@pytest.mark.parametrize("k", [(1,), (-2,), (1, 1), (0, 3, -1)])
def test_lattice_momenta_close_up(k):
    k = np.array(k, dtype=float)
    orbit = integrate_orbit(FreeHamiltonian(), (np.full(len(k), 0.3), FOUR_PI_SQ * k))
    assert orbit.closure_defect < 1e-8
    assert orbit.energy_drift < 1e-9
    npt.assert_allclose(orbit.winding, k, atol=1e-10)


def test_half_integer_momentum_does_not_close():
    orbit = integrate_orbit(FreeHamiltonian(), (0.0, FOUR_PI_SQ * 0.5))
    assert orbit.closure_defect > 0.1


def test_pendulum_equilibria_are_periodic_orbits():
    for offset in (0.0, 0.5):
        orbit = integrate_orbit(PendulumHamiltonian(1, 0.2), (0.2 + offset, FOUR_PI_SQ))
        assert orbit.closure_defect < 1e-8
        assert orbit.energy_drift is None


def test_energy_drift_of_free_orbit_recomputed():
    orbit = integrate_orbit(FreeHamiltonian(), ((0.1, 0.2), (FOUR_PI_SQ, -FOUR_PI_SQ)), steps=200)
    assert energy_drift(orbit, FreeHamiltonian()) == pytest.approx(0.0, abs=1e-12)


def test_energy_drift_takes_a_pointwise_hamiltonian():
    orbit = integrate_orbit(FreeHamiltonian(), ((0.1, 0.2), (FOUR_PI_SQ, -FOUR_PI_SQ)), steps=200)

    def pointwise(t, u, v):
        return 0.5 * float(v @ v) / FOUR_PI_SQ

    assert energy_drift(orbit, pointwise) == pytest.approx(0.0, abs=1e-12)


def test_orbit_rejects_bad_input():
    with pytest.raises(DomainError):
        integrate_orbit(FreeHamiltonian(), (0.0, 1.0), steps=10)
    with pytest.raises(DomainError):
        integrate_orbit(FreeHamiltonian(), ((0.0, 0.0), (1.0,)))


# --- the χ equation ---

def test_closed_form_solves_the_equation():
    s = np.linspace(-3, 3, 61)
    for chi0 in (0.1, 0.25, 0.75, 0.9):
        h = 1e-5
        derivative = (chi_closed_form(chi0, s + h) - chi_closed_form(chi0, s - h)) / (2 * h)
        npt.assert_allclose(derivative, chi_rhs(chi_closed_form(chi0, s)), atol=1e-8)
        assert chi_closed_form(chi0, 0.0) == pytest.approx(chi0)


def test_rk4_matches_closed_form():
    trajectory = integrate_chi(0.25, -20.0, 20.0, 10000)
    error = np.max(np.abs(trajectory.chi - chi_closed_form(0.25, trajectory.s_grid)))
    assert error < 1e-8
    assert trajectory.chi0 == pytest.approx(0.25)
    assert trajectory.limits == (0.0, 0.5)
    assert trajectory.connects()


def test_upper_transversal_runs_from_one_to_half():
    trajectory = integrate_chi(0.75, -20.0, 20.0)
    assert trajectory.limits == (1.0, 0.5)
    assert trajectory.connects()


def test_equilibria_stay_put():
    for chi0 in (0.0, 0.5):
        trajectory = integrate_chi(chi0, -5.0, 5.0, 1000)
        npt.assert_allclose(trajectory.chi, chi0, atol=1e-12)


def test_limits_and_ranges():
    assert classify_limit(0.3) is None
    assert classify_limit(0.49999) == 0.5
    with pytest.raises(DomainError):
        integrate_chi(1.2, -1.0, 1.0)
    with pytest.raises(DomainError):
        integrate_chi(0.25, 1.0, 2.0)


def test_short_window_leaves_limits_open():
    trajectory = integrate_chi(0.25, -1.0, 1.0, 200)
    assert trajectory.limits == (None, None)
    assert not trajectory.connects()


def test_window_doubles_until_both_ends_settle():
    trajectory = integrate_chi(0.25, -1.0, 1.0, 200, max_doublings=4)
    assert trajectory.limits == (0.0, 0.5)
    assert trajectory.s_grid[0] == pytest.approx(-16.0)
    assert trajectory.s_grid[-1] == pytest.approx(16.0)
    assert len(trajectory.s_grid) == 200 * 16 + 1
    assert integrate_chi(0.25, -1.0, 1.0, 200, max_doublings=2).limits == (None, None)


def test_two_connecting_orbits():
    assert count_connecting_orbits(1) == (2, 0)
    assert count_connecting_orbits(-3, 0.4) == (2, 0)
    # a short starting window is widened until both ends settle
    assert all(t.connects() for t in connecting_orbits(1, window=2.0))
    with pytest.raises(DomainError):
        count_connecting_orbits(0)


def test_trajectory_csv_header():
    text = integrate_chi(0.25, -1.0, 1.0, 10).to_csv()
    assert text.splitlines()[0] == "s,chi"
    assert len(text.splitlines()) == 12


# --- the cylinder ---

def _ansatz(chi0, k=1, q0=0.0):
    return lambda t: k * t + q0 + chi0


def test_cylinder_follows_the_ansatz():
    grid = solve_cylinder(1, 0.0, _ansatz(0.25), s_max=15.0, t_points=32, s_step=0.01)
    assert ansatz_deviation(grid, 0.25) < 1e-6
    assert grid.residual < 1e-4


def test_cylinder_with_wiggle_decreases_energy_and_converges():
    w0 = lambda t: t + 0.25 + 0.05 * np.sin(2 * np.pi * t)
    grid = solve_cylinder(1, 0.0, w0, s_max=15.0, t_points=32, s_step=0.01)
    energies = cylinder_energies(grid)
    assert np.all(np.diff(energies) <= 1e-8)
    assert grid.residual < 1e-4
    assert energies[-1] == pytest.approx(FOUR_PI_SQ / 2 - 1, abs=1e-6)


def test_cylinder_slices_keep_their_winding():
    grid = solve_cylinder(2, 0.3, _ansatz(0.1, 2, 0.3), s_max=1.0, t_points=16, s_step=0.05)
    for i in (0, len(grid.s_grid) // 2, len(grid.s_grid) - 1):
        assert grid.slice_loop(i).winding == LatticeVector((2,))
    npt.assert_allclose(grid.phi()[:, 0], grid.phi()[:, -1], atol=1e-12)


def test_stationary_loop_stays():
    grid = solve_cylinder(1, 0.0, geodesic_loop(1, 0.5, 32), s_max=5.0, s_step=0.05)
    assert grid.residual < 1e-10


def test_imex_is_at_least_first_order():
    errors = []
    for step in (0.02, 0.01):
        grid = solve_cylinder(1, 0.0, _ansatz(0.25), s_max=2.0, t_points=16, s_step=step, method="imex")
        errors.append(ansatz_deviation(grid, 0.25))
    assert np.log2(errors[0] / errors[1]) >= 0.9


def test_cylinder_rejects_bad_input():
    with pytest.raises(DomainError):
        solve_cylinder(0, 0.0, _ansatz(0.25, 0))
    with pytest.raises(DomainError):
        solve_cylinder(1, 0.0, _ansatz(0.25), s_step=4.0)
    with pytest.raises(DomainError):
        solve_cylinder(1, 0.0, _ansatz(0.25), method="euler")
    with pytest.raises(DomainError):
        solve_cylinder(1, 0.0, geodesic_loop(2, 0.0, 16))


def test_cylinder_json_is_plain():
    grid = solve_cylinder(1, 0.0, _ansatz(0.25), s_max=0.1, t_points=8, s_step=0.05)
    data = json.loads(grid.to_json())
    assert data["k"] == 1
    assert len(data["w"]) == len(data["s_grid"]) == 3
    assert grid.slice_loop(0).torus == FlatTorus(1)
