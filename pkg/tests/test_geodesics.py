import numpy as np
import pytest

from constants import ENERGY_PER_WINDING, FOUR_PI_SQ
from errors import DomainError, UnsupportedDimensionError
from geodesics import (
    GeodesicComponent, SpectrumReport, component_csv, component_table,
    enumerate_components, geodesic_residual, jacobi_spectrum, perturbed_critical_points,
    perturbed_jacobi_spectrum, perturbed_residual, scan_perturbed_uniqueness,
)
from torus_core import (
    FlatTorus, LatticeVector, LoopSample, PendulumPotentialSpec, geodesic_loop,
    perturbed_energy, second_difference,
)


# --- critical components ---

def test_components_on_the_circle():
    found = enumerate_components(FlatTorus(1), ENERGY_PER_WINDING)
    assert [c.k.entries for c in found] == [(-1,), (0,), (1,)]


def test_components_on_the_two_torus():
    found = enumerate_components(FlatTorus(2), ENERGY_PER_WINDING)
    assert {c.k.entries for c in found} == {(0, 0), (1, 0), (-1, 0), (0, 1), (0, -1)}
    assert all(c.dim_component == 2 for c in found)


def test_components_below_negative_level():
    assert enumerate_components(FlatTorus(3), -1.0) == []


def test_components_count_matches_lattice_ball():
    for n in (1, 2, 3):
        for r2 in (0, 1, 2, 4):
            a = ENERGY_PER_WINDING * r2
            brute = sum(1 for l in np.ndindex(*(5,) * n) if sum((x - 2) ** 2 for x in l) <= r2)
            assert len(enumerate_components(FlatTorus(n), a)) == brute


def test_component_energy_and_representative():
    c = GeodesicComponent.of(LatticeVector((1, -2)))
    assert c.energy_value == pytest.approx(5 * ENERGY_PER_WINDING)
    loop = c.representative(0.3, 32)
    assert loop.winding == c.k
    assert geodesic_residual(loop) < 1e-9


def test_component_table_and_csv():
    rows = component_table(FlatTorus(1), ENERGY_PER_WINDING)
    assert [r["k"] for r in rows] == [[-1], [0], [1]]
    assert {r["morse_index"] for r in rows} == {0}
    assert {r["nullity"] for r in rows} == {1}
    text = component_csv(FlatTorus(1), ENERGY_PER_WINDING)
    assert text.splitlines()[0] == "k1,energy,morse_index,nullity"
    assert len(text.splitlines()) == 4


def test_geodesic_residual_detects_a_wiggle():
    loop = LoopSample.from_function(FlatTorus(1), lambda t: t + 0.05 * np.sin(2 * np.pi * t), 64)
    assert geodesic_residual(loop) > 1.0


# --- spectra ---

def test_jacobi_spectrum_closed_form():
    report = jacobi_spectrum(FlatTorus(1), 2)
    assert report.eigenvalues == ((0.0, 1), (FOUR_PI_SQ, 2), (4 * FOUR_PI_SQ, 2))
    three = jacobi_spectrum(FlatTorus(3), 3)
    assert [m for _, m in three.eigenvalues] == [3, 6, 6, 6]
    assert three.morse_index == 0 and three.nullity == 3


def test_perturbed_spectra_shift_by_one():
    minus = perturbed_jacobi_spectrum("-", 2)
    plus = perturbed_jacobi_spectrum("+", 2)
    assert minus.flat() == [-1.0, FOUR_PI_SQ - 1, FOUR_PI_SQ - 1, 4 * FOUR_PI_SQ - 1, 4 * FOUR_PI_SQ - 1]
    assert plus.flat()[0] == 1.0
    assert (minus.morse_index, minus.nullity) == (1, 0)
    assert (plus.morse_index, plus.nullity) == (0, 0)


def test_spectrum_rejects_bad_input():
    with pytest.raises(DomainError):
        jacobi_spectrum(FlatTorus(1), -1)
    with pytest.raises(DomainError):
        perturbed_jacobi_spectrum("0", 1)
    with pytest.raises(DomainError):
        SpectrumReport.from_pairs([(1.0, 0)])


def _discrete_jacobi(N: int) -> np.ndarray:
    """−d²/dt² assembled column by column from second_difference"""
    columns = []
    for j in range(N):
        e = np.zeros(N)
        e[j] = 0.1
        loop = LoopSample(FlatTorus(1), e, LatticeVector((0,)))
        columns.append(-second_difference(loop)[:, 0] / 0.1)
    return np.array(columns).T


def test_finite_difference_oracle_converges_at_second_order():
    closed = jacobi_spectrum(FlatTorus(1), 2).flat()
    errors = []
    for N in (64, 128):
        eig = np.sort(np.linalg.eigvalsh(_discrete_jacobi(N)))[:5]
        assert eig[0] == pytest.approx(0.0, abs=1e-8)
        errors.append(np.max(np.abs(eig - closed)))
    order = np.log2(errors[0] / errors[1])
    assert 1.8 <= order <= 2.2


def _discrete_perturbed_jacobi(sign: str, N: int) -> np.ndarray:
    """Linearized pendulum residual at γ∓: −d²/dt² minus the derivative of ∇V"""
    pair = perturbed_critical_points(1, 0.0, N)
    loop = pair.gamma_minus if sign == "-" else pair.gamma_plus
    u, eps = loop.samples[:, 0], 1e-6
    slope = (pair.potential.gradient(loop.times, u + eps)
             - pair.potential.gradient(loop.times, u - eps)) / (2 * eps)
    return _discrete_jacobi(N) - np.diag(slope)


def test_perturbed_finite_difference_oracle():
    closed = perturbed_jacobi_spectrum("-", 16).flat()
    errors = []
    for N in (128, 256):
        eig = np.sort(np.linalg.eigvalsh(_discrete_perturbed_jacobi("-", N)))
        assert eig[0] == pytest.approx(-1.0, abs=1e-8)
        assert np.sum(eig < 0) == 1
        errors.append(np.max(np.abs(eig[:len(closed)] - closed)))
    assert 1.8 <= np.log2(errors[0] / errors[1]) <= 2.2

    plus = np.linalg.eigvalsh(_discrete_perturbed_jacobi("+", 128))
    assert np.min(plus) == pytest.approx(1.0, abs=1e-8)


# --- perturbed critical points ---

@pytest.mark.parametrize("k,q0", [(1, 0.0), (2, 0.3), (-1, 0.75)])
def test_perturbed_pair(k, q0):
    pair = perturbed_critical_points(k, q0, 128)
    assert pair.indices == (1, 0)
    base = ENERGY_PER_WINDING * k * k
    assert pair.actions == pytest.approx((base + 1, base - 1))
    pot = pair.potential
    assert perturbed_residual(pair.gamma_minus, pot) < 1e-9
    assert perturbed_residual(pair.gamma_plus, pot) < 1e-9
    assert perturbed_energy(pair.gamma_minus, pot) == pytest.approx(base + 1, rel=1e-12)
    assert perturbed_energy(pair.gamma_plus, pot) == pytest.approx(base - 1, rel=1e-12)
    assert pair.actions[0] > pair.actions[1]


def test_perturbed_pair_needs_nonzero_winding():
    with pytest.raises(DomainError):
        perturbed_critical_points(0)


def test_perturbed_residual_of_shifted_loop():
    pot = PendulumPotentialSpec(1, 0.0)
    assert perturbed_residual(geodesic_loop(1, 0.25, 64), pot) == pytest.approx(1 / (2 * np.pi))
    with pytest.raises(UnsupportedDimensionError):
        perturbed_residual(geodesic_loop((1, 0), 0.0, 16), pot)


def test_shooting_finds_only_the_two_critical_loops():
    scan = scan_perturbed_uniqueness(1, 0.0, starts=12)
    assert scan.converged >= 2
    assert scan.offsets == pytest.approx((0.0, 0.5), abs=1e-6)
    assert scan.max_speed < 1e-6
