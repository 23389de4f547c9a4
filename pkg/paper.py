#!/usr/bin/env python3
"""
paper.py: Catalogue of anchored values and their checks

Each anchor recomputes one reference value and compares it with the
expected value, exactly for integers and fractions, within a tolerance for
floats. Groups: torus, geodesics, homology, index, appendix.
"""

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, List, Optional

import numpy as np

from constants import ALGEBRAIC_TOL, ENERGY_PER_WINDING, FOUR_PI_SQ, QUADRATURE_TOL
from errors import DomainError
from journal import log_anchor, log_error
from torus_core import (
    FlatTorus, FreeHamiltonian, LoopSample, LatticeVector, PendulumHamiltonian,
    critical_phase_loop, energy, geodesic_loop, h1_distance, perturbed_energy,
    symplectic_action,
)
import geodesics
import homology
import symplectic_index as cz
import flows

GROUPS = ("torus", "geodesics", "homology", "index", "appendix")


@dataclass(frozen=True)
class Anchor:
    id: str
    group: str
    description: str
    compute: Callable
    expected: object
    tol: Optional[float] = None        # None: exact equality

    def check(self, value) -> bool:
        if self.tol is None:
            return value == self.expected
        got = np.asarray(value, dtype=float)
        want = np.asarray(self.expected, dtype=float)
        scale = np.maximum(1.0, np.abs(want))
        return bool(got.shape == want.shape and np.all(np.abs(got - want) <= self.tol * scale))


# === COMPUTATIONS ===

def _constant(q: float, N: int = 64) -> LoopSample:
    return LoopSample(FlatTorus(1), np.full(N, q), LatticeVector((0,)))


def _ranks(table) -> List[int]:
    return table.free_ranks()


def _three_way(n: int, k) -> bool:
    torus = FlatTorus(n)
    a = homology.action_level(k)
    morse = homology.morse_bott_homology(torus, a)
    floer = homology.floer_bott_cohomology(torus, a)
    singular = homology.sublevel_singular_homology(torus, k)
    return all(
        morse.group(i).free_rank == floer.group(-i).free_rank == singular.group(i).free_rank
        and not morse.group(i).torsion and not floer.group(-i).torsion
        for i in range(n + 1)
    )


def _rotation_signature() -> int:
    crossings = cz.detect_crossings(cz.rotation_path(1))
    return crossings[0].form_signature


def _index_relation() -> bool:
    return all(
        cz.rs_index(cz.linearized_flow("perturbed", 1, s)).numerator
        == -2 * geodesics.perturbed_jacobi_spectrum(s, 0).negative_count
        for s in ("-", "+")
    )


def _perturbed_actions(k: int, q0: float):
    pair = geodesics.perturbed_critical_points(k, q0, 128)
    return [perturbed_energy(pair.gamma_minus, pair.potential),
            perturbed_energy(pair.gamma_plus, pair.potential)]


def _morse_witten_ranks(k: int):
    table = homology.homology_of_complex(
        homology.morse_witten_complex_perturbed(k, flows.count_connecting_orbits(k)))
    return _ranks(table)


def _cylinder_stationary() -> float:
    grid = flows.solve_cylinder(1, 0.0, geodesic_loop(1, 0.5, 32), s_max=5.0, s_step=0.05)
    return grid.residual


def _cylinder_ansatz_deviation() -> float:
    grid = flows.solve_cylinder(1, 0.0, lambda t: t + 0.25, s_max=15.0, t_points=32, s_step=0.01)
    return flows.ansatz_deviation(grid, 0.25)


def _cylinder_energy_decreases() -> bool:
    grid = flows.solve_cylinder(1, 0.0, lambda t: t + 0.25 + 0.05 * np.sin(2 * np.pi * t),
                                s_max=5.0, t_points=32, s_step=0.01)
    return bool(np.all(np.diff(flows.cylinder_energies(grid)) <= 1e-8))


def _chi_error() -> float:
    trajectory = flows.integrate_chi(0.25, -20.0, 20.0)
    return float(np.max(np.abs(trajectory.chi - flows.chi_closed_form(0.25, trajectory.s_grid))))


def _connector_endpoint():
    last = cz.detect_crossings(cz.connector_path())[-1]
    return (last.t, last.form_signature)


def _vanishing_above_dimension() -> bool:
    return all(
        homology.morse_bott_homology(FlatTorus(n), ENERGY_PER_WINDING).group(i).is_zero()
        and homology.sublevel_singular_homology(FlatTorus(n), (1,) + (0,) * (n - 1)).group(i).is_zero()
        for n in (1, 2, 3) for i in range(n + 1, n + 3)
    )


ANCHORS: List[Anchor] = [
    # torus
    Anchor("energy-geodesic", "torus", "I(γ_{k,q}) = 2π²|k|² for k = (1, 0)",
           lambda: energy(geodesic_loop((1, 0), 0.3, 64)), ENERGY_PER_WINDING, ALGEBRAIC_TOL),
    Anchor("action-critical", "torus", "A(x_{u0,k}) = 2π²|k|² for k = (1, 1)",
           lambda: symplectic_action(critical_phase_loop(0.2, (1, 1), 64), FreeHamiltonian()),
           2 * ENERGY_PER_WINDING, ALGEBRAIC_TOL),
    Anchor("energy-wiggle", "torus", "I(t + 0.1 sin 2πt) = 2π²(1 + 0.02π²)",
           lambda: energy(LoopSample.from_function(
               FlatTorus(1), lambda t: t + 0.1 * np.sin(2 * np.pi * t), 512)),
           ENERGY_PER_WINDING * (1 + 0.02 * np.pi ** 2), QUADRATURE_TOL),
    Anchor("h1-half-shift", "torus", "‖q − (q + ½)‖_{1,2} = 2 for constant loops",
           lambda: h1_distance(_constant(0.1), _constant(0.6)), 2.0, ALGEBRAIC_TOL),

    # geodesics
    Anchor("components-n1", "geodesics", "3 components below 2π² on S¹",
           lambda: len(geodesics.enumerate_components(FlatTorus(1), ENERGY_PER_WINDING)), 3),
    Anchor("components-n2", "geodesics", "5 components below 2π² on T²",
           lambda: len(geodesics.enumerate_components(FlatTorus(2), ENERGY_PER_WINDING)), 5),
    Anchor("jacobi-index-nullity", "geodesics", "Ind = 0, Null = n for n = 3",
           lambda: (geodesics.jacobi_spectrum(FlatTorus(3), 2).negative_count,
                    geodesics.jacobi_spectrum(FlatTorus(3), 2).kernel_dim), (0, 3)),
    Anchor("perturbed-minus", "geodesics", "L_V⁻ has one negative eigenvalue, −1",
           lambda: geodesics.perturbed_jacobi_spectrum("-", 1).eigenvalues,
           ((-1.0, 1), (FOUR_PI_SQ - 1.0, 2))),
    Anchor("perturbed-plus", "geodesics", "L_V⁺ is positive",
           lambda: geodesics.perturbed_jacobi_spectrum("+", 3).negative_count, 0),
    Anchor("perturbed-actions", "geodesics", "I_V(γ∓) = 2π²k² ± 1 for k = 2",
           lambda: _perturbed_actions(2, 0.3),
           [4 * ENERGY_PER_WINDING + 1, 4 * ENERGY_PER_WINDING - 1], ALGEBRAIC_TOL),
    Anchor("perturbed-uniqueness", "geodesics", "shooting finds only γ⁻ and γ⁺",
           lambda: list(geodesics.scan_perturbed_uniqueness(1, 0.0, starts=12).offsets),
           [0.0, 0.5], 1e-6),

    # homology
    Anchor("morse-n2", "homology", "HM_* = Z⁵, Z¹⁰, Z⁵ for n = 2, |k| = 1",
           lambda: _ranks(homology.morse_bott_homology(FlatTorus(2), ENERGY_PER_WINDING)),
           [5, 10, 5]),
    Anchor("floer-n1", "homology", "HF⁻¹ = Z³, HF⁰ = Z³ for n = 1, |k| = 1",
           lambda: _ranks(homology.floer_bott_cohomology(FlatTorus(1), ENERGY_PER_WINDING)),
           [3, 3]),
    Anchor("three-way-n3", "homology", "Morse, Floer and sublevel ranks agree for n = 3, k = (1,0,0)",
           lambda: _three_way(3, (1, 0, 0)), True),
    Anchor("klein-torsion", "homology", "H_1(Klein bottle) = Z ⊕ Z/2",
           lambda: homology.homology_of_complex(homology.IntegerChainComplex(
               {0: 1, 1: 2, 2: 1}, {2: [[0], [2]]})).group(1),
           homology.HomologyGroup(1, (2,))),
    Anchor("vanishing-above-n", "homology", "H_i = 0 for i > n, n = 1, 2, 3",
           _vanishing_above_dimension, True),

    # index
    Anchor("cz-shear-n1", "index", "μ_CZ^g(a) = ½(−2 + 1) = −½",
           lambda: cz.generalized_cz_shear(1).value, Fraction(-1, 2)),
    Anchor("cz-shear-n3", "index", "μ_CZ^g(A) = −n/2 for n = 3",
           lambda: cz.generalized_cz_shear(3).value, Fraction(-3, 2)),
    Anchor("cz-tilted", "index", "μ_CZ^g(ã) = ½(0 − 1) = −½",
           lambda: cz.rs_index(cz.tilted_shear()).value, Fraction(-1, 2)),
    Anchor("rotation-signature", "index", "crossing form of the rotation at the identity is −2",
           _rotation_signature, -2),
    Anchor("connector-endpoint", "index", "the connector ends on a(1) with signature +1",
           _connector_endpoint, (1.0, 1)),
    Anchor("cz-minus", "index", "μ_CZ(Φ⁻) = −1 by crossings and by ν(S) − n",
           lambda: (cz.rs_index(cz.linearized_flow("perturbed", 1, "-")).value,
                    cz.cz_from_quadratic(cz.perturbed_generator("-")[0])), (-1, -1)),
    Anchor("cz-plus", "index", "μ_CZ(Φ⁺) = 0 by crossings and by ν(S) − n",
           lambda: (cz.rs_index(cz.linearized_flow("perturbed", 1, "+")).value,
                    cz.cz_from_quadratic(cz.perturbed_generator("+")[0])), (0, 0)),
    Anchor("index-relation", "index", "μ_CZ(x∓) = −Ind(γ∓)", _index_relation, True),
    Anchor("grading-shift", "index", "−n/2 + n/2 = 0 for n = 2",
           lambda: cz.grading_shift(cz.generalized_cz_shear(2).value, 2), 0),

    # appendix
    Anchor("chi-limits", "appendix", "χ(0) = ¼ runs from 0 to ½",
           lambda: flows.integrate_chi(0.25, -20.0, 20.0).limits, (0.0, 0.5)),
    Anchor("chi-closed-form", "appendix", "RK4 χ matches (1/π) arctan(tan(πχ₀) e^s)",
           _chi_error, 0.0, 1e-8),
    Anchor("chi-equilibrium", "appendix", "χ₀ = 0 stays at 0",
           lambda: float(np.max(np.abs(flows.integrate_chi(0.0, -5.0, 5.0, 1000).chi))), 0.0, 1e-12),
    Anchor("connecting-orbits", "appendix", "two flow lines from γ⁻ to γ⁺, n₂ = 0",
           lambda: flows.count_connecting_orbits(1), (2, 0)),
    Anchor("morse-witten", "appendix", "HM_* = Z₂, Z₂ in degrees 0, 1",
           lambda: _morse_witten_ranks(1), [1, 1]),
    Anchor("cylinder-stationary", "appendix", "γ⁺ is a fixed point of the parabolic flow",
           _cylinder_stationary, 0.0, 1e-10),
    Anchor("cylinder-ansatz", "appendix", "the cylinder from kt + q0 + ¼ stays of the form kt + q0 + χ(s)",
           _cylinder_ansatz_deviation, 0.0, 1e-6),
    Anchor("cylinder-energy", "appendix", "I_V decreases along the parabolic flow",
           _cylinder_energy_decreases, True),
    Anchor("orbit-closure", "appendix", "x_{u0,k} closes after one period",
           lambda: flows.integrate_orbit(FreeHamiltonian(), (0.3, FOUR_PI_SQ * 2)).closure_defect,
           0.0, 1e-10),
    Anchor("orbit-closure-minus", "appendix", "x⁻ of the pendulum Hamiltonian closes to 1e-8",
           lambda: flows.integrate_orbit(PendulumHamiltonian(1, 0.0), (0.0, FOUR_PI_SQ)).closure_defect,
           0.0, 1e-8),
]


# === EVALUATION ===

def evaluate(anchor: Anchor) -> dict:
    try:
        value = anchor.compute()
        passed = anchor.check(value)
        error = None
    except Exception as e:
        log_error(e, f"anchor {anchor.id}")
        value, passed, error = None, False, f"{type(e).__name__}: {e}"
    result = {
        "id": anchor.id,
        "group": anchor.group,
        "description": anchor.description,
        "value": _plain(value),
        "expected": _plain(anchor.expected),
        "status": "PASS" if passed else "FAIL",
    }
    if error:
        result["error"] = error
    log_anchor(anchor.id, result["value"], result["expected"], passed)
    return result


def run_anchors(only: Optional[str] = None, workers: int = 4) -> List[dict]:
    """Evaluate concurrently, report in catalogue order"""
    if only is not None and only not in GROUPS:
        raise DomainError(f"unknown group {only!r}, choose from {GROUPS}")
    selected = [a for a in ANCHORS if only is None or a.group == only]
    with ThreadPoolExecutor(max_workers=max(1, workers)) as pool:
        return list(pool.map(evaluate, selected))


def _plain(value):
    """JSON-friendly: Fractions as 'p/q' strings, groups as descriptions"""
    if isinstance(value, Fraction):
        return str(value) if value.denominator != 1 else value.numerator
    if isinstance(value, homology.HomologyGroup):
        return value.describe()
    if isinstance(value, (list, tuple)):
        return [_plain(v) for v in value]
    if isinstance(value, np.ndarray):
        return value.tolist()
    return value


if __name__ == "__main__":
    for result in run_anchors():
        print(f"[{result['status']}] {result['group']:9s} {result['id']}")
