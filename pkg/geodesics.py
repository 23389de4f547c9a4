#!/usr/bin/env python3
"""
geodesics.py: Critical sets of the energy, Jacobi spectra, residuals

Unperturbed: every closed geodesic is γ_{k,q}(t) = kt + q, the component
G^k is a torus, −d²/dt² is the Jacobi operator (index 0, nullity n).
Perturbed (S¹ only): the pendulum potential leaves two loops per k,
γ⁻ = kt + q0 and γ⁺ = kt + q0 + ½, with Jacobi operators −ξ̈ ∓ ξ.
"""

import itertools
import math
from dataclasses import dataclass
from typing import List, Tuple

import numpy as np
from scipy.integrate import solve_ivp
from scipy.optimize import root

from constants import ENERGY_PER_WINDING, FOUR_PI_SQ, TWO_PI, DEFAULT_SAMPLES
from errors import DomainError, UnsupportedDimensionError
from reports import to_csv
from torus_core import (
    FlatTorus, LatticeVector, LoopSample, PendulumPotentialSpec,
    geodesic_loop, second_difference,
)

SIGNS = ("-", "+")


# === TYPES ===

@dataclass(frozen=True)
class GeodesicComponent:
    """G^k: the geodesics of winding k, a copy of T^n at energy 2π²|k|²"""
    k: LatticeVector
    energy_value: float
    dim_component: int

    @classmethod
    def of(cls, k: LatticeVector) -> "GeodesicComponent":
        return cls(k, ENERGY_PER_WINDING * k.norm_sq(), k.dim)

    def representative(self, q=0.0, N: int = DEFAULT_SAMPLES) -> LoopSample:
        return geodesic_loop(self.k, q, N)


@dataclass(frozen=True)
class SpectrumReport:
    eigenvalues: Tuple[Tuple[float, int], ...]
    kernel_dim: int
    negative_count: int

    @classmethod
    def from_pairs(cls, pairs) -> "SpectrumReport":
        merged = {}
        for value, multiplicity in pairs:
            if multiplicity < 1:
                raise DomainError(f"multiplicity must be ≥ 1, got {multiplicity}")
            merged[value] = merged.get(value, 0) + multiplicity
        eigenvalues = tuple(sorted(merged.items()))
        return cls(
            eigenvalues=eigenvalues,
            kernel_dim=merged.get(0.0, 0),
            negative_count=sum(m for v, m in eigenvalues if v < 0),
        )

    @property
    def morse_index(self) -> int:
        return self.negative_count

    @property
    def nullity(self) -> int:
        return self.kernel_dim

    def flat(self) -> List[float]:
        """Eigenvalues repeated by multiplicity, ascending"""
        return [v for v, m in self.eigenvalues for _ in range(m)]


@dataclass(frozen=True)
class PerturbedCriticalPair:
    gamma_minus: LoopSample
    gamma_plus: LoopSample
    indices: Tuple[int, int]
    actions: Tuple[float, float]
    potential: PendulumPotentialSpec


@dataclass(frozen=True)
class UniquenessScan:
    """Outcome of multi-start shooting for 1-periodic pendulum loops"""
    starts: int
    converged: int
    offsets: Tuple[float, ...]     # distinct γ(0) − q0 mod 1 of the solutions found
    max_speed: float               # largest |γ̇ − k| over the solutions found


# === CRITICAL SETS ===

def enumerate_components(torus: FlatTorus, a: float) -> List[GeodesicComponent]:
    """All G^l with 2π²|l|² ≤ a, lexicographic in l; empty for a < 0"""
    if a < 0:
        return []
    radius = math.ceil(math.sqrt(a / ENERGY_PER_WINDING))
    box = range(-radius, radius + 1)
    bound = a * (1.0 + 1e-12)
    found = [l for l in itertools.product(box, repeat=torus.dim)
             if ENERGY_PER_WINDING * sum(x * x for x in l) <= bound]
    return [GeodesicComponent.of(LatticeVector(l)) for l in sorted(found)]


def component_table(torus: FlatTorus, a: float) -> List[dict]:
    """Rows (k, energy, morse_index, nullity) for every component below a"""
    spectrum = jacobi_spectrum(torus, 0)
    return [{
        "k": list(c.k.entries),
        "energy": c.energy_value,
        "morse_index": spectrum.morse_index,
        "nullity": spectrum.nullity,
    } for c in enumerate_components(torus, a)]


def component_csv(torus: FlatTorus, a: float) -> str:
    header = [f"k{j + 1}" for j in range(torus.dim)] + ["energy", "morse_index", "nullity"]
    rows = [row["k"] + [row["energy"], row["morse_index"], row["nullity"]]
            for row in component_table(torus, a)]
    return to_csv(header, rows)


def geodesic_residual(loop: LoopSample) -> float:
    """max |γ̈| by centered second differences; 0 on a discrete geodesic"""
    return float(np.max(np.abs(second_difference(loop))))


# === SPECTRA ===

def jacobi_spectrum(torus: FlatTorus, mode_cutoff: int) -> SpectrumReport:
    """
    −d²/dt² on R^n-valued 1-periodic fields, Fourier modes l = 0..L.

    Mode l ≥ 1 contributes cos and sin per coordinate, hence 2n.
    """
    _check_cutoff(mode_cutoff)
    n = torus.dim
    pairs = [(0.0, n)] + [(FOUR_PI_SQ * l * l, 2 * n) for l in range(1, mode_cutoff + 1)]
    return SpectrumReport.from_pairs(pairs)


def perturbed_jacobi_spectrum(sign: str, mode_cutoff: int) -> SpectrumReport:
    """L_V^∓ ξ = −ξ̈ ∓ ξ on S¹: eigenvalues 4π²l² ∓ 1"""
    _check_cutoff(mode_cutoff)
    shift = -1.0 if _sign(sign) == "-" else 1.0
    pairs = [(shift, 1)] + [(FOUR_PI_SQ * l * l + shift, 2) for l in range(1, mode_cutoff + 1)]
    return SpectrumReport.from_pairs(pairs)


# === PERTURBED CRITICAL POINTS ===

def perturbed_critical_points(k: int, q0: float = 0.0,
                              N: int = DEFAULT_SAMPLES) -> PerturbedCriticalPair:
    if k == 0:
        raise DomainError("perturbation needs a nonconstant geodesic, got k = 0")
    pot = PendulumPotentialSpec(k, q0)
    base = ENERGY_PER_WINDING * k * k
    indices = (perturbed_jacobi_spectrum("-", 0).morse_index,
               perturbed_jacobi_spectrum("+", 0).morse_index)
    return PerturbedCriticalPair(
        gamma_minus=geodesic_loop(k, q0, N),
        gamma_plus=geodesic_loop(k, q0 + 0.5, N),
        indices=indices,
        actions=(base + 1.0, base - 1.0),
        potential=pot,
    )


def perturbed_residual(loop: LoopSample, pot: PendulumPotentialSpec) -> float:
    """max |−γ̈ − (1/2π) sin 2π(γ − kt − q0)|"""
    if loop.torus.dim != 1:
        raise UnsupportedDimensionError(f"pendulum residual lives on S¹, got n = {loop.torus.dim}")
    lhs = -second_difference(loop)[:, 0] - pot.gradient(loop.times, loop.samples[:, 0])
    return float(np.max(np.abs(lhs)))


def scan_perturbed_uniqueness(k: int, q0: float = 0.0, starts: int = 24,
                              seed: int = 0, tol: float = 1e-8) -> UniquenessScan:
    """
    Multi-start shooting for 1-periodic solutions in the component k.

    With φ = γ − kt − q0 the equation is φ'' = −(1/2π) sin 2πφ and the
    component asks for φ(1) = φ(0), φ'(1) = φ'(0). Starts are drawn in
    [0, 1) × [−1, 1]; converged solutions are merged by φ(0) mod 1.
    """
    if k == 0:
        raise DomainError("perturbation needs a nonconstant geodesic, got k = 0")
    PendulumPotentialSpec(k, q0)
    rng = np.random.default_rng(seed)
    guesses = np.column_stack([rng.uniform(0.0, 1.0, starts), rng.uniform(-1.0, 1.0, starts)])

    def rhs(s, y):
        return [y[1], -np.sin(TWO_PI * y[0]) / TWO_PI]

    def defect(y0):
        sol = solve_ivp(rhs, (0.0, 1.0), y0, rtol=1e-11, atol=1e-12)
        return sol.y[:, -1] - y0

    offsets, speeds, converged = [], [], 0
    for guess in guesses:
        result = root(defect, guess, method="hybr", tol=1e-12)
        if not result.success or np.max(np.abs(defect(result.x))) > tol:
            continue
        converged += 1
        sol = solve_ivp(rhs, (0.0, 1.0), result.x, rtol=1e-11, atol=1e-12, dense_output=True)
        speeds.append(float(np.max(np.abs(sol.sol(np.linspace(0, 1, 65))[1]))))
        offset = float(result.x[0] % 1.0)
        if offset > 1.0 - 1e-6:
            offset = 0.0
        if all(abs(offset - o) > 1e-6 for o in offsets):
            offsets.append(offset)
    return UniquenessScan(starts, converged, tuple(sorted(offsets)), max(speeds, default=0.0))


# === HELPERS ===

def _check_cutoff(mode_cutoff: int):
    if mode_cutoff < 0:
        raise DomainError(f"mode cutoff must be ≥ 0, got {mode_cutoff}")


def _sign(sign) -> str:
    if sign in ("-", -1, "minus"):
        return "-"
    if sign in ("+", 1, "plus"):
        return "+"
    raise DomainError(f"sign must be one of {SIGNS}, got {sign!r}")


if __name__ == "__main__":
    print("=== GEODESICS ===\n")
    print(component_csv(FlatTorus(2), ENERGY_PER_WINDING))
    for sign in SIGNS:
        print(sign, perturbed_jacobi_spectrum(sign, 2))
