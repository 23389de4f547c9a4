#!/usr/bin/env python3
"""
flows.py: Hamiltonian orbits, the χ equation, the parabolic cylinder

- integrate_orbit: RK4 for ẋ = X_H(t, x) over one period
- integrate_chi: RK4 for χ' = (1/2π) sin 2πχ, the cylinder equation on
  loops of the form kt + q0 + χ(s)
- count_connecting_orbits: flow lines from γ⁻ to γ⁺, one per transversal
- solve_cylinder: ∂_s w = ∂_t²w + (1/2π) sin 2π(w − kt − q0), periodic in t
"""

import json
from dataclasses import dataclass
from typing import Callable, List, Optional, Tuple, Union

import numpy as np

from constants import (
    DEFAULT_CHI_STEPS, DEFAULT_ORBIT_STEPS, LIMIT_TOL, MAX_CYLINDER_STEP,
    MAX_WINDOW_DOUBLINGS, METRIC_SCALE, TWO_PI,
)
from errors import CylinderInstabilityError, DomainError, OrbitStepError
from reports import clean, to_csv
from symplectic_index import hamiltonian_vector_field
from torus_core import (
    FlatTorus, LatticeVector, LoopSample, PendulumPotentialSpec, hamiltonian_along,
    perturbed_energy,
)

LIMITS = (0.0, 0.5, 1.0)
STEPPERS = ("ifrk4", "imex")
MIN_ORBIT_STEPS = 100


# === TYPES ===

@dataclass(frozen=True, eq=False)
class HamiltonianOrbit:
    times: np.ndarray
    u: np.ndarray              # lifted, shape (steps+1, n)
    v: np.ndarray
    period: float = 1.0
    closure_defect: float = 0.0
    energy_drift: Optional[float] = None

    @property
    def winding(self) -> np.ndarray:
        return self.u[-1] - self.u[0]


@dataclass(frozen=True, eq=False)
class FlowTrajectory:
    s_grid: np.ndarray
    chi: np.ndarray
    limits: Tuple[Optional[float], Optional[float]]

    @property
    def chi0(self) -> float:
        return float(self.chi[np.argmin(np.abs(self.s_grid))])

    def connects(self) -> bool:
        """Backward limit at γ⁻ (0 or 1), forward limit at γ⁺ (½)"""
        backward, forward = self.limits
        return backward in (0.0, 1.0) and forward == 0.5

    def to_csv(self) -> str:
        return to_csv(["s", "chi"], zip(self.s_grid, self.chi))


@dataclass(frozen=True, eq=False)
class CylinderGrid:
    s_grid: np.ndarray
    t_grid: np.ndarray
    w: np.ndarray              # shape (len(s_grid), len(t_grid)), lifted with winding k in t
    k: int
    q0: float
    residual: float
    method: str = "ifrk4"

    def phi(self) -> np.ndarray:
        """w − kt − q0, periodic in t"""
        return self.w - self.k * self.t_grid[None, :] - self.q0

    def slice_loop(self, i: int) -> LoopSample:
        return LoopSample(FlatTorus(1), self.w[i], LatticeVector((self.k,)))

    def to_json(self) -> str:
        return json.dumps(clean({
            "k": self.k,
            "q0": self.q0,
            "method": self.method,
            "residual": self.residual,
            "s_grid": self.s_grid,
            "t_grid": self.t_grid,
            "w": self.w,
        }))


# === HAMILTONIAN ORBITS ===

def integrate_orbit(H, x0, steps: int = DEFAULT_ORBIT_STEPS) -> HamiltonianOrbit:
    """Classical RK4 over [0, 1]; closure defect and, for autonomous H, energy drift"""
    if steps < MIN_ORBIT_STEPS:
        raise DomainError(f"need at least {MIN_ORBIT_STEPS} steps, got {steps}")
    u = np.atleast_1d(np.asarray(x0[0], dtype=float))
    v = np.atleast_1d(np.asarray(x0[1], dtype=float))
    if u.shape != v.shape:
        raise DomainError(f"u and v disagree in dimension: {u.shape} vs {v.shape}")

    scale = getattr(H, "metric_scale", METRIC_SCALE)

    def field_at(t, u, v):
        return hamiltonian_vector_field(H, (u, v), t, scale)

    h = 1.0 / steps
    times = np.linspace(0.0, 1.0, steps + 1)
    us = np.empty((steps + 1, len(u)))
    vs = np.empty((steps + 1, len(v)))
    us[0], vs[0] = u, v
    for i in range(steps):
        t = times[i]
        a1, b1 = field_at(t, u, v)
        a2, b2 = field_at(t + h / 2, u + h / 2 * a1, v + h / 2 * b1)
        a3, b3 = field_at(t + h / 2, u + h / 2 * a2, v + h / 2 * b2)
        a4, b4 = field_at(t + h, u + h * a3, v + h * b3)
        u = u + h / 6 * (a1 + 2 * a2 + 2 * a3 + a4)
        v = v + h / 6 * (b1 + 2 * b2 + 2 * b3 + b4)
        if not (np.all(np.isfinite(u)) and np.all(np.isfinite(v))):
            raise OrbitStepError(f"non-finite state after step {i + 1} at t = {times[i + 1]:.6g}")
        us[i + 1], vs[i + 1] = u, v

    gap = us[-1] - us[0]
    closure = max(float(np.max(np.abs(gap - np.round(gap)))),
                  float(np.max(np.abs(vs[-1] - vs[0]))))
    orbit = HamiltonianOrbit(times, us, vs, 1.0, closure)
    if getattr(H, "autonomous", False):
        orbit = HamiltonianOrbit(times, us, vs, 1.0, closure, energy_drift(orbit, H))
    return orbit


def energy_drift(orbit: HamiltonianOrbit, H) -> float:
    """max_t |H(x(t)) − H(x0)| / |H(x0)|, absolute when H(x0) = 0"""
    values = hamiltonian_along(H, orbit.times, orbit.u, orbit.v)
    scale = abs(values[0]) if values[0] != 0 else 1.0
    return float(np.max(np.abs(values - values[0])) / scale)


# === THE χ EQUATION ===

def chi_rhs(chi):
    return np.sin(TWO_PI * chi) / TWO_PI


def chi_closed_form(chi0: float, s):
    """χ(s) = (1/π) arctan(tan(πχ₀) e^s), on the branch of χ₀"""
    s = np.asarray(s, dtype=float)
    base = np.floor(chi0)
    frac = chi0 - base
    if frac in (0.0, 0.5):
        return np.full_like(s, chi0)
    chi = np.arctan(np.tan(np.pi * frac) * np.exp(s)) / np.pi
    if frac > 0.5:
        chi = chi + 1.0
    return chi + base


def _rk4_scalar(chi0: float, h: float, steps: int) -> np.ndarray:
    out = np.empty(steps + 1)
    out[0] = chi = chi0
    for i in range(steps):
        k1 = chi_rhs(chi)
        k2 = chi_rhs(chi + h / 2 * k1)
        k3 = chi_rhs(chi + h / 2 * k2)
        k4 = chi_rhs(chi + h * k3)
        chi = chi + h / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
        out[i + 1] = chi
    return out


def classify_limit(value: float) -> Optional[float]:
    for limit in LIMITS:
        if abs(value - limit) < LIMIT_TOL:
            return limit
    return None


def integrate_chi(chi0: float, s_min: float, s_max: float,
                  steps: int = DEFAULT_CHI_STEPS, max_doublings: int = 0) -> FlowTrajectory:
    """
    χ(0) = chi0, integrated forward to s_max and backward to s_min with a
    common step (s_max − s_min)/steps. Limits are read off at both ends.

    While an end is unclassified the window [s_min, s_max] and the step
    count double together, at most max_doublings times.
    """
    if not 0.0 <= chi0 < 1.0:
        raise DomainError(f"chi0 must lie in [0, 1), got {chi0}")
    if not s_min <= 0.0 <= s_max or s_min == s_max:
        raise DomainError(f"need s_min ≤ 0 ≤ s_max with s_min < s_max, got [{s_min}, {s_max}]")
    trajectory = _chi_window(chi0, s_min, s_max, steps)
    for _ in range(max_doublings):
        if None not in trajectory.limits:
            break
        s_min, s_max, steps = 2 * s_min, 2 * s_max, 2 * steps
        trajectory = _chi_window(chi0, s_min, s_max, steps)
    return trajectory


def _chi_window(chi0: float, s_min: float, s_max: float, steps: int) -> FlowTrajectory:
    h = (s_max - s_min) / steps
    forward_steps = int(round(s_max / h))
    backward_steps = steps - forward_steps
    forward = _rk4_scalar(chi0, h, forward_steps)
    backward = _rk4_scalar(chi0, -h, backward_steps)
    s_grid = np.concatenate([-h * np.arange(backward_steps, 0, -1), h * np.arange(forward_steps + 1)])
    chi = np.concatenate([backward[:0:-1], forward])
    return FlowTrajectory(s_grid, chi, (classify_limit(chi[0]), classify_limit(chi[-1])))


def connecting_orbits(k: int, q0: float = 0.0, window: float = 20.0,
                      steps: int = DEFAULT_CHI_STEPS) -> List[FlowTrajectory]:
    """
    One flow line per transversal χ(0) = ¼ and χ(0) = ¾. Every s-shift of a
    flow line is the same orbit, and each interval (0, ½), (½, 1) is a
    single orbit. Windows double, at fixed step, until both ends classify.
    """
    if k == 0:
        raise DomainError("perturbation needs a nonconstant geodesic, got k = 0")
    PendulumPotentialSpec(k, q0)
    return [integrate_chi(chi0, -window, window, steps, MAX_WINDOW_DOUBLINGS) for chi0 in (0.25, 0.75)]


def count_connecting_orbits(k: int, q0: float = 0.0, window: float = 20.0,
                            steps: int = DEFAULT_CHI_STEPS) -> Tuple[int, int]:
    """(count, count mod 2) of flow lines from γ⁻ to γ⁺"""
    count = sum(1 for trajectory in connecting_orbits(k, q0, window, steps) if trajectory.connects())
    return count, count % 2


# === THE CYLINDER ===

def _nonlinear_hat(phi_hat: np.ndarray) -> np.ndarray:
    phi = np.real(np.fft.ifft(phi_hat))
    return np.fft.fft(chi_rhs(phi))


def _step_ifrk4(phi_hat, h, E, E2):
    k1 = h * _nonlinear_hat(phi_hat)
    k2 = h * _nonlinear_hat(E2 * (phi_hat + k1 / 2))
    k3 = h * _nonlinear_hat(E2 * phi_hat + k2 / 2)
    k4 = h * _nonlinear_hat(E * phi_hat + E2 * k3)
    return E * phi_hat + (E * k1 + 2 * E2 * (k2 + k3) + k4) / 6


def _step_imex(phi_hat, h, implicit):
    return (phi_hat + h * _nonlinear_hat(phi_hat)) / implicit


def solve_cylinder(k: int, q0: float, w0: Union[LoopSample, Callable], s_max: float = 15.0,
                   t_points: Optional[int] = None, s_step: float = 0.01,
                   method: str = "ifrk4") -> CylinderGrid:
    """
    Method of lines for ∂_s w = ∂_t²w + ∇V(t, w) on w = kt + q0 + φ.

    φ is periodic and evolves in Fourier space: ifrk4 treats diffusion
    exactly through an integrating factor and the sine term by RK4, imex
    takes implicit diffusion and an explicit sine step. s_step is capped
    at MAX_CYLINDER_STEP for the explicit part.
    """
    if k == 0:
        raise DomainError("perturbation needs a nonconstant geodesic, got k = 0")
    if method not in STEPPERS:
        raise DomainError(f"method must be one of {STEPPERS}, got {method!r}")
    if not 0.0 < s_step <= MAX_CYLINDER_STEP:
        raise DomainError(f"s_step must lie in (0, {MAX_CYLINDER_STEP:.6g}], got {s_step}")
    if s_max <= 0:
        raise DomainError(f"s_max must be positive, got {s_max}")
    pot = PendulumPotentialSpec(k, q0)

    if isinstance(w0, LoopSample):
        loop = w0
    else:
        loop = LoopSample.from_function(FlatTorus(1), w0, t_points or 64)
    if loop.winding != LatticeVector((k,)):
        raise DomainError(f"initial loop winds {loop.winding}, expected {k}")
    N = loop.N
    t = loop.times
    steps = int(np.ceil(s_max / s_step - 1e-9))
    h = s_max / steps

    kappa = TWO_PI * np.fft.fftfreq(N, d=1.0 / N)
    E = np.exp(-kappa ** 2 * h)
    E2 = np.exp(-kappa ** 2 * h / 2)
    implicit = 1.0 + h * kappa ** 2

    phi_hat = np.fft.fft(loop.samples[:, 0] - k * t - q0)
    w = np.empty((steps + 1, N))
    w[0] = loop.samples[:, 0]
    for i in range(steps):
        if method == "ifrk4":
            phi_hat = _step_ifrk4(phi_hat, h, E, E2)
        else:
            phi_hat = _step_imex(phi_hat, h, implicit)
        phi = np.real(np.fft.ifft(phi_hat))
        if not np.all(np.isfinite(phi)):
            raise CylinderInstabilityError(
                f"non-finite values at s = {(i + 1) * h:.6g}", h, N, i * h)
        w[i + 1] = k * t + q0 + phi

    s_grid = h * np.arange(steps + 1)
    final = w[-1] - k * t - q0 - 0.5
    residual = float(np.max(np.abs(final - np.round(final))))
    return CylinderGrid(s_grid, t, w, k, pot.q0, residual, method)


def cylinder_energies(grid: CylinderGrid) -> np.ndarray:
    """I_V of each s-slice"""
    pot = PendulumPotentialSpec(grid.k, grid.q0)
    return np.array([perturbed_energy(grid.slice_loop(i), pot) for i in range(len(grid.s_grid))])


def ansatz_deviation(grid: CylinderGrid, chi0: float) -> float:
    """max_{s,t} |w − kt − q0 − χ(s)| against the closed-form χ"""
    chi = chi_closed_form(chi0, grid.s_grid)
    return float(np.max(np.abs(grid.phi() - chi[:, None])))


if __name__ == "__main__":
    print("=== FLOWS ===\n")
    for chi0 in (0.25, 0.75):
        trajectory = integrate_chi(chi0, -20.0, 20.0)
        print(f"chi0 = {chi0}: limits {trajectory.limits}")
    print(f"connecting orbits (k=1): {count_connecting_orbits(1)}")
