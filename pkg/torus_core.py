#!/usr/bin/env python3
"""
torus_core.py: Flat torus, sampled loops, energy and action

Loops live as lifts to R^n plus a winding vector k, u(t+1) = u(t) + k.
Grids are uniform, t_j = j/N. Quadrature is the periodic trapezoid rule
(a plain mean). Derivatives are spectral on the periodic part u − kt by
default, centered differences on request; both are exact on affine lifts.
"""

import json
from dataclasses import dataclass
from typing import Callable, Sequence, Tuple, Union

import numpy as np

from constants import (
    ENERGY_PER_WINDING, LIFT_TOL, METRIC_SCALE, MIN_SAMPLES, TWO_PI,
)
from errors import (
    DomainError, MalformedLiftError, SampleCountMismatchError,
    UnsupportedDimensionError,
)

DERIVATIVES = ("spectral", "centered")


# === TYPES ===

@dataclass(frozen=True)
class FlatTorus:
    """R^n/Z^n with g = (2π)² δ_jk du^j ⊗ du^k"""
    dim: int
    metric_scale: float = METRIC_SCALE

    def __post_init__(self):
        if int(self.dim) != self.dim or self.dim < 1:
            raise DomainError(f"torus dimension must be a positive integer, got {self.dim}")
        if self.metric_scale != METRIC_SCALE:
            raise DomainError(f"metric scale is fixed to (2π)², got {self.metric_scale}")

    def metric(self) -> np.ndarray:
        return self.metric_scale * np.eye(self.dim)

    def volume(self) -> float:
        """vol_g = (2π)^n du^1…du^n, integrated over the unit cube"""
        return TWO_PI ** self.dim


@dataclass(frozen=True)
class LatticeVector:
    entries: Tuple[int, ...]

    def __post_init__(self):
        values = tuple(int(e) for e in np.atleast_1d(self.entries))
        if any(v != e for v, e in zip(values, np.atleast_1d(self.entries))):
            raise DomainError(f"lattice vector entries must be integers, got {self.entries}")
        if not values:
            raise DomainError("lattice vector must have at least one entry")
        object.__setattr__(self, "entries", values)

    @classmethod
    def parse(cls, text: str) -> "LatticeVector":
        """'1,0,-2' -> (1, 0, -2)"""
        return cls(tuple(int(part) for part in text.split(",") if part.strip()))

    @classmethod
    def zero(cls, dim: int) -> "LatticeVector":
        return cls((0,) * dim)

    @property
    def dim(self) -> int:
        return len(self.entries)

    def norm_sq(self) -> int:
        return sum(e * e for e in self.entries)

    def as_array(self) -> np.ndarray:
        return np.array(self.entries, dtype=float)

    def __str__(self):
        return ",".join(str(e) for e in self.entries)


@dataclass(frozen=True, eq=False)
class LoopSample:
    """
    Uniform samples u_0..u_{N−1} of a lift u: R -> R^n with u(t+1) = u(t) + k.

    Successive lifted samples, the wrap u_0 + k − u_{N−1} included, must
    differ by less than ½ per coordinate, otherwise the lift is ambiguous.
    """
    torus: FlatTorus
    samples: np.ndarray
    winding: LatticeVector

    def __post_init__(self):
        samples = np.asarray(self.samples, dtype=float)
        if samples.ndim == 1:
            samples = samples[:, None]
        if samples.ndim != 2 or samples.shape[1] != self.torus.dim:
            raise DomainError(
                f"samples must have shape (N, {self.torus.dim}), got {np.shape(self.samples)}")
        if samples.shape[0] < MIN_SAMPLES:
            raise DomainError(f"need at least {MIN_SAMPLES} samples, got {samples.shape[0]}")
        if self.winding.dim != self.torus.dim:
            raise DomainError(
                f"winding {self.winding} does not match torus dimension {self.torus.dim}")
        if not np.all(np.isfinite(samples)):
            raise MalformedLiftError("samples contain non-finite values")
        closed = np.vstack([samples, samples[:1] + self.winding.as_array()])
        jumps = np.abs(np.diff(closed, axis=0))
        if np.any(jumps >= 0.5):
            j = int(np.argmax(jumps.max(axis=1)))
            raise MalformedLiftError(
                f"lift jumps by {jumps[j].max():.3g} between samples {j} and {j + 1}")
        samples.setflags(write=False)
        object.__setattr__(self, "samples", samples)

    @classmethod
    def from_function(cls, torus: FlatTorus, u: Callable, N: int) -> "LoopSample":
        """
        Sample a lift given as a function of t on [0, 1].

        u(t) is evaluated at j/N for j = 0..N; u(1) − u(0) must be an
        integer vector within LIFT_TOL.
        """
        t = np.arange(N + 1) / N
        values = np.asarray([np.atleast_1d(u(tj)) for tj in t], dtype=float)
        gap = values[-1] - values[0]
        winding = _integer_gap(gap)
        return cls(torus, values[:-1], winding)

    @property
    def N(self) -> int:
        return self.samples.shape[0]

    @property
    def h(self) -> float:
        return 1.0 / self.N

    @property
    def times(self) -> np.ndarray:
        return np.arange(self.N) / self.N

    def periodic_part(self) -> np.ndarray:
        """p_j = u_j − k t_j, a plain periodic sequence"""
        return self.samples - np.outer(self.times, self.winding.as_array())


@dataclass(frozen=True, eq=False)
class PhaseLoopSample:
    """Loop in T*T^n: u with winding (base), covector v plain periodic"""
    base: LoopSample
    covectors: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.covectors, dtype=float)
        if v.ndim == 1:
            v = v[:, None]
        if v.shape != self.base.samples.shape:
            raise SampleCountMismatchError(
                f"covectors shape {v.shape} != base samples shape {self.base.samples.shape}")
        v.setflags(write=False)
        object.__setattr__(self, "covectors", v)

    @property
    def N(self) -> int:
        return self.base.N


@dataclass(frozen=True)
class PendulumPotentialSpec:
    """V(t, u) = −amplitude · cos 2π(u − kt − q0), on S¹ only"""
    k: int
    q0: float = 0.0
    amplitude: float = 1.0

    def __post_init__(self):
        if int(self.k) != self.k:
            raise DomainError(f"k must be an integer, got {self.k}")
        if not 0.0 <= self.q0 < 1.0:
            raise DomainError(f"q0 must lie in [0, 1), got {self.q0}")
        if self.amplitude != 1.0:
            raise DomainError("the pendulum potential has amplitude 1")

    def phase(self, t, u):
        return TWO_PI * (np.asarray(u) - self.k * np.asarray(t) - self.q0)

    def value(self, t, u):
        return -self.amplitude * np.cos(self.phase(t, u))

    def du(self, t, u):
        """∂V/∂u"""
        return self.amplitude * TWO_PI * np.sin(self.phase(t, u))

    def duu(self, t, u):
        return self.amplitude * TWO_PI ** 2 * np.cos(self.phase(t, u))

    def gradient(self, t, u):
        """∇V = g^{-1} ∂V/∂u = (1/2π) sin 2π(u − kt − q0)"""
        return self.du(t, u) / METRIC_SCALE


# === HAMILTONIANS ===

class FreeHamiltonian:
    """H(u, v) = ½|v|²_g = ½ Σ v_j² / metric_scale, (2π)² on the flat torus"""

    autonomous = True

    def __init__(self, metric_scale: float = METRIC_SCALE):
        if metric_scale <= 0:
            raise DomainError(f"metric scale must be positive, got {metric_scale}")
        self.metric_scale = metric_scale

    def __call__(self, t, u, v):
        v = np.asarray(v, dtype=float)
        return 0.5 * np.sum(v ** 2, axis=-1) / self.metric_scale

    def gradient(self, t, u, v):
        """(∂H/∂u, ∂H/∂v)"""
        v = np.asarray(v, dtype=float)
        return np.zeros_like(v), v / self.metric_scale


class PendulumHamiltonian:
    """H(t, u, v) = ½(v/2π)² − cos 2π(u − kt − u0) on T*S¹"""

    autonomous = False
    metric_scale = METRIC_SCALE

    def __init__(self, k: int, u0: float = 0.0):
        self.potential = PendulumPotentialSpec(k, u0)

    def __call__(self, t, u, v):
        u = np.asarray(u, dtype=float)
        v = np.asarray(v, dtype=float)
        kinetic = 0.5 * np.sum(v ** 2, axis=-1) / self.metric_scale
        return kinetic + self.potential.value(t, u[..., 0])

    def gradient(self, t, u, v):
        u = np.asarray(u, dtype=float)
        v = np.asarray(v, dtype=float)
        du = self.potential.du(t, u)
        return du, v / self.metric_scale


# === LOOP BUILDERS ===

def geodesic_loop(k: Union[LatticeVector, Sequence[int], int], q=0.0, N: int = 256) -> LoopSample:
    """Samples of γ_{k,q}(t) = kt + q"""
    k = _as_lattice(k)
    q = np.broadcast_to(np.asarray(q, dtype=float), (k.dim,))
    t = np.arange(N) / N
    samples = np.outer(t, k.as_array()) + q
    return LoopSample(FlatTorus(k.dim), samples, k)


def critical_phase_loop(u0, k, N: int = 256) -> PhaseLoopSample:
    """Samples of x_{u0,k}(t) = (kt + u0, (2π)² k)"""
    base = geodesic_loop(k, u0, N)
    v = np.tile(METRIC_SCALE * base.winding.as_array(), (N, 1))
    return PhaseLoopSample(base, v)


def rotate(loop: LoopSample, shift: int) -> LoopSample:
    """Time shift by shift/N: new u_j = old u_{j+shift}, lifted consistently"""
    idx = np.arange(loop.N) + shift
    wraps = np.floor_divide(idx, loop.N)
    samples = loop.samples[idx % loop.N] + np.outer(wraps, loop.winding.as_array())
    return LoopSample(loop.torus, samples, loop.winding)


def rotate_phase(z: PhaseLoopSample, shift: int) -> PhaseLoopSample:
    idx = (np.arange(z.N) + shift) % z.N
    return PhaseLoopSample(rotate(z.base, shift), z.covectors[idx])


# === DERIVATIVES ===

def velocity(loop: LoopSample, method: str = "spectral") -> np.ndarray:
    """u̇ at the sample points, shape (N, n)"""
    k = loop.winding.as_array()
    p = loop.periodic_part()
    if method == "centered":
        dp = (np.roll(p, -1, axis=0) - np.roll(p, 1, axis=0)) / (2.0 * loop.h)
    elif method == "spectral":
        dp = _spectral_derivative(p)
    else:
        raise DomainError(f"unknown derivative method {method!r}, use one of {DERIVATIVES}")
    return dp + k


def second_difference(loop: LoopSample) -> np.ndarray:
    """Centered (u_{j+1} − 2u_j + u_{j−1}) / h²; the winding cancels"""
    p = loop.periodic_part()
    return (np.roll(p, -1, axis=0) - 2.0 * p + np.roll(p, 1, axis=0)) / loop.h ** 2


def _spectral_derivative(p: np.ndarray) -> np.ndarray:
    N = p.shape[0]
    kappa = TWO_PI * np.fft.fftfreq(N, d=1.0 / N)
    if N % 2 == 0:
        kappa[N // 2] = 0.0
    return np.real(np.fft.ifft(1j * kappa[:, None] * np.fft.fft(p, axis=0), axis=0))


# === OPERATIONS ===

def winding_vector(loop: LoopSample) -> LatticeVector:
    """
    Winding read off the torus positions alone.

    Sums the shortest increments between consecutive points of u mod 1
    around the closed loop; the total must be an integer vector and must
    agree with the stored winding.
    """
    theta = np.mod(loop.samples, 1.0)
    closed = np.vstack([theta, theta[:1]])
    steps = np.diff(closed, axis=0)
    steps -= np.round(steps)
    k = _integer_gap(steps.sum(axis=0))
    if k != loop.winding:
        raise MalformedLiftError(f"lift winding {loop.winding} disagrees with increments {k}")
    return k


def energy(loop: LoopSample, derivative: str = "spectral") -> float:
    """I(γ) = ½ ∫ g(γ̇, γ̇) dt"""
    v = velocity(loop, derivative)
    return float(0.5 * loop.torus.metric_scale * np.mean(np.sum(v ** 2, axis=1)))


def perturbed_energy(loop: LoopSample, pot: PendulumPotentialSpec,
                     derivative: str = "spectral") -> float:
    """I_V(γ) = ∫ ½|γ̇|² − V(t, γ) dt, n = 1"""
    _require_circle(loop.torus.dim)
    v = velocity(loop, derivative)[:, 0]
    kinetic = 0.5 * loop.torus.metric_scale * v ** 2
    return float(np.mean(kinetic - pot.value(loop.times, loop.samples[:, 0])))


def symplectic_action(z: PhaseLoopSample, hamiltonian: Callable,
                      derivative: str = "spectral") -> float:
    """A_H(z) = ∫ v_j du^j − ∫ H(t, z(t)) dt"""
    u_dot = velocity(z.base, derivative)
    liouville = np.mean(np.sum(z.covectors * u_dot, axis=1))
    H = hamiltonian_along(hamiltonian, z.base.times, z.base.samples, z.covectors)
    return float(liouville - np.mean(H))


def hamiltonian_along(hamiltonian: Callable, times, u, v) -> np.ndarray:
    """
    H(t_j, u_j, v_j) for every sample, one point per call.

    H is a pointwise callable H(t, u, v) with u, v of shape (n,) and a
    scalar result, the same contract hamiltonian_vector_field uses.
    """
    u = np.asarray(u, dtype=float).reshape(len(times), -1)
    v = np.asarray(v, dtype=float).reshape(len(times), -1)
    values = np.empty(len(times))
    for j, t in enumerate(times):
        value = np.asarray(hamiltonian(float(t), u[j], v[j]), dtype=float)
        if value.size != 1:
            raise DomainError(f"H(t, u, v) must be a scalar, got shape {value.shape} at sample {j}")
        values[j] = value.item()
    return values


def h1_distance(a: LoopSample, b: LoopSample, derivative: str = "spectral") -> float:
    """
    H^{1,2} distance of the loops embedded in C^n by u ↦ e^{2πiu}:

        ‖γ − γ̃‖² = 2∫(n − Σ cos 2π(γ^j − γ̃^j))
                   + (2π)² ∫ Σ (γ̇^j² + γ̃̇^j² − 2 γ̇^j γ̃̇^j cos 2π(γ^j − γ̃^j))
    """
    if a.N != b.N:
        raise SampleCountMismatchError(f"sample counts differ: {a.N} vs {b.N}")
    if a.torus != b.torus:
        raise DomainError("loops live on different tori")
    c = np.cos(TWO_PI * (a.samples - b.samples))
    da = velocity(a, derivative)
    db = velocity(b, derivative)
    zeroth = 2.0 * np.sum(1.0 - c, axis=1)
    first = a.torus.metric_scale * np.sum(da ** 2 + db ** 2 - 2.0 * da * db * c, axis=1)
    return float(np.sqrt(max(np.mean(zeroth + first), 0.0)))


def geodesic_energy(k) -> float:
    """Closed form 2π²|k|²"""
    return ENERGY_PER_WINDING * _as_lattice(k).norm_sq()


# === EXCHANGE FORMAT ===

def loop_to_json(loop: LoopSample) -> str:
    return json.dumps({
        "dim": loop.torus.dim,
        "N": loop.N,
        "winding": list(loop.winding.entries),
        "samples": [[float(x) for x in row] for row in loop.samples],
    })


def loop_from_json(text: str) -> LoopSample:
    data = json.loads(text)
    samples = np.asarray(data["samples"], dtype=float).reshape(-1, data["dim"])
    if samples.shape[0] != data["N"]:
        raise SampleCountMismatchError(f"N = {data['N']} but {samples.shape[0]} samples given")
    return LoopSample(FlatTorus(data["dim"]), samples, LatticeVector(tuple(data["winding"])))


# === HELPERS ===

def _integer_gap(gap: np.ndarray) -> LatticeVector:
    gap = np.atleast_1d(gap)
    rounded = np.round(gap)
    if np.any(np.abs(gap - rounded) > LIFT_TOL):
        raise MalformedLiftError(f"u(1) − u(0) = {gap} is not an integer vector")
    return LatticeVector(tuple(int(r) for r in rounded))


def _as_lattice(k) -> LatticeVector:
    if isinstance(k, LatticeVector):
        return k
    return LatticeVector(tuple(np.atleast_1d(k)))


def _require_circle(dim: int):
    if dim != 1:
        raise UnsupportedDimensionError(f"defined on S¹ only (n = 1), got n = {dim}")


if __name__ == "__main__":
    print("=== TORUS CORE ===\n")
    for k in ([0], [1], [1, 0], [1, 1], [2, -1, 0]):
        loop = geodesic_loop(k, 0.1, 64)
        print(f"k = {str(k):12s}  energy = {energy(loop):.12g}  "
              f"2π²|k|² = {geodesic_energy(k):.12g}")
