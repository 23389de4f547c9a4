#!/usr/bin/env python3
"""
symplectic_index.py: Symplectic paths, crossings, Conley–Zehnder indices

Conventions
- Coordinates (u, v) ∈ R^n × R^n, J₀ = [[0, −I], [I, 0]], ω₀(x, y) = (J₀x)ᵀy.
- Crossing form at Ψ(t)ξ = ξ: Q(ξ) = ω₀(ξ, Ψ̇(t)ξ), times CROSSING_ORIENTATION.
- Index = ½ sig(Q at t=0) + Σ interior sig(Q) + ½ sig(Q at t=1), stored as
  an integer numerator over 2.

With these signs the rotation R(t) = exp(−2πt J₀) crosses the identity with
signature −2, and exp(−tJS) with small S has index ν⁻(S) − n.
"""

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, List, Optional, Sequence, Tuple

import numpy as np
from scipy.interpolate import CubicSpline
from scipy.linalg import expm
from scipy.optimize import brentq, minimize_scalar

from constants import (
    ALGEBRAIC_TOL, CROSSING_ORIENTATION, CROSSING_XTOL, DEFAULT_CROSSING_GRID,
    FOUR_PI_SQ, GRADIENT_STEP, KERNEL_REL_TOL, METRIC_SCALE, ROTATION_ANGLE, SHEAR_TILT,
    SYMPLECTIC_TOL, TWO_PI,
)
from errors import DomainError, NonRegularPathError

METHODS = ("crossing-sum", "homotopy-decomposition", "sz-formula")


# === LINEAR ALGEBRA ===

def standard_j(n: int) -> np.ndarray:
    """J₀ on R^{2n}"""
    I = np.eye(n)
    Z = np.zeros((n, n))
    return np.block([[Z, -I], [I, Z]])


def omega0(x, y) -> float:
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    return float((standard_j(len(x) // 2) @ x) @ y)


def _half_dim(M: np.ndarray) -> int:
    M = np.asarray(M)
    if M.ndim != 2 or M.shape[0] != M.shape[1] or M.shape[0] % 2:
        raise DomainError(f"need a square matrix of even size, got shape {M.shape}")
    return M.shape[0] // 2


def is_symplectic(M, tol: float = SYMPLECTIC_TOL) -> bool:
    """‖MᵀJ₀M − J₀‖_max ≤ tol"""
    M = np.asarray(M, dtype=float)
    J = standard_j(_half_dim(M))
    return bool(np.max(np.abs(M.T @ J @ M - J)) <= tol)


def in_maslov_cycle(M, tol: float = KERNEL_REL_TOL) -> bool:
    """1 ∈ spec(M), decided by the smallest singular value of M − I"""
    M = np.asarray(M, dtype=float)
    return _sigma_min(M) <= _threshold(M, tol)


def _sigma_min(M: np.ndarray) -> float:
    return float(np.linalg.svd(M - np.eye(len(M)), compute_uv=False)[-1])


def _threshold(M: np.ndarray, tol: float) -> float:
    return tol * max(1.0, float(np.linalg.norm(M - np.eye(len(M)), 2)))


@dataclass(frozen=True)
class SymplecticMatrix:
    entries: np.ndarray

    def __post_init__(self):
        M = np.array(self.entries, dtype=float)
        if not is_symplectic(M):
            raise DomainError("matrix is not symplectic")
        M.setflags(write=False)
        object.__setattr__(self, "entries", M)

    @property
    def dim(self) -> int:
        return self.entries.shape[0]


# === HAMILTONIAN LINEARIZATION ===

def hamiltonian_vector_field(H, point, t: float = 0.0,
                             metric_scale: float = METRIC_SCALE) -> Tuple[np.ndarray, np.ndarray]:
    """
    X_H at (u, v): the (r, s) solving dH = Ω(X_H, ·) for Ω = du ∧ dv,
    i.e. r = ∂H/∂v, s = −∂H/∂u.

    H is pointwise, H(t, u, v) -> scalar. Uses H.gradient when the
    Hamiltonian carries one, central differences with step GRADIENT_STEP
    otherwise. A Hamiltonian that states its own metric_scale must agree
    with the one asked for.
    """
    own = getattr(H, "metric_scale", metric_scale)
    if own != metric_scale:
        raise DomainError(f"H is built for metric scale {own}, field asked on {metric_scale}")
    u, v = (np.atleast_1d(np.asarray(p, dtype=float)) for p in point)
    if hasattr(H, "gradient"):
        du, dv = H.gradient(t, u, v)
    else:
        du = _central_gradient(lambda x: H(t, x, v), u)
        dv = _central_gradient(lambda x: H(t, u, x), v)
    du = np.atleast_1d(np.asarray(du, dtype=float))
    dv = np.atleast_1d(np.asarray(dv, dtype=float))
    if not (np.all(np.isfinite(du)) and np.all(np.isfinite(dv))):
        raise DomainError(f"gradient of H is not finite at u={u}, v={v}, t={t}")
    return dv, -du


def _central_gradient(f: Callable, x: np.ndarray) -> np.ndarray:
    grad = np.empty_like(x)
    for j in range(len(x)):
        e = np.zeros_like(x)
        e[j] = GRADIENT_STEP
        grad[j] = (float(f(x + e)) - float(f(x - e))) / (2.0 * GRADIENT_STEP)
    return grad


# === PATHS ===

@dataclass(frozen=True)
class SymplecticPathSpec:
    """
    t ↦ Ψ(t) ∈ Sp(2n) on [0, 1] with its derivative.

    Built through the constructors below; evaluate with at(t) and
    derivative(t).
    """
    kind: str
    n: int
    evaluate: Callable = field(repr=False)
    differentiate: Callable = field(repr=False)
    data: dict = field(default_factory=dict, repr=False, compare=False)

    def at(self, t: float) -> np.ndarray:
        return self.evaluate(float(t))

    def derivative(self, t: float) -> np.ndarray:
        return self.differentiate(float(t))


def _shear_matrix(n: int, t: float) -> np.ndarray:
    I = np.eye(n)
    Z = np.zeros((n, n))
    return np.block([[I, (t / FOUR_PI_SQ) * I], [Z, I]])


def _shear_rate(n: int) -> np.ndarray:
    Z = np.zeros((n, n))
    return np.block([[Z, np.eye(n) / FOUR_PI_SQ], [Z, Z]])


def shear_path(n: int = 1) -> SymplecticPathSpec:
    """A(t) = [[I, t/(2π)² I], [0, I]], the linearized geodesic flow"""
    _check_n(n)
    rate = _shear_rate(n)
    return SymplecticPathSpec("shear", n, lambda t: _shear_matrix(n, t), lambda t: rate)


def rotation_path(n: int = 1, angle: float = TWO_PI) -> SymplecticPathSpec:
    """R(t) = exp(−angle·t·J₀) = cos(angle·t) I − sin(angle·t) J₀"""
    _check_n(n)
    J = standard_j(n)
    I = np.eye(2 * n)
    return SymplecticPathSpec(
        "rotation", n,
        lambda t: np.cos(angle * t) * I - np.sin(angle * t) * J,
        lambda t: -angle * (np.sin(angle * t) * I + np.cos(angle * t) * J),
        {"angle": angle},
    )


def exponential_path(S, J=None) -> SymplecticPathSpec:
    """
    Φ(t) = exp(−tJS), derivative −JS·Φ(t).

    J defaults to J₀; −JS must be Hamiltonian (J₀·JS symmetric) so that the
    path stays in Sp(2n).
    """
    S = np.asarray(S, dtype=float)
    n = _half_dim(S)
    if np.max(np.abs(S - S.T)) > ALGEBRAIC_TOL:
        raise DomainError("generator S must be symmetric")
    J = standard_j(n) if J is None else np.asarray(J, dtype=float)
    X = -J @ S
    J0 = standard_j(n)
    if np.max(np.abs(X.T @ J0 + J0 @ X)) > ALGEBRAIC_TOL * max(1.0, np.max(np.abs(X))):
        raise DomainError("−JS is not Hamiltonian, exp(−tJS) would leave Sp(2n)")
    return SymplecticPathSpec(
        "exponential", n,
        lambda t: expm(t * X),
        lambda t: X @ expm(t * X),
        {"S": S, "J": J},
    )


def sampled_path(matrices: Sequence, grid: Sequence[float]) -> SymplecticPathSpec:
    """Cubic-spline interpolation of symplectic samples on an increasing grid over [0, 1]"""
    Ms = np.asarray(matrices, dtype=float)
    grid = np.asarray(grid, dtype=float)
    if Ms.ndim != 3 or len(Ms) != len(grid) or len(grid) < 2:
        raise DomainError("need one 2n×2n matrix per grid point, at least two")
    if grid[0] != 0.0 or grid[-1] != 1.0 or np.any(np.diff(grid) <= 0):
        raise DomainError("grid must increase from 0 to 1")
    for j, M in enumerate(Ms):
        if not is_symplectic(M):
            raise DomainError(f"sample {j} is not symplectic")
    spline = CubicSpline(grid, Ms, axis=0)
    rate = spline.derivative()
    return SymplecticPathSpec("sampled", _half_dim(Ms[0]), spline, rate, {"grid": grid})


def tilted_shear(n: int = 1, tilt: float = SHEAR_TILT) -> SymplecticPathSpec:
    """
    ã(t) = A(t)·exp(ε sin(πt) J₀): the shear pushed off the Maslov cycle.

    Crossings stay at t = 0 and t = 1 as long as ε < 1/(4π³).
    """
    _check_n(n)
    if not 0.0 < tilt < 1.0 / (FOUR_PI_SQ * np.pi):
        raise DomainError(f"tilt must lie in (0, 1/(4π³)), got {tilt}")
    J = standard_j(n)
    I = np.eye(2 * n)
    rate = _shear_rate(n)

    def twist(t):
        phi = tilt * np.sin(np.pi * t)
        return np.cos(phi) * I + np.sin(phi) * J

    def evaluate(t):
        return _shear_matrix(n, t) @ twist(t)

    def differentiate(t):
        E = twist(t)
        dphi = tilt * np.pi * np.cos(np.pi * t)
        return rate @ E + _shear_matrix(n, t) @ (dphi * J @ E)

    return SymplecticPathSpec("tilted", n, evaluate, differentiate, {"tilt": tilt})


def connector_path(n: int = 1, angle: float = ROTATION_ANGLE) -> SymplecticPathSpec:
    """
    B(s) = exp(−angle·(1−s)·J₀)·A(s): from the end of the rotation leg to A(1).

    trace B(s) < 2 for s < 1 in Sp(2), so B meets the Maslov cycle only at s = 1.
    """
    _check_n(n)
    J = standard_j(n)
    rate = _shear_rate(n)

    def rotation(s):
        return expm(-angle * (1.0 - s) * J)

    return SymplecticPathSpec(
        "connector", n,
        lambda s: rotation(s) @ _shear_matrix(n, s),
        lambda s: angle * J @ rotation(s) @ _shear_matrix(n, s) + rotation(s) @ rate,
        {"angle": angle},
    )


def concatenate(first: SymplecticPathSpec, second: SymplecticPathSpec) -> SymplecticPathSpec:
    """first on [0, ½], second on [½, 1], both at double speed"""
    if first.n != second.n:
        raise DomainError("paths live in different dimensions")
    if np.max(np.abs(first.at(1.0) - second.at(0.0))) > ALGEBRAIC_TOL:
        raise DomainError("paths do not join: first(1) ≠ second(0)")

    def evaluate(t):
        return first.at(2.0 * t) if t <= 0.5 else second.at(2.0 * t - 1.0)

    def differentiate(t):
        return 2.0 * (first.derivative(2.0 * t) if t <= 0.5 else second.derivative(2.0 * t - 1.0))

    return SymplecticPathSpec("concat", first.n, evaluate, differentiate,
                              {"parts": (first.kind, second.kind)})


def reparametrize(path: SymplecticPathSpec, phi: Callable, dphi: Callable) -> SymplecticPathSpec:
    """Ψ∘φ for φ: [0,1] → [0,1] increasing with φ(0)=0, φ(1)=1"""
    if abs(phi(0.0)) > ALGEBRAIC_TOL or abs(phi(1.0) - 1.0) > ALGEBRAIC_TOL:
        raise DomainError("reparametrization must fix both endpoints")
    return SymplecticPathSpec(
        path.kind, path.n,
        lambda t: path.at(phi(t)),
        lambda t: path.derivative(phi(t)) * dphi(t),
        dict(path.data, reparametrized=True),
    )


def perturbed_generator(sign: str) -> Tuple[np.ndarray, np.ndarray]:
    """(S^∓, J) of ξ̇ = −JS^∓ξ: S^∓ = diag(±1, 1), J = [[0, −1/4π²], [4π², 0]]"""
    if sign not in ("-", "+"):
        raise DomainError(f"sign must be '-' or '+', got {sign!r}")
    S = np.diag([1.0 if sign == "-" else -1.0, 1.0])
    J = np.array([[0.0, -1.0 / FOUR_PI_SQ], [FOUR_PI_SQ, 0.0]])
    return S, J


def linearized_flow(kind: str, n: int = 1, sign: Optional[str] = None) -> SymplecticPathSpec:
    """
    free      -> shear A(t) (independent of u0 and k)
    perturbed -> Φ^∓(t) = exp(−tJS^∓), n = 1
    """
    if kind == "free":
        return shear_path(n)
    if kind == "perturbed":
        if n != 1:
            raise DomainError("the perturbed flow lives on T*S¹")
        S, J = perturbed_generator(sign)
        return exponential_path(S, J)
    raise DomainError(f"unknown linearized flow {kind!r}")


# === CROSSINGS ===

@dataclass
class Crossing:
    t: float
    kernel_basis: np.ndarray
    form_signature: int = 0
    regular: bool = False
    boundary: bool = False
    span: Optional[Tuple[float, float]] = None   # identically singular stretch

    @property
    def kernel_dim(self) -> int:
        return self.kernel_basis.shape[1]


@dataclass
class IndexResult:
    numerator: int
    method: str
    crossings: List[Crossing] = field(default_factory=list)

    def __post_init__(self):
        if self.method not in METHODS:
            raise DomainError(f"method must be one of {METHODS}")

    @property
    def denominator(self) -> int:
        return 2

    @property
    def value(self) -> Fraction:
        return Fraction(self.numerator, 2)


def _kernel(M: np.ndarray, tol: float) -> np.ndarray:
    """Orthonormal basis (columns) of ker(M − I)"""
    A = M - np.eye(len(M))
    _, s, Vt = np.linalg.svd(A)
    return Vt[s <= _threshold(M, tol)].T


def crossing_form(path: SymplecticPathSpec, crossing: Crossing,
                  tol: float = KERNEL_REL_TOL) -> Tuple[int, bool]:
    """
    Signature of Q(ξ) = ω₀(ξ, Ψ̇ξ) on ker(Ψ(t) − I), and whether Q is
    nondegenerate there. Spans are never regular.
    """
    K = crossing.kernel_basis
    if crossing.span is not None or K.shape[1] == 0:
        return 0, False
    J = standard_j(path.n)
    Q = K.T @ J.T @ path.derivative(crossing.t) @ K
    Q = CROSSING_ORIENTATION * 0.5 * (Q + Q.T)
    eig = np.linalg.eigvalsh(Q)
    scale = max(1.0, float(np.linalg.norm(path.derivative(crossing.t), 2)))
    regular = bool(np.all(np.abs(eig) > tol * scale))
    signature = int(np.sum(eig > tol * scale) - np.sum(eig < -tol * scale))
    return signature, regular


def detect_crossings(path: SymplecticPathSpec, grid: int = DEFAULT_CROSSING_GRID,
                     tol: float = KERNEL_REL_TOL) -> List[Crossing]:
    """
    Parameters where 1 ∈ spec Ψ(t).

    The path is sampled on grid+1 points. Runs of singular samples longer
    than two points are reported as spans [t_start, t_end]. Isolated zeros
    come from singular samples, sign changes of det(Ψ − I) refined by
    brentq, and local minima of σ_min(Ψ − I) refined by bounded
    minimisation; each is located to CROSSING_XTOL.
    """
    ts = np.linspace(0.0, 1.0, grid + 1)
    Ms = [path.at(t) for t in ts]
    I = np.eye(2 * path.n)
    smin = np.array([_sigma_min(M) for M in Ms])
    singular = np.array([smin[i] <= _threshold(M, tol) for i, M in enumerate(Ms)])
    det = np.array([np.linalg.det(M - I) for M in Ms])

    def sigma(t):
        return _sigma_min(path.at(t))

    def refine_minimum(lo, hi):
        result = minimize_scalar(sigma, bounds=(lo, hi), method="bounded",
                                 options={"xatol": CROSSING_XTOL})
        return float(result.x)

    found: List[Crossing] = []
    candidates: List[float] = []

    # runs of singular samples
    i = 0
    while i <= grid:
        if not singular[i]:
            i += 1
            continue
        j = i
        while j + 1 <= grid and singular[j + 1]:
            j += 1
        if j - i >= 2:
            mid = 0.5 * (ts[i] + ts[j])
            found.append(Crossing(mid, _kernel(path.at(mid), tol), span=(float(ts[i]), float(ts[j]))))
        elif i == 0:
            candidates.append(0.0)
        elif j == grid:
            candidates.append(1.0)
        else:
            candidates.append(refine_minimum(ts[max(i - 1, 0)], ts[min(j + 1, grid)]))
        i = j + 1

    # sign changes of det between regular samples
    for i in range(grid):
        if singular[i] or singular[i + 1]:
            continue
        if det[i] * det[i + 1] < 0:
            candidates.append(brentq(lambda t: np.linalg.det(path.at(t) - I),
                                     ts[i], ts[i + 1], xtol=CROSSING_XTOL))

    # touching zeros: interior local minima of σ_min
    for i in range(1, grid):
        if singular[i - 1] or singular[i] or singular[i + 1]:
            continue
        if smin[i] < smin[i - 1] and smin[i] < smin[i + 1]:
            t = refine_minimum(ts[i - 1], ts[i + 1])
            M = path.at(t)
            if _sigma_min(M) <= _threshold(M, tol):
                candidates.append(t)

    for t in sorted(candidates):
        if any(abs(t - c.t) < 1e-9 for c in found if c.span is None):
            continue
        M = path.at(t)
        K = _kernel(M, tol)
        if K.shape[1] == 0:
            continue
        crossing = Crossing(float(t), K, boundary=(t == 0.0 or t == 1.0))
        crossing.form_signature, crossing.regular = crossing_form(path, crossing, tol)
        found.append(crossing)

    return sorted(found, key=lambda c: c.t)


# === INDICES ===

def rs_index(path: SymplecticPathSpec, grid: int = DEFAULT_CROSSING_GRID,
             tol: float = KERNEL_REL_TOL) -> IndexResult:
    """Crossing sum with half weights at the endpoints"""
    crossings = detect_crossings(path, grid, tol)
    bad = [c for c in crossings if c.span is not None or not c.regular]
    if bad:
        where = ", ".join(f"[{c.span[0]:.6g}, {c.span[1]:.6g}]" if c.span else f"t={c.t:.6g}"
                          for c in bad)
        raise NonRegularPathError(f"non-regular crossings on {path.kind} path at {where}", crossings)
    numerator = sum(c.form_signature if c.boundary else 2 * c.form_signature for c in crossings)
    return IndexResult(numerator, "crossing-sum", crossings)


def generalized_cz_shear(n: int, grid: int = DEFAULT_CROSSING_GRID,
                         tol: float = KERNEL_REL_TOL) -> IndexResult:
    """
    μ_CZ^g of the shear A(t) = −n/2.

    The 2×2 block is replaced by the rotation leg exp(−θtJ₀) followed by the
    connector B, which share the endpoints of a(t) and avoid the Maslov
    cycle in between: ½(−2) from the identity, ½(+1) at a(1). The product
    property multiplies the block value by n. A(t) involves neither u₀ nor
    k, so the value is common to all of Crit A.
    """
    _check_n(n)
    block = concatenate(rotation_path(1, ROTATION_ANGLE), connector_path(1, ROTATION_ANGLE))
    one = rs_index(block, grid, tol)
    return IndexResult(n * one.numerator, "homotopy-decomposition", one.crossings)


def cz_from_quadratic(S, tol: float = ALGEBRAIC_TOL) -> int:
    """
    μ_CZ(exp(−tJS)) = ν⁻(S) − n for symmetric nondegenerate S with ‖S‖ < 2π,
    ν⁻ the number of negative eigenvalues. Eigenvalues within tol of 0
    count as degenerate.
    """
    S = np.asarray(S, dtype=float)
    n = _half_dim(S)
    if np.max(np.abs(S - S.T)) > tol:
        raise DomainError("S must be symmetric")
    norm = float(np.linalg.norm(S, 2))
    if norm >= TWO_PI:
        raise DomainError(f"‖S‖ = {norm:.6g} ≥ 2π, outside the domain of the formula")
    eig = np.linalg.eigvalsh(S)
    if np.any(np.abs(eig) <= tol):
        raise DomainError("S is degenerate, exp(−JS) has eigenvalue 1")
    return int(np.sum(eig < 0)) - n


def grading_shift(mu_g, crit_dim: int) -> Fraction:
    """μ + ½ dim Crit"""
    return Fraction(mu_g) + Fraction(crit_dim, 2)


def index_report(path_kind: str, n: int, result: IndexResult) -> dict:
    return {
        "path_kind": path_kind,
        "n": n,
        "method": result.method,
        "crossings": [{
            "t": c.t,
            "kernel_dim": c.kernel_dim,
            "signature": c.form_signature,
            "boundary": c.boundary,
        } for c in result.crossings],
        "value_num": result.numerator,
        "value_den": result.denominator,
    }


def _check_n(n: int):
    if int(n) != n or n < 1:
        raise DomainError(f"n must be a positive integer, got {n}")


if __name__ == "__main__":
    print("=== CONLEY–ZEHNDER ===\n")
    for n in (1, 2, 3):
        print(f"shear n={n}: {generalized_cz_shear(n).value}")
    print(f"tilted shear: {rs_index(tilted_shear()).value}")
    for sign in ("-", "+"):
        print(f"Φ{sign}: {rs_index(linearized_flow('perturbed', 1, sign)).value}")
