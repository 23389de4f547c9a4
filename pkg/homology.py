#!/usr/bin/env python3
"""
homology.py: Chain complexes over Z and Z/2, Smith normal form, the tables

Matrices are numpy arrays of dtype=object holding Python ints, so every
elimination step is exact. ∂_i maps degree i to degree i − 1 and has shape
(rank(i−1), rank(i)).

Complexes built here:
- torus_cw_complex(n): minimal product CW structure of T^n
- morse_bott_complex: one torus per critical component below the action level
- morse_witten_complex_perturbed: γ⁺ in degree 0, γ⁻ in degree 1, over Z/2
"""

import itertools
from dataclasses import dataclass, field
from math import comb, isqrt
from typing import Dict, List, Optional, Sequence, Tuple, Union

import numpy as np

from constants import ENERGY_PER_WINDING
from errors import DomainError, InvalidComplexError, MissingOrbitCountError
from geodesics import enumerate_components
from reports import to_csv
from torus_core import FlatTorus, LatticeVector

GRADINGS = ("homological", "cohomological-negative")


def int_matrix(rows, shape: Optional[Tuple[int, int]] = None) -> np.ndarray:
    """Exact integer matrix (dtype=object, Python ints)"""
    if shape is not None and (shape[0] == 0 or shape[1] == 0):
        return np.zeros(shape, dtype=object)
    M = np.array(rows, dtype=object)
    if M.ndim != 2:
        raise InvalidComplexError(f"boundary matrices must be 2-D, got shape {M.shape}")
    return np.vectorize(int, otypes=[object])(M) if M.size else M


# === SMITH NORMAL FORM ===

class SmithNormalForm:
    """
    Smith normal form by repeated Euclidean pivoting.

    U·M·V = D with U, V unimodular and d_1 | d_2 | … on the diagonal.
    Row operations accumulate in U, column operations in V.
    """

    def __init__(self, M):
        M = int_matrix(M) if not isinstance(M, np.ndarray) or M.dtype != object else M.copy()
        self.D = M
        self.U = _identity(M.shape[0])
        self.V = _identity(M.shape[1])

    @property
    def num_rows(self):
        return self.D.shape[0]

    @property
    def num_cols(self):
        return self.D.shape[1]

    def compute(self):
        for s in range(min(self.D.shape)):
            if not self._settle(s):
                break
            if self.D[s, s] < 0:
                self._negate_row(s)
        return self.U, self.D, self.V

    def _settle(self, s) -> bool:
        """Bring a divisor of the remaining block to (s, s); False if the block is zero"""
        while True:
            row, col = self._smallest_nonzero(s)
            if row is None:
                return False
            self._swap_rows(s, row)
            self._swap_cols(s, col)
            pivot = self.D[s, s]

            for i in range(s + 1, self.num_rows):
                if self.D[i, s] != 0:
                    self._add_row(i, s, -(self.D[i, s] // pivot))
            for j in range(s + 1, self.num_cols):
                if self.D[s, j] != 0:
                    self._add_col(j, s, -(self.D[s, j] // pivot))

            if any(self.D[i, s] != 0 for i in range(s + 1, self.num_rows)) or \
                    any(self.D[s, j] != 0 for j in range(s + 1, self.num_cols)):
                continue

            # divisibility: pull an offending row into row s and start over
            offending = self._not_divisible(s)
            if offending is None:
                return True
            self._add_row(s, offending, 1)

    def _smallest_nonzero(self, s):
        best, where = None, (None, None)
        for i in range(s, self.num_rows):
            for j in range(s, self.num_cols):
                value = abs(self.D[i, j])
                if value != 0 and (best is None or value < best):
                    best, where = value, (i, j)
        return where

    def _not_divisible(self, s):
        pivot = self.D[s, s]
        for i in range(s + 1, self.num_rows):
            for j in range(s + 1, self.num_cols):
                if self.D[i, j] % pivot != 0:
                    return i
        return None

    def _swap_rows(self, a, b):
        if a != b:
            self.D[[a, b]] = self.D[[b, a]]
            self.U[[a, b]] = self.U[[b, a]]

    def _swap_cols(self, a, b):
        if a != b:
            self.D[:, [a, b]] = self.D[:, [b, a]]
            self.V[:, [a, b]] = self.V[:, [b, a]]

    def _add_row(self, target, source, factor):
        """row target += factor · row source"""
        self.D[target] = self.D[target] + factor * self.D[source]
        self.U[target] = self.U[target] + factor * self.U[source]

    def _add_col(self, target, source, factor):
        self.D[:, target] = self.D[:, target] + factor * self.D[:, source]
        self.V[:, target] = self.V[:, target] + factor * self.V[:, source]

    def _negate_row(self, s):
        self.D[s] = -self.D[s]
        self.U[s] = -self.U[s]


def smith_normal_form(M) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """(U, D, V) with U·M·V = D, exact"""
    return SmithNormalForm(M).compute()


def invariant_factors(M) -> List[int]:
    """Nonzero diagonal entries of the Smith form, ascending by divisibility"""
    _, D, _ = smith_normal_form(M)
    return [int(D[i, i]) for i in range(min(D.shape)) if D[i, i] != 0]


def integer_rank(M) -> int:
    return len(invariant_factors(M))


def rank_mod2(M) -> int:
    """Rank over Z/2 by Gaussian elimination"""
    A = (np.array(M, dtype=object) % 2).astype(np.uint8) if np.size(M) else np.zeros(np.shape(M), np.uint8)
    rows, cols = A.shape
    rank = 0
    for c in range(cols):
        pivots = np.nonzero(A[rank:, c])[0]
        if pivots.size == 0:
            continue
        p = rank + pivots[0]
        A[[rank, p]] = A[[p, rank]]
        for r in range(rows):
            if r != rank and A[r, c]:
                A[r] ^= A[rank]
        rank += 1
        if rank == rows:
            break
    return rank


# === TYPES ===

@dataclass
class IntegerChainComplex:
    """
    Graded free modules with boundaries ∂_i: C_i -> C_{i−1}.

    ranks maps each degree in [low, high] to rank C_i; boundaries maps i to
    the ∂_i matrix (missing entries are zero). modulus 0 means integer
    coefficients, 2 means Z/2.
    """
    ranks: Dict[int, int]
    boundaries: Dict[int, np.ndarray] = field(default_factory=dict)
    modulus: int = 0
    label: str = ""

    def __post_init__(self):
        if not self.ranks:
            raise InvalidComplexError("a complex needs at least one degree")
        degrees = sorted(self.ranks)
        if degrees != list(range(degrees[0], degrees[-1] + 1)):
            raise InvalidComplexError(f"degrees must be contiguous, got {degrees}")
        if any(r < 0 for r in self.ranks.values()):
            raise InvalidComplexError(f"ranks must be ≥ 0, got {self.ranks}")
        if self.modulus not in (0, 2):
            raise InvalidComplexError(f"coefficients are Z (0) or Z/2 (2), got {self.modulus}")
        for i, matrix in list(self.boundaries.items()):
            if i not in self.ranks or i - 1 not in self.ranks:
                raise InvalidComplexError(f"∂_{i} leaves the degree range {degrees[0]}..{degrees[-1]}")
            matrix = int_matrix(matrix, None if np.size(matrix) else np.shape(matrix))
            expected = (self.ranks[i - 1], self.ranks[i])
            if matrix.shape != expected:
                raise InvalidComplexError(f"∂_{i} has shape {matrix.shape}, expected {expected}")
            if self.modulus:
                matrix = matrix % self.modulus
            self.boundaries[i] = matrix

    @property
    def low(self) -> int:
        return min(self.ranks)

    @property
    def high(self) -> int:
        return max(self.ranks)

    @property
    def degrees(self) -> range:
        return range(self.low, self.high + 1)

    def rank(self, i: int) -> int:
        return self.ranks.get(i, 0)

    def boundary(self, i: int) -> np.ndarray:
        """∂_i, zero matrix of the right shape when absent"""
        if i in self.boundaries:
            return self.boundaries[i]
        return np.zeros((self.rank(i - 1), self.rank(i)), dtype=object)

    def check(self):
        """∂_{i−1}∂_i = 0 exactly (mod 2 for Z/2 complexes)"""
        for i in self.degrees:
            if i - 2 < self.low:
                continue
            product = self.boundary(i - 1).dot(self.boundary(i))
            if self.modulus:
                product = product % self.modulus
            if np.any(product != 0):
                raise InvalidComplexError(f"∂_{i - 1}∂_{i} ≠ 0 in {self.label or 'complex'}")
        return self


@dataclass(frozen=True)
class HomologyGroup:
    """Z^free ⊕ ⊕ Z/t, or (Z/2)^free when computed over Z/2"""
    free_rank: int = 0
    torsion: Tuple[int, ...] = ()

    def __post_init__(self):
        if self.free_rank < 0:
            raise DomainError(f"free rank must be ≥ 0, got {self.free_rank}")
        torsion = tuple(int(t) for t in self.torsion)
        if any(t < 2 for t in torsion):
            raise DomainError(f"torsion coefficients must be ≥ 2, got {torsion}")
        if any(b % a for a, b in zip(torsion, torsion[1:])):
            raise DomainError(f"torsion must form a divisibility chain, got {torsion}")
        object.__setattr__(self, "torsion", torsion)

    def is_zero(self) -> bool:
        return self.free_rank == 0 and not self.torsion

    def describe(self, ring: str = "Z") -> str:
        parts = []
        if self.free_rank:
            parts.append(ring if self.free_rank == 1 else f"{ring}^{self.free_rank}")
        parts += [f"Z/{t}" for t in self.torsion]
        return " ⊕ ".join(parts) or "0"


@dataclass
class HomologyTable:
    label: str
    entries: Dict[int, HomologyGroup]
    grading_convention: str = "homological"
    coefficients: str = "Z"

    def __post_init__(self):
        if self.grading_convention not in GRADINGS:
            raise DomainError(f"grading must be one of {GRADINGS}")

    def group(self, degree: int) -> HomologyGroup:
        """Entries outside the table are zero"""
        return self.entries.get(degree, HomologyGroup())

    def degrees(self) -> List[int]:
        return sorted(self.entries)

    def free_ranks(self) -> List[int]:
        return [self.entries[d].free_rank for d in self.degrees()]

    def to_dict(self) -> dict:
        return {
            "label": self.label,
            "grading": self.grading_convention,
            "coefficients": self.coefficients,
            "entries": [{"degree": d, "free_rank": self.entries[d].free_rank,
                         "torsion": list(self.entries[d].torsion)} for d in self.degrees()],
        }

    def to_csv(self) -> str:
        rows = [(d, self.entries[d].free_rank, list(self.entries[d].torsion)) for d in self.degrees()]
        return to_csv(["degree", "free_rank", "torsion"], rows)

    def describe(self) -> str:
        prefix = "HF" if self.grading_convention == "cohomological-negative" else "H"
        return ", ".join(f"{prefix}_{d} = {self.entries[d].describe(self.coefficients)}"
                         for d in self.degrees())


# === HOMOLOGY ENGINE ===

def homology_of_complex(c: IntegerChainComplex, label: str = "") -> HomologyTable:
    """
    H_i = ker ∂_i / im ∂_{i+1}.

    Over Z: free rank = rank C_i − rank ∂_i − rank ∂_{i+1}, torsion from
    the invariant factors > 1 of ∂_{i+1}. Z/2 complexes go through
    homology_mod2.
    """
    c.check()
    if c.modulus == 2:
        return homology_mod2(c, label)
    factors = {i: invariant_factors(c.boundary(i)) for i in range(c.low, c.high + 2)}
    entries = {}
    for i in c.degrees:
        free = c.rank(i) - len(factors[i]) - len(factors[i + 1])
        torsion = tuple(abs(d) for d in factors[i + 1] if abs(d) > 1)
        entries[i] = HomologyGroup(free, torsion)
    return HomologyTable(label or c.label, entries)


def reduce_mod2(c: IntegerChainComplex) -> IntegerChainComplex:
    return IntegerChainComplex(
        dict(c.ranks),
        {i: m % 2 for i, m in c.boundaries.items()},
        modulus=2,
        label=c.label,
    )


def homology_mod2(c: IntegerChainComplex, label: str = "") -> HomologyTable:
    """Dimensions over Z/2 of the reduced complex"""
    c = c if c.modulus == 2 else reduce_mod2(c)
    c.check()
    ranks = {i: rank_mod2(c.boundary(i)) for i in range(c.low, c.high + 2)}
    entries = {i: HomologyGroup(c.rank(i) - ranks[i] - ranks[i + 1]) for i in c.degrees}
    return HomologyTable(label or c.label, entries, coefficients="Z2")


def euler_characteristic(c: IntegerChainComplex) -> int:
    return sum((-1) ** i * c.rank(i) for i in c.degrees)


def regrade_negative(table: HomologyTable, label: str = "") -> HomologyTable:
    """Entry at degree i moves to −i (cochains graded by minus the index)"""
    return HomologyTable(
        label or table.label,
        {-i: group for i, group in table.entries.items()},
        grading_convention="cohomological-negative",
        coefficients=table.coefficients,
    )


# === CONSTRUCTIONS ===

def direct_sum(complexes: Sequence[IntegerChainComplex], label: str = "") -> IntegerChainComplex:
    """Block-diagonal sum; all summands share the degree range and coefficients"""
    if not complexes:
        raise InvalidComplexError("direct sum of nothing")
    first = complexes[0]
    if any(c.degrees != first.degrees or c.modulus != first.modulus for c in complexes):
        raise InvalidComplexError("summands must share degrees and coefficients")
    ranks = {i: sum(c.rank(i) for c in complexes) for i in first.degrees}
    boundaries = {}
    for i in first.degrees:
        if i - 1 < first.low:
            continue
        M = np.zeros((ranks[i - 1], ranks[i]), dtype=object)
        r0 = c0 = 0
        for c in complexes:
            block = c.boundary(i)
            M[r0:r0 + block.shape[0], c0:c0 + block.shape[1]] = block
            r0 += block.shape[0]
            c0 += block.shape[1]
        boundaries[i] = M
    return IntegerChainComplex(ranks, boundaries, first.modulus, label)


def tensor_product(a: IntegerChainComplex, b: IntegerChainComplex,
                   label: str = "") -> IntegerChainComplex:
    """
    (A ⊗ B)_m = ⊕_{p+q=m} A_p ⊗ B_q with ∂(x⊗y) = ∂x⊗y + (−1)^p x⊗∂y.

    Basis of degree m: blocks ordered by p ascending, Kronecker order inside.
    """
    if a.modulus != b.modulus:
        raise InvalidComplexError("factors must share coefficients")
    low, high = a.low + b.low, a.high + b.high
    blocks = {m: [(p, m - p) for p in a.degrees if b.low <= m - p <= b.high]
              for m in range(low, high + 1)}
    offsets, ranks = {}, {}
    for m, pairs in blocks.items():
        start = 0
        for p, q in pairs:
            offsets[(p, q)] = start
            start += a.rank(p) * b.rank(q)
        ranks[m] = start

    boundaries = {}
    for m in range(low + 1, high + 1):
        M = np.zeros((ranks[m - 1], ranks[m]), dtype=object)
        for p, q in blocks[m]:
            col = offsets[(p, q)]
            width = a.rank(p) * b.rank(q)
            if (p - 1, q) in offsets:
                row = offsets[(p - 1, q)]
                block = _kron(a.boundary(p), _identity(b.rank(q)))
                M[row:row + block.shape[0], col:col + width] += block
            if (p, q - 1) in offsets:
                row = offsets[(p, q - 1)]
                block = (-1) ** p * _kron(_identity(a.rank(p)), b.boundary(q))
                M[row:row + block.shape[0], col:col + width] += block
        boundaries[m] = M
    return IntegerChainComplex(ranks, boundaries, a.modulus, label)


def torus_cw_complex(n: int) -> IntegerChainComplex:
    """T^n with C(n, i) cells in degree i and zero boundaries"""
    if n < 1:
        raise DomainError(f"n must be ≥ 1, got {n}")
    return IntegerChainComplex({i: comb(n, i) for i in range(n + 1)}, label=f"T^{n}")


def morse_bott_complex(torus: FlatTorus, a: float) -> IntegerChainComplex:
    """One copy of the torus complex per component G^l below action a"""
    components = enumerate_components(torus, a)
    label = f"CM(n={torus.dim}, a={a:.12g})"
    if not components:
        return IntegerChainComplex({i: 0 for i in range(torus.dim + 1)}, label=label)
    cell = torus_cw_complex(torus.dim)
    return direct_sum([cell] * len(components), label=label)


def morse_bott_homology(torus: FlatTorus, a: float) -> HomologyTable:
    return homology_of_complex(morse_bott_complex(torus, a), f"HM(n={torus.dim}, a={a:.12g})")


def floer_bott_cohomology(torus: FlatTorus, a: float) -> HomologyTable:
    """Same chains as the Morse side, graded by minus the singular degree"""
    return regrade_negative(morse_bott_homology(torus, a), f"HF(n={torus.dim}, a={a:.12g})")


def sublevel_singular_homology(torus: FlatTorus, k: Union[LatticeVector, Sequence[int]]) -> HomologyTable:
    """
    H_*(Λ^{2π²|k|²+ε} T^n) = ⊕_{|l| ≤ |k|} H_*(T^n).

    Counts lattice points with the exact integer test |l|² ≤ |k|², then
    multiplies by the binomial ranks. No chain complex involved.
    """
    k = k if isinstance(k, LatticeVector) else LatticeVector(tuple(k))
    if k.dim != torus.dim:
        raise DomainError(f"k = {k} does not match n = {torus.dim}")
    bound = k.norm_sq()
    radius = isqrt(bound)
    box = range(-radius, radius + 1)
    count = sum(1 for l in itertools.product(box, repeat=torus.dim)
                if sum(x * x for x in l) <= bound)
    n = torus.dim
    return HomologyTable(
        f"H(sublevel n={n}, k={k})",
        {i: HomologyGroup(count * comb(n, i)) for i in range(n + 1)},
    )


def action_level(k: Union[LatticeVector, Sequence[int]]) -> float:
    """a = 2π²|k|², the action of the component G^k"""
    k = k if isinstance(k, LatticeVector) else LatticeVector(tuple(k))
    return ENERGY_PER_WINDING * k.norm_sq()


# === PERTURBED (APPENDIX) COMPLEXES ===

def morse_witten_complex_perturbed(k: int, orbit_count=None) -> IntegerChainComplex:
    """
    CM_0 = Z/2⟨γ⁺⟩, CM_1 = Z/2⟨γ⁻⟩, ∂γ⁻ = n₂(γ⁻, γ⁺) γ⁺.

    orbit_count is what flows.count_connecting_orbits returns, a
    (count, parity) pair, or a bare count.
    """
    if k == 0:
        raise DomainError("perturbation needs a nonconstant geodesic, got k = 0")
    if orbit_count is None:
        raise MissingOrbitCountError("the Morse–Witten boundary needs the connecting-orbit count")
    count = orbit_count[0] if isinstance(orbit_count, (tuple, list)) else int(orbit_count)
    return IntegerChainComplex({0: 1, 1: 1}, {1: [[count % 2]]}, modulus=2,
                               label=f"CM(perturbed k={k})")


def perturbed_floer_cohomology(k: int, orbit_count) -> HomologyTable:
    """Floer side of the perturbed component: x⁺ in degree 0, x⁻ in degree −1"""
    table = homology_of_complex(morse_witten_complex_perturbed(k, orbit_count))
    return regrade_negative(table, f"HF(perturbed k={k})")


def perturbed_product_homology(n: int, k: int, orbit_count) -> HomologyTable:
    """
    n-fold tensor power of the S¹ complex: 2^n generators on (S¹)^n,
    degree = number of γ⁻ factors.
    """
    if n < 1:
        raise DomainError(f"n must be ≥ 1, got {n}")
    factor = morse_witten_complex_perturbed(k, orbit_count)
    product = factor
    for _ in range(n - 1):
        product = tensor_product(product, factor)
    product.label = f"CM(perturbed n={n}, k={k})"
    return homology_of_complex(product)


# === HELPERS ===

def _identity(size: int) -> np.ndarray:
    M = np.zeros((size, size), dtype=object)
    for i in range(size):
        M[i, i] = 1
    return M


def _kron(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    out = np.multiply.outer(a, b).transpose(0, 2, 1, 3)
    return out.reshape(a.shape[0] * b.shape[0], a.shape[1] * b.shape[1])


if __name__ == "__main__":
    print("=== HOMOLOGY ===\n")
    klein = IntegerChainComplex({0: 1, 1: 2, 2: 1}, {2: [[0], [2]]}, label="Klein bottle")
    print(homology_of_complex(klein).describe())
    for n in (1, 2, 3):
        torus = FlatTorus(n)
        a = action_level([1] + [0] * (n - 1))
        print(morse_bott_homology(torus, a).describe())
        print(floer_bott_cohomology(torus, a).describe())
