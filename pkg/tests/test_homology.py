from math import comb, lcm

import numpy as np
import pytest
from sympy import Matrix, ZZ
from sympy.matrices.normalforms import smith_normal_form as sympy_smith_normal_form

from errors import DomainError, InvalidComplexError, MissingOrbitCountError
from homology import (
    HomologyGroup, IntegerChainComplex, action_level, direct_sum, euler_characteristic,
    floer_bott_cohomology, homology_mod2, homology_of_complex, int_matrix, integer_rank,
    invariant_factors, morse_bott_complex, morse_bott_homology, morse_witten_complex_perturbed,
    perturbed_floer_cohomology, perturbed_product_homology, rank_mod2, reduce_mod2,
    smith_normal_form, sublevel_singular_homology, tensor_product, torus_cw_complex,
)
from torus_core import FlatTorus, LatticeVector


# --- exact oracles ---

def _sym(M) -> Matrix:
    return Matrix([[int(x) for x in row] for row in np.asarray(M, dtype=object)])


def _sympy_factors(M) -> list:
    """Nonzero invariant factors from sympy's Smith form over ZZ"""
    A = _sym(M)
    if A.rank() == 0:
        return []
    D = sympy_smith_normal_form(A, domain=ZZ)
    return sorted(abs(int(D[i, i])) for i in range(min(D.shape)) if D[i, i] != 0)


def _integer_kernel(M) -> np.ndarray:
    """Columns spanning ker M over Q, scaled to integers"""
    cols = []
    for b in _sym(M).nullspace():
        scale = lcm(*(int(x.q) for x in b))
        cols.append([int(x * scale) for x in b])
    if not cols:
        return np.zeros((np.shape(M)[1], 0), dtype=object)
    return np.array(cols, dtype=object).T


def _random_matrix(rng):
    rows, cols = rng.integers(1, 9, size=2)
    M = rng.integers(-9, 10, size=(rows, cols))
    if rng.random() < 0.3 and rows > 1:
        M[-1] = 2 * M[0]           # force a rank drop
    return int_matrix(M.tolist())


def _random_complex(rng) -> IntegerChainComplex:
    """C_2 -> C_1 -> C_0 with ∂_2 built from the kernel of ∂_1, scaled for torsion"""
    r0, r1, r2 = (int(r) for r in rng.integers(1, 5, size=3))
    d1 = rng.integers(-3, 4, size=(r0, r1))
    K = _integer_kernel(d1)
    if K.shape[1]:
        R = rng.integers(-2, 3, size=(K.shape[1], r2)) * int(rng.choice([1, 2, 3]))
        d2 = K.dot(np.asarray(R.tolist(), dtype=object))
    else:
        d2 = np.zeros((r1, r2), dtype=object)
    return IntegerChainComplex({0: r0, 1: r1, 2: r2}, {1: d1.tolist(), 2: d2.tolist()})


# --- Smith normal form ---

def test_smith_form_small_example():
    U, D, V = smith_normal_form([[2, 4], [6, 8]])
    assert [D[0, 0], D[1, 1]] == [2, 4]
    assert D[0, 1] == 0 and D[1, 0] == 0
    assert (U.dot(int_matrix([[2, 4], [6, 8]])).dot(V) == D).all()


def test_smith_form_property_suite(rng):
    for _ in range(200):
        M = _random_matrix(rng)
        U, D, V = smith_normal_form(M)
        assert (U.dot(M).dot(V) == D).all()
        assert abs(_sym(U).det()) == 1
        assert abs(_sym(V).det()) == 1
        diag = [D[i, i] for i in range(min(D.shape))]
        off = D.copy()
        for i in range(min(D.shape)):
            off[i, i] = 0
        assert not off.any()
        nonzero = [d for d in diag if d != 0]
        assert all(d > 0 for d in nonzero)
        assert diag[:len(nonzero)] == nonzero
        assert all(b % a == 0 for a, b in zip(nonzero, nonzero[1:]))
        assert integer_rank(M) == _sym(M).rank()
        assert nonzero == _sympy_factors(M)


def test_invariant_factors_of_zero_and_empty():
    assert invariant_factors(int_matrix([[0, 0], [0, 0]])) == []
    assert invariant_factors(np.zeros((0, 3), dtype=object)) == []


def test_rank_mod2_sees_even_entries_vanish():
    assert rank_mod2([[2, 4], [6, 8]]) == 0
    assert rank_mod2([[1, 1], [1, 1]]) == 1
    assert rank_mod2([[1, 0, 1], [0, 1, 1], [1, 1, 0]]) == 2


# --- chain complexes ---

def test_klein_bottle_torsion():
    klein = IntegerChainComplex({0: 1, 1: 2, 2: 1}, {2: [[0], [2]]}, label="Klein")
    table = homology_of_complex(klein)
    assert table.group(0) == HomologyGroup(1)
    assert table.group(1) == HomologyGroup(1, (2,))
    assert table.group(2).is_zero()
    assert table.group(1).describe() == "Z ⊕ Z/2"
    reduced = reduce_mod2(klein)
    assert reduced.modulus == 2
    assert [int(x) for x in reduced.boundary(2).ravel()] == [0, 0]
    mod2 = homology_mod2(klein)
    assert mod2.free_ranks() == [1, 2, 1]


def test_homology_of_random_complexes_against_ranks_and_smith_form(rng):
    for _ in range(60):
        c = _random_complex(rng)
        table = homology_of_complex(c)
        for i in (0, 1, 2):
            rank_out = _sym(c.boundary(i)).rank() if i > 0 else 0
            rank_in = _sym(c.boundary(i + 1)).rank() if i < 2 else 0
            torsion = [d for d in _sympy_factors(c.boundary(i + 1)) if d > 1] if i < 2 else []
            assert table.group(i).free_rank == c.rank(i) - rank_out - rank_in
            assert list(table.group(i).torsion) == torsion


@pytest.mark.parametrize("n,a", [(1, 20.0), (2, 40.0), (3, 80.0)])
def test_morse_bott_complex_has_zero_euler_characteristic(n, a):
    c = morse_bott_complex(FlatTorus(n), a)
    assert sum(c.rank(i) for i in c.degrees) > 0
    assert euler_characteristic(c) == 0


def test_real_projective_plane():
    rp2 = IntegerChainComplex({0: 1, 1: 1, 2: 1}, {2: [[2]]})
    table = homology_of_complex(rp2)
    assert table.group(1) == HomologyGroup(0, (2,))
    assert table.group(2).is_zero()
    assert euler_characteristic(rp2) == 1


def test_invalid_complexes():
    with pytest.raises(InvalidComplexError):
        IntegerChainComplex({0: 1, 1: 1}, {1: [[1, 1]]})
    with pytest.raises(InvalidComplexError):
        IntegerChainComplex({0: 1, 2: 1})
    with pytest.raises(InvalidComplexError):
        IntegerChainComplex({0: 1, 1: 1, 2: 1}, {1: [[1]], 2: [[1]]}).check()
    with pytest.raises(DomainError):
        HomologyGroup(1, (4, 2))


def test_torus_cells_and_products():
    for n in (1, 2, 3, 4):
        table = homology_of_complex(torus_cw_complex(n))
        assert table.free_ranks() == [comb(n, i) for i in range(n + 1)]
    circle = torus_cw_complex(1)
    product = homology_of_complex(tensor_product(circle, circle))
    assert product.free_ranks() == [1, 2, 1]


def test_tensor_product_keeps_boundary_squared_zero():
    interval = IntegerChainComplex({0: 2, 1: 1}, {1: [[-1], [1]]})
    square = tensor_product(interval, interval).check()
    assert homology_of_complex(square).free_ranks() == [1, 0, 0]


def test_direct_sum_adds_ranks():
    total = direct_sum([torus_cw_complex(2)] * 3)
    assert homology_of_complex(total).free_ranks() == [3, 6, 3]


# --- the three sides ---

def test_morse_anchor_n2():
    table = morse_bott_homology(FlatTorus(2), action_level((1, 0)))
    assert table.free_ranks() == [5, 10, 5]
    assert morse_bott_complex(FlatTorus(2), action_level((1, 0))).rank(1) == 10


def test_floer_anchor_n1():
    table = floer_bott_cohomology(FlatTorus(1), action_level((1,)))
    assert table.degrees() == [-1, 0]
    assert table.free_ranks() == [3, 3]
    assert table.describe() == "HF_-1 = Z^3, HF_0 = Z^3"


def _windings(n, bound):
    return [k for k in np.ndindex(*(2 * bound + 1,) * n)
            if 0 < sum((x - bound) ** 2 for x in k) <= bound * bound]


@pytest.mark.parametrize("n", [1, 2, 3])
def test_three_way_agreement(n):
    torus = FlatTorus(n)
    for raw in _windings(n, 2):
        k = LatticeVector(tuple(x - 2 for x in raw))
        a = action_level(k)
        morse = morse_bott_homology(torus, a)
        floer = floer_bott_cohomology(torus, a)
        singular = sublevel_singular_homology(torus, k)
        count = len([l for l in np.ndindex(*(5,) * n) if sum((x - 2) ** 2 for x in l) <= k.norm_sq()])
        for i in range(n + 1):
            assert morse.group(i) == floer.group(-i) == singular.group(i) == HomologyGroup(count * comb(n, i))


def test_sublevel_dimension_mismatch():
    with pytest.raises(DomainError):
        sublevel_singular_homology(FlatTorus(2), (1,))


# --- perturbed complexes ---

def test_morse_witten_with_two_orbits():
    table = homology_of_complex(morse_witten_complex_perturbed(1, (2, 0)))
    assert table.coefficients == "Z2"
    assert table.free_ranks() == [1, 1]


def test_morse_witten_with_odd_count_kills_homology():
    table = homology_of_complex(morse_witten_complex_perturbed(1, 1))
    assert table.free_ranks() == [0, 0]


def test_morse_witten_needs_orbit_count_and_winding():
    with pytest.raises(MissingOrbitCountError):
        morse_witten_complex_perturbed(1)
    with pytest.raises(DomainError):
        morse_witten_complex_perturbed(0, (2, 0))


def test_perturbed_floer_side_regrades():
    table = perturbed_floer_cohomology(1, (2, 0))
    assert table.degrees() == [-1, 0]
    assert table.free_ranks() == [1, 1]


def test_perturbed_product_homology():
    for n in (1, 2, 3):
        table = perturbed_product_homology(n, 1, (2, 0))
        assert table.free_ranks() == [comb(n, i) for i in range(n + 1)]
