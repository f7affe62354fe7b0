import math
import random
from fractions import Fraction

import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from contact_pi1.src.errors import InvalidInputError, NotPrimitive, NotSquare, ZeroVector
from contact_pi1.src.lattice import (
    AbelianGroup,
    IntMatrix,
    cokernel,
    complete_to_unimodular,
    det,
    gcd_all,
    kernel_basis,
    primitive_part,
    random_unimodular,
    rank,
    smith_normal_form,
    solve_exact,
    unimodular_from_ops,
    unimodular_inverse,
)
from contact_pi1.tests.oracles import cofactor_det, invariant_factors, matmul, minor_gcd


def M(rows, cols=None):
    return IntMatrix.from_rows(rows, cols=cols)


def test_det_examples():
    assert det(IntMatrix.identity(4)) == 1
    assert det(M([[2, 1], [1, 1]])) == 1
    assert det(M([[1, 2], [2, 4]])) == 0
    assert det(IntMatrix.identity(0)) == 1
    with pytest.raises(NotSquare):
        det(M([[1, 2, 3]]))


def test_rank_and_solve():
    assert rank(M([[1, 2], [2, 4]])) == 1
    assert rank(M([], cols=3)) == 0
    assert solve_exact(M([[1, 0], [1, 2]]), [Fraction(0), Fraction(3)]) == (Fraction(0), Fraction(3, 2))


def test_smith_normal_form_known_matrix():
    A = M([[12, 6, 4, 8], [3, 9, 6, 12], [2, 16, 14, 28], [20, 10, 10, 20]])
    snf = smith_normal_form(A)
    assert snf.invariants == (1, 10, 30, 0)
    assert snf.U @ A @ snf.V == snf.S
    assert abs(det(snf.U)) == 1 and abs(det(snf.V)) == 1


def test_smith_normal_form_empty_shapes():
    for rows, cols in [(0, 0), (0, 2), (2, 0)]:
        snf = smith_normal_form(IntMatrix(rows, cols, ()))
        assert snf.invariants == ()
        assert snf.U.rows == rows and snf.V.rows == cols


@pytest.mark.parametrize("rows, invariants", [
    ([[0, -2]], (2,)),
    ([[0], [-2]], (2,)),
    ([[0, 0], [0, -3]], (3, 0)),
    ([[0, 0, 0], [0, 0, 0], [0, 0, -5]], (5, 0, 0)),
    ([[-4, 0], [0, -6]], (2, 12)),
])
def test_smith_normal_form_nonnegative_with_zeros_last(rows, invariants):
    A = M(rows)
    snf = smith_normal_form(A)
    assert snf.invariants == invariants
    assert snf.U @ A @ snf.V == snf.S
    assert abs(det(snf.U)) == 1 and abs(det(snf.V)) == 1


def test_smith_normal_form_seeded_against_oracles():
    rng = random.Random(11)
    for _ in range(1000):
        rows, cols = rng.randint(1, 4), rng.randint(1, 4)
        entries = [[rng.randint(-9, 9) for _ in range(cols)] for _ in range(rows)]
        A = M(entries)
        snf = smith_normal_form(A)

        assert snf.U @ A @ snf.V == snf.S
        assert abs(det(snf.U)) == 1
        assert abs(det(snf.V)) == 1
        assert all(snf.S[i, j] == 0 for i in range(rows) for j in range(cols) if i != j)

        invariants = snf.invariants
        assert all(d >= 0 for d in invariants)
        nonzero = [d for d in invariants if d]
        assert list(invariants) == nonzero + [0] * (len(invariants) - len(nonzero))
        assert all(b % a == 0 for a, b in zip(nonzero, nonzero[1:]))
        assert list(invariants) == invariant_factors(entries)

        product = 1
        for k, d in enumerate(nonzero, start=1):
            product *= d
            assert product == minor_gcd(entries, k)

        if rows == cols:
            assert det(A) == cofactor_det(entries)


def test_cokernel_examples():
    assert cokernel(M([[1, -1], [0, 6]])) == AbelianGroup.cyclic(6)
    assert cokernel(M([[2, 0], [0, 4]])).render() == "Z/2 + Z/4"
    assert cokernel(M([[0], [0]])) == AbelianGroup.free(2)
    assert cokernel(IntMatrix.identity(3)).is_trivial


def test_kernel_basis_is_saturated():
    assert kernel_basis(M([[2, 4]])) == [(2, -1)]
    rng = random.Random(3)
    for _ in range(200):
        rows, cols = rng.randint(1, 3), rng.randint(2, 4)
        A = M([[rng.randint(-5, 5) for _ in range(cols)] for _ in range(rows)])
        basis = kernel_basis(A)
        assert len(basis) == cols - rank(A)
        for v in basis:
            assert A @ v == (0,) * rows
        if basis:
            assert minor_gcd([list(v) for v in basis], len(basis)) == 1


def test_primitive_part():
    assert primitive_part((4, -6, 2)) == ((2, -3, 1), 2)
    assert gcd_all([]) == 0
    with pytest.raises(ZeroVector):
        primitive_part((0, 0))


def test_complete_to_unimodular_examples():
    assert complete_to_unimodular((0, 0, 1)) == IntMatrix.identity(3)
    with pytest.raises(NotPrimitive):
        complete_to_unimodular((2, 4))
    A = complete_to_unimodular((0, 1))
    assert A @ (0, 1) == (0, 1)


@pytest.mark.property_based
@given(st.lists(st.integers(-30, 30), min_size=2, max_size=6))
@settings(max_examples=200)
def test_complete_to_unimodular_property(values):
    assume(gcd_all(values) == 1)
    A = complete_to_unimodular(values)
    assert A @ values == tuple(int(i == len(values) - 1) for i in range(len(values)))
    assert det(A) == 1


@pytest.mark.property_based
@given(st.integers(2, 5), st.integers(0, 10_000))
@settings(max_examples=100)
def test_random_unimodular_inverse(size, seed):
    A = random_unimodular(size, random.Random(seed))
    assert det(A) == 1
    inverse = unimodular_inverse(A)
    assert A @ inverse == IntMatrix.identity(size)


def test_unimodular_inverse_rejects_singular():
    with pytest.raises(InvalidInputError):
        unimodular_inverse(M([[2, 0], [0, 1]]))


def test_unimodular_from_ops():
    A = unimodular_from_ops(2, [(0, 1, 3)])
    assert A == M([[1, 3], [0, 1]])
    assert matmul(A.to_rows(), [[0], [1]]) == [[3], [1]]


def test_abelian_group_canonical_form():
    assert AbelianGroup.cyclic(0) == AbelianGroup.free(1)
    assert AbelianGroup.cyclic(1).is_trivial
    assert AbelianGroup.from_orders([2, 3]) == AbelianGroup.cyclic(6)
    assert AbelianGroup.from_orders([4, 6]).torsion == (2, 12)
    assert AbelianGroup.cyclic(2).direct_sum(AbelianGroup.free(2)).render() == "Z/2 + Z^2"
    assert AbelianGroup.cyclic(6).order == 6
    assert AbelianGroup.free(1).order is None
    with pytest.raises(InvalidInputError):
        AbelianGroup(torsion=(4, 6))


@pytest.mark.parametrize("text", ["0", "Z", "Z^3", "Z/2", "Z/2 + Z^2", "Z/2 + Z/4 + Z"])
def test_abelian_group_render_parse(text):
    assert AbelianGroup.parse(text).render() == text


def test_abelian_group_parse_normalizes():
    assert AbelianGroup.parse("Z + Z/3 + Z/2").render() == "Z/6 + Z"
    assert math.prod(AbelianGroup.parse("Z/2 + Z/4").torsion) == 8
