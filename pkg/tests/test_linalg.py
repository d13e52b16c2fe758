import math
from fractions import Fraction

import pytest

from toda_bn import (
    DegeneratePointError,
    ModeError,
    PhasePoint,
    SingularMatrixError,
    SquareMatrix,
    build_factors,
    mat_exp,
)
from toda_bn.verify import random_matrix


def test_identity_inverse():
    I4 = SquareMatrix.identity(4)
    assert I4.inverse() == I4


def test_commutator_with_self_vanishes(rng):
    for _ in range(5):
        x = random_matrix(4, rng)
        assert x.commutator(x) == SquareMatrix.zero(4)


def test_inverse_of_lax_factor_c(worked_point):
    _, _, c = build_factors(worked_point)
    assert c @ c.inverse() == SquareMatrix.identity(4)


def test_char_poly_diagonal():
    m = SquareMatrix([[2, 0], [0, 3]])
    assert m.char_poly().coeffs == (1, -5, 6)


def test_char_poly_lax_n1():
    # L = [[(1-Q1)z1, 1], [-Q1, 1/z1]] at z = 2, Q = 1/3
    L = SquareMatrix([[Fraction(4, 3), 1], [Fraction(-1, 3), Fraction(1, 2)]])
    assert L.char_poly().coeffs == (1, -(Fraction(4, 3) + Fraction(1, 2)), 1)


def test_lax_determinant_is_one(rng):
    from toda_bn import build_lax
    from toda_bn.verify import random_point

    for n in range(1, 5):
        for _ in range(12):
            x = random_point(n, rng)
            coeffs = build_lax(x).char_poly().coeffs
            assert coeffs[2 * n] == 1


def test_char_poly_similarity_invariant(rng):
    m = random_matrix(4, rng)
    while True:
        p = random_matrix(4, rng)
        if p.det() != 0:
            break
    assert (p @ m @ p.inverse()).char_poly() == m.char_poly()


def test_char_poly_root_at_triangular_eigenvalue(rng):
    rows = [[random_matrix(1, rng)[0, 0] if j >= i else Fraction(0) for j in range(4)]
            for i in range(4)]
    m = SquareMatrix(rows)
    p = m.char_poly()
    for i in range(4):
        assert p(m[i, i]) == 0


def test_lu_hand_example():
    m = SquareMatrix([[2, 1], [4, 3]])
    lower, upper = m.lu_unit_lower()
    assert lower == SquareMatrix([[1, 0], [2, 1]])
    assert upper == SquareMatrix([[2, 1], [0, 1]])


def test_lu_identity():
    I3 = SquareMatrix.identity(3)
    assert I3.lu_unit_lower() == (I3, I3)


def test_lu_roundtrip_and_uniqueness(rng):
    while True:
        try:
            m = random_matrix(6, rng)
            lower, upper = m.lu_unit_lower()
            break
        except DegeneratePointError:
            continue
    assert lower @ upper == m
    assert (lower @ upper).lu_unit_lower() == (lower, upper)


def test_lu_degenerate():
    with pytest.raises(DegeneratePointError):
        SquareMatrix([[0, 1], [1, 0]]).lu_unit_lower()


def test_singular_inverse_raises():
    with pytest.raises(SingularMatrixError):
        SquareMatrix([[1, 2], [2, 4]]).inverse()
    with pytest.raises(SingularMatrixError):
        SquareMatrix([[1.0, 2.0], [2.0, 4.0]]).inverse()


def test_mode_mixing_rejected():
    with pytest.raises(ModeError):
        SquareMatrix([[Fraction(1), 0.5], [0, 1]])
    with pytest.raises(ModeError):
        SquareMatrix([[0.5, Fraction(1)], [0, 1]])  # order must not matter
    with pytest.raises(ModeError):
        SquareMatrix.identity(2) @ SquareMatrix.identity(2, "float")
    assert SquareMatrix([[0.5, 1], [0, 1]]).mode == "float"  # ints absorb


def test_mat_exp_zero():
    m = SquareMatrix([[1.0, 2.0], [3.0, 4.0]])
    assert mat_exp(m, 0.0) == SquareMatrix.identity(2, "float")


def test_mat_exp_diagonal():
    m = SquareMatrix([[1.0, 0.0], [0.0, 2.0]])
    e = mat_exp(m, 1.0)
    assert abs(e[0, 0] - math.e) < 1e-12 * math.e
    assert abs(e[1, 1] - math.e ** 2) < 1e-12 * math.e ** 2
    assert abs(e[0, 1]) < 1e-14 and abs(e[1, 0]) < 1e-14


def test_mat_exp_inverse_property(rng):
    rows = [[rng.uniform(-0.5, 0.5) for _ in range(4)] for _ in range(4)]
    m = SquareMatrix(rows)
    prod = mat_exp(m) @ mat_exp(-1 * m)
    eye = SquareMatrix.identity(4, "float")
    assert max(abs(prod[i, j] - eye[i, j]) for i in range(4) for j in range(4)) < 1e-10


def test_mat_exp_mode_error():
    with pytest.raises(ModeError):
        mat_exp(SquareMatrix.identity(2))


def test_json_roundtrip(rng):
    m = random_matrix(3, rng)
    assert SquareMatrix.from_json_obj(m.to_json_obj()) == m
    obj = m.to_json_obj()
    assert isinstance(obj[0][0], str) and "/" in str(obj[0][0]) or obj[0][0].lstrip("-").isdigit()

    f = SquareMatrix([[0.5, 1.5], [2.5, 3.5]])
    assert SquareMatrix.from_json_obj(f.to_json_obj()) == f


def test_phase_point_mode_and_validation():
    with pytest.raises(Exception):
        PhasePoint(2, (Fraction(0), Fraction(1)), (Fraction(1), Fraction(1)))
    x = PhasePoint(1, (0.5,), (0.25,))
    assert x.mode == "float"
    y = PhasePoint(1, (Fraction(1, 2),), (Fraction(1, 4),))
    assert y.mode == "exact"
    with pytest.raises(ModeError):
        PhasePoint(2, (Fraction(1, 2), 0.5), (Fraction(1), Fraction(1)))
