import math
from fractions import Fraction

import pytest

from toda_bn import (
    DegeneratePointError,
    LaurentPoly,
    ModeError,
    PhasePoint,
    path_weight_oracle,
    conserved_values,
    conserved_values_by_path,
    elementary_symmetric,
    elementary_symmetric_z_poly,
    f_poly,
    ideal_generator,
    interval_weight,
)
from toda_bn.verify import printed_f1, printed_f2_n2, random_point, random_rational


def test_weight_table_singletons():
    for n in (2, 3):
        for k in range(1, n + 1):
            assert interval_weight(n, k, k) == LaurentPoly.z_var(n, k)
            kbar = 2 * n + 1 - k
            assert interval_weight(n, kbar, kbar) == LaurentPoly.z_var(n, k, -1)


def test_weight_table_dashed():
    n = 2
    q1q2 = LaurentPoly.q_var(n, 1) * LaurentPoly.q_var(n, 2)
    assert interval_weight(n, 1, 3) == LaurentPoly.z_var(n, 1) * q1q2
    assert interval_weight(n, 1, 4) == -1 * LaurentPoly.z_var(n, 1) * q1q2


def test_weight_table_zero_cases():
    assert interval_weight(3, 1, 3).is_zero()  # non-adjacent, no path
    assert interval_weight(2, 3, 1).is_zero()  # x > y
    with pytest.raises(ValueError):
        interval_weight(2, 0, 1)


def test_f1_matches_printed_formula():
    for n in range(1, 5):
        assert f_poly(n, 1) == printed_f1(n)


def test_f2_matches_printed_formula_n2():
    assert f_poly(2, 2) == printed_f2_n2()


def test_f0_and_f2n_are_one():
    for n in range(1, 5):
        assert f_poly(n, 0) == LaurentPoly.one(n)
        assert f_poly(n, 2 * n) == LaurentPoly.one(n)


def test_improved_mode_equals_original():
    for n in range(1, 5):
        for i in range(2 * n + 1):
            assert f_poly(n, i, "improved") == f_poly(n, i, "original")


def test_conserved_values_worked_point(worked_point):
    f = conserved_values(worked_point)
    assert f == (1, Fraction(61, 15), Fraction(223, 30), Fraction(61, 15), 1)
    assert conserved_values_by_path(worked_point) == f


def test_q_zero_reduces_to_elementary_symmetric():
    for n in range(1, 5):
        for i in range(2 * n + 1):
            assert f_poly(n, i).substitute_q_zero() == elementary_symmetric_z_poly(n, i)


def test_q_zero_values(rng):
    n = 3
    z = tuple(random_rational(rng) for _ in range(n))
    x = PhasePoint(n, z, (Fraction(0),) * n)
    vals = list(z) + [1 / v for v in z]
    f = conserved_values(x)
    for i in range(2 * n + 1):
        assert f[i] == elementary_symmetric(i, vals)


def test_elementary_symmetric_basics():
    assert elementary_symmetric(1, [Fraction(2), Fraction(3)]) == 5
    vals = [Fraction(2), Fraction(3), Fraction(1, 2), Fraction(1, 3)]
    assert elementary_symmetric(2, vals) == Fraction(31, 3)
    # reciprocal pairs multiply to 1
    pairs = [Fraction(5), Fraction(1, 5), Fraction(7, 3), Fraction(3, 7)]
    assert elementary_symmetric(4, pairs) == 1
    assert elementary_symmetric(0, pairs) == 1
    assert elementary_symmetric(9, pairs) == 0


def test_ideal_generator_vanishes_at_exponential_point(rng):
    for n in (1, 2, 3):
        eps = [rng.uniform(-0.5, 0.5) for _ in range(n)]
        x = PhasePoint(n, tuple(math.exp(e) for e in eps), (0.0,) * n)
        for i in range(1, 2 * n + 1):
            assert abs(ideal_generator(i, x, eps)) < 1e-12


def test_ideal_generator_trivial_weights():
    n = 2
    x = PhasePoint(n, (Fraction(1),) * n, (Fraction(0),) * n)
    assert ideal_generator(2 * n, x, [0.0] * n) == 0.0


def test_ideal_generator_routes_agree(rng):
    x = random_point(2, rng)
    eps = [0.3, -0.1]
    vals = [math.exp(e) for e in eps] + [math.exp(-e) for e in eps]
    for i in range(1, 5):
        ei = float(elementary_symmetric(i, vals))
        assert ideal_generator(i, x, eps) == float(conserved_values_by_path(x)[i]) - ei


def test_path_weight_oracle_random_points(rng):
    for n in (1, 2, 3):
        done = 0
        while done < 6:
            x = random_point(n, rng)
            if any(q == 0 for q in x.Q):
                continue
            assert path_weight_oracle(x).all_ok
            done += 1


def test_path_weight_oracle_n1_instance():
    x = PhasePoint(1, (Fraction(3, 2),), (Fraction(2, 5),))
    rep = path_weight_oracle(x)
    assert rep.all_ok


def test_path_weight_oracle_degenerate_q(rng):
    n = 2
    x = PhasePoint(n, (Fraction(2), Fraction(3)), (Fraction(0), Fraction(1, 3)))
    with pytest.raises(DegeneratePointError):
        path_weight_oracle(x)
    # both conserved-quantity routes stay total and equal at that point
    assert conserved_values(x) == conserved_values_by_path(x)


def test_path_weight_oracle_float_rejected(worked_point):
    with pytest.raises(ModeError):
        path_weight_oracle(worked_point.to_float())


def test_path_route_rank_guard():
    x = PhasePoint(7, (Fraction(1),) * 7, (Fraction(0),) * 7)
    with pytest.raises(ValueError):
        conserved_values_by_path(x)
