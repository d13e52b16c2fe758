"""Conserved quantities F_0..F_2n by two independent routes.

Route one reads the F_i off the characteristic polynomial of the Lax
matrix: det(lambda*E - L) = sum_i (-1)^i F_i lambda^(2n-i).

Route two sums weighted chains of intervals in the index set
I = {1 < 2 < ... < n < nbar < ... < 1bar}, identified with {1..2n} via
kbar = 2n+1-k.  An interval (x, y) carries a nonzero weight w(x, y) for
exactly seven shapes:

    (k, k)         ->  z_k
    (k, k+1)       -> -Q_k z_k                (k < n)
    (kbar, kbar)   ->  z_k^{-1}
    (kbar, k-1bar) -> -Q_{k-1} z_k^{-1}       (k > 1)
    (k, kbar)      -> -z_k Q_k Q_{k+1}...Q_n
    (k, k+1bar)    ->  z_k Q_k Q_{k+1}...Q_n  (k < n)

and F_i is the sum over chains x_1 <= y_1 < x_2 <= y_2 < ... < x_i <= y_i
of the products of the interval weights.

The "improved" variant prunes the chains that cancel in pairs: intervals
(k, kbar) with k < n are dropped, and an interval (k, k+1bar) must be
followed immediately by one starting at kbar.  Both variants expand to
the same polynomial; the pruning is exactly the pairwise cancellation
coming from w(k, k+1bar) = -w(k, kbar).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import exp
from typing import Sequence

from .errors import DegeneratePointError, ModeError
from .laurent import LaurentPoly
from .lax import PhasePoint, build_factors, build_lax
from .linalg import PolyInLambda, SquareMatrix, interpolate_poly

#: Symbolic expansion guard: chain enumeration grows quickly with n, so the
#: path-formula route stays a desk-scale verification tool.
MAX_SYMBOLIC_RANK = 6


def _tail_q_monomial(n: int, k: int) -> LaurentPoly:
    """Q_k Q_{k+1} ... Q_n as a Laurent polynomial (1-based k)."""
    eq = [0] * n
    for m in range(k, n + 1):
        eq[m - 1] = 1
    return LaurentPoly.monomial(n, [0] * n, eq)


def interval_weight(n: int, x: int, y: int) -> LaurentPoly:
    """The weight w(x, y) of the shortest path from line x to line y.

    Indices are 1-based elements of {1..2n}; any pair outside the seven
    weighted shapes (including x > y) gets the zero polynomial.
    """
    if not (1 <= x <= 2 * n and 1 <= y <= 2 * n):
        raise ValueError(f"indices must lie in 1..{2 * n}")
    zero = LaurentPoly.zero(n)
    if x > y:
        return zero
    if x == y:
        if x <= n:
            return LaurentPoly.z_var(n, x)
        return LaurentPoly.z_var(n, 2 * n + 1 - x, -1)
    if y == x + 1 and y <= n:
        return -(LaurentPoly.q_var(n, x) * LaurentPoly.z_var(n, x))
    if y == x + 1 and x >= n + 1:
        k = 2 * n + 1 - x
        return -(LaurentPoly.q_var(n, k - 1) * LaurentPoly.z_var(n, k, -1))
    if y == 2 * n + 1 - x and x <= n:
        return -(LaurentPoly.z_var(n, x) * _tail_q_monomial(n, x))
    if y == 2 * n - x and x <= n - 1:
        return LaurentPoly.z_var(n, x) * _tail_q_monomial(n, x)
    return zero


def _shapes(n: int, x: int) -> list[int]:
    """End points y >= x with nonzero weight for an interval starting at x."""
    ys = [x]
    if x + 1 <= n or n + 1 <= x <= 2 * n - 1:
        ys.append(x + 1)
    if x <= n - 1:
        ys.append(2 * n - x)
    if x <= n:
        ys.append(2 * n + 1 - x)
    return sorted(set(ys))


def _is_short_dashed(n: int, x: int, y: int) -> bool:
    return x <= n - 1 and y == 2 * n - x


def _is_long_dashed(n: int, x: int, y: int) -> bool:
    return x <= n and y == 2 * n + 1 - x


@lru_cache(maxsize=None)
def f_poly(n: int, i: int, mode: str = "original") -> LaurentPoly:
    """The conserved quantity F_i as an exact Laurent polynomial.

    mode "original" sums over all interval chains; mode "improved" prunes
    the pairwise-cancelling chains as described in the module docstring.
    F_0 = 1 by convention.
    """
    if not 0 <= i <= 2 * n:
        raise ValueError(f"need 0 <= i <= 2n, got i={i}")
    if mode not in ("original", "improved"):
        raise ValueError(f"unknown mode {mode!r}")
    improved = mode == "improved"
    zero = LaurentPoly.zero(n)
    one = LaurentPoly.one(n)
    memo: dict[tuple[int, int, bool], LaurentPoly] = {}

    def chains(pos: int, left: int, forced: bool) -> LaurentPoly:
        # Sum of weight products over chains of `left` intervals starting at
        # positions >= pos; `forced` pins the next interval to start at pos.
        if left == 0:
            return zero if forced else one
        if pos > 2 * n:
            return zero
        key = (pos, left, forced)
        if key in memo:
            return memo[key]
        acc = zero if forced else chains(pos + 1, left, False)
        for y in _shapes(n, pos):
            if improved and _is_long_dashed(n, pos, y) and pos <= n - 1:
                continue
            w = interval_weight(n, pos, y)
            nxt_forced = improved and _is_short_dashed(n, pos, y)
            acc = acc + w * chains(y + 1, left - 1, nxt_forced)
        memo[key] = acc
        return acc

    return chains(1, i, False)


def conserved_values(x: PhasePoint) -> tuple:
    """F_0..F_2n at x through the characteristic-polynomial route."""
    coeffs = build_lax(x).char_poly().coeffs
    return tuple((-1) ** i * c for i, c in enumerate(coeffs))


def conserved_values_by_path(x: PhasePoint, mode: str = "original") -> tuple:
    """F_0..F_2n at x by evaluating the symbolic path formula."""
    if x.n > MAX_SYMBOLIC_RANK:
        raise ValueError(f"path-formula route is capped at n <= {MAX_SYMBOLIC_RANK}")
    return tuple(f_poly(x.n, i, mode).evaluate(x.z, x.Q) for i in range(2 * x.n + 1))


def elementary_symmetric(i: int, values: Sequence):
    """The elementary symmetric polynomial e_i of the given values."""
    if i < 0:
        raise ValueError("need i >= 0")
    if i > len(values):
        return 0
    acc = [1] + [0] * i
    for v in values:
        for j in range(min(i, len(acc) - 1), 0, -1):
            acc[j] = acc[j] + v * acc[j - 1]
    return acc[i]


def elementary_symmetric_z_poly(n: int, i: int) -> LaurentPoly:
    """e_i(z_1..z_n, z_1^{-1}..z_n^{-1}) as a Laurent polynomial."""
    values = [LaurentPoly.z_var(n, k) for k in range(1, n + 1)]
    values += [LaurentPoly.z_var(n, k, -1) for k in range(1, n + 1)]
    if i > len(values):
        return LaurentPoly.zero(n)
    acc = [LaurentPoly.one(n)] + [LaurentPoly.zero(n)] * i
    for v in values:
        for j in range(min(i, len(acc) - 1), 0, -1):
            acc[j] = acc[j] + v * acc[j - 1]
    return acc[i]


def ideal_generator(i: int, x: PhasePoint, eps: Sequence[float]) -> float:
    """F_i(x) - e_i(e^{eps_1}, .., e^{eps_n}, e^{-eps_1}, .., e^{-eps_n}).

    These differences generate the defining ideal of the Borel-type
    presentation of the equivariant quantum K-ring attached to the system.
    """
    if len(eps) != x.n:
        raise ValueError("need one torus weight per rank")
    f = conserved_values(x)[i]
    values = [exp(e) for e in eps] + [exp(-e) for e in eps]
    return float(f) - float(elementary_symmetric(i, values))


@dataclass(frozen=True)
class PathWeightReport:
    """Outcome of the executable factorization oracle behind the path formula."""

    c_factorization_ok: bool        # C = Z * (D Lambda D^{-1})
    three_factor_ok: bool           # M = diag(z, z^{-1} reversed) * bidiag * corner
    entry_law_ok: bool              # M[p, q] = (-1)^(q-p) w(p, q)
    spectrum_match_ok: bool         # det(lambda*Lambda - M) = det(lambda*E - L)

    @property
    def all_ok(self) -> bool:
        return (self.c_factorization_ok and self.three_factor_ok
                and self.entry_law_ok and self.spectrum_match_ok)


def path_weight_oracle(x: PhasePoint) -> PathWeightReport:
    """Verify the four exact identities behind the path formula at x.

    The conjugating diagonal D needs all Q_i != 0 to be invertible, so
    points with a vanishing Q_i raise DegeneratePointError (the two main
    conserved-quantity routes remain total there).
    """
    if x.mode != "exact":
        raise ModeError("the factorization oracle runs in exact mode only")
    if any(q == 0 for q in x.Q):
        raise DegeneratePointError("oracle needs all Q_i != 0 (D must be invertible)")
    n, z, Q = x.n, x.z, x.Q
    d = 2 * n

    qprod = [Fraction(1)]
    zprod = [Fraction(1)]
    for k in range(n):
        qprod.append(qprod[-1] * Q[k])
        zprod.append(zprod[-1] * z[k])
    a = [qprod[i] * zprod[i] for i in range(n)]            # a_i = bQ_{i-1} bz_{i-1}
    b = [qprod[n] * zprod[n - i] for i in range(1, n + 1)]  # b_i = bQ_n bz_{n-i}

    D = SquareMatrix.zero(d)
    Z = SquareMatrix.identity(d)
    Lam = SquareMatrix.identity(d)
    for i in range(n):
        D = D.with_entry(i, i, a[i]).with_entry(n + i, n + i, b[i])
        Z = Z.with_entry(n + i, n + i, z[n - 1 - i])
    for k in range(d - 1):
        Lam = Lam.with_entry(k + 1, k, Fraction(1))

    N, B, C = build_factors(x)
    c_ok = (C == Z @ (D @ Lam @ D.inverse()))

    M = D.inverse() @ Z.inverse() @ N @ B @ D

    zdiag = SquareMatrix.zero(d)
    bidiag = SquareMatrix.identity(d)
    corner = SquareMatrix.identity(d)
    for i in range(n):
        zdiag = zdiag.with_entry(i, i, z[i]).with_entry(n + i, n + i, 1 / z[n - 1 - i])
    for k in range(1, n):
        bidiag = bidiag.with_entry(k - 1, k, Q[k - 1])
        bidiag = bidiag.with_entry(n + k - 1, n + k, Q[n - k - 1])
    for k in range(1, n + 1):
        tail = Fraction(1)
        for m in range(k, n + 1):
            tail *= Q[m - 1]
        corner = corner.with_entry(k - 1, d - k, tail)
    three_ok = (M == zdiag @ bidiag @ corner)

    entry_ok = True
    for p in range(1, d + 1):
        for q in range(1, d + 1):
            w = interval_weight(n, p, q).evaluate(z, Q)
            if M[p - 1, q - 1] != (-1) ** (q - p) * w:
                entry_ok = False

    cs = build_lax(x).char_poly()
    pts = [(lam, (Lam * Fraction(lam) - M).det()) for lam in range(d + 1)]
    spectrum_ok = (interpolate_poly(pts) == PolyInLambda(cs.coeffs))

    return PathWeightReport(c_ok, three_ok, entry_ok, spectrum_ok)
