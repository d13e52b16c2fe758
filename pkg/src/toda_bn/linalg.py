"""Dense square matrices over exact rationals or binary64 floats.

Two scalar modes are supported and never mixed inside one matrix:

* ``"exact"``  -- entries are :class:`fractions.Fraction` (ints are coerced);
  every identity test in this package runs in this mode, so results of
  products, inverses, LU factors and characteristic polynomials are exact.
* ``"float"``  -- entries are IEEE binary64; used only for flows and matrix
  exponentials.

The characteristic polynomial is computed by the Faddeev-LeVerrier
recurrence, whose only divisions are by the integers 1..d, hence it is
exact in rational mode.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence, Union

from .errors import DegeneratePointError, ModeError, SingularMatrixError

Scalar = Union[Fraction, float]

#: Relative pivot threshold below which float-mode elimination reports
#: singularity / degeneracy.  Single documented constant for the package.
SINGULARITY_RTOL = 1e-12


def classify_scalar(value) -> str:
    """Return the mode ("exact" or "float") a raw scalar belongs to."""
    if isinstance(value, bool):
        raise ModeError(f"boolean is not a scalar: {value!r}")
    if isinstance(value, (int, Fraction)):
        return "exact"
    if isinstance(value, float):
        return "float"
    raise ModeError(f"unsupported scalar type: {type(value).__name__}")


def coerce_scalar(value, mode: str) -> Scalar:
    if mode == "exact":
        if isinstance(value, float):
            raise ModeError("refusing to coerce a float into exact mode")
        return Fraction(value)
    return float(value)


def scalars_mode(values: Iterable) -> str:
    """Common mode of a collection of scalars; plain ints are absorbed into
    either mode, but mixing Fraction with float raises ModeError."""
    saw_float = saw_fraction = saw_any = False
    for v in values:
        classify_scalar(v)
        saw_any = True
        if isinstance(v, float):
            saw_float = True
        elif isinstance(v, Fraction):
            saw_fraction = True
    if not saw_any:
        raise ModeError("empty scalar collection")
    if saw_float and saw_fraction:
        raise ModeError("mixing exact and float scalars")
    return "float" if saw_float else "exact"


def format_scalar(value: Scalar):
    """JSON form: rationals as "p/q" strings, floats as numbers."""
    if isinstance(value, Fraction):
        return str(value)
    return value


def parse_scalar(obj) -> Scalar:
    """Inverse of :func:`format_scalar`: strings mean exact, numbers float."""
    if isinstance(obj, str):
        return Fraction(obj)
    if isinstance(obj, bool):
        raise ModeError(f"boolean is not a scalar: {obj!r}")
    if isinstance(obj, (int, float)):
        return float(obj)
    raise ModeError(f"cannot parse scalar from {obj!r}")


class SquareMatrix:
    """Immutable d x d matrix with a single scalar mode."""

    __slots__ = ("_rows", "_dim", "_mode")

    def __init__(self, rows: Sequence[Sequence], mode: str | None = None):
        rows = [tuple(r) for r in rows]
        d = len(rows)
        if d < 1 or any(len(r) != d for r in rows):
            raise ValueError("rows must form a nonempty square array")
        if mode is None:
            mode = scalars_mode(v for r in rows for v in r)
        elif mode not in ("exact", "float"):
            raise ValueError(f"unknown mode {mode!r}")
        self._rows = tuple(tuple(coerce_scalar(v, mode) for v in r) for r in rows)
        self._dim = d
        self._mode = mode

    # -- construction -----------------------------------------------------

    @classmethod
    def identity(cls, d: int, mode: str = "exact") -> "SquareMatrix":
        one = Fraction(1) if mode == "exact" else 1.0
        zero = Fraction(0) if mode == "exact" else 0.0
        return cls([[one if i == j else zero for j in range(d)] for i in range(d)], mode)

    @classmethod
    def zero(cls, d: int, mode: str = "exact") -> "SquareMatrix":
        zero = Fraction(0) if mode == "exact" else 0.0
        return cls([[zero] * d for _ in range(d)], mode)

    @classmethod
    def reversal(cls, d: int, mode: str = "exact") -> "SquareMatrix":
        """The anti-diagonal permutation J = sum_i E_{i, d+1-i}."""
        one = Fraction(1) if mode == "exact" else 1.0
        zero = Fraction(0) if mode == "exact" else 0.0
        return cls([[one if j == d - 1 - i else zero for j in range(d)] for i in range(d)], mode)

    @classmethod
    def from_blocks(cls, blocks: Sequence[Sequence["SquareMatrix"]]) -> "SquareMatrix":
        """Assemble a matrix from a 2x2 (or k x k) grid of equal-size blocks."""
        k = len(blocks)
        n = blocks[0][0].dim
        mode = blocks[0][0].mode
        rows = []
        for bi in range(k):
            for r in range(n):
                row = []
                for bj in range(k):
                    blk = blocks[bi][bj]
                    if blk.dim != n or blk.mode != mode:
                        raise ModeError("blocks must share size and mode")
                    row.extend(blk._rows[r])
                rows.append(row)
        return cls(rows, mode)

    # -- basic accessors ---------------------------------------------------

    @property
    def dim(self) -> int:
        return self._dim

    @property
    def mode(self) -> str:
        return self._mode

    @property
    def rows(self):
        return self._rows

    def __getitem__(self, ij):
        i, j = ij
        return self._rows[i][j]

    def __eq__(self, other):
        if not isinstance(other, SquareMatrix):
            return NotImplemented
        return self._mode == other._mode and self._rows == other._rows

    def __hash__(self):
        return hash((self._mode, self._rows))

    def __repr__(self):
        body = ",\n ".join("[" + ", ".join(map(str, r)) + "]" for r in self._rows)
        return f"SquareMatrix(\n {body})"

    def block(self, i0: int, j0: int, size: int) -> "SquareMatrix":
        return SquareMatrix(
            [r[j0:j0 + size] for r in self._rows[i0:i0 + size]], self._mode)

    def with_entry(self, i: int, j: int, value) -> "SquareMatrix":
        rows = [list(r) for r in self._rows]
        rows[i][j] = value
        return SquareMatrix(rows, self._mode)

    def _check_compatible(self, other: "SquareMatrix"):
        if not isinstance(other, SquareMatrix):
            raise TypeError("expected a SquareMatrix")
        if self._dim != other._dim:
            raise ValueError(f"dimension mismatch: {self._dim} vs {other._dim}")
        if self._mode != other._mode:
            raise ModeError("mixing exact and float matrices")

    # -- arithmetic ---------------------------------------------------------

    def __add__(self, other):
        self._check_compatible(other)
        return SquareMatrix(
            [[a + b for a, b in zip(ra, rb)] for ra, rb in zip(self._rows, other._rows)],
            self._mode)

    def __sub__(self, other):
        self._check_compatible(other)
        return SquareMatrix(
            [[a - b for a, b in zip(ra, rb)] for ra, rb in zip(self._rows, other._rows)],
            self._mode)

    def __neg__(self):
        return SquareMatrix([[-a for a in r] for r in self._rows], self._mode)

    def __matmul__(self, other):
        self._check_compatible(other)
        d = self._dim
        cols = list(zip(*other._rows))
        return SquareMatrix(
            [[sum(ra[k] * col[k] for k in range(d)) for col in cols] for ra in self._rows],
            self._mode)

    def __mul__(self, scalar):
        s = coerce_scalar(scalar, self._mode)
        return SquareMatrix([[a * s for a in r] for r in self._rows], self._mode)

    __rmul__ = __mul__

    def commutator(self, other: "SquareMatrix") -> "SquareMatrix":
        """[self, other] = self@other - other@self."""
        return self @ other - other @ self

    def transpose(self) -> "SquareMatrix":
        return SquareMatrix(list(zip(*self._rows)), self._mode)

    def trace(self) -> Scalar:
        return sum(self._rows[i][i] for i in range(self._dim))

    def max_abs(self) -> float:
        return max(abs(v) for r in self._rows for v in r)

    def _pivot_is_zero(self, pivot, scale) -> bool:
        if self._mode == "exact":
            return pivot == 0
        return abs(pivot) < SINGULARITY_RTOL * max(scale, 1e-300)

    def inverse(self) -> "SquareMatrix":
        """Gauss-Jordan with partial pivoting; exact in rational mode.

        Raises SingularMatrixError when a pivot vanishes (exact zero test
        in rational mode, |pivot| < SINGULARITY_RTOL * max|entry| in float).
        """
        d = self._dim
        scale = float(self.max_abs()) if self._mode == "float" else 0.0
        aug = [list(r) + [Fraction(int(i == j)) if self._mode == "exact" else float(i == j)
                          for j in range(d)] for i, r in enumerate(self._rows)]
        for c in range(d):
            p = max(range(c, d), key=lambda r: abs(aug[r][c]))
            if self._pivot_is_zero(aug[p][c], scale):
                raise SingularMatrixError(f"singular at column {c}")
            aug[c], aug[p] = aug[p], aug[c]
            piv = aug[c][c]
            aug[c] = [v / piv for v in aug[c]]
            for r in range(d):
                if r != c and aug[r][c] != 0:
                    f = aug[r][c]
                    aug[r] = [v - f * w for v, w in zip(aug[r], aug[c])]
        return SquareMatrix([r[d:] for r in aug], self._mode)

    def det(self) -> Scalar:
        """Determinant via elimination with row swaps; exact in rational mode."""
        d = self._dim
        m = [list(r) for r in self._rows]
        scale = float(self.max_abs()) if self._mode == "float" else 0.0
        sign = 1
        out = Fraction(1) if self._mode == "exact" else 1.0
        for c in range(d):
            p = max(range(c, d), key=lambda r: abs(m[r][c]))
            if self._pivot_is_zero(m[p][c], scale):
                return Fraction(0) if self._mode == "exact" else 0.0
            if p != c:
                m[c], m[p] = m[p], m[c]
                sign = -sign
            out *= m[c][c]
            for r in range(c + 1, d):
                if m[r][c] != 0:
                    f = m[r][c] / m[c][c]
                    m[r] = [v - f * w for v, w in zip(m[r], m[c])]
        return sign * out

    def lu_unit_lower(self) -> tuple["SquareMatrix", "SquareMatrix"]:
        """Doolittle factorization self = lower @ upper, without pivoting.

        lower is unit lower triangular, upper is upper triangular; the
        factorization is unique when it exists.  Raises
        DegeneratePointError when a leading principal minor vanishes.
        """
        d = self._dim
        scale = float(self.max_abs()) if self._mode == "float" else 0.0
        one = Fraction(1) if self._mode == "exact" else 1.0
        zero = Fraction(0) if self._mode == "exact" else 0.0
        low = [[one if i == j else zero for j in range(d)] for i in range(d)]
        up = [list(r) for r in self._rows]
        for c in range(d):
            if self._pivot_is_zero(up[c][c], scale):
                raise DegeneratePointError(f"vanishing leading minor at index {c}")
            for r in range(c + 1, d):
                if up[r][c] != 0:
                    f = up[r][c] / up[c][c]
                    low[r][c] = f
                    up[r] = [v - f * w for v, w in zip(up[r], up[c])]
                    up[r][c] = zero
        return SquareMatrix(low, self._mode), SquareMatrix(up, self._mode)

    def char_poly(self) -> "PolyInLambda":
        """Coefficients of det(lambda*E - self) by Faddeev-LeVerrier."""
        d = self._dim
        ident = SquareMatrix.identity(d, self._mode)
        coeffs = [Fraction(1) if self._mode == "exact" else 1.0]
        m = SquareMatrix.zero(d, self._mode)
        for k in range(1, d + 1):
            m = self @ m + coeffs[-1] * ident
            am = self @ m
            coeffs.append(-am.trace() / k)
        return PolyInLambda(tuple(coeffs))

    # -- serialization -------------------------------------------------------

    def to_json_obj(self):
        return [[format_scalar(v) for v in r] for r in self._rows]

    @classmethod
    def from_json_obj(cls, obj) -> "SquareMatrix":
        return cls([[parse_scalar(v) for v in r] for r in obj])


@dataclass(frozen=True)
class PolyInLambda:
    """Polynomial sum_i coeffs[i] * lambda^(d-i), where d = len(coeffs)-1."""

    coeffs: tuple

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def __call__(self, lam):
        acc = 0
        for c in self.coeffs:
            acc = acc * lam + c
        return acc

    def is_palindromic(self) -> bool:
        return self.coeffs == tuple(reversed(self.coeffs))


def mat_exp(m: SquareMatrix, t: float = 1.0) -> SquareMatrix:
    """exp(t*m) for float-mode matrices, by scaling-and-squaring (scipy)."""
    if m.mode != "float":
        raise ModeError("mat_exp requires a float-mode matrix")
    import numpy as np
    from scipy.linalg import expm

    arr = expm(float(t) * np.array(m.rows, dtype=float))
    return SquareMatrix([[float(v) for v in row] for row in arr], "float")


def interpolate_poly(points: Sequence[tuple]) -> PolyInLambda:
    """Exact polynomial through d+1 (lambda, value) points, highest-degree first.

    Used to read off coefficients of determinant polynomials that are not
    plain characteristic polynomials; exact over rationals.
    """
    d = len(points) - 1
    vand = SquareMatrix(
        [[Fraction(lam) ** (d - j) for j in range(d + 1)] for lam, _ in points])
    rhs = [Fraction(v) for _, v in points]
    inv = vand.inverse()
    coeffs = tuple(sum(inv[i, k] * rhs[k] for k in range(d + 1)) for i in range(d + 1))
    return PolyInLambda(coeffs)
