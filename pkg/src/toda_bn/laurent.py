"""Exact multivariate Laurent polynomials in z_1..z_n and Q_1..Q_n.

Exponents of the z variables range over the integers, exponents of the Q
variables over the nonnegative integers (Q only ever enters polynomially).
Coefficients are exact rationals; there is no float variant of this class,
since its whole purpose is to make identity tests exact.

A polynomial is stored as a map from exponent vectors to nonzero rational
coefficients; zero coefficients are never stored, so two polynomials are
equal iff their term maps are equal.  The printed and serialized term
order is graded lexicographic with the z block before the Q block,
highest first.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Mapping, Sequence

from .errors import (
    IndexMismatchError,
    UnknownVariableError,
    ZeroBaseError,
)

ExpKey = tuple  # (z_exponents tuple[int], Q_exponents tuple[int])


def _term_sort_key(key: ExpKey):
    ez, eq = key
    return (-(sum(ez) + sum(eq)), tuple(-e for e in ez), tuple(-e for e in eq))


class LaurentPoly:
    """Immutable Laurent polynomial over Q in 2n variables."""

    __slots__ = ("n", "_terms")

    def __init__(self, n: int, terms: Mapping[ExpKey, Fraction] | None = None):
        if n < 1:
            raise ValueError("need n >= 1")
        self.n = n
        clean: dict[ExpKey, Fraction] = {}
        for (ez, eq), c in (terms or {}).items():
            ez, eq = tuple(ez), tuple(eq)
            if len(ez) != n or len(eq) != n:
                raise IndexMismatchError("exponent vectors must have length n")
            if any(e < 0 for e in eq):
                raise ValueError("Q exponents must be nonnegative")
            c = Fraction(c)
            if c != 0:
                clean[(ez, eq)] = c
        self._terms = clean

    # -- constructors -----------------------------------------------------

    @classmethod
    def zero(cls, n: int) -> "LaurentPoly":
        return cls(n)

    @classmethod
    def constant(cls, n: int, c) -> "LaurentPoly":
        return cls(n, {((0,) * n, (0,) * n): Fraction(c)})

    @classmethod
    def one(cls, n: int) -> "LaurentPoly":
        return cls.constant(n, 1)

    @classmethod
    def monomial(cls, n: int, zexp: Sequence[int], qexp: Sequence[int], c=1) -> "LaurentPoly":
        return cls(n, {(tuple(zexp), tuple(qexp)): Fraction(c)})

    @classmethod
    def z_var(cls, n: int, i: int, power: int = 1) -> "LaurentPoly":
        """z_i^power, 1-based i."""
        if not 1 <= i <= n:
            raise UnknownVariableError(f"z_{i} with n={n}")
        ez = [0] * n
        ez[i - 1] = power
        return cls.monomial(n, ez, [0] * n)

    @classmethod
    def q_var(cls, n: int, i: int, power: int = 1) -> "LaurentPoly":
        """Q_i^power, 1-based i."""
        if not 1 <= i <= n:
            raise UnknownVariableError(f"Q_{i} with n={n}")
        eq = [0] * n
        eq[i - 1] = power
        return cls.monomial(n, [0] * n, eq)

    # -- accessors ----------------------------------------------------------

    @property
    def terms(self) -> Mapping[ExpKey, Fraction]:
        return self._terms

    def is_zero(self) -> bool:
        return not self._terms

    def sorted_terms(self):
        return sorted(self._terms.items(), key=lambda kv: _term_sort_key(kv[0]))

    def __eq__(self, other):
        if isinstance(other, LaurentPoly):
            return self.n == other.n and self._terms == other._terms
        if isinstance(other, (int, Fraction)):
            return self == LaurentPoly.constant(self.n, other)
        return NotImplemented

    def __hash__(self):
        return hash((self.n, frozenset(self._terms.items())))

    # -- ring operations ------------------------------------------------------

    def _coerce(self, other) -> "LaurentPoly":
        if isinstance(other, LaurentPoly):
            if other.n != self.n:
                raise IndexMismatchError(f"variable counts differ: {self.n} vs {other.n}")
            return other
        if isinstance(other, (int, Fraction)):
            return LaurentPoly.constant(self.n, other)
        raise TypeError(f"cannot combine LaurentPoly with {type(other).__name__}")

    def __add__(self, other):
        other = self._coerce(other)
        terms = dict(self._terms)
        for k, c in other._terms.items():
            s = terms.get(k, Fraction(0)) + c
            if s == 0:
                terms.pop(k, None)
            else:
                terms[k] = s
        return LaurentPoly(self.n, terms)

    __radd__ = __add__

    def __neg__(self):
        return LaurentPoly(self.n, {k: -c for k, c in self._terms.items()})

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) + (-self)

    def __mul__(self, other):
        other = self._coerce(other)
        out: dict[ExpKey, Fraction] = {}
        for (ez1, eq1), c1 in self._terms.items():
            for (ez2, eq2), c2 in other._terms.items():
                key = (tuple(a + b for a, b in zip(ez1, ez2)),
                       tuple(a + b for a, b in zip(eq1, eq2)))
                s = out.get(key, Fraction(0)) + c1 * c2
                if s == 0:
                    out.pop(key, None)
                else:
                    out[key] = s
        return LaurentPoly(self.n, out)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        if k < 0:
            raise ValueError("negative powers not supported; invert monomials explicitly")
        out = LaurentPoly.one(self.n)
        for _ in range(k):
            out = out * self
        return out

    # -- calculus / evaluation ------------------------------------------------

    def evaluate(self, z: Sequence, Q: Sequence | None = None):
        """Exact value at z = (z_1..z_n), Q = (Q_1..Q_n).

        Also accepts a single object with ``.z`` and ``.Q`` attributes.
        Raises ZeroBaseError when some z_i vanishes.
        """
        if Q is None:
            z, Q = z.z, z.Q
        if len(z) != self.n or len(Q) != self.n:
            raise IndexMismatchError("point size does not match variable count")
        if any(v == 0 for v in z):
            raise ZeroBaseError("evaluation requires all z_i != 0")
        acc = None
        for (ez, eq), c in self._terms.items():
            term = c
            for base, e in zip(z, ez):
                if e:
                    term = term * base ** e
            for base, e in zip(Q, eq):
                if e:
                    term = term * base ** e
            acc = term if acc is None else acc + term
        if acc is None:
            return Fraction(0) if all(isinstance(v, (int, Fraction)) for v in z) else 0.0
        return acc

    def partial_derivative(self, var: str) -> "LaurentPoly":
        """Formal derivative with respect to "z<i>" or "Q<i>" (1-based)."""
        kind, idx = _parse_var(var, self.n)
        out: dict[ExpKey, Fraction] = {}
        for (ez, eq), c in self._terms.items():
            if kind == "z":
                e = ez[idx]
                if e == 0:
                    continue
                nez = list(ez)
                nez[idx] = e - 1
                key = (tuple(nez), eq)
            else:
                e = eq[idx]
                if e == 0:
                    continue
                neq = list(eq)
                neq[idx] = e - 1
                key = (ez, tuple(neq))
            s = out.get(key, Fraction(0)) + c * e
            if s == 0:
                out.pop(key, None)
            else:
                out[key] = s
        return LaurentPoly(self.n, out)

    def substitute_q_zero(self) -> "LaurentPoly":
        """The specialization Q_1 = ... = Q_n = 0 (drop terms with Q factors)."""
        return LaurentPoly(
            self.n, {k: c for k, c in self._terms.items() if not any(k[1])})

    # -- presentation -----------------------------------------------------------

    def __str__(self):
        if not self._terms:
            return "0"
        parts = []
        for (ez, eq), c in self.sorted_terms():
            factors = [f"z{i + 1}^{e}" for i, e in enumerate(ez) if e]
            factors += [f"Q{i + 1}^{e}" for i, e in enumerate(eq) if e]
            parts.append(f"{c} * " + " ".join(factors) if factors else f"{c}")
        return " + ".join(parts)

    __repr__ = __str__

    def to_json_obj(self):
        return {
            "n": self.n,
            "terms": [{"z": list(ez), "Q": list(eq), "c": str(c)}
                      for (ez, eq), c in self.sorted_terms()],
        }

    @classmethod
    def from_json_obj(cls, obj) -> "LaurentPoly":
        return cls(obj["n"],
                   {(tuple(t["z"]), tuple(t["Q"])): Fraction(t["c"]) for t in obj["terms"]})


def _parse_var(var: str, n: int) -> tuple[str, int]:
    if isinstance(var, str) and len(var) >= 2 and var[0] in ("z", "Q"):
        try:
            i = int(var[1:])
        except ValueError:
            raise UnknownVariableError(f"bad variable name {var!r}")
        if 1 <= i <= n:
            return var[0], i - 1
    raise UnknownVariableError(f"unknown variable {var!r} for n={n}")


def poly_matrix_product(a: Sequence[Sequence[LaurentPoly]],
                        b: Sequence[Sequence[LaurentPoly]]) -> list[list[LaurentPoly]]:
    """Product of two square matrices with LaurentPoly entries."""
    d = len(a)
    n = a[0][0].n
    zero = LaurentPoly.zero(n)
    out = []
    for i in range(d):
        row = []
        for j in range(d):
            acc = zero
            for k in range(d):
                if not a[i][k].is_zero() and not b[k][j].is_zero():
                    acc = acc + a[i][k] * b[k][j]
            row.append(acc)
        out.append(row)
    return out
