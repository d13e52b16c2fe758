"""Continuous flow of the chain in its three equivalent presentations.

* Lax form:      dL/dt = [L, pi_plus(L)];
* coordinates:   rational ODEs for (z_i, Q_i) with boundary conventions
                 Q_0 = z_0 = 0;
* Hamiltonian:   u' = {u, H} with H = F_1 = tr L and the log-canonical
                 bracket {Q_i, z_i} = Q_i z_i, {Q_i, z_{i+1}} = -Q_i z_{i+1}.

A canonical chart (q, p) with Q_i = -exp(q_i - q_{i+1}), q_{n+1} = 0 and
q_0 = -infinity turns the bracket into the standard one and H into the
type-B relativistic Toda Hamiltonian 2 sum_i cosh(p_i) sqrt(...) sqrt(...).

Numerical integration is fixed-step RK4 in the (z, Q) chart, where the
right-hand side is rational; the exact factorization solution
L(t) = a(t) L0 a(t)^{-1} with exp(L0 t) = a^{-1} b provides an
independent route for cross-checking trajectories.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .conserved import MAX_SYMBOLIC_RANK, conserved_values, conserved_values_by_path
from .errors import ModeError, OutOfChartError, StepBlowupError
from .lax import PhasePoint, build_lax, parameters_from_lax
from .linalg import SquareMatrix, mat_exp
from .splitting import factor_plus_minus, project

#: Trajectories must keep every |z_i| inside this window.
Z_WINDOW = (1e-12, 1e12)


@dataclass(frozen=True)
class CanonicalPoint:
    """Canonical coordinates (q_1..q_n, p_1..p_n) of the real chart."""

    q: tuple
    p: tuple

    def __post_init__(self):
        if len(self.q) != len(self.p) or not self.q:
            raise ValueError("q and p must be nonempty and of equal length")
        object.__setattr__(self, "q", tuple(float(v) for v in self.q))
        object.__setattr__(self, "p", tuple(float(v) for v in self.p))
        if not all(math.isfinite(v) for v in (*self.q, *self.p)):
            raise ValueError("coordinates must be finite")

    @property
    def n(self) -> int:
        return len(self.q)


@dataclass(frozen=True)
class Trajectory:
    """Fixed-step trajectory with per-state conserved-quantity drift."""

    times: tuple
    states: tuple
    drifts: tuple  # max_i |F_i(t) - F_i(0)| / max(1, |F_i(0)|)

    @property
    def max_drift(self) -> float:
        return max(self.drifts)

    @property
    def endpoint(self) -> PhasePoint:
        return self.states[-1]


def lax_rhs(L: SquareMatrix) -> SquareMatrix:
    """Right-hand side [L, pi_plus(L)] of the Lax equation."""
    return L.commutator(project(L).plus)


def hamilton_rhs(x: PhasePoint) -> tuple[tuple, tuple]:
    """Time derivatives (dQ, dz) of the coordinates.

    For 1 <= i < n (with Q_0 = 0, and the z_0 term absent):

        Q_i'/Q_i = -(1-Q_{i-1}) z_i^{-1} + (1-Q_i)(z_i + z_{i+1}^{-1})
                   - (1-Q_{i+1}) z_{i+1}
        z_i'/z_i = Q_i (z_i + z_{i+1}^{-1}) - Q_{i-1} (z_{i-1} + z_i^{-1})

    and at the boundary i = n:

        Q_n'/Q_n = (1-Q_n) z_n - (1-Q_{n-1}) z_n^{-1}
        z_n'/z_n = Q_n z_n - Q_{n-1} (z_{n-1} + z_n^{-1})
    """
    n, z, Q = x.n, x.z, x.Q
    zero = Fraction(0) if x.mode == "exact" else 0.0
    Qb = (zero,) + Q  # Q_0 = 0
    dQ = []
    dz = []
    for i in range(1, n + 1):
        if i < n:
            rate = (-(1 - Qb[i - 1]) / z[i - 1]
                    + (1 - Qb[i]) * (z[i - 1] + 1 / z[i])
                    - (1 - Qb[i + 1]) * z[i])
        else:
            rate = (1 - Qb[n]) * z[n - 1] - (1 - Qb[n - 1]) / z[n - 1]
        dQ.append(Qb[i] * rate)
    for i in range(1, n + 1):
        right = Qb[i] * ((z[i - 1] + 1 / z[i]) if i < n else z[n - 1])
        left = zero
        if i >= 2:
            left = Qb[i - 1] * (z[i - 2] + 1 / z[i - 1])
        dz.append(z[i - 1] * (right - left))
    return tuple(dQ), tuple(dz)


def poisson_structure(x: PhasePoint) -> SquareMatrix:
    """Structure matrix Pi over u = (Q_1..Q_n, z_1..z_n) at x.

    Pi[a, b] = {u_a, u_b}; the bracket of two functions is grad(f) . Pi . grad(g).
    """
    n = x.n
    zero = Fraction(0) if x.mode == "exact" else 0.0
    rows = [[zero] * (2 * n) for _ in range(2 * n)]
    for i in range(n):
        rows[i][n + i] = x.Q[i] * x.z[i]
        rows[n + i][i] = -rows[i][n + i]
        if i + 1 < n:
            rows[i][n + i + 1] = -x.Q[i] * x.z[i + 1]
            rows[n + i + 1][i] = -rows[i][n + i + 1]
    return SquareMatrix(rows, x.mode)


def hamiltonian(x: PhasePoint):
    """H = F_1 = tr L = sum_i (1-Q_i) z_i + sum_i (1-Q_{i-1}) z_i^{-1}."""
    zero = Fraction(0) if x.mode == "exact" else 0.0
    Qb = (zero,) + x.Q
    return (sum(((1 - x.Q[i]) * x.z[i]) for i in range(x.n))
            + sum((1 - Qb[i]) / x.z[i] for i in range(x.n)))


# -- canonical chart ---------------------------------------------------------


def _chart_exponentials(q: Sequence[float]) -> list[float]:
    """E_i = exp(q_i - q_{i+1}) for i = 0..n with q_0 = -inf, q_{n+1} = 0.

    E_0 is literally 0 (never a large-negative-exponent approximation).
    """
    n = len(q)
    E = [0.0]
    for i in range(1, n + 1):
        nxt = q[i] if i < n else 0.0
        E.append(math.exp(q[i - 1] - nxt))
    return E


def to_phase(c: CanonicalPoint) -> PhasePoint:
    """Chart map: Q_i = -E_i, z_i = exp(p_i) sqrt((1+E_{i-1})/(1+E_i))."""
    n = c.n
    E = _chart_exponentials(c.q)
    Q = tuple(-E[i] for i in range(1, n + 1))
    z = tuple(math.exp(c.p[i - 1]) * math.sqrt((1 + E[i - 1]) / (1 + E[i]))
              for i in range(1, n + 1))
    return PhasePoint(n, z, Q)


def from_phase(x: PhasePoint) -> CanonicalPoint:
    """Inverse chart map; requires all Q_i < 0 and z_i > 0."""
    xf = x.to_float()
    if any(q >= 0 for q in xf.Q) or any(z <= 0 for z in xf.z):
        raise OutOfChartError("canonical chart needs Q_i < 0 and z_i > 0")
    n = x.n
    q = [0.0] * (n + 1)  # q[n] is the convention q_{n+1} = 0
    for i in range(n - 1, -1, -1):
        nxt = q[i + 1] if i + 1 < n else 0.0
        q[i] = math.log(-xf.Q[i]) + nxt
    q = q[:n]
    E = _chart_exponentials(q)
    p = tuple(math.log(xf.z[i - 1]) - 0.5 * math.log((1 + E[i - 1]) / (1 + E[i]))
              for i in range(1, n + 1))
    return CanonicalPoint(tuple(q), p)


def hamiltonian_canonical(c: CanonicalPoint) -> float:
    """H = 2 sum_i cosh(p_i) sqrt(1+E_{i-1}) sqrt(1+E_i) on the chart."""
    E = _chart_exponentials(c.q)
    return 2 * sum(math.cosh(c.p[i - 1]) * math.sqrt(1 + E[i - 1]) * math.sqrt(1 + E[i])
                   for i in range(1, c.n + 1))


def chart_brackets(c: CanonicalPoint):
    """Coordinate brackets induced by the canonical chart, via analytic Jacobians.

    Returns (QQ, Qz, zz) with QQ[i][j] = {Q_i, Q_j} etc., computed from
    {f, g} = sum_k (df/dq_k dg/dp_k - df/dp_k dg/dq_k).  Q depends only on
    q and dz_j/dp_k = delta_jk z_j, so only d/dq Jacobians are needed.
    """
    n = c.n
    x = to_phase(c)
    E = _chart_exponentials(c.q)
    dQdq = [[0.0] * n for _ in range(n)]
    for i in range(1, n + 1):
        dQdq[i - 1][i - 1] = x.Q[i - 1]
        if i < n:
            dQdq[i - 1][i] = -x.Q[i - 1]
    dlogzdq = [[0.0] * n for _ in range(n)]
    for j in range(1, n + 1):
        lo = E[j - 1] / (1 + E[j - 1])
        hi = E[j] / (1 + E[j])
        if j >= 2:
            dlogzdq[j - 1][j - 2] = 0.5 * lo
        dlogzdq[j - 1][j - 1] = -0.5 * lo - 0.5 * hi
        if j < n:
            dlogzdq[j - 1][j] = 0.5 * hi
    QQ = [[0.0] * n for _ in range(n)]
    Qz = [[dQdq[i][j] * x.z[j] for j in range(n)] for i in range(n)]
    zz = [[dlogzdq[i][j] * x.z[i] * x.z[j] - x.z[i] * dlogzdq[j][i] * x.z[j]
           for j in range(n)] for i in range(n)]
    return QQ, Qz, zz


# -- numerical flow -----------------------------------------------------------


def _rhs_vector(n: int, state: tuple) -> tuple:
    x = PhasePoint(n, state[:n], state[n:])
    dQ, dz = hamilton_rhs(x)
    return tuple(dz) + tuple(dQ)


def _rk4_step(n: int, state: tuple, h: float) -> tuple:
    k1 = _rhs_vector(n, state)
    k2 = _rhs_vector(n, tuple(s + 0.5 * h * k for s, k in zip(state, k1)))
    k3 = _rhs_vector(n, tuple(s + 0.5 * h * k for s, k in zip(state, k2)))
    k4 = _rhs_vector(n, tuple(s + h * k for s, k in zip(state, k3)))
    return tuple(s + h / 6.0 * (a + 2 * b + 2 * c + d)
                 for s, a, b, c, d in zip(state, k1, k2, k3, k4))


def _check_window(n: int, state: tuple, t: float):
    for i in range(n):
        if not (Z_WINDOW[0] <= abs(state[i]) <= Z_WINDOW[1]):
            raise StepBlowupError(f"|z_{i + 1}| left {Z_WINDOW} at t={t}")


def rk4_endpoint(x0: PhasePoint, T: float, h: float) -> PhasePoint:
    """Endpoint of the RK4 flow, without trajectory or drift bookkeeping."""
    if x0.mode != "float":
        raise ModeError("integration runs in float mode")
    if h <= 0:
        raise ValueError("need h > 0")
    n = x0.n
    state = tuple(x0.z) + tuple(x0.Q)
    steps = max(0, round(T / h))
    for k in range(steps):
        state = _rk4_step(n, state, h)
        _check_window(n, state, (k + 1) * h)
    return PhasePoint(n, state[:n], state[n:])


def integrate(x0: PhasePoint, T: float, h: float = 1e-3, scheme: str = "rk4") -> Trajectory:
    """Classical fixed-step RK4 flow from x0 over [0, T].

    The returned trajectory stores every accepted state together with the
    relative drift of the conserved quantities against their initial
    values.  Raises StepBlowupError when a |z_i| leaves Z_WINDOW.
    """
    if scheme != "rk4":
        raise ValueError("rk4 is the only supported scheme")
    if x0.mode != "float":
        raise ModeError("integration runs in float mode")
    if h <= 0:
        raise ValueError("need h > 0")
    n = x0.n
    # Drift diagnostics evaluate the polynomial form of the F_i where it is
    # available: the float charpoly recurrence carries a roundoff floor of
    # ~1e-9 at moderate amplitudes, which would mask the integrator error.
    # The two routes are exactly equal; see the verification suite.
    values = (conserved_values_by_path if n <= MAX_SYMBOLIC_RANK
              else conserved_values)
    f0 = values(x0)
    scales = [max(1.0, abs(f)) for f in f0]

    def drift_of(x: PhasePoint) -> float:
        f = values(x)
        return max(abs(a - b) / s for a, b, s in zip(f, f0, scales))

    times = [0.0]
    states = [x0]
    drifts = [0.0]
    state = tuple(x0.z) + tuple(x0.Q)
    steps = max(0, round(T / h))
    for k in range(1, steps + 1):
        state = _rk4_step(n, state, h)
        _check_window(n, state, k * h)
        x = PhasePoint(n, state[:n], state[n:])
        times.append(k * h)
        states.append(x)
        drifts.append(drift_of(x))
    return Trajectory(tuple(times), tuple(states), tuple(drifts))


def flow_conjugations(x0: PhasePoint, t: float) -> tuple[SquareMatrix, SquareMatrix]:
    """The two factorization expressions a L0 a^{-1} and b L0 b^{-1} of L(t).

    exp(L0 t) is split as a^{-1} b with a in G_plus and b in G_minus; the
    two conjugations agree up to roundoff and both solve the Lax equation.
    """
    if x0.mode != "float":
        raise ModeError("the factorization flow runs in float mode")
    L0 = build_lax(x0)
    X = mat_exp(L0, t)
    Mp, Kinv = factor_plus_minus(X)  # X = Mp @ Kinv, a = Mp^{-1}, b = Kinv
    a = Mp.inverse()
    b = Kinv
    return a @ L0 @ a.inverse(), b @ L0 @ b.inverse()


def exact_flow(x0: PhasePoint, t: float) -> PhasePoint:
    """Phase point at time t through the factorization solution."""
    La, _ = flow_conjugations(x0, t)
    return parameters_from_lax(La)
