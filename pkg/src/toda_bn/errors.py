"""Exception hierarchy shared by all modules."""


class TodaError(Exception):
    """Base class for all errors raised by this package."""


class ModeError(TodaError):
    """An operation received the wrong scalar mode (exact vs float),
    or an attempt was made to mix modes within one value."""


class SingularMatrixError(TodaError):
    """Matrix inversion hit a vanishing pivot."""


class DegeneratePointError(TodaError):
    """A factorization required by the operation does not exist at this
    input (vanishing Gauss pivot, vanishing denominator, non-generic point)."""


class IndexMismatchError(TodaError):
    """Operands carry different variable counts or incompatible dimensions."""


class ZeroBaseError(TodaError):
    """Evaluation of a Laurent monomial at z_i = 0."""


class UnknownVariableError(TodaError):
    """A variable name outside z_1..z_n, Q_1..Q_n was requested."""


class NotInGammaError(TodaError):
    """A matrix passed to parameter recovery is outside the coordinate
    chart of the phase space (consistency reads disagree)."""


class OutOfChartError(TodaError):
    """A phase point violates the sign conditions of the canonical chart
    (requires all Q_i < 0 and z_i > 0)."""


class StepBlowupError(TodaError):
    """A trajectory left the admissible region |z_i| in [1e-12, 1e12]."""
