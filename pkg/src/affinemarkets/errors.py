"""Exception and warning types shared across the package."""


class AffineModelError(Exception):
    """Base class for all model errors raised by this package."""


class DomainError(AffineModelError):
    """An exponent lies outside the open moment domain of the process."""


class InvalidTime(AffineModelError):
    """A time argument violates the required ordering or horizon bounds."""


class OdeBlowup(AffineModelError):
    """The transform ODE left the moment domain before the target time."""


class WrongSpec(AffineModelError):
    """An operation received a process family it does not support."""


class Infeasible(AffineModelError):
    """A term-structure fit has no admissible solution."""


class NonmonotoneInput(AffineModelError):
    """Input discount ratios violate the required monotonicity."""


class NotUnimodal(AffineModelError):
    """A root function failed the single-peak assumptions (or the payoff
    region is unbounded)."""


class PoleError(AffineModelError):
    """A transform denominator vanished on the integration contour."""


class ContourError(AffineModelError):
    """No admissible Fourier contour, or the chosen one is inadmissible."""


class OutOfBounds(AffineModelError):
    """An implied-vol target price lies outside the attainable range."""


class LayoutError(AffineModelError):
    """Exponent-layout arrays violate shape or monotonicity constraints."""


class StageInfeasible(AffineModelError):
    """A calibration stage cannot be completed.

    Carries ``stage`` (1-based index) and ``detail``.
    """

    def __init__(self, stage, detail=""):
        self.stage = stage
        self.detail = detail
        super().__init__(f"calibration stage {stage} infeasible: {detail}")


class BudgetExhausted(AffineModelError):
    """The evaluation budget ran out before the objective target was met.

    ``best`` holds the best parameters found, ``objective`` their score.
    """

    def __init__(self, message, best=None, objective=None):
        self.best = best
        self.objective = objective
        super().__init__(message)


class AmbiguousRoots(UserWarning):
    """Both index-fit roots share a sign; the smaller-magnitude one was used."""


class DegenerateVariance(UserWarning):
    """A correlation denominator is zero; the result is NaN."""
