"""Exception and warning types shared across the package."""


class HeckeLabError(Exception):
    pass


class NotASimilitude(HeckeLabError):
    pass


class Singular(HeckeLabError):
    pass


class NumericalBreakdown(HeckeLabError):
    pass


class IterationLimit(HeckeLabError):
    pass


class NotRational(HeckeLabError):
    pass


class DegreeSearchExhausted(HeckeLabError):
    pass


class WitnessVerificationFailed(HeckeLabError):
    pass


class InsufficientSamples(HeckeLabError):
    pass


class PrecisionLoss(HeckeLabError):
    pass


class BudgetExceeded(HeckeLabError):
    pass


class KernelPoint(UserWarning):
    """Emitted when a 2-isogeny is evaluated on its kernel."""


class BoxTooSmall(UserWarning):
    """Emitted when a coefficient box truncates a subgroup enumeration."""
