"""Exception hierarchy shared by the library and the CLI."""


class CenterShadowError(Exception):
    """Base class for all library errors."""


class NotUnimodular(CenterShadowError, ValueError):
    pass


class NotHyperbolic(CenterShadowError, ValueError):
    pass


class InvalidConstants(CenterShadowError, ValueError):
    pass


class TooFar(CenterShadowError, ValueError):
    """Two objects are farther apart than the radius an operation relies on."""


class WrongModel(CenterShadowError, ValueError):
    pass


class BudgetExceeded(CenterShadowError, ValueError):
    """The pseudo-orbit jump size violates the epsilon budget for the requested eta."""


class DecorationMismatch(CenterShadowError, ValueError):
    pass


class NotPeriodic(CenterShadowError, ValueError):
    pass


class NoPeriodicLeafFound(CenterShadowError, RuntimeError):
    pass


class MalformedSequence(CenterShadowError, ValueError):
    pass


class InvalidPseudoOrbit(CenterShadowError, ValueError):
    pass
