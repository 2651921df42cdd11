"""Exception hierarchy for the ecoepi package."""


class EcoepiError(Exception):
    """Base class for all errors raised by ecoepi."""


class NumericalError(EcoepiError):
    """A computation could not be completed to the requested accuracy."""


class DegenerateDenominator(NumericalError):
    """The closed-form coexistence equilibrium has a vanishing denominator."""


class InconsistentVerdict(NumericalError):
    """Eigenvalue and Routh-Hurwitz stability verdicts disagree."""


class NoExchange(NumericalError):
    """No stability exchange could be verified at a transcritical threshold."""


class StepSizeUnderflow(NumericalError):
    """The adaptive integrator could not meet its tolerance."""


class NonFiniteState(NumericalError):
    """The integrated state overflowed or became NaN."""


class InsufficientPeaks(EcoepiError):
    """A signal component has too few peaks to estimate an amplitude trend."""


class ConfigError(EcoepiError):
    """A scenario configuration file is malformed or incomplete."""

    def __init__(self, message, path=None, line=None, key=None):
        self.path = path
        self.line = line
        self.key = key
        where = []
        if path is not None:
            where.append(str(path))
        if line is not None:
            where.append(f"line {line}")
        if key is not None:
            where.append(f"key '{key}'")
        prefix = ", ".join(where) + ": " if where else ""
        super().__init__(prefix + message)
