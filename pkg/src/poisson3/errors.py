"""Exception types raised by the package."""


class Poisson3Error(Exception):
    """Base class for domain errors (CLI exit code 1).

    ``residual`` optionally carries the offending series or form.
    """

    def __init__(self, message: str = "", *, residual=None):
        super().__init__(message)
        self.residual = residual


class ConfigurationError(Poisson3Error):
    """Incompatible truncation orders or bad options."""


class DegreeOverflowError(Poisson3Error, ValueError):
    """A monomial lies outside the requested truncation."""


class NonInvertibleChangeError(Poisson3Error):
    """A coordinate change with singular linear part or a moved origin."""


class PreconditionError(Poisson3Error):
    """Input does not satisfy the hypotheses of the requested operation."""


class NotPoissonError(Poisson3Error):
    """The bracket fails the Jacobi identity at the working order."""


class OutsideTaxonomyError(Poisson3Error):
    """The 1-jet is not covered by the classification."""


class ReductionError(Poisson3Error):
    """A normal-form reduction could not be completed."""


class IntegrabilityError(Poisson3Error):
    """A 1-form w with w ^ dw != 0."""
