"""Singularities of Poisson structures on R^3 and their one-parameter bifurcations.

Families are exact jets with rational coefficients (see :mod:`poisson3.jets`);
the reductions in :mod:`poisson3.normal_form` bring them to normal forms,
:mod:`poisson3.classifier` assigns the singularity class and
:mod:`poisson3.bifurcation` predicts and checks bifurcation scenarios.
"""

from .errors import (ConfigurationError, DegreeOverflowError, IntegrabilityError,
                     NonInvertibleChangeError, NotPoissonError, OutsideTaxonomyError,
                     Poisson3Error, PreconditionError, ReductionError)
from .jets import CoordinateChange, DifferentialObject, TruncatedSeries
from .poisson import (PfaffianEquation, PoissonFamily, curl, from_fg, from_pfaffian, from_planar,
                      jacobi_residual, lie_1jet, lie_symmetry_residual, pushforward, to_pfaffian)

__version__ = "0.1.0"

__all__ = ["ConfigurationError", "CoordinateChange", "DegreeOverflowError", "DifferentialObject",
           "IntegrabilityError", "NonInvertibleChangeError", "NotPoissonError",
           "OutsideTaxonomyError", "PfaffianEquation", "Poisson3Error", "PoissonFamily",
           "PreconditionError", "ReductionError", "TruncatedSeries", "curl", "from_fg",
           "from_pfaffian", "from_planar", "jacobi_residual", "lie_1jet",
           "lie_symmetry_residual", "pushforward", "to_pfaffian"]
