"""Finite-dimensional Ito *-algebras: validation, GNS representation,
Wiener/Poisson splitting, seminorms and path simulation."""

from .algebra import (Element, ItoAlgebraSpec, ValidationReport, Violation, change_basis,
                      functional, involve, multiply, validate)
from .builders import (ThermalInput, VacuumInput, newton, orthogonal_sum, poisson,
                       random_algebra, thermal, vacuum, wiener)
from .errors import *  # noqa: F401,F403
from .io import dumps, load_spec, save_spec, spec_from_dict, spec_to_dict
from .representation import (FundamentalRep, Quadruple, TriangularMatrix, build_rep, convolve,
                             from_matrix, image, metric_adjoint, minkowski_metric, quadruple,
                             to_matrix)
from .seminorms import SeminormReport, boundedness_lower_bound, check_axioms, seminorms
from .simulate import (CanonicalForm, ItoTableCheck, PathBundle, canonical_form, coarsen,
                       ito_table_check, mean_increment, sample_paths)
from .structure import (ClassificationReport, Decomposition, IdealData, classify, decompose,
                        decompose_thermal, decompose_vacuum, is_vacuum, null_ideals,
                        supporting_idempotent)

__version__ = "0.1.0"
