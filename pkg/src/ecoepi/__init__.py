"""Ecoepidemic predator-prey models with square-root (herd-boundary) disease incidence."""

from .dynamics import (
    BoundednessBound,
    IntegrationSettings,
    Trajectory,
    boundedness_bound,
    integrate,
    verify_bound,
)
from .equilibria import (
    Equilibrium,
    all_equilibria,
    equilibrium_coexistence,
    equilibrium_origin,
    equilibrium_predator_free,
    feasibility_report,
)
from .model import ParameterSet, Variant, jacobian, to_infected_space, vector_field
from .stability import (
    Classification,
    classify_equilibrium,
    locate_transcritical,
    rh_coefficients,
    thresholds,
)

__version__ = "0.1.0"

__all__ = [
    "BoundednessBound",
    "Classification",
    "Equilibrium",
    "IntegrationSettings",
    "ParameterSet",
    "Trajectory",
    "Variant",
    "all_equilibria",
    "boundedness_bound",
    "classify_equilibrium",
    "equilibrium_coexistence",
    "equilibrium_origin",
    "equilibrium_predator_free",
    "feasibility_report",
    "integrate",
    "jacobian",
    "locate_transcritical",
    "rh_coefficients",
    "thresholds",
    "to_infected_space",
    "vector_field",
    "verify_bound",
]
