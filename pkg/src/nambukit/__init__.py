"""Exact Nambu brackets, identity residuals and Nambu-flow integration."""

from .bracket import (
    FROM_G,
    FROM_H,
    LEVI_CIVITA,
    NambuSystem,
    PoissonMatrixSet,
    nambu_bracket,
    noncanonical_bracket,
    poisson_matrices,
)
from .dynamics import (
    IntegrationError,
    IntegratorConfig,
    Trajectory,
    VectorField,
    conservation_drift,
    divergence,
    integrate,
    vector_field,
)
from .expr import ParseError, Polynomial, SpaceError, Symbol, VariableSpace, differentiate, evaluate, parse
from .identity import (
    ResidualReport,
    check_decoupled,
    check_poisson_condition,
    fi_residual,
    fi_residual_closed_form,
    jacobi_pair_residual_closed_form,
    jacobi_residual,
)
from .models import build_model, verify_model

__version__ = "0.1.0"
