"""Scattering quantum walks that find START -> END paths through star chains."""

__version__ = "0.1.0"

from .errors import (  # noqa: E402
    InsufficientDataError,
    InvalidParameterError,
    NotInvariantError,
    NumericContractError,
)
from .graph import (  # noqa: E402
    StarChainGraph,
    VertexKind,
    build_three_star,
    build_two_star,
    path_edges,
    scatter_coefficients,
)
from .walk import evolve, initial_state, measure, step  # noqa: E402
from .reduced import derive_reduced_matrix, project, reduced_evolve, reduced_model  # noqa: E402
from .spectral import char_poly, exact_spectrum, gamma_pm, p_plus  # noqa: E402
