"""Interpolatory subdivision with a nonlinear 4-point rule that reproduces conics.

The rule picks its tension from the data, so samples of lines, parabolas,
circles, ellipses and hyperbolas are refined exactly without knowing which
conic they come from.
"""

__version__ = "0.1.0"

from .exceptions import (  # noqa: E402
    IndeterminatePhiError,
    InsufficientDataError,
    InvalidSpaceError,
    NotApplicableError,
    RuleDomainError,
    SubdivisionError,
)
from .sequence import (  # noqa: E402
    BoundaryPolicy,
    RefinableSequence,
    Topology,
    abscissae,
    divided_difference,
    forward_difference,
    sup_norm,
)
from .linear import (  # noqa: E402
    T11,
    T22,
    FrequencyParameter,
    Mask,
    annihilation_residual,
    gamma_level_coefficient,
    orthogonal_rule,
    phi,
    refine_mask,
    refine_T_gamma,
)
from .nonlinear import (  # noqa: E402
    EpsilonParameter,
    gamma_eps,
    gamma_eps_diff,
    h_ratio,
    psi,
    refine_R,
    refine_S_eps,
    refine_S_eps_diff,
)
from .schemes import SchemeDescriptor, subdivide  # noqa: E402
from .estimators import SubdivisionRefiner  # noqa: E402

__all__ = [
    "__version__",
    "SubdivisionError", "InsufficientDataError", "IndeterminatePhiError", "InvalidSpaceError",
    "RuleDomainError", "NotApplicableError",
    "BoundaryPolicy", "RefinableSequence", "Topology",
    "abscissae", "divided_difference", "forward_difference", "sup_norm",
    "T11", "T22", "FrequencyParameter", "Mask", "annihilation_residual",
    "gamma_level_coefficient", "orthogonal_rule", "phi", "refine_mask", "refine_T_gamma",
    "EpsilonParameter", "gamma_eps", "gamma_eps_diff", "h_ratio", "psi",
    "refine_R", "refine_S_eps", "refine_S_eps_diff",
    "SchemeDescriptor", "subdivide", "SubdivisionRefiner",
]
