"""Multilinear spherical and weighted ball maximal averages: numerics and checks."""

__version__ = "0.1.0"

from .fields import (  # noqa: E402
    BallIndicator,
    Bump,
    Constant,
    FieldTuple,
    Gaussian,
    GridField,
    PowerTail,
    Truncated,
    parse_field,
)
from .operators import (  # noqa: E402
    QuadConfig,
    RingProfile,
    TGrid,
    alpha_average,
    hl_average,
    maximal,
    ring_profile,
    spherical_average,
)

__all__ = [
    "__version__",
    "BallIndicator",
    "Bump",
    "Constant",
    "FieldTuple",
    "Gaussian",
    "GridField",
    "PowerTail",
    "Truncated",
    "parse_field",
    "QuadConfig",
    "RingProfile",
    "TGrid",
    "alpha_average",
    "hl_average",
    "maximal",
    "ring_profile",
    "spherical_average",
]
