"""Root enumeration for sums of invertible complex term functions."""

from .errors import (
    AccuracyError,
    BranchError,
    BranchRootsError,
    ConvergenceError,
    DomainError,
    InvalidInput,
    PoleError,
    UnknownScenario,
)

__version__ = "0.1.0"
