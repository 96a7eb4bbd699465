"""Exception hierarchy shared by every module of the package."""


class BranchRootsError(Exception):
    """Base class for all package errors."""


class InvalidInput(BranchRootsError, ValueError):
    """An argument is malformed: non-finite, zero where forbidden, out of range."""


class DomainError(BranchRootsError, ValueError):
    """The argument lies on a singularity or outside the function's domain."""


class PoleError(DomainError):
    """The argument sits on a pole of a special function."""


class BranchError(BranchRootsError, ValueError):
    """A branch index lies outside the declared range for a term."""


class ConvergenceError(BranchRootsError, ArithmeticError):
    """An internal iteration failed to reach its tolerance within the cap."""


class AccuracyError(BranchRootsError, ArithmeticError):
    """A requested accuracy target cannot be met."""


class UnknownScenario(BranchRootsError, KeyError):
    """The scenario id is not registered."""

    def __str__(self) -> str:
        return f"unknown scenario: {self.args[0]!r}" if self.args else "unknown scenario"
