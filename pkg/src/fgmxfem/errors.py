"""Exception hierarchy shared by the solver modules and the CLI."""


class FgmXfemError(Exception):
    """Base class for all package errors."""

    exit_code = 1


class DomainError(FgmXfemError, ValueError):
    """An argument lies outside the mathematical domain of an operation."""

    exit_code = 3


class ConfigError(FgmXfemError):
    """Invalid run configuration. ``path`` names the offending field."""

    exit_code = 2

    def __init__(self, message, path=None):
        self.path = path
        super().__init__(f"{path}: {message}" if path else message)


class ModelError(FgmXfemError):
    """The discrete model cannot be built or is degenerate."""

    exit_code = 3


class GeometryError(ModelError):
    """Crack/element geometry could not be resolved."""

    def __init__(self, message, element=None):
        self.element = element
        if element is not None:
            message = f"element {element}: {message}"
        super().__init__(message)


class NumericalError(FgmXfemError):
    """A numerical procedure failed to converge or produced bad values."""

    exit_code = 4


class NearSingularMassError(NumericalError):
    """Cholesky of the mass matrix hit a tiny pivot.

    Usually caused by an enrichment function that is almost linearly
    dependent on the others over its support.
    """

    def __init__(self, dof, pivot, threshold):
        self.dof = dof
        self.pivot = pivot
        self.threshold = threshold
        super().__init__(
            f"mass matrix is near-singular at free dof {dof} "
            f"(pivot {pivot:.3e} <= {threshold:.3e})"
        )
