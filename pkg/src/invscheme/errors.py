"""Exception types shared across the package."""


class DomainError(ValueError):
    """An input lies outside the domain of a formula (zero denominator, u_yy <= 0, ...)."""


class DegenerateMeshError(ValueError):
    """Mesh coordinates violate the non-degeneracy conditions."""


class StencilError(IndexError):
    """A stencil reaches past the edge of the mesh."""


class DivergenceError(ArithmeticError):
    """A nonlinear solve or marching step failed to produce a finite value."""

    def __init__(self, message, index=None):
        super().__init__(message)
        self.index = index
