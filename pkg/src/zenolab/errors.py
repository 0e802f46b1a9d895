"""Exception types shared across the package."""


class GapError(ValueError):
    """The interception map does not have an isolated eigenvalue 1."""


class WindowError(ValueError):
    """A step size falls outside the window where the projector P_t is defined."""


class ConvergenceError(RuntimeError):
    """An iterative numerical routine did not reach its tolerance."""


class SpectralError(RuntimeError):
    """Eigensolver failure or a spectrum too close to an integration contour."""
