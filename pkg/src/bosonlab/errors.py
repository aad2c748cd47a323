"""Exception types shared across the package."""


class BosonlabError(Exception):
    """Base class for all package-specific errors."""


class GridMismatch(BosonlabError):
    """Two objects that must share a grid were built on different grids."""


class ZeroProfile(BosonlabError):
    """An operation received an identically zero profile."""


class NotConverged(BosonlabError):
    """Solver hit the iteration cap before reaching the residual target."""

    def __init__(self, message, solution=None):
        super().__init__(message)
        self.solution = solution


class CollapsedToZero(BosonlabError):
    """Iterate mass dropped below the collapse threshold."""


class NotConvergedInput(BosonlabError):
    """A verification routine was given an unconverged solution."""


class RescaleImpossible(BosonlabError):
    """Canonical rescale undefined because V(0) <= lambda."""


class NotRescaled(BosonlabError):
    """Input profile is not in the canonical normalization V(0) - lambda = 1."""


class QuadratureUnstable(BosonlabError):
    """Assembled operator failed the weighted symmetry tolerance."""


class EigensolverFailure(BosonlabError):
    """Dense eigensolver did not converge."""


class InsufficientSectors(BosonlabError):
    """Sector range excludes l = 1, which the nondegeneracy check requires."""


class ProfilesCoincide(BosonlabError):
    """first_crossing found the two profiles equal to working precision."""


class NoCrossing(BosonlabError):
    """first_crossing found no sign change (inputs are ordered)."""


class ParseError(BosonlabError):
    """Config file could not be parsed; carries a line number."""

    def __init__(self, message, line=None):
        super().__init__(message)
        self.line = line


class ValidationError(BosonlabError):
    """A config field is out of its documented range."""

    def __init__(self, message, field=None):
        super().__init__(message)
        self.field = field


class FormatError(BosonlabError):
    """A persisted artifact is malformed."""


class HashMismatchWarning(UserWarning):
    """Loaded artifact metadata does not match the producing config."""
