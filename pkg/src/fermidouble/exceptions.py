"""Error types shared across the toolkit."""


class ToolkitError(Exception):
    """Base class for all toolkit errors."""


class InvalidInputError(ToolkitError, ValueError):
    """Matrix or state input violates a structural requirement."""


class InvalidParameterError(ToolkitError, ValueError):
    """Scalar parameter outside its admissible range."""


class InvalidSizeError(InvalidParameterError):
    """Lattice or subset size too small (or wrong parity) to be meaningful."""


class GaplessInputError(ToolkitError):
    """Spectral gap below the requested floor; dependent quantities are ill-conditioned."""


class UnsupportedModelError(ToolkitError):
    """Operation requires a model class the input does not belong to."""


class ImpureStateError(ToolkitError):
    """Covariance matrix too far from a pure Gaussian state."""


class CapacityError(ToolkitError):
    """Requested dense computation exceeds the size ceiling."""


class ConfigurationError(ToolkitError):
    """Experiment configuration is structurally invalid."""


class FitUndefinedError(ToolkitError):
    """Not enough support points for a meaningful fit."""
