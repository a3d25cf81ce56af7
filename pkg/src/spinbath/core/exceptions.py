
class SpinBathError(Exception):
    """Base exception for the spinbath package."""
    pass

class ConfigurationError(SpinBathError):
    """Raised when an experiment configuration is invalid or missing."""
    pass

class CompatibilityError(SpinBathError):
    """Raised when a method/mode combination is not supported (e.g. closed form + multi-qubit)."""
    pass

class DepthLimitError(CompatibilityError):
    """Raised when an exponential-cost oracle is asked for a depth beyond its guard."""
    pass

class ValidationError(SpinBathError):
    """Raised when an operator or state violates a precondition (shape, hermiticity, trace)."""
    pass

class DataFormatError(SpinBathError):
    """Raised when an input CSV does not follow the decay-curve schema."""
    pass

class FitError(SpinBathError):
    """Raised when an objective evaluates to NaN during minimization."""
    pass
