"""Exception types shared across the package."""

__all__ = [
    "NonConvergence",
    "EntropyViolation",
    "CflViolation",
    "SupportDetectionError",
    "QuadratureError",
]


class NonConvergence(RuntimeError):
    """Fixed-point iteration exhausted its step budget."""


class EntropyViolation(RuntimeError):
    """End states are expansive; the discontinuity spreads instead of traveling."""


class CflViolation(RuntimeError):
    """Flux derivative exceeds the unit stencil speed along computed states."""


class SupportDetectionError(RuntimeError):
    """A compactly supported density failed to vanish at the window edges."""


class QuadratureError(RuntimeError):
    """Quadrature refinement check failed to converge."""
