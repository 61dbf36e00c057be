"""Exception types shared across the package."""


class LevyLdpError(Exception):
    """Base class for all package-specific errors."""


class SingularSystem(LevyLdpError):
    """Switching generator is reducible or its deviation system is numerically singular."""


class SolvabilityViolated(LevyLdpError):
    """Poisson-equation right-hand side has a nonzero stationary average."""


class NegativeIntensity(LevyLdpError):
    """Pre-limit construction produced a negative jump intensity at the requested scale."""


class NonPositiveVariance(LevyLdpError):
    """Averaged diffusion coefficient is not strictly positive."""


class DomainError(LevyLdpError):
    """Perturbed test function left its admissible domain (log argument too small)."""


class OverflowGuard(LevyLdpError):
    """An exponent exceeded the safe floating range; the scale pair is too aggressive."""


class BudgetExceeded(LevyLdpError):
    """Expected simulation event count exceeds the configured budget."""


class NoConvergence(LevyLdpError):
    """Iterative solve failed to converge within the iteration limit."""


class DegenerateSample(LevyLdpError):
    """All sample endpoints are identical; moment-based estimates are undefined."""


class ConfigError(LevyLdpError):
    """Model configuration is malformed or violates a structural invariant."""
