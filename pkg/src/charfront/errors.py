"""Exception taxonomy shared by all solver layers."""


class CharfrontError(Exception):
    """Base class for every error raised by this package."""


class ConfigError(CharfrontError):
    """Invalid run configuration, bad constants, or malformed config file."""


class NumericalError(CharfrontError):
    """Base class for failures of the numerical machinery (CLI exit code 3)."""


class NonPhysicalState(NumericalError):
    """State violates the thermodynamic closure (p <= 0, empty Bernoulli budget, subsonic)."""


class StateOutsideCone(NumericalError):
    """State violates the admissibility margins required for the wave-speed ordering."""


class CurveLeftCone(NumericalError):
    """Wave-curve integration exited the admissibility cone."""


class NoConvergence(NumericalError):
    """A Newton solve failed to reach tolerance within the iteration budget."""


class StatesTooFar(NumericalError):
    """Riemann data outside the configured small-jump neighborhood."""


class DataTooLarge(NumericalError):
    """Initial data exceeds the admissible total-variation budget."""


class NoEvent(CharfrontError):
    """No future front crossing exists; the solution is globally defined onward."""


class BlowUp(NumericalError):
    """Total variation grew past the configured safety factor; data or solver bug."""


class TailMismatch(NumericalError):
    """Two solutions disagree at large eta, so pair functionals would be infinite."""


class OutOfDomain(NumericalError):
    """Requested window leaves the computational domain."""


class BelowBoundary(NumericalError):
    """Point lies below the free boundary, outside the flow region."""


class DegenerateTransform(NumericalError):
    """Mass flux rho*u is not positive, the coordinate map is not invertible."""
