"""Exception and warning types raised across the package."""


class OttoError(Exception):
    """Base class for all errors raised by qutrit_otto."""


class ZeroDelta(OttoError):
    """A gap change is exactly zero where a sign or ratio is required."""


class DegenerateRegulator(OttoError):
    """The i-epsilon regulator is not strictly positive."""


class NotThermal(OttoError):
    """The correlator has no associated temperature."""


class QuadratureFailure(OttoError):
    """An integral did not reach the requested tolerance."""


class PerturbativeBreakdown(OttoError):
    """Second-order shifts are too large for perturbation theory to be trusted."""


class GridTooCoarse(OttoError):
    """Richardson estimates on successive grids disagree beyond tolerance."""


class DegenerateClosure(OttoError):
    """The closure normalisation vanishes, so populations are undetermined."""


class NonPositiveResponse(OttoError):
    """A response function that must be positive is not."""


class ExponentOverflow(OttoError):
    """An exponent Omega/T is outside the representable range."""


class ParseError(OttoError):
    """The configuration text is not well formed."""


class ValidationError(OttoError):
    """One or more configuration invariants are violated.

    ``violations`` holds ``(field_path, message)`` pairs, all of them, not
    just the first one encountered.
    """

    def __init__(self, violations):
        self.violations = list(violations)
        lines = [f"{path}: {msg}" for path, msg in self.violations]
        super().__init__("; ".join(lines))


class RectangularDivergenceWarning(UserWarning):
    """Sudden switching makes coherence (and response) integrals regulator dependent."""


class CoherenceResidualWarning(UserWarning):
    """The off-diagonal closure C_I + C_II = 0 is violated beyond threshold."""
