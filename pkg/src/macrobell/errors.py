"""Exception hierarchy shared across the package.

Every domain error derives from :class:`MacrobellError` so callers (and the
CLI) can distinguish data/validation failures from programming errors.
"""


class MacrobellError(Exception):
    """Base class for all errors raised by this package."""


# --- box construction / validation ---

class BoxValidationError(MacrobellError):
    """A probability table violates one of the box constraints."""


class NegativeEntry(BoxValidationError):
    pass


class RowNotNormalized(BoxValidationError):
    pass


class SignalingDetected(BoxValidationError):
    pass


class BadFamily(MacrobellError):
    """Deterministic-vertex family outside 1..4 or bad output bit."""


class WeightsNotNormalized(MacrobellError):
    pass


class NegativeWeight(MacrobellError):
    pass


class BadParams(MacrobellError):
    """Parameters outside the admissible range for a generator or formula."""


# --- polytope / LP ---

class NotNoSignaling(MacrobellError):
    """Operation requires a no-signaling box but got a signaling table."""


class LpNumericalFailure(MacrobellError):
    """The internal simplex solver did not reach a usable answer."""


# --- macroscopic engine ---

class OddM(BadParams):
    """Closed-form case sums are defined for even copy counts only."""


class TraceTooShort(MacrobellError):
    pass


# --- information causality ---

class OutOfRange(MacrobellError):
    pass


class MismatchDetected(MacrobellError):
    """Two supposedly equivalent evaluation routes disagreed (a bug, not data)."""


# --- CLI ---

class UsageError(MacrobellError):
    pass


class FileError(MacrobellError):
    pass
