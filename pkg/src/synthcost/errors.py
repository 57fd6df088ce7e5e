"""Exception hierarchy shared across the package.

Two families matter downstream: input/validation problems (exit code 1,
HTTP 422) and numerical/computational failures (exit code 2, HTTP 500).
"""


class SynthcostError(Exception):
    """Base class for all package-specific errors."""


class InputError(SynthcostError, ValueError):
    """Caller handed us something malformed; the request itself is bad."""


class ComputationError(SynthcostError, RuntimeError):
    """Inputs were fine but a computation could not be completed."""


# -- input side ---------------------------------------------------------

class InvalidParams(InputError):
    """Alphabet size / run bound out of range, or state space too large."""


class SymbolOutOfRange(InputError):
    """A word contains a symbol outside the alphabet {0, ..., r-1}."""


class InadmissibleWord(InputError):
    """A word violates the run-length constraint where one was required."""


class ShapeMismatch(InputError):
    """A vector does not have the structure the extension step expects."""


class NoSuchEdge(InputError):
    """Asked for a transition the constraint graph does not contain."""


class NotASupersequence(InputError):
    """The reference cannot embed the strand (exhausted or incomplete)."""


class TooLarge(InputError):
    """Problem size exceeds the configured exact-computation limits."""


# -- computation side ---------------------------------------------------

class NoBracket(ComputationError):
    """Root finding could not establish a sign change on the interval."""


class NoConvergence(ComputationError):
    """Iterative eigen-solve did not reach tolerance within the budget."""


class NumericalFailure(ComputationError):
    """A consistency residual came out of tolerance."""


class SingularSystem(ComputationError):
    """A linear system required by an expectation solve is singular."""
