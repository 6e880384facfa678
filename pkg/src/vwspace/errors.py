"""Shared exception types.

The CLI maps these onto process exit codes: usage problems exit 2,
resource-cap refusals exit 3, internal inconsistencies exit 4.  A clean
negative verdict (e.g. "no cover exists") is not an error and exits 1.
"""


class VwspaceError(Exception):
    """Base class for errors raised by this package."""


class ValidationError(VwspaceError, ValueError):
    """A value violates a structural precondition (bad index, bad shape...)."""


class FormatError(VwspaceError, ValueError):
    """A text artifact (graph file, trace, transcript...) failed to parse."""


class ResourceCapError(VwspaceError, RuntimeError):
    """An enumeration would exceed a configured cap; raised before starting."""


class InconsistencyError(VwspaceError, RuntimeError):
    """An internal invariant that should be unconditionally true failed.

    Reaching this means a bug, not a negative verdict: e.g. a cover move
    that the supporting lemmas guarantee to exist could not be found.
    """


class GameRuleError(VwspaceError, RuntimeError):
    """A game move violates the rules (e.g. a challenge with the
    component budget already exhausted)."""


class HypothesisError(VwspaceError, ValueError):
    """Structural hypotheses of a construction fail on the given input.

    Carries an itemized report so callers can show which hypothesis broke.
    """

    def __init__(self, message: str, items: list[str] | None = None):
        super().__init__(message)
        self.items = list(items or [])
