"""Exception hierarchy shared by all flatwire modules.

The CLI maps these onto exit codes: configuration and validation problems
exit with 2, numerical failures with 3, and I/O errors with 4.
"""

from __future__ import annotations


class FlatwireError(Exception):
    """Base class for all errors raised by this package."""


class ConfigError(FlatwireError):
    """The config document could not be parsed or contains unknown keys."""


class ValidationError(FlatwireError):
    """One or more design invariants are violated.

    ``violations`` holds every violation found, not just the first, as
    ``(field, message)`` pairs where ``field`` is a dotted config path.
    """

    def __init__(self, violations: list[tuple[str, str]]):
        self.violations = list(violations)
        lines = [f"{field}: {message}" for field, message in self.violations]
        super().__init__(
            "invalid design (%d violation%s):\n  %s"
            % (len(lines), "" if len(lines) == 1 else "s", "\n  ".join(lines))
        )


class GeometryError(FlatwireError):
    """Degenerate geometry that cannot be evaluated or meshed."""


class TopologyError(FlatwireError):
    """A reluctance network is disconnected or otherwise unsolvable."""


class NumericalError(FlatwireError):
    """A numerical procedure failed to reach its required tolerance."""


class ExtrapolationError(NumericalError):
    """A tabulated quantity was requested outside its tabulated range."""
