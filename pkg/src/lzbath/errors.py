"""Exception types shared across the package."""

from __future__ import annotations


class ConfigError(Exception):
    """A run configuration failed schema or physical validation."""


class NumericalError(Exception):
    """A numerical routine failed to reach its requested accuracy.

    Carries enough context to report where the computation stopped and how
    close it got, so CLI users see a diagnostic instead of a bare failure.
    """

    def __init__(self, message: str, *, last_good_time: float | None = None,
                 achieved_tol: float | None = None):
        parts = [message]
        if last_good_time is not None:
            parts.append(f"last good time t={last_good_time!r}")
        if achieved_tol is not None:
            parts.append(f"achieved tolerance {achieved_tol:.3e}")
        super().__init__("; ".join(parts))
        self.last_good_time = last_good_time
        self.achieved_tol = achieved_tol


class FrameMismatchError(ValueError):
    """A density matrix was passed in the wrong reference frame."""


class InvalidStateError(ValueError):
    """A density matrix violated its physical invariants beyond tolerance."""
