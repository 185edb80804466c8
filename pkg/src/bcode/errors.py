"""Exception types shared across the toolkit."""

from __future__ import annotations


class ResourceLimitError(RuntimeError):
    """A requested computation exceeds a configured size budget."""


class ConstructionError(RuntimeError):
    """A randomized construction exhausted its retry or search budget."""

    def __init__(self, message: str, last_tried: int | None = None):
        super().__init__(message)
        self.last_tried = last_tried


class DegenerateEvidenceError(RuntimeError):
    """Every hypothesis assigns probability zero to the observed outputs.

    Raised instead of returning a uniform posterior: zero total evidence
    means the configuration (code, confusions, priors) cannot have produced
    the observation, which the caller needs to see.
    """

    def __init__(self, message: str, diagnostics: dict | None = None):
        super().__init__(message)
        self.diagnostics = diagnostics or {}
