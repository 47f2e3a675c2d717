# klr_lab/core/errors.py

class KLRLabError(Exception):
    """Base error. ``exit_status`` is what the CLI returns when this escapes a task."""

    exit_status = 4

    def __init__(self, detail: str):
        super().__init__(detail)
        self.detail = detail


class ConfigError(KLRLabError):
    """Malformed job config or Cartan data."""

    exit_status = 2


class PreconditionError(KLRLabError):
    """A task was asked for something outside its regime (e.g. non multiplicity-free beta)."""

    exit_status = 3


class RewriteError(KLRLabError):
    """Internal inconsistency: inexact division, runaway reduction, missing leading term."""

    exit_status = 4
