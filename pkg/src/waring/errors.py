"""Exceptions shared across the solver modules."""


class PreconditionError(ValueError):
    """An input violates a documented precondition (wrong degree, form not
    general enough for the requested construction, malformed data)."""


class RejectedSampleError(RuntimeError):
    """A sampled parameter landed on a degenerate configuration.

    Carries a human-readable diagnostic.  Callers either resample or surface
    the rejection (the CLI maps it to exit code 2).
    """
