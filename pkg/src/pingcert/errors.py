"""Exception types shared by every module."""


class PingcertError(Exception):
    """Base class.  ``stage`` names the pipeline stage that raised, if known."""

    stage = None

    def __init__(self, message, stage=None):
        super().__init__(message)
        if stage is not None:
            self.stage = stage

    def __str__(self):
        msg = super().__str__()
        return f"[{self.stage}] {msg}" if self.stage else msg


class InvalidInput(PingcertError, ValueError):
    """Structurally or mathematically malformed input."""


class TranslationRankZero(InvalidInput):
    def __init__(self, message="translation rank 0", stage=None):
        super().__init__(message, stage)


class IntervalContainsZero(PingcertError, ZeroDivisionError):
    """Interval division by an interval meeting 0; subdivide and retry."""


class BudgetExhausted(PingcertError):
    """A bounded search ran out of budget before finishing."""

    def __init__(self, message, length=None):
        super().__init__(message)
        self.length = length


def tag_stage(stage):
    """Decorator attaching a stage tag to any PingcertError that escapes."""
    import functools

    def deco(fn):
        @functools.wraps(fn)
        def wrapper(*args, **kwargs):
            try:
                return fn(*args, **kwargs)
            except PingcertError as exc:
                if exc.stage is None:
                    exc.stage = stage
                raise
        return wrapper
    return deco
