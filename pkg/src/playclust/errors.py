"""Exception hierarchy.

Every error raised on bad input derives from :class:`PlayclustError`, which is
itself a :class:`ValueError`, so callers can catch broadly or narrowly.
"""


class PlayclustError(ValueError):
    """Base class for all input and domain errors."""


# core / dissim / represent
class InvalidSeries(PlayclustError):
    pass


class ConstantSeries(PlayclustError):
    pass


class FlatDifferences(PlayclustError):
    pass


class LengthMismatch(PlayclustError):
    pass


class EmptySeries(PlayclustError):
    pass


class TooShort(PlayclustError):
    pass


class NonDivisibleLength(PlayclustError):
    pass


class NotNormalized(PlayclustError):
    pass


class ConfigMismatch(PlayclustError):
    pass


class BadLength(PlayclustError):
    pass


class BadConfig(PlayclustError):
    pass


# hcluster / validate
class InvalidMatrix(PlayclustError):
    pass


class BadK(PlayclustError):
    pass


class SingleCluster(PlayclustError):
    pass


class DegenerateMatrix(PlayclustError):
    pass


# cohort / synthgen
class ParseError(PlayclustError):
    def __init__(self, message, line=None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class DuplicateRecord(PlayclustError):
    pass


class EmptyCohort(PlayclustError):
    pass


class MissingAttributes(PlayclustError):
    def __init__(self, subject_ids):
        self.subject_ids = sorted(subject_ids)
        shown = ", ".join(self.subject_ids[:10])
        more = "" if len(self.subject_ids) <= 10 else f" (+{len(self.subject_ids) - 10} more)"
        super().__init__(f"missing attributes for subjects: {shown}{more}")


class BadSpec(PlayclustError):
    pass
