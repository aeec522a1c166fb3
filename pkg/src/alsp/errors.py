"""Exception types shared across the toolkit."""


class AlspError(Exception):
    """Base class for all toolkit errors."""


class EmptyInterval(AlspError):
    pass


class LengthMismatch(AlspError):
    pass


class BadMagic(AlspError):
    pass


class VersionMismatch(AlspError):
    pass


class TruncatedPayload(AlspError):
    pass


class MalformedHeader(AlspError):
    pass


class UnorderedTimestamps(AlspError):
    pass


class OutOfRange(AlspError):
    pass


class UnreachableTarget(AlspError):
    pass


class MissingLayer(AlspError):
    pass


class HookFailure(AlspError):
    pass


class AlignmentMismatch(AlspError):
    pass


class EmptyReferenceCorpus(AlspError):
    pass


class TooShort(AlspError):
    pass


class NoQualifyingUnits(AlspError):
    pass


class LengthCountMismatch(AlspError):
    pass


class ZeroVectorWarning(UserWarning):
    """Signals that a cosine was requested against a (near-)zero vector."""
