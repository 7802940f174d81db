"""Exception types shared across the laboratory."""


class CoblabError(Exception):
    """Base class for package-specific failures."""


class ConfigError(CoblabError):
    """Malformed input or an invalid parameter combination."""


class ShortfallError(CoblabError):
    """A search or selection yielded fewer admissible terms than required."""


class CertificationError(CoblabError):
    """An inequality that should hold mathematically failed to certify.

    Reaching this state signals a precision or bookkeeping bug, not a fact
    about the underlying rotation numbers, so it is kept separate from
    ShortfallError.
    """


class PrecisionCapError(CoblabError):
    """Adaptive precision escalation hit the hard cap without resolving."""
