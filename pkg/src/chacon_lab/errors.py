"""Exception hierarchy shared by all chacon_lab modules."""


class ChaconError(Exception):
    """Base class for errors raised by chacon_lab."""


class OutsideTowerError(ChaconError, ValueError):
    """A point or level index lies outside the requested tower."""


class DepthError(ChaconError, ValueError):
    """A depth beyond the geometry's ``max_depth`` (or below 0) was requested."""


class DepthExhaustedError(ChaconError):
    """An orbit step needs a tower deeper than ``max_depth``."""


class NoPreimageError(DepthExhaustedError):
    """T^{-1} is undefined: 0 is not in the image of T."""


class InadmissibleTauError(ChaconError, ValueError):
    """A refinement tuple is neither central nor corner."""


class TailExhaustedError(ChaconError):
    """A truncated family was asked for a transition beyond its prefix."""


class InconsistentFamilyError(ChaconError, ValueError):
    """A family of diagonals fails a consistency requirement."""


class PreconditionError(ChaconError, ValueError):
    """An operation was called outside its documented domain."""


class WindowError(ChaconError):
    """A scan window is too short to contain the requested crossings."""
