"""Exception hierarchy shared by the library and the command line."""


class CodingError(Exception):
    """Base class for every error raised by mocodes."""


class InputError(CodingError, ValueError):
    """Invalid caller-supplied data (CLI exit code 1)."""


class NonPositiveProbability(InputError):
    pass


class SumNotOne(InputError):
    pass


class AlphabetTooSmall(InputError):
    pass


class AlphaOutOfRange(InputError):
    pass


class TOutOfRange(InputError):
    pass


class InadmissibleInput(InputError):
    """Length vector violates the Kraft inequality before rounding."""


class KraftViolation(InputError):
    pass


class UnknownSymbol(InputError, KeyError):
    pass


class NoConvergence(CodingError, ArithmeticError):
    """Fixed-point solver failed to reach its residual target (exit code 2)."""


class ContainerError(CodingError):
    """Corrupt or unreadable container / bitstream (exit code 3)."""


class BadMagic(ContainerError):
    pass


class UnsupportedVersion(ContainerError):
    pass


class TruncatedStream(ContainerError):
    pass
