"""Exception types raised across the sieve pipeline."""


class QSError(Exception):
    """Base class for all errors raised by this package."""


class OutOfDomain(QSError, ValueError):
    pass


class NonResidue(QSError, ValueError):
    pass


class PrimeDividesN(QSError):
    """A factor-base candidate divides the number being factored.

    This is not really a failure: ``p`` is a factor of N and callers are
    expected to short-circuit with it.
    """

    def __init__(self, p: int):
        super().__init__(f"{p} divides N")
        self.p = p


class TooSmall(QSError, ValueError):
    pass


class ShardTooLarge(QSError, ValueError):
    pass


class NotASquare(QSError):
    """A supposed dependency does not produce even exponents (corrupt input)."""


class ParseError(QSError, ValueError):
    def __init__(self, path, lineno: int, message: str):
        super().__init__(f"{path}:{lineno}: {message}")
        self.path = path
        self.lineno = lineno


class SieveExhausted(QSError):
    def __init__(self, message: str, stats=None):
        super().__init__(message)
        self.stats = stats
