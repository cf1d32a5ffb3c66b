"""Exception hierarchy. The CLI maps any ``DomainError`` to exit code 3."""


class DomainError(ValueError):
    """Base class for input that violates an operation's contract."""


class NotHermitian(DomainError):
    pass


class InvalidRotation(DomainError):
    pass


class NotSymmetricCorrelation(DomainError):
    pass


class NotSkewSymmetric(DomainError):
    pass


class ZeroCorrelation(DomainError):
    pass


class NotSymmetric(DomainError):
    pass


class NotAntisymmetric(DomainError):
    pass


class OneLocal(DomainError):
    pass


class DimensionMismatch(DomainError):
    pass


class TooLarge(DomainError):
    pass


class Timeout(DomainError):
    pass


class DegenerateWeights(DomainError):
    pass


class ImproperColoring(DomainError):
    pass


class InvalidGraph(DomainError):
    pass
