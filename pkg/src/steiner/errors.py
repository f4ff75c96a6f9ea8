"""Exception types raised across the package."""


class SteinerError(Exception):
    """Base class for all errors raised by this package."""


class NonPrimeCharacteristic(SteinerError):
    pass


class NonPrimitivePolynomial(SteinerError):
    pass


class OrderDoesNotDivide(SteinerError):
    pass


class MixedFields(SteinerError):
    pass


class MalformedBlock(SteinerError):
    pass


class DesignParametersInadmissible(SteinerError):
    pass


class MissingEmbedding(SteinerError):
    pass


class NonInjectiveEmbedding(SteinerError):
    pass


class IndexOutOfRange(SteinerError):
    pass


class SizeBudgetExceeded(SteinerError):
    pass


class NonCanonicalRepresentative(SteinerError):
    pass


class ModeMismatch(SteinerError):
    pass


class InvalidFamily(SteinerError):
    pass


class UnknownFamilyName(SteinerError):
    pass


class EmptyColumn(SteinerError):
    pass


class LabelingMismatch(SteinerError):
    pass
