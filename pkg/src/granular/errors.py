"""Exception hierarchy shared by every module."""


class GranularError(ValueError):
    """Base class for all errors raised by this package."""


class MissingCell(GranularError):
    pass


class UnknownCategory(GranularError):
    pass


class SchemaMismatch(GranularError):
    pass


class BadSplit(GranularError):
    pass


class EmptyData(GranularError):
    pass


class DimensionMismatch(GranularError):
    pass


class UnknownAttribute(GranularError):
    pass


class NonCategoricalValue(GranularError):
    pass


class EmptyReduct(GranularError):
    pass


class TooManyAttributes(GranularError):
    pass


class MissingAttributeValue(GranularError):
    pass


class EmptyClusterSet(GranularError):
    pass


class SingularSystem(GranularError):
    pass


class LengthMismatch(GranularError):
    pass


class InsufficientData(GranularError):
    pass


class IndexOutOfRange(GranularError):
    pass
