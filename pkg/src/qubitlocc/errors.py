"""Exception hierarchy shared by every module."""


class QubitLoccError(Exception):
    """Base class for all errors raised by qubitlocc."""


class InvalidStateError(QubitLoccError, ValueError):
    pass


class DimensionError(QubitLoccError, ValueError):
    pass


class InvalidCutError(QubitLoccError, ValueError):
    pass


class PreconditionError(QubitLoccError, ValueError):
    pass


class DomainError(QubitLoccError, ValueError):
    pass


class IllConditionedError(QubitLoccError, ValueError):
    pass


class UnsupportedSizeError(QubitLoccError, ValueError):
    pass


class StructuralError(QubitLoccError, ValueError):
    pass


class CorpusLookupError(QubitLoccError, KeyError):
    pass
