"""Exception hierarchy.

Everything raised on purpose derives from :class:`GreedyPruneError`. The CLI
maps :class:`ConfigError` to exit code 2, :class:`FormatError` and ``OSError``
to 3, and the remaining algorithmic errors to 4.
"""


class GreedyPruneError(Exception):
    """Base class for all library errors."""


class AlgorithmError(GreedyPruneError):
    """Input is well-formed but the requested computation cannot proceed."""


class ConfigError(GreedyPruneError):
    """Invalid run configuration (CLI exit code 2)."""


class DimensionMismatch(AlgorithmError, ValueError):
    pass


class ZeroNormVector(AlgorithmError, ValueError):
    def __init__(self, message, row=None):
        super().__init__(message)
        self.row = row


class NonFiniteInput(AlgorithmError, ValueError):
    pass


class IndexOutOfRange(AlgorithmError, IndexError):
    pass


class EmptyInput(AlgorithmError, ValueError):
    pass


class InstanceTooLarge(AlgorithmError):
    def __init__(self, n, cap):
        super().__init__(f"instance has n={n} tokens, exceeding the cap of {cap}")
        self.n = n
        self.cap = cap


class BudgetExceedsN(AlgorithmError, ValueError):
    pass


class GridMismatch(AlgorithmError, ValueError):
    pass


class DegenerateModel(AlgorithmError, ValueError):
    pass


class TargetUnachievable(AlgorithmError, ValueError):
    def __init__(self, target, floor):
        super().__init__(
            f"target ratio {target!r} is below the ratio {floor!r} reached with zero visual tokens"
        )
        self.target = target
        self.floor = floor


class InfeasibleGeometry(AlgorithmError, ValueError):
    pass


class FormatError(GreedyPruneError):
    """A file does not follow its declared layout (CLI exit code 3)."""


class BadMagic(FormatError):
    pass


class UnsupportedVersion(FormatError):
    pass


class TruncatedFile(FormatError):
    def __init__(self, expected, actual):
        super().__init__(f"expected {expected} bytes, found {actual}")
        self.expected = expected
        self.actual = actual


class NonFiniteValue(FormatError):
    def __init__(self, row, col):
        super().__init__(f"non-finite value at row {row}, column {col}")
        self.row = row
        self.col = col


class RecordParseError(FormatError):
    def __init__(self, message, line=None, field=None):
        where = []
        if line is not None:
            where.append(f"line {line}")
        if field is not None:
            where.append(f"field {field!r}")
        super().__init__(f"{message} ({', '.join(where)})" if where else message)
        self.line = line
        self.field = field
