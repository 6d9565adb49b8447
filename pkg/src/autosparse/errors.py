"""Exception types shared across the package."""


class SparseError(Exception):
    """Base class for all autosparse errors."""


class CoordinateError(SparseError, IndexError):
    """A row/column coordinate or linear index lies outside the matrix."""


class CorruptionError(CoordinateError):
    """Stored data violates its own structural invariants (bad index, etc.)."""


class ShapeError(SparseError, ValueError):
    """Operand shapes are incompatible for the requested operation."""

    def __init__(self, message, *shapes):
        if shapes:
            message = "%s: %s" % (message, " vs ".join(str(s) for s in shapes))
        super().__init__(message)
        self.shapes = shapes


class DimensionError(SparseError, ValueError):
    """An operation is undefined for a zero-sized dimension."""


class DomainError(SparseError, ValueError):
    """A numeric argument lies outside its allowed domain."""


class NormOrderError(DomainError):
    """The requested norm order is not supported for this operand."""


class AppendOrderError(SparseError, ValueError):
    """Fast-path append called with an index that is not strictly larger
    than every index already stored."""


class MatrixMarketError(SparseError, ValueError):
    """Malformed Matrix Market input; carries the offending line number."""

    def __init__(self, message, line_no=None):
        if line_no is not None:
            message = "line %d: %s" % (line_no, message)
        super().__init__(message)
        self.line_no = line_no


class DuplicateEntryError(MatrixMarketError):
    """The same coordinate appears more than once in strict-mode input."""


class ResourceLimitError(SparseError, RuntimeError):
    """A benchmark configuration would exceed sane memory limits."""


class CorrectnessError(SparseError, RuntimeError):
    """Benchmark variants disagreed on the result; timings are withheld."""
