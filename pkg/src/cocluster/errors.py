"""Exception hierarchy shared by all cocluster modules."""


class CoclusterError(Exception):
    """Base class for every error raised by this package."""


# ---------------------------------------------------------------------------
# Input validation
# ---------------------------------------------------------------------------

class NegativeEntry(CoclusterError):
    """A matrix entry is negative where nonnegativity is required."""

    def __init__(self, position, value=None):
        self.position = tuple(position)
        self.value = value
        msg = f"negative entry at {self.position}"
        if value is not None:
            msg += f": {value}"
        super().__init__(msg)


class NonFinite(CoclusterError):
    """A matrix entry is NaN or infinite."""

    def __init__(self, position, value=None):
        self.position = tuple(position)
        self.value = value
        super().__init__(f"non-finite entry at {self.position}")


class ZeroMatrix(CoclusterError):
    """The matrix sums to zero and cannot be normalized."""


class EmptyRowOrCol(CoclusterError):
    """A row or column carries no probability mass.

    Such elements are unconstrained by the cost for every beta and would
    receive arbitrary cluster assignments, so they are rejected at load time.
    """

    def __init__(self, axis, index):
        self.axis = axis  # "row" or "col"
        self.index = index
        super().__init__(f"{axis} {index} has zero total mass")


class NotADistribution(CoclusterError):
    """Entries are negative or do not sum to 1 within tolerance."""


class DimensionMismatch(CoclusterError):
    """Shapes of a distribution and a clustering (or two tables) disagree."""


class NumericalInconsistency(CoclusterError):
    """A quantity that must be nonnegative came out negative beyond rounding."""


class BetaOutOfRange(CoclusterError):
    """The coupling parameter must lie in [0, 1]."""


class IndexOutOfRange(CoclusterError):
    """An element or cluster index is outside its valid range."""


# ---------------------------------------------------------------------------
# Bipartite chain construction
# ---------------------------------------------------------------------------

class Reducible(CoclusterError):
    """The bipartite graph is disconnected, so the random walk is reducible."""

    def __init__(self, n_components):
        self.n_components = n_components
        super().__init__(f"bipartite graph has {n_components} connected components")


class ZeroDegreeNode(CoclusterError):
    """A node has no incident edge weight, so its walk row is undefined."""

    def __init__(self, index):
        self.index = index
        super().__init__(f"node {index} has zero degree")


class MutualExclusivityViolation(CoclusterError):
    """An aggregated state id receives both a row-side and a column-side node."""


# ---------------------------------------------------------------------------
# Optimization and generators
# ---------------------------------------------------------------------------

class TooManyClusters(CoclusterError):
    """Requested more clusters than there are elements."""


class InvalidBoundaries(CoclusterError):
    """Cluster extents do not partition the index range."""


class KOutOfRange(CoclusterError):
    """Circulant coupling width outside [1, block size]."""


# ---------------------------------------------------------------------------
# Evaluation metrics
# ---------------------------------------------------------------------------

class ClusterCountMismatch(CoclusterError):
    """Prediction and ground truth use different numbers of cluster ids."""


class LengthMismatch(CoclusterError):
    """Prediction and ground truth assign different numbers of elements."""


# ---------------------------------------------------------------------------
# File I/O
# ---------------------------------------------------------------------------

class ParseError(CoclusterError):
    """A data file could not be parsed at the given position."""

    def __init__(self, message, line=None, col=None):
        self.line = line
        self.col = col
        where = ""
        if line is not None:
            where = f" (line {line}" + (f", col {col})" if col is not None else ")")
        super().__init__(message + where)


class RaggedRows(ParseError):
    """Rows of a delimited file have different lengths."""


class IndexOutOfDeclaredRange(ParseError):
    """A triplet index exceeds the dimensions declared in the header."""


class UnsupportedHeader(ParseError):
    """The file banner declares a format variant this parser does not read."""
