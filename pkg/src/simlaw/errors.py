"""Exception hierarchy. Every error carries the CLI exit code it maps to:
2 = bad configuration or data, 3 = singular linear solve, 4 = training
divergence, 5 = file I/O."""


class SimlawError(Exception):
    exit_code = 2


class SingularDimensionMatrix(SimlawError):
    """The independent-parameter dimension matrix has no usable LU pivot."""

    exit_code = 3


class DependentRows(SimlawError):
    """Exponent rows are linearly dependent: the dimensionless quantities
    are not independent by exponentiation and multiplication."""


class ZeroTargetExponent(SimlawError):
    """The quantity of interest does not appear in the target group."""


class NonPositiveParameter(SimlawError):
    """Parameter samples must be strictly positive (real-exponent powers)."""


class SingularBeta(SimlawError):
    exit_code = 3


class SingularRenormMatrix(SimlawError):
    """The renormalization system matrix is singular. Invertibility for
    independent constructions is conjectured, not proven; we surface the
    matrix and its rank instead of regularizing."""

    exit_code = 3

    def __init__(self, message, matrix=None, rank=None):
        super().__init__(message)
        self.matrix = matrix
        self.rank = rank


class NonPositiveConstant(SimlawError):
    """Group constants must be strictly positive."""


class OutOfDomain(SimlawError):
    """Flow-model formula evaluated outside its physical domain."""


class NoConvergence(SimlawError):
    """Implicit-equation solver exhausted its budget or lost its bracket."""

    def __init__(self, message, diagnostics=None):
        super().__init__(message)
        self.diagnostics = diagnostics or {}


class EmptyDataset(SimlawError):
    """No rows survived filtering."""


class ParseError(SimlawError):
    """Malformed dataset file; carries the 1-based line number."""

    def __init__(self, message, line=None):
        super().__init__(message)
        self.line = line


class IdentifiabilityError(SimlawError):
    """A scaling column has fewer than 2 distinct values, so its
    similarity exponent cannot be identified from the data."""


class NonFiniteActivation(SimlawError):
    exit_code = 4

    def __init__(self, message, row=None):
        super().__init__(message)
        self.row = row


class NonFiniteGradient(SimlawError):
    exit_code = 4


class NonFiniteLoss(SimlawError):
    exit_code = 4

    def __init__(self, message, epoch=None):
        super().__init__(message)
        self.epoch = epoch


class DegenerateBins(SimlawError):
    """Collapse-quality binning left no usable bins."""
