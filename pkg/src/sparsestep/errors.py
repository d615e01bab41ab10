"""Exception types shared across the toolkit."""


class SparseStepError(Exception):
    """Base class for all toolkit errors."""


class RankDeficient(SparseStepError):
    """A matrix or active submatrix does not have full column rank."""


class UnknownColumn(SparseStepError):
    """A column id was requested that is not part of the factorization."""


class InvalidSparsity(SparseStepError):
    """Requested sparsity level is outside the valid range."""


class InvalidConfig(SparseStepError):
    """Algorithm configuration violates its preconditions."""


class ZeroTarget(SparseStepError):
    """The target vector is identically zero where a nonzero norm is required."""


class InvalidOrder(SparseStepError):
    """Babel-function order outside the range 1..m-1."""


class InvalidSpec(SparseStepError):
    """Synthetic instance specification is out of range."""


class NumericalBreakdown(SparseStepError):
    """An unstable reference method lost the structure it maintains."""


class ConfigError(SparseStepError):
    """Experiment configuration file is missing, malformed, or inconsistent."""
