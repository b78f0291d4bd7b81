from typing import Optional


class RankDistillError(Exception):
    """Base class for every failure raised by the toolkit."""


class LengthMismatchError(RankDistillError, ValueError):
    """Label and score vectors differ in length."""


class InvalidLabelsError(RankDistillError, ValueError):
    """Labels violate a loss precondition (e.g. negative gains)."""


class UndefinedIdealDCGError(RankDistillError, ValueError):
    """The ideal DCG of a label vector is zero, so NDCG-style losses are undefined."""


class InvalidPermutationError(RankDistillError, ValueError):
    """An index sequence is not a valid (partial) permutation."""


class InvalidSimplexError(RankDistillError, ValueError):
    """A probability vector is negative, non-finite or does not sum to one."""


class IncompatibleConfigurationError(RankDistillError, ValueError):
    """A configuration cannot be used for the requested task or data."""


class MissingLabelsError(RankDistillError, ValueError):
    """A label vector required by the objective is absent."""


class NonFiniteScoresError(RankDistillError, ValueError):
    """Scores contain NaN or infinity."""


class DimensionMismatchError(RankDistillError, ValueError):
    """Feature dimension does not match the model."""


class TrainingDivergedError(RankDistillError):
    """The training loss or gradient became non-finite."""


class EmptyDatasetError(RankDistillError, ValueError):
    """A dataset without lists was given where lists are required."""


class FormatError(RankDistillError, ValueError):
    """A line of an input file could not be parsed."""

    def __init__(self, message: str, line_number: Optional[int] = None, source: Optional[str] = None):
        self.line_number = line_number
        self.source = source
        location = ""
        if source:
            location += f"{source}:"
        if line_number is not None:
            location += f"{line_number}:"
        super().__init__(f"{location} {message}".strip() if location else message)


class TrecFormatError(FormatError):
    """Malformed TREC run or qrel line."""


class LibsvmFormatError(FormatError):
    """Malformed ranking-LibSVM line."""


class DuplicateRunEntryError(RankDistillError, ValueError):
    """The same (query_id, doc_id) pair appears twice in a run."""


class NoTeacherScoresError(RankDistillError, ValueError):
    """Teacher scores were required but none are present."""


class SyntheticDataError(RankDistillError, ValueError):
    """Invalid synthetic-data generation parameters."""


class SignificanceTestError(RankDistillError, ValueError):
    """A significance test cannot be computed on the given vectors."""


class RankAggregationError(RankDistillError, ValueError):
    """Rank aggregation was asked about a method present in no table."""


class SweepError(RankDistillError):
    """A sweep produced no usable grid point for a method."""


class MetricConfigurationError(RankDistillError, ValueError):
    """A metric specification does not fit the evaluated labels."""
