"""Exception types shared across the package."""


class AncientNLPError(Exception):
    """Base class for every error raised by this package."""


class ParseError(AncientNLPError, ValueError):
    def __init__(self, message: str, line_no: int | None = None):
        self.line_no = line_no
        if line_no is not None:
            message = f"line {line_no}: {message}"
        super().__init__(message)


class UnknownLanguage(AncientNLPError, KeyError):
    def __str__(self):
        return f"unknown language code: {self.args[0]!r}"


class TrainingDataEmpty(AncientNLPError, ValueError):
    pass


class VocabSizeTooSmall(AncientNLPError, ValueError):
    pass


class InvalidPieceId(AncientNLPError, IndexError):
    pass


class DimensionMismatch(AncientNLPError, ValueError):
    pass


class EmptyForm(AncientNLPError, ValueError):
    pass


class InapplicableRule(AncientNLPError, ValueError):
    pass


class InvalidLabelField(AncientNLPError, ValueError):
    pass


class MalformedLabel(AncientNLPError, ValueError):
    pass


class InvalidOrder(AncientNLPError, ValueError):
    pass


class NoWordInitialPiece(AncientNLPError, ValueError):
    pass


class MalformedMaskInput(AncientNLPError, ValueError):
    pass


class MissingQuery(AncientNLPError, KeyError):
    """A precomputed scorer was asked for a query it has no record of."""


class NotApplicable(AncientNLPError, ValueError):
    pass


class AlignmentError(AncientNLPError, ValueError):
    pass


class NoScores(AncientNLPError, ValueError):
    pass


class ModelFormatError(AncientNLPError, ValueError):
    """Persisted model has the wrong kind or version."""
