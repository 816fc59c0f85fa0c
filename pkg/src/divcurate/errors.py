"""Exception types shared across the toolkit.

Errors fall into two broad families that the CLI maps onto exit codes:
InputError (unreadable or missing files, exit 1) and ValidationError
(schema or precondition violations, exit 2). Anything else that escapes
is treated as an internal fault (exit 3).
"""


class ToolkitError(Exception):
    """Base class for every error raised by this package."""


class InputError(ToolkitError):
    """File-level problem: missing path, unreadable bytes, bad container."""


class MissingFile(InputError):
    pass


class IoFailure(InputError):
    pass


class ValidationError(ToolkitError):
    """Bad data or violated precondition; the input itself is at fault."""


class SchemaViolation(ValidationError):
    """A line in a data file failed validation.

    Carries the 1-based line number and the offending field path so the
    message can point at the exact spot.
    """

    def __init__(self, message, line=None, field=None):
        self.line = line
        self.field = field
        loc = []
        if line is not None:
            loc.append(f"line {line}")
        if field:
            loc.append(f"field {field!r}")
        suffix = f" ({', '.join(loc)})" if loc else ""
        super().__init__(f"{message}{suffix}")


class DuplicateId(SchemaViolation):
    pass


class InvariantViolation(ValidationError):
    pass


# --- metric preconditions ---------------------------------------------------

class MetricInputError(ValidationError):
    """Raised by metric functions on unusable input.

    When raised through score_response the offending metric's name is
    attached as .metric so callers can tell which selection failed.
    """

    metric: str | None = None


class EmptyText(MetricInputError):
    pass


class SingleToken(MetricInputError):
    pass


class TextTooShort(MetricInputError):
    pass


class EmptyList(MetricInputError):
    pass


class PositiveLogprob(MetricInputError):
    pass


class MissingLogprobs(MetricInputError):
    pass


# --- embedding-space preconditions ------------------------------------------

class TooFewRows(ValidationError):
    pass


class ZeroNormRow(ValidationError):
    pass


class DimMismatch(ValidationError):
    pass


# --- aggregation / filtering ------------------------------------------------

class EmptyInput(ValidationError):
    pass


class InsufficientSamples(ValidationError):
    pass


class MissingScore(ValidationError):
    def __init__(self, record_id, field):
        self.record_id = record_id
        self.field = field
        super().__init__(f"record {record_id!r} lacks required score {field!r}")


class MetricAbsent(ValidationError):
    pass


# --- statistics ---------------------------------------------------------------

class LengthMismatch(ValidationError):
    pass


class ZeroVariance(ValidationError):
    pass


class TooFewSamples(ValidationError):
    pass


class BothEmpty(ValidationError):
    pass
