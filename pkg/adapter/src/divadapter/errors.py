class AdapterError(Exception):
    """Base for everything this package raises on purpose."""


class ModelUnavailable(AdapterError):
    """The named model cannot be reached or loaded."""


class TokenizationMismatch(AdapterError):
    """A backend returned a logprob count that disagrees with the
    adapter's own token accounting. Always a backend bug, never data
    noise, so it aborts the export instead of going to the sidecar."""


class UnsupportedField(AdapterError):
    """The named model's backend cannot produce a requested field."""


class CorpusError(AdapterError):
    """The input corpus violates the documented file format."""
