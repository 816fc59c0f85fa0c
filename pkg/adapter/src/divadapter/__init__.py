"""Model-output exporter for the divcurate toolkit.

Reads a generation corpus, asks a model backend for per-token
log-probabilities, quality scores, and embedding matrices, and writes
the annotated corpus plus embedding store in the exact file formats
divcurate ingests. This package never imports divcurate; the files are
the interface.
"""

from .errors import AdapterError, ModelUnavailable, TokenizationMismatch, UnsupportedField
from .export import ExportJob, ExportResult, export

__all__ = [
    "AdapterError",
    "ModelUnavailable",
    "TokenizationMismatch",
    "UnsupportedField",
    "ExportJob",
    "ExportResult",
    "export",
]
