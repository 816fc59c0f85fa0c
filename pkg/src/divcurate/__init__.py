"""Text-diversity measurement and preference-data curation toolkit."""

__version__ = "0.1.0"

from .records import (  # noqa: F401
    GenerationRecord,
    Judgment,
    PairMethod,
    PreferencePair,
    ResponseRecord,
    TaggedText,
)
from .tokenizer import TokenizedText, tokenize, word_count  # noqa: F401
