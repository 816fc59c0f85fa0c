"""Model backends.

A backend turns response texts into per-token log-probabilities,
scalar quality scores, and per-token embedding matrices. Two schemes
exist:

- ``offline:<name>`` (or a bare name): a fully deterministic local
  backend. Logprobs come from a Laplace-smoothed unigram model fit on
  the corpus being exported, quality is a bounded vocabulary-richness
  score, and embeddings are seeded hash projections. No network, no
  weights, byte-stable across runs, which is what the toolkit's
  determinism contract needs from fixtures.
- ``hf:<name>``: loads a locally cached transformer for real
  embeddings. Import and load are lazy; any missing dependency or
  uncached model raises ModelUnavailable.

Backends expose: scheme, name, hidden_size, supported (field names),
prepare(texts), token_logprobs(texts), quality(texts),
embed(texts, layer).
"""

from __future__ import annotations

import hashlib
import math
from collections import Counter
from typing import Sequence

import numpy as np

from .corpus import tokenize
from .errors import ModelUnavailable

FIELD_LOGPROBS = "logprobs"
FIELD_QUALITY = "quality"
FIELD_EMBEDDINGS = "embeddings"
ALL_FIELDS = frozenset({FIELD_LOGPROBS, FIELD_QUALITY, FIELD_EMBEDDINGS})


class OfflineBackend:
    scheme = "offline"
    supported = ALL_FIELDS

    def __init__(self, name: str, hidden_size: int = 64):
        self.name = name
        self.hidden_size = hidden_size
        # model identity seeds every hash so two "models" disagree
        self._key = hashlib.blake2b(name.encode("utf-8"), digest_size=32).digest()
        self._counts: Counter = Counter()
        self._total = 0

    def prepare(self, texts: Sequence[str]) -> None:
        for text in texts:
            toks = tokenize(text)
            self._counts.update(toks)
            self._total += len(toks)

    def token_logprobs(self, texts: Sequence[str]) -> list[tuple[list[str], list[float]]]:
        """Laplace-smoothed unigram logprobs; always <= 0."""
        denom = self._total + len(self._counts)
        out = []
        for text in texts:
            toks = tokenize(text)
            lps = [math.log((self._counts[t] + 1) / denom) for t in toks]
            out.append((toks, lps))
        return out

    def quality(self, texts: Sequence[str]) -> list[float]:
        # distinct / (distinct + sqrt(total)): rises with vocabulary
        # richness, stays strictly inside (0, 1)
        out = []
        for text in texts:
            toks = tokenize(text)
            v = len(set(toks))
            out.append(v / (v + math.sqrt(len(toks))))
        return out

    def embed(self, texts: Sequence[str], layer: int) -> list[np.ndarray]:
        out = []
        for text in texts:
            toks = tokenize(text)
            rows = np.stack([self._token_vector(t, layer) for t in toks])
            out.append(rows.astype(np.float32))
        return out

    def _token_vector(self, token: str, layer: int) -> np.ndarray:
        vec = np.empty(self.hidden_size, dtype=np.float64)
        filled = 0
        counter = 0
        person = f"L{layer:03d}"[:16].encode("ascii")
        while filled < self.hidden_size:
            digest = hashlib.blake2b(
                token.encode("utf-8") + b"\x00" + counter.to_bytes(4, "little"),
                key=self._key, person=person, digest_size=64).digest()
            vals = np.frombuffer(digest, dtype="<u8").astype(np.float64) / 2.0 ** 64
            take = min(vals.size, self.hidden_size - filled)
            vec[filled:filled + take] = vals[:take] * 2.0 - 1.0
            filled += take
            counter += 1
        if not np.any(vec):
            vec[0] = 1.0  # zero vector can't survive; downstream rejects zero norms
        return vec


class HfBackend:
    """Embeddings from a locally cached transformer checkpoint."""

    scheme = "hf"
    supported = frozenset({FIELD_EMBEDDINGS})

    def __init__(self, name: str):
        try:
            import torch
            from transformers import AutoModel, AutoTokenizer
        except ImportError as exc:
            raise ModelUnavailable(
                f"hf backend needs torch and transformers installed: {exc}") from exc
        try:
            self._tokenizer = AutoTokenizer.from_pretrained(name, local_files_only=True)
            self._model = AutoModel.from_pretrained(
                name, local_files_only=True, output_hidden_states=True)
        except Exception as exc:
            raise ModelUnavailable(f"model {name!r} is not cached locally: {exc}") from exc
        self._model.eval()
        self._torch = torch
        self.name = name
        self.hidden_size = int(self._model.config.hidden_size)

    def prepare(self, texts: Sequence[str]) -> None:
        pass

    def embed(self, texts: Sequence[str], layer: int) -> list[np.ndarray]:
        out = []
        with self._torch.no_grad():
            for text in texts:
                enc = self._tokenizer(text, return_tensors="pt", truncation=True)
                states = self._model(**enc).hidden_states[layer][0]
                out.append(states.cpu().numpy().astype(np.float32))
        return out


def resolve_backend(model_id: str, hidden_size: int = 64):
    """Map a model identifier to a backend instance.

    Bare names and offline:<name> get the deterministic local backend;
    hf:<name> loads a cached transformer. Anything else is unreachable
    by definition.
    """
    if model_id.startswith("hf:"):
        return HfBackend(model_id[3:])
    if model_id.startswith("offline:"):
        return OfflineBackend(model_id[len("offline:"):], hidden_size)
    if ":" in model_id:
        scheme = model_id.split(":", 1)[0]
        raise ModelUnavailable(f"no backend for scheme {scheme!r} (model {model_id!r})")
    return OfflineBackend(model_id, hidden_size)
