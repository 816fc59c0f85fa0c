"""Binary store mapping string keys to float32 embedding matrices.

Layout (all integers little-endian, documented in docs/formats.md):

    magic   4 bytes  b"EMBS"
    u32     schema version (1)
    u32     dims per row
    u32     entry count
    entries, repeated:
        u32     key byte length
        bytes   key, UTF-8
        u32     row count n
        f32[n * dims]  row-major matrix data

Opening a store scans entry headers only and keeps byte offsets, so
matrices are read lazily per key.
"""

from __future__ import annotations

import os
import struct
from typing import Iterable, Mapping, Union

import numpy as np

from .errors import DimMismatch, IoFailure, MissingFile, SchemaViolation
from .semantic import EmbeddingMatrix

MAGIC = b"EMBS"
STORE_VERSION = 1
_U32 = struct.Struct("<I")


def write_store(path: str, entries: Union[Mapping[str, np.ndarray], Iterable[tuple[str, np.ndarray]]],
                dims: int) -> int:
    """Write matrices to a new store file; returns the entry count."""
    if isinstance(entries, Mapping):
        items = list(entries.items())
    else:
        items = list(entries)
    try:
        with open(path, "wb") as fh:
            fh.write(MAGIC)
            fh.write(_U32.pack(STORE_VERSION))
            fh.write(_U32.pack(dims))
            fh.write(_U32.pack(len(items)))
            for key, matrix in items:
                data = np.ascontiguousarray(matrix, dtype="<f4")
                if data.ndim != 2 or data.shape[1] != dims:
                    raise DimMismatch(
                        f"entry {key!r}: expected shape (n, {dims}), got {data.shape}")
                encoded = key.encode("utf-8")
                fh.write(_U32.pack(len(encoded)))
                fh.write(encoded)
                fh.write(_U32.pack(data.shape[0]))
                fh.write(data.tobytes())
    except OSError as exc:
        raise IoFailure(f"cannot write {path}: {exc}") from exc
    return len(items)


class EmbeddingStore:
    """Read-only handle over a store file with lazy per-key loading."""

    def __init__(self, path: str):
        if not os.path.exists(path):
            raise MissingFile(f"no such file: {path}")
        self.path = path
        try:
            self._fh = open(path, "rb")
        except OSError as exc:
            raise IoFailure(f"cannot open {path}: {exc}") from exc
        self._offsets: dict[str, tuple[int, int]] = {}
        self._scan()

    def _read_u32(self) -> int:
        raw = self._fh.read(4)
        if len(raw) != 4:
            raise SchemaViolation(f"{self.path}: truncated store file")
        return _U32.unpack(raw)[0]

    def _scan(self) -> None:
        magic = self._fh.read(4)
        if magic != MAGIC:
            raise SchemaViolation(f"{self.path}: bad magic {magic!r}, not an embedding store")
        version = self._read_u32()
        if version != STORE_VERSION:
            raise SchemaViolation(
                f"{self.path}: unsupported store version {version} (supported: {STORE_VERSION})")
        self.dims = self._read_u32()
        self.count = self._read_u32()
        for _ in range(self.count):
            key_len = self._read_u32()
            key = self._fh.read(key_len).decode("utf-8")
            n = self._read_u32()
            offset = self._fh.tell()
            if key in self._offsets:
                raise SchemaViolation(f"{self.path}: duplicate key {key!r}")
            self._offsets[key] = (offset, n)
            self._fh.seek(n * self.dims * 4, os.SEEK_CUR)

    def keys(self) -> list[str]:
        return list(self._offsets)

    def __contains__(self, key: str) -> bool:
        return key in self._offsets

    def load(self, key: str) -> EmbeddingMatrix:
        if key not in self._offsets:
            raise SchemaViolation(f"{self.path}: no entry for key {key!r}")
        offset, n = self._offsets[key]
        self._fh.seek(offset)
        raw = self._fh.read(n * self.dims * 4)
        if len(raw) != n * self.dims * 4:
            raise SchemaViolation(f"{self.path}: truncated data for key {key!r}")
        data = np.frombuffer(raw, dtype="<f4").reshape(n, self.dims)
        return EmbeddingMatrix(key=key, data=data)

    def close(self) -> None:
        self._fh.close()

    def __enter__(self) -> "EmbeddingStore":
        return self

    def __exit__(self, *exc) -> None:
        self.close()
