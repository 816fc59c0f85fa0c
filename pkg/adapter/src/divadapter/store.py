"""Writer for the binary embedding store format.

Layout per docs/formats.md in the main repository: b"EMBS" magic, then
little-endian u32 version/dims/count, then per entry a u32-length
UTF-8 key, u32 row count, and row-major float32 data. Written
independently of divcurate so the bytes, not shared code, carry the
contract.
"""

from __future__ import annotations

import struct
from typing import Iterable

import numpy as np

from .errors import AdapterError

MAGIC = b"EMBS"
VERSION = 1
_U32 = struct.Struct("<I")


def write_store(path: str, entries: Iterable[tuple[str, np.ndarray]], dims: int) -> int:
    items = list(entries)
    try:
        with open(path, "wb") as fh:
            fh.write(MAGIC)
            fh.write(_U32.pack(VERSION))
            fh.write(_U32.pack(dims))
            fh.write(_U32.pack(len(items)))
            for key, matrix in items:
                data = np.ascontiguousarray(matrix, dtype="<f4")
                if data.ndim != 2 or data.shape[1] != dims:
                    raise AdapterError(
                        f"store entry {key!r}: expected shape (n, {dims}), got {data.shape}")
                encoded = key.encode("utf-8")
                fh.write(_U32.pack(len(encoded)))
                fh.write(encoded)
                fh.write(_U32.pack(data.shape[0]))
                fh.write(data.tobytes())
    except OSError as exc:
        raise AdapterError(f"cannot write {path}: {exc}") from exc
    return len(items)
