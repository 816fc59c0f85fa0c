"""Run manifests: what ran, with which config, over which input bytes.

A manifest is written next to each primary output as
<output>.manifest.json. Manifests carry a timestamp, so they are the
one output that is not byte-stable across runs; every primary output
is.
"""

from __future__ import annotations

import hashlib
import json
import os
from dataclasses import dataclass, field
from datetime import datetime, timezone
from typing import Mapping

from .errors import IoFailure, MissingFile

TOOL_VERSION = "0.1.0"


def file_sha256(path: str) -> str:
    if not os.path.exists(path):
        raise MissingFile(f"no such file: {path}")
    digest = hashlib.sha256()
    try:
        with open(path, "rb") as fh:
            for chunk in iter(lambda: fh.read(1 << 20), b""):
                digest.update(chunk)
    except OSError as exc:
        raise IoFailure(f"cannot read {path}: {exc}") from exc
    return digest.hexdigest()


@dataclass
class RunManifest:
    command: str
    config: dict
    inputs: dict = field(default_factory=dict)  # label -> {path, sha256, bytes}
    tool_version: str = TOOL_VERSION
    created_utc: str = ""

    def add_input(self, label: str, path: str) -> None:
        self.inputs[label] = {
            "path": os.path.abspath(path),
            "sha256": file_sha256(path),
            "bytes": os.path.getsize(path),
        }

    def write(self, output_path: str) -> str:
        """Write the manifest next to the primary output it describes."""
        self.created_utc = datetime.now(timezone.utc).isoformat()
        target = manifest_path(output_path)
        payload = {
            "command": self.command,
            "config": self.config,
            "inputs": self.inputs,
            "tool_version": self.tool_version,
            "created_utc": self.created_utc,
        }
        try:
            with open(target, "w", encoding="utf-8", newline="\n") as fh:
                json.dump(payload, fh, ensure_ascii=False, indent=2, sort_keys=True)
                fh.write("\n")
        except OSError as exc:
            raise IoFailure(f"cannot write {target}: {exc}") from exc
        return target


def manifest_path(output_path: str) -> str:
    return output_path + ".manifest.json"


def write_metrics_manifest(directory: str, params: Mapping[str, Mapping]) -> str:
    """Persist the metric registry (names and parameter defaults) as
    metrics.manifest in the given directory."""
    target = os.path.join(directory or ".", "metrics.manifest")
    payload = {"schema_version": 1, "metrics": {k: dict(v) for k, v in params.items()}}
    try:
        with open(target, "w", encoding="utf-8", newline="\n") as fh:
            json.dump(payload, fh, ensure_ascii=False, indent=2, sort_keys=True)
            fh.write("\n")
    except OSError as exc:
        raise IoFailure(f"cannot write {target}: {exc}") from exc
    return target
