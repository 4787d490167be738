"""Run manifests: provenance records embedded in every produced artifact.

A manifest names the tool version, the command that produced the file,
sha256 digests of every input, and the effective configuration.  The
timestamp honors SOURCE_DATE_EPOCH so reruns can be made byte-identical.
"""

from __future__ import annotations

import hashlib
import json
import os
import time
from pathlib import Path

from . import __version__

TOOL_NAME = "ccemap"


def file_sha256(path: str | Path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            h.update(chunk)
    return h.hexdigest()


def text_sha256(text: str) -> str:
    return hashlib.sha256(text.encode("utf-8")).hexdigest()


def now_iso() -> str:
    """Current UTC time as ISO-8601, overridable via SOURCE_DATE_EPOCH."""
    epoch = os.environ.get("SOURCE_DATE_EPOCH")
    t = float(epoch) if epoch else time.time()
    return time.strftime("%Y-%m-%dT%H:%M:%SZ", time.gmtime(t))


def build_manifest(
    command: str,
    inputs: dict[str, str | Path] | None = None,
    config: dict | None = None,
) -> dict:
    """Assemble a manifest dict; input values are paths to hash."""
    hashed = {}
    for name, path in sorted((inputs or {}).items()):
        hashed[name] = "sha256:" + file_sha256(path)
    return {
        "tool": TOOL_NAME,
        "version": __version__,
        "command": command,
        "created_at": now_iso(),
        "inputs": hashed,
        "config": config or {},
    }


def dumps(obj: dict) -> str:
    """Canonical single-line JSON used everywhere a manifest is embedded."""
    return json.dumps(obj, ensure_ascii=False, separators=(",", ":"))
