"""Backend selection for the distance/weight kernels.

The compiled extension is preferred when importable; the numpy fallback
is always available.  CCEMAP_KERNELS=python|compiled forces a choice
(forcing `compiled` raises if the extension was not built).
"""

from __future__ import annotations

import os


def _load():
    choice = os.environ.get("CCEMAP_KERNELS", "auto")
    if choice not in ("auto", "compiled", "python"):
        raise ValueError(f"CCEMAP_KERNELS must be auto|compiled|python, got {choice!r}")
    if choice in ("auto", "compiled"):
        try:
            from . import _kernels  # type: ignore[attr-defined]

            return _kernels
        except ImportError:
            if choice == "compiled":
                raise
    from . import _kernels_py

    return _kernels_py


kernels = _load()
BACKEND = kernels.BACKEND_NAME
