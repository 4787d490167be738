#!/usr/bin/env python3
"""Regenerate the golden pipeline outputs from the shipped fixtures.

Run from the repository root after an intentional format change:

    python3 tests/make_goldens.py

Inspect the diff before committing: golden files pin observable output.
"""

from __future__ import annotations

import shutil
import sys
import tempfile
from pathlib import Path

sys.path.insert(0, str(Path(__file__).parent))

from pipeline_steps import ARTIFACTS, GOLDEN, run_pipeline


def main() -> int:
    with tempfile.TemporaryDirectory() as tmp:
        run_pipeline(Path(tmp))
        if GOLDEN.exists():
            shutil.rmtree(GOLDEN)
        for rel in ARTIFACTS:
            src = Path(tmp) / rel
            dst = GOLDEN / rel
            dst.parent.mkdir(parents=True, exist_ok=True)
            shutil.copyfile(src, dst)
    print(f"wrote {len(ARTIFACTS)} golden files under {GOLDEN}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
