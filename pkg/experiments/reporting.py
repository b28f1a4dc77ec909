from __future__ import annotations

import json
import logging
import subprocess
from functools import lru_cache
from pathlib import Path
from typing import Any, Dict, Optional, Union

import numpy as np
import pandas as pd
from django.conf import settings

from representations.conf import limit

logger = logging.getLogger(__name__)

CSV_FLOAT_FORMAT = "%.17g"


@lru_cache(maxsize=1)
def build_version() -> str:
    """git describe of the checkout, or "unknown" outside a repository."""
    try:
        completed = subprocess.run(
            ["git", "describe", "--always", "--dirty", "--tags"],
            cwd=settings.BASE_DIR,
            capture_output=True,
            text=True,
            timeout=10,
            check=True,
        )
    except (OSError, subprocess.SubprocessError):
        logger.debug("git describe unavailable, build recorded as unknown")
        return "unknown"
    return completed.stdout.strip() or "unknown"


def report_payload(result, *, build: Optional[str] = None) -> Dict[str, Any]:
    """Report JSON. Carries no timestamps so identical runs give identical files."""
    return {
        "schema_version": limit("REPORT_SCHEMA_VERSION"),
        "rng_algorithm": limit("RNG_ALGORITHM"),
        "numpy_version": np.__version__,
        "seed": result.config.seed,
        "build": build if build is not None else build_version(),
        "config": result.config.to_dict(),
        "passed": result.passed,
        "report": result.report.to_dict(),
    }


def write_json(path: Union[str, Path], payload: Dict[str, Any]) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    return path


def write_json_report(path: Union[str, Path], result, *, build: Optional[str] = None) -> Path:
    return write_json(path, report_payload(result, build=build))


def write_csv(path: Union[str, Path], frame: pd.DataFrame) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    frame.to_csv(path, index=False, float_format=CSV_FLOAT_FORMAT, lineterminator="\n")
    return path


def render_table(frame: pd.DataFrame) -> str:
    if frame.empty:
        return "(no rows)"
    return frame.to_string(index=False)
