from __future__ import annotations

from typing import Any, Dict

from django.conf import settings

DEFAULTS: Dict[str, Any] = {
    "STATE_CAP": 10**6,
    "MAX_MOMENT_ORDER": 8,
    "MAX_RANK": 64,
    "MAX_SCALE": 5000,
    "MAX_SAMPLES": 10**7,
    "JACOBI_TOLERANCE": 1e-13,
    "JACOBI_MAX_SWEEPS": 60,
    "HERMITIAN_DEFECT": 1e-12,
    "REPLICA_SIZE": 10_000,
    "THREADS": 1,
    "RNG_ALGORITHM": "numpy.random.PCG64+SeedSequence",
    "REPORT_SCHEMA_VERSION": 1,
}


def limit(name: str) -> Any:
    """
    Look up a numerical knob from settings.LIMITLAB, falling back to DEFAULTS
    so the exact-side library stays usable without a configured project.
    """
    overrides = getattr(settings, "LIMITLAB", {}) if settings.configured else {}
    if name in overrides:
        return overrides[name]
    return DEFAULTS[name]
