from __future__ import annotations

import os

DEGREE_CAP = 10_000
ORBIT_CAP_DEFAULT = 10**8
ISO_NODE_CAP = 10**7


def orbit_cap() -> int:
    """Orbit-size cap, overridable through ``BLOCKFORGE_BUDGET_ORBIT``."""
    raw = os.environ.get("BLOCKFORGE_BUDGET_ORBIT")
    if not raw:
        return ORBIT_CAP_DEFAULT
    cap = int(raw)
    if cap <= 0:
        raise ValueError("BLOCKFORGE_BUDGET_ORBIT must be positive")
    return cap
