"""Desk-scale guards, overridable through environment variables."""

from __future__ import annotations

import os


def _env_int(name: str, default: int) -> int:
    raw = os.environ.get(name)
    if raw is None or raw == "":
        return default
    return int(raw)


def enumeration_cap() -> int:
    """Maximum lattice points examined per cone by the discrepancy enumerators."""
    return _env_int("KEQUIV_ENUMERATION_CAP", 10**6)


def group_order_cap() -> int:
    return _env_int("KEQUIV_GROUP_ORDER_CAP", 10**4)


def max_rank() -> int:
    return _env_int("KEQUIV_MAX_RANK", 6)


def resolve_step_cap() -> int:
    return _env_int("KEQUIV_RESOLVE_STEP_CAP", 1000)
