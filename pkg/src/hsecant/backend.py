"""Kernel backend selection.

The compiled extension is used when it imports; otherwise the numpy
fallback.  :func:`use` switches explicitly (tests and benchmarks).
"""
from __future__ import annotations

from types import ModuleType

from . import _fallback

try:
    from . import _kernels as _compiled
except ImportError:  # extension not built
    _compiled = None

_active: ModuleType = _compiled or _fallback


def available() -> list[str]:
    return ["compiled", "python"] if _compiled is not None else ["python"]


def name() -> str:
    return "compiled" if _active is _compiled and _compiled is not None else "python"


def get(which: str | None = None) -> ModuleType:
    if which is None:
        return _active
    if which == "python":
        return _fallback
    if which == "compiled":
        if _compiled is None:
            raise RuntimeError("compiled kernels are not built")
        return _compiled
    raise ValueError(f"unknown backend {which!r}")


def use(which: str) -> None:
    global _active
    _active = get(which)
