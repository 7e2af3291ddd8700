"""Simulation kernels: the compiled Cython core when built, numpy otherwise.

Set ``ABMARKET_BACKEND=python`` to force the fallback, or ``cython`` to make a
missing extension an error.
"""

from __future__ import annotations

import os
from types import ModuleType

from . import _fallback

try:
    from . import _core  # type: ignore[attr-defined]
except ImportError:  # extension not built
    _core = None


def available() -> list[str]:
    return ["cython", "python"] if _core is not None else ["python"]


def get_backend(name: str | None = None) -> ModuleType:
    name = (name or os.environ.get("ABMARKET_BACKEND") or "auto").lower()
    if name == "python":
        return _fallback
    if name == "cython":
        if _core is None:
            raise ImportError("the Cython kernel is not built; run `pip install -e .`")
        return _core
    if name != "auto":
        raise ValueError(f"unknown backend {name!r}")
    return _core if _core is not None else _fallback


backend = get_backend()
BACKEND = backend.NAME
