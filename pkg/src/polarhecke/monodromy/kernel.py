"""Backend selection for the path-tracking kernel.

The compiled ``_tracker_core`` is used when it imports; setting the
environment variable ``POLARHECKE_PURE_PYTHON=1`` forces the numpy fallback.
"""

from __future__ import annotations

import os

from . import _tracker_py

_compiled = None
if os.environ.get("POLARHECKE_PURE_PYTHON") != "1":
    try:
        from . import _tracker_core as _compiled  # type: ignore[no-redef]
    except ImportError:
        _compiled = None

_active = _compiled if _compiled is not None else _tracker_py


def available_backends() -> list[str]:
    out = ["python"]
    if _compiled is not None:
        out.insert(0, "cython")
    return out


def get_backend(name: str | None = None):
    """The kernel module for ``name`` ("cython" / "python"), default active."""
    if name is None:
        return _active
    if name == "python":
        return _tracker_py
    if name == "cython":
        if _compiled is None:
            raise RuntimeError("compiled kernel is not available")
        return _compiled
    raise ValueError(f"unknown backend {name!r}")


def backend_name() -> str:
    return _active.BACKEND


def track_segment(*args, backend: str | None = None, **kwargs):
    return get_backend(backend).track_segment(*args, **kwargs)
