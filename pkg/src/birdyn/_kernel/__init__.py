"""Polynomial kernel selection.

The compiled FLINT backend is used when python-flint imports; otherwise the
pure-Python backend is used.  Set ``BIRDYN_KERNEL=pure`` to force the fallback.
"""
from __future__ import annotations

import os

from . import pure

backend = pure
if os.environ.get("BIRDYN_KERNEL", "").lower() != "pure":
    try:
        from . import flint_backend as backend  # noqa: F811
    except ImportError:  # pragma: no cover - depends on the environment
        backend = pure


def use(name: str):
    """Switch backend at runtime ('flint' or 'pure'); returns the previous name."""
    global backend
    prev = backend.NAME
    if name == "pure":
        backend = pure
    elif name == "flint":
        from . import flint_backend

        backend = flint_backend
    else:
        raise ValueError(f"unknown kernel {name!r}")
    return prev


def current():
    return backend
