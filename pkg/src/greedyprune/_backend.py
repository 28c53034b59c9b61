"""Pick the kernel implementation at import time.

The compiled ``_kernels`` extension is used when it was built; otherwise, or
when ``GREEDYPRUNE_BACKEND=python`` is set, the numpy fallback is used.
"""
import importlib
import os

from . import _pykernels

BACKENDS = ("cython", "python")


def load(name):
    if name == "python":
        return _pykernels
    if name == "cython":
        return importlib.import_module("greedyprune._kernels")
    raise ValueError(f"unknown backend {name!r}; choose from {BACKENDS}")


def available():
    names = ["python"]
    try:
        load("cython")
    except ImportError:
        pass
    else:
        names.insert(0, "cython")
    return names


def _select():
    wanted = os.environ.get("GREEDYPRUNE_BACKEND", "").strip().lower()
    if wanted:
        return wanted, load(wanted)
    try:
        return "cython", load("cython")
    except ImportError:
        return "python", _pykernels


NAME, kernels = _select()
