"""Kernel backend selection.

The compiled extension is preferred.  Set ``WEAKLP_BACKEND`` to ``python``
to force the numpy kernels, or to ``cython`` to fail loudly when the
extension is missing.
"""
import importlib
import os

_CHOICES = ("auto", "cython", "python")


def load(name="auto"):
    if name not in _CHOICES:
        raise ValueError(f"WEAKLP_BACKEND must be one of {_CHOICES}, got {name!r}")
    if name == "python":
        return importlib.import_module("weaklp._pykernels")
    try:
        return importlib.import_module("weaklp._ckernels")
    except ImportError:
        if name == "cython":
            raise
        return importlib.import_module("weaklp._pykernels")


def available():
    """Names of the backends importable in this environment."""
    names = ["python"]
    try:
        importlib.import_module("weaklp._ckernels")
    except ImportError:
        pass
    else:
        names.insert(0, "cython")
    return names


kernels = load(os.environ.get("WEAKLP_BACKEND", "auto"))
BACKEND = kernels.NAME
