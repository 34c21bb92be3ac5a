"""Kernel selection: the compiled extension when importable, else pure Python.

Set ``HLTREES_PURE_PYTHON=1`` to force the fallback.
"""

from __future__ import annotations

import os

from . import _pykernels

if os.environ.get("HLTREES_PURE_PYTHON") == "1":
    _impl = _pykernels
else:
    try:
        from . import _ckernels as _impl
    except ImportError:  # extension not built
        _impl = _pykernels

IMPLEMENTATION = _impl.IMPLEMENTATION
STATUS_NONE = _pykernels.STATUS_NONE
STATUS_FOUND = _pykernels.STATUS_FOUND
STATUS_BUDGET = _pykernels.STATUS_BUDGET

d1_least = _impl.d1_least
adversary_d1 = _impl.adversary_d1


def backend(name: str):
    """Kernel module by name (``"python"`` or ``"cython"``)."""
    if name == "python":
        return _pykernels
    if name == "cython":
        from . import _ckernels

        return _ckernels
    raise ValueError(f"unknown kernel backend {name!r}")
