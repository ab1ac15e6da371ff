"""Backend selection for the greedy kernels.

The compiled extension is used when it imports; set ``PRIMERSET_PURE=1`` to
force the pure-Python implementation.
"""

from __future__ import annotations

import os

import numpy as np

from . import _kernels_py
from ._kernels_py import MODE_FIX, MODE_VAR

BACKENDS = {"python": _kernels_py}
try:
    from . import _kernels as _compiled
except ImportError:  # extension not built
    _compiled = None
else:
    BACKENDS["compiled"] = _compiled

DEFAULT_BACKEND = "compiled" if _compiled is not None and not os.environ.get("PRIMERSET_PURE") else "python"

__all__ = ["BACKENDS", "DEFAULT_BACKEND", "MODE_FIX", "MODE_VAR", "greedy_potential", "greedy_count"]


def _backend(name):
    name = name or DEFAULT_BACKEND
    try:
        return BACKENDS[name]
    except KeyError:
        raise ValueError(f"unknown or unavailable kernel backend {name!r}; have {sorted(BACKENDS)}") from None


def _csr(index):
    return (
        np.ascontiguousarray(index.offsets, dtype=np.int64),
        np.ascontiguousarray(index.targets, dtype=np.int32),
        np.ascontiguousarray(index.strands, dtype=np.int8),
        np.ascontiguousarray(index.positions, dtype=np.int32),
    )


def greedy_potential(index, backend=None):
    return _backend(backend).greedy_potential(*_csr(index), index.n, index.L)


def greedy_count(index, best, mode, backend=None):
    best = np.ascontiguousarray(best, dtype=np.int64).ravel()
    return _backend(backend).greedy_count(*_csr(index), index.n, index.L, best, int(mode))
