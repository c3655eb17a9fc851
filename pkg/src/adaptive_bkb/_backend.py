"""Gaussian kernel matrix kernels with a numba path and a numpy fallback.

The backend is picked once at import time from ``ADAPTIVE_BKB_BACKEND``
(``numba`` or ``numpy``).  When unset, numba is used if it imports.
"""
import os

import numpy as np

_CHUNK_ELEMS = 1 << 22


def _gauss_numpy(X, Z, w):
    n, m = X.shape[0], Z.shape[0]
    out = np.empty((n, m))
    step = max(1, _CHUNK_ELEMS // max(1, m * X.shape[1]))
    for start in range(0, n, step):
        diff = X[start:start + step, None, :] - Z[None, :, :]
        out[start:start + step] = np.exp(-np.einsum("ijk,ijk,k->ij", diff, diff, w))
    return out


def _load_numba():
    from numba import njit

    @njit(cache=True)
    def gauss(X, Z, w):
        n, m, p = X.shape[0], Z.shape[0], X.shape[1]
        out = np.empty((n, m))
        for i in range(n):
            for j in range(m):
                acc = 0.0
                for k in range(p):
                    d = X[i, k] - Z[j, k]
                    acc += d * d * w[k]
                out[i, j] = np.exp(-acc)
        return out

    return gauss


def _select():
    requested = os.environ.get("ADAPTIVE_BKB_BACKEND", "").strip().lower()
    if requested not in ("", "numba", "numpy"):
        raise ValueError(f"ADAPTIVE_BKB_BACKEND must be 'numba' or 'numpy', got {requested!r}")
    if requested == "numpy":
        return "numpy", _gauss_numpy
    try:
        return "numba", _load_numba()
    except ImportError:
        if requested == "numba":
            raise
        return "numpy", _gauss_numpy


BACKEND, _gauss_impl = _select()


def gauss_matrix(X, Z, w):
    """Return ``exp(-sum_k w_k (X_ik - Z_jk)^2)`` as an (n, m) array."""
    X = np.ascontiguousarray(X, dtype=np.float64)
    Z = np.ascontiguousarray(Z, dtype=np.float64)
    w = np.ascontiguousarray(w, dtype=np.float64)
    if X.shape[0] == 0 or Z.shape[0] == 0:
        return np.empty((X.shape[0], Z.shape[0]))
    return _gauss_impl(X, Z, w)


def gauss_matrix_numpy(X, Z, w):
    """Numpy reference path, always available regardless of ``BACKEND``."""
    X = np.asarray(X, dtype=np.float64)
    Z = np.asarray(Z, dtype=np.float64)
    if X.shape[0] == 0 or Z.shape[0] == 0:
        return np.empty((X.shape[0], Z.shape[0]))
    return _gauss_numpy(X, Z, np.asarray(w, dtype=np.float64))
