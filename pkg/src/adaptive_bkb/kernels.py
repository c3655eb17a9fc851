"""Gaussian kernels, RKHS distance and the smoothness envelope ``g``.

Two families are supported:

* ``gaussian-isotropic``: ``k(x, z) = exp(-||x - z||^2 / l)``
* ``gaussian-ard``: ``k(x, z) = exp(-0.5 * sum_j (x_j - z_j)^2 / s_j^2)``

Both satisfy ``k(x, x) = 1``, so ``kappa = 1``.
"""
from dataclasses import dataclass
import math

import numpy as np

from . import _backend

ISOTROPIC = "gaussian-isotropic"
ARD = "gaussian-ard"


@dataclass(frozen=True)
class KernelSpec:
    family: str
    lengthscales: tuple
    kappa: float = 1.0

    def __post_init__(self):
        if self.family not in (ISOTROPIC, ARD):
            raise ValueError(f"unknown kernel family {self.family!r}")
        ls = tuple(float(v) for v in np.atleast_1d(self.lengthscales))
        if not ls or any(not (v > 0 and math.isfinite(v)) for v in ls):
            raise ValueError("lengthscales must be positive and finite")
        if self.family == ISOTROPIC and len(ls) != 1:
            raise ValueError("isotropic kernel takes a single lengthscale")
        if not self.kappa >= 1.0:
            raise ValueError("kappa must be >= 1")
        object.__setattr__(self, "lengthscales", ls)

    @classmethod
    def isotropic(cls, l):
        return cls(ISOTROPIC, (l,))

    @classmethod
    def ard(cls, lengthscales):
        return cls(ARD, tuple(lengthscales))

    def weights(self, dim):
        """Per-dimension coefficients ``w`` with ``k = exp(-sum w_j d_j^2)``."""
        if self.family == ISOTROPIC:
            return np.full(dim, 1.0 / self.lengthscales[0])
        if len(self.lengthscales) != dim:
            raise ValueError(
                f"ARD kernel has {len(self.lengthscales)} lengthscales, points have dimension {dim}"
            )
        return 0.5 / np.square(np.asarray(self.lengthscales))

    def matrix(self, X, Z):
        """Kernel matrix between the rows of ``X`` and ``Z``."""
        X = np.atleast_2d(np.asarray(X, dtype=float))
        Z = np.atleast_2d(np.asarray(Z, dtype=float))
        if X.shape[1] != Z.shape[1]:
            raise ValueError(f"dimension mismatch: {X.shape[1]} vs {Z.shape[1]}")
        return _backend.gauss_matrix(X, Z, self.weights(X.shape[1]))

    def diag(self, X):
        return np.ones(np.atleast_2d(X).shape[0])


@dataclass(frozen=True)
class SmoothnessModel:
    """Envelope ``g(r) = g_coefficient * r**alpha`` bounding the RKHS distance."""

    alpha: float
    g_coefficient: float
    C_k: float
    C_k_prime: float
    delta_k: float = math.inf

    def __post_init__(self):
        if not 0 < self.alpha <= 1:
            raise ValueError("alpha must lie in (0, 1]")
        if min(self.g_coefficient, self.C_k, self.C_k_prime, self.delta_k) <= 0:
            raise ValueError("smoothness constants must be positive")

    @classmethod
    def for_kernel(cls, spec):
        # exp(-u) >= 1 - u gives d_k^2 <= 2 sum_j w_j d_j^2 <= 2 max(w) r^2
        if spec.family == ISOTROPIC:
            l_equiv = spec.lengthscales[0]
        else:
            l_equiv = 2.0 * min(spec.lengthscales) ** 2
        c = math.sqrt(2.0 / l_equiv)
        return cls(alpha=1.0, g_coefficient=c, C_k=c, C_k_prime=c)


def _as_point(x):
    return np.atleast_1d(np.asarray(x, dtype=float))


def eval_kernel(spec, x, x2):
    x, x2 = _as_point(x), _as_point(x2)
    if x.shape != x2.shape:
        raise ValueError(f"dimension mismatch: {x.shape} vs {x2.shape}")
    return float(spec.matrix(x[None, :], x2[None, :])[0, 0])


def rkhs_distance(spec, x, x2, tol=1e-10):
    kxx = eval_kernel(spec, x, x)
    kzz = eval_kernel(spec, x2, x2)
    sq = kxx + kzz - 2.0 * eval_kernel(spec, x, x2)
    if sq < -tol:
        raise ArithmeticError(f"negative squared RKHS distance {sq}; kernel is not positive definite")
    return math.sqrt(max(sq, 0.0))


def g_bound(model, r):
    if r < 0:
        raise ValueError("radius must be non-negative")
    return model.g_coefficient * r ** model.alpha


def variation_bound(model, F, v1, rho, h):
    """Cap on the variation of an ``||f|| <= F`` function inside a depth-``h`` cell."""
    if not 0 < rho < 1:
        raise ValueError("rho must lie in (0, 1)")
    if F <= 0:
        raise ValueError("F must be positive")
    if h < 0:
        raise ValueError("depth must be non-negative")
    return F * g_bound(model, v1 * rho ** h)
