"""Exact and Nystrom-sketched GP posteriors with BKB resparsification.

Variances follow the ``1/lambda`` convention for both modes, so a sketched
posterior whose inducing set is the full dataset reproduces the exact one::

    sigma^2(x) = (k(x, x) - k_t(x)^T (K_t + lambda I)^{-1} k_t(x)) / lambda

The sketched posterior is evaluated in feature space.  With
``phi(x) = diag(s)^{-1/2} U^T k_S(x)`` built from the eigenpairs of ``K_S``
(eigenvalues below the numerical-rank floor dropped, which realises the
pseudo-inverse),
``A = Phi^T Phi + lambda I`` and training features ``Phi``::

    mu(x)      = phi(x)^T A^{-1} Phi^T y
    sigma^2(x) = (k(x, x) - ||phi(x)||^2) / lambda + phi(x)^T A^{-1} phi(x)
"""
from dataclasses import dataclass
import math

import numpy as np
from scipy import linalg

EXACT = "exact"
SKETCHED = "sketched"


@dataclass(frozen=True)
class ConfidenceParams:
    delta: float = 1e-5
    epsilon: float = 0.5
    F: float = 1.0
    kappa: float = 1.0
    lambda_exponent: int = 2

    def __post_init__(self):
        if not 0 < self.delta < 1:
            raise ValueError("delta must lie in (0, 1)")
        if not 0 < self.epsilon < 1:
            raise ValueError("epsilon must lie in (0, 1)")
        if not self.F > 0:
            raise ValueError("F must be positive")
        if not self.kappa >= 1:
            raise ValueError("kappa must be >= 1")
        if self.lambda_exponent not in (1, 2):
            raise ValueError("lambda_exponent must be 1 or 2")

    @property
    def alpha_bar(self):
        return (1 + self.epsilon) / (1 - self.epsilon)


def default_qbar(alpha_bar, kappa, t):
    """Oversampling constant used when none is configured."""
    return alpha_bar * math.log(kappa ** 2 * max(t, 1))


@dataclass
class InducingSet:
    """Inducing positions plus the eigen-factors of ``K_S`` kept above threshold."""

    indices: np.ndarray
    points: np.ndarray
    eigvecs: np.ndarray
    eigvals: np.ndarray

    def __len__(self):
        return len(self.indices)

    @classmethod
    def build(cls, kernel, X, indices, rtol=None):
        """``rtol=None`` uses the numerical-rank floor ``m * eps`` relative to the
        largest eigenvalue; anything below it is rounding noise, and repeated
        evaluations of one centroid make such eigenvalues routine."""
        indices = np.asarray(indices, dtype=int)
        pts = X[indices]
        K_S = kernel.matrix(pts, pts)
        s, U = linalg.eigh(K_S)
        if rtol is None:
            rtol = len(indices) * np.finfo(float).eps
        keep = s > rtol * max(s[-1], 0.0) if s.size else np.zeros(0, bool)
        return cls(indices, pts, U[:, keep], s[keep])

    def features(self, kernel, X):
        """Nystrom features ``phi(x)`` for the rows of ``X``."""
        return (kernel.matrix(X, self.points) @ self.eigvecs) / np.sqrt(self.eigvals)


def nystrom_kernel(kernel, inducing, x, x2):
    """``k_S(x)^T K_S^+ k_S(x2)``."""
    if len(inducing) == 0:
        raise ValueError("empty inducing set")
    a = inducing.features(kernel, np.atleast_2d(x))
    b = inducing.features(kernel, np.atleast_2d(x2))
    return float(a[0] @ b[0])


class PosteriorModel:
    """Sequential GP posterior over a growing dataset.

    ``mode`` is ``"exact"`` or ``"sketched"``.  In sketched mode every
    :meth:`append` resamples the inducing set with ``rng``; ``qbar`` fixes the
    oversampling constant, otherwise :func:`default_qbar` is used with
    ``alpha_bar`` and ``kappa``.
    """

    def __init__(self, kernel, lam, mode=SKETCHED, *, qbar=None, alpha_bar=3.0, kappa=1.0,
                 rng=None, pinv_rtol=None, dim=None):
        if not lam > 0:
            raise ValueError("lambda must be positive")
        if mode not in (EXACT, SKETCHED):
            raise ValueError(f"unknown posterior mode {mode!r}")
        if qbar is not None and not qbar > 0:
            raise ValueError("qbar must be positive")
        self.kernel = kernel
        self.lam = float(lam)
        self.mode = mode
        self.qbar = qbar
        self.alpha_bar = alpha_bar
        self.kappa = kappa
        self.rng = rng if rng is not None else np.random.default_rng()
        self.pinv_rtol = pinv_rtol
        self._X = np.empty((0, dim or 0))
        self._y = np.empty(0)
        self.variance_history = []
        self.inducing = None
        self._prev_variances = np.empty(0)
        self._version = 0
        self._observed_cache = None
        # exact state
        self._chol = np.empty((0, 0))
        self._alpha = np.empty(0)
        # sketched state
        self._A_chol = None
        self._w = None

    # -- data -------------------------------------------------------------
    @property
    def t(self):
        return len(self._y)

    @property
    def X(self):
        return self._X

    @property
    def y(self):
        return self._y

    @property
    def version(self):
        """Counter bumped whenever predictions may change."""
        return self._version

    # -- prediction ---------------------------------------------------------
    def predict(self, Xq):
        """Posterior mean and standard deviation at the rows of ``Xq``."""
        Xq = np.atleast_2d(np.asarray(Xq, dtype=float))
        if self.t:
            if Xq.shape[1] != self._X.shape[1]:
                raise ValueError(f"dimension mismatch: {Xq.shape[1]} vs {self._X.shape[1]}")
        if self.t == 0:
            var = self.kernel.diag(Xq) / self.lam
            return np.zeros(len(Xq)), np.sqrt(var)
        if self.mode == EXACT:
            mu, var = self._predict_exact(Xq)
        else:
            mu, var = self._predict_sketched(Xq)
        return mu, np.sqrt(np.maximum(var, 0.0))

    def _predict_exact(self, Xq):
        Kq = self.kernel.matrix(Xq, self._X)
        mu = Kq @ self._alpha
        V = linalg.solve_triangular(self._chol, Kq.T, lower=True, check_finite=False)
        var = (self.kernel.diag(Xq) - np.einsum("ij,ij->j", V, V)) / self.lam
        return mu, var

    def _predict_sketched(self, Xq):
        phi = self.inducing.features(self.kernel, Xq)
        mu = phi @ self._w
        B = linalg.solve_triangular(self._A_chol, phi.T, lower=True, check_finite=False)
        var = (self.kernel.diag(Xq) - np.einsum("ij,ij->i", phi, phi)) / self.lam
        var += np.einsum("ij,ij->j", B, B)
        return mu, var

    def predict_observed(self):
        """``(mu, sigma)`` at every observed point, cached per model version."""
        cache = self._observed_cache
        if cache is None or cache[0] != self._version:
            cache = (self._version, self.predict(self._X))
            self._observed_cache = cache
        return cache[1]

    # -- updates ------------------------------------------------------------
    def append(self, x, y):
        """Add one observation; in sketched mode the inducing set is resampled."""
        x = np.atleast_1d(np.asarray(x, dtype=float))
        if self.t == 0 and self._X.shape[1] != x.size:
            self._X = np.empty((0, x.size))
        X_new = np.vstack([self._X, x[None, :]])
        if self.mode == SKETCHED:
            # selection-time variances of all points, the latest one included
            _, sig = self.predict(X_new)
            self._prev_variances = sig ** 2
            sel_var = self._prev_variances[-1]
        else:
            sel_var = self.predict(x[None, :])[1][0] ** 2
        self.variance_history.append(float(sel_var))
        old_X = self._X
        self._X = X_new
        self._y = np.append(self._y, float(y))
        if self.mode == EXACT:
            self._extend_cholesky(old_X, x)
            self._version += 1
        elif self.t == 1:
            # nothing to sample: the latest point is always kept
            self.set_inducing([0])
        else:
            self.resparsify(self._current_qbar(), self.rng)
        return self

    def _extend_cholesky(self, old_X, x):
        n = old_X.shape[0]
        kxx = self.kernel.diag(x[None, :])[0] + self.lam
        L = np.zeros((n + 1, n + 1))
        if n:
            c = self.kernel.matrix(old_X, x[None, :])[:, 0]
            l = linalg.solve_triangular(self._chol, c, lower=True, check_finite=False)
            d = kxx - l @ l
            L[:n, :n] = self._chol
            L[n, :n] = l
        else:
            d = kxx
        if not d > 0:
            raise np.linalg.LinAlgError("kernel matrix lost positive definiteness")
        L[n, n] = math.sqrt(d)
        self._chol = L
        self._alpha = linalg.cho_solve((L, True), self._y, check_finite=False)

    def _current_qbar(self):
        if self.qbar is not None:
            return self.qbar
        return default_qbar(self.alpha_bar, self.kappa, self.t)

    def inclusion_probabilities(self, qbar):
        return np.minimum(qbar * self._prev_variances, 1.0)

    def resparsify(self, qbar, rng):
        """Resample the inducing set from the previous-step variances.

        Point ``i`` is kept independently with probability
        ``min(qbar * sigma_{t-1}^2(x_i), 1)``; the latest point is always kept.
        """
        if self.mode != SKETCHED:
            raise ValueError("resparsify needs a sketched posterior")
        if self.t == 0:
            raise ValueError("resparsify needs at least one observation")
        if not qbar > 0:
            raise ValueError("qbar must be positive")
        p = self.inclusion_probabilities(qbar)
        keep = rng.random(self.t) < p
        keep[-1] = True
        self.set_inducing(np.flatnonzero(keep))
        return self.inducing

    def set_inducing(self, indices):
        """Install an inducing set and rebuild the feature-space factors."""
        self.inducing = InducingSet.build(self.kernel, self._X, indices, self.pinv_rtol)
        Phi = self.inducing.features(self.kernel, self._X)
        # K_S U s^{-1/2} = U s^{1/2} on the inducing rows; the closed form
        # keeps rounding error from being amplified by tiny eigenvalues
        Phi[self.inducing.indices] = self.inducing.eigvecs * np.sqrt(self.inducing.eigvals)
        A = Phi.T @ Phi + self.lam * np.eye(Phi.shape[1])
        self._A_chol = linalg.cholesky(A, lower=True, check_finite=False)
        self._w = linalg.cho_solve((self._A_chol, True), Phi.T @ self._y, check_finite=False)
        self._version += 1

    # -- summaries ----------------------------------------------------------
    @property
    def inducing_size(self):
        if self.mode == EXACT:
            return self.t
        return 0 if self.inducing is None else len(self.inducing)

    def effective_dimension(self):
        """Running sum of selection-time variances, in kernel units.

        ``variance_history`` holds ``1/lambda``-scaled values, hence the
        factor ``lambda``; each term is then at most ``kappa**2``.
        """
        return self.lam * float(sum(self.variance_history))


def predict_exact(model, x):
    if model.mode != EXACT:
        raise ValueError("model is not exact")
    mu, sig = model.predict(np.atleast_2d(x))
    return float(mu[0]), float(sig[0])


def predict_sketched(model, x):
    if model.mode != SKETCHED:
        raise ValueError("model is not sketched")
    mu, sig = model.predict(np.atleast_2d(x))
    return float(mu[0]), float(sig[0])


def beta(params, model):
    """Confidence width for the current model.

    ``2 lam^e sqrt(zeta + log(1/delta)) + (1 + 1/sqrt(1 - eps)) sqrt(lam) F`` with
    ``zeta = alpha_bar log(kappa^2 t) sum_s sigma_t^2(x_s)``.
    """
    t = model.t
    if t < 1:
        raise ValueError("beta needs at least one observation")
    _, sig = model.predict_observed()
    zeta = params.alpha_bar * math.log(params.kappa ** 2 * t) * float(np.sum(sig ** 2))
    return _beta_value(params, model.lam, zeta)


def beta_prior(params, lam):
    """Width used before the first observation (``t = 1``, so ``zeta = 0``)."""
    return _beta_value(params, lam, 0.0)


def _beta_value(params, lam, zeta):
    lam_term = 2.0 * lam ** params.lambda_exponent * math.sqrt(zeta + math.log(1.0 / params.delta))
    return lam_term + (1.0 + 1.0 / math.sqrt(1.0 - params.epsilon)) * math.sqrt(lam) * params.F


def effective_dimension(model):
    return model.effective_dimension()
