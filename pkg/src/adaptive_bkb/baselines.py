"""Fixed-discretization baselines: GP-UCB and BKB on a candidate grid."""
from dataclasses import dataclass
import itertools
import math
import time

import numpy as np

from .optimizer import adaptive_exact
from .posterior import SKETCHED, ConfidenceParams, PosteriorModel, beta, beta_prior

DEFAULT_GRID_CAP = 10 ** 6


@dataclass
class Grid:
    points: np.ndarray
    provenance: str
    size_param: int
    seed: object = None

    def __len__(self):
        return len(self.points)


def build_cartesian_grid(domain, points_per_dim, cap=DEFAULT_GRID_CAP):
    """Inclusive evenly spaced grid per dimension and their Cartesian product."""
    if points_per_dim < 2:
        raise ValueError("points_per_dim must be at least 2")
    size = points_per_dim ** domain.dim
    if size > cap:
        raise ValueError(f"grid of {size} points exceeds the cap of {cap}")
    axes = [np.linspace(lo, hi, points_per_dim) for lo, hi in zip(domain.lower, domain.upper)]
    pts = np.array(list(itertools.product(*axes)), dtype=float).reshape(size, domain.dim)
    return Grid(pts, "cartesian", points_per_dim)


def build_random_grid(domain, count, seed):
    if count < 1:
        raise ValueError("count must be at least 1")
    rng = np.random.default_rng(seed)
    pts = domain.lower + rng.random((count, domain.dim)) * (domain.upper - domain.lower)
    return Grid(pts, "random", count, seed)


def default_points_per_dim(dim):
    if dim <= 4:
        return 15
    if dim <= 6:
        return 10
    return 5


class GridUCB:
    """GP-UCB (``mode="exact"``) or BKB (``mode="sketched"``) over a fixed grid.

    Exposes the same ``run``/``t``/``model`` surface as the adaptive optimizer
    so the experiment runner can drive either.
    """

    def __init__(self, grid, kernel, budget, *, lam=0.01, params=None, mode=SKETCHED,
                 qbar=None, seed=None, rng=None):
        if len(grid) == 0:
            raise ValueError("empty grid")
        self.grid = grid
        self.budget = int(budget)
        self.params = params if params is not None else ConfidenceParams()
        if rng is None:
            rng = np.random.default_rng(seed)
        self.model = PosteriorModel(kernel, lam, mode, qbar=qbar, alpha_bar=self.params.alpha_bar,
                                    kappa=self.params.kappa, rng=rng, dim=grid.points.shape[1])
        self.t = 0
        self.beta = beta_prior(self.params, lam)
        self.terminated = False
        self.stop_reason = None
        self.early_stop_step = None
        self.max_leaf_size = len(grid)

    @property
    def leaf_size(self):
        return len(self.grid)

    @property
    def effective_dimension(self):
        return self.model.effective_dimension()

    def select(self):
        mu, sig = self.model.predict(self.grid.points)
        # argmax returns the first maximum, so ties go to grid order
        return int(np.argmax(mu + self.beta * sig))

    def step(self, objective):
        k = self.select()
        x = self.grid.points[k]
        y = float(objective(x))
        if not math.isfinite(y):
            raise ValueError(f"objective returned non-finite value {y!r}")
        self.model.append(x, y)
        self.t += 1
        self.beta = beta(self.params, self.model)
        if self.t >= self.budget:
            self.terminated = True
            self.stop_reason = "budget"
        return x, y

    def run(self, objective, callback=None, time_threshold=None):
        start = time.perf_counter()
        while not self.terminated:
            if time_threshold is not None and time.perf_counter() - start >= time_threshold:
                self.stop_reason = "time"
                return True
            x, y = self.step(objective)
            if callback is not None:
                callback(self, x, y)
        return False


def run_grid_ucb(grid, mode, kernel, budget, objective, *, callback=None, **kw):
    opt = GridUCB(grid, kernel, budget, mode=mode, **kw)
    opt.run(objective, callback)
    return opt


def run_adaptive_exact(domain, kernel, budget, objective, *, callback=None, **kw):
    opt = adaptive_exact(domain, kernel, budget, **kw)
    opt.run(objective, callback)
    return opt

