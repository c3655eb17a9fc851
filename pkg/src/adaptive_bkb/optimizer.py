"""Adaptive-discretization GP-UCB over a partition tree (Ada-BKB).

The optimizer maximizes.  Each iteration picks the leaf with the largest
index ``I = min(ucb, parent_ucb + V[h-1]) + V[h]`` (``ucb + V[0]`` at the
root), then either refines it into ``N`` children when its confidence
width ``beta * sigma`` has fallen below ``V[h]`` (and ``h < h_max``) or
evaluates the objective at its centroid.  Leaves whose optimistic cell
bound ``ucb + V[h]`` drops below the best lower confidence bound are pruned.
"""
from dataclasses import dataclass
import logging
import math
import time
from typing import Optional

import numpy as np

from . import kernels as ks
from . import partition as pt
from .posterior import EXACT, SKETCHED, ConfidenceParams, PosteriorModel, beta, beta_prior

log = logging.getLogger(__name__)

EVALUATED = "evaluated"
EXPANDED = "expanded"
STOPPED = "stopped"


class LeafSetBoundError(AssertionError):
    pass


@dataclass
class LeafEntry:
    """Read-only view of one leaf."""

    cell: pt.Cell
    ucb: float
    sigma: float
    parent_ucb: Optional[float]
    index: float
    stale: bool

    @property
    def id(self):
        return self.cell.id


@dataclass
class StepOutcome:
    kind: str
    cell_id: Optional[pt.CellId]
    observed_value: Optional[float] = None
    wall_clock: float = 0.0
    leaf_size_after: int = 0
    inducing_size: int = 0
    pruned: int = 0


def index_value(ucb, V_h, parent_ucb=None, V_parent=None):
    if parent_ucb is None:
        return ucb + V_h
    return min(ucb, parent_ucb + V_parent) + V_h


class LeafSet:
    """Leaf cells stored column-wise so index updates are vectorized.

    Rows for the root carry ``nan`` in the parent columns.
    """

    def __init__(self, dim):
        self.cells = []
        self.centroids = np.empty((0, dim))
        self.parent_centroids = np.empty((0, dim))
        self.depth = np.empty(0, dtype=int)
        self.ucb = np.empty(0)
        self.sigma = np.empty(0)
        self.parent_ucb = np.empty(0)
        self.index = np.empty(0)
        self.stale = np.empty(0, dtype=bool)

    def __len__(self):
        return len(self.cells)

    def add(self, cells, parent_centroid=None, parent_ucb=math.nan):
        k = len(cells)
        dim = self.centroids.shape[1]
        pc = np.full((k, dim), math.nan) if parent_centroid is None else np.tile(parent_centroid, (k, 1))
        self.cells.extend(cells)
        self.centroids = np.vstack([self.centroids, [c.centroid for c in cells]])
        self.parent_centroids = np.vstack([self.parent_centroids, pc])
        self.depth = np.append(self.depth, [c.h for c in cells])
        self.ucb = np.append(self.ucb, np.full(k, math.nan))
        self.sigma = np.append(self.sigma, np.full(k, math.nan))
        self.parent_ucb = np.append(self.parent_ucb, np.full(k, parent_ucb))
        self.index = np.append(self.index, np.full(k, math.nan))
        self.stale = np.append(self.stale, np.ones(k, dtype=bool))
        return np.arange(len(self) - k, len(self))

    def keep(self, mask):
        self.cells = [c for c, m in zip(self.cells, mask) if m]
        for name in ("centroids", "parent_centroids", "depth", "ucb", "sigma",
                     "parent_ucb", "index", "stale"):
            setattr(self, name, getattr(self, name)[mask])

    def entry(self, k):
        pu = self.parent_ucb[k]
        return LeafEntry(self.cells[k], float(self.ucb[k]), float(self.sigma[k]),
                         None if math.isnan(pu) else float(pu), float(self.index[k]),
                         bool(self.stale[k]))


class AdaBKB:
    """State and loop of the adaptive optimizer.

    ``mode="exact"`` swaps the Nystrom posterior for the exact one, which is
    how the exact adaptive baseline is obtained.
    """

    def __init__(self, domain, kernel, budget, *, lam=0.01, params=None, N=3, h_max=None,
                 mode=SKETCHED, qbar=None, seed=None, rng=None, continue_after_stop=False,
                 check_leaf_bound=True, record_pruned=False):
        if budget < 1:
            raise ValueError("budget must be at least 1")
        self.domain = domain
        self.kernel = kernel
        self.budget = int(budget)
        self.params = params if params is not None else ConfidenceParams()
        self.smoothness = ks.SmoothnessModel.for_kernel(kernel)
        rho, _ = pt.geometry_constants(domain, N, 2 * domain.dim)
        theory_h = pt.default_h_max(self.budget, rho, self.smoothness.alpha)
        if h_max is None:
            h_max = theory_h
        elif h_max < theory_h:
            log.info("h_max=%d is below the depth %d suggested for budget %d", h_max, theory_h, budget)
        self.partition = pt.PartitionConfig.for_domain(domain, N, h_max)
        self.V = np.array([
            ks.variation_bound(self.smoothness, self.params.F, self.partition.v1, self.partition.rho, h)
            for h in range(h_max + 1)
        ])
        if rng is None:
            rng = np.random.default_rng(seed)
        self.model = PosteriorModel(kernel, lam, mode, qbar=qbar, alpha_bar=self.params.alpha_bar,
                                    kappa=self.params.kappa, rng=rng, dim=domain.dim)
        self.continue_after_stop = continue_after_stop
        self.check_leaf_bound = check_leaf_bound
        self.record_pruned = record_pruned

        self.leaves = LeafSet(domain.dim)
        self.leaves.add([pt.root(domain)])
        self.t = 0
        self.tau = 0
        self.beta = beta_prior(self.params, lam)
        self.best_lcb = -math.inf
        self.terminated = False
        self.stop_reason = None
        self.early_stop_step = None
        self.max_leaf_size = 1
        self.pruned_cells = []
        self._refresh()

    @property
    def N(self):
        return self.partition.N

    @property
    def h_max(self):
        return self.partition.h_max

    @property
    def leaf_bound(self):
        # with h_max = 0 the root is the only possible leaf
        return self.budget * self.N * max(self.h_max, 1)

    @property
    def effective_dimension(self):
        return self.model.effective_dimension()

    # -- index bookkeeping --------------------------------------------------
    def _refresh(self):
        """Recompute ucb and index of stale leaves against the current model."""
        L = self.leaves
        rows = np.flatnonzero(L.stale)
        if rows.size == 0:
            return
        mu, sig = self.model.predict(L.centroids[rows])
        L.ucb[rows] = mu + self.beta * sig
        L.sigma[rows] = sig
        has_parent = rows[L.depth[rows] > 0]
        if has_parent.size:
            P, inv = np.unique(L.parent_centroids[has_parent], axis=0, return_inverse=True)
            pmu, psig = self.model.predict(P)
            L.parent_ucb[has_parent] = (pmu + self.beta * psig)[inv.ravel()]
        self._set_index(rows)

    def _set_index(self, rows):
        L = self.leaves
        h = L.depth[rows]
        own = L.ucb[rows]
        via_parent = L.parent_ucb[rows] + self.V[np.maximum(h - 1, 0)]
        bound = np.where(h > 0, np.minimum(own, via_parent), own)
        L.index[rows] = bound + self.V[h]
        L.stale[rows] = False

    def select(self):
        """Row of the leaf with the largest index; ties go to (smaller h, smaller i)."""
        L = self.leaves
        if len(L) == 0:
            raise RuntimeError("empty leaf set")
        self._refresh()
        best = np.flatnonzero(L.index == L.index.max())
        if best.size == 1:
            return int(best[0])
        return int(min(best, key=lambda k: (L.cells[k].id.h, L.cells[k].id.i)))

    def prune(self, rows=None):
        """Drop leaves with ``ucb + V[h] < best_lcb``; returns how many were dropped."""
        L = self.leaves
        rows = np.arange(len(L)) if rows is None else np.asarray(rows)
        doomed = rows[L.ucb[rows] + self.V[L.depth[rows]] < self.best_lcb]
        if doomed.size == 0:
            return 0
        if self.record_pruned:
            self.pruned_cells.extend((self.t, L.cells[k]) for k in doomed)
        mask = np.ones(len(L), dtype=bool)
        mask[doomed] = False
        L.keep(mask)
        return int(doomed.size)

    def check_early_stop(self):
        L = self.leaves
        if len(L) == 0:
            return True
        return bool(len(L) == 1 and L.depth[0] == self.h_max)

    # -- the loop -----------------------------------------------------------
    def _expand(self, k):
        L = self.leaves
        cell, ucb = L.cells[k], L.ucb[k]
        mask = np.ones(len(L), dtype=bool)
        mask[k] = False
        L.keep(mask)
        rows = L.add(pt.children(cell, self.N), parent_centroid=cell.centroid, parent_ucb=ucb)
        # model unchanged: only the new children need an index
        mu, sig = self.model.predict(L.centroids[rows])
        L.ucb[rows] = mu + self.beta * sig
        L.sigma[rows] = sig
        self._set_index(rows)
        return self.prune(rows)

    def _evaluate(self, k, objective):
        x = self.leaves.cells[k].centroid
        y = float(objective(x))
        if not math.isfinite(y):
            raise ValueError(f"objective returned non-finite value {y!r}")
        self.model.append(x, y)
        self.t += 1
        self.beta = beta(self.params, self.model)
        mu, sig = self.model.predict_observed()
        self.best_lcb = float(np.max(mu - self.beta * sig))
        self.leaves.stale[:] = True
        self._refresh()
        return y, self.prune()

    def step(self, objective):
        """One iteration: expand or evaluate the best leaf, then prune."""
        start = time.perf_counter()
        if self.terminated:
            return StepOutcome(STOPPED, None, leaf_size_after=len(self.leaves),
                               inducing_size=self.model.inducing_size)
        k = self.select()
        L = self.leaves
        cell = L.cells[k]
        h = cell.h
        y = None
        if self.beta * L.sigma[k] <= self.V[h] and h < self.h_max:
            kind = EXPANDED
            pruned = self._expand(k)
        else:
            kind = EVALUATED
            y, pruned = self._evaluate(k, objective)
        self.tau += 1
        self.max_leaf_size = max(self.max_leaf_size, len(L))
        if self.check_leaf_bound and len(L) > self.leaf_bound:
            raise LeafSetBoundError(f"leaf set size {len(L)} exceeds {self.leaf_bound}")
        if self.check_early_stop():
            if self.early_stop_step is None:
                self.early_stop_step = self.t
            if len(L) == 0 or not self.continue_after_stop:
                self.terminated = True
                self.stop_reason = "early-stop"
        if self.t >= self.budget and not self.terminated:
            self.terminated = True
            self.stop_reason = "budget"
        return StepOutcome(kind, cell.id, y, time.perf_counter() - start,
                           len(L), self.model.inducing_size, pruned)

    def run(self, objective, callback=None, time_threshold=None):
        """Iterate until the budget is spent, early stop fires or time runs out.

        ``callback(optimizer, x, y)`` is invoked after every evaluation.
        Returns ``True`` when the run was cut short by ``time_threshold``.
        """
        start = time.perf_counter()
        while not self.terminated:
            if time_threshold is not None and time.perf_counter() - start >= time_threshold:
                self.stop_reason = "time"
                return True
            out = self.step(objective)
            if out.kind == EVALUATED and callback is not None:
                callback(self, self.model.X[-1], out.observed_value)
        return False

    def leaf_entries(self):
        self._refresh()
        return [self.leaves.entry(k) for k in range(len(self.leaves))]


def adaptive_exact(domain, kernel, budget, **kw):
    """Same loop with the exact posterior in place of the Nystrom sketch."""
    kw["mode"] = EXACT
    return AdaBKB(domain, kernel, budget, **kw)
