"""Box partition tree with N-way splits along the longest side."""
from dataclasses import dataclass
import math
from typing import NamedTuple

import numpy as np

# relative tolerance under which two side lengths count as equally long
_TIE_RTOL = 1e-9


@dataclass(frozen=True)
class Domain:
    lower: np.ndarray
    upper: np.ndarray

    def __init__(self, lower, upper):
        lo = np.atleast_1d(np.asarray(lower, dtype=float)).copy()
        hi = np.atleast_1d(np.asarray(upper, dtype=float)).copy()
        if lo.shape != hi.shape or lo.ndim != 1 or lo.size == 0:
            raise ValueError("bounds must be 1-d arrays of equal, non-zero length")
        if not (np.all(np.isfinite(lo)) and np.all(np.isfinite(hi))):
            raise ValueError("bounds must be finite")
        if np.any(lo >= hi):
            raise ValueError("every lower bound must be below its upper bound")
        lo.setflags(write=False)
        hi.setflags(write=False)
        object.__setattr__(self, "lower", lo)
        object.__setattr__(self, "upper", hi)

    @classmethod
    def cube(cls, lo, hi, dim):
        return cls([lo] * dim, [hi] * dim)

    @property
    def dim(self):
        return self.lower.size

    def contains(self, x, atol=0.0):
        x = np.asarray(x)
        return bool(np.all(x >= self.lower - atol) and np.all(x <= self.upper + atol))


class CellId(NamedTuple):
    h: int
    i: int


@dataclass(frozen=True, eq=False)
class Cell:
    id: CellId
    lower: np.ndarray
    upper: np.ndarray

    def __post_init__(self):
        c = 0.5 * (self.lower + self.upper)
        c.setflags(write=False)
        object.__setattr__(self, "centroid", c)

    @property
    def h(self):
        return self.id.h

    @property
    def widths(self):
        return self.upper - self.lower

    def half_diameter(self):
        return 0.5 * float(np.linalg.norm(self.widths))

    def contains(self, x):
        x = np.asarray(x)
        return bool(np.all(x >= self.lower) and np.all(x <= self.upper))

    def __repr__(self):
        return f"Cell(h={self.id.h}, i={self.id.i})"


@dataclass(frozen=True)
class PartitionConfig:
    N: int
    rho: float
    v1: float
    h_max: int
    v2: float = 1.0  # carried for completeness; no runtime role

    @classmethod
    def for_domain(cls, domain, N, h_max):
        rho, v1 = geometry_constants(domain, N, max(h_max, 2 * domain.dim))
        return cls(N=N, rho=rho, v1=v1, h_max=h_max)

    def __post_init__(self):
        if self.N < 2:
            raise ValueError("N must be at least 2")
        if not 0 < self.rho < 1:
            raise ValueError("rho must lie in (0, 1)")
        if self.h_max < 0:
            raise ValueError("h_max must be non-negative")


def root(domain):
    return Cell(CellId(0, 1), domain.lower.copy(), domain.upper.copy())


def split_dimension(widths):
    """Longest side; ties go to the lowest dimension index."""
    widths = np.asarray(widths)
    return int(np.flatnonzero(widths >= widths.max() * (1.0 - _TIE_RTOL))[0])


def children(cell, N):
    """Split ``cell`` into ``N`` equal slabs along its longest side."""
    if N < 2:
        raise ValueError("N must be at least 2")
    j = split_dimension(cell.widths)
    lo, hi = cell.lower[j], cell.upper[j]
    cuts = [lo + (hi - lo) * k / N for k in range(N)] + [hi]
    h, i = cell.id
    out = []
    for k in range(N):
        lower = cell.lower.copy()
        upper = cell.upper.copy()
        lower[j], upper[j] = cuts[k], cuts[k + 1]
        out.append(Cell(CellId(h + 1, N * (i - 1) + 1 + k), lower, upper))
    return out


def parent(cell_id, N):
    h, i = cell_id
    if h < 1:
        raise ValueError("the root cell has no parent")
    return CellId(h - 1, (i - 1) // N + 1)


def depth_widths(domain, N, depth):
    """Side lengths shared by every cell at each depth ``0..depth``."""
    w = domain.upper - domain.lower
    out = [w.copy()]
    for _ in range(depth):
        w = w.copy()
        w[split_dimension(w)] /= N
        out.append(w)
    return out


def geometry_constants(domain, N, probe_depth):
    """Shrink rate ``rho = N**(-1/p)`` and the smallest ``v1`` with
    ``half_diameter(h) <= v1 * rho**h`` for every depth up to ``probe_depth``."""
    p = domain.dim
    if probe_depth < p:
        raise ValueError("probe_depth must be at least the domain dimension")
    if N < 2:
        raise ValueError("N must be at least 2")
    rho = N ** (-1.0 / p)
    half = [0.5 * float(np.linalg.norm(w)) for w in depth_widths(domain, N, probe_depth)]
    v1 = max(hd / rho ** h for h, hd in enumerate(half))
    for h, hd in enumerate(half):
        if hd > v1 * rho ** h * (1 + 1e-12):
            raise AssertionError(f"cell radius envelope violated at depth {h}")
    return rho, v1


def default_h_max(T, rho, alpha=1.0):
    """Smallest depth with ``h_max >= log(T) / (2 alpha log(1/rho))``."""
    return max(1, math.ceil(math.log(max(T, 2)) / (2 * alpha * math.log(1 / rho))))
