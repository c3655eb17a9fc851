"""Synthetic benchmark functions (minimization) and the objective registry."""
from dataclasses import dataclass
import math
from typing import Callable, Optional

import numpy as np

from .partition import Domain


def branin(x):
    x1, x2 = x[0], x[1]
    a, b, c = 1.0, 5.1 / (4 * math.pi ** 2), 5 / math.pi
    r, s, t = 6.0, 10.0, 1 / (8 * math.pi)
    return a * (x2 - b * x1 ** 2 + c * x1 - r) ** 2 + s * (1 - t) * math.cos(x1) + s


def beale(x):
    x1, x2 = x[0], x[1]
    return ((1.5 - x1 + x1 * x2) ** 2 + (2.25 - x1 + x1 * x2 ** 2) ** 2
            + (2.625 - x1 + x1 * x2 ** 3) ** 2)


def bohachevsky(x):
    x1, x2 = x[0], x[1]
    return (x1 ** 2 + 2 * x2 ** 2 - 0.3 * math.cos(3 * math.pi * x1)
            - 0.4 * math.cos(4 * math.pi * x2) + 0.7)


def rosenbrock(x):
    x = np.asarray(x)
    return float(np.sum(100.0 * (x[1:] - x[:-1] ** 2) ** 2 + (x[:-1] - 1) ** 2))


def six_hump_camel(x):
    x1, x2 = x[0], x[1]
    return ((4 - 2.1 * x1 ** 2 + x1 ** 4 / 3) * x1 ** 2 + x1 * x2
            + (-4 + 4 * x2 ** 2) * x2 ** 2)


def ackley(x):
    x = np.asarray(x)
    d = x.size
    a, b, c = 20.0, 0.2, 2 * math.pi
    s1 = math.sqrt(float(np.sum(x ** 2)) / d)
    s2 = float(np.sum(np.cos(c * x))) / d
    return -a * math.exp(-b * s1) - math.exp(s2) + a + math.e


def trid(x):
    x = np.asarray(x)
    return float(np.sum((x - 1) ** 2) - np.sum(x[1:] * x[:-1]))


_H3_A = np.array([[3.0, 10, 30], [0.1, 10, 35], [3.0, 10, 30], [0.1, 10, 35]])
_H3_P = 1e-4 * np.array([[3689, 1170, 2673], [4699, 4387, 7470],
                         [1091, 8732, 5547], [381, 5743, 8828]])
_H6_A = np.array([[10, 3, 17, 3.5, 1.7, 8], [0.05, 10, 17, 0.1, 8, 14],
                  [3, 3.5, 1.7, 10, 17, 8], [17, 8, 0.05, 10, 0.1, 14]])
_H6_P = 1e-4 * np.array([[1312, 1696, 5569, 124, 8283, 5886],
                         [2329, 4135, 8307, 3736, 1004, 9991],
                         [2348, 1451, 3522, 2883, 3047, 6650],
                         [4047, 8828, 8732, 5743, 1091, 381]])
_H_ALPHA = np.array([1.0, 1.2, 3.0, 3.2])


def hartmann3(x):
    x = np.asarray(x)
    return -float(_H_ALPHA @ np.exp(-np.sum(_H3_A * (x - _H3_P) ** 2, axis=1)))


def hartmann6(x):
    x = np.asarray(x)
    return -float(_H_ALPHA @ np.exp(-np.sum(_H6_A * (x - _H6_P) ** 2, axis=1)))


_SHEKEL_BETA = 0.1 * np.array([1, 2, 2, 4, 4, 6, 3, 7, 5, 5], dtype=float)
_SHEKEL_C = np.array([
    [4.0, 1.0, 8.0, 6.0, 3.0, 2.0, 5.0, 8.0, 6.0, 7.0],
    [4.0, 1.0, 8.0, 6.0, 7.0, 9.0, 3.0, 1.0, 2.0, 3.6],
    [4.0, 1.0, 8.0, 6.0, 3.0, 2.0, 5.0, 8.0, 6.0, 7.0],
    [4.0, 1.0, 8.0, 6.0, 7.0, 9.0, 3.0, 1.0, 2.0, 3.6],
])


def shekel(x):
    x = np.asarray(x)
    diff = x[:, None] - _SHEKEL_C
    return -float(np.sum(1.0 / (np.sum(diff ** 2, axis=0) + _SHEKEL_BETA)))


def levy(x):
    w = 1 + (np.asarray(x) - 1) / 4
    head = math.sin(math.pi * w[0]) ** 2
    mid = np.sum((w[:-1] - 1) ** 2 * (1 + 10 * np.sin(math.pi * w[:-1] + 1) ** 2))
    tail = (w[-1] - 1) ** 2 * (1 + math.sin(2 * math.pi * w[-1]) ** 2)
    return float(head + mid + tail)


def rastrigin(x):
    x = np.asarray(x)
    return float(10 * x.size + np.sum(x ** 2 - 10 * np.cos(2 * math.pi * x)))


def dixon_price(x):
    x = np.asarray(x)
    i = np.arange(2, x.size + 1)
    return float((x[0] - 1) ** 2 + np.sum(i * (2 * x[1:] ** 2 - x[:-1]) ** 2))


@dataclass(frozen=True)
class Defaults:
    """Per-function optimizer settings: kernel lengthscale, depth cap, branching."""

    lengthscale: float
    h_max: int
    N: int


@dataclass
class Objective:
    name: str
    domain: Domain
    evaluate: Callable
    known_optimum: Optional[float] = None
    minimize: bool = True
    defaults: Optional[Defaults] = None
    optimum_assumed: bool = False

    @property
    def dim(self):
        return self.domain.dim

    def __call__(self, x):
        return float(self.evaluate(np.asarray(x, dtype=float)))

    def regret(self, f):
        if self.known_optimum is None:
            return None
        return f - self.known_optimum if self.minimize else self.known_optimum - f


@dataclass(frozen=True)
class NoiseModel:
    kind: str = "gaussian"
    sigma: float = 0.01

    def __post_init__(self):
        if self.kind not in ("gaussian", "none"):
            raise ValueError(f"unknown noise kind {self.kind!r}")
        if not self.sigma >= 0:
            raise ValueError("noise sigma must be non-negative")

    def sample(self, rng):
        if self.kind == "none" or self.sigma == 0:
            return 0.0
        return float(rng.normal(0.0, self.sigma))


def _entry(name, fn, lo, hi, dim, opt, defaults):
    lo = np.broadcast_to(np.asarray(lo, dtype=float), (dim,))
    hi = np.broadcast_to(np.asarray(hi, dtype=float), (dim,))
    return name, (fn, lo, hi, opt, Defaults(*defaults))


_REGISTRY = dict([
    _entry("branin", branin, [-5.0, 0.0], [10.0, 15.0], 2, 0.397887357729739, (0.5, 5, 3)),
    _entry("beale", beale, -4.5, 4.5, 2, 0.0, (1.0, 5, 3)),
    _entry("bohachevsky", bohachevsky, [-10.0, -180.0], [190.0, 20.0], 2, 0.0, (1.70, 9, 3)),
    _entry("rosenbrock2", rosenbrock, -5.0, 10.0, 2, 0.0, (0.70, 10, 11)),
    _entry("six_hump_camel", six_hump_camel, [-2.0, -3.0], [2.0, 3.0], 2, -1.031628453489877,
           (0.5, 6, 5)),
    _entry("ackley2", ackley, -10.0, 52.768, 2, 0.0, (3.5, 7, 3)),
    _entry("trid2", trid, -4.0, 4.0, 2, -2.0, (1.5, 7, 5)),
    _entry("hartmann3", hartmann3, 0.0, 1.0, 3, -3.86277978733266, (0.5, 7, 3)),
    _entry("trid4", trid, -16.0, 16.0, 4, -16.0, (10.75, 7, 13)),
    _entry("shekel", shekel, 0.0, 10.0, 4, -10.5364431534835, (1.75, 6, 9)),
    _entry("ackley5", ackley, -10.0, 52.768, 5, 0.0, (5.0, 6, 3)),
    _entry("hartmann6", hartmann6, 0.0, 1.0, 6, -3.32236801141551, (0.35, 5, 5)),
    _entry("levy6", levy, -10.0, 10.0, 6, 0.0, (5.0, 7, 5)),
    _entry("levy8", levy, -10.0, 10.0, 8, 0.0, (2.5, 7, 3)),
    _entry("rastrigin8", rastrigin, -1.12, 5.12, 8, 0.0, (7.0, 10, 3)),
    _entry("dixon_price10", dixon_price, -10.0, 10.0, 10, 0.0, (2.0, 10, 5)),
    _entry("ackley30", ackley, -10.0, 52.768, 30, 0.0, (20.50, 300, 3)),
])

_ALIASES = {
    "rosenbrock": "rosenbrock2",
    "sixhumpcamel": "six_hump_camel",
    "six-hump-camel": "six_hump_camel",
    "dixon-price10": "dixon_price10",
    "dixonprice10": "dixon_price10",
}


def registry_names():
    return sorted(_REGISTRY)


def registry_lookup(name):
    key = name.strip().lower().replace(" ", "_")
    key = _ALIASES.get(key, key)
    if key not in _REGISTRY:
        raise KeyError(f"unknown objective {name!r}; known: {', '.join(registry_names())}")
    fn, lo, hi, opt, defaults = _REGISTRY[key]
    return Objective(key, Domain(lo, hi), fn, opt, True, defaults)
