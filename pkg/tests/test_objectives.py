import math

import numpy as np
import pytest
from scipy import optimize

from adaptive_bkb.objectives import NoiseModel, registry_lookup, registry_names

MINIMIZERS = {
    "branin": [(-math.pi, 12.275), (math.pi, 2.275), (9.42478, 2.475)],
    "beale": [(3.0, 0.5)],
    "bohachevsky": [(0.0, 0.0)],
    "rosenbrock2": [(1.0, 1.0)],
    "six_hump_camel": [(0.0898, -0.7126), (-0.0898, 0.7126)],
    "ackley2": [(0.0, 0.0)],
    "trid2": [(2.0, 2.0)],
    "trid4": [(4.0, 6.0, 6.0, 4.0)],
    "hartmann3": [(0.114614, 0.555649, 0.852547)],
    "hartmann6": [(0.20169, 0.150011, 0.476874, 0.275332, 0.311652, 0.6573)],
    "levy6": [(1.0,) * 6],
    "rastrigin8": [(0.0,) * 8],
    "dixon_price10": [tuple(2 ** (-(2 ** i - 2) / 2 ** i) for i in range(1, 11))],
    "ackley30": [(0.0,) * 30],
}


def test_registry_contains_required_functions():
    required = {"branin", "beale", "bohachevsky", "rosenbrock2", "six_hump_camel", "ackley2",
                "ackley5", "ackley30", "trid2", "trid4", "hartmann3", "hartmann6", "shekel",
                "levy6", "levy8", "rastrigin8", "dixon_price10"}
    assert required <= set(registry_names())


def test_boxes():
    b = registry_lookup("branin").domain
    np.testing.assert_array_equal(b.lower, [-5, 0])
    np.testing.assert_array_equal(b.upper, [10, 15])
    h = registry_lookup("hartmann6").domain
    np.testing.assert_array_equal(h.lower, np.zeros(6))
    np.testing.assert_array_equal(h.upper, np.ones(6))


def test_aliases_and_unknown_names():
    assert registry_lookup("Six-Hump-Camel").name == "six_hump_camel"
    with pytest.raises(KeyError, match="branin"):
        registry_lookup("no-such-function")


def test_default_settings():
    d = registry_lookup("hartmann6").defaults
    assert (d.lengthscale, d.N, d.h_max) == (0.35, 5, 5)
    d = registry_lookup("branin").defaults
    assert (d.lengthscale, d.N, d.h_max) == (0.5, 3, 5)


@pytest.mark.parametrize("name", sorted(MINIMIZERS))
def test_value_at_known_minimizer(name):
    obj = registry_lookup(name)
    for x in MINIMIZERS[name]:
        assert obj(x) == pytest.approx(obj.known_optimum, abs=1e-4)


@pytest.mark.parametrize("name,start", [("shekel", (4.0,) * 4), ("hartmann3", (0.11, 0.55, 0.85)),
                                        ("hartmann6", (0.2, 0.15, 0.48, 0.28, 0.31, 0.66))])
def test_polished_minimum_matches_registry(name, start):
    obj = registry_lookup(name)
    res = optimize.minimize(obj, start, method="Nelder-Mead",
                            options=dict(xatol=1e-10, fatol=1e-13, maxiter=20000))
    assert res.fun == pytest.approx(obj.known_optimum, abs=1e-8)


@pytest.mark.parametrize("name", registry_names())
def test_no_sample_beats_known_optimum(name):
    obj = registry_lookup(name)
    rng = np.random.default_rng(0)
    lo, hi = obj.domain.lower, obj.domain.upper
    for x in lo + (hi - lo) * rng.random((3000, obj.dim)):
        assert obj(x) >= obj.known_optimum - 1e-9


def test_regret_orientation():
    obj = registry_lookup("branin")
    assert obj.regret(obj.known_optimum + 2.0) == pytest.approx(2.0)


def test_noise_model():
    rng = np.random.default_rng(0)
    assert NoiseModel("none", 1.0).sample(rng) == 0.0
    assert NoiseModel("gaussian", 0.0).sample(rng) == 0.0
    draws = [NoiseModel("gaussian", 0.5).sample(rng) for _ in range(20000)]
    assert np.std(draws) == pytest.approx(0.5, rel=0.03)
    with pytest.raises(ValueError):
        NoiseModel("gaussian", -1.0)
    with pytest.raises(ValueError):
        NoiseModel("laplace", 1.0)
