import itertools
import math

import numpy as np
import pytest

from adaptive_bkb.partition import (Cell, CellId, Domain, PartitionConfig, children, default_h_max,
                                    depth_widths, geometry_constants, parent, root, split_dimension)


def test_root_centroids():
    np.testing.assert_array_equal(root(Domain.cube(0, 1, 2)).centroid, [0.5, 0.5])
    np.testing.assert_array_equal(root(Domain([-5, 0], [10, 15])).centroid, [2.5, 7.5])
    np.testing.assert_array_equal(root(Domain.cube(0, 10, 4)).centroid, [5, 5, 5, 5])
    assert root(Domain.cube(0, 1, 2)).id == CellId(0, 1)


def test_children_of_unit_square():
    kids = children(root(Domain.cube(0, 1, 2)), 3)
    np.testing.assert_allclose([c.lower for c in kids], [[0, 0], [1 / 3, 0], [2 / 3, 0]])
    np.testing.assert_allclose([c.upper for c in kids], [[1 / 3, 1], [2 / 3, 1], [1, 1]])
    assert [c.id for c in kids] == [(1, 1), (1, 2), (1, 3)]


def test_child_ids():
    cell = Cell(CellId(1, 2), np.zeros(2), np.ones(2))
    assert [c.id for c in children(cell, 3)] == [(2, 4), (2, 5), (2, 6)]


def test_split_along_longest_side():
    kids = children(root(Domain([0, 0], [1, 3])), 3)
    np.testing.assert_allclose([c.lower for c in kids], [[0, 0], [0, 1], [0, 2]])
    np.testing.assert_allclose([c.upper for c in kids], [[1, 1], [1, 2], [1, 3]])


def test_tie_goes_to_lowest_dimension():
    assert split_dimension([2.0, 2.0, 1.0]) == 0
    assert split_dimension([1.0, 2.0, 2.0 * (1 - 1e-12)]) == 1


def test_parent_examples():
    assert parent(CellId(2, 5), 3) == (1, 2)
    assert parent(CellId(1, 1), 5) == (0, 1)
    with pytest.raises(ValueError):
        parent(CellId(0, 1), 3)


@pytest.mark.parametrize("N", [2, 3, 5])
def test_ids_are_a_bijection_and_invert_parent(N):
    dom = Domain.cube(0, 1, 2)
    level = [root(dom)]
    for h in range(1, 4 if N < 5 else 3):
        nxt = []
        for cell in level:
            for kid in children(cell, N):
                assert parent(kid.id, N) == cell.id
                nxt.append(kid)
        assert sorted(c.id.i for c in nxt) == list(range(1, N ** h + 1))
        assert all(c.id.h == h for c in nxt)
        level = nxt


@pytest.mark.parametrize("N", [2, 3, 5])
def test_children_tile_parent(N):
    rng = np.random.default_rng(N)
    for _ in range(20):
        lo = rng.uniform(-3, 3, 3)
        cell = Cell(CellId(0, 1), lo, lo + rng.uniform(0.1, 4, 3))
        kids = children(cell, N)
        vol = lambda c: float(np.prod(c.upper - c.lower))
        assert sum(vol(k) for k in kids) == pytest.approx(vol(cell), rel=1e-12)
        for a, b in itertools.combinations(kids, 2):
            overlap = np.minimum(a.upper, b.upper) - np.maximum(a.lower, b.lower)
            assert np.any(overlap <= 1e-12)
        for k in kids:
            assert np.all(k.lower >= cell.lower) and np.all(k.upper <= cell.upper)
            assert np.all(k.centroid > k.lower) and np.all(k.centroid < k.upper)


def test_shrinkage_after_full_round():
    dom = Domain([0, 0, 0], [1, 2, 3])
    half = [0.5 * np.linalg.norm(w) for w in depth_widths(dom, 3, 12)]
    for h in range(len(half) - 3):
        assert half[h + 3] <= half[h] / 3 + 1e-12


def test_geometry_one_dimensional_halving():
    rho, v1 = geometry_constants(Domain([0.0], [1.0]), 2, 6)
    assert rho == 0.5 and v1 == pytest.approx(0.5)
    for h, w in enumerate(depth_widths(Domain([0.0], [1.0]), 2, 6)):
        assert 0.5 * w[0] == pytest.approx(v1 * rho ** h)


def _enumerate_v1(domain, N, depth):
    """Brute force: materialize one full path of cells and fit the envelope."""
    rho = N ** (-1 / domain.dim)
    cell, worst = root(domain), 0.0
    for h in range(depth + 1):
        worst = max(worst, cell.half_diameter() / rho ** h)
        cell = children(cell, N)[0]
    return rho, worst


@pytest.mark.parametrize("domain,N", [(Domain.cube(0, 1, 2), 2), (Domain([0, 0], [1, 3]), 3),
                                      (Domain.cube(0, 1, 6), 5)])
def test_geometry_matches_enumeration(domain, N):
    rho, v1 = geometry_constants(domain, N, 2 * domain.dim + 2)
    rho_o, v1_o = _enumerate_v1(domain, N, 2 * domain.dim + 2)
    assert rho == pytest.approx(rho_o) and v1 == pytest.approx(v1_o, rel=1e-12)
    for h, w in enumerate(depth_widths(domain, N, 2 * domain.dim + 2)):
        assert 0.5 * np.linalg.norm(w) <= v1 * rho ** h * (1 + 1e-12)


def test_unit_square_binary_v1():
    rho, v1 = geometry_constants(Domain.cube(0, 1, 2), 2, 4)
    assert rho == pytest.approx(2 ** -0.5)
    # depth 1 cells are 1/2 x 1: half-diagonal sqrt(5)/4 over rho
    assert v1 == pytest.approx((math.sqrt(5) / 4) / 2 ** -0.5)


def test_probe_depth_must_cover_dimension():
    with pytest.raises(ValueError):
        geometry_constants(Domain.cube(0, 1, 3), 2, 2)


def test_partition_config_validation():
    with pytest.raises(ValueError):
        PartitionConfig(N=1, rho=0.5, v1=1, h_max=2)
    with pytest.raises(ValueError):
        PartitionConfig(N=2, rho=1.0, v1=1, h_max=2)
    cfg = PartitionConfig.for_domain(Domain.cube(0, 1, 2), 3, 4)
    assert cfg.rho == pytest.approx(3 ** -0.5)


def test_default_h_max():
    # log(100) / (2 log 2) = 3.32 -> 4
    assert default_h_max(100, 0.5) == 4
    assert default_h_max(1, 0.5) >= 1


def test_domain_validation():
    with pytest.raises(ValueError):
        Domain([0, 1], [1, 1])
    with pytest.raises(ValueError):
        Domain([0], [math.inf])
    d = Domain([0, 0], [1, 2])
    with pytest.raises(ValueError):
        d.lower[0] = 5
    assert d.contains([0.5, 2.0]) and not d.contains([1.5, 0])
