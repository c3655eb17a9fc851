"""Property checks on the partition and the kernel."""
import numpy as np
from hypothesis import given, settings, strategies as st

from adaptive_bkb.kernels import KernelSpec, SmoothnessModel, g_bound, rkhs_distance
from adaptive_bkb.partition import Domain, children, parent, root

dims = st.integers(1, 4)
Ns = st.integers(2, 5)


@st.composite
def cells(draw):
    dim, N = draw(dims), draw(Ns)
    lo = np.array(draw(st.lists(st.floats(-10, 10), min_size=dim, max_size=dim)))
    span = np.array(draw(st.lists(st.floats(0.1, 20), min_size=dim, max_size=dim)))
    cell = root(Domain(lo, lo + span))
    for k in draw(st.lists(st.integers(0, N - 1), max_size=6)):
        cell = children(cell, N)[k]
    return cell, N


@given(cells())
def test_children_tile_parent(arg):
    cell, N = arg
    kids = children(cell, N)
    vol = np.prod(cell.widths)
    assert np.isclose(sum(np.prod(k.widths) for k in kids), vol, rtol=1e-9)
    for k in kids:
        assert np.all(k.lower >= cell.lower - 1e-12) and np.all(k.upper <= cell.upper + 1e-12)
    # siblings share faces only: sorted along the split axis they abut
    j = int(np.argmax(np.abs(kids[0].widths - cell.widths)))
    for a, b in zip(kids, kids[1:]):
        assert a.upper[j] == b.lower[j]


@given(cells())
def test_parent_inverts_children(arg):
    cell, N = arg
    for k in children(cell, N):
        assert parent(k.id, N) == cell.id
        assert k.h == cell.h + 1


@settings(max_examples=50)
@given(st.integers(1, 4), st.floats(0.05, 5.0), st.integers(0, 2 ** 31 - 1))
def test_kernel_symmetric_and_bounded(dim, ls, seed):
    rng = np.random.default_rng(seed)
    X = rng.normal(size=(6, dim))
    k = KernelSpec.isotropic(ls)
    K = k.matrix(X, X)
    np.testing.assert_allclose(K, K.T, rtol=0, atol=0)
    assert np.all((K >= 0) & (K <= 1)) and np.all(np.diag(K) == 1.0)


@settings(max_examples=100)
@given(st.lists(st.floats(0.05, 5.0), min_size=1, max_size=3), st.integers(0, 2 ** 31 - 1))
def test_rkhs_distance_under_envelope(ls, seed):
    spec = KernelSpec.ard(tuple(ls)) if len(ls) > 1 else KernelSpec.isotropic(ls[0])
    m = SmoothnessModel.for_kernel(spec)
    rng = np.random.default_rng(seed)
    x, z = rng.normal(size=(2, len(ls))) * 3
    assert rkhs_distance(spec, x, z) <= g_bound(m, float(np.linalg.norm(x - z))) + 1e-12
