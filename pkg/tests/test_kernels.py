"""Compiled and fallback kernels must agree bit for bit."""
import os

import numpy as np
import pytest
from hypothesis import given, strategies as st
from hypothesis.extra.numpy import arrays

from oracles import knn_sort, segment_hits_box
from irs_beamsim import _accel, _fallback

try:
    from irs_beamsim import _kernels
except ImportError:  # extension not built
    _kernels = None

BACKENDS = [_fallback] + ([_kernels] if _kernels is not None else [])
needs_ext = pytest.mark.skipif(_kernels is None, reason="compiled extension not built")


def test_backend_flag():
    assert _accel.BACKEND in ("cython", "python")
    if _kernels is not None and _accel.BACKEND == "cython":
        assert _accel.knn_select is _kernels.knn_select


grid = st.integers(-20, 20).map(lambda i: i / 4)


@pytest.mark.parametrize("mod", BACKENDS, ids=lambda m: m.__name__.rsplit(".", 1)[-1])
@given(arrays(float, (6, 3), elements=grid), arrays(float, (6, 3), elements=grid),
       arrays(float, (3, 3), elements=grid), arrays(float, (3, 3), elements=grid))
def test_segments_blocked_vs_oracle(mod, p1, p2, c1, c2):
    lo, hi = np.minimum(c1, c2), np.maximum(c1, c2)
    got = mod.segments_blocked(p1, p2, lo, hi)
    want = [any(segment_hits_box(a, b, l, h) for l, h in zip(lo, hi)) for a, b in zip(p1, p2)]
    assert list(got) == want


@pytest.mark.parametrize("mod", BACKENDS, ids=lambda m: m.__name__.rsplit(".", 1)[-1])
def test_segments_blocked_empty(mod):
    empty = np.empty((0, 3))
    assert mod.segments_blocked(np.zeros((2, 3)), np.ones((2, 3)), empty, empty).tolist() == [False, False]


@pytest.mark.parametrize("mod", BACKENDS, ids=lambda m: m.__name__.rsplit(".", 1)[-1])
@given(arrays(float, (30, 3), elements=st.integers(0, 4).map(float)),
       arrays(float, (3,), elements=st.integers(0, 4).map(float)), st.integers(1, 30))
def test_knn_vs_full_sort(mod, pts, q, k):
    idx, dist = mod.knn_select(np.ascontiguousarray(pts), q, k)
    want_idx, want_dist = knn_sort(pts.tolist(), q.tolist(), k)
    assert idx.tolist() == want_idx
    np.testing.assert_allclose(dist, want_dist, rtol=0, atol=1e-12)


@needs_ext
def test_backends_identical_on_random_workload():
    rng = np.random.default_rng(4)
    p1, p2 = rng.uniform(-5, 5, (500, 3)), rng.uniform(-5, 5, (500, 3))
    lo = rng.uniform(-4, 2, (20, 3))
    hi = lo + rng.uniform(0, 3, (20, 3))
    assert np.array_equal(_fallback.segments_blocked(p1, p2, lo, hi), _kernels.segments_blocked(p1, p2, lo, hi))
    pts = rng.uniform(0, 10, (984, 3))
    ro = pts.copy()
    ro.setflags(write=False)
    for q in rng.uniform(0, 10, (50, 3)):
        a = _fallback.knn_select(pts, q, 5)
        b = _kernels.knn_select(ro, q, 5)
        assert np.array_equal(a[0], b[0]) and np.array_equal(a[1], b[1])


def test_pure_switch_selects_fallback():
    import subprocess
    import sys
    env = dict(os.environ, IRS_BEAMSIM_PURE="1")
    out = subprocess.run([sys.executable, "-c", "import irs_beamsim; print(irs_beamsim.BACKEND)"],
                         capture_output=True, text=True, env=env, check=True)
    assert out.stdout.strip() == "python"
