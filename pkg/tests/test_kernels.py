import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from carleson_ns import kernels
from carleson_ns._kernels_py import subcube_reduce as py_reduce

compiled = pytest.mark.skipif(kernels.BACKEND != "compiled", reason="extension not built")


def _random_problem(rng, n, entries, roots):
    j = rng.integers(-2, 8, entries).astype(np.int64)
    k = rng.integers(-40, 40, (entries, n)).astype(np.int64)
    w = rng.random(entries)
    rj = rng.integers(-4, 6, roots).astype(np.int64)
    rk = rng.integers(-6, 6, (roots, n)).astype(np.int64)
    return j, k, w, rj, rk


def _reference(j, k, w, rj, rk, use_max):
    out = []
    for r in range(len(rj)):
        vals = [
            w[i]
            for i in range(len(j))
            if j[i] >= rj[r] and all((k[i, d] >> (j[i] - rj[r])) == rk[r, d] for d in range(k.shape[1]))
        ]
        out.append(max([0.0] + vals) if use_max else sum(vals))
    return np.array(out)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(1, 3), st.booleans())
def test_python_backend_matches_reference(seed, n, use_max):
    rng = np.random.default_rng(seed)
    prob = _random_problem(rng, n, 60, 25)
    got = py_reduce(*prob, use_max)
    assert np.allclose(got, _reference(*prob, use_max), rtol=1e-14, atol=0)


@compiled
@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(1, 3), st.booleans())
def test_backends_agree_bitwise(seed, n, use_max):
    rng = np.random.default_rng(seed)
    prob = _random_problem(rng, n, 80, 30)
    a = kernels.subcube_reduce(*prob, use_max=use_max, backend="compiled")
    b = kernels.subcube_reduce(*prob, use_max=use_max, backend="python")
    assert np.array_equal(a, b)


def test_threaded_split_matches_serial(monkeypatch):
    rng = np.random.default_rng(0)
    prob = _random_problem(rng, 2, 500, 2000)
    monkeypatch.setenv("CARLESON_NS_THREADS", "1")
    serial = kernels.subcube_reduce(*prob)
    monkeypatch.setenv("CARLESON_NS_THREADS", "4")
    threaded = kernels.subcube_reduce(*prob)
    assert np.array_equal(serial, threaded)


def test_extreme_depth_shift_is_safe():
    j = np.array([80], dtype=np.int64)
    k = np.array([[5]], dtype=np.int64)
    w = np.array([1.0])
    rj = np.array([0, -3], dtype=np.int64)
    rk = np.array([[0], [0]], dtype=np.int64)
    assert list(kernels.subcube_reduce(j, k, w, rj, rk, backend="python")) == [1.0, 1.0]
    if kernels.BACKEND == "compiled":
        assert list(kernels.subcube_reduce(j, k, w, rj, rk, backend="compiled")) == [1.0, 1.0]


def test_unknown_backend():
    with pytest.raises(ValueError):
        kernels.subcube_reduce(np.zeros(1, np.int64), np.zeros((1, 1), np.int64), np.ones(1),
                               np.zeros(1, np.int64), np.zeros((1, 1), np.int64), backend="gpu")
