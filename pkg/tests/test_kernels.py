import os
import subprocess
import sys

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pdemlab import kernels

BACKENDS = kernels.backends()
needs_both = pytest.mark.skipif("cython" not in BACKENDS, reason="compiled extension not built")


def test_backend_selected():
    assert kernels.BACKEND in BACKENDS
    assert "python" in BACKENDS


def test_env_forces_python():
    env = dict(os.environ, PDEMLAB_KERNELS="python")
    out = subprocess.run([sys.executable, "-c", "from pdemlab import kernels; print(kernels.BACKEND)"],
                         capture_output=True, text=True, env=env, check=True).stdout.strip()
    assert out == "python"


@needs_both
@settings(max_examples=40, deadline=None)
@given(n=st.integers(0, 200), x=st.floats(-400, 400))
def test_hermite_backends_agree(n, x):
    mp, ep = BACKENDS["python"].hermite_scaled(n, x)
    mc, ec = BACKENDS["cython"].hermite_scaled(n, x)
    assert np.array_equal(ep, ec)
    assert np.allclose(mp, mc, rtol=1e-13, atol=0)


@needs_both
@settings(max_examples=40, deadline=None)
@given(n=st.integers(0, 30), b=st.floats(0.5, 20), x=st.floats(0, 50))
def test_kummer_backends_agree(n, b, x):
    a = BACKENDS["python"].kummer_terminating(n, b, x)
    c = BACKENDS["cython"].kummer_terminating(n, b, x)
    assert np.allclose(a, c, rtol=1e-13, atol=1e-300)


@needs_both
def test_cn_backends_agree():
    rng = np.random.default_rng(3)
    n = 300
    diag = rng.uniform(0, 50, n)
    off = rng.uniform(-10, 0, n - 1)
    chi0 = rng.normal(size=n) + 1j * rng.normal(size=n)
    a, na = BACKENDS["python"].cn_propagate(diag, off, chi0, 1e-3, 50, 0.01)
    c, nc = BACKENDS["cython"].cn_propagate(diag, off, chi0, 1e-3, 50, 0.01)
    assert np.allclose(a, c, rtol=1e-12, atol=1e-12)
    assert np.allclose(na, nc, rtol=1e-13)


@pytest.mark.parametrize("name", sorted(BACKENDS))
def test_cn_is_unitary(name):
    rng = np.random.default_rng(5)
    n = 200
    diag = rng.uniform(0, 10, n)
    off = rng.uniform(-3, 3, n - 1)
    chi0 = rng.normal(size=n) + 0j
    _, norms = BACKENDS[name].cn_propagate(diag, off, chi0, 0.01, 100, 1.0)
    assert np.max(np.abs(norms / norms[0] - 1)) < 1e-12


@pytest.mark.parametrize("name", sorted(BACKENDS))
def test_cn_matches_dense_solve(name):
    rng = np.random.default_rng(9)
    n = 12
    diag = rng.uniform(0, 5, n)
    off = rng.uniform(-1, 1, n - 1)
    H = np.diag(diag) + np.diag(off, 1) + np.diag(off, -1)
    chi = rng.normal(size=n) + 1j * rng.normal(size=n)
    tau = 0.05
    A = np.eye(n) + 1j * tau * H
    B = np.eye(n) - 1j * tau * H
    ref = chi.copy()
    for _ in range(3):
        ref = np.linalg.solve(A, B @ ref)
    out, _ = BACKENDS[name].cn_propagate(diag, off, chi, tau, 3, 1.0)
    assert np.allclose(out, ref, rtol=1e-12, atol=1e-12)
