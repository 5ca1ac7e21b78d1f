import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from extrinsic_dirac import linalg
from extrinsic_dirac._jacobi_py import jacobi_sweeps as python_kernel
from extrinsic_dirac.errors import NotHermitianError

try:
    from extrinsic_dirac._jacobi import jacobi_sweeps as cython_kernel
except ImportError:
    cython_kernel = None

KERNELS = [python_kernel] + ([cython_kernel] if cython_kernel else [])


def random_hermitian(rng, n):
    a = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    return 0.5 * (a + a.conj().T)


def test_diagonal_input():
    assert np.allclose(linalg.hermitian_eigs(np.diag([4.0, 2.0, 3.0, 1.0])), [1, 2, 3, 4])


def test_four_by_four_example_matrix():
    A = np.diag([1.0, 2.0, 3.0, 4.0])
    w, v = linalg.hermitian_eigs(A, vectors=True)
    assert np.allclose(w, [1, 2, 3, 4])
    assert np.allclose(v.conj().T @ A @ v, np.diag(w))


def test_trace_identities_dimension_fifty():
    rng = np.random.default_rng(7)
    a = random_hermitian(rng, 50)
    w = linalg.hermitian_eigs(a, method="jacobi")
    assert abs(w.sum() - np.trace(a).real) < 1e-10 * 50
    assert abs((w**2).sum() - np.trace(a @ a).real) < 1e-10 * np.linalg.norm(a) ** 2


def test_rejects_non_hermitian():
    with pytest.raises(NotHermitianError):
        linalg.hermitian_eigs(np.array([[1.0, 2.0], [0.0, 1.0]]))
    with pytest.raises(NotHermitianError):
        linalg.hermitian_eigs(np.ones((2, 3)))


def test_auto_routes_large_matrices_to_lapack():
    rng = np.random.default_rng(1)
    a = random_hermitian(rng, linalg.JACOBI_MAX_DIM + 4)
    assert np.allclose(linalg.hermitian_eigs(a), np.linalg.eigvalsh(a), atol=1e-10)


@pytest.mark.parametrize("kernel", KERNELS, ids=lambda k: k.__module__.rsplit(".", 1)[-1])
@given(st.integers(1, 24), st.integers(0, 2**32 - 1))
def test_jacobi_kernels_match_lapack(kernel, n, seed):
    a = random_hermitian(np.random.default_rng(seed), n)
    w, v, info = linalg.jacobi_eigh(a, kernel=kernel)
    scale = max(1.0, np.linalg.norm(a))
    assert np.max(np.abs(w - np.linalg.eigvalsh(a))) < 1e-11 * scale
    assert np.allclose(v.conj().T @ v, np.eye(n), atol=1e-11)
    assert np.max(np.abs(a @ v - v * w)) < 1e-10 * scale


@pytest.mark.skipif(cython_kernel is None, reason="compiled kernel not built")
def test_backends_agree_bitwise_close():
    rng = np.random.default_rng(3)
    for n in (2, 7, 20, 40):
        a = random_hermitian(rng, n)
        wp = linalg.jacobi_eigh(a, kernel=python_kernel)[0]
        wc = linalg.jacobi_eigh(a, kernel=cython_kernel)[0]
        assert np.max(np.abs(wp - wc)) < 1e-12 * max(1.0, np.linalg.norm(a))


def test_degenerate_spectrum():
    rng = np.random.default_rng(5)
    q, _ = np.linalg.qr(rng.standard_normal((6, 6)) + 1j * rng.standard_normal((6, 6)))
    a = q @ np.diag([1.0, 1.0, 1.0, 2.0, 2.0, -3.0]) @ q.conj().T
    assert np.allclose(linalg.hermitian_eigs(a, method="jacobi"), [-3, 1, 1, 1, 2, 2], atol=1e-12)


def test_backend_label():
    assert linalg.BACKEND in ("cython", "python")
