"""Dense Hermitian eigensolver.

The reference solver is the cyclic Jacobi method. Its sweep kernel is
compiled with Cython when the extension is available; otherwise a
pure-Python kernel with the same contract is used. Set
``EXTRINSIC_DIRAC_PURE=1`` to force the fallback.

Matrices above ``JACOBI_MAX_DIM`` are routed to LAPACK (``numpy.linalg.eigh``)
unless ``method="jacobi"`` is requested explicitly.
"""

from __future__ import annotations

import os

import numpy as np

from .errors import NotHermitianError

if os.environ.get("EXTRINSIC_DIRAC_PURE"):
    from ._jacobi_py import jacobi_sweeps as _sweeps

    BACKEND = "python"
else:
    try:
        from ._jacobi import jacobi_sweeps as _sweeps

        BACKEND = "cython"
    except ImportError:  # extension not built
        from ._jacobi_py import jacobi_sweeps as _sweeps

        BACKEND = "python"

JACOBI_MAX_DIM = 128
MAX_SWEEPS = 60
HERMITIAN_TOL = 1e-10


def check_hermitian(a, tol=HERMITIAN_TOL):
    a = np.asarray(a)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise NotHermitianError(f"expected a square matrix, got shape {a.shape}")
    scale = max(1.0, float(np.max(np.abs(a)))) if a.size else 1.0
    err = float(np.max(np.abs(a - a.conj().T))) if a.size else 0.0
    if err > tol * scale:
        raise NotHermitianError(f"matrix is not Hermitian (max |A - A*| = {err:.3e})")


def jacobi_eigh(a, *, rtol=1e-12, max_sweeps=MAX_SWEEPS, kernel=None):
    """Cyclic Jacobi diagonalization of a Hermitian matrix.

    Returns ``(w, v, info)`` with ascending eigenvalues ``w``, unitary
    ``v`` whose columns are eigenvectors, and ``info`` holding the sweep
    count and final off-diagonal norm.
    """
    check_hermitian(a)
    work = np.array(a, dtype=np.complex128, order="C", copy=True)
    work = 0.5 * (work + work.conj().T)
    work = np.ascontiguousarray(work)
    n = work.shape[0]
    v = np.eye(n, dtype=np.complex128)
    norm = float(np.linalg.norm(work))
    target = rtol * norm
    sweeps, off = (kernel or _sweeps)(work, v, target, max_sweeps)
    if off > target and norm > 0:
        raise RuntimeError(f"Jacobi did not converge in {max_sweeps} sweeps (off={off:.3e})")
    w = np.diagonal(work).real.copy()
    order = np.argsort(w, kind="stable")
    return w[order], v[:, order], {"sweeps": sweeps, "off": off, "norm": norm}


def hermitian_eigs(matrix, vectors=False, method="auto"):
    """Eigenvalues (ascending) of a Hermitian matrix, optionally eigenvectors.

    ``method`` is ``"jacobi"``, ``"lapack"`` or ``"auto"`` (Jacobi up to
    ``JACOBI_MAX_DIM``).
    """
    a = np.asarray(matrix)
    check_hermitian(a)
    if method == "auto":
        method = "jacobi" if a.shape[0] <= JACOBI_MAX_DIM else "lapack"
    if method == "jacobi":
        w, v, _ = jacobi_eigh(a)
    elif method == "lapack":
        h = 0.5 * (a + a.conj().T)
        if vectors:
            w, v = np.linalg.eigh(h)
        else:
            w, v = np.linalg.eigvalsh(h), None
    else:
        raise ValueError(f"unknown method {method!r}")
    return (w, v) if vectors else w
