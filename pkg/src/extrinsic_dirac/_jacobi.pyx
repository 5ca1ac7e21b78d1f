# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled cyclic Jacobi sweeps for dense complex Hermitian matrices."""

from libc.math cimport sqrt, fabs

cdef extern from "complex.h" nogil:
    double cabs(double complex)
    double complex conj(double complex)
    double creal(double complex)


cdef double _offdiag_norm(double complex[:, ::1] a) nogil:
    cdef Py_ssize_t n = a.shape[0]
    cdef Py_ssize_t i, j
    cdef double s = 0.0
    cdef double x
    for i in range(n):
        for j in range(n):
            if i != j:
                x = cabs(a[i, j])
                s += x * x
    return sqrt(s)


def jacobi_sweeps(double complex[:, ::1] a, double complex[:, ::1] v,
                  double target, int max_sweeps):
    """Diagonalize ``a`` in place, accumulating rotations into ``v``.

    Returns ``(sweeps, off)`` where ``off`` is the final off-diagonal
    Frobenius norm. Sweeping stops once ``off <= target``.
    """
    cdef Py_ssize_t n = a.shape[0]
    cdef Py_ssize_t p, q, k
    cdef int sweep = 0
    cdef double app, aqq, mag, theta, t, c, s, off
    cdef double complex apq, e, ec, akp, akq, apk, aqk
    with nogil:
        off = _offdiag_norm(a)
        while off > target and sweep < max_sweeps:
            for p in range(n - 1):
                for q in range(p + 1, n):
                    apq = a[p, q]
                    mag = cabs(apq)
                    if mag == 0.0:
                        continue
                    app = creal(a[p, p])
                    aqq = creal(a[q, q])
                    # negligible against both diagonal entries: drop it
                    if fabs(app) + 1e4 * mag == fabs(app) and fabs(aqq) + 1e4 * mag == fabs(aqq):
                        a[p, q] = 0.0
                        a[q, p] = 0.0
                        continue
                    e = apq / mag
                    ec = conj(e)
                    theta = (aqq - app) / (2.0 * mag)
                    if theta >= 0.0:
                        t = 1.0 / (theta + sqrt(theta * theta + 1.0))
                    else:
                        t = -1.0 / (-theta + sqrt(theta * theta + 1.0))
                    c = 1.0 / sqrt(t * t + 1.0)
                    s = t * c
                    for k in range(n):
                        akp = a[k, p]
                        akq = a[k, q]
                        a[k, p] = c * akp - s * ec * akq
                        a[k, q] = s * akp + c * ec * akq
                    for k in range(n):
                        apk = a[p, k]
                        aqk = a[q, k]
                        a[p, k] = c * apk - s * e * aqk
                        a[q, k] = s * apk + c * e * aqk
                    a[p, q] = 0.0
                    a[q, p] = 0.0
                    a[p, p] = app - t * mag
                    a[q, q] = aqq + t * mag
                    for k in range(n):
                        akp = v[k, p]
                        akq = v[k, q]
                        v[k, p] = c * akp - s * ec * akq
                        v[k, q] = s * akp + c * ec * akq
            sweep += 1
            off = _offdiag_norm(a)
    return sweep, off
