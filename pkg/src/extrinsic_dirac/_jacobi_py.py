"""Pure-Python cyclic Jacobi sweeps; same contract as the compiled kernel."""

import math

import numpy as np


def _offdiag_norm(a):
    off = a[~np.eye(a.shape[0], dtype=bool)]
    return float(np.sqrt(np.vdot(off, off).real))


def jacobi_sweeps(a, v, target, max_sweeps):
    n = a.shape[0]
    sweep = 0
    off = _offdiag_norm(a)
    while off > target and sweep < max_sweeps:
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = complex(a[p, q])
                mag = abs(apq)
                if mag == 0.0:
                    continue
                app = float(a[p, p].real)
                aqq = float(a[q, q].real)
                # negligible against both diagonal entries: drop it
                if abs(app) + 1e4 * mag == abs(app) and abs(aqq) + 1e4 * mag == abs(aqq):
                    a[p, q] = 0.0
                    a[q, p] = 0.0
                    continue
                e = apq / mag
                theta = (aqq - app) / (2.0 * mag)
                t = math.copysign(1.0, theta) / (abs(theta) + math.sqrt(theta * theta + 1.0))
                c = 1.0 / math.sqrt(t * t + 1.0)
                s = t * c
                colp = a[:, p].copy()
                colq = a[:, q]
                a[:, p] = c * colp - s * e.conjugate() * colq
                a[:, q] = s * colp + c * e.conjugate() * colq
                rowp = a[p, :].copy()
                rowq = a[q, :]
                a[p, :] = c * rowp - s * e * rowq
                a[q, :] = s * rowp + c * e * rowq
                a[p, q] = 0.0
                a[q, p] = 0.0
                a[p, p] = app - t * mag
                a[q, q] = aqq + t * mag
                vp = v[:, p].copy()
                vq = v[:, q]
                v[:, p] = c * vp - s * e.conjugate() * vq
                v[:, q] = s * vp + c * e.conjugate() * vq
        sweep += 1
        off = _offdiag_norm(a)
    return sweep, off
