"""Killing spinors of the model spaces and their restrictions to hypersurfaces.

Trivializations:

* R^N: constant spinors, flat connection, gamma(X) = sum X_k g_k.
* S^N: the spinor bundle of R^(N+1) restricted to the unit sphere, with
  Clifford multiplication gamma(X) g(x) and connection d + 1/2 gamma(X) g(x).
  For odd N only the +1 (alpha = 1/2) or -1 (alpha = -1/2) eigenspace of the
  volume element of Cl(N+1) is used.
* H^N (half space): the orthonormal frame E_k = x_N d_k with connection
  E_k + 1/2 g_k g_N for k < N and E_N unchanged.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .clifford import irreducible_rep
from .errors import GeometryError
from .geometry import AmbientSpace

__all__ = [
    "KillingField",
    "RestrictedSpinor",
    "CrossTermBound",
    "killing_basis",
    "killing_count",
    "killing_residual",
    "restrict",
    "rayleigh_dtilde",
    "dirac_splitting_check",
    "imaginary_cross_term_bound",
]


def _alpha_kind(ambient, alpha):
    alpha = complex(alpha)
    if ambient.kind == "euclidean" and alpha == 0:
        return 0
    if ambient.kind == "sphere" and alpha.imag == 0 and abs(abs(alpha.real) - 0.5) < 1e-15:
        return 1 if alpha.real > 0 else -1
    if ambient.kind == "hyperbolic" and alpha.real == 0 and abs(abs(alpha.imag) - 0.5) < 1e-15:
        return 1 if alpha.imag > 0 else -1
    raise GeometryError(f"no Killing spinors with alpha={alpha} implemented on {ambient.label}")


def killing_count(ambient_dim):
    """Dimension of the space of Killing spinors on a model space of dimension N."""
    return 2 ** (ambient_dim // 2)


@dataclass(frozen=True, eq=False)
class KillingField:
    """One Killing spinor in the fixed trivialization of its model space."""

    ambient: AmbientSpace
    alpha: complex
    basis_index: int
    rep: object  # CliffordRep acting on the trivialized spinor space
    coeffs: tuple  # constant spinors defining the field (meaning depends on ambient)

    @property
    def dim(self):
        return self.rep.dim

    def _points(self, x):
        x = np.atleast_2d(np.asarray(x, dtype=float))
        if x.shape[1] != self.ambient.embed_dim:
            raise GeometryError("point has the wrong number of coordinates")
        if not self.ambient.contains(x, tol=1e-9):
            raise GeometryError("point outside the model domain")
        return x

    def value(self, x):
        """Spinor values at points x, shape (P, d)."""
        x = self._points(x)
        kind = self.ambient.kind
        if kind == "euclidean":
            return np.broadcast_to(self.coeffs[0], (len(x), self.dim)).copy()
        if kind == "sphere":
            psi = self.coeffs[0]
            if self.alpha.real > 0:
                return np.broadcast_to(psi, (len(x), self.dim)).copy()
            return np.einsum("pab,b->pa", self._gamma_coord(x), psi)
        a, b = self.coeffs
        sign = 1j if self.alpha.imag > 0 else -1j
        xn = x[:, -1]
        gens = self.rep.generators
        inner = np.einsum("pk,kab,b->pa", x[:, :-1], np.stack(gens[:-1]), a) if len(gens) > 1 else 0.0
        return np.sqrt(xn)[:, None] * a[None, :] + (b[None, :] + sign * inner) / np.sqrt(xn)[:, None]

    def _gamma_coord(self, v):
        """sum_k v_k g_k for coordinate vectors v, shape (P, d, d)."""
        return np.tensordot(v, np.stack(self.rep.generators), axes=(1, 0))

    def clifford(self, x, X):
        """Clifford multiplication by the tangent vectors X (coordinate vectors) at x."""
        x = np.atleast_2d(np.asarray(x, dtype=float))
        X = np.atleast_2d(np.asarray(X, dtype=float))
        kind = self.ambient.kind
        if kind == "euclidean":
            return self._gamma_coord(X)
        if kind == "sphere":
            return self._gamma_coord(X) @ self._gamma_coord(x)
        return self._gamma_coord(X / x[:, -1:])

    def connection(self, x, X):
        """Connection matrices: nabla_X = d_X + connection(x, X)."""
        x = np.atleast_2d(np.asarray(x, dtype=float))
        X = np.atleast_2d(np.asarray(X, dtype=float))
        kind = self.ambient.kind
        d = self.dim
        if kind == "euclidean":
            return np.zeros((len(x), d, d), dtype=np.complex128)
        if kind == "sphere":
            return 0.5 * self._gamma_coord(X) @ self._gamma_coord(x)
        gens = np.stack(self.rep.generators)
        on = X / x[:, -1:]
        pair = np.einsum("kab,bc->kac", gens[:-1], gens[-1])
        return 0.5 * np.tensordot(on[:, :-1], pair, axes=(1, 0))


@dataclass(frozen=True)
class RestrictedSpinor:
    """A Killing field sampled on the quadrature nodes of a hypersurface."""

    imm_key: tuple
    values: np.ndarray  # (P, d)
    gamma_H: np.ndarray  # (P, d), gamma_Q(H) psi
    norm2: np.ndarray  # (P,)
    H_norm: np.ndarray  # (P,)


def _sphere_half_basis(rep, sign):
    """Orthonormal basis of the volume eigenspace with eigenvalue ``sign``."""
    w, v = np.linalg.eigh(0.5 * (rep.volume + rep.volume.conj().T))
    return v[:, (w > 0) if sign > 0 else (w < 0)]


def killing_basis(ambient, alpha):
    """A basis of the Killing spinors with constant alpha on a model space."""
    which = _alpha_kind(ambient, alpha)
    alpha = complex(alpha)
    N = ambient.dim
    nu = killing_count(N)
    fields = []
    if ambient.kind == "euclidean":
        rep = irreducible_rep(N)
        for i in range(nu):
            fields.append(KillingField(ambient, alpha, i, rep, (np.eye(nu, dtype=np.complex128)[i],)))
    elif ambient.kind == "sphere":
        rep = irreducible_rep(N + 1)
        if (N + 1) % 2 == 0:
            basis = _sphere_half_basis(rep, which)
        else:
            basis = np.eye(rep.dim, dtype=np.complex128)
        for i in range(nu):
            fields.append(KillingField(ambient, alpha, i, rep, (basis[:, i].copy(),)))
    else:
        rep = irreducible_rep(N)
        gN = rep.generators[-1]
        eye = np.eye(rep.dim)
        proj_a = 0.5 * (eye + which * 1j * gN)
        proj_b = 0.5 * (eye - which * 1j * gN)
        ua = _range_basis(proj_a)
        ub = _range_basis(proj_b)
        zero = np.zeros(rep.dim, dtype=np.complex128)
        for i in range(ua.shape[1]):
            fields.append(KillingField(ambient, alpha, i, rep, (ua[:, i].copy(), zero)))
        for i in range(ub.shape[1]):
            fields.append(KillingField(ambient, alpha, ua.shape[1] + i, rep, (zero, ub[:, i].copy())))
    if len(fields) != nu:
        raise RuntimeError("Killing basis has the wrong size")
    return fields


def _range_basis(proj):
    w, v = np.linalg.eigh(0.5 * (proj + proj.conj().T))
    return v[:, w > 0.5]


def _tangent_basis(ambient, x):
    """Ambient-orthonormal tangent bases at points x, shape (P, N, E)."""
    P, E = x.shape
    if ambient.kind == "euclidean":
        return np.broadcast_to(np.eye(E), (P, E, E)).copy()
    if ambient.kind == "hyperbolic":
        return np.eye(E)[None, :, :] * x[:, -1][:, None, None]
    out = np.empty((P, E - 1, E))
    for p in range(P):
        q, _ = np.linalg.qr(np.column_stack([x[p], np.eye(E)]))
        out[p] = q[:, 1:E].T
    return out


def _curve_point(ambient, x, X, t):
    if ambient.kind == "sphere":
        return np.cos(t) * x + np.sin(t) * X
    return x + t * X


def killing_residual(field, points, h=1e-3):
    """Max over points and orthonormal directions of |nabla_X psi - alpha gamma(X) psi|.

    Derivatives are central differences along straight lines (great circles
    on the sphere); unit speed in the ambient metric is used throughout.
    """
    amb = field.ambient
    x = field._points(points)
    basis = _tangent_basis(amb, x)
    psi = field.value(x)
    worst = 0.0
    for k in range(basis.shape[1]):
        X = basis[:, k]
        if amb.kind == "hyperbolic":
            # unit speed in the half-space metric: coordinate speed x_N
            fwd, bwd = x + h * X, x - h * X
        else:
            fwd, bwd = _curve_point(amb, x, X, h), _curve_point(amb, x, X, -h)
        if amb.kind == "hyperbolic" and (np.any(fwd[:, -1] <= 0) or np.any(bwd[:, -1] <= 0)):
            raise GeometryError("finite-difference step leaves the half space")
        deriv = (field.value(fwd) - field.value(bwd)) / (2 * h)
        cov = deriv + np.einsum("pab,pb->pa", field.connection(x, X), psi)
        rhs = field.alpha * np.einsum("pab,pb->pa", field.clifford(x, X), psi)
        worst = max(worst, float(np.max(np.abs(cov - rhs))))
    return worst


def restrict(field, imm, grid):
    """Sample a Killing field and gamma_Q(H) psi on the nodes of a quadrature grid."""
    if grid.imm_key != imm.key():
        raise GeometryError("quadrature grid was built for a different immersion")
    if imm.ambient != field.ambient:
        raise GeometryError("Killing field and immersion live in different ambients")
    smp = grid.sample
    psi = field.value(smp.point)
    gh = np.einsum("pab,pb->pa", field.clifford(smp.point, smp.H), psi)
    return RestrictedSpinor(imm.key(), psi, gh, np.sum(np.abs(psi) ** 2, axis=1), smp.H_norm)


def _weights(grid):
    return grid.weights * grid.area


def rayleigh_dtilde(field, imm, grid, restricted=None):
    """Rayleigh quotient of the square of the restricted Dirac operator on psi|_M.

    Uses D-hat psi = -n alpha psi. For real alpha the cross term vanishes;
    for imaginary alpha it is evaluated by quadrature.
    """
    r = restricted or restrict(field, imm, grid)
    n = imm.n
    w = _weights(grid)
    mass = float(np.sum(w * r.norm2))
    curv = float(np.sum(w * r.H_norm**2 * r.norm2)) / mass
    alpha = complex(field.alpha)
    q = n * n * abs(alpha) ** 2 + 0.25 * n * n * curv
    if alpha.imag != 0:
        cross = alpha * _pair(r.values, r.gamma_H, w) / mass
        q -= n * n * cross.real
    return float(q)


def _pair(u, v, w):
    """(u, v) = integral of sum u conj(v), linear in the first slot."""
    return complex(np.sum(w[:, None] * u * np.conj(v)))


@dataclass(frozen=True)
class CrossTermBound:
    lhs: float
    rhs: float
    rhs_optimal: float
    beta: float
    beta_optimal: float

    @property
    def slack(self):
        return self.rhs - self.lhs


def imaginary_cross_term_bound(field, imm, grid, beta=None):
    """|alpha (psi, gamma(H) psi)| against its beta-weighted AM-GM bound.

    ``beta`` defaults to the optimal sqrt(||H||_inf / |alpha|).
    """
    alpha = complex(field.alpha)
    if alpha.real != 0 or alpha.imag == 0:
        raise GeometryError("cross-term bound needs purely imaginary alpha")
    r = restrict(field, imm, grid)
    w = _weights(grid)
    mass = float(np.sum(w * r.norm2))
    h_inf = float(np.max(r.H_norm))
    a = abs(alpha)
    lhs = abs(alpha * _pair(r.values, r.gamma_H, w))
    beta_opt = math.sqrt(h_inf / a) if h_inf > 0 else math.inf
    if beta is None:
        beta = beta_opt
    if not beta > 0:
        raise ValueError("beta must be positive")
    if math.isinf(beta):
        rhs = 0.0 if h_inf == 0 else math.inf
    else:
        rhs = 0.5 * mass * (beta**2 * a * a + h_inf**2 / beta**2)
    return CrossTermBound(lhs, rhs, mass * a * h_inf, float(beta), beta_opt)


def dirac_splitting_check(imm, field, N=128, detail=False):
    """Residual of gamma(e1) d/ds psi = (1/2) kappa gamma(e2) psi on a plane curve.

    The parallel spinor psi is rewritten in the curve's rotating frame as
    exp(-theta/2 g1 g2) psi, with theta the tangent angle; this is the
    identification of the ambient spinors along M with the spinors of M
    twisted by the normal bundle. The derivative is spectral.
    """
    from .spectra import _fourier_derivative

    if imm.n != 1 or imm.ambient.kind != "euclidean" or imm.ambient.dim != 2:
        raise GeometryError("splitting check needs a curve in the Euclidean plane")
    if abs(complex(field.alpha)) != 0 or field.ambient.kind != "euclidean":
        raise GeometryError("splitting check needs a parallel spinor")
    iv = imm.domain[0]
    u = iv.lo + np.arange(N)[:, None] * iv.length / N
    _, dx, ddx = imm.chart(u)
    v, acc = dx[:, 0, :], ddx[:, 0, 0, :]
    speed = np.linalg.norm(v, axis=1)
    if np.min(speed) <= 1e-12:
        raise GeometryError("irregular curve: vanishing speed")
    theta = np.unwrap(np.arctan2(v[:, 1], v[:, 0]))
    turns = (theta[-1] + (theta[1] - theta[0]) - theta[0]) / (2 * math.pi)
    shift = int(round(turns)) % 2
    kappa = (v[:, 0] * acc[:, 1] - v[:, 1] * acc[:, 0]) / speed**3
    g1, g2 = field.rep.generators
    rot = g1 @ g2  # squares to -1, so exp(t rot) = cos t + sin t rot
    psi0 = field.coeffs[0]
    adapted = (np.cos(theta / 2)[:, None] * psi0[None, :]
               - np.sin(theta / 2)[:, None] * (rot @ psi0)[None, :])
    D = _fourier_derivative(N, iv.length, shift)
    ds = (D @ adapted) / speed[:, None]
    lhs = ds @ g1.T
    rhs = 0.5 * kappa[:, None] * (adapted @ g2.T)
    res = float(np.max(np.abs(lhs - rhs)))
    if detail:
        return res, {"lhs_norm": np.linalg.norm(lhs, axis=1), "antiperiodic": bool(shift)}
    return res
