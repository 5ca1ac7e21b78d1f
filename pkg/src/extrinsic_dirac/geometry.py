"""Closed immersed submanifolds of the model spaces and their extrinsic data.

Model spaces:

* ``euclidean``: R^N with the flat metric (optionally the flat torus R^N/Z^N).
* ``sphere``: the unit sphere S^N inside R^(N+1).
* ``hyperbolic``: the upper half-space {x_N > 0} with metric |dx|^2 / x_N^2.

All vectors are stored as coordinate vectors of the embedding space
(R^N, or R^(N+1) for the sphere). Lengths are taken in the ambient metric.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy import optimize

from .errors import DegeneratePointError, GeometryError

# ---------------------------------------------------------------- ambient


@dataclass(frozen=True)
class AmbientSpace:
    kind: str
    dim: int
    periodic: bool = False

    def __post_init__(self):
        if self.kind not in ("euclidean", "sphere", "hyperbolic"):
            raise GeometryError(f"unknown ambient kind {self.kind!r}")
        if self.dim < 2:
            raise GeometryError("ambient dimension must be at least 2")

    @property
    def embed_dim(self):
        return self.dim + 1 if self.kind == "sphere" else self.dim

    @property
    def curvature(self):
        return {"euclidean": 0.0, "sphere": 1.0, "hyperbolic": -1.0}[self.kind]

    @property
    def label(self):
        sym = {"euclidean": "R", "sphere": "S", "hyperbolic": "H"}[self.kind]
        return f"{sym}^{self.dim}" + ("/Z^%d" % self.dim if self.periodic else "")

    def inner(self, x, a, b):
        """Ambient inner product of tangent vectors a, b at points x (broadcasting)."""
        dot = np.sum(a * b, axis=-1)
        if self.kind == "hyperbolic":
            return dot / x[..., -1] ** 2
        return dot

    def distance(self, p, x):
        """Geodesic distance from the point p to each row of x."""
        x = np.atleast_2d(x)
        if self.kind == "euclidean":
            return np.linalg.norm(x - p, axis=-1)
        if self.kind == "sphere":
            c = np.clip(x @ p, -1.0, 1.0)
            return np.arccos(c)
        d2 = np.sum((x - p) ** 2, axis=-1)
        return np.arccosh(1.0 + d2 / (2.0 * x[:, -1] * p[-1]))

    def contains(self, x, tol=1e-12):
        x = np.atleast_2d(x)
        if self.kind == "sphere":
            return bool(np.all(np.abs(np.linalg.norm(x, axis=-1) - 1.0) <= tol))
        if self.kind == "hyperbolic":
            return bool(np.all(x[:, -1] > 0))
        return True


def euclidean(dim, periodic=False):
    return AmbientSpace("euclidean", dim, periodic)


def sphere_space(dim):
    return AmbientSpace("sphere", dim)


def hyperbolic(dim):
    return AmbientSpace("hyperbolic", dim)


# -------------------------------------------------------------- immersion


@dataclass(frozen=True)
class Interval:
    lo: float
    hi: float
    periodic: bool

    @property
    def length(self):
        return self.hi - self.lo


ChartFn = Callable[[np.ndarray], tuple]


@dataclass(frozen=True, eq=False)
class Immersion:
    """A parametrized closed submanifold with closed-form chart derivatives.

    ``chart(u)`` takes ``u`` of shape (P, n) and returns ``(x, dx, ddx)`` of
    shapes (P, E), (P, n, E), (P, n, n, E) where E is the embedding dimension.
    """

    name: str
    params: dict
    ambient: AmbientSpace
    n: int
    domain: tuple
    chart: ChartFn
    genus: int | None = None
    bounding: bool = True
    profile: Callable | None = None  # surfaces of revolution: s -> (rho, z, rho', z', rho'', z'')
    meta: dict = field(default_factory=dict)

    @property
    def m(self):
        return self.ambient.dim - self.n

    def __call__(self, u):
        return self.chart(np.atleast_2d(np.asarray(u, dtype=float)))

    def key(self):
        return (self.name, tuple(sorted(self.params.items())), self.ambient)

    def scaled(self, c):
        """The image under x -> c x (Euclidean ambient only)."""
        if self.ambient.kind != "euclidean":
            raise GeometryError("scaling is only defined for Euclidean immersions")
        base = self.chart

        def chart(u):
            x, dx, ddx = base(u)
            return c * x, c * dx, c * ddx

        prof = None
        if self.profile is not None:
            p0 = self.profile

            def prof(s):
                return tuple(c * q for q in p0(s))

        params = dict(self.params, scale=self.params.get("scale", 1.0) * c)
        return Immersion(self.name, params, self.ambient, self.n, self.domain, chart,
                         self.genus, self.bounding, prof, dict(self.meta))


@dataclass
class GeomSample:
    """Extrinsic data at a batch of P points (arrays carry a leading P axis)."""

    u: np.ndarray
    point: np.ndarray  # (P, E)
    tangent: np.ndarray  # (P, n, E), ambient-orthonormal
    normal: np.ndarray  # (P, m, E), ambient-orthonormal
    metric: np.ndarray  # (P, n, n)
    second_form: np.ndarray  # (P, m, n, n): <II(d_i, d_j), Y_a>
    H: np.ndarray  # (P, E) mean curvature vector
    H_norm: np.ndarray  # (P,)

    @property
    def area_element(self):
        return np.sqrt(np.linalg.det(self.metric))

    def shape_operator(self, a=0):
        """g^{-1} h for the a-th normal; principal curvatures are its eigenvalues."""
        return np.linalg.solve(self.metric, self.second_form[:, a])

    def principal_curvatures(self, a=0):
        return np.sort(np.linalg.eigvals(self.shape_operator(a)).real, axis=-1)

    def second_form_norm2(self):
        """|II|^2 (Frobenius, metric-traced) at each point."""
        tot = 0.0
        for a in range(self.second_form.shape[1]):
            s = self.shape_operator(a)
            tot = tot + np.einsum("pij,pji->p", s, s)
        return tot

    def scalar_curvature(self, ambient_curvature):
        """Scalar curvature of M from the Gauss equation."""
        n = self.metric.shape[-1]
        return n * (n - 1) * ambient_curvature + n * n * self.H_norm**2 - self.second_form_norm2()


def _orthonormalize(vecs, inner):
    """Gram-Schmidt of (P, k, E) vectors w.r.t. a batched inner product."""
    out = np.empty_like(vecs)
    for i in range(vecs.shape[1]):
        v = vecs[:, i].copy()
        for j in range(i):
            v -= inner(v, out[:, j])[:, None] * out[:, j]
        nv = np.sqrt(inner(v, v))
        out[:, i] = v / nv[:, None]
    return out


def _normal_frame(ambient, x, dx):
    """Ambient-orthonormal frame of the normal space, shape (P, m, E)."""
    P, n, E = dx.shape
    span = dx if ambient.kind != "sphere" else np.concatenate([dx, x[:, None, :]], axis=1)
    m = ambient.dim - n
    frames = np.empty((P, m, E))
    for p in range(P):
        _, _, vt = np.linalg.svd(span[p], full_matrices=True)
        frames[p] = vt[span.shape[1]:][:m]
    if ambient.kind == "hyperbolic":
        frames = frames * x[:, -1][:, None, None]
    return frames


def fundamental_forms(imm, u, metric_tol=1e-10):
    """First and second fundamental forms and mean curvature at points ``u``."""
    u = np.atleast_2d(np.asarray(u, dtype=float))
    amb = imm.ambient
    x, dx, ddx = imm.chart(u)
    inner = lambda a, b: amb.inner(x, a, b)
    g = np.einsum("pie,pje->pij", dx, dx)
    if amb.kind == "hyperbolic":
        g = g / x[:, -1, None, None] ** 2
    lam_min = np.linalg.eigvalsh(g)[:, 0]
    bad = np.nonzero(lam_min <= metric_tol)[0]
    if bad.size:
        raise DegeneratePointError(tuple(u[bad[0]]))
    cov = ddx.copy()
    if amb.kind == "hyperbolic":
        # normal part of the Levi-Civita correction of the half-space metric
        dots = np.einsum("pie,pje->pij", dx, dx)
        cov[..., -1] += dots / x[:, -1, None, None]
    Y = _normal_frame(amb, x, dx)
    h = np.einsum("pije,pae->paij", cov, Y)
    if amb.kind == "hyperbolic":
        h = h / x[:, -1, None, None, None] ** 2
    ginv = np.linalg.inv(g)
    Hcoef = np.einsum("pij,paij->pa", ginv, h) / imm.n
    H = np.einsum("pa,pae->pe", Hcoef, Y)
    X = _orthonormalize(dx, lambda a, b: amb.inner(x, a, b))
    return GeomSample(u, x, X, Y, g, h, H, np.sqrt(np.sum(Hcoef**2, axis=-1)))


# ------------------------------------------------------------- quadrature


@dataclass(eq=False)
class QuadratureGrid:
    imm_key: tuple
    sizes: tuple
    nodes: np.ndarray
    weights: np.ndarray
    area: np.ndarray
    sample: GeomSample

    @property
    def size(self):
        return self.nodes.shape[0]


def _rule(iv, k):
    if iv.periodic:
        t = iv.lo + iv.length * np.arange(k) / k
        return t, np.full(k, iv.length / k)
    z, w = np.polynomial.legendre.leggauss(k)
    return iv.lo + 0.5 * iv.length * (z + 1.0), 0.5 * iv.length * w


DEFAULT_SIZES = {1: (256,), 2: (64, 128)}


def build_grid(imm, sizes=None):
    """Tensor-product quadrature: trapezoid on periodic, Gauss-Legendre on clamped."""
    sizes = tuple(sizes or DEFAULT_SIZES[imm.n])
    if len(sizes) != imm.n:
        raise GeometryError("one grid size per parameter direction expected")
    rules = [_rule(iv, k) for iv, k in zip(imm.domain, sizes)]
    mesh = np.meshgrid(*[r[0] for r in rules], indexing="ij")
    wmesh = np.meshgrid(*[r[1] for r in rules], indexing="ij")
    nodes = np.stack([m.ravel() for m in mesh], axis=-1)
    weights = np.prod(np.stack([w.ravel() for w in wmesh], axis=-1), axis=-1)
    sample = fundamental_forms(imm, nodes)
    return QuadratureGrid(imm.key(), sizes, nodes, weights, sample.area_element, sample)


def integrate(imm, grid, f):
    """Integral over M of a scalar field given by its node values (or a callable on the sample)."""
    if grid.imm_key != imm.key():
        raise GeometryError("quadrature grid was built for a different immersion")
    vals = f(grid.sample) if callable(f) else np.asarray(f, dtype=float)
    if vals.shape != grid.weights.shape:
        raise GeometryError("field values do not match the grid nodes")
    return float(np.sum(vals * grid.weights * grid.area))


def volume(imm, grid):
    return integrate(imm, grid, np.ones(grid.size))


def willmore(imm, grid):
    """The Willmore functional, the integral of |H|^2."""
    return integrate(imm, grid, grid.sample.H_norm**2)


# -------------------------------------------------------- extrinsic radius


@dataclass
class RadiusResult:
    value: float
    center: np.ndarray
    improved: bool


def extrinsic_radius_search(imm, grid=None):
    """Minimize over centers the max distance to the sampled points of M.

    Each candidate center certifies its own max distance as an upper bound
    for the extrinsic radius (up to the sampling density of ``grid``).
    """
    amb = imm.ambient
    if amb.periodic:
        raise GeometryError("extrinsic radius is not defined for periodic ambients here")
    grid = grid or build_grid(imm)
    pts = grid.sample.point

    if amb.kind == "euclidean":
        to_center = lambda z: z
        z0 = pts.mean(axis=0)
    elif amb.kind == "sphere":
        to_center = lambda z: z / np.linalg.norm(z)
        c = pts.mean(axis=0)
        z0 = c if np.linalg.norm(c) > 1e-12 else pts[0]
    else:
        to_center = lambda z: np.concatenate([z[:-1], [math.exp(z[-1])]])
        c = pts.mean(axis=0)
        z0 = np.concatenate([c[:-1], [float(np.mean(np.log(pts[:, -1])))]])

    obj = lambda z: float(np.max(amb.distance(to_center(z), pts)))
    if amb.kind == "sphere":
        # the centroid can vanish (equatorial spheres); also try the coordinate poles
        starts = [z0] + [s * e for e in np.eye(len(z0)) for s in (1.0, -1.0)]
        z0 = min(starts, key=obj)
    start = obj(z0)
    res = optimize.minimize(obj, z0, method="Nelder-Mead",
                            options={"xatol": 1e-10, "fatol": 1e-12, "maxiter": 20000, "maxfev": 40000})
    best_z, best = (res.x, res.fun) if res.fun <= start else (z0, start)
    improved = best < start - 1e-15 or start == 0.0
    if not improved and best > 0:
        # centroid already optimal or search failed; both are valid bounds
        improved = bool(res.success)
        if not improved:
            warnings.warn("extrinsic radius search did not improve on the centroid bound")
    return RadiusResult(float(best), to_center(best_z), improved)


def extrinsic_radius(imm, grid=None):
    return extrinsic_radius_search(imm, grid).value


# --------------------------------------------------------------- catalog


def _periodic(lo=0.0, hi=2 * math.pi):
    return Interval(lo, hi, True)


def _clamped(lo, hi):
    return Interval(lo, hi, False)


def _plane_curve(fn):
    def chart(u):
        t = u[:, 0]
        x, dx, ddx = fn(t)
        return x, dx[:, None, :], ddx[:, None, None, :]

    return chart


def _circle(r=1.0):
    if r <= 0:
        raise GeometryError("circle radius must be positive")

    def fn(t):
        c, s = np.cos(t), np.sin(t)
        return (np.stack([r * c, r * s], -1), np.stack([-r * s, r * c], -1), np.stack([-r * c, -r * s], -1))

    return Immersion("circle", {"r": r}, euclidean(2), 1, (_periodic(),), _plane_curve(fn), bounding=True)


def _ellipse(a=2.0, b=1.0):
    if a <= 0 or b <= 0:
        raise GeometryError("ellipse semi-axes must be positive")

    def fn(t):
        c, s = np.cos(t), np.sin(t)
        return (np.stack([a * c, b * s], -1), np.stack([-a * s, b * c], -1), np.stack([-a * c, -b * s], -1))

    return Immersion("ellipse", {"a": a, "b": b}, euclidean(2), 1, (_periodic(),), _plane_curve(fn))


def _fourier_curve(r0=1.0, cos=(0.0, 0.2), sin=(0.0, 0.0)):
    """Star-shaped curve with polar radius r0 + sum a_k cos kt + b_k sin kt."""
    ca = np.asarray(cos, dtype=float)
    sb = np.asarray(sin, dtype=float)
    ks = np.arange(1, max(len(ca), len(sb)) + 1)
    ca = np.pad(ca, (0, len(ks) - len(ca)))
    sb = np.pad(sb, (0, len(ks) - len(sb)))
    if r0 - np.sum(np.abs(ca)) - np.sum(np.abs(sb)) <= 0:
        raise GeometryError("fourier-curve radius must stay positive")

    def fn(t):
        kt = np.outer(t, ks)
        rho = r0 + np.cos(kt) @ ca + np.sin(kt) @ sb
        d1 = -np.sin(kt) @ (ks * ca) + np.cos(kt) @ (ks * sb)
        d2 = -np.cos(kt) @ (ks**2 * ca) - np.sin(kt) @ (ks**2 * sb)
        c, s = np.cos(t), np.sin(t)
        x = np.stack([rho * c, rho * s], -1)
        dx = np.stack([d1 * c - rho * s, d1 * s + rho * c], -1)
        ddx = np.stack([d2 * c - 2 * d1 * s - rho * c, d2 * s + 2 * d1 * c - rho * s], -1)
        return x, dx, ddx

    params = {"r0": r0, "cos": tuple(float(v) for v in ca), "sin": tuple(float(v) for v in sb)}
    return Immersion("fourier-curve", params, euclidean(2), 1, (_periodic(),), _plane_curve(fn))


def _revolution(name, params, profile, s_domain, genus, ambient=None, lift=None):
    """Surface of revolution x(s, th) = (rho cos th, rho sin th, z) from a profile."""

    def chart(u):
        s, th = u[:, 0], u[:, 1]
        rho, z, rs, zs, rss, zss = profile(s)
        c, sn = np.cos(th), np.sin(th)
        zero = np.zeros_like(s)
        x = np.stack([rho * c, rho * sn, z], -1)
        xs = np.stack([rs * c, rs * sn, zs], -1)
        xt = np.stack([-rho * sn, rho * c, zero], -1)
        xss = np.stack([rss * c, rss * sn, zss], -1)
        xst = np.stack([-rs * sn, rs * c, zero], -1)
        xtt = np.stack([-rho * c, -rho * sn, zero], -1)
        dx = np.stack([xs, xt], 1)
        ddx = np.stack([np.stack([xss, xst], 1), np.stack([xst, xtt], 1)], 1)
        return x, dx, ddx

    return Immersion(name, params, ambient or euclidean(3), 2, (s_domain, _periodic()), chart,
                     genus=genus, bounding=True, profile=profile, meta={"rotational": True})


def _sphere(rho=1.0, n=2):
    if rho <= 0:
        raise GeometryError("sphere radius must be positive")
    if n == 1:
        imm = _circle(rho)
        return Immersion("sphere", {"rho": rho, "n": 1}, imm.ambient, 1, imm.domain, imm.chart)

    if n != 2:
        raise GeometryError("sphere catalog entry supports n in {1, 2}")

    def profile(s):
        c, sn = np.cos(s), np.sin(s)
        return rho * sn, rho * c, rho * c, -rho * sn, -rho * sn, -rho * c

    return _revolution("sphere", {"rho": rho, "n": 2}, profile, _clamped(0.0, math.pi), 0)


def _ellipsoid(a=1.2, c=1.0):
    if a <= 0 or c <= 0:
        raise GeometryError("ellipsoid semi-axes must be positive")

    def profile(s):
        cs, sn = np.cos(s), np.sin(s)
        return a * sn, c * cs, a * cs, -c * sn, -a * sn, -c * cs

    return _revolution("ellipsoid-of-revolution", {"a": a, "c": c}, profile, _clamped(0.0, math.pi), 0)


def _torus(R=2.0, r=1.0):
    if not (0 < r < R):
        raise GeometryError("torus of revolution needs 0 < r < R")

    def profile(s):
        cs, sn = np.cos(s), np.sin(s)
        return R + r * cs, r * sn, -r * sn, r * cs, -r * cs, -r * sn

    return _revolution("torus-of-revolution", {"R": R, "r": r}, profile, _periodic(), 1)


def _sphere_in_sphere(n, a, name):
    """Distance sphere of geodesic radius a about the north pole of S^(n+1)."""
    if not (0 < a <= math.pi / 2):
        raise GeometryError("geodesic radius must lie in (0, pi/2]")
    sa, ca = math.sin(a), math.cos(a)
    amb = sphere_space(n + 1)
    if n == 1:
        def chart(u):
            t = u[:, 0]
            c, s = np.cos(t), np.sin(t)
            z = np.zeros_like(t)
            x = np.stack([sa * c, sa * s, z + ca], -1)
            dx = np.stack([-sa * s, sa * c, z], -1)[:, None, :]
            ddx = np.stack([-sa * c, -sa * s, z], -1)[:, None, None, :]
            return x, dx, ddx

        return Immersion(name, {"n": 1, "a": a}, amb, 1, (_periodic(),), chart, bounding=True)
    if n != 2:
        raise GeometryError("spheres in spheres support n in {1, 2}")

    def chart(u):
        s, th = u[:, 0], u[:, 1]
        cs, ss, ct, st = np.cos(s), np.sin(s), np.cos(th), np.sin(th)
        z = np.zeros_like(s)
        x = np.stack([sa * ss * ct, sa * ss * st, sa * cs, z + ca], -1)
        xs = np.stack([sa * cs * ct, sa * cs * st, -sa * ss, z], -1)
        xt = np.stack([-sa * ss * st, sa * ss * ct, z, z], -1)
        xss = np.stack([-sa * ss * ct, -sa * ss * st, -sa * cs, z], -1)
        xst = np.stack([-sa * cs * st, sa * cs * ct, z, z], -1)
        xtt = np.stack([-sa * ss * ct, -sa * ss * st, z, z], -1)
        dx = np.stack([xs, xt], 1)
        ddx = np.stack([np.stack([xss, xst], 1), np.stack([xst, xtt], 1)], 1)
        return x, dx, ddx

    return Immersion(name, {"n": 2, "a": a}, amb, 2, (_clamped(0.0, math.pi), _periodic()), chart,
                     genus=0, bounding=True, meta={"rotational": True})


def _small_sphere(n=2, a=math.pi / 3):
    return _sphere_in_sphere(n, a, "small-sphere-in-sphere")


def _equatorial(n=2):
    return _sphere_in_sphere(n, math.pi / 2, "equatorial-sphere")


def _geodesic_sphere_hyperbolic(r=1.0, n=2):
    """Geodesic sphere of radius r about (0, .., 0, 1) in the half-space model."""
    if r <= 0:
        raise GeometryError("radius must be positive")
    if n != 2:
        raise GeometryError("geodesic spheres in H^(n+1) support n = 2")
    rho, h = math.sinh(r), math.cosh(r)

    def profile(s):
        c, sn = np.cos(s), np.sin(s)
        return rho * sn, h + rho * c, rho * c, -rho * sn, -rho * sn, -rho * c

    imm = _revolution("geodesic-sphere-hyperbolic", {"r": r, "n": 2}, profile, _clamped(0.0, math.pi), 0,
                      ambient=hyperbolic(3))
    return imm


def _flat_subtorus():
    """Linear subtorus R^2/Z^2 inside the flat 3-torus R^3/Z^3 (does not bound)."""

    def chart(u):
        P = u.shape[0]
        x = np.stack([u[:, 0], u[:, 1], np.zeros(P)], -1)
        dx = np.broadcast_to(np.array([[1.0, 0, 0], [0, 1.0, 0]]), (P, 2, 3)).copy()
        return x, dx, np.zeros((P, 2, 2, 3))

    return Immersion("flat-subtorus", {}, euclidean(3, periodic=True), 2,
                     (_periodic(0.0, 1.0), _periodic(0.0, 1.0)), chart, genus=1, bounding=False,
                     meta={"lattice": ((1.0, 0.0), (0.0, 1.0))})


def _clifford_torus():
    """Minimal Clifford torus S^1(1/sqrt2) x S^1(1/sqrt2) in S^3."""
    k = 1 / math.sqrt(2)

    def chart(u):
        a, b = u[:, 0], u[:, 1]
        ca, sa, cb, sb = np.cos(a), np.sin(a), np.cos(b), np.sin(b)
        z = np.zeros_like(a)
        x = k * np.stack([ca, sa, cb, sb], -1)
        xa = k * np.stack([-sa, ca, z, z], -1)
        xb = k * np.stack([z, z, -sb, cb], -1)
        xaa = k * np.stack([-ca, -sa, z, z], -1)
        xbb = k * np.stack([z, z, -cb, -sb], -1)
        zz = np.zeros_like(x)
        dx = np.stack([xa, xb], 1)
        ddx = np.stack([np.stack([xaa, zz], 1), np.stack([zz, xbb], 1)], 1)
        return x, dx, ddx

    return Immersion("clifford-torus", {}, sphere_space(3), 2, (_periodic(), _periodic()), chart,
                     genus=1, bounding=True,
                     meta={"lattice": ((2 * math.pi * k, 0.0), (0.0, 2 * math.pi * k))})


_CATALOG = {
    "circle": _circle,
    "ellipse": _ellipse,
    "fourier-curve": _fourier_curve,
    "sphere": _sphere,
    "ellipsoid-of-revolution": _ellipsoid,
    "torus-of-revolution": _torus,
    "small-sphere-in-sphere": _small_sphere,
    "equatorial-sphere": _equatorial,
    "geodesic-sphere-hyperbolic": _geodesic_sphere_hyperbolic,
    "flat-subtorus": _flat_subtorus,
    "clifford-torus": _clifford_torus,
}

CATALOG_NAMES = tuple(_CATALOG)


def catalog(name, **params):
    """Build a catalog immersion by name; unknown names and bad parameters raise."""
    try:
        factory = _CATALOG[name]
    except KeyError:
        raise GeometryError(f"unknown catalog entry {name!r}; choose from {', '.join(_CATALOG)}") from None
    try:
        return factory(**params)
    except TypeError as exc:
        raise GeometryError(f"invalid parameters for {name}: {exc}") from None
